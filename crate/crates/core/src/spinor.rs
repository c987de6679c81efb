//! Dirac algebra, free spinors and the sampled mode functions of both fields.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{discretize, DiscreteCoefficients, MomentumLattice};
use crate::scalar::{re, Real};

/// 4×4 complex matrix.
pub type Mat4<T> = [[Complex<T>; 4]; 4];
/// Four-component spinor.
pub type Spinor<T> = [Complex<T>; 4];

/// Matrices `α¹, α², α³` and `β = γ⁰`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracAlgebra<T> {
    pub alpha: [Mat4<T>; 3],
    pub beta: Mat4<T>,
}

impl<T: Real> DiracAlgebra<T> {
    /// Dirac representation: `β = diag(1, 1, −1, −1)` and
    /// `αʲ = [[0, σʲ], [σʲ, 0]]`.
    pub fn dirac() -> Self {
        let sigma = pauli::<T>();
        let mut alpha = [zero4(); 3];
        for (j, a) in alpha.iter_mut().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    a[r][c + 2] = sigma[j][r][c];
                    a[r + 2][c] = sigma[j][r][c];
                }
            }
        }
        let mut beta = zero4();
        for (i, row) in beta.iter_mut().enumerate() {
            row[i] = re(if i < 2 { T::one() } else { -T::one() });
        }
        Self { alpha, beta }
    }

    /// Chiral representation: `β = [[0, I], [I, 0]]`,
    /// `αʲ = [[−σʲ, 0], [0, σʲ]]`. Unitarily equivalent to [`Self::dirac`].
    pub fn chiral() -> Self {
        let sigma = pauli::<T>();
        let mut alpha = [zero4(); 3];
        for (j, a) in alpha.iter_mut().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    a[r][c] = -sigma[j][r][c];
                    a[r + 2][c + 2] = sigma[j][r][c];
                }
            }
        }
        let mut beta = zero4();
        for i in 0..2 {
            beta[i][i + 2] = re(T::one());
            beta[i + 2][i] = re(T::one());
        }
        Self { alpha, beta }
    }

    pub fn gamma0(&self) -> &Mat4<T> {
        &self.beta
    }

    /// One-particle Dirac Hamiltonian `α·p + βM`.
    pub fn hamiltonian(&self, p: [T; 3], mass: T) -> Mat4<T> {
        let mut h = scale4(&self.beta, re(mass));
        for j in 0..3 {
            h = add4(&h, &scale4(&self.alpha[j], re(p[j])));
        }
        h
    }
}

impl<T: Real> Default for DiracAlgebra<T> {
    fn default() -> Self {
        Self::dirac()
    }
}

fn pauli<T: Real>() -> [[[Complex<T>; 2]; 2]; 3] {
    let o = re(T::zero());
    let l = re(T::one());
    let i = Complex::new(T::zero(), T::one());
    [[[o, l], [l, o]], [[o, -i], [i, o]], [[l, o], [o, -l]]]
}

pub fn zero4<T: Real>() -> Mat4<T> {
    [[re(T::zero()); 4]; 4]
}

pub fn identity4<T: Real>() -> Mat4<T> {
    let mut m = zero4();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = re(T::one());
    }
    m
}

pub fn add4<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut m = *a;
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] += b[r][c];
        }
    }
    m
}

pub fn scale4<T: Real>(a: &Mat4<T>, s: Complex<T>) -> Mat4<T> {
    let mut m = *a;
    m.iter_mut().flatten().for_each(|x| *x *= s);
    m
}

pub fn mul4<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut m = zero4();
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = (0..4).fold(re(T::zero()), |acc, k| acc + a[r][k] * b[k][c]);
        }
    }
    m
}

/// `ab + ba`
pub fn anticommutator4<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    add4(&mul4(a, b), &mul4(b, a))
}

pub fn apply4<T: Real>(a: &Mat4<T>, v: &Spinor<T>) -> Spinor<T> {
    let mut out = [re(T::zero()); 4];
    for r in 0..4 {
        out[r] = (0..4).fold(re(T::zero()), |acc, k| acc + a[r][k] * v[k]);
    }
    out
}

/// `a†b`
pub fn spinor_inner<T: Real>(a: &Spinor<T>, b: &Spinor<T>) -> Complex<T> {
    a.iter().zip(b).fold(re(T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Relativistic one-particle energy `√(p² + m²)`.
pub fn energy<T: Real>(p: [T; 3], mass: T) -> T {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + mass * mass).sqrt()
}

/// Positive- and negative-energy spinors at one momentum.
///
/// `u[s]` solves `(α·p + βM)u = E u` and `v[s]` is the spinor written
/// `v_s(−p)` in the field expansion, i.e. it solves
/// `(α·p + βM)v = −E v`. Index 0 is spin `+1/2`, index 1 spin `−1/2`.
/// The four vectors are orthonormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorPair<T> {
    pub momentum: [T; 3],
    pub mass: T,
    pub energy: T,
    pub u: [Spinor<T>; 2],
    pub v: [Spinor<T>; 2],
}

/// Builds the spinors by projecting canonical basis vectors onto each
/// energy eigenspace and orthonormalizing them in a fixed preference order.
/// The largest-magnitude component of every spinor is made real positive.
pub fn spinors_at<T: Real>(algebra: &DiracAlgebra<T>, p: [T; 3], mass: T) -> SpinorPair<T> {
    let e = energy(p, mass);
    let h = algebra.hamiltonian(p, mass);
    let two_e = re(T::lit(2.0) * e);
    // P± = (E ± H) / 2E
    let mut plus = scale4(&h, re(T::one()) / two_e);
    let mut minus = scale4(&h, -re(T::one()) / two_e);
    for i in 0..4 {
        plus[i][i] += re(T::lit(0.5));
        minus[i][i] += re(T::lit(0.5));
    }
    let u = project_pair(&plus, [0, 1, 2, 3]);
    let v = project_pair(&minus, [2, 3, 0, 1]);
    SpinorPair {
        momentum: p,
        mass,
        energy: e,
        u,
        v,
    }
}

fn project_pair<T: Real>(projector: &Mat4<T>, order: [usize; 4]) -> [Spinor<T>; 2] {
    // Each projector has rank two, so Σ_i ‖P e_i‖² = 2 and at least two
    // canonical vectors survive the threshold after orthogonalization.
    let threshold = T::lit(0.25);
    let mut found: Vec<Spinor<T>> = Vec::with_capacity(2);
    for &i in &order {
        let mut e = [re(T::zero()); 4];
        e[i] = re(T::one());
        let mut w = apply4(projector, &e);
        for prev in &found {
            let c = spinor_inner(prev, &w);
            for k in 0..4 {
                w[k] -= c * prev[k];
            }
        }
        let n2 = w.iter().fold(T::zero(), |a, x| a + x.norm_sqr());
        if n2 > threshold * threshold {
            found.push(fix_phase(normalize4(w)));
            if found.len() == 2 {
                break;
            }
        }
    }
    [found[0], found[1]]
}

fn normalize4<T: Real>(mut w: Spinor<T>) -> Spinor<T> {
    let n = w.iter().fold(T::zero(), |a, x| a + x.norm_sqr()).sqrt();
    w.iter_mut().for_each(|x| *x /= re(n));
    w
}

fn fix_phase<T: Real>(mut w: Spinor<T>) -> Spinor<T> {
    let max = w.iter().map(|x| x.norm()).fold(T::zero(), T::max);
    let tie = T::lit(1e-12);
    let pivot = w.iter().position(|x| x.norm() >= max * (T::one() - tie)).unwrap_or(0);
    let phase = w[pivot].conj() / re(w[pivot].norm());
    w.iter_mut().for_each(|x| *x *= phase);
    w[pivot] = re(w[pivot].re);
    w
}

/// Momentum-space damping profile for the ultraviolet cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffProfile<T> {
    /// Identically zero (switches the field off).
    Off,
    /// `1` for `|p| ≤ radius`, `0` beyond.
    SharpBall { radius: T },
    /// `exp(−|p|² / 2w²)`
    Gaussian { width: T },
}

impl<T: Real> CutoffProfile<T> {
    pub fn eval(&self, p: [T; 3]) -> T {
        let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        match *self {
            CutoffProfile::Off => T::zero(),
            CutoffProfile::SharpBall { radius } => {
                if r2 <= radius * radius {
                    T::one()
                } else {
                    T::zero()
                }
            }
            CutoffProfile::Gaussian { width } => (-r2 / (T::lit(2.0) * width * width)).exp(),
        }
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        let ok = match *self {
            CutoffProfile::Off => true,
            CutoffProfile::SharpBall { radius } => radius >= T::zero() && radius.is_finite(),
            CutoffProfile::Gaussian { width } => width > T::zero() && width.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::parameter(name, "cutoff scale must be positive and finite"))
        }
    }
}

/// Position-space weight of the interaction. Only gaussians are offered:
/// they are integrable, have a finite first moment and a closed-form
/// Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialCutoff<T> {
    /// `exp(−|x|² / 2σ²)`, transformed in closed form.
    Gaussian { width: T },
    /// Same profile, transformed with a separable trapezoid rule over
    /// `[−8σ, 8σ]` using `nodes` points per axis. Meant for cross-checks.
    GaussianQuadrature { width: T, nodes: usize },
}

impl<T: Real> SpatialCutoff<T> {
    pub fn width(&self) -> T {
        match *self {
            SpatialCutoff::Gaussian { width } | SpatialCutoff::GaussianQuadrature { width, .. } => width,
        }
    }

    pub fn eval(&self, x: [T; 3]) -> T {
        let w = self.width();
        (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (T::lit(2.0) * w * w)).exp()
    }

    /// `∫|χ(x)| dx = (2πσ²)^{3/2}`
    pub fn l1_norm(&self) -> T {
        let w = self.width();
        (T::lit(2.0) * T::PI() * w * w).powf(T::lit(1.5))
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.width();
        if !(w > T::zero() && w.is_finite()) {
            return Err(Error::parameter("spatial_cutoff", "width must be positive and finite"));
        }
        if let SpatialCutoff::GaussianQuadrature { nodes, .. } = *self {
            if nodes < 3 {
                return Err(Error::parameter("spatial_cutoff", "quadrature needs at least 3 nodes"));
            }
        }
        Ok(())
    }
}

/// Sampled `f_s^l` and `g_s^l` together with the one-particle energies.
///
/// Indexing is `f[s][l]` with `s = 0` for spin `+1/2`.
#[derive(Debug, Clone)]
pub struct FermionCoefficients<T> {
    pub f: [[DiscreteCoefficients<T>; 4]; 2],
    pub g: [[DiscreteCoefficients<T>; 4]; 2],
    pub energies: Vec<T>,
}

/// Samples `f_s^l(p) = χ(p) u_s^l(p) / √((2π)³E(p))` and
/// `g_s^l(p) = χ(p) v_s^l(−p) / √((2π)³E(p))` on the lattice.
pub fn fermion_coefficients<T: Real>(
    lattice: &Arc<MomentumLattice<T>>,
    mass: T,
    cutoff: &CutoffProfile<T>,
    algebra: &DiracAlgebra<T>,
) -> Result<FermionCoefficients<T>> {
    if !(mass > T::zero()) {
        return Err(Error::parameter("dirac_mass", "must be positive"));
    }
    cutoff.validate("dirac_cutoff")?;
    let two_pi_cubed = (T::lit(2.0) * T::PI()).powi(3);
    let spinors: Vec<SpinorPair<T>> = lattice.points().iter().map(|p| spinors_at(algebra, *p, mass)).collect();
    let family = |use_v: bool| -> Result<[[DiscreteCoefficients<T>; 4]; 2]> {
        let mut spins = Vec::with_capacity(2);
        for s in 0..2 {
            let mut comps = Vec::with_capacity(4);
            for l in 0..4 {
                let values = lattice
                    .points()
                    .iter()
                    .zip(&spinors)
                    .map(|(p, sp)| {
                        let spinor = if use_v { sp.v[s] } else { sp.u[s] };
                        spinor[l] * re(cutoff.eval(*p) / (two_pi_cubed * sp.energy).sqrt())
                    })
                    .collect();
                comps.push(DiscreteCoefficients::from_values(lattice.clone(), values)?);
            }
            spins.push(<[_; 4]>::try_from(comps).expect("four components"));
        }
        Ok(<[_; 2]>::try_from(spins).expect("two spins"))
    };
    Ok(FermionCoefficients {
        f: family(false)?,
        g: family(true)?,
        energies: spinors.iter().map(|s| s.energy).collect(),
    })
}

/// Sampled `h(k) = χ(k) / √((2π)³ω(k))` and the energies `ω(k)`.
#[derive(Debug, Clone)]
pub struct BosonCoefficients<T> {
    pub h: DiscreteCoefficients<T>,
    pub energies: Vec<T>,
}

pub fn boson_coefficients<T: Real>(
    lattice: &Arc<MomentumLattice<T>>,
    mass: T,
    cutoff: &CutoffProfile<T>,
) -> Result<BosonCoefficients<T>> {
    if !(mass > T::zero()) {
        return Err(Error::parameter("boson_mass", "must be positive"));
    }
    cutoff.validate("boson_cutoff")?;
    let two_pi_cubed = (T::lit(2.0) * T::PI()).powi(3);
    let h = discretize(
        |k| re(cutoff.eval(k) / (two_pi_cubed * energy(k, mass)).sqrt()),
        lattice,
    )?;
    let energies = lattice.points().iter().map(|k| energy(*k, mass)).collect();
    Ok(BosonCoefficients { h, energies })
}
