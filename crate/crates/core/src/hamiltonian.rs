//! Free part, interaction and total Hamiltonian as sparse matrices.
//!
//! The interaction is the discretized `∫ χ_I(x) ψ̄(x)ψ(x) ⊗ φ(x) dx` with
//! `ψ̄ = ψ*γ⁰`, expanded without normal ordering. With
//! `ψ_l(x) = Σ_s b_s(f^l_{s,x}) + d_s*(g^l_{s,x})`, `f_{s,x}(p) = f_s(p)e^{−ip·x}`
//! and `φ(x) = (a(h_x) + a*(h_x))/√2`, `h_x(k) = h(k)e^{ik·x}`, every product
//! of three ladder operators carries a plane wave `e^{iP·x}` and the
//! x-integral collapses to `χ̂_I(−P)`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    fermion_action, BosonTruncation, FermionMode, FockBasis, FockLayout, Species, Spin, DEFAULT_MAX_DIMENSION,
};
use crate::lattice::{DiscreteCoefficients, LatticeSpec, MomentumLattice};
use crate::scalar::{re, Real};
use crate::sparse::SparseOperator;
use crate::spinor::{
    boson_coefficients, fermion_coefficients, BosonCoefficients, CutoffProfile, DiracAlgebra, FermionCoefficients,
    Mat4, SpatialCutoff,
};

/// Matrix representation of the Dirac algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    #[default]
    Dirac,
    Chiral,
}

impl Representation {
    pub fn algebra<T: Real>(self) -> DiracAlgebra<T> {
        match self {
            Representation::Dirac => DiracAlgebra::dirac(),
            Representation::Chiral => DiracAlgebra::chiral(),
        }
    }
}

fn default_momentum_cutoff<T: Real>() -> CutoffProfile<T> {
    CutoffProfile::Gaussian { width: T::lit(5.0) }
}

fn default_spatial_cutoff<T: Real>() -> SpatialCutoff<T> {
    SpatialCutoff::Gaussian { width: T::one() }
}

fn default_truncation() -> BosonTruncation {
    BosonTruncation::new(3, 3)
}

fn default_prune_floor<T: Real>() -> T {
    T::lit(1e-14)
}

fn default_max_dimension() -> usize {
    DEFAULT_MAX_DIMENSION
}

/// Physical and truncation parameters of one model instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct ModelParams<T> {
    /// `M > 0`
    pub dirac_mass: T,
    /// `m > 0`
    pub boson_mass: T,
    /// `κ`
    pub coupling: T,
    #[serde(default = "default_momentum_cutoff")]
    pub dirac_cutoff: CutoffProfile<T>,
    #[serde(default = "default_momentum_cutoff")]
    pub boson_cutoff: CutoffProfile<T>,
    #[serde(default = "default_spatial_cutoff")]
    pub spatial_cutoff: SpatialCutoff<T>,
    #[serde(default = "LatticeSpec::origin")]
    pub fermion_lattice: LatticeSpec<T>,
    #[serde(default = "LatticeSpec::origin")]
    pub boson_lattice: LatticeSpec<T>,
    #[serde(default = "default_truncation")]
    pub truncation: BosonTruncation,
    #[serde(default)]
    pub representation: Representation,
    /// Interaction terms with `|χ̂_I| < prune_floor · max|χ̂_I|` are dropped.
    #[serde(default = "default_prune_floor")]
    pub prune_floor: T,
    #[serde(default = "default_max_dimension")]
    pub max_dimension: usize,
}

impl<T: Real> ModelParams<T> {
    /// Defaults for everything but the masses and the coupling: one-point
    /// lattices at `V = 2π`, gaussian cutoffs, `n_max = N_B = 3`.
    pub fn new(dirac_mass: T, boson_mass: T, coupling: T) -> Self {
        Self {
            dirac_mass,
            boson_mass,
            coupling,
            dirac_cutoff: default_momentum_cutoff(),
            boson_cutoff: default_momentum_cutoff(),
            spatial_cutoff: default_spatial_cutoff(),
            fermion_lattice: LatticeSpec::origin(),
            boson_lattice: LatticeSpec::origin(),
            truncation: default_truncation(),
            representation: Representation::Dirac,
            prune_floor: default_prune_floor(),
            max_dimension: default_max_dimension(),
        }
    }

    /// `ν = min{m, M}`
    pub fn nu(&self) -> T {
        self.dirac_mass.min(self.boson_mass)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dirac_mass > T::zero() && self.dirac_mass.is_finite()) {
            return Err(Error::parameter("dirac_mass", "must be positive and finite"));
        }
        if !(self.boson_mass > T::zero() && self.boson_mass.is_finite()) {
            return Err(Error::parameter("boson_mass", "must be positive and finite"));
        }
        if !self.coupling.is_finite() {
            return Err(Error::parameter("coupling", "must be finite"));
        }
        self.dirac_cutoff.validate("dirac_cutoff")?;
        self.boson_cutoff.validate("boson_cutoff")?;
        self.spatial_cutoff.validate()?;
        if !(self.prune_floor >= T::zero() && self.prune_floor < T::one()) {
            return Err(Error::parameter("prune_floor", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// `χ̂_I(ξ) = ∫ χ_I(x) e^{−iξ·x} dx`. Real and even for the gaussian
/// profile: `(2πσ²)^{3/2} exp(−σ²|ξ|²/2)`.
pub fn chi_i_hat<T: Real>(xi: [T; 3], cutoff: &SpatialCutoff<T>) -> T {
    match *cutoff {
        SpatialCutoff::Gaussian { width } => {
            let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            cutoff.l1_norm() * (-width * width * r2 / T::lit(2.0)).exp()
        }
        SpatialCutoff::GaussianQuadrature { width, nodes } => {
            // separable: product of 1D trapezoid sums of e^{−x²/2σ²}cos(ξ_j x)
            let half = T::lit(8.0) * width;
            let h = T::lit(2.0) * half / T::from_usize(nodes - 1).unwrap();
            xi.iter()
                .map(|&k| {
                    let mut sum = T::zero();
                    for i in 0..nodes {
                        let x = -half + h * T::from_usize(i).unwrap();
                        let weight = if i == 0 || i == nodes - 1 {
                            T::lit(0.5)
                        } else {
                            T::one()
                        };
                        sum += weight * (-x * x / (T::lit(2.0) * width * width)).exp() * (k * x).cos();
                    }
                    sum * h
                })
                .fold(T::one(), |acc, v| acc * v)
        }
    }
}

/// Fermion bilinear inside `ψ*_l ψ_{l'}`, written in operator order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bilinear {
    /// `b*_q b_{q'}`
    BStarB,
    /// `b*_q d*_{q'}`
    BStarDStar,
    /// `d_q b_{q'}`
    DB,
    /// `d_q d*_{q'}`
    DDStar,
}

impl Bilinear {
    pub const ALL: [Bilinear; 4] = [Bilinear::BStarB, Bilinear::BStarDStar, Bilinear::DB, Bilinear::DDStar];

    /// `(species, creates)` of the left and right operator.
    pub fn operators(self) -> [(Species, bool); 2] {
        use Species::*;
        match self {
            Bilinear::BStarB => [(Particle, true), (Particle, false)],
            Bilinear::BStarDStar => [(Particle, true), (Antiparticle, true)],
            Bilinear::DB => [(Antiparticle, false), (Particle, false)],
            Bilinear::DDStar => [(Antiparticle, false), (Antiparticle, true)],
        }
    }
}

/// Boson factor of an interaction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BosonLeg {
    Annihilate,
    Create,
}

/// One product `c · F_left F_right ⊗ B` of the expanded interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionTerm<T> {
    pub bilinear: Bilinear,
    pub boson: BosonLeg,
    pub spins: (Spin, Spin),
    /// Spinor components `(l, l')`, zero based.
    pub components: (usize, usize),
    /// Fermion lattice points `(q, q')`.
    pub points: (usize, usize),
    /// Boson lattice point `k`.
    pub boson_point: usize,
    pub coefficient: Complex<T>,
}

impl<T: Real> InteractionTerm<T> {
    pub fn left_mode(&self) -> FermionMode {
        FermionMode {
            species: self.bilinear.operators()[0].0,
            spin: self.spins.0,
            point: self.points.0,
        }
    }

    pub fn right_mode(&self) -> FermionMode {
        FermionMode {
            species: self.bilinear.operators()[1].0,
            spin: self.spins.1,
            point: self.points.1,
        }
    }
}

/// Bookkeeping of the term expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermStatistics<T> {
    /// `128 · N_f² · N_b`: every `(l, l', s, s', q, q', k)` and all 8 types.
    pub enumerated: usize,
    /// Terms whose coefficient is exactly zero.
    pub zero: usize,
    /// Terms dropped by the `χ̂_I` floor.
    pub pruned: usize,
    /// `Σ |coefficient|` over the pruned terms.
    pub pruned_weight: T,
    /// Terms dropped because they touch a mode outside a restricted layout.
    #[serde(default)]
    pub outside_modes: usize,
    pub retained: usize,
}

fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn neg3<T: Real>(a: [T; 3]) -> [T; 3] {
    [-a[0], -a[1], -a[2]]
}

/// Expands the interaction into individual ladder-operator products.
///
/// Coefficient of `F(q) F'(q') ⊗ B(k)` is
/// `γ⁰_{ll'} · A_F · A_B / √2 · χ̂_I(−P)` where `A_F` is the product of the
/// two fermion amplitudes (times the cell volume), `A_B` the boson
/// amplitude (times `√cell volume`) and `P` the total plane-wave momentum.
pub fn enumerate_interaction_terms<T: Real>(
    fermions: &FermionCoefficients<T>,
    bosons: &BosonCoefficients<T>,
    gamma0: &Mat4<T>,
    spatial: &SpatialCutoff<T>,
    prune_floor: T,
) -> (Vec<InteractionTerm<T>>, TermStatistics<T>) {
    let flat = fermions.f[0][0].lattice().clone();
    let blat = bosons.h.lattice().clone();
    let nf = flat.len();
    let nb = blat.len();
    let wf = flat.cell_volume();
    let root_wb = blat.cell_volume().sqrt();
    let inv_root2 = T::one() / T::lit(2.0).sqrt();
    let floor = prune_floor * chi_i_hat([T::zero(); 3], spatial);
    let mut stats = TermStatistics {
        enumerated: 128 * nf * nf * nb,
        zero: 0,
        pruned: 0,
        pruned_weight: T::zero(),
        outside_modes: 0,
        retained: 0,
    };
    let zero = re(T::zero());
    let mut terms = Vec::new();
    for l in 0..4 {
        for lp in 0..4 {
            let g0 = gamma0[l][lp];
            for bilinear in Bilinear::ALL {
                for s in Spin::BOTH {
                    for sp in Spin::BOTH {
                        let left = match bilinear {
                            Bilinear::BStarB | Bilinear::BStarDStar => &fermions.f[s.index()][l],
                            Bilinear::DB | Bilinear::DDStar => &fermions.g[s.index()][l],
                        };
                        let right = match bilinear {
                            Bilinear::BStarB | Bilinear::DB => &fermions.f[sp.index()][lp],
                            Bilinear::BStarDStar | Bilinear::DDStar => &fermions.g[sp.index()][lp],
                        };
                        for q in 0..nf {
                            for qp in 0..nf {
                                let (pq, pqp) = (flat.point(q), flat.point(qp));
                                // creators carry e^{−ip·x}, annihilators e^{+ip·x}
                                let (amp_f, phase_f) = match bilinear {
                                    Bilinear::BStarB => (left.values()[q] * right.values()[qp].conj(), sub3(pqp, pq)),
                                    Bilinear::BStarDStar => {
                                        (left.values()[q] * right.values()[qp], neg3(add3(pq, pqp)))
                                    }
                                    Bilinear::DB => {
                                        (left.values()[q].conj() * right.values()[qp].conj(), add3(pq, pqp))
                                    }
                                    Bilinear::DDStar => (left.values()[q].conj() * right.values()[qp], sub3(pq, pqp)),
                                };
                                for k in 0..nb {
                                    let pk = blat.point(k);
                                    for leg in [BosonLeg::Annihilate, BosonLeg::Create] {
                                        let (amp_b, total) = match leg {
                                            BosonLeg::Annihilate => (bosons.h.values()[k].conj(), sub3(phase_f, pk)),
                                            BosonLeg::Create => (bosons.h.values()[k], add3(phase_f, pk)),
                                        };
                                        let bare = g0 * amp_f * amp_b * re(wf * root_wb * inv_root2);
                                        if bare == zero {
                                            stats.zero += 1;
                                            continue;
                                        }
                                        let kernel = chi_i_hat(neg3(total), spatial);
                                        let coefficient = bare * re(kernel);
                                        if kernel.abs() < floor {
                                            stats.pruned += 1;
                                            stats.pruned_weight += coefficient.norm();
                                            continue;
                                        }
                                        if coefficient == zero {
                                            stats.zero += 1;
                                            continue;
                                        }
                                        terms.push(InteractionTerm {
                                            bilinear,
                                            boson: leg,
                                            spins: (s, sp),
                                            components: (l, lp),
                                            points: (q, qp),
                                            boson_point: k,
                                            coefficient,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    stats.retained = terms.len();
    (terms, stats)
}

/// Sums terms sharing the same operator content and assembles the matrix.
pub fn assemble_interaction<T: Real>(basis: &FockBasis<T>, terms: &[InteractionTerm<T>]) -> Result<SparseOperator<T>> {
    // (boson point, leg) -> ((left bit, left creates), (right bit, right creates)) -> coefficient
    type PairKey = ((usize, bool), (usize, bool));
    let mut groups: HashMap<(usize, BosonLeg), HashMap<PairKey, Complex<T>>> = HashMap::new();
    let layout = basis.layout();
    for t in terms {
        let ops = t.bilinear.operators();
        let lbit = layout
            .mode_index(t.left_mode())
            .ok_or_else(|| Error::ModeNotInBasis(t.left_mode().to_string()))?;
        let rbit = layout
            .mode_index(t.right_mode())
            .ok_or_else(|| Error::ModeNotInBasis(t.right_mode().to_string()))?;
        if t.boson_point >= basis.boson_mode_count() {
            return Err(Error::ModeNotInBasis(format!("boson[{}]", t.boson_point)));
        }
        *groups
            .entry((t.boson_point, t.boson))
            .or_default()
            .entry(((lbit, ops[0].1), (rbit, ops[1].1)))
            .or_insert(re(T::zero())) += t.coefficient;
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort();
    let fermion_states = 1u64 << basis.fermion_mode_count();
    let configs = basis.boson_config_count();
    let chunks: Vec<Vec<(usize, usize, Complex<T>)>> = keys
        .par_iter()
        .map(|key| {
            let mut pairs: Vec<_> = groups[key].iter().map(|(k, v)| (*k, *v)).collect();
            pairs.sort_by_key(|(k, _)| *k);
            let boson_moves: Vec<(usize, usize, T)> = (0..configs)
                .filter_map(|j| {
                    let step = match key.1 {
                        BosonLeg::Annihilate => basis.lower(key.0, j),
                        BosonLeg::Create => basis.raise(key.0, j),
                    };
                    step.map(|(target, amp)| (j, target, amp))
                })
                .collect();
            let mut out = Vec::new();
            for mask in 0..fermion_states {
                for &(((lb, lc), (rb, rc)), c) in &pairs {
                    let Some((mid, s1)) = fermion_action::<T>(mask, rb, rc) else {
                        continue;
                    };
                    let Some((target, s2)) = fermion_action::<T>(mid, lb, lc) else {
                        continue;
                    };
                    let amp = c * re(s1 * s2);
                    for &(j, jt, b) in &boson_moves {
                        out.push((basis.join(target, jt), basis.join(mask, j), amp * re(b)));
                    }
                }
            }
            out
        })
        .collect();
    let triplets = chunks.into_iter().flatten().collect();
    let raw = SparseOperator::from_triplets(basis.dim(), triplets)?;
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0) * raw.max_abs());
    raw.into_hermitian(tol)
}

/// A fully assembled model on its Fock basis.
#[derive(Debug, Clone)]
pub struct YukawaModel<T> {
    params: ModelParams<T>,
    algebra: DiracAlgebra<T>,
    fermions: FermionCoefficients<T>,
    bosons: BosonCoefficients<T>,
    basis: FockBasis<T>,
    free: SparseOperator<T>,
    interaction: SparseOperator<T>,
    terms: Vec<InteractionTerm<T>>,
    statistics: TermStatistics<T>,
}

impl<T: Real> YukawaModel<T> {
    pub fn build(params: &ModelParams<T>) -> Result<Self> {
        Self::build_inner(params, None)
    }

    /// Builds on the Fock space of the listed fermion modes only, which is
    /// the compression of the full model to the states where every other
    /// mode is empty: terms touching an unlisted mode are dropped.
    pub fn build_on_modes(params: &ModelParams<T>, modes: Vec<FermionMode>) -> Result<Self> {
        Self::build_inner(params, Some(modes))
    }

    fn build_inner(params: &ModelParams<T>, modes: Option<Vec<FermionMode>>) -> Result<Self> {
        params.validate()?;
        let flat = Arc::new(params.fermion_lattice.build()?);
        let blat = Arc::new(params.boson_lattice.build()?);
        let basis = match modes {
            None => FockBasis::enumerate(flat.clone(), blat.clone(), params.truncation, params.max_dimension)?,
            Some(modes) => {
                let layout = FockLayout::custom(flat.clone(), blat.clone(), modes, true)?;
                FockBasis::with_layout(layout, params.truncation, params.max_dimension)?
            }
        };
        let algebra = params.representation.algebra();
        let fermions = fermion_coefficients(&flat, params.dirac_mass, &params.dirac_cutoff, &algebra)?;
        let bosons = boson_coefficients(&blat, params.boson_mass, &params.boson_cutoff)?;
        let free = basis.second_quantization(&fermions.energies, &bosons.energies)?;
        let (mut terms, mut statistics) = enumerate_interaction_terms(
            &fermions,
            &bosons,
            algebra.gamma0(),
            &params.spatial_cutoff,
            params.prune_floor,
        );
        let layout = basis.layout();
        let before = terms.len();
        terms.retain(|t| layout.mode_index(t.left_mode()).is_some() && layout.mode_index(t.right_mode()).is_some());
        statistics.outside_modes = before - terms.len();
        statistics.retained = terms.len();
        let interaction = assemble_interaction(&basis, &terms)?;
        Ok(Self {
            params: params.clone(),
            algebra,
            fermions,
            bosons,
            basis,
            free,
            interaction,
            terms,
            statistics,
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn algebra(&self) -> &DiracAlgebra<T> {
        &self.algebra
    }

    pub fn basis(&self) -> &FockBasis<T> {
        &self.basis
    }

    pub fn fermion_lattice(&self) -> &Arc<MomentumLattice<T>> {
        self.basis.layout().fermion_lattice()
    }

    pub fn boson_lattice(&self) -> &Arc<MomentumLattice<T>> {
        self.basis.layout().boson_lattice()
    }

    pub fn fermion_coefficients(&self) -> &FermionCoefficients<T> {
        &self.fermions
    }

    pub fn boson_coefficients(&self) -> &BosonCoefficients<T> {
        &self.bosons
    }

    /// `H_0 = H_Dirac ⊗ I + I ⊗ H_KG`
    pub fn free(&self) -> &SparseOperator<T> {
        &self.free
    }

    /// `H_Dirac ⊗ I`
    pub fn dirac_free(&self) -> Result<SparseOperator<T>> {
        self.basis
            .second_quantization(&self.fermions.energies, &vec![T::zero(); self.bosons.energies.len()])
    }

    /// `I ⊗ H_KG`
    pub fn boson_free(&self) -> Result<SparseOperator<T>> {
        self.basis
            .second_quantization(&vec![T::zero(); self.fermions.energies.len()], &self.bosons.energies)
    }

    /// `H′`
    pub fn interaction(&self) -> &SparseOperator<T> {
        &self.interaction
    }

    pub fn interaction_terms(&self) -> &[InteractionTerm<T>] {
        &self.terms
    }

    pub fn term_statistics(&self) -> TermStatistics<T> {
        self.statistics
    }

    /// `H_0 + κH′`; `κ = 0` returns `H_0` unchanged.
    pub fn total(&self, kappa: T) -> Result<SparseOperator<T>> {
        if kappa == T::zero() {
            return Ok(self.free.clone());
        }
        self.free.add_scaled(&self.interaction, re(kappa))
    }

    /// `H_0 + κH′` at the configured coupling.
    pub fn hamiltonian(&self) -> Result<SparseOperator<T>> {
        self.total(self.params.coupling)
    }

    /// `ψ_l(x) = Σ_s b_s(f^l_{s,x}) + d_s*(g^l_{s,x})`, `l` zero based.
    pub fn dirac_field(&self, l: usize, x: [T; 3]) -> Result<SparseOperator<T>> {
        if l >= 4 {
            return Err(Error::parameter("component", "spinor index must be below 4"));
        }
        let mut out = SparseOperator::zero(self.basis.dim());
        for s in Spin::BOTH {
            let fx = shifted(&self.fermions.f[s.index()][l], x, -T::one())?;
            let gx = shifted(&self.fermions.g[s.index()][l], x, -T::one())?;
            out = out.add(&self.basis.smeared_fermion(&fx, Species::Particle, s, false)?)?;
            out = out.add(&self.basis.smeared_fermion(&gx, Species::Antiparticle, s, true)?)?;
        }
        Ok(out)
    }

    /// `φ(x) = (a(h_x) + a*(h_x))/√2`
    pub fn scalar_field(&self, x: [T; 3]) -> Result<SparseOperator<T>> {
        let hx = shifted(&self.bosons.h, x, T::one())?;
        let a = self.basis.smeared_boson(&hx, false)?;
        let ad = self.basis.smeared_boson(&hx, true)?;
        Ok(a.add(&ad)?.scale(re(T::one() / T::lit(2.0).sqrt())))
    }

    /// Layout indices of fermion modes the interaction never touches: points
    /// where every `f` and `g` sample vanishes.
    pub fn inert_fermion_modes(&self) -> Vec<usize> {
        let zero = re(T::zero());
        let dead: Vec<bool> = (0..self.fermion_lattice().len())
            .map(|q| {
                self.fermions
                    .f
                    .iter()
                    .chain(&self.fermions.g)
                    .flatten()
                    .all(|c| c.values()[q] == zero)
            })
            .collect();
        self.basis
            .layout()
            .fermion_modes()
            .iter()
            .enumerate()
            .filter(|(_, m)| dead[m.point])
            .map(|(i, _)| i)
            .collect()
    }
}

/// `ξ(p) e^{i·sign·p·x}`
fn shifted<T: Real>(xi: &DiscreteCoefficients<T>, x: [T; 3], sign: T) -> Result<DiscreteCoefficients<T>> {
    xi.map(|p, v| {
        let phase = sign * (p[0] * x[0] + p[1] * x[1] + p[2] * x[2]);
        v * Complex::new(phase.cos(), phase.sin())
    })
}
