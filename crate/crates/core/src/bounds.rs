//! Explicit relative-bound constants and numerical checks of the operator
//! inequalities they enter.
//!
//! All constants use the discrete norms of the sampled coefficients, the
//! same ones the operators are built from, so every inequality below holds
//! exactly on the truncated space and a worst ratio above one is a bug.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::YukawaModel;
use crate::lattice::DiscreteCoefficients;
use crate::scalar::Real;
use crate::sparse::{vector, SparseOperator};

/// A check passes when its worst ratio stays below `1 + PASS_SLACK`.
pub const PASS_SLACK: f64 = 1e-9;

/// Constants of the relative bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct BoundConstants<T> {
    /// `M_Dir^l = Σ_s (‖f_s^l‖ + ‖g_s^l‖)`, `l = 1..4`.
    pub m_dirac: [T; 4],
    /// `M_KG^j = ‖h / √(ω^j)‖`, `j = 0, 1, 2`.
    pub m_kg: [T; 3],
    /// `‖χ_I‖_{L¹}`
    pub chi_l1: T,
    /// `√2 ‖χ_I‖₁ Σ_{ll'} |γ⁰_{ll'}| M^l M^{l'} M_KG^1`
    pub l_i: T,
    /// `‖χ_I‖₁ / √2 · Σ_{ll'} |γ⁰_{ll'}| M^l M^{l'} M_KG^0`
    pub r_i: T,
}

pub fn compute_constants<T: Real>(model: &YukawaModel<T>) -> BoundConstants<T> {
    let fc = model.fermion_coefficients();
    let mut m_dirac = [T::zero(); 4];
    for (l, m) in m_dirac.iter_mut().enumerate() {
        *m = (0..2).fold(T::zero(), |acc, s| acc + fc.f[s][l].norm() + fc.g[s][l].norm());
    }
    let bc = model.boson_coefficients();
    let mut m_kg = [T::zero(); 3];
    for (j, m) in m_kg.iter_mut().enumerate() {
        let w = bc.h.lattice().cell_volume();
        let sum =
            bc.h.values()
                .iter()
                .zip(&bc.energies)
                .fold(T::zero(), |acc, (h, &om)| acc + h.norm_sqr() / om.powi(j as i32));
        *m = (w * sum).sqrt();
    }
    let chi_l1 = model.params().spatial_cutoff.l1_norm();
    let gamma0 = model.algebra().gamma0();
    let mut pair_sum = T::zero();
    for l in 0..4 {
        for lp in 0..4 {
            pair_sum += gamma0[l][lp].norm() * m_dirac[l] * m_dirac[lp];
        }
    }
    let root2 = T::lit(2.0).sqrt();
    BoundConstants {
        m_dirac,
        m_kg,
        chi_l1,
        l_i: root2 * chi_l1 * pair_sum * m_kg[1],
        r_i: chi_l1 * pair_sum * m_kg[0] / root2,
    }
}

/// Worst observed `lhs / rhs` of one inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct InequalityCheck<T> {
    pub name: String,
    pub samples: usize,
    pub worst_ratio: T,
    pub pass: bool,
}

/// One point of the `ε` sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct EpsilonRow<T> {
    pub epsilon: T,
    /// `c_ε = 1/(4ε)`
    pub c_epsilon: T,
    /// `ε L_I`; the Kato–Rellich argument needs it below one.
    pub relative_bound: T,
    pub admissible: bool,
    /// Worst ratio of `‖H_KG^{1/2}Ψ‖ ≤ ε‖H_KGΨ‖ + c_ε‖Ψ‖`.
    pub sqrt_interpolation_ratio: T,
    /// Worst ratio of `‖H′Ψ‖ ≤ εL_I‖H_0Ψ‖ + (c_ε L_I + R_I)‖Ψ‖`.
    pub kato_rellich_ratio: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct BoundReport<T> {
    pub constants: BoundConstants<T>,
    pub checks: Vec<InequalityCheck<T>>,
    pub epsilon_sweep: Vec<EpsilonRow<T>>,
    /// Admissible `ε` are those below this value (`1/L_I`); `None` when
    /// `L_I = 0` and every `ε` is admissible.
    pub admissible_epsilon_below: Option<T>,
    pub random_states: usize,
    pub basis_states: usize,
    pub all_pass: bool,
}

impl<T: Real> BoundReport<T> {
    pub fn check(&self, name: &str) -> Option<&InequalityCheck<T>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Verification knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    /// Random normalized states, on top of every basis vector when the
    /// basis has at most `max_basis_states` elements.
    pub sample_count: usize,
    pub max_basis_states: usize,
    /// Random smearing functions for the ladder-operator bounds.
    pub test_functions: usize,
    /// Random positions for the field bounds.
    pub positions: usize,
    /// Operator norms of `ψ_l(x)` are computed densely up to this dimension.
    pub dense_cap: usize,
    /// Decades `10^lo ..= 10^hi` of the ε sweep.
    pub epsilon_decades: (i32, i32),
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            sample_count: 1000,
            max_basis_states: 4096,
            test_functions: 10,
            positions: 10,
            dense_cap: 1024,
            epsilon_decades: (-3, 3),
            seed: 0,
        }
    }
}

fn ratio<T: Real>(lhs: T, rhs: T) -> T {
    if rhs > T::zero() {
        lhs / rhs
    } else if lhs <= T::epsilon() * T::lit(16.0) {
        T::zero()
    } else {
        T::infinity()
    }
}

struct Tracker<T> {
    name: &'static str,
    samples: usize,
    worst: T,
}

impl<T: Real> Tracker<T> {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            samples: 0,
            worst: T::zero(),
        }
    }

    fn record(&mut self, lhs: T, rhs: T) {
        self.samples += 1;
        let r = ratio(lhs, rhs);
        if r > self.worst || r.is_nan() {
            self.worst = r;
        }
    }

    fn finish(self) -> InequalityCheck<T> {
        InequalityCheck {
            name: self.name.to_string(),
            samples: self.samples,
            pass: self.worst <= T::one() + T::lit(PASS_SLACK),
            worst_ratio: self.worst,
        }
    }
}

fn random_coefficients<T: Real>(
    like: &DiscreteCoefficients<T>,
    rng: &mut ChaCha8Rng,
) -> Result<DiscreteCoefficients<T>> {
    let values = (0..like.len())
        .map(|_| Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0))))
        .collect();
    DiscreteCoefficients::from_values(like.lattice().clone(), values)
}

fn random_position<T: Real>(rng: &mut ChaCha8Rng) -> [T; 3] {
    [(); 3].map(|_| T::lit(rng.random_range(-3.0..3.0)))
}

fn diag_apply<T: Real>(d: &[T], v: &[Complex<T>]) -> Vec<Complex<T>> {
    d.iter().zip(v).map(|(&a, &b)| b * a).collect()
}

/// Evaluates every inequality on random and basis states.
pub fn verify_inequalities<T: Real>(model: &YukawaModel<T>, settings: &VerifySettings) -> Result<BoundReport<T>> {
    if settings.sample_count == 0 {
        return Err(Error::parameter("sample_count", "must be at least 1"));
    }
    let c = compute_constants(model);
    let basis = model.basis();
    let dim = basis.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    let mut states: Vec<Vec<Complex<T>>> = (0..settings.sample_count)
        .map(|_| vector::random_unit::<T, _>(dim, &mut rng))
        .collect();
    let basis_states = if dim <= settings.max_basis_states { dim } else { 0 };
    states.extend((0..basis_states).map(|i| vector::basis_vector(dim, i)));

    let h_kg: Vec<T> = model.boson_free()?.diagonal_values().iter().map(|v| v.re).collect();
    let h_0: Vec<T> = model.free().diagonal_values().iter().map(|v| v.re).collect();
    let h_kg_half: Vec<T> = h_kg.iter().map(|v| v.sqrt()).collect();
    let hp = model.interaction();
    let norms: Vec<(T, T, T, T)> = states
        .iter()
        .map(|s| {
            (
                vector::norm(s),
                vector::norm(&diag_apply(&h_kg_half, s)),
                vector::norm(&diag_apply(&h_kg, s)),
                vector::norm(&diag_apply(&h_0, s)),
            )
        })
        .collect();

    // ladder operators against dΓ(ω)
    let h = &model.boson_coefficients().h;
    let omega = &model.boson_coefficients().energies;
    let mut eta_family = vec![h.clone()];
    for _ in 0..settings.test_functions {
        eta_family.push(random_coefficients(h, &mut rng)?);
    }
    let mut lower_check = Tracker::new("annihilator_relative_bound");
    let mut raise_check = Tracker::new("creator_relative_bound");
    for eta in &eta_family {
        let inv_root = DiscreteCoefficients::from_values(
            eta.lattice().clone(),
            eta.values().iter().zip(omega).map(|(v, &w)| *v / w.sqrt()).collect(),
        )?;
        let (s_norm, e_norm) = (inv_root.norm(), eta.norm());
        let a = basis.smeared_boson(eta, false)?;
        let ad = basis.smeared_boson(eta, true)?;
        for (s, &(n, half, _, _)) in states.iter().zip(&norms) {
            lower_check.record(vector::norm(&a.apply(s)), s_norm * half);
            raise_check.record(vector::norm(&ad.apply(s)), s_norm * half + e_norm * n);
        }
    }

    // field operators at random positions
    let root2 = T::lit(2.0).sqrt();
    let mut psi_norm = Tracker::new("dirac_field_norm");
    let mut phi_check = Tracker::new("scalar_field_bound");
    for _ in 0..settings.positions {
        let x = random_position::<T>(&mut rng);
        for l in 0..4 {
            let psi = model.dirac_field(l, x)?;
            if dim <= settings.dense_cap {
                psi_norm.record(psi.spectral_norm(settings.dense_cap)?, c.m_dirac[l]);
            }
            for (s, &(n, _, _, _)) in states.iter().zip(&norms) {
                psi_norm.record(vector::norm(&psi.apply(s)), c.m_dirac[l] * n);
            }
        }
        let phi = model.scalar_field(x)?;
        for (s, &(n, half, _, _)) in states.iter().zip(&norms) {
            phi_check.record(
                vector::norm(&phi.apply(s)),
                root2 * c.m_kg[1] * half + c.m_kg[0] / root2 * n,
            );
        }
    }

    // interaction
    let mut form_check = Tracker::new("form_bound");
    let mut op_check = Tracker::new("interaction_bound");
    let images: Vec<Vec<Complex<T>>> = states.iter().map(|s| hp.apply(s)).collect();
    for (i, (img, &(n, half, _, _))) in images.iter().zip(&norms).enumerate() {
        let bound = c.l_i * half + c.r_i * n;
        op_check.record(vector::norm(img), bound);
        let partner = &states[(i * 7 + 3) % states.len()];
        form_check.record(vector::dot(partner, img).norm(), bound * vector::norm(partner));
    }

    // ε sweep
    let mut sweep = Vec::new();
    let mut interp_all: Tracker<T> = Tracker::new("sqrt_interpolation");
    let mut kr_all: Tracker<T> = Tracker::new("kato_rellich_bound");
    for decade in settings.epsilon_decades.0..=settings.epsilon_decades.1 {
        let eps = T::lit(10f64.powi(decade));
        let c_eps = T::one() / (T::lit(4.0) * eps);
        let mut interp = Tracker::new("sqrt_interpolation");
        let mut kr = Tracker::new("kato_rellich_bound");
        for (img, &(n, half, full, h0)) in images.iter().zip(&norms) {
            interp.record(half, eps * full + c_eps * n);
            kr.record(vector::norm(img), eps * c.l_i * h0 + (c_eps * c.l_i + c.r_i) * n);
        }
        let relative = eps * c.l_i;
        sweep.push(EpsilonRow {
            epsilon: eps,
            c_epsilon: c_eps,
            relative_bound: relative,
            admissible: relative < T::one(),
            sqrt_interpolation_ratio: interp.worst,
            kato_rellich_ratio: kr.worst,
        });
        interp_all.samples += interp.samples;
        interp_all.worst = interp_all.worst.max(interp.worst);
        kr_all.samples += kr.samples;
        kr_all.worst = kr_all.worst.max(kr.worst);
    }

    let checks = vec![
        lower_check.finish(),
        raise_check.finish(),
        psi_norm.finish(),
        phi_check.finish(),
        form_check.finish(),
        op_check.finish(),
        interp_all.finish(),
        kr_all.finish(),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(BoundReport {
        admissible_epsilon_below: if c.l_i > T::zero() {
            Some(T::one() / c.l_i)
        } else {
            None
        },
        constants: c,
        checks,
        epsilon_sweep: sweep,
        random_states: settings.sample_count,
        basis_states,
        all_pass,
    })
}

/// `‖H′‖` from a dense singular value computation.
pub fn interaction_norm<T: Real>(model: &YukawaModel<T>, dense_cap: usize) -> Result<T> {
    model.interaction().spectral_norm(dense_cap)
}

/// `‖H′Ψ‖` against `L_I‖H_KG^{1/2}Ψ‖ + R_I‖Ψ‖` for one state.
pub fn interaction_bound_ratio<T: Real>(
    model: &YukawaModel<T>,
    constants: &BoundConstants<T>,
    state: &[Complex<T>],
) -> Result<T> {
    let h_kg: Vec<T> = model
        .boson_free()?
        .diagonal_values()
        .iter()
        .map(|v| v.re.sqrt())
        .collect();
    let lhs = vector::norm(&model.interaction().apply(state));
    let rhs = constants.l_i * vector::norm(&diag_apply(&h_kg, state)) + constants.r_i * vector::norm(state);
    Ok(ratio(lhs, rhs))
}

/// `‖AΩ‖` for the Fock vacuum `Ω`.
pub fn vacuum_image_norm<T: Real>(op: &SparseOperator<T>) -> T {
    vector::norm(&op.apply(&vector::basis_vector(op.dim(), 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ModelParams;
    use crate::spinor::CutoffProfile;
    use std::f64::consts::PI;

    #[test]
    fn switched_off_dirac_field_gives_zero_constants() {
        let mut p = ModelParams::new(1.0, 1.0, 0.5);
        p.dirac_cutoff = CutoffProfile::Off;
        let c = compute_constants(&YukawaModel::build(&p).unwrap());
        assert_eq!(c.m_dirac, [0.0; 4]);
        assert_eq!((c.l_i, c.r_i), (0.0, 0.0));
    }

    #[test]
    fn gaussian_l1_norm() {
        let c = compute_constants(&YukawaModel::build(&ModelParams::new(1.0, 1.0, 0.5)).unwrap());
        assert!((c.chi_l1 - (2.0 * PI).powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn boson_constants_are_ordered() {
        let p = ModelParams::new(1.0, 0.4, 0.5);
        let c = compute_constants(&YukawaModel::build(&p).unwrap());
        assert!(c.m_kg[0] >= c.m_kg[1] * 0.4f64.sqrt() - 1e-15);
    }

    #[test]
    fn vacuum_interaction_bound() {
        let model = YukawaModel::build(&ModelParams::new(1.0, 1.0, 0.5)).unwrap();
        let c = compute_constants(&model);
        let vac = vector::basis_vector(model.basis().dim(), 0);
        assert!(vacuum_image_norm(model.interaction()) <= c.r_i);
        assert!(interaction_bound_ratio(&model, &c, &vac).unwrap() <= 1.0);
    }

    #[test]
    fn minimal_basis_passes_everything() {
        let model = YukawaModel::build(&ModelParams::new(1.0, 1.0, 0.5)).unwrap();
        let report = verify_inequalities(
            &model,
            &VerifySettings {
                sample_count: 200,
                ..VerifySettings::default()
            },
        )
        .unwrap();
        for c in &report.checks {
            assert!(c.pass, "{} worst ratio {}", c.name, c.worst_ratio);
        }
        assert!(report.epsilon_sweep.iter().any(|r| r.admissible));
    }
}
