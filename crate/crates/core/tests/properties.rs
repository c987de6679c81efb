mod common;

use common::*;
use proptest::prelude::*;
use yukawa_core::bounds::{compute_constants, verify_inequalities, VerifySettings};
use yukawa_core::solver::{
    check_invariant, dense_lowest, lanczos_lowest, sector_labels, SectorLabeling, SolverSettings,
};
use yukawa_core::{BosonTruncation, CutoffProfile, LatticeSpec, Model, Params, Representation, SpatialCutoff};

fn params() -> impl Strategy<Value = Params> {
    (
        0.3..2.0f64,
        0.3..2.0f64,
        -30.0..30.0f64,
        0.5..5.0f64,
        0.5..2.0f64,
        0usize..3,
        1usize..=3,
        any::<bool>(),
    )
        .prop_map(|(big_m, m, kappa, width, sigma, lattice, n, chiral)| {
            let mut p = Params::new(big_m, m, kappa);
            p.dirac_cutoff = CutoffProfile::Gaussian { width };
            p.boson_cutoff = CutoffProfile::Gaussian { width: width * 0.7 };
            p.spatial_cutoff = SpatialCutoff::Gaussian { width: sigma };
            match lattice {
                0 => {}
                1 => p.boson_lattice = explicit(&[[0, 0, 0], [1, 0, 0]]),
                _ => p.fermion_lattice = explicit(&[[0, 0, 0], [0, 1, 0]]),
            }
            p.truncation = BosonTruncation::new(n, n);
            if chiral {
                p.representation = Representation::Chiral;
            }
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn hamiltonian_is_hermitian(p in params()) {
        let model = Model::build(&p).unwrap();
        let h = model.hamiltonian().unwrap();
        prop_assert!(h.is_hermitian());
        prop_assert!(h.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn coupling_is_linear(p in params(), kappa in -5.0..5.0f64) {
        let model = Model::build(&p).unwrap();
        let direct = model.total(kappa).unwrap();
        let by_parts = model.free().add_scaled(model.interaction(), C::new(kappa, 0.0)).unwrap();
        prop_assert!(direct.max_abs_diff(&by_parts).unwrap() <= 1e-14);
    }

    #[test]
    fn charge_is_conserved(p in params()) {
        let model = Model::build(&p).unwrap();
        let labels = sector_labels(model.basis(), SectorLabeling::Charge, &[]);
        prop_assert!(check_invariant(model.interaction(), &labels).is_ok());
    }

    #[test]
    fn representation_does_not_change_the_spectrum(p in params()) {
        let mut dirac = p.clone();
        dirac.representation = Representation::Dirac;
        let mut chiral = p;
        chiral.representation = Representation::Chiral;
        let a = dense_lowest(&Model::build(&dirac).unwrap().hamiltonian().unwrap(), 6, 4096).unwrap();
        let b = dense_lowest(&Model::build(&chiral).unwrap().hamiltonian().unwrap(), 6, 4096).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-10, "{} vs {}", x, y);
        }
    }

    #[test]
    fn lanczos_matches_dense(p in params(), seed in 0u64..1000) {
        let h = Model::build(&p).unwrap().hamiltonian().unwrap();
        let dense = dense_lowest(&h, 3, 4096).unwrap();
        let s = SolverSettings { k: 3, seed, ..SolverSettings::default() };
        let krylov = lanczos_lowest(&h, &s).unwrap();
        for (x, y) in dense.eigenvalues.iter().zip(&krylov.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-8, "{} vs {}", x, y);
        }
    }

    #[test]
    fn ground_energy_within_perturbation_bound(p in params()) {
        let model = Model::build(&p).unwrap();
        let norm = model.interaction().spectral_norm(4096).unwrap();
        let e = dense_lowest(&model.hamiltonian().unwrap(), 1, 4096).unwrap().ground_energy;
        prop_assert!(e <= 1e-12);
        prop_assert!(e >= -p.coupling.abs() * norm - 1e-12);
    }

    #[test]
    fn inequalities_hold(p in params(), seed in 0u64..1000) {
        let model = Model::build(&p).unwrap();
        let settings = VerifySettings { sample_count: 60, max_basis_states: 0, test_functions: 3, positions: 2, seed, ..VerifySettings::default() };
        let report = verify_inequalities(&model, &settings).unwrap();
        for c in &report.checks {
            prop_assert!(c.pass, "{} worst ratio {}", c.name, c.worst_ratio);
        }
    }

    #[test]
    fn constants_grow_with_the_cutoff(r in 0.2..3.0f64, extra in 0.0..3.0f64) {
        let build = |radius: f64| {
            let mut p = Params::new(1.0, 0.7, 0.5);
            p.fermion_lattice = explicit(&[[0, 0, 0], [1, 1, 0], [2, 0, 0]]);
            p.boson_lattice = LatticeSpec::Box { spacing_parameter: 2.0 * std::f64::consts::PI, box_half_width: 2.0 };
            p.dirac_cutoff = CutoffProfile::SharpBall { radius };
            p.boson_cutoff = CutoffProfile::SharpBall { radius };
            p.truncation = BosonTruncation::new(0, 0);
            p.max_dimension = usize::MAX;
            p
        };
        let small = compute_constants(&Model::build(&build(r)).unwrap());
        let large = compute_constants(&Model::build(&build(r + extra)).unwrap());
        for l in 0..4 {
            prop_assert!(large.m_dirac[l] >= small.m_dirac[l] - 1e-15);
        }
        for j in 0..3 {
            prop_assert!(large.m_kg[j] >= small.m_kg[j] - 1e-15);
        }
        prop_assert!(large.l_i >= small.l_i - 1e-15);
    }
}
