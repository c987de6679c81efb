#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yukawa_core::sparse::vector;
use yukawa_core::{
    BosonTruncation, DiscreteCoefficients, FermionMode, LatticeSpec, MomentumLattice, Params, Species, Spin,
};

pub type C = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn explicit(indices: &[[i64; 3]]) -> LatticeSpec<f64> {
    LatticeSpec::Explicit {
        spacing_parameter: 2.0 * PI,
        indices: indices.to_vec(),
    }
}

pub fn lattice(indices: &[[i64; 3]]) -> Arc<MomentumLattice<f64>> {
    Arc::new(explicit(indices).build().unwrap())
}

pub fn minimal(kappa: f64) -> Params {
    Params::new(1.0, 1.0, kappa)
}

pub fn with_truncation(mut p: Params, per_mode: usize, total: usize) -> Params {
    p.truncation = BosonTruncation::new(per_mode, total);
    p
}

pub fn all_modes_at(point: usize) -> Vec<FermionMode> {
    let mut out = Vec::new();
    for species in [Species::Particle, Species::Antiparticle] {
        for spin in Spin::BOTH {
            out.push(FermionMode { species, spin, point });
        }
    }
    out
}

pub fn mode(species: Species, spin: Spin, point: usize) -> FermionMode {
    FermionMode { species, spin, point }
}

pub fn random_coefficients(lattice: &Arc<MomentumLattice<f64>>, rng: &mut ChaCha8Rng) -> DiscreteCoefficients<f64> {
    let scale = rng.random_range(0.1..3.0);
    let values = (0..lattice.len())
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale)
        .collect();
    DiscreteCoefficients::from_values(lattice.clone(), values).unwrap()
}

pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    vector::random_unit::<f64, _>(dim, rng)
}

/// `ℓ_I(Φ, Ψ) = ∫ χ_I(x) Σ_{ll'} γ⁰_{ll'} (ψ_l(x)Φ, ψ_{l'}(x)φ(x)Ψ) d³x`
/// by a tensor trapezoid rule on `[−reach·σ, reach·σ]³`.
pub fn form_by_quadrature(model: &yukawa_core::Model, phi: &[C], psi: &[C], reach: f64, nodes: usize) -> C {
    let sigma = model.params().spatial_cutoff.width();
    let gamma0 = *model.algebra().gamma0();
    let h = reach * sigma;
    let step = 2.0 * h / (nodes - 1) as f64;
    let weight = |i: usize| if i == 0 || i == nodes - 1 { 0.5 * step } else { step };
    let mut total = C::new(0.0, 0.0);
    for i in 0..nodes {
        for j in 0..nodes {
            for k in 0..nodes {
                let x = [-h + i as f64 * step, -h + j as f64 * step, -h + k as f64 * step];
                let w = weight(i) * weight(j) * weight(k) * model.params().spatial_cutoff.eval(x);
                let fields: Vec<_> = (0..4).map(|l| model.dirac_field(l, x).unwrap()).collect();
                let phi_psi = model.scalar_field(x).unwrap().apply(psi);
                let left: Vec<Vec<C>> = fields.iter().map(|f| f.apply(phi)).collect();
                let right: Vec<Vec<C>> = fields.iter().map(|f| f.apply(&phi_psi)).collect();
                for l in 0..4 {
                    for lp in 0..4 {
                        if gamma0[l][lp] != C::new(0.0, 0.0) {
                            total += gamma0[l][lp] * vector::dot(&left[l], &right[lp]) * w;
                        }
                    }
                }
            }
        }
    }
    total
}
