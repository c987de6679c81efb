//! Truncated boson–fermion Fock basis and its ladder operators.
//!
//! Basis states are products of a fermion occupation bitmask (bit `i` set
//! when layout mode `i` is occupied) and a boson occupation vector. The
//! fermionic part is the full exterior algebra over the included modes; the
//! bosonic part keeps occupations with `n_k ≤ per_mode` and `Σ n_k ≤ total`.
//! State index = `mask · B + j`, where `j` enumerates boson configurations
//! lexicographically and `B` is their number, so the vacuum is index 0.
//!
//! Fermion operators carry the Jordan–Wigner sign
//! `(−1)^{#occupied modes with smaller index}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DiscreteCoefficients, MomentumLattice};
use crate::scalar::{re, Real};
use crate::sparse::SparseOperator;

/// Default upper bound on the basis dimension.
pub const DEFAULT_MAX_DIMENSION: usize = 1 << 21;

/// Largest number of fermion modes a bitmask can hold.
pub const MAX_FERMION_MODES: usize = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    /// `b` modes
    Particle,
    /// `d` modes
    Antiparticle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    /// 0 for `+1/2`, 1 for `−1/2`.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FermionMode {
    pub species: Species,
    pub spin: Spin,
    /// Index into the fermion lattice.
    pub point: usize,
}

impl fmt::Display for FermionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.species {
            Species::Particle => 'b',
            Species::Antiparticle => 'd',
        };
        let s = match self.spin {
            Spin::Up => "+",
            Spin::Down => "-",
        };
        write!(f, "{op}{s}[{}]", self.point)
    }
}

/// Which fermion and boson modes make up a Fock space.
#[derive(Debug, Clone)]
pub struct FockLayout<T> {
    fermion_lattice: Arc<MomentumLattice<T>>,
    boson_lattice: Arc<MomentumLattice<T>>,
    fermion_modes: Vec<FermionMode>,
    lookup: HashMap<FermionMode, usize>,
    boson_modes: usize,
}

impl<T: Real> FockLayout<T> {
    /// All `4 × |fermion lattice|` fermion modes and one boson mode per
    /// boson lattice point. Mode index = `(2·species + spin)·N + point`.
    pub fn full(fermion_lattice: Arc<MomentumLattice<T>>, boson_lattice: Arc<MomentumLattice<T>>) -> Self {
        let n = fermion_lattice.len();
        let mut modes = Vec::with_capacity(4 * n);
        for species in [Species::Particle, Species::Antiparticle] {
            for spin in Spin::BOTH {
                for point in 0..n {
                    modes.push(FermionMode { species, spin, point });
                }
            }
        }
        let boson_modes = boson_lattice.len();
        Self::assemble(fermion_lattice, boson_lattice, modes, boson_modes)
    }

    /// A subset of fermion modes, in the given order, optionally without
    /// bosons.
    pub fn custom(
        fermion_lattice: Arc<MomentumLattice<T>>,
        boson_lattice: Arc<MomentumLattice<T>>,
        fermion_modes: Vec<FermionMode>,
        with_bosons: bool,
    ) -> Result<Self> {
        if let Some(m) = fermion_modes.iter().find(|m| m.point >= fermion_lattice.len()) {
            return Err(Error::ModeNotInBasis(m.to_string()));
        }
        let boson_modes = if with_bosons { boson_lattice.len() } else { 0 };
        let layout = Self::assemble(fermion_lattice, boson_lattice, fermion_modes, boson_modes);
        if layout.lookup.len() != layout.fermion_modes.len() {
            return Err(Error::parameter("fermion_modes", "modes must be distinct"));
        }
        Ok(layout)
    }

    fn assemble(
        fermion_lattice: Arc<MomentumLattice<T>>,
        boson_lattice: Arc<MomentumLattice<T>>,
        fermion_modes: Vec<FermionMode>,
        boson_modes: usize,
    ) -> Self {
        let lookup = fermion_modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Self {
            fermion_lattice,
            boson_lattice,
            fermion_modes,
            lookup,
            boson_modes,
        }
    }

    pub fn fermion_lattice(&self) -> &Arc<MomentumLattice<T>> {
        &self.fermion_lattice
    }

    pub fn boson_lattice(&self) -> &Arc<MomentumLattice<T>> {
        &self.boson_lattice
    }

    pub fn fermion_modes(&self) -> &[FermionMode] {
        &self.fermion_modes
    }

    pub fn boson_mode_count(&self) -> usize {
        self.boson_modes
    }

    pub fn mode_index(&self, mode: FermionMode) -> Option<usize> {
        self.lookup.get(&mode).copied()
    }
}

/// Caps on boson occupations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BosonTruncation {
    /// Largest occupation of any single mode.
    pub per_mode: usize,
    /// Largest total boson number.
    pub total: usize,
}

impl BosonTruncation {
    pub fn new(per_mode: usize, total: usize) -> Self {
        Self { per_mode, total }
    }
}

/// One basis state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockState {
    pub fermions: u64,
    pub bosons: Vec<u8>,
}

impl FockState {
    pub fn fermion_count(&self) -> u32 {
        self.fermions.count_ones()
    }

    pub fn boson_count(&self) -> usize {
        self.bosons.iter().map(|&n| n as usize).sum()
    }
}

type Transition<T> = Option<(usize, T)>;

/// Enumerated product basis.
#[derive(Debug, Clone)]
pub struct FockBasis<T> {
    layout: FockLayout<T>,
    truncation: BosonTruncation,
    boson_configs: Vec<Vec<u8>>,
    // [mode][config] -> (lowered config, √n) and (raised config, √(n+1))
    lowering: Vec<Vec<Transition<T>>>,
    raising: Vec<Vec<Transition<T>>>,
    fermion_states: usize,
}

/// Dimension the basis would have, without building it.
pub fn projected_dimension(fermion_modes: usize, boson_modes: usize, truncation: BosonTruncation) -> u128 {
    let fermion = if fermion_modes >= 127 {
        u128::MAX
    } else {
        1u128 << fermion_modes
    };
    fermion.saturating_mul(count_boson_configs(boson_modes, truncation))
}

fn count_boson_configs(modes: usize, truncation: BosonTruncation) -> u128 {
    // counts[t] = configurations over the modes seen so far with total t
    let cap = truncation.total.min(modes.saturating_mul(truncation.per_mode));
    let mut counts = vec![0u128; cap + 1];
    counts[0] = 1;
    for _ in 0..modes {
        let mut next = vec![0u128; cap + 1];
        for (t, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for n in 0..=truncation.per_mode {
                if t + n > cap {
                    break;
                }
                next[t + n] = next[t + n].saturating_add(c);
            }
        }
        counts = next;
    }
    counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

impl<T: Real> FockBasis<T> {
    /// Full layout on the given lattices.
    pub fn enumerate(
        fermion_lattice: Arc<MomentumLattice<T>>,
        boson_lattice: Arc<MomentumLattice<T>>,
        truncation: BosonTruncation,
        max_dimension: usize,
    ) -> Result<Self> {
        Self::with_layout(
            FockLayout::full(fermion_lattice, boson_lattice),
            truncation,
            max_dimension,
        )
    }

    pub fn with_layout(layout: FockLayout<T>, truncation: BosonTruncation, max_dimension: usize) -> Result<Self> {
        if truncation.per_mode > u8::MAX as usize {
            return Err(Error::parameter("per_mode", "occupation cap must not exceed 255"));
        }
        let f = layout.fermion_modes.len();
        let projected = projected_dimension(f, layout.boson_modes, truncation);
        if f > MAX_FERMION_MODES || projected > max_dimension as u128 {
            return Err(Error::Capacity {
                what: "Fock basis",
                projected,
                cap: max_dimension as u128,
            });
        }
        let mut configs = Vec::new();
        let mut current = vec![0u8; layout.boson_modes];
        push_configs(0, 0, truncation, &mut current, &mut configs);
        let position: HashMap<&[u8], usize> = configs.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let mut lowering = Vec::with_capacity(layout.boson_modes);
        let mut raising = Vec::with_capacity(layout.boson_modes);
        for k in 0..layout.boson_modes {
            let mut low = vec![None; configs.len()];
            let mut up = vec![None; configs.len()];
            for (j, c) in configs.iter().enumerate() {
                if c[k] > 0 {
                    let mut lowered = c.clone();
                    lowered[k] -= 1;
                    let target = position[lowered.as_slice()];
                    let amp = T::from_u8(c[k]).unwrap().sqrt();
                    low[j] = Some((target, amp));
                    up[target] = Some((j, amp));
                }
            }
            lowering.push(low);
            raising.push(up);
        }
        drop(position);
        Ok(Self {
            layout,
            truncation,
            boson_configs: configs,
            lowering,
            raising,
            fermion_states: 1usize << f,
        })
    }

    pub fn layout(&self) -> &FockLayout<T> {
        &self.layout
    }

    pub fn truncation(&self) -> BosonTruncation {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.fermion_states * self.boson_configs.len()
    }

    pub fn fermion_mode_count(&self) -> usize {
        self.layout.fermion_modes.len()
    }

    pub fn boson_mode_count(&self) -> usize {
        self.layout.boson_modes
    }

    pub fn boson_config_count(&self) -> usize {
        self.boson_configs.len()
    }

    pub(crate) fn split(&self, index: usize) -> (u64, usize) {
        let b = self.boson_configs.len();
        ((index / b) as u64, index % b)
    }

    pub(crate) fn join(&self, mask: u64, config: usize) -> usize {
        mask as usize * self.boson_configs.len() + config
    }

    pub fn state(&self, index: usize) -> FockState {
        let (mask, j) = self.split(index);
        FockState {
            fermions: mask,
            bosons: self.boson_configs[j].clone(),
        }
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        if state.fermions >= self.fermion_states as u64 {
            return None;
        }
        let j = self.boson_configs.binary_search(&state.bosons).ok()?;
        Some(self.join(state.fermions, j))
    }

    /// Number of occupied fermion modes in basis state `index`.
    pub fn fermion_count(&self, index: usize) -> u32 {
        self.split(index).0.count_ones()
    }

    /// Particle number minus antiparticle number.
    pub fn charge(&self, index: usize) -> i64 {
        let (mask, _) = self.split(index);
        self.layout
            .fermion_modes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, m)| match m.species {
                Species::Particle => 1,
                Species::Antiparticle => -1,
            })
            .sum()
    }

    pub(crate) fn lower(&self, mode: usize, config: usize) -> Transition<T> {
        self.lowering[mode][config]
    }

    pub(crate) fn raise(&self, mode: usize, config: usize) -> Transition<T> {
        self.raising[mode][config]
    }

    fn mode_bit(&self, mode: FermionMode) -> Result<usize> {
        self.layout
            .mode_index(mode)
            .ok_or_else(|| Error::ModeNotInBasis(mode.to_string()))
    }

    /// `b_i` or `d_i` on the whole basis.
    pub fn fermion_annihilator(&self, mode: FermionMode) -> Result<SparseOperator<T>> {
        let bit = self.mode_bit(mode)?;
        self.fermion_ladder(&[(bit, re(T::one()))], false)
    }

    pub fn fermion_creator(&self, mode: FermionMode) -> Result<SparseOperator<T>> {
        let bit = self.mode_bit(mode)?;
        self.fermion_ladder(&[(bit, re(T::one()))], true)
    }

    /// `Σ_i c_i · op_i` where `op_i` lowers (or raises) fermion bit `i`.
    fn fermion_ladder(&self, weights: &[(usize, Complex<T>)], create: bool) -> Result<SparseOperator<T>> {
        let b = self.boson_configs.len();
        let mut triplets = Vec::new();
        for mask in 0..self.fermion_states as u64 {
            for &(bit, w) in weights {
                if let Some((target, sign)) = fermion_action(mask, bit, create) {
                    let amp = w * re(sign);
                    for j in 0..b {
                        triplets.push((self.join(target, j), self.join(mask, j), amp));
                    }
                }
            }
        }
        SparseOperator::from_triplets(self.dim(), triplets)
    }

    fn boson_ladder(&self, weights: &[(usize, Complex<T>)], create: bool) -> Result<SparseOperator<T>> {
        if let Some(&(k, _)) = weights.iter().find(|(k, _)| *k >= self.layout.boson_modes) {
            return Err(Error::ModeNotInBasis(format!("boson[{k}]")));
        }
        let mut triplets = Vec::new();
        for mask in 0..self.fermion_states as u64 {
            for j in 0..self.boson_configs.len() {
                for &(k, w) in weights {
                    let step = if create { self.raise(k, j) } else { self.lower(k, j) };
                    if let Some((target, amp)) = step {
                        triplets.push((self.join(mask, target), self.join(mask, j), w * re(amp)));
                    }
                }
            }
        }
        SparseOperator::from_triplets(self.dim(), triplets)
    }

    /// `a_k`
    pub fn boson_annihilator(&self, mode: usize) -> Result<SparseOperator<T>> {
        self.boson_ladder(&[(mode, re(T::one()))], false)
    }

    /// `a_k*`, truncated: states at an occupation cap are sent to zero.
    pub fn boson_creator(&self, mode: usize) -> Result<SparseOperator<T>> {
        self.boson_ladder(&[(mode, re(T::one()))], true)
    }

    /// `b_s(ξ) = Σ_q conj(ξ(q))·√w·b_{s,q}` (or the `d` analogue); with
    /// `create` set, the adjoint `b_s*(ξ)`, linear in `ξ`.
    pub fn smeared_fermion(
        &self,
        xi: &DiscreteCoefficients<T>,
        species: Species,
        spin: Spin,
        create: bool,
    ) -> Result<SparseOperator<T>> {
        xi.check_same_lattice(&self.layout.fermion_lattice)?;
        let root_w = xi.lattice().cell_volume().sqrt();
        let mut weights = Vec::new();
        for (point, v) in xi.values().iter().enumerate() {
            if *v == re(T::zero()) {
                continue;
            }
            let bit = self.mode_bit(FermionMode { species, spin, point })?;
            let w = if create { *v } else { v.conj() };
            weights.push((bit, w * re(root_w)));
        }
        self.fermion_ladder(&weights, create)
    }

    /// `a(η)` or, with `create`, `a*(η)`.
    pub fn smeared_boson(&self, eta: &DiscreteCoefficients<T>, create: bool) -> Result<SparseOperator<T>> {
        eta.check_same_lattice(&self.layout.boson_lattice)?;
        let root_w = eta.lattice().cell_volume().sqrt();
        let weights: Vec<_> = eta
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != re(T::zero()))
            .map(|(k, v)| (k, if create { *v } else { v.conj() } * re(root_w)))
            .collect();
        self.boson_ladder(&weights, create)
    }

    /// `dΓ` of one-particle energies: diagonal with entry
    /// `Σ_fermion modes n·E(q) + Σ_k n_k·ω(k)`.
    ///
    /// `fermion_energies` is indexed by fermion lattice point and applies to
    /// every species and spin at that point.
    pub fn second_quantization(&self, fermion_energies: &[T], boson_energies: &[T]) -> Result<SparseOperator<T>> {
        let npts = self.layout.fermion_lattice.len();
        if fermion_energies.len() != npts {
            return Err(Error::DimensionMismatch {
                expected: npts,
                found: fermion_energies.len(),
            });
        }
        if boson_energies.len() != self.layout.boson_modes {
            return Err(Error::DimensionMismatch {
                expected: self.layout.boson_modes,
                found: boson_energies.len(),
            });
        }
        for (i, &e) in fermion_energies.iter().chain(boson_energies).enumerate() {
            if !(e >= T::zero()) {
                return Err(Error::NegativeEnergy {
                    mode: i,
                    value: e.as_f64(),
                });
            }
        }
        let per_mode: Vec<T> = self
            .layout
            .fermion_modes
            .iter()
            .map(|m| fermion_energies[m.point])
            .collect();
        let boson_part: Vec<T> = self
            .boson_configs
            .iter()
            .map(|c| {
                c.iter()
                    .zip(boson_energies)
                    .fold(T::zero(), |acc, (&n, &w)| acc + T::from_u8(n).unwrap() * w)
            })
            .collect();
        let mut diag = Vec::with_capacity(self.dim());
        for mask in 0..self.fermion_states as u64 {
            let fermion_part = per_mode
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(T::zero(), |acc, (_, &e)| acc + e);
            diag.extend(boson_part.iter().map(|&b| fermion_part + b));
        }
        Ok(SparseOperator::diagonal(&diag))
    }
}

fn push_configs(mode: usize, used: usize, truncation: BosonTruncation, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if mode == current.len() {
        out.push(current.clone());
        return;
    }
    let room = truncation.per_mode.min(truncation.total - used);
    for n in 0..=room {
        current[mode] = n as u8;
        push_configs(mode + 1, used + n, truncation, current, out);
    }
    current[mode] = 0;
}

/// Applies `c_bit` (or `c_bit†`) to a bitmask, returning the new mask and
/// the Jordan–Wigner sign, or `None` when the result vanishes.
pub(crate) fn fermion_action<T: Real>(mask: u64, bit: usize, create: bool) -> Option<(u64, T)> {
    let occupied = mask >> bit & 1 == 1;
    if occupied == create {
        return None;
    }
    let below = (mask & ((1u64 << bit) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { T::one() } else { -T::one() };
    Some((mask ^ (1u64 << bit), sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::vector;
    use std::f64::consts::PI;

    fn origin() -> Arc<MomentumLattice<f64>> {
        Arc::new(MomentumLattice::build(2.0 * PI, 0.5).unwrap())
    }

    fn two_points() -> Arc<MomentumLattice<f64>> {
        Arc::new(MomentumLattice::from_indices(2.0 * PI, vec![[0, 0, 0], [1, 0, 0]]).unwrap())
    }

    fn minimal() -> FockBasis<f64> {
        FockBasis::enumerate(origin(), origin(), BosonTruncation::new(3, 3), 1 << 20).unwrap()
    }

    #[test]
    fn minimal_dimension() {
        let basis = minimal();
        assert_eq!(basis.dim(), 64);
        assert_eq!(basis.boson_config_count(), 4);
        assert_eq!(
            basis.state(0),
            FockState {
                fermions: 0,
                bosons: vec![0]
            }
        );
    }

    #[test]
    fn two_point_dimension_matches_enumeration() {
        let basis = FockBasis::enumerate(two_points(), two_points(), BosonTruncation::new(1, 1), 1 << 20).unwrap();
        // Occupations (n0, n1) with n_i ≤ 1 and n0 + n1 ≤ 1.
        let mut count = 0;
        for a in 0..=1 {
            for b in 0..=1 {
                if a + b <= 1 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 3);
        assert_eq!(basis.dim(), 256 * count);
        assert_eq!(projected_dimension(8, 2, BosonTruncation::new(1, 1)), 768);
    }

    #[test]
    fn boson_configs_are_lexicographic_and_unique() {
        let basis = FockBasis::enumerate(origin(), two_points(), BosonTruncation::new(2, 3), 1 << 20).unwrap();
        let configs = &basis.boson_configs;
        assert!(configs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            configs.len() as u128,
            count_boson_configs(2, BosonTruncation::new(2, 3))
        );
        assert!(configs
            .iter()
            .all(|c| c.iter().all(|&n| n <= 2) && c.iter().map(|&n| n as usize).sum::<usize>() <= 3));
        for i in 0..basis.dim() {
            assert_eq!(basis.index_of(&basis.state(i)), Some(i));
        }
    }

    #[test]
    fn capacity_error_reports_projection() {
        let err = FockBasis::enumerate(two_points(), two_points(), BosonTruncation::new(3, 6), 1000).unwrap_err();
        assert_eq!(
            err,
            Error::Capacity {
                what: "Fock basis",
                projected: 4096,
                cap: 1000
            }
        );
    }

    #[test]
    fn annihilators_kill_the_vacuum() {
        let basis = minimal();
        let vac = vector::basis_vector::<f64>(basis.dim(), 0);
        for mode in basis.layout().fermion_modes().to_vec() {
            let b = basis.fermion_annihilator(mode).unwrap();
            assert_eq!(vector::norm(&b.apply(&vac)), 0.0);
        }
        let a = basis.boson_annihilator(0).unwrap();
        assert_eq!(vector::norm(&a.apply(&vac)), 0.0);
    }

    #[test]
    fn creation_is_antisymmetric() {
        let basis = minimal();
        let m1 = FermionMode {
            species: Species::Particle,
            spin: Spin::Up,
            point: 0,
        };
        let m2 = FermionMode {
            species: Species::Particle,
            spin: Spin::Down,
            point: 0,
        };
        let c1 = basis.fermion_creator(m1).unwrap();
        let c2 = basis.fermion_creator(m2).unwrap();
        let vac = vector::basis_vector::<f64>(basis.dim(), 0);
        let a = c1.apply(&c2.apply(&vac));
        let b = c2.apply(&c1.apply(&vac));
        assert!(vector::norm(&a) > 0.5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn creator_is_adjoint_of_annihilator() {
        let basis = minimal();
        for mode in basis.layout().fermion_modes().to_vec() {
            let b = basis.fermion_annihilator(mode).unwrap();
            let bd = basis.fermion_creator(mode).unwrap();
            assert_eq!(b.adjoint(), bd);
        }
        assert_eq!(
            basis.boson_annihilator(0).unwrap().adjoint(),
            basis.boson_creator(0).unwrap()
        );
    }

    #[test]
    fn boson_number_operator() {
        let basis = minimal();
        let a = basis.boson_annihilator(0).unwrap();
        let n = basis.boson_creator(0).unwrap().matmul(&a).unwrap();
        assert!(n.is_diagonal());
        for i in 0..basis.dim() {
            assert!((n.get(i, i).re - basis.state(i).bosons[0] as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn truncated_creator_stops_at_cap() {
        let basis = minimal();
        let top = basis
            .index_of(&FockState {
                fermions: 0,
                bosons: vec![3],
            })
            .unwrap();
        let ad = basis.boson_creator(0).unwrap();
        assert_eq!(vector::norm(&ad.apply(&vector::basis_vector(basis.dim(), top))), 0.0);
    }

    #[test]
    fn smearing_a_point_indicator() {
        let lat = two_points();
        let basis = FockBasis::enumerate(lat.clone(), origin(), BosonTruncation::new(0, 0), 1 << 20).unwrap();
        let xi = DiscreteCoefficients::from_values(lat, vec![re(0.0), re(1.0)]).unwrap();
        let smeared = basis
            .smeared_fermion(&xi, Species::Antiparticle, Spin::Down, false)
            .unwrap();
        let direct = basis
            .fermion_annihilator(FermionMode {
                species: Species::Antiparticle,
                spin: Spin::Down,
                point: 1,
            })
            .unwrap();
        assert_eq!(smeared.max_abs_diff(&direct).unwrap(), 0.0);
    }

    #[test]
    fn smearing_rejects_foreign_lattice() {
        let basis = minimal();
        let xi = DiscreteCoefficients::zeros(two_points());
        assert_eq!(
            basis
                .smeared_fermion(&xi, Species::Particle, Spin::Up, false)
                .unwrap_err(),
            Error::LatticeMismatch
        );
    }

    #[test]
    fn second_quantization_is_additive() {
        let basis = FockBasis::enumerate(origin(), origin(), BosonTruncation::new(3, 3), 1 << 20).unwrap();
        let (e, w) = (1.5, 0.7);
        let h = basis.second_quantization(&[e], &[w]).unwrap();
        assert_eq!(h.get(0, 0).re, 0.0);
        let one_b = basis
            .index_of(&FockState {
                fermions: 1,
                bosons: vec![0],
            })
            .unwrap();
        assert_eq!(h.get(one_b, one_b).re, e);
        let two_bosons = basis
            .index_of(&FockState {
                fermions: 0,
                bosons: vec![2],
            })
            .unwrap();
        assert_eq!(h.get(two_bosons, two_bosons).re, 2.0 * w);
        assert!(h.diagonal_values().iter().all(|v| v.re >= 0.0));
        assert!(matches!(
            basis.second_quantization(&[-1.0], &[w]),
            Err(Error::NegativeEnergy { .. })
        ));
    }

    #[test]
    fn charge_and_counts() {
        let basis = minimal();
        // Mode order b+, b−, d+, d−: mask 0b0101 = b+ and d+.
        let i = basis
            .index_of(&FockState {
                fermions: 0b0101,
                bosons: vec![1],
            })
            .unwrap();
        assert_eq!(basis.charge(i), 0);
        assert_eq!(basis.fermion_count(i), 2);
        let j = basis
            .index_of(&FockState {
                fermions: 0b0011,
                bosons: vec![0],
            })
            .unwrap();
        assert_eq!(basis.charge(j), 2);
    }

    #[test]
    fn custom_layouts() {
        let lat = two_points();
        let modes = vec![FermionMode {
            species: Species::Particle,
            spin: Spin::Up,
            point: 1,
        }];
        let layout = FockLayout::custom(lat.clone(), origin(), modes.clone(), false).unwrap();
        let basis = FockBasis::with_layout(layout, BosonTruncation::new(0, 0), 16).unwrap();
        assert_eq!(basis.dim(), 2);
        let missing = FermionMode {
            species: Species::Particle,
            spin: Spin::Up,
            point: 0,
        };
        assert!(matches!(
            basis.fermion_annihilator(missing),
            Err(Error::ModeNotInBasis(_))
        ));
        let dup = vec![modes[0], modes[0]];
        assert!(FockLayout::custom(lat, origin(), dup, false).is_err());
    }
}
