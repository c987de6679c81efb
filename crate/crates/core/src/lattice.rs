//! Momentum lattices and piecewise-constant discretization of one-particle
//! functions.
//!
//! A lattice with spacing parameter `V` consists of the points
//! `q = (2π/V)·n`, `n ∈ Z³`. Each point owns the half-open cell
//! `[q_j − π/V, q_j + π/V)` in every direction, and a point belongs to the
//! lattice when its cell overlaps the box `[−L, L]³` in a set of positive
//! volume. Points are kept in lexicographic order of their integer indices,
//! which is what fixes the mode numbering (and hence all Jordan–Wigner signs)
//! downstream.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default upper bound on the number of lattice points.
pub const DEFAULT_MAX_POINTS: usize = 1 << 16;

/// Finite set of momentum lattice points with their cell volume.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumLattice<T> {
    spacing_parameter: T,
    box_half_width: Option<T>,
    indices: Vec<[i64; 3]>,
    points: Vec<[T; 3]>,
    cell_volume: T,
}

impl<T: Real> MomentumLattice<T> {
    /// All points of `Γ_V` whose cell overlaps `[−L, L]³`.
    pub fn build(spacing_parameter: T, box_half_width: T) -> Result<Self> {
        Self::build_with_cap(spacing_parameter, box_half_width, DEFAULT_MAX_POINTS)
    }

    pub fn build_with_cap(spacing_parameter: T, box_half_width: T, max_points: usize) -> Result<Self> {
        check_spacing(spacing_parameter)?;
        if !(box_half_width > T::zero()) || !box_half_width.is_finite() {
            return Err(Error::parameter("box_half_width", "must be positive and finite"));
        }
        let spacing = spacing_of(spacing_parameter);
        // Overlap with positive volume on one axis: |n|·s < L + s/2.
        let reach = box_half_width / spacing + T::lit(0.5);
        let reach = reach.to_f64().unwrap_or(f64::INFINITY);
        let extent = reach.ceil() - 1.0;
        let per_axis = 2.0 * extent + 1.0;
        let projected = per_axis * per_axis * per_axis;
        if !projected.is_finite() || projected > max_points as f64 {
            return Err(Error::Capacity {
                what: "momentum lattice",
                projected: if projected.is_finite() {
                    projected as u128
                } else {
                    u128::MAX
                },
                cap: max_points as u128,
            });
        }
        let extent = extent as i64;
        let mut indices = Vec::with_capacity(projected as usize);
        for a in -extent..=extent {
            for b in -extent..=extent {
                for c in -extent..=extent {
                    indices.push([a, b, c]);
                }
            }
        }
        Ok(Self::from_sorted(spacing_parameter, Some(box_half_width), indices))
    }

    /// Lattice made of an explicit set of integer indices. The set is sorted
    /// and deduplicated; no box restriction applies to its cells.
    pub fn from_indices(spacing_parameter: T, mut indices: Vec<[i64; 3]>) -> Result<Self> {
        check_spacing(spacing_parameter)?;
        if indices.is_empty() {
            return Err(Error::parameter("indices", "a lattice needs at least one point"));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self::from_sorted(spacing_parameter, None, indices))
    }

    /// Box lattice truncated to the `count` points of smallest `|q|`
    /// (ties broken lexicographically), re-sorted lexicographically.
    pub fn nearest(spacing_parameter: T, box_half_width: T, count: usize) -> Result<Self> {
        let full = Self::build(spacing_parameter, box_half_width)?;
        if count == 0 || count > full.len() {
            return Err(Error::parameter(
                "count",
                format!("must lie in 1..={} for this box", full.len()),
            ));
        }
        let mut by_radius = full.indices.clone();
        by_radius.sort_by_key(|n| (n[0] * n[0] + n[1] * n[1] + n[2] * n[2], *n));
        by_radius.truncate(count);
        by_radius.sort_unstable();
        Ok(Self::from_sorted(spacing_parameter, Some(box_half_width), by_radius))
    }

    fn from_sorted(spacing_parameter: T, box_half_width: Option<T>, indices: Vec<[i64; 3]>) -> Self {
        let spacing = spacing_of(spacing_parameter);
        let points = indices
            .iter()
            .map(|n| n.map(|c| spacing * T::from_i64(c).expect("index fits scalar")))
            .collect();
        Self {
            spacing_parameter,
            box_half_width,
            indices,
            points,
            cell_volume: spacing * spacing * spacing,
        }
    }

    pub fn spacing_parameter(&self) -> T {
        self.spacing_parameter
    }

    /// `None` for lattices built from explicit indices.
    pub fn box_half_width(&self) -> Option<T> {
        self.box_half_width
    }

    /// Distance `2π/V` between neighbouring points.
    pub fn spacing(&self) -> T {
        spacing_of(self.spacing_parameter)
    }

    pub fn cell_volume(&self) -> T {
        self.cell_volume
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[T; 3]] {
        &self.points
    }

    pub fn indices(&self) -> &[[i64; 3]] {
        &self.indices
    }

    pub fn point(&self, i: usize) -> [T; 3] {
        self.points[i]
    }

    pub fn index_of(&self, n: [i64; 3]) -> Option<usize> {
        self.indices.binary_search(&n).ok()
    }

    pub fn zero_index(&self) -> Option<usize> {
        self.index_of([0, 0, 0])
    }

    /// Lattice point whose half-open cell contains `k`, provided `k` is also
    /// inside the box (when the lattice has one).
    pub fn cell_containing(&self, k: [T; 3]) -> Option<usize> {
        if let Some(half) = self.box_half_width {
            if k.iter().any(|c| c.abs() > half) {
                return None;
            }
        }
        let s = self.spacing();
        let half = T::lit(0.5);
        let mut n = [0i64; 3];
        for j in 0..3 {
            n[j] = (k[j] / s + half).floor().to_i64()?;
        }
        self.index_of(n)
    }
}

fn spacing_of<T: Real>(spacing_parameter: T) -> T {
    T::lit(2.0) * T::PI() / spacing_parameter
}

fn check_spacing<T: Real>(v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::parameter("spacing_parameter", "must be positive and finite"));
    }
    Ok(())
}

/// How a lattice is specified in model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatticeSpec<T> {
    /// Every point whose cell overlaps the box.
    Box { spacing_parameter: T, box_half_width: T },
    /// The `count` points of the box lattice closest to the origin.
    Nearest {
        spacing_parameter: T,
        box_half_width: T,
        count: usize,
    },
    /// An explicit list of integer indices.
    Explicit {
        spacing_parameter: T,
        indices: Vec<[i64; 3]>,
    },
}

impl<T: Real> LatticeSpec<T> {
    /// The single-point lattice `{0}` with unit cell volume.
    pub fn origin() -> Self {
        LatticeSpec::Box {
            spacing_parameter: T::lit(2.0) * T::PI(),
            box_half_width: T::lit(0.5),
        }
    }

    pub fn build(&self) -> Result<MomentumLattice<T>> {
        match self {
            LatticeSpec::Box {
                spacing_parameter,
                box_half_width,
            } => MomentumLattice::build(*spacing_parameter, *box_half_width),
            LatticeSpec::Nearest {
                spacing_parameter,
                box_half_width,
                count,
            } => MomentumLattice::nearest(*spacing_parameter, *box_half_width, *count),
            LatticeSpec::Explicit {
                spacing_parameter,
                indices,
            } => MomentumLattice::from_indices(*spacing_parameter, indices.clone()),
        }
    }
}

/// Samples of a one-particle function at the points of a lattice.
///
/// The represented function is piecewise constant: value `values[i]` on the
/// cell of point `i` (intersected with the lattice box).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCoefficients<T> {
    lattice: Arc<MomentumLattice<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> DiscreteCoefficients<T> {
    pub fn from_values(lattice: Arc<MomentumLattice<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::DimensionMismatch {
                expected: lattice.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Evaluation {
                index: lattice.indices()[i],
            });
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: Arc<MomentumLattice<T>>) -> Self {
        let values = vec![Complex::new(T::zero(), T::zero()); lattice.len()];
        Self { lattice, values }
    }

    pub fn lattice(&self) -> &Arc<MomentumLattice<T>> {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `cell_volume · Σ|ξ(q)|²`
    pub fn norm_squared(&self) -> T {
        self.lattice.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// `(self, other) = cell_volume · Σ conj(self(q)) other(q)`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same_lattice(other.lattice())?;
        let sum = self
            .values
            .iter()
            .zip(&other.values)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        Ok(sum * self.lattice.cell_volume())
    }

    /// Pointwise transformation `q ↦ g(q, ξ(q))`.
    pub fn map(&self, mut g: impl FnMut([T; 3], Complex<T>) -> Complex<T>) -> Result<Self> {
        let values = self
            .lattice
            .points()
            .iter()
            .zip(&self.values)
            .map(|(q, v)| g(*q, *v))
            .collect();
        Self::from_values(self.lattice.clone(), values)
    }

    /// Value of the piecewise-constant function at an arbitrary momentum.
    pub fn evaluate_at(&self, k: [T; 3]) -> Complex<T> {
        match self.lattice.cell_containing(k) {
            Some(i) => self.values[i],
            None => Complex::new(T::zero(), T::zero()),
        }
    }

    pub(crate) fn check_same_lattice(&self, lattice: &Arc<MomentumLattice<T>>) -> Result<()> {
        if Arc::ptr_eq(&self.lattice, lattice) || *self.lattice == **lattice {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }
}

/// Samples `f` at every lattice point.
pub fn discretize<T: Real>(
    f: impl Fn([T; 3]) -> Complex<T>,
    lattice: &Arc<MomentumLattice<T>>,
) -> Result<DiscreteCoefficients<T>> {
    let mut values = Vec::with_capacity(lattice.len());
    for (q, n) in lattice.points().iter().zip(lattice.indices()) {
        let v = f(*q);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation { index: *n });
        }
        values.push(v);
    }
    Ok(DiscreteCoefficients {
        lattice: lattice.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn one(_: [f64; 3]) -> Complex<f64> {
        Complex::new(1.0, 0.0)
    }

    #[test]
    fn single_point_lattice() {
        let lat = MomentumLattice::build(2.0 * PI, 0.5).unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.indices(), &[[0, 0, 0]]);
        assert!((lat.cell_volume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cube_of_27_points() {
        let lat = MomentumLattice::build(2.0 * PI, 1.5).unwrap();
        assert_eq!(lat.len(), 27);
        assert!(lat.indices().iter().all(|n| n.iter().all(|c| c.abs() <= 1)));
    }

    #[test]
    fn half_spacing_lattice_matches_enumeration() {
        let (v, l) = (4.0 * PI, 0.6);
        let lat = MomentumLattice::build(v, l).unwrap();
        // Brute force: a cell [s n − s/2, s n + s/2) overlaps [−L, L] with
        // positive length iff s n − s/2 < L and s n + s/2 > −L.
        let s = 2.0 * PI / v;
        let mut expected = Vec::new();
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                for c in -10i64..=10 {
                    let ok = [a, b, c].iter().all(|&n| {
                        let q = s * n as f64;
                        q - s / 2.0 < l && q + s / 2.0 > -l
                    });
                    if ok {
                        expected.push([a, b, c]);
                    }
                }
            }
        }
        assert_eq!(lat.indices(), expected.as_slice());
        assert_eq!(lat.len(), 27);
        assert!((lat.spacing() - 0.5).abs() < 1e-15);
        assert!((lat.points()[0][0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            MomentumLattice::<f64>::build(0.0, 1.0),
            Err(Error::Parameter {
                name: "spacing_parameter",
                ..
            })
        ));
        assert!(matches!(
            MomentumLattice::<f64>::build(1.0, -1.0),
            Err(Error::Parameter {
                name: "box_half_width",
                ..
            })
        ));
        assert!(matches!(
            MomentumLattice::<f64>::build_with_cap(2.0 * PI, 10.5, 100),
            Err(Error::Capacity { projected: 9261, .. })
        ));
    }

    #[test]
    fn zero_momentum_always_present_in_boxes() {
        for l in [0.01, 0.5, 1.0, 3.2] {
            let lat = MomentumLattice::<f64>::build(2.0 * PI, l).unwrap();
            assert!(lat.zero_index().is_some());
        }
    }

    #[test]
    fn nearest_and_explicit_lattices() {
        let lat = MomentumLattice::<f64>::nearest(2.0 * PI, 1.5, 2).unwrap();
        assert_eq!(lat.indices(), &[[-1, 0, 0], [0, 0, 0]]);
        let lat = MomentumLattice::<f64>::from_indices(2.0 * PI, vec![[1, 0, 0], [0, 0, 0], [1, 0, 0]]).unwrap();
        assert_eq!(lat.indices(), &[[0, 0, 0], [1, 0, 0]]);
        assert!(MomentumLattice::<f64>::from_indices(2.0 * PI, vec![]).is_err());
        assert!(MomentumLattice::<f64>::nearest(2.0 * PI, 0.5, 2).is_err());
    }

    #[test]
    fn constant_function_norm() {
        let lat = Arc::new(MomentumLattice::build(2.0 * PI, 1.5).unwrap());
        let c = discretize(one, &lat).unwrap();
        assert!((c.norm_squared() - 27.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_on_single_point() {
        let lat = Arc::new(MomentumLattice::build(2.0 * PI, 0.5).unwrap());
        let c = discretize(
            |q: [f64; 3]| Complex::new((-(q[0] * q[0] + q[1] * q[1] + q[2] * q[2])).exp(), 0.0),
            &lat,
        )
        .unwrap();
        assert_eq!(c.values(), &[Complex::new(1.0, 0.0)]);
    }

    #[test]
    fn boson_energy_norm_matches_direct_sum() {
        let lat = Arc::new(MomentumLattice::build(2.0 * PI, 1.5).unwrap());
        let c = discretize(
            |q: [f64; 3]| Complex::new((1.0 + q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt(), 0.0),
            &lat,
        )
        .unwrap();
        // |n|² counts over {−1,0,1}³: 1 point with 0, 6 with 1, 12 with 2, 8 with 3.
        let direct = 1.0 * 1.0 + 6.0 * 2.0 + 12.0 * 3.0 + 8.0 * 4.0;
        assert!((c.norm_squared() - direct).abs() < 1e-12);
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let lat = Arc::new(MomentumLattice::build(2.0 * PI, 1.5).unwrap());
        let err = discretize(|q: [f64; 3]| Complex::new(1.0 / q[0], 0.0), &lat).unwrap_err();
        assert!(matches!(err, Error::Evaluation { index } if index[0] == 0));
    }

    #[test]
    fn cells_are_half_open() {
        let lat = MomentumLattice::<f64>::build(2.0 * PI, 1.5).unwrap();
        let zero = lat.zero_index().unwrap();
        assert_eq!(lat.cell_containing([-0.5, 0.0, 0.0]), Some(zero));
        assert_eq!(lat.cell_containing([0.5, 0.0, 0.0]), lat.index_of([1, 0, 0]));
        assert_eq!(lat.cell_containing([1.6, 0.0, 0.0]), None);
    }

    #[test]
    fn gaussian_norm_converges_under_refinement() {
        // ‖exp(−|q|²)‖² = (π/2)^{3/2}
        let exact = (PI / 2.0).powf(1.5);
        let mut errors = Vec::new();
        for v in [PI, 2.0 * PI, 4.0 * PI] {
            let lat = Arc::new(MomentumLattice::build(v, 5.0).unwrap());
            let c = discretize(
                |q: [f64; 3]| Complex::new((-(q[0] * q[0] + q[1] * q[1] + q[2] * q[2])).exp(), 0.0),
                &lat,
            )
            .unwrap();
            errors.push((c.norm_squared() - exact).abs());
        }
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
        assert!(errors[2] < 1e-6);
    }

    #[test]
    fn mismatched_lattices_are_rejected() {
        let a = Arc::new(MomentumLattice::build(2.0 * PI, 0.5).unwrap());
        let b = Arc::new(MomentumLattice::build(2.0 * PI, 1.5).unwrap());
        let x = DiscreteCoefficients::zeros(a);
        let y = DiscreteCoefficients::zeros(b);
        assert_eq!(x.inner(&y), Err(Error::LatticeMismatch));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn builds_are_deterministic_and_sorted(v in 1.0f64..20.0, l in 0.05f64..2.0) {
                let a = MomentumLattice::build(v, l);
                let b = MomentumLattice::build(v, l);
                prop_assert_eq!(&a, &b);
                if let Ok(lat) = a {
                    prop_assert!(lat.indices().windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(lat.zero_index().is_some());
                    let s = lat.spacing();
                    for (q, n) in lat.points().iter().zip(lat.indices()) {
                        for j in 0..3 {
                            prop_assert!((q[j] - s * n[j] as f64).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }
}
