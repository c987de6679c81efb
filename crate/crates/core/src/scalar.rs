//! Scalar abstraction shared by every numerical module.
//!
//! All model code is written against [`Real`]; the dense Hermitian
//! eigensolver is attached to the trait so that generic code never has to
//! name the linear-algebra backend's own scalar bounds.

use std::fmt::{Debug, Display};

use faer::{Mat, Side};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Eigen-decomposition of a dense Hermitian matrix stored row-major.
    ///
    /// Eigenvalues come back ascending; `vectors[i]` belongs to `values[i]`.
    fn hermitian_eigh(dim: usize, data: &[Complex<Self>]) -> (Vec<Self>, Vec<Vec<Complex<Self>>>);

    /// Ascending eigenvalues of a dense Hermitian matrix stored row-major.
    fn hermitian_eigvals(dim: usize, data: &[Complex<Self>]) -> Vec<Self>;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy conversion used for reports and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn to_mat<T: Copy>(dim: usize, data: &[T]) -> Mat<T> {
    assert_eq!(data.len(), dim * dim, "dense matrix has wrong length");
    Mat::from_fn(dim, dim, |r, c| data[r * dim + c])
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn hermitian_eigh(dim: usize, data: &[Complex<$t>]) -> (Vec<$t>, Vec<Vec<Complex<$t>>>) {
                if dim == 0 {
                    return (Vec::new(), Vec::new());
                }
                let eig = to_mat(dim, data)
                    .self_adjoint_eigen(Side::Lower)
                    .expect("Hermitian eigensolver converges");
                let s = eig.S().column_vector();
                let u = eig.U();
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
                let values = order.iter().map(|&i| s[i].re).collect();
                let vectors = order
                    .iter()
                    .map(|&i| (0..dim).map(|r| u[(r, i)]).collect())
                    .collect();
                (values, vectors)
            }

            fn hermitian_eigvals(dim: usize, data: &[Complex<$t>]) -> Vec<$t> {
                if dim == 0 {
                    return Vec::new();
                }
                let mut values: Vec<$t> = to_mat(dim, data)
                    .self_adjoint_eigenvalues(Side::Lower)
                    .expect("Hermitian eigensolver converges");
                values.sort_by(|a, b| a.total_cmp(b));
                values
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Lifts a real number into the complex plane.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_eigh_sorts_and_matches_trace() {
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let data = vec![one * 2.0, i, -i, one * 2.0];
        let (values, vectors) = f64::hermitian_eigh(2, &data);
        assert!((values[0] - 1.0).abs() < 1e-14);
        assert!((values[1] - 3.0).abs() < 1e-14);
        let v = &vectors[0];
        let hv0 = data[0] * v[0] + data[1] * v[1];
        assert!((hv0 - v[0]).norm() < 1e-13);
    }

    #[test]
    fn eigenvalues_only_agree() {
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let data = vec![one * 2.0, i, -i, one * 2.0];
        let values = f64::hermitian_eigvals(2, &data);
        assert!((values[0] - 1.0).abs() < 1e-14 && (values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let one = Complex::new(1.0f32, 0.0);
        let (values, _) = f32::hermitian_eigh(2, &[one, one, one, one]);
        assert!(values[0].abs() < 1e-6);
        assert!((values[1] - 2.0).abs() < 1e-6);
    }
}
