//! Finite-dimensional truncations of a cutoff Yukawa model: a Dirac field
//! coupled to a Klein–Gordon field through `κ ∫ χ_I ψ*βψ φ`.
//!
//! Everything is generic over the scalar type `T: Real` (`f32` or `f64`);
//! the aliases at the crate root fix `T = f64`.

pub mod bounds;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod lattice;
pub mod scalar;
pub mod solver;
pub mod sparse;
pub mod spinor;

pub use bounds::{compute_constants, verify_inequalities, BoundConstants, BoundReport, VerifySettings};
pub use error::{Error, Result};
pub use fock::{BosonTruncation, FermionMode, FockBasis, FockLayout, FockState, Species, Spin};
pub use hamiltonian::{ModelParams, Representation, YukawaModel};
pub use lattice::{discretize, DiscreteCoefficients, LatticeSpec, MomentumLattice};
pub use scalar::Real;
pub use solver::{
    converge_scan, lowest, ConvergenceReport, Method, Refinement, SectorLabeling, SolverSettings, SpectralResult,
};
pub use sparse::SparseOperator;
pub use spinor::{CutoffProfile, DiracAlgebra, SpatialCutoff};

pub type Model = YukawaModel<f64>;
pub type Params = ModelParams<f64>;
pub type Settings = SolverSettings<f64>;
pub type Lattice = MomentumLattice<f64>;
pub type Coefficients = DiscreteCoefficients<f64>;
pub type Basis = FockBasis<f64>;
pub type Operator = SparseOperator<f64>;
pub type Complex64 = num_complex::Complex<f64>;
