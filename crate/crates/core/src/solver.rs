//! Lowest eigenvalues, gaps, sector minima and refinement scans.

use std::fmt;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FermionMode, FockBasis};
use crate::hamiltonian::{ModelParams, YukawaModel};
use crate::lattice::LatticeSpec;
use crate::scalar::{re, Real};
use crate::sparse::{vector, SparseOperator};

/// Eigenvalue differences below this count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense for dimensions up to `auto_dense_limit`, Lanczos above.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Auto => "auto",
            Method::Dense => "dense",
            Method::Lanczos => "lanczos",
        };
        f.write_str(s)
    }
}

fn default_k() -> usize {
    2
}
fn default_tol<T: Real>() -> T {
    T::lit(1e-10)
}
fn default_max_iter() -> usize {
    20_000
}
fn default_dense_cap() -> usize {
    4096
}
fn default_auto_dense_limit() -> usize {
    600
}
fn default_krylov_dim() -> usize {
    160
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct SolverSettings<T> {
    /// Number of lowest eigenvalues wanted.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Absolute residual tolerance `‖Hv − λv‖`.
    #[serde(default = "default_tol")]
    pub tol: T,
    /// Budget of matrix–vector products for Lanczos.
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
    /// Largest dimension the dense path accepts.
    #[serde(default = "default_dense_cap")]
    pub dense_cap: usize,
    #[serde(default = "default_auto_dense_limit")]
    pub auto_dense_limit: usize,
    /// Krylov basis size before an explicit restart.
    #[serde(default = "default_krylov_dim")]
    pub krylov_dim: usize,
    #[serde(default)]
    pub method: Method,
}

impl<T: Real> Default for SolverSettings<T> {
    fn default() -> Self {
        Self {
            k: default_k(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            seed: 0,
            dense_cap: default_dense_cap(),
            auto_dense_limit: default_auto_dense_limit(),
            krylov_dim: default_krylov_dim(),
            method: Method::Auto,
        }
    }
}

impl<T: Real> SolverSettings<T> {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::parameter("k", "at least one eigenvalue must be requested"));
        }
        if !(self.tol > T::zero()) {
            return Err(Error::parameter("tol", "must be positive"));
        }
        if self.krylov_dim < 2 {
            return Err(Error::parameter("krylov_dim", "must be at least 2"));
        }
        Ok(())
    }
}

/// Lowest part of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SpectralResult<T> {
    /// Non-decreasing.
    pub eigenvalues: Vec<T>,
    pub ground_energy: T,
    /// `E_1 − E_0`, reported as 0 when below the degeneracy tolerance;
    /// `None` when only one eigenvalue exists.
    pub gap: Option<T>,
    /// Number of eigenvalues within the degeneracy tolerance of `E_0`.
    pub multiplicity: usize,
    /// `‖Hv_i − λ_i v_i‖` for every returned eigenpair.
    pub residuals: Vec<T>,
    #[serde(skip)]
    pub ground_state: Vec<Complex<T>>,
    /// Matrix–vector products (Lanczos) or 1 (dense).
    pub iterations: usize,
    pub restarts: usize,
    pub method: Method,
}

impl<T: Real> SpectralResult<T> {
    fn assemble(
        values: Vec<T>,
        vectors: Vec<Vec<Complex<T>>>,
        h: &SparseOperator<T>,
        iterations: usize,
        restarts: usize,
        method: Method,
    ) -> Self {
        let residuals = values.iter().zip(&vectors).map(|(&l, v)| residual(h, l, v)).collect();
        let e0 = values[0];
        let tol = T::lit(DEGENERACY_TOLERANCE);
        let multiplicity = values.iter().take_while(|&&v| v - e0 < tol).count();
        let gap = values.get(1).map(|&e1| if e1 - e0 < tol { T::zero() } else { e1 - e0 });
        Self {
            ground_energy: e0,
            eigenvalues: values,
            gap,
            multiplicity,
            residuals,
            ground_state: vectors.into_iter().next().unwrap_or_default(),
            iterations,
            restarts,
            method,
        }
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::zero(), T::max)
    }
}

/// `‖Hv − λv‖`
pub fn residual<T: Real>(h: &SparseOperator<T>, lambda: T, v: &[Complex<T>]) -> T {
    let mut hv = h.apply(v);
    vector::axpy(re(-lambda), v, &mut hv);
    vector::norm(&hv)
}

fn require_hermitian<T: Real>(h: &SparseOperator<T>) -> Result<()> {
    if h.is_hermitian() {
        Ok(())
    } else {
        Err(Error::NotHermitian {
            defect: h.hermiticity_defect().as_f64(),
        })
    }
}

/// Full dense diagonalization; the first `k` eigenpairs.
pub fn dense_lowest<T: Real>(h: &SparseOperator<T>, k: usize, dense_cap: usize) -> Result<SpectralResult<T>> {
    require_hermitian(h)?;
    if h.dim() > dense_cap {
        return Err(Error::DenseCap {
            dimension: h.dim(),
            cap: dense_cap,
        });
    }
    if h.dim() == 0 || k == 0 {
        return Err(Error::parameter("k", "need a nonempty operator and k ≥ 1"));
    }
    let (mut values, mut vectors) = T::hermitian_eigh(h.dim(), &h.to_dense());
    let k = k.min(h.dim());
    values.truncate(k);
    vectors.truncate(k);
    Ok(SpectralResult::assemble(values, vectors, h, 1, 0, Method::Dense))
}

/// Thick-restart Lanczos with full reorthogonalization and locking.
///
/// The Krylov basis is reorthogonalized twice against itself and the
/// locked vectors at every step, and the projected matrix is diagonalized
/// densely. On restart the lowest Ritz vectors are kept; converged pairs are
/// locked and removed from the active space, and a fresh random direction is
/// injected after every lock so that degenerate eigenvalues are found with
/// their multiplicity. A final Rayleigh–Ritz step on the locked vectors
/// orders and polishes the result.
pub fn lanczos_lowest<T: Real>(h: &SparseOperator<T>, settings: &SolverSettings<T>) -> Result<SpectralResult<T>> {
    settings.validate()?;
    require_hermitian(h)?;
    let n = h.dim();
    if n == 0 {
        return Err(Error::parameter("dimension", "operator is empty"));
    }
    let k = settings.k.min(n);
    if h.is_diagonal() {
        return Ok(diagonal_lowest(h, k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let zero = re(T::zero());
    let mut locked: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
    // active basis, its images under H and the projected matrix V†HV
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    let mut images: Vec<Vec<Complex<T>>> = Vec::new();
    let mut projected: Vec<Vec<Complex<T>>> = Vec::new();
    let mut next = vector::random_unit::<T, _>(n, &mut rng);
    let mut matvecs = 0usize;
    let mut restarts = 0usize;
    let mut best = T::infinity();
    let mut since_check = 0usize;
    while locked.len() < k {
        let m_max = settings.krylov_dim.max(k - locked.len() + 2).min(n - locked.len());
        let mut exhausted = false;
        if basis.len() < m_max {
            let scale = vector::norm(&next);
            for _ in 0..2 {
                orthogonalize(&mut next, &locked);
                orthogonalize(&mut next, &basis);
            }
            let norm = vector::norm(&next);
            if norm <= T::epsilon() * T::lit(64.0) * scale.max(T::epsilon()) {
                if basis.len() + locked.len() >= n {
                    exhausted = true;
                } else {
                    // invariant subspace: continue from a new random direction
                    next = vector::random_unit::<T, _>(n, &mut rng);
                    continue;
                }
            } else {
                vector::scale(re(T::one() / norm), &mut next);
                let v = std::mem::take(&mut next);
                let w = h.apply(&v);
                matvecs += 1;
                let column: Vec<Complex<T>> = basis.iter().map(|q| vector::dot(q, &w)).collect();
                for (row, c) in projected.iter_mut().zip(&column) {
                    row.push(*c);
                }
                let mut last: Vec<Complex<T>> = column.iter().map(|c| c.conj()).collect();
                last.push(re(vector::dot(&v, &w).re));
                projected.push(last);
                next = w.clone();
                basis.push(v);
                images.push(w);
                since_check += 1;
                if basis.len() + locked.len() >= n {
                    exhausted = true;
                }
            }
        }
        let full = basis.len() >= m_max;
        let out_of_budget = matvecs >= settings.max_iter;
        if !(exhausted || full || out_of_budget || since_check >= (basis.len() / 4).max(5)) {
            continue;
        }
        since_check = 0;
        let m = basis.len();
        let flat: Vec<Complex<T>> = projected.iter().flatten().copied().collect();
        let (theta, y) = T::hermitian_eigh(m, &flat);
        let need = k - locked.len();
        let mut converged = 0;
        let mut first_residual = None;
        for i in 0..need.min(m) {
            let x = combine(&basis, &y[i]);
            let hx = combine(&images, &y[i]);
            let mut r = hx;
            vector::axpy(re(-theta[i]), &x, &mut r);
            let estimate = vector::norm(&r);
            best = best.min(estimate);
            if estimate <= settings.tol || exhausted {
                let true_residual = residual(h, theta[i], &x);
                matvecs += 1;
                best = best.min(true_residual);
                if true_residual <= settings.tol || exhausted {
                    converged += 1;
                    // one lock per check unless the space is complete: a
                    // degenerate partner only shows up after fresh
                    // directions have been added
                    if exhausted {
                        continue;
                    }
                    break;
                }
            }
            first_residual = Some(r);
            break;
        }
        if converged == 0 && !full && !exhausted {
            if out_of_budget {
                break;
            }
            continue;
        }
        // compress: lock the converged prefix, keep the next Ritz vectors
        let keep = if exhausted {
            0
        } else {
            (need - converged + 8).min(m / 2).min(m - converged)
        };
        let mut new_basis = Vec::with_capacity(keep);
        let mut new_images = Vec::with_capacity(keep);
        for (i, yi) in y.iter().enumerate().take(converged + keep) {
            let x = combine(&basis, yi);
            if i < converged {
                let mut v = x;
                orthogonalize(&mut v, &locked);
                vector::normalize(&mut v);
                locked.push(v);
            } else {
                new_images.push(combine(&images, yi));
                new_basis.push(x);
            }
        }
        projected = (0..new_basis.len())
            .map(|i| {
                let mut row = vec![zero; new_basis.len()];
                row[i] = re(theta[converged + i]);
                row
            })
            .collect();
        basis = new_basis;
        images = new_images;
        restarts += 1;
        next = match first_residual {
            Some(r) if converged == 0 => r,
            _ => vector::random_unit::<T, _>(n, &mut rng),
        };
        if locked.len() >= k {
            break;
        }
        if out_of_budget {
            break;
        }
    }
    if locked.len() < k {
        return Err(Error::NoConvergence {
            iterations: matvecs,
            best_residual: best.as_f64(),
        });
    }
    let (values, vectors) = rayleigh_ritz(h, &locked);
    Ok(SpectralResult::assemble(
        values,
        vectors,
        h,
        matvecs,
        restarts,
        Method::Lanczos,
    ))
}

/// A diagonal operator is already diagonalized: its lowest entries and the
/// matching basis vectors are exact eigenpairs.
fn diagonal_lowest<T: Real>(h: &SparseOperator<T>, k: usize) -> SpectralResult<T> {
    let d = h.diagonal_values();
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[a].re.partial_cmp(&d[b].re).unwrap().then(a.cmp(&b)));
    order.truncate(k);
    let values = order.iter().map(|&i| d[i].re).collect();
    let vectors = order.iter().map(|&i| vector::basis_vector(d.len(), i)).collect();
    SpectralResult::assemble(values, vectors, h, 0, 0, Method::Lanczos)
}

fn orthogonalize<T: Real>(w: &mut [Complex<T>], against: &[Vec<Complex<T>>]) {
    for q in against {
        let c = vector::dot(q, w);
        vector::axpy(-c, q, w);
    }
}

fn combine<T: Real>(basis: &[Vec<Complex<T>>], coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = vec![re(T::zero()); basis[0].len()];
    for (q, &c) in basis.iter().zip(coeffs) {
        vector::axpy(c, q, &mut out);
    }
    out
}

fn rayleigh_ritz<T: Real>(h: &SparseOperator<T>, vectors: &[Vec<Complex<T>>]) -> (Vec<T>, Vec<Vec<Complex<T>>>) {
    let k = vectors.len();
    let images: Vec<_> = vectors.iter().map(|v| h.apply(v)).collect();
    let mut small = vec![re(T::zero()); k * k];
    for i in 0..k {
        for j in 0..k {
            small[i * k + j] = vector::dot(&vectors[i], &images[j]);
        }
    }
    for i in 0..k {
        for j in 0..i {
            let avg = (small[i * k + j] + small[j * k + i].conj()) * re(T::lit(0.5));
            small[i * k + j] = avg;
            small[j * k + i] = avg.conj();
        }
        small[i * k + i] = re(small[i * k + i].re);
    }
    let (values, y) = T::hermitian_eigh(k, &small);
    let out = y
        .iter()
        .map(|col| {
            let mut v = vec![re(T::zero()); vectors[0].len()];
            for (q, &c) in vectors.iter().zip(col) {
                vector::axpy(c, q, &mut v);
            }
            vector::normalize(&mut v);
            v
        })
        .collect();
    (values, out)
}

/// Dispatches on `settings.method`.
pub fn lowest<T: Real>(h: &SparseOperator<T>, settings: &SolverSettings<T>) -> Result<SpectralResult<T>> {
    settings.validate()?;
    match settings.method {
        Method::Dense => dense_lowest(h, settings.k, settings.dense_cap),
        Method::Lanczos => lanczos_lowest(h, settings),
        Method::Auto => {
            if h.dim() <= settings.auto_dense_limit.min(settings.dense_cap) {
                dense_lowest(h, settings.k, settings.dense_cap)
            } else {
                lanczos_lowest(h, settings)
            }
        }
    }
}

/// How basis states are grouped into sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorLabeling {
    /// Total number of occupied fermion modes.
    FermionNumber,
    /// Particles minus antiparticles.
    Charge,
    /// Occupied fermion modes among those the interaction never touches.
    InertFermions,
}

/// Sector label of every basis state. `inert` lists layout mode indices
/// and is only read for [`SectorLabeling::InertFermions`].
pub fn sector_labels<T: Real>(basis: &FockBasis<T>, labeling: SectorLabeling, inert: &[usize]) -> Vec<i64> {
    let inert_mask = inert.iter().fold(0u64, |m, &i| m | 1 << i);
    (0..basis.dim())
        .map(|i| match labeling {
            SectorLabeling::FermionNumber => basis.fermion_count(i) as i64,
            SectorLabeling::Charge => basis.charge(i),
            SectorLabeling::InertFermions => (basis.split(i).0 & inert_mask).count_ones() as i64,
        })
        .collect()
}

/// Fails with the first pair of sectors the operator couples.
pub fn check_invariant<T: Real>(h: &SparseOperator<T>, labels: &[i64]) -> Result<()> {
    if labels.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: labels.len(),
        });
    }
    match h.entries().find(|&(r, c, _)| labels[r] != labels[c]) {
        Some((r, c, _)) => Err(Error::SectorNotInvariant {
            from: labels[c],
            to: labels[r],
        }),
        None => Ok(()),
    }
}

/// Lowest eigenvalue of `h` compressed to the states labelled `label`.
/// The sector is checked to be invariant first.
pub fn sector_minimum<T: Real>(
    h: &SparseOperator<T>,
    labels: &[i64],
    label: i64,
    settings: &SolverSettings<T>,
) -> Result<T> {
    check_invariant(h, labels)?;
    let indices: Vec<usize> = (0..h.dim()).filter(|&i| labels[i] == label).collect();
    if indices.is_empty() {
        return Err(Error::EmptySector { label });
    }
    let block = restrict(h, &indices)?;
    let mut s = settings.clone();
    s.k = 1;
    Ok(lowest(&block, &s)?.ground_energy)
}

fn restrict<T: Real>(h: &SparseOperator<T>, indices: &[usize]) -> Result<SparseOperator<T>> {
    let mut position = vec![usize::MAX; h.dim()];
    for (k, &i) in indices.iter().enumerate() {
        position[i] = k;
    }
    let triplets = indices
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| {
            let position = &position;
            h.row(i)
                .filter(move |(c, _)| position[*c] != usize::MAX)
                .map(move |(c, v)| (k, position[c], v))
        })
        .collect();
    let block = SparseOperator::from_triplets(indices.len(), triplets)?;
    // a principal block of an exactly Hermitian matrix is exactly Hermitian
    block.into_hermitian(T::zero())
}

/// Outcome of `E_min(n) ≥ E_0 + n·M` for one sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SectorBound<T> {
    pub label: i64,
    /// The `n` in the bound.
    pub excitation: i64,
    pub minimum: T,
    pub bound: T,
    pub holds: bool,
}

/// Checks the sector bound on every nonempty sector.
///
/// `excitation(label)` gives the `n` for a sector (`label − base` for
/// fermion number, `|label|` for charge). Fails if `h` mixes sectors.
pub fn sector_gap_check<T: Real>(
    h: &SparseOperator<T>,
    labels: &[i64],
    excitation: impl Fn(i64) -> i64,
    mass: T,
    tol: T,
    settings: &SolverSettings<T>,
) -> Result<Vec<SectorBound<T>>> {
    check_invariant(h, labels)?;
    let mut s = settings.clone();
    s.k = 1;
    let e0 = lowest(h, &s)?.ground_energy;
    let mut distinct: Vec<i64> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    distinct
        .into_iter()
        .map(|label| {
            let minimum = sector_minimum(h, labels, label, settings)?;
            let n = excitation(label);
            let bound = e0 + T::from_i64(n).unwrap() * mass;
            Ok(SectorBound {
                label,
                excitation: n,
                minimum,
                bound,
                holds: minimum >= bound - tol,
            })
        })
        .collect()
}

/// Parameter being refined in a convergence scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields, bound = "T: Real")]
pub enum Refinement<T> {
    /// Boson occupation caps: each value `n` sets `n_max = n` and raises
    /// `N_B` to at least `n`.
    BosonCap { values: Vec<usize> },
    /// The `count` fermion lattice points nearest the origin, on the box
    /// lattice of the configured fermion lattice.
    FermionPoints { values: Vec<usize> },
    /// Fermion box lattices with growing spacing parameter `V`.
    FermionSpacing { box_half_width: T, values: Vec<T> },
    /// Explicitly listed fermion lattices, each containing the previous.
    FermionLattices { lattices: Vec<LatticeSpec<T>> },
    /// Growing sets of fermion modes on one fixed lattice, each containing
    /// the previous; the model is compressed to the listed modes.
    FermionModes {
        lattice: LatticeSpec<T>,
        modes: Vec<Vec<FermionMode>>,
    },
}

impl<T: Real> Refinement<T> {
    pub fn len(&self) -> usize {
        match self {
            Refinement::BosonCap { values } | Refinement::FermionPoints { values } => values.len(),
            Refinement::FermionSpacing { values, .. } => values.len(),
            Refinement::FermionLattices { lattices } => lattices.len(),
            Refinement::FermionModes { modes, .. } => modes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            Refinement::BosonCap { .. } => "boson_cap",
            Refinement::FermionPoints { .. } => "fermion_points",
            Refinement::FermionSpacing { .. } => "fermion_spacing",
            Refinement::FermionLattices { .. } => "fermion_lattices",
            Refinement::FermionModes { .. } => "fermion_modes",
        }
    }

    /// Non-empty, strictly increasing (or strictly nested for explicit
    /// lattices).
    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::parameter("refinement", "list is empty"));
        }
        let increasing = match self {
            Refinement::BosonCap { values } | Refinement::FermionPoints { values } => {
                values.windows(2).all(|w| w[0] < w[1])
            }
            Refinement::FermionSpacing { values, .. } => values.windows(2).all(|w| w[0] < w[1]),
            Refinement::FermionLattices { lattices } => {
                let built: Vec<_> = lattices.iter().map(|l| l.build()).collect::<Result<_>>()?;
                built.windows(2).all(|w| {
                    w[0].spacing_parameter() == w[1].spacing_parameter()
                        && w[0].len() < w[1].len()
                        && w[0].indices().iter().all(|n| w[1].index_of(*n).is_some())
                })
            }
            Refinement::FermionModes { lattice, modes } => {
                let n = lattice.build()?.len();
                if let Some(m) = modes.iter().flatten().find(|m| m.point >= n) {
                    return Err(Error::ModeNotInBasis(m.to_string()));
                }
                modes
                    .windows(2)
                    .all(|w| w[0].len() < w[1].len() && w[0].iter().all(|m| w[1].contains(m)))
            }
        };
        if increasing {
            Ok(())
        } else {
            Err(Error::parameter("refinement", "values must be strictly increasing"))
        }
    }

    fn parameter(&self, step: usize) -> f64 {
        match self {
            Refinement::BosonCap { values } | Refinement::FermionPoints { values } => values[step] as f64,
            Refinement::FermionSpacing { values, .. } => values[step].as_f64(),
            Refinement::FermionLattices { .. } => step as f64,
            Refinement::FermionModes { modes, .. } => modes[step].len() as f64,
        }
    }

    fn build(&self, base: &ModelParams<T>, step: usize) -> Result<YukawaModel<T>> {
        let p = self.apply(base, step)?;
        match self {
            Refinement::FermionModes { modes, .. } => YukawaModel::build_on_modes(&p, modes[step].clone()),
            _ => YukawaModel::build(&p),
        }
    }

    fn apply(&self, base: &ModelParams<T>, step: usize) -> Result<ModelParams<T>> {
        let mut p = base.clone();
        match self {
            Refinement::BosonCap { values } => {
                p.truncation.per_mode = values[step];
                p.truncation.total = p.truncation.total.max(values[step]);
            }
            Refinement::FermionPoints { values } => {
                let (v, l) = match &base.fermion_lattice {
                    LatticeSpec::Box {
                        spacing_parameter,
                        box_half_width,
                    }
                    | LatticeSpec::Nearest {
                        spacing_parameter,
                        box_half_width,
                        ..
                    } => (*spacing_parameter, *box_half_width),
                    LatticeSpec::Explicit { .. } => {
                        return Err(Error::parameter(
                            "fermion_lattice",
                            "point-count refinement needs a box lattice to draw from",
                        ))
                    }
                };
                p.fermion_lattice = LatticeSpec::Nearest {
                    spacing_parameter: v,
                    box_half_width: l,
                    count: values[step],
                };
            }
            Refinement::FermionSpacing { box_half_width, values } => {
                p.fermion_lattice = LatticeSpec::Box {
                    spacing_parameter: values[step],
                    box_half_width: *box_half_width,
                };
            }
            Refinement::FermionLattices { lattices } => p.fermion_lattice = lattices[step].clone(),
            Refinement::FermionModes { lattice, .. } => p.fermion_lattice = lattice.clone(),
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ConvergenceRow<T> {
    pub parameter: f64,
    pub dimension: usize,
    pub ground_energy: T,
    pub gap: Option<T>,
    pub residual: T,
    /// `E_0` of this row minus that of the previous one.
    pub delta: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ConvergenceReport<T> {
    pub refinement: String,
    pub rows: Vec<ConvergenceRow<T>>,
    /// Every `delta ≤ tolerance`.
    pub ground_energy_non_increasing: bool,
    /// `|Δ_last| ≤ |Δ_previous|`; `None` with fewer than two deltas.
    pub tail_non_increasing: Option<bool>,
    pub note: String,
}

impl<T: Real> ConvergenceReport<T> {
    fn new(refinement: &Refinement<T>) -> Self {
        Self {
            refinement: refinement.name().to_string(),
            rows: Vec::new(),
            ground_energy_non_increasing: true,
            tail_non_increasing: None,
            note: "spectral comparison across refinements; diagnostic, not a proof".to_string(),
        }
    }

    fn push(&mut self, mut row: ConvergenceRow<T>, tol: T) {
        if let Some(prev) = self.rows.last() {
            let d = row.ground_energy - prev.ground_energy;
            row.delta = Some(d);
            if d > tol {
                self.ground_energy_non_increasing = false;
            }
        }
        self.rows.push(row);
        let deltas: Vec<T> = self.rows.iter().filter_map(|r| r.delta).collect();
        if deltas.len() >= 2 {
            let (a, b) = (deltas[deltas.len() - 2], deltas[deltas.len() - 1]);
            self.tail_non_increasing = Some(b.abs() <= a.abs() + tol);
        }
    }
}

/// A scan that stopped early, with the rows completed so far.
#[derive(Debug, Clone)]
pub struct ScanError<T> {
    pub error: Error,
    pub partial: ConvergenceReport<T>,
}

impl<T> fmt::Display for ScanError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl<T: fmt::Debug> std::error::Error for ScanError<T> {}

/// Ground energy and gap at every refinement step of `base`.
///
/// Monotonicity is judged with tolerance `max(tol, 1e−12)` on the ground
/// energies.
pub fn converge_scan<T: Real>(
    base: &ModelParams<T>,
    refinement: &Refinement<T>,
    settings: &SolverSettings<T>,
) -> std::result::Result<ConvergenceReport<T>, ScanError<T>> {
    let mut report = ConvergenceReport::new(refinement);
    if let Err(error) = refinement.validate() {
        return Err(ScanError { error, partial: report });
    }
    let tol = settings.tol.max(T::lit(1e-12));
    for step in 0..refinement.len() {
        let outcome = refinement.build(base, step).and_then(|model| {
            let h = model.hamiltonian()?;
            let r = lowest(&h, settings)?;
            Ok((h.dim(), r))
        });
        match outcome {
            Ok((dimension, r)) => report.push(
                ConvergenceRow {
                    parameter: refinement.parameter(step),
                    dimension,
                    ground_energy: r.ground_energy,
                    gap: r.gap,
                    residual: r.residuals[0],
                    delta: None,
                },
                tol,
            ),
            Err(error) => return Err(ScanError { error, partial: report }),
        }
    }
    Ok(report)
}
