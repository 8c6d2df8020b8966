//! Density matrices, entropies and quantum relative entropy.
//!
//! Matrices are dense `nalgebra` matrices over `Complex<f64>`. Every entropy
//! and divergence is reported in bits. Qubit states can also be handled as
//! Bloch vectors, with a closed-form relative entropy that avoids any
//! eigendecomposition.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type Complex64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Maximum allowed deviation from Hermiticity for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Maximum allowed deviation of the trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a density matrix.
pub const EIGEN_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as zero inside logarithms.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Weight of a state on a null direction above which the divergence is infinite.
pub const SUPPORT_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

/// Builds a matrix from row-major entries.
pub fn complex_matrix(rows: usize, cols: usize, entries: &[Complex64]) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 || entries.len() != rows * cols {
        return Err(Error::ShapeMismatch { rows, cols, found: entries.len() });
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(DMatrix::from_row_slice(rows, cols, entries))
}

/// Builds a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> Result<ComplexMatrix> {
    let e: Vec<Complex64> = entries.iter().map(|&x| c(x, 0.0)).collect();
    complex_matrix(rows, cols, &e)
}

pub fn identity(d: usize) -> ComplexMatrix {
    DMatrix::identity(d, d)
}

pub fn pauli_x() -> ComplexMatrix {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> ComplexMatrix {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> ComplexMatrix {
    DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn max_hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn real_trace(m: &ComplexMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Eigen decomposition of a Hermitian matrix; `vectors` holds eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix. Qubit matrices use the analytic Bloch form.
///
/// Only the lower triangle's Hermitian part matters; callers should pass a
/// Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Eigen {
    assert_eq!(m.nrows(), m.ncols(), "hermitian_eigen needs a square matrix");
    if m.nrows() == 2 {
        return qubit_eigen(m);
    }
    let h = hermitian_part(m);
    let se = nalgebra::SymmetricEigen::new(h);
    Eigen { values: se.eigenvalues.iter().copied().collect(), vectors: se.eigenvectors }
}

fn qubit_eigen(m: &ComplexMatrix) -> Eigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let off = (m[(1, 0)] + m[(0, 1)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let (x, y, z) = (off.re, off.im, 0.5 * (a - d));
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 {
        return Eigen { values: vec![mean, mean], vectors: identity(2) };
    }
    let theta = (x * x + y * y).sqrt().atan2(z);
    let phi = y.atan2(x);
    let (ch, sh) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let e = Complex::from_polar(1.0, phi);
    let vectors = DMatrix::from_row_slice(2, 2, &[c(ch, 0.0), -e.conj() * sh, e * sh, c(ch, 0.0)]);
    Eigen { values: vec![mean + r, mean - r], vectors }
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let e = hermitian_eigen(m);
    spectral_compose(&e, f)
}

fn spectral_compose(e: &Eigen, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = e.vectors.nrows();
    let mut scaled = e.vectors.clone();
    for (j, &lam) in e.values.iter().enumerate() {
        let fl = f(lam);
        for i in 0..n {
            scaled[(i, j)] *= fl;
        }
    }
    scaled * e.vectors.adjoint()
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        if m.nrows() == 0 {
            return Err(Error::Empty("density matrix"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = max_hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = real_trace(&m);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let h = hermitian_part(&m);
        let min = hermitian_eigen(&h).values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { m: h })
    }

    /// Wraps a matrix known to be a state up to rounding. Only the Hermitian part is kept.
    pub(crate) fn from_hermitian_unchecked(m: ComplexMatrix) -> Self {
        Self { m: hermitian_part(&m) }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { m: identity(d) * c(1.0 / d as f64, 0.0) }
    }

    /// The projector onto computational basis vector `i` of a `d`-level system.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::InvalidParameter(format!("basis index {i} out of range for dimension {d}")));
        }
        let mut m = DMatrix::zeros(d, d);
        m[(i, i)] = c(1.0, 0.0);
        Ok(Self { m })
    }

    /// The projector onto a (not necessarily normalized) state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidParameter("state vector must be nonzero and finite".into()));
        }
        let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|z| z / norm));
        Ok(Self::from_hermitian_unchecked(&v * v.adjoint()))
    }

    /// A diagonal state with the given probabilities.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        let d = p.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, &pi) in p.iter().enumerate() {
            m[(i, i)] = c(pi, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn eigen(&self) -> Eigen {
        hermitian_eigen(&self.m)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values
    }

    /// The convex combination `(1 - t)·self + t·other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("mixing weight {t} outside [0, 1]")));
        }
        Ok(Self { m: &self.m * c(1.0 - t, 0.0) + &other.m * c(t, 0.0) })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        real_trace(&self.m)
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A point of the closed unit ball parameterizing a qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    v: Vector3<f64>,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = v.norm();
        if n > 1.0 + 1e-12 {
            return Err(Error::OutsideBlochBall(n));
        }
        Ok(Self { v })
    }

    pub fn origin() -> Self {
        Self { v: Vector3::zeros() }
    }

    pub fn x(&self) -> f64 {
        self.v.x
    }
    pub fn y(&self) -> f64 {
        self.v.y
    }
    pub fn z(&self) -> f64 {
        self.v.z
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.v
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    /// Eigenvalues `(1 + |r|)/2` and `(1 - |r|)/2` of the associated state.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.norm().min(1.0);
        (0.5 * (1.0 + r), 0.5 * (1.0 - r))
    }
}

/// `ρ = (I + x·X + y·Y + z·Z)/2`.
pub fn bloch_to_density(r: &BlochVector) -> DensityMatrix {
    DensityMatrix::from_hermitian_unchecked(bloch_matrix(r.as_vector()))
}

pub(crate) fn bloch_matrix(v: &Vector3<f64>) -> ComplexMatrix {
    DMatrix::from_row_slice(
        2,
        2,
        &[c(0.5 * (1.0 + v.z), 0.0), c(0.5 * v.x, -0.5 * v.y), c(0.5 * v.x, 0.5 * v.y), c(0.5 * (1.0 - v.z), 0.0)],
    )
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    let v = bloch_coords(rho.matrix());
    let n = v.norm();
    // A validated state may overshoot the unit sphere by its eigenvalue tolerance.
    let v = if n > 1.0 { v / n } else { v };
    Ok(BlochVector { v })
}

pub(crate) fn bloch_coords(m: &ComplexMatrix) -> Vector3<f64> {
    let off = m[(1, 0)] + m[(0, 1)].conj();
    Vector3::new(off.re, off.im, m[(0, 0)].re - m[(1, 1)].re)
}

/// Shannon entropy in bits of a spectrum; nonpositive entries contribute 0.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum::<f64>().max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(h2(p))
}

pub(crate) fn h2(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    entropy_of_spectrum(&[p, 1.0 - p])
}

/// A reference state whose logarithm has been precomputed, for evaluating
/// many divergences `D(ρ‖σ)` against the same `σ`.
#[derive(Debug, Clone)]
pub struct PreparedCenter {
    vectors: ComplexMatrix,
    log_values: Vec<f64>,
    null: Vec<bool>,
}

impl PreparedCenter {
    pub fn new(sigma: &DensityMatrix) -> Self {
        let e = sigma.eigen();
        let null = e.values.iter().map(|&b| b < EIGEN_FLOOR).collect();
        let log_values = e.values.iter().map(|&b| b.max(EIGEN_FLOOR).log2()).collect();
        Self { vectors: e.vectors, log_values, null }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// `D(ρ‖σ)` in bits, or `+∞` when ρ has weight outside the support of σ.
    pub fn divergence(&self, rho: &DensityMatrix) -> Result<f64> {
        check_dims(self.dim(), rho.dim())?;
        Ok(self.divergence_given_entropy(rho, von_neumann_entropy(rho)))
    }

    pub(crate) fn divergence_given_entropy(&self, rho: &DensityMatrix, entropy: f64) -> f64 {
        let w = self.vectors.adjoint() * rho.matrix() * &self.vectors;
        let mut cross = 0.0;
        for j in 0..self.dim() {
            let pj = w[(j, j)].re;
            if self.null[j] && pj > SUPPORT_TOL {
                return f64::INFINITY;
            }
            cross += pj * self.log_values[j];
        }
        (-entropy - cross).max(0.0)
    }
}

/// Quantum relative entropy `Tr ρ(log₂ρ − log₂σ)`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    PreparedCenter::new(sigma).divergence(rho)
}

/// Relative entropy of two qubit states given as Bloch vectors, in closed form.
pub fn relative_entropy_bloch(rho: &BlochVector, sigma: &BlochVector) -> f64 {
    bloch_divergence(rho.as_vector(), sigma.as_vector())
}

/// Closed form of `D(ρ‖σ)` on Bloch vectors:
/// `−S(ρ) − ½log₂((1−s²)/4) − atanh(s)/(s·ln2)·⟨r, s⟩` with `s = |r_σ|`.
pub(crate) fn bloch_divergence(r: &Vector3<f64>, s: &Vector3<f64>) -> f64 {
    let rn = r.norm().min(1.0);
    let sn = s.norm().min(1.0);
    let neg_entropy = -h2(0.5 * (1.0 + rn));
    let lam_minus = 0.5 * (1.0 - sn);
    if lam_minus < EIGEN_FLOOR {
        // σ is numerically pure: fall back to the floored spectral form.
        let proj = if sn > 0.0 { r.dot(s) / sn } else { 0.0 };
        let p_minus = 0.5 * (1.0 - proj);
        if p_minus > SUPPORT_TOL {
            return f64::INFINITY;
        }
        let lam_plus = 0.5 * (1.0 + sn);
        let cross = (1.0 - p_minus) * lam_plus.log2() + p_minus * EIGEN_FLOOR.log2();
        return (neg_entropy - cross).max(0.0);
    }
    let a = 0.5 * ((1.0 - sn) * (1.0 + sn) / 4.0).log2();
    let coef = if sn < 1e-8 { 1.0 / LN_2 } else { sn.atanh() / (sn * LN_2) };
    (neg_entropy - a - coef * r.dot(s)).max(0.0)
}

/// Which factor of a bipartite system to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_hermitian_unchecked(kron(a.matrix(), b.matrix()))
}

/// Traces out one factor of a state on `C^{d_A} ⊗ C^{d_B}`.
pub fn partial_trace(rho: &DensityMatrix, trace_out: Subsystem, dims: (usize, usize)) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 {
        return Err(Error::InvalidParameter("factor dimensions must be positive".into()));
    }
    check_dims(da * db, rho.dim())?;
    let m = rho.matrix();
    let out = match trace_out {
        Subsystem::B => DMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Subsystem::A => DMatrix::from_fn(db, db, |k, l| (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()),
    };
    Ok(DensityMatrix::from_hermitian_unchecked(out))
}

fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    hermitian_function(m, |x| x.max(0.0).sqrt())
}

/// Squared Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let s = psd_sqrt(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let root_trace: f64 = hermitian_eigen(&hermitian_part(&inner)).values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// A finite ensemble `{pᵢ, ρᵢ}` of states on a common space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    entries: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let first = entries.first().ok_or(Error::Empty("ensemble"))?;
        let d = first.1.dim();
        let mut total = 0.0;
        for (p, s) in &entries {
            check_dims(d, s.dim())?;
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidParameter(format!("ensemble probability {p} outside [0, 1]")));
            }
            total += p;
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("ensemble probabilities sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    pub fn entries(&self) -> &[(f64, DensityMatrix)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    /// The average state `Σ pᵢ ρᵢ`.
    pub fn average(&self) -> DensityMatrix {
        let d = self.dim();
        let m =
            self.entries.iter().fold(DMatrix::zeros(d, d), |acc: ComplexMatrix, (p, s)| acc + s.matrix() * c(*p, 0.0));
        DensityMatrix::from_hermitian_unchecked(m)
    }

    /// Spectral decomposition of a state as an ensemble of its eigenprojectors.
    /// Eigenvalues below `EIGEN_FLOOR` are dropped and the rest renormalized.
    pub fn spectral(rho: &DensityMatrix) -> Self {
        let e = rho.eigen();
        let kept: Vec<(f64, usize)> =
            e.values.iter().copied().enumerate().filter(|(_, l)| *l > EIGEN_FLOOR).map(|(j, l)| (l, j)).collect();
        let total: f64 = kept.iter().map(|(l, _)| l).sum();
        let entries = kept
            .into_iter()
            .map(|(l, j)| {
                let v = e.vectors.column(j).into_owned();
                (l / total, DensityMatrix::from_hermitian_unchecked(&v * v.adjoint()))
            })
            .collect();
        Self { entries }
    }
}

/// Holevo quantity `S(Σpᵢρᵢ) − Σ pᵢ S(ρᵢ)`.
pub fn holevo_quantity(ens: &Ensemble) -> f64 {
    let avg = von_neumann_entropy(&ens.average());
    let mean: f64 = ens.entries.iter().map(|(p, s)| p * von_neumann_entropy(s)).sum();
    (avg - mean).max(0.0)
}

/// A Haar-random pure state of dimension `d`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let psi: Vec<Complex64> = (0..d).map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
    DensityMatrix::pure(&psi).expect("gaussian vector is nonzero")
}

/// A full-rank random state `GG†/Tr(GG†)` with `G` a complex Gaussian matrix.
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let m = &g * g.adjoint();
    let tr = real_trace(&m);
    DensityMatrix::from_hermitian_unchecked(m * c(1.0 / tr, 0.0))
}

/// A Bloch vector drawn uniformly from the ball of radius `max_radius`.
pub fn random_bloch_vector<R: Rng + ?Sized>(rng: &mut R, max_radius: f64) -> BlochVector {
    let dir: Vector3<f64> = Vector3::from_fn(|_, _| StandardNormal.sample(rng));
    let dir = dir / dir.norm().max(f64::MIN_POSITIVE);
    let r = max_radius.clamp(0.0, 1.0) * rng.random::<f64>().cbrt();
    BlochVector { v: dir * r }
}

/// `n` nearly uniform unit vectors on the sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            Vector3::new(rho * t.cos(), rho * t.sin(), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_eigen_reconstructs() {
        let m = bloch_matrix(&Vector3::new(0.3, -0.4, 0.5));
        let e = hermitian_eigen(&m);
        let back = spectral_compose(&e, |x| x);
        assert!((back - &m).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn qubit_eigen_near_south_pole() {
        let m = bloch_matrix(&Vector3::new(1e-9, 0.0, -0.999));
        let e = hermitian_eigen(&m);
        let back = spectral_compose(&e, |x| x);
        assert!((back - &m).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn rejects_bad_states() {
        assert!(matches!(
            DensityMatrix::new(real_matrix(2, 2, &[0.6, 0.0, 0.0, 0.6]).unwrap()),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::new(real_matrix(2, 2, &[1.2, 0.0, 0.0, -0.2]).unwrap()),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            DensityMatrix::new(real_matrix(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap()),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(binary_entropy(1.5), Err(Error::InvalidParameter(_))));
    }
}
