//! Bregman geometry: generators, smallest enclosing information balls,
//! a brute-force minimax oracle and Laguerre-lifted Delaunay structures.
//!
//! Balls are left-sided, `B(c, r) = {x : D(x‖c) ≤ r}`. For such balls the
//! optimal center is a mixture of the input points, so by default centers move
//! along straight segments in the primal coordinates. Moving through the
//! gradient coordinates is available with [`Chart::Gradient`].

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::qmath::{
    bloch_divergence, c, entropy_of_spectrum, h2, hermitian_eigen, hermitian_function, identity, ComplexMatrix,
    DensityMatrix, PreparedCenter, EIGEN_FLOOR,
};

/// Eigenvalue threshold below which points are mixed slightly toward `I/d`.
pub const NUDGE_THRESHOLD: f64 = 1e-9;

/// A strictly convex generator `F` and the Bregman divergence it induces.
///
/// Primal points and dual (gradient) coordinates share one representation.
pub trait Generator {
    type Point: Clone;

    fn value(&self, x: &Self::Point) -> f64;
    fn grad(&self, x: &Self::Point) -> Self::Point;
    fn grad_inv(&self, theta: &Self::Point) -> Self::Point;
    fn pairing(&self, x: &Self::Point, y: &Self::Point) -> f64;
    /// `a·x + b·y`.
    fn combine(&self, a: f64, x: &Self::Point, b: f64, y: &Self::Point) -> Self::Point;

    /// `D_F(x, y) = F(x) − F(y) − ⟨x − y, ∇F(y)⟩`.
    fn divergence(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        let diff = self.combine(1.0, x, -1.0, y);
        self.value(x) - self.value(y) - self.pairing(&diff, &self.grad(y))
    }

    /// Legendre conjugate `F*(θ) = ⟨x, θ⟩ − F(x)` at `x = ∇⁻¹F(θ)`.
    fn conjugate(&self, theta: &Self::Point) -> f64 {
        let x = self.grad_inv(theta);
        self.pairing(&x, theta) - self.value(&x)
    }

    /// Moves points off the boundary of the domain where `∇F` is singular.
    fn regularize(&self, x: &Self::Point) -> Self::Point {
        x.clone()
    }
}

pub fn bregman_div<G: Generator>(g: &G, x: &G::Point, y: &G::Point) -> f64 {
    g.divergence(x, y)
}

pub fn symmetric_div<G: Generator>(g: &G, x: &G::Point, y: &G::Point) -> f64 {
    0.5 * (g.divergence(x, y) + g.divergence(y, x))
}

/// `F(x) = ‖x‖²`, whose divergence is the squared Euclidean distance.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredEuclidean;

impl Generator for SquaredEuclidean {
    type Point = DVector<f64>;

    fn value(&self, x: &DVector<f64>) -> f64 {
        x.norm_squared()
    }
    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        x * 2.0
    }
    fn grad_inv(&self, theta: &DVector<f64>) -> DVector<f64> {
        theta * 0.5
    }
    fn pairing(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(y)
    }
    fn combine(&self, a: f64, x: &DVector<f64>, b: f64, y: &DVector<f64>) -> DVector<f64> {
        x * a + y * b
    }
    fn divergence(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x - y).norm_squared()
    }
}

/// Negative von Neumann entropy on qubit Bloch vectors, `F(r) = −H((1+|r|)/2)`.
/// Its divergence is the quantum relative entropy in bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlochEntropy;

impl Generator for BlochEntropy {
    type Point = Vector3<f64>;

    fn value(&self, r: &Vector3<f64>) -> f64 {
        -h2(0.5 * (1.0 + r.norm().min(1.0)))
    }
    fn grad(&self, r: &Vector3<f64>) -> Vector3<f64> {
        let n = r.norm();
        if n < 1e-300 {
            return Vector3::zeros();
        }
        let n_eff = n.min(1.0 - 1e-16);
        r * (n_eff.atanh() / (LN_2 * n))
    }
    fn grad_inv(&self, theta: &Vector3<f64>) -> Vector3<f64> {
        let t = theta.norm();
        if t < 1e-300 {
            return Vector3::zeros();
        }
        theta * ((t * LN_2).tanh() / t)
    }
    fn pairing(&self, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
        x.dot(y)
    }
    fn combine(&self, a: f64, x: &Vector3<f64>, b: f64, y: &Vector3<f64>) -> Vector3<f64> {
        x * a + y * b
    }
    fn divergence(&self, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
        bloch_divergence(x, y)
    }
    fn regularize(&self, r: &Vector3<f64>) -> Vector3<f64> {
        if 0.5 * (1.0 - r.norm()) < NUDGE_THRESHOLD {
            r * (1.0 - NUDGE_THRESHOLD)
        } else {
            *r
        }
    }
}

/// Negative von Neumann entropy `F(ρ) = Tr ρ log₂ρ` on Hermitian matrices.
/// `∇F = log₂ρ` and `∇⁻¹F(θ) = 2^θ / Tr 2^θ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NegVonNeumann;

impl Generator for NegVonNeumann {
    type Point = ComplexMatrix;

    fn value(&self, x: &ComplexMatrix) -> f64 {
        -entropy_of_spectrum(&hermitian_eigen(x).values)
    }
    fn grad(&self, x: &ComplexMatrix) -> ComplexMatrix {
        hermitian_function(x, |l| l.max(EIGEN_FLOOR).log2())
    }
    fn grad_inv(&self, theta: &ComplexMatrix) -> ComplexMatrix {
        let e = hermitian_eigen(theta);
        let top = e.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = hermitian_function(theta, |l| (l - top).exp2());
        let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
        m * c(1.0 / tr, 0.0)
    }
    fn pairing(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
        (x * y).trace().re
    }
    fn combine(&self, a: f64, x: &ComplexMatrix, b: f64, y: &ComplexMatrix) -> ComplexMatrix {
        x * c(a, 0.0) + y * c(b, 0.0)
    }
    fn divergence(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
        let rho = DensityMatrix::from_hermitian_unchecked(x.clone());
        let sigma = DensityMatrix::from_hermitian_unchecked(y.clone());
        PreparedCenter::new(&sigma).divergence(&rho).unwrap_or(f64::INFINITY)
    }
    fn regularize(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let d = x.nrows();
        let min = hermitian_eigen(x).values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < NUDGE_THRESHOLD {
            x * c(1.0 - NUDGE_THRESHOLD, 0.0) + identity(d) * c(NUDGE_THRESHOLD / d as f64, 0.0)
        } else {
            x.clone()
        }
    }
}

/// Points with optional weights and per-point ball radii.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub radii: Vec<f64>,
}

impl<P: Clone> WeightedPointSet<P> {
    pub fn new(points: Vec<P>) -> Self {
        let n = points.len();
        Self { points, weights: vec![1.0; n], radii: vec![0.0; n] }
    }

    pub fn with_radii(points: Vec<P>, radii: Vec<f64>) -> Result<Self> {
        let mut s = Self::new(points);
        s.radii = radii;
        s.validate()?;
        Ok(s)
    }

    pub fn with_weights(points: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        let mut s = Self::new(points);
        s.weights = weights;
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if self.weights.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.weights.len() });
        }
        if self.radii.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.radii.len() });
        }
        if self.weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("weights must be finite and nonnegative".into()));
        }
        if self.radii.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter("radii must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// A left-sided ball `{x : D(x‖center) ≤ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoBall<P> {
    pub center: P,
    pub radius: f64,
}

impl<P> InfoBall<P> {
    pub fn contains<G: Generator<Point = P>>(&self, g: &G, x: &P, tol: f64) -> bool {
        g.divergence(x, &self.center) <= self.radius + tol
    }
}

/// Coordinates in which the center moves toward the farthest point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Chart {
    /// Straight segments between states (mixtures).
    #[default]
    Primal,
    /// Straight segments between gradients, mapped back through `∇⁻¹F`.
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SebOptions {
    pub chart: Chart,
    /// Index of the initial center.
    pub start: usize,
    /// Iteration cap for the improved solver.
    pub max_iter: usize,
}

impl Default for SebOptions {
    fn default() -> Self {
        Self { chart: Chart::Primal, start: 0, max_iter: 100_000 }
    }
}

/// Certified enclosing-radius bracket recorded by [`seb_improved`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub r: f64,
    pub delta: f64,
    /// Best certified lower bound on the optimal radius.
    pub lower: f64,
    /// Best upper bound on the optimal radius (max divergence of a center).
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SebResult<P> {
    pub ball: InfoBall<P>,
    pub iterations: usize,
    /// Max divergence (plus ball radius) from the center at each iteration.
    pub trace: Vec<f64>,
    /// Certified lower bound on the optimal radius.
    pub lower_bound: f64,
    /// Mixture weights over the input points whose average is a certificate.
    pub weights: Vec<f64>,
    pub brackets: Vec<Bracket>,
}

impl<P> SebResult<P> {
    /// Smallest traced radius up to each iteration. The raw trace of the
    /// harmonic-step solver oscillates between competing farthest points, so
    /// this is the monotone diagnostic.
    pub fn running_best(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |best, &v| {
                *best = best.min(v);
                Some(*best)
            })
            .collect()
    }
}

fn farthest<G: Generator>(g: &G, pts: &[G::Point], radii: &[f64], center: &G::Point) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in pts.iter().enumerate() {
        let d = g.divergence(p, center) + radii[i];
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

fn mixture<G: Generator>(g: &G, pts: &[G::Point], q: &[f64]) -> G::Point {
    let mut acc: Option<G::Point> = None;
    for (p, &w) in pts.iter().zip(q) {
        if w == 0.0 {
            continue;
        }
        acc = Some(match acc {
            None => g.combine(w, p, 0.0, p),
            Some(a) => g.combine(1.0, &a, w, p),
        });
    }
    acc.unwrap_or_else(|| pts[0].clone())
}

/// `χ(q) = Σ qᵢ (D(sᵢ‖σ_q) + rᵢ)` with `σ_q = Σ qᵢ sᵢ`; never exceeds the optimal radius.
fn dual_value<G: Generator>(g: &G, pts: &[G::Point], radii: &[f64], q: &[f64]) -> f64 {
    let sigma = mixture(g, pts, q);
    pts.iter()
        .zip(q)
        .zip(radii)
        .filter(|((_, &w), _)| w > 0.0)
        .map(|((p, &w), &r)| w * (g.divergence(p, &sigma) + r))
        .sum()
}

fn prepare<G: Generator>(g: &G, set: &WeightedPointSet<G::Point>, eps: f64) -> Result<Vec<G::Point>> {
    if set.is_empty() {
        return Err(Error::Empty("point set"));
    }
    set.validate()?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} outside (0, 1)")));
    }
    Ok(set.points.iter().map(|p| g.regularize(p)).collect())
}

/// Core-set iteration with harmonic steps toward the farthest point.
///
/// Runs `⌈1/ε²⌉` iterations and returns the best center visited.
pub fn seb_basic<G: Generator>(
    g: &G,
    set: &WeightedPointSet<G::Point>,
    eps: f64,
    opts: &SebOptions,
) -> Result<SebResult<G::Point>> {
    let pts = prepare(g, set, eps)?;
    let n = pts.len();
    let radii = &set.radii;
    let start = opts.start.min(n - 1);
    let mut q = vec![0.0; n];
    q[start] = 1.0;
    let mut center = pts[start].clone();
    let iterations = (1.0 / (eps * eps)).ceil() as usize;
    let mut trace = Vec::with_capacity(iterations + 1);
    let mut best: Option<(f64, G::Point, Vec<f64>)> = None;

    for i in 1..=iterations + 1 {
        let (j, dmax) = farthest(g, &pts, radii, &center);
        trace.push(dmax);
        if best.as_ref().is_none_or(|b| dmax < b.0) {
            best = Some((dmax, center.clone(), q.clone()));
        }
        if i > iterations {
            break;
        }
        let (wa, wb) = (i as f64 / (i + 1) as f64, 1.0 / (i + 1) as f64);
        center = match opts.chart {
            Chart::Primal => g.combine(wa, &center, wb, &pts[j]),
            Chart::Gradient => g.grad_inv(&g.combine(wa, &g.grad(&center), wb, &g.grad(&pts[j]))),
        };
        q.iter_mut().for_each(|w| *w *= wa);
        q[j] += wb;
    }

    let (radius, center, best_q) = best.expect("at least one iteration");
    let lower_bound = dual_value(g, &pts, radii, &best_q).max(dual_value(g, &pts, radii, &q)).min(radius);
    Ok(SebResult {
        ball: InfoBall { center, radius },
        iterations,
        trace,
        lower_bound,
        weights: best_q,
        brackets: Vec::new(),
    })
}

/// Smallest ball enclosing balls `B(sᵢ, rᵢ)`: the farthest ball maximizes `D(sᵢ‖c) + rᵢ`.
pub fn seb_of_balls<G: Generator>(
    g: &G,
    set: &WeightedPointSet<G::Point>,
    eps: f64,
    opts: &SebOptions,
) -> Result<SebResult<G::Point>> {
    seb_basic(g, set, eps, opts)
}

fn golden_max(f: impl Fn(f64) -> f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    // Endpoints matter when the optimum sits on the boundary.
    [0.0, mid, 1.0].into_iter().max_by(|&s, &t| f(s).total_cmp(&f(t))).unwrap_or(mid)
}

/// Bracketing core-set solver.
///
/// Each move slides the center along the segment toward the farthest point to
/// the position that maximizes the certified lower bound. A bracket
/// `r ≤ r* ≤ r + δ` is maintained with `δ` shrinking by 3/4 whenever either
/// bound certifies it, until `δ ≤ ε`. Centers always move in the primal chart.
pub fn seb_improved<G: Generator>(
    g: &G,
    set: &WeightedPointSet<G::Point>,
    eps: f64,
    opts: &SebOptions,
) -> Result<SebResult<G::Point>> {
    let pts = prepare(g, set, eps)?;
    let n = pts.len();
    let radii = &set.radii;
    let start = opts.start.min(n - 1);
    let mut q = vec![0.0; n];
    q[start] = 1.0;
    let mut center = pts[start].clone();
    let (mut j, mut upper) = farthest(g, &pts, radii, &center);
    let mut lower = dual_value(g, &pts, radii, &q).min(upper);
    let mut best = (upper, center.clone(), q.clone());
    let mut r = lower;
    let mut delta = upper - lower;
    let mut brackets = vec![Bracket { r, delta, lower, upper }];
    let mut trace = vec![upper];
    let mut iterations = 0;

    while delta > eps && iterations < opts.max_iter {
        iterations += 1;
        let eval = |t: f64| {
            let qt: Vec<f64> =
                q.iter().enumerate().map(|(i, &w)| (1.0 - t) * w + if i == j { t } else { 0.0 }).collect();
            dual_value(g, &pts, radii, &qt)
        };
        let t = golden_max(eval);
        q.iter_mut().for_each(|w| *w *= 1.0 - t);
        q[j] += t;
        center = mixture(g, &pts, &q);
        let (jn, dmax) = farthest(g, &pts, radii, &center);
        j = jn;
        trace.push(dmax);
        if dmax < upper {
            upper = dmax;
            best = (dmax, center.clone(), q.clone());
        }
        lower = lower.max(dual_value(g, &pts, radii, &q)).min(upper);
        if upper <= r + 0.75 * delta {
            delta *= 0.75;
        } else if lower >= r + 0.25 * delta {
            r += 0.25 * delta;
            delta *= 0.75;
        }
        brackets.push(Bracket { r, delta, lower, upper });
    }

    let (radius, center, weights) = best;
    Ok(SebResult { ball: InfoBall { center, radius }, iterations, trace, lower_bound: lower, weights, brackets })
}

/// Options for [`minimax_center_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Grid points per axis over `[-1, 1]`.
    pub resolution: usize,
    /// Local refinement rounds around the incumbent, each 5 times finer.
    pub refinements: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { resolution: 61, refinements: 2 }
    }
}

/// Brute-force `argmin_c max_i D(sᵢ‖c) + rᵢ` over a grid of the Bloch ball.
/// The input points themselves are also tried as centers.
pub fn minimax_center_oracle(
    points: &[Vector3<f64>],
    radii: &[f64],
    opts: &OracleOptions,
) -> Result<(Vector3<f64>, f64)> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    if radii.len() != points.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: radii.len() });
    }
    if opts.resolution < 2 {
        return Err(Error::InvalidParameter("oracle resolution must be at least 2".into()));
    }
    let cost = |cand: &Vector3<f64>| {
        points.iter().zip(radii).map(|(p, r)| bloch_divergence(p, cand) + r).fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = (Vector3::zeros(), f64::INFINITY);
    let consider = |best: &mut (Vector3<f64>, f64), cand: Vector3<f64>| {
        if cand.norm() <= 1.0 {
            let v = cost(&cand);
            if v < best.1 {
                *best = (cand, v);
            }
        }
    };
    for p in points {
        consider(&mut best, *p);
    }
    let res = opts.resolution;
    let mut h = 2.0 / (res - 1) as f64;
    for i in 0..res {
        for j in 0..res {
            for k in 0..res {
                consider(&mut best, Vector3::new(-1.0 + i as f64 * h, -1.0 + j as f64 * h, -1.0 + k as f64 * h));
            }
        }
    }
    const SUB: usize = 21;
    for _ in 0..opts.refinements {
        let base = best.0 - Vector3::repeat(2.0 * h);
        let step = 4.0 * h / (SUB - 1) as f64;
        for i in 0..SUB {
            for j in 0..SUB {
                for k in 0..SUB {
                    consider(&mut best, base + Vector3::new(i as f64, j as f64, k as f64) * step);
                }
            }
        }
        h = step;
    }
    Ok(best)
}

/// A lifted sphere of a power (Laguerre) diagram. `radius_sq` may be negative,
/// which corresponds to an imaginary radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSphere {
    pub center: Vector3<f64>,
    pub radius_sq: f64,
}

impl PowerSphere {
    pub fn power(&self, x: &Vector3<f64>) -> f64 {
        (x - self.center).norm_squared() - self.radius_sq
    }
}

fn check_liftable(points: &[Vector3<f64>]) -> Result<()> {
    if let Some(p) = points.iter().find(|p| 1.0 - p.norm() < 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "point with Bloch radius {} lies on the divergence singularity",
            p.norm()
        )));
    }
    Ok(())
}

/// Lifts qubit states to spheres with center `θᵢ = ∇F(ρᵢ)` and squared radius
/// `‖θᵢ‖² − 2F*(θᵢ)`, so the power of `x` equals `‖x‖² + 2(D(x‖ρᵢ) − F(x))`.
pub fn laguerre_lift(points: &[Vector3<f64>]) -> Result<Vec<PowerSphere>> {
    check_liftable(points)?;
    let g = BlochEntropy;
    Ok(points
        .iter()
        .map(|p| {
            let theta = g.grad(p);
            let conj = p.dot(&theta) - g.value(p);
            PowerSphere { center: theta, radius_sq: theta.norm_squared() - 2.0 * conj }
        })
        .collect())
}

/// A Delaunay simplex and its empty Bregman ball.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaunaySimplex {
    pub vertices: Vec<usize>,
    /// The point `x` equidistant (in `D(x‖·)`) from all vertices.
    pub dual_point: Vector3<f64>,
    /// Common value of `D(x‖ρᵢ) − F(x)` over the vertices.
    pub affine_value: f64,
    /// `D(x‖ρᵢ)` for the vertices, when `x` lies inside the Bloch ball.
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delaunay {
    pub simplices: Vec<DelaunaySimplex>,
    /// Affine dimension of the lifted point set.
    pub dimension: usize,
    /// False when some other point lies on a simplex's ball boundary.
    pub unique: bool,
}

/// Largest point set accepted by [`bregman_delaunay`].
pub const DELAUNAY_MAX_POINTS: usize = 50;

/// Bregman Delaunay triangulation of qubit states by brute-force enumeration
/// of lower faces of the lifted points `(θᵢ, 2F*(θᵢ))`.
pub fn bregman_delaunay(points: &[Vector3<f64>]) -> Result<Delaunay> {
    check_liftable(points)?;
    let n = points.len();
    if n == 0 {
        return Err(Error::Empty("point set"));
    }
    if n > DELAUNAY_MAX_POINTS {
        return Err(Error::ResourceCap { limit: DELAUNAY_MAX_POINTS, requested: n });
    }
    let spheres = laguerre_lift(points)?;
    let thetas: Vec<Vector3<f64>> = spheres.iter().map(|s| s.center).collect();
    let heights: Vec<f64> = spheres.iter().map(|s| s.center.norm_squared() - s.radius_sq).collect();
    let basis = affine_basis(&thetas);
    let k = basis.len();
    let local: Vec<DVector<f64>> =
        thetas.iter().map(|t| DVector::from_iterator(k, basis.iter().map(|b| b.dot(&(t - thetas[0]))))).collect();
    let scale = heights.iter().fold(1.0f64, |m, h| m.max(h.abs()));
    let tol = 1e-9 * scale;

    let mut simplices = Vec::new();
    let mut unique = true;
    for subset in combinations(n, k + 1) {
        let mut sys = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (row, &i) in subset.iter().enumerate() {
            for col in 0..k {
                sys[(row, col)] = local[i][col];
            }
            sys[(row, k)] = 1.0;
            rhs[row] = heights[i];
        }
        let Some(sol) = sys.clone().lu().solve(&rhs) else { continue };
        if (&sys * &sol - &rhs).amax() > tol || !sol.iter().all(|v| v.is_finite()) {
            continue;
        }
        let slope: Vector3<f64> = basis.iter().enumerate().fold(Vector3::zeros(), |acc, (col, b)| acc + b * sol[col]);
        let offset = sol[k] - slope.dot(&thetas[0]);
        let mut empty = true;
        let mut tie = false;
        for j in (0..n).filter(|j| !subset.contains(j)) {
            let gap = heights[j] - slope.dot(&thetas[j]) - offset;
            if gap < -tol {
                empty = false;
                break;
            }
            tie |= gap <= tol;
        }
        if !empty {
            continue;
        }
        unique &= !tie;
        let x = slope * 0.5;
        let affine_value = 0.5 * offset;
        let radius = (x.norm() < 1.0).then(|| BlochEntropy.value(&x) + affine_value);
        simplices.push(DelaunaySimplex { vertices: subset, dual_point: x, affine_value, radius });
    }
    Ok(Delaunay { simplices, dimension: k, unique })
}

fn affine_basis(pts: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let scale = pts.iter().map(|p| (p - pts[0]).norm()).fold(0.0, f64::max).max(1.0);
    let mut basis: Vec<Vector3<f64>> = Vec::new();
    for p in pts {
        let mut v = p - pts[0];
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-9 * scale && basis.len() < 3 {
            basis.push(v.normalize());
        }
    }
    basis
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
