//! Zero-error communication: adjacency of channel inputs, confusability
//! graphs, exact independent-set search, and the k-median clustering
//! pipeline over μ-similar state domains.
//!
//! All rates are lower bounds over the supplied candidate inputs.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{classical_channel, KrausChannel};
use crate::error::{Error, Result};
use crate::qmath::{c, check_dims, von_neumann_entropy, ComplexMatrix, DensityMatrix, PreparedCenter};

/// Default overlap below which two outputs count as orthogonal.
pub const ADJACENCY_TOL: f64 = 1e-9;

/// Largest confusability graph that will be built or searched.
pub const MAX_VERTICES: usize = 10_000;

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    // Tr(AB) for Hermitian A, B.
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// `Tr(N(ρ_i)·N(ρ_j))`.
pub fn output_overlap(ch: &KrausChannel, rho_i: &DensityMatrix, rho_j: &DensityMatrix) -> Result<f64> {
    check_dims(ch.in_dim(), rho_i.dim())?;
    check_dims(ch.in_dim(), rho_j.dim())?;
    let a = ch.apply_operator(rho_i.matrix());
    let b = ch.apply_operator(rho_j.matrix());
    Ok(trace_product(&a, &b))
}

/// Whether the two inputs produce orthogonal outputs, i.e. can be told apart
/// with certainty after one use.
pub fn non_adjacent(ch: &KrausChannel, rho_i: &DensityMatrix, rho_j: &DensityMatrix, tol: f64) -> Result<bool> {
    Ok(output_overlap(ch, rho_i, rho_j)? <= tol)
}

/// A sequence of per-use input states.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    symbols: Vec<DensityMatrix>,
}

impl Codeword {
    pub fn new(symbols: Vec<DensityMatrix>) -> Result<Self> {
        let first = symbols.first().ok_or(Error::Empty("codeword symbols"))?;
        for s in &symbols {
            check_dims(first.dim(), s.dim())?;
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[DensityMatrix] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Per-position overlaps `Tr(N(ρ_{1,i})N(ρ_{2,i}))`. Their product is the
/// overlap of the two codewords through the n-fold product channel.
pub fn codeword_overlaps(ch: &KrausChannel, w1: &Codeword, w2: &Codeword) -> Result<Vec<f64>> {
    if w1.len() != w2.len() {
        return Err(Error::InvalidParameter(format!("codeword lengths differ: {} vs {}", w1.len(), w2.len())));
    }
    w1.symbols.iter().zip(&w2.symbols).map(|(a, b)| output_overlap(ch, a, b)).collect()
}

/// Two codewords are distinguishable when at least one position is.
pub fn codewords_non_adjacent(ch: &KrausChannel, w1: &Codeword, w2: &Codeword, tol: f64) -> Result<bool> {
    Ok(codeword_overlaps(ch, w1, w2)?.iter().any(|&o| o <= tol))
}

/// Square bit matrix used for adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self { n, words, bits: vec![0; n * words] }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn degree(&self, i: usize) -> usize {
        self.bits[i * self.words..(i + 1) * self.words].iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Undirected simple graph whose edges join confusable codewords.
///
/// Vertices built from `n` uses of `q` inputs are the tuples of input indices
/// in base-`q` order, first position most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusabilityGraph {
    adj: BitMatrix,
    input_count: usize,
    n_uses: usize,
}

impl ConfusabilityGraph {
    /// A graph with explicit edges, treated as one use of `vertex_count` inputs.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count > MAX_VERTICES {
            return Err(Error::ResourceCap { limit: MAX_VERTICES, requested: vertex_count });
        }
        let mut adj = BitMatrix::new(vertex_count);
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            adj.set(u, v);
            adj.set(v, u);
        }
        Ok(Self { adj, input_count: vertex_count, n_uses: 1 })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.n
    }

    pub fn n_uses(&self) -> usize {
        self.n_uses
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.degree(v)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        (0..n).flat_map(|u| (u + 1..n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v))).collect()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Input indices of the codeword behind vertex `v`.
    pub fn codeword(&self, v: usize) -> Vec<usize> {
        let mut digits = vec![0; self.n_uses];
        let mut rest = v;
        for d in digits.iter_mut().rev() {
            *d = rest % self.input_count;
            rest /= self.input_count;
        }
        digits
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    /// Plain-text DOT rendering.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for v in 0..self.vertex_count() {
            let label: Vec<String> = self.codeword(v).iter().map(usize::to_string).collect();
            let _ = writeln!(out, "  {v} [label=\"{}\"];", label.join(","));
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

fn vertex_total(input_count: usize, n_uses: usize) -> Result<usize> {
    let requested = u32::try_from(n_uses).ok().and_then(|n| input_count.checked_pow(n)).unwrap_or(usize::MAX);
    if requested > MAX_VERTICES {
        return Err(Error::ResourceCap { limit: MAX_VERTICES, requested });
    }
    Ok(requested)
}

/// Confusability graph of all `n_uses`-tuples of `inputs`.
pub fn build_confusability_graph(
    ch: &KrausChannel,
    inputs: &[DensityMatrix],
    n_uses: usize,
    tol: f64,
) -> Result<ConfusabilityGraph> {
    if inputs.is_empty() {
        return Err(Error::Empty("input states"));
    }
    if n_uses == 0 {
        return Err(Error::InvalidParameter("n_uses must be at least 1".into()));
    }
    let q = inputs.len();
    let total = vertex_total(q, n_uses)?;
    let outputs = inputs
        .iter()
        .map(|rho| {
            check_dims(ch.in_dim(), rho.dim())?;
            Ok(ch.apply_operator(rho.matrix()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut confusable = vec![false; q * q];
    for i in 0..q {
        for j in 0..q {
            confusable[i * q + j] = trace_product(&outputs[i], &outputs[j]) > tol;
        }
    }
    let mut g = ConfusabilityGraph { adj: BitMatrix::new(total), input_count: q, n_uses };
    let words: Vec<Vec<usize>> = (0..total).map(|v| g.codeword(v)).collect();
    for u in 0..total {
        for v in u + 1..total {
            if words[u].iter().zip(&words[v]).all(|(&a, &b)| confusable[a * q + b]) {
                g.adj.set(u, v);
                g.adj.set(v, u);
            }
        }
    }
    Ok(g)
}

/// Exact maximum independent set. Returns `(K, witness)` with the witness
/// sorted ascending.
pub fn max_independent_set(g: &ConfusabilityGraph) -> Result<(usize, Vec<usize>)> {
    let n = g.vertex_count();
    if n > MAX_VERTICES {
        return Err(Error::ResourceCap { limit: MAX_VERTICES, requested: n });
    }
    // Isolated vertices belong to every maximum independent set.
    let (isolated, rest): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| g.degree(v) == 0);
    let mut best = Vec::new();
    if !rest.is_empty() {
        // Maximum clique in the complement, restricted to `rest`.
        let mut order = rest.clone();
        order.sort_by_key(|&v| (std::cmp::Reverse(rest.len() - 1 - g.degree(v)), v));
        let mut current = Vec::new();
        expand(g, &mut current, order, &mut best);
    }
    let mut witness: Vec<usize> = isolated.into_iter().chain(best).collect();
    witness.sort_unstable();
    Ok((witness.len(), witness))
}

fn compatible(g: &ConfusabilityGraph, u: usize, v: usize) -> bool {
    u != v && !g.has_edge(u, v)
}

/// Greedy colouring of the complement; returns vertices ordered by colour and
/// the colour count bound for each prefix.
fn colour_sort(g: &ConfusabilityGraph, p: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in p {
        match classes.iter_mut().find(|cls| cls.iter().all(|&u| !compatible(g, u, v))) {
            Some(cls) => cls.push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut order = Vec::with_capacity(p.len());
    let mut bound = Vec::with_capacity(p.len());
    for (k, cls) in classes.iter().enumerate() {
        for &v in cls {
            order.push(v);
            bound.push(k + 1);
        }
    }
    (order, bound)
}

fn expand(g: &ConfusabilityGraph, current: &mut Vec<usize>, p: Vec<usize>, best: &mut Vec<usize>) {
    let (order, bound) = colour_sort(g, &p);
    for idx in (0..order.len()).rev() {
        if current.len() + bound[idx] <= best.len() {
            return;
        }
        let v = order[idx];
        current.push(v);
        let next: Vec<usize> = order[..idx].iter().copied().filter(|&u| compatible(g, u, v)).collect();
        if next.is_empty() {
            if current.len() > best.len() {
                best.clone_from(current);
            }
        } else {
            expand(g, current, next, best);
        }
        current.pop();
    }
}

/// Outcome of a zero-error code search.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroErrorResult {
    /// Number of pairwise distinguishable codewords found.
    pub k: usize,
    pub rate_bits: f64,
    /// Vertex indices of the code.
    pub witness: Vec<usize>,
    /// Input indices of each witness codeword.
    pub codewords: Vec<Vec<usize>>,
    pub n_uses: usize,
    /// Whether the rate counts two qubits per use (entangled-pair inputs).
    pub normalized: bool,
}

/// `(1/n)·log₂K` over the supplied inputs, halved when each input is an
/// entangled pair.
pub fn zero_error_rate(
    ch: &KrausChannel,
    inputs: &[DensityMatrix],
    n_uses: usize,
    epr_normalized: bool,
) -> Result<ZeroErrorResult> {
    let g = build_confusability_graph(ch, inputs, n_uses, ADJACENCY_TOL)?;
    let (k, witness) = max_independent_set(&g)?;
    let codewords: Vec<Vec<usize>> = witness.iter().map(|&v| g.codeword(v)).collect();
    let words = codewords
        .iter()
        .map(|cw| Codeword::new(cw.iter().map(|&i| inputs[i].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            if !codewords_non_adjacent(ch, a, b, ADJACENCY_TOL)? {
                return Err(Error::InvalidParameter("independent set failed re-verification".into()));
            }
        }
    }
    let mut rate_bits = (k as f64).log2() / n_uses as f64;
    if epr_normalized {
        rate_bits *= 0.5;
    }
    Ok(ZeroErrorResult { k, rate_bits, witness, codewords, n_uses, normalized: epr_normalized })
}

/// Five-symbol classical channel where symbol `i` is received as `i` or
/// `i + 1 (mod 5)` with equal probability. Its confusability graph is the
/// 5-cycle.
pub fn pentagon_channel() -> KrausChannel {
    let transition: Vec<Vec<f64>> =
        (0..5).map(|i| (0..5).map(|j| if j == i || j == (i + 1) % 5 { 0.5 } else { 0.0 }).collect()).collect();
    classical_channel(&transition).expect("cyclic transition matrix is stochastic")
}

/// Computational basis states of dimension `d`.
pub fn basis_inputs(d: usize) -> Vec<DensityMatrix> {
    (0..d).map(|i| DensityMatrix::basis(d, i).expect("index in range")).collect()
}

/// The Bell states `|β00⟩ = (|00⟩+|11⟩)/√2` and `|β01⟩ = (|01⟩+|10⟩)/√2`.
pub fn epr_inputs() -> [DensityMatrix; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let a = c(h, 0.0);
    [DensityMatrix::pure(&[a, z, z, a]).expect("normalized"), DensityMatrix::pure(&[z, a, a, z]).expect("normalized")]
}

// ---------------------------------------------------------------------------
// μ-similar domains

/// Diagonal states whose eigenvalues all lie in `[λ, γ]`. On such states
/// `μ·D_A ≤ D ≤ D_A` in nats, with `D_A(x, y) = (x−y)ᵀ(I/2λ)(x−y)` and
/// `μ = λ/γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSimilarDomain {
    lambda: f64,
    gamma: f64,
    dim: usize,
}

const DOMAIN_TOL: f64 = 1e-9;

impl MuSimilarDomain {
    /// Picks the smallest dimension whose simplex meets the box in more than
    /// one point, or in exactly one point when no such dimension exists.
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= gamma && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("need 0 < λ <= γ <= 1, got λ={lambda}, γ={gamma}")));
        }
        let fits = |d: usize| d as f64 * lambda <= 1.0 + 1e-12 && d as f64 * gamma >= 1.0 - 1e-12;
        let strict = |d: usize| (d as f64 * lambda) < 1.0 - 1e-12 && d as f64 * gamma > 1.0 + 1e-12;
        let max_d = (1.0 / lambda).floor() as usize;
        let dim = (2..=max_d.max(2))
            .find(|&d| strict(d))
            .or_else(|| (1..=max_d.max(1)).find(|&d| fits(d)))
            .ok_or_else(|| Error::InvalidParameter(format!("no state has all eigenvalues in [{lambda}, {gamma}]")))?;
        Ok(Self { lambda, gamma, dim })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.lambda / self.gamma
    }

    /// Diagonal entry of the scale matrix `A = I/(2λ)`.
    pub fn scale(&self) -> f64 {
        0.5 / self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues of a diagonal state inside the domain.
    pub fn spectrum(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        check_dims(self.dim, rho.dim())?;
        let m = rho.matrix();
        let off = (0..self.dim)
            .flat_map(|i| (0..self.dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm())
            .fold(0.0, f64::max);
        if off > DOMAIN_TOL {
            return Err(Error::InvalidParameter(format!("state is not diagonal (off-diagonal {off:e})")));
        }
        let diag: Vec<f64> = (0..self.dim).map(|i| m[(i, i)].re).collect();
        if let Some(x) = diag.iter().find(|&&x| x < self.lambda - DOMAIN_TOL || x > self.gamma + DOMAIN_TOL) {
            return Err(Error::InvalidParameter(format!("eigenvalue {x} outside [{}, {}]", self.lambda, self.gamma)));
        }
        Ok(diag)
    }

    pub fn contains(&self, rho: &DensityMatrix) -> bool {
        self.spectrum(rho).is_ok()
    }

    /// Uniform sample from the domain by rejection.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DensityMatrix> {
        let d = self.dim as f64;
        if (d * self.lambda - 1.0).abs() < 1e-12 || (d * self.gamma - 1.0).abs() < 1e-12 {
            return Ok(DensityMatrix::maximally_mixed(self.dim));
        }
        for _ in 0..1_000_000 {
            let mut p: Vec<f64> = (1..self.dim).map(|_| rng.random_range(self.lambda..=self.gamma)).collect();
            let last = 1.0 - p.iter().sum::<f64>();
            if last >= self.lambda && last <= self.gamma {
                p.push(last);
                return DensityMatrix::diagonal(&p);
            }
        }
        Err(Error::InvalidParameter("domain sampling did not succeed".into()))
    }
}

/// Result of a μ-similarity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSimilarReport {
    pub holds: bool,
    /// Largest amount by which either inequality fails, zero if none does.
    pub max_violation: f64,
    /// Smallest margin over both inequalities and all pairs.
    pub min_slack: f64,
    pub pairs: usize,
}

fn kl_nats(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).filter(|(&a, _)| a > 0.0).map(|(&a, &b)| a * (a / b).ln()).sum()
}

/// Checks `μ·D_A(ρ‖σ) ≤ D(ρ‖σ) ≤ D_A(ρ‖σ)` on every pair.
pub fn mu_similar_check(dom: &MuSimilarDomain, samples: &[(DensityMatrix, DensityMatrix)]) -> Result<MuSimilarReport> {
    let mut max_violation: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    for (rho, sigma) in samples {
        let x = dom.spectrum(rho)?;
        let y = dom.spectrum(sigma)?;
        let d = kl_nats(&x, &y);
        let da: f64 = dom.scale() * x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let lower = d - dom.mu() * da;
        let upper = da - d;
        min_slack = min_slack.min(lower.min(upper));
        max_violation = max_violation.max(-lower).max(-upper);
    }
    Ok(MuSimilarReport { holds: max_violation <= 1e-12, max_violation, min_slack, pairs: samples.len() })
}

// ---------------------------------------------------------------------------
// k-median clustering

fn divergences_to(points: &[DensityMatrix], entropies: &[f64], centers: &[DensityMatrix]) -> Result<Vec<f64>> {
    let prepared: Vec<PreparedCenter> = centers.iter().map(PreparedCenter::new).collect();
    points
        .iter()
        .zip(entropies)
        .map(|(p, &s)| {
            let mut best = f64::INFINITY;
            for c in &prepared {
                check_dims(c.dim(), p.dim())?;
                best = best.min(c.divergence_given_entropy(p, s));
            }
            Ok(best)
        })
        .collect()
}

fn entropies(points: &[DensityMatrix]) -> Vec<f64> {
    points.iter().map(von_neumann_entropy).collect()
}

/// `D(ρ‖C) = min over σ ∈ C of D(ρ‖σ)` for every point, in bits.
pub fn nearest_divergences(points: &[DensityMatrix], centers: &[DensityMatrix]) -> Result<Vec<f64>> {
    if centers.is_empty() {
        return Err(Error::Empty("centers"));
    }
    divergences_to(points, &entropies(points), centers)
}

/// `Σ_ρ min_σ D(ρ‖σ)`.
pub fn kmedian_error(s_in: &[DensityMatrix], s_out: &[DensityMatrix]) -> Result<f64> {
    if s_in.is_empty() {
        return Err(Error::Empty("input points"));
    }
    Ok(nearest_divergences(s_in, s_out)?.iter().sum())
}

/// `Σ_ρ w(ρ)·min_σ D(ρ‖σ)`.
pub fn weighted_kmedian_error(points: &[DensityMatrix], weights: &[f64], centers: &[DensityMatrix]) -> Result<f64> {
    check_weights(points, weights)?;
    Ok(nearest_divergences(points, centers)?.iter().zip(weights).map(|(d, w)| d * w).sum())
}

fn check_weights(points: &[DensityMatrix], weights: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Empty("input points"));
    }
    if weights.len() != points.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: weights.len() });
    }
    if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter("weights must be finite and non-negative".into()));
    }
    Ok(())
}

/// Medians chosen by divergence-proportional seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct Bicriteria {
    pub indices: Vec<usize>,
    pub medians: Vec<DensityMatrix>,
    pub error: f64,
}

/// Seeds `k` medians: the first uniformly, each further one with probability
/// proportional to its divergence from the medians chosen so far.
pub fn bicriteria_kmedian(s_in: &[DensityMatrix], k: usize, seed: u64) -> Result<Bicriteria> {
    if k == 0 || k > s_in.len() {
        return Err(Error::InvalidParameter(format!("k = {k} must be in 1..={}", s_in.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ent = entropies(s_in);
    let mut indices = vec![rng.random_range(0..s_in.len())];
    let mut dist = divergences_to(s_in, &ent, &[s_in[indices[0]].clone()])?;
    while indices.len() < k {
        let unchosen: Vec<usize> = (0..s_in.len()).filter(|i| !indices.contains(i)).collect();
        let infinite: Vec<usize> = unchosen.iter().copied().filter(|&i| dist[i].is_infinite()).collect();
        let total: f64 = unchosen.iter().map(|&i| dist[i]).sum();
        let next = if !infinite.is_empty() {
            infinite[rng.random_range(0..infinite.len())]
        } else if total <= 0.0 {
            unchosen[rng.random_range(0..unchosen.len())]
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut pick = *unchosen.last().expect("k <= n leaves a candidate");
            for &i in &unchosen {
                if dist[i] > 0.0 && target < dist[i] {
                    pick = i;
                    break;
                }
                target -= dist[i];
            }
            pick
        };
        indices.push(next);
        let d_new = divergences_to(s_in, &ent, &[s_in[next].clone()])?;
        for (d, n) in dist.iter_mut().zip(d_new) {
            *d = d.min(n);
        }
    }
    let medians: Vec<DensityMatrix> = indices.iter().map(|&i| s_in[i].clone()).collect();
    Ok(Bicriteria { error: dist.iter().sum(), indices, medians })
}

/// Parameters of the weak core-set construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoresetOptions {
    pub epsilon: f64,
    pub delta: f64,
    /// Approximation factor of the medians; defaults to `8(ln k + 2)`.
    pub alpha: Option<f64>,
    pub beta: f64,
    /// Samples per ring; defaults to the bound derived from the other fields.
    pub sample_size: Option<usize>,
    pub seed: u64,
}

impl Default for CoresetOptions {
    fn default() -> Self {
        Self { epsilon: 0.2, delta: 0.05, alpha: None, beta: 1.0, sample_size: None, seed: 42 }
    }
}

impl CoresetOptions {
    pub fn alpha_for(&self, k: usize) -> f64 {
        self.alpha.unwrap_or(8.0 * ((k as f64).ln() + 2.0))
    }

    /// `⌈(α²/ε²)·ln((β/δ)·k·n^k·log₂(αn))⌉`, with the candidate set taken as
    /// the input points.
    pub fn default_sample_size(&self, n: usize, k: usize) -> usize {
        let alpha = self.alpha_for(k);
        let nf = n as f64;
        let log_term =
            (self.beta / self.delta).ln() + (k as f64).ln() + k as f64 * nf.ln() + (alpha * nf).log2().max(1.0).ln();
        (alpha * alpha / (self.epsilon * self.epsilon) * log_term.max(1.0)).ceil() as usize
    }
}

/// A weighted subset standing in for the full input set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakCoreset {
    pub points: Vec<DensityMatrix>,
    /// Integer-valued weights summing to the input size.
    pub weights: Vec<f64>,
    /// Input index of each point.
    pub source: Vec<usize>,
    pub sample_size: usize,
    /// Number of distance rings per cluster, excluding the innermost ball.
    pub rings: usize,
    /// True when the sample size reached the input size and the input was
    /// returned unchanged.
    pub exact: bool,
}

impl WeakCoreset {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn error(&self, centers: &[DensityMatrix]) -> Result<f64> {
        weighted_kmedian_error(&self.points, &self.weights, centers)
    }
}

/// Weak core-set from medians `m`: each cluster is split into distance rings
/// doubling from `R = error/(αn)`, and each ring is replaced by a uniform
/// sample whose weights add up to the ring size.
pub fn weak_coreset(
    s_in: &[DensityMatrix],
    k: usize,
    m: &[DensityMatrix],
    opts: &CoresetOptions,
) -> Result<WeakCoreset> {
    let n = s_in.len();
    if n == 0 {
        return Err(Error::Empty("input points"));
    }
    if m.is_empty() {
        return Err(Error::Empty("medians"));
    }
    if !(opts.epsilon > 0.0 && opts.delta > 0.0 && opts.delta < 1.0 && opts.beta > 0.0) {
        return Err(Error::InvalidParameter("need ε > 0, 0 < δ < 1, β > 0".into()));
    }
    let alpha = opts.alpha_for(k);
    let rings = (alpha * n as f64).log2().ceil().max(1.0) as usize;
    let sample_size = opts.sample_size.unwrap_or_else(|| opts.default_sample_size(n, k));
    if sample_size == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    if sample_size >= n {
        return Ok(WeakCoreset {
            points: s_in.to_vec(),
            weights: vec![1.0; n],
            source: (0..n).collect(),
            sample_size,
            rings,
            exact: true,
        });
    }
    let ent = entropies(s_in);
    let prepared: Vec<PreparedCenter> = m.iter().map(PreparedCenter::new).collect();
    let mut assignment = Vec::with_capacity(n);
    for (p, &s) in s_in.iter().zip(&ent) {
        let mut best = (0, f64::INFINITY);
        for (i, c) in prepared.iter().enumerate() {
            check_dims(c.dim(), p.dim())?;
            let d = c.divergence_given_entropy(p, s);
            if d < best.1 {
                best = (i, d);
            }
        }
        if !best.1.is_finite() {
            return Err(Error::InvalidParameter("a point has infinite divergence to every median".into()));
        }
        assignment.push(best);
    }
    let error: f64 = assignment.iter().map(|a| a.1).sum();
    let r = error / (alpha * n as f64);
    let ring_of = |d: f64| -> usize {
        if r <= 0.0 || d <= r {
            0
        } else {
            ((d / r).log2().ceil() as usize).clamp(1, rings)
        }
    };
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m.len() * (rings + 1)];
    for (idx, &(cluster, d)) in assignment.iter().enumerate() {
        groups[cluster * (rings + 1) + ring_of(d)].push(idx);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut source = Vec::new();
    let mut weights = Vec::new();
    for group in groups.iter().filter(|g| !g.is_empty()) {
        if group.len() <= sample_size {
            source.extend_from_slice(group);
            weights.extend(std::iter::repeat_n(1.0, group.len()));
        } else {
            // Integer weights: the ring size split as evenly as possible.
            let (q, extra) = (group.len() / sample_size, group.len() % sample_size);
            for t in 0..sample_size {
                source.push(group[rng.random_range(0..group.len())]);
                weights.push((q + usize::from(t < extra)) as f64);
            }
        }
    }
    Ok(WeakCoreset {
        points: source.iter().map(|&i| s_in[i].clone()).collect(),
        weights,
        source,
        sample_size,
        rings,
        exact: false,
    })
}

/// Parameters of the recursive sampling clusterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Multiset size drawn at each level; defaults to `⌈96k²/(ε²μδ)⌉`.
    pub sample_size: Option<usize>,
    /// Size of each subset whose centroid becomes a candidate; defaults to
    /// `⌈3/(εμδ)⌉`.
    pub subset_size: Option<usize>,
    /// Upper bound on candidates per level.
    pub max_candidates: usize,
    /// Upper bound on the multiset size when defaulted.
    pub max_sample: usize,
    pub seed: u64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            epsilon: 0.2,
            delta: 0.05,
            sample_size: None,
            subset_size: None,
            max_candidates: 8,
            max_sample: 4096,
            seed: 42,
        }
    }
}

/// Medians and their weighted error on the input.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub centers: Vec<DensityMatrix>,
    pub error: f64,
}

struct Clusterer<'a> {
    points: &'a [DensityMatrix],
    weights: &'a [f64],
    ent: Vec<f64>,
    sample_size: usize,
    subset_size: usize,
    max_candidates: usize,
    rng: ChaCha8Rng,
}

impl Clusterer<'_> {
    fn error(&self, centers: &[DensityMatrix]) -> Result<f64> {
        let d = divergences_to(self.points, &self.ent, centers)?;
        Ok(d.iter().zip(self.weights).map(|(d, w)| d * w).sum())
    }

    fn centroid(&self, members: &[usize]) -> DensityMatrix {
        let mut acc = ComplexMatrix::zeros(self.points[0].dim(), self.points[0].dim());
        for &i in members {
            acc += self.points[i].matrix();
        }
        acc /= c(members.len() as f64, 0.0);
        DensityMatrix::from_hermitian_unchecked(acc)
    }

    fn sample(&mut self, active: &[usize]) -> Vec<usize> {
        let total: f64 = active.iter().map(|&i| self.weights[i]).sum();
        (0..self.sample_size)
            .map(|_| {
                let mut target = self.rng.random::<f64>() * total;
                for &i in active {
                    if target < self.weights[i] {
                        return i;
                    }
                    target -= self.weights[i];
                }
                *active.last().expect("active set is nonempty")
            })
            .collect()
    }

    fn run(&mut self, active: &[usize], m: usize, chosen: Vec<DensityMatrix>) -> Result<(Vec<DensityMatrix>, f64)> {
        if m == 0 {
            let e = self.error(&chosen)?;
            return Ok((chosen, e));
        }
        if m >= active.len() {
            let mut all = chosen;
            all.extend(active.iter().map(|&i| self.points[i].clone()));
            let e = self.error(&all)?;
            return Ok((all, e));
        }
        let mut multiset = self.sample(active);
        multiset.shuffle(&mut self.rng);
        let candidates: Vec<DensityMatrix> =
            multiset.chunks(self.subset_size).take(self.max_candidates).map(|chunk| self.centroid(chunk)).collect();
        let mut best: Option<(Vec<DensityMatrix>, f64)> = None;
        for cand in candidates {
            let mut next = chosen.clone();
            next.push(cand);
            let result = self.run(active, m - 1, next)?;
            if best.as_ref().is_none_or(|b| result.1 < b.1) {
                best = Some(result);
            }
        }
        if !chosen.is_empty() {
            // Drop the half of the weight closest to the current medians.
            let d = divergences_to(self.points, &self.ent, &chosen)?;
            let mut order = active.to_vec();
            order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
            let half: f64 = 0.5 * active.iter().map(|&i| self.weights[i]).sum::<f64>();
            let mut acc = 0.0;
            let cut = order
                .iter()
                .position(|&i| {
                    acc += self.weights[i];
                    acc >= half
                })
                .map_or(order.len(), |p| p + 1);
            let rest = &order[cut..];
            if !rest.is_empty() && rest.len() < active.len() {
                let mut rest = rest.to_vec();
                rest.sort_unstable();
                let result = self.run(&rest, m, chosen)?;
                if best.as_ref().is_none_or(|b| result.1 < b.1) {
                    best = Some(result);
                }
            }
        }
        best.ok_or(Error::Empty("clustering candidates"))
    }
}

/// Recursive sampling k-median clustering on a μ-similar domain. Each level
/// tries the centroids of sampled subsets as the next median and, separately,
/// recurses on the half of the weight farthest from the medians so far; the
/// lower-error outcome wins.
pub fn cl_superball(
    points: &[DensityMatrix],
    weights: &[f64],
    k: usize,
    domain: &MuSimilarDomain,
    params: &ClusterParams,
) -> Result<ClusterResult> {
    check_weights(points, weights)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(params.epsilon > 0.0 && params.delta > 0.0 && params.delta < 1.0) {
        return Err(Error::InvalidParameter("need ε > 0 and 0 < δ < 1".into()));
    }
    if params.max_candidates == 0 {
        return Err(Error::InvalidParameter("max_candidates must be positive".into()));
    }
    for p in points {
        domain.spectrum(p)?;
    }
    let scale = params.epsilon * domain.mu() * params.delta;
    let kf = k as f64;
    let sample_size = params
        .sample_size
        .unwrap_or_else(|| ((96.0 * kf * kf / (params.epsilon * scale)).ceil() as usize).min(params.max_sample));
    let subset_size = params.subset_size.unwrap_or_else(|| (3.0 / scale).ceil() as usize).max(1);
    if sample_size == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    let mut cl = Clusterer {
        points,
        weights,
        ent: entropies(points),
        sample_size,
        subset_size,
        max_candidates: params.max_candidates,
        rng: ChaCha8Rng::seed_from_u64(params.seed),
    };
    let active: Vec<usize> = (0..points.len()).collect();
    let (centers, error) = cl.run(&active, k, Vec::new())?;
    Ok(ClusterResult { centers, error })
}
