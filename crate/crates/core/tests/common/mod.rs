//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3, Vector3};
use qcap_core::channels::KrausChannel;
use qcap_core::qmath::{c, pauli_x, pauli_y, pauli_z, relative_entropy, ComplexMatrix, DensityMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `−Σ λ log₂ λ` from a list of eigenvalues.
pub fn shannon_bits(values: &[f64]) -> f64 {
    values.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// Qubit entropy from the Bloch radius: eigenvalues `(1 ± r)/2`.
pub fn qubit_entropy_from_radius(r: f64) -> f64 {
    shannon_bits(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0])
}

/// Bloch vector read off the matrix entries: `x = 2 Re ρ01`, `y = −2 Im ρ01`,
/// `z = ρ00 − ρ11`.
pub fn bloch_of(m: &ComplexMatrix) -> Vector3<f64> {
    Vector3::new(2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re)
}

/// `(I + r·σ)/2` built entry by entry.
pub fn density_of(r: &Vector3<f64>) -> DensityMatrix {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[c(0.5 * (1.0 + r.z), 0.0), c(0.5 * r.x, -0.5 * r.y), c(0.5 * r.x, 0.5 * r.y), c(0.5 * (1.0 - r.z), 0.0)],
    );
    DensityMatrix::new(m).expect("valid Bloch vector")
}

/// Environment state `Tr_B(VρV†)` for the isometry `V = Σ_k N_k ⊗ |k⟩`.
pub fn isometry_environment(ch: &KrausChannel, rho: &DensityMatrix) -> ComplexMatrix {
    let k = ch.kraus().len();
    let (dout, din) = (ch.out_dim(), ch.in_dim());
    let mut v = ComplexMatrix::zeros(dout * k, din);
    for (idx, n) in ch.kraus().iter().enumerate() {
        for b in 0..dout {
            for a in 0..din {
                v[(b * k + idx, a)] = n[(b, a)];
            }
        }
    }
    let joint = &v * rho.matrix() * v.adjoint();
    let mut env = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            env[(i, j)] = (0..dout).map(|b| joint[(b * k + i, b * k + j)]).sum();
        }
    }
    env
}

/// Edges of the n-fold strong product of a graph on `q` vertices, vertices
/// numbered in base `q` with the first factor most significant.
pub fn strong_product_edges(q: usize, edges: &[(usize, usize)], n: usize) -> Vec<(usize, usize)> {
    let adjacent_or_equal =
        |a: usize, b: usize| a == b || edges.iter().any(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a));
    let total = q.pow(n as u32);
    let digits = |mut v: usize| {
        let mut d = vec![0; n];
        for slot in d.iter_mut().rev() {
            *slot = v % q;
            v /= q;
        }
        d
    };
    let mut out = Vec::new();
    for u in 0..total {
        for v in u + 1..total {
            if digits(u).iter().zip(digits(v)).all(|(&a, b)| adjacent_or_equal(a, b)) {
                out.push((u, v));
            }
        }
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn divergence_table(points: &[DensityMatrix]) -> Vec<Vec<f64>> {
    points.iter().map(|p| points.iter().map(|q| relative_entropy(p, q).unwrap()).collect()).collect()
}

/// Exhaustive k-median with centers restricted to input points. Returns the
/// optimal error and center indices.
pub fn discrete_kmedian(points: &[DensityMatrix], k: usize) -> (f64, Vec<usize>) {
    let table = divergence_table(points);
    let mut best = (f64::INFINITY, Vec::new());
    for set in subsets(points.len(), k) {
        let e: f64 = (0..points.len()).map(|i| set.iter().map(|&j| table[i][j]).fold(f64::INFINITY, f64::min)).sum();
        if e < best.0 {
            best = (e, set);
        }
    }
    best
}

fn mean_state(points: &[DensityMatrix], members: &[usize]) -> DensityMatrix {
    let d = points[0].dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for &i in members {
        acc += points[i].matrix();
    }
    DensityMatrix::new(acc / c(members.len() as f64, 0.0)).unwrap()
}

/// Exhaustive k-median for small inputs: the better of the discrete optimum
/// and the best assignment of points to `k` groups with each group served by
/// its own mean.
pub fn partition_kmedian(points: &[DensityMatrix], k: usize) -> f64 {
    let n = points.len();
    assert!(n <= 12, "exhaustive partition oracle is limited to 12 points");
    let mut best = discrete_kmedian(points, k).0;
    let mut labels = vec![0usize; n];
    loop {
        // Canonical labelings only: first occurrence order.
        let mut canonical = true;
        let mut seen = 0;
        for &l in &labels {
            if l > seen {
                canonical = false;
                break;
            }
            if l == seen {
                seen += 1;
            }
        }
        if canonical && seen == k {
            let centers: Vec<DensityMatrix> =
                (0..k).map(|g| mean_state(points, &(0..n).filter(|&i| labels[i] == g).collect::<Vec<_>>())).collect();
            let e: f64 = points
                .iter()
                .map(|p| centers.iter().map(|cn| relative_entropy(p, cn).unwrap()).fold(f64::INFINITY, f64::min))
                .sum();
            best = best.min(e);
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
        }
    }
}

/// Holevo capacity of a qubit channel whose outputs are symmetric about the
/// z-axis: `min over z-axis centers of max over inputs in the xz-plane`. The
/// inner maximum is convex in the center, so the outer search is ternary.
pub fn z_axis_grid_capacity(ch: &KrausChannel, angles: usize) -> f64 {
    let outputs: Vec<DensityMatrix> = (0..=angles)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / angles as f64;
            ch.apply(&density_of(&Vector3::new(t.sin(), 0.0, t.cos()))).unwrap()
        })
        .collect();
    let worst = |z: f64| {
        let sigma = density_of(&Vector3::new(0.0, 0.0, z));
        outputs.iter().map(|o| relative_entropy(o, &sigma).unwrap()).fold(0.0, f64::max)
    };
    let (mut a, mut b) = (-1.0 + 1e-9, 1.0 - 1e-9);
    for _ in 0..100 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if worst(m1) < worst(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    worst(0.5 * (a + b))
}

/// Largest output Bloch radius of a unital qubit channel: the top singular
/// value of `T_ij = Tr(σ_i N(σ_j))/2`, built by pushing Pauli matrices
/// through the Kraus operators.
pub fn max_output_radius(ch: &KrausChannel) -> f64 {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let t = Matrix3::from_fn(|i, j| 0.5 * (&paulis[i] * ch.apply_operator(&paulis[j])).trace().re);
    t.singular_values().max()
}
