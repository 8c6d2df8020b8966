//! Capacity estimates: Holevo (HSW), coherent and private information.
//!
//! The classical capacity of a qubit channel is the radius of the smallest
//! relative-entropy ball enclosing the channel's output ellipsoid. Its center
//! is the optimal average output, kept here as an explicit mixture of outputs
//! so that every estimate comes with a certified lower bound.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::{kraus_to_affine, BlochAffineMap, ChannelModel, KrausChannel};
use crate::error::{Error, Result};
use crate::infogeo::{BlochEntropy, Generator};
use crate::qmath::{
    bloch_divergence, bloch_to_density, check_dims, fibonacci_sphere, random_bloch_vector, random_mixed_state,
    random_pure_state, von_neumann_entropy, BlochVector, DensityMatrix, Ensemble, PreparedCenter,
};

/// Radii of the two Holevo balls whose difference is the coherent information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPair {
    pub r_ab: f64,
    pub r_ae: f64,
    pub r_coh: f64,
}

impl BallPair {
    pub fn new(r_ab: f64, r_ae: f64) -> Self {
        Self { r_ab, r_ae, r_coh: r_ab - r_ae }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub value_bits: f64,
    pub radius: f64,
    /// Certified achievable rate (Holevo quantity of the returned ensemble).
    pub lower_bound: f64,
    /// Optimal average output state.
    pub center: DensityMatrix,
    /// Input ensemble attaining the estimate.
    pub optimal_ensemble: Ensemble,
    /// Channel outputs of the ensemble members, in the same order.
    pub optimal_outputs: Vec<DensityMatrix>,
    pub iterations: usize,
    pub converged: bool,
    pub balls: Option<BallPair>,
}

/// `χ = S(N(Σpᵢρᵢ)) − Σ pᵢ S(N(ρᵢ))`.
pub fn channel_holevo(ch: &KrausChannel, ens: &Ensemble) -> Result<f64> {
    check_dims(ch.in_dim(), ens.dim())?;
    let outputs = ens.entries().iter().map(|(p, s)| Ok((*p, ch.apply(s)?))).collect::<Result<Vec<_>>>()?;
    let out = Ensemble::new(outputs)?;
    Ok(crate::qmath::holevo_quantity(&out))
}

/// Step sizes `ε_l` of the center update `σ ← (1 − ε_l)σ + ε_l ρ_far`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `ε_l = 1/(l + 1)`.
    Harmonic,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HswOptions {
    pub step: StepSchedule,
    /// Target gap between the upper and certified lower bound, in bits.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations of plain center updates before reweighting begins.
    pub sw_iterations: usize,
    /// Number of probe directions on the output ellipsoid.
    pub directions: usize,
}

impl Default for HswOptions {
    fn default() -> Self {
        Self { step: StepSchedule::Harmonic, tol: 1e-7, max_iter: 10_000, sw_iterations: 50, directions: 200 }
    }
}

impl HswOptions {
    fn validate(&self) -> Result<()> {
        if let StepSchedule::Fixed(e) = self.step {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidParameter(format!("step {e} outside (0, 1)")));
            }
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Atom {
    w: f64,
    dir: Vector3<f64>,
    out: Vector3<f64>,
}

fn atoms_center(atoms: &[Atom]) -> Vector3<f64> {
    atoms.iter().fold(Vector3::zeros(), |acc, a| acc + a.out * a.w)
}

fn atoms_chi(atoms: &[Atom], sigma: &Vector3<f64>) -> f64 {
    atoms.iter().map(|a| a.w * bloch_divergence(&a.out, sigma)).sum()
}

fn output_gradient(map: &BlochAffineMap, r: &Vector3<f64>, sigma: &Vector3<f64>) -> Vector3<f64> {
    let n = r.norm();
    let g = BlochEntropy;
    let r_eff = if n > 1.0 - 1e-15 { r * ((1.0 - 1e-15) / n) } else { *r };
    map.a.transpose() * (g.grad(&r_eff) - g.grad(sigma))
}

fn refine_direction(map: &BlochAffineMap, sigma: &Vector3<f64>, start: Vector3<f64>) -> (Vector3<f64>, f64) {
    let f = |n: &Vector3<f64>| bloch_divergence(&map.apply(n), sigma);
    let mut n = start;
    let mut val = f(&n);
    let mut step = 1.0;
    for _ in 0..200 {
        let g = output_gradient(map, &map.apply(&n), sigma);
        let tangent = g - n * g.dot(&n);
        if tangent.norm() < 1e-14 {
            break;
        }
        let mut improved = false;
        for _ in 0..60 {
            let cand = (n + tangent * step).normalize();
            let v = f(&cand);
            if v > val {
                let gain = v - val;
                n = cand;
                val = v;
                improved = true;
                step *= 2.0;
                if gain < 1e-16 {
                    return (n, val);
                }
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (n, val)
}

/// Farthest channel output (over pure inputs) from the center `σ`, as
/// `(input direction, divergence)`.
pub fn max_output_divergence(map: &BlochAffineMap, sigma: &Vector3<f64>, directions: usize) -> (Vector3<f64>, f64) {
    farthest_output(map, sigma, &probe_directions(directions), &[])
}

fn probe_directions(count: usize) -> Vec<Vector3<f64>> {
    let mut dirs = fibonacci_sphere(count);
    for axis in [Vector3::x(), Vector3::y(), Vector3::z()] {
        dirs.push(axis);
        dirs.push(-axis);
    }
    dirs
}

fn farthest_output(
    map: &BlochAffineMap,
    sigma: &Vector3<f64>,
    probes: &[Vector3<f64>],
    atoms: &[Atom],
) -> (Vector3<f64>, f64) {
    let mut scored: Vec<(f64, Vector3<f64>)> = probes
        .iter()
        .chain(atoms.iter().map(|a| &a.dir))
        .map(|n| (bloch_divergence(&map.apply(n), sigma), *n))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = (scored[0].1, scored[0].0);
    let mut seeds: Vec<Vector3<f64>> = Vec::new();
    for (_, n) in &scored {
        if seeds.len() == 4 {
            break;
        }
        if seeds.iter().all(|s| (s - n).norm() > 1e-6) {
            seeds.push(*n);
        }
    }
    for s in seeds {
        let (n, v) = refine_direction(map, sigma, s);
        if v > best.1 {
            best = (n, v);
        }
    }
    best
}

fn add_atom(atoms: &mut Vec<Atom>, map: &BlochAffineMap, dir: Vector3<f64>, t: f64) {
    atoms.iter_mut().for_each(|a| a.w *= 1.0 - t);
    if let Some(a) = atoms.iter_mut().find(|a| (a.dir - dir).norm() < 1e-10) {
        a.w += t;
    } else {
        atoms.push(Atom { w: t, dir, out: map.apply(&dir) });
    }
}

fn reweight(atoms: &mut Vec<Atom>, tol: f64) {
    for _ in 0..200 {
        let sigma = atoms_center(atoms);
        let divs: Vec<f64> = atoms.iter().map(|a| bloch_divergence(&a.out, &sigma)).collect();
        let chi: f64 = atoms.iter().zip(&divs).map(|(a, d)| a.w * d).sum();
        let top = divs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top - chi <= 0.1 * tol {
            break;
        }
        let mut total = 0.0;
        for (a, d) in atoms.iter_mut().zip(&divs) {
            a.w *= (d - top).exp2();
            total += a.w;
        }
        atoms.iter_mut().for_each(|a| a.w /= total);
    }
    atoms.retain(|a| a.w >= 1e-12);
    let total: f64 = atoms.iter().map(|a| a.w).sum();
    atoms.iter_mut().for_each(|a| a.w /= total);
}

/// Coordinate ascent of the Holevo quantity over the atoms' input directions,
/// followed by merging atoms that meet.
fn polish_atoms(atoms: &mut Vec<Atom>, map: &BlochAffineMap) {
    let chi_of = |atoms: &[Atom]| atoms_chi(atoms, &atoms_center(atoms));
    for i in 0..atoms.len() {
        let sigma = atoms_center(atoms);
        let g = output_gradient(map, &atoms[i].out, &sigma);
        let n = atoms[i].dir;
        let tangent = g - n * g.dot(&n);
        let norm = tangent.norm();
        if norm < 1e-14 {
            continue;
        }
        let base = chi_of(atoms);
        let mut step = 0.5 / norm;
        for _ in 0..40 {
            let dir = (n + tangent * step).normalize();
            let mut trial = atoms.clone();
            trial[i].dir = dir;
            trial[i].out = map.apply(&dir);
            if chi_of(&trial) > base {
                *atoms = trial;
                break;
            }
            step *= 0.5;
        }
    }
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms.drain(..) {
        match merged.iter_mut().find(|m| (m.dir - a.dir).norm() < 1e-5) {
            Some(m) => m.w += a.w,
            None => merged.push(a),
        }
    }
    *atoms = merged;
}

fn best_step(atoms: &[Atom], map: &BlochAffineMap, dir: Vector3<f64>) -> f64 {
    let eval = |t: f64| {
        let mut trial = atoms.to_vec();
        add_atom(&mut trial, map, dir, t);
        atoms_chi(&trial, &atoms_center(&trial))
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for _ in 0..50 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if eval(x1) < eval(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    0.5 * (a + b)
}

/// Holevo capacity of a qubit channel as the minimax radius of its output ellipsoid.
///
/// The center starts at `N(I/2)`, held as the even mixture of the outputs of
/// `|0⟩` and `|1⟩`, and moves toward the farthest output with the configured
/// step schedule. Afterwards the mixture weights are rebalanced with
/// Blahut-Arimoto updates and new farthest outputs are added until the gap
/// between the max divergence and the Holevo quantity drops below `tol`.
pub fn hsw_capacity(ch: &KrausChannel, opts: &HswOptions) -> Result<CapacityResult> {
    opts.validate()?;
    let map = kraus_to_affine(ch)?;
    let probes = probe_directions(opts.directions);
    let mut atoms = vec![
        Atom { w: 0.5, dir: Vector3::z(), out: map.apply(&Vector3::z()) },
        Atom { w: 0.5, dir: -Vector3::z(), out: map.apply(&-Vector3::z()) },
    ];
    let mut iterations = 0;
    let mut converged = false;
    let (mut upper, mut lower);

    loop {
        let sigma = atoms_center(&atoms);
        let (dir, dmax) = farthest_output(&map, &sigma, &probes, &atoms);
        upper = dmax;
        lower = atoms_chi(&atoms, &sigma).min(upper);
        if upper - lower <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        if iterations <= opts.sw_iterations {
            let eps = match opts.step {
                StepSchedule::Harmonic => 1.0 / (iterations as f64 + 1.0),
                StepSchedule::Fixed(e) => e,
            };
            add_atom(&mut atoms, &map, dir, eps);
        } else {
            let t = best_step(&atoms, &map, dir);
            add_atom(&mut atoms, &map, dir, t);
            for _ in 0..20 {
                polish_atoms(&mut atoms, &map);
                reweight(&mut atoms, opts.tol);
            }
        }
    }

    // A qubit channel never carries more than one bit.
    upper = upper.min(1.0);
    lower = lower.min(upper);
    let total: f64 = atoms.iter().map(|a| a.w).sum();
    let sigma = atoms_center(&atoms);
    let ensemble = Ensemble::new(atoms.iter().map(|a| (a.w / total, bloch_to_density(&unit_bloch(&a.dir)))).collect())?;
    let outputs = atoms.iter().map(|a| bloch_to_density(&clamped_bloch(&a.out))).collect();
    Ok(CapacityResult {
        value_bits: upper,
        radius: upper,
        lower_bound: lower,
        center: bloch_to_density(&clamped_bloch(&sigma)),
        optimal_ensemble: ensemble,
        optimal_outputs: outputs,
        iterations,
        converged,
        balls: None,
    })
}

fn clamped_bloch(v: &Vector3<f64>) -> BlochVector {
    let n = v.norm();
    let v = if n > 1.0 { v / n } else { *v };
    BlochVector::from_vector(v).expect("clamped vector lies in the ball")
}

fn unit_bloch(v: &Vector3<f64>) -> BlochVector {
    clamped_bloch(&v.normalize())
}

/// Holevo capacity restricted to ensembles over the given inputs, by
/// Blahut-Arimoto iteration. Works for any input and output dimension.
pub fn hsw_capacity_candidates(
    ch: &KrausChannel,
    inputs: &[DensityMatrix],
    opts: &HswOptions,
) -> Result<CapacityResult> {
    opts.validate()?;
    if inputs.is_empty() {
        return Err(Error::Empty("candidate inputs"));
    }
    let outputs = inputs.iter().map(|s| ch.apply(s)).collect::<Result<Vec<_>>>()?;
    let entropies: Vec<f64> = outputs.iter().map(von_neumann_entropy).collect();
    let n = inputs.len();
    let mut w = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut converged = false;
    let (mut upper, mut lower, mut sigma);
    loop {
        let ens = Ensemble::new(w.iter().copied().zip(outputs.iter().cloned()).collect())?;
        sigma = ens.average();
        let center = PreparedCenter::new(&sigma);
        let divs: Vec<f64> =
            outputs.iter().zip(&entropies).map(|(o, s)| center.divergence_given_entropy(o, *s)).collect();
        upper = divs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lower = w.iter().zip(&divs).map(|(p, d)| p * d).sum::<f64>().min(upper);
        if upper - lower <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        let mut total = 0.0;
        for (p, d) in w.iter_mut().zip(&divs) {
            *p *= (d - upper).exp2();
            total += *p;
        }
        w.iter_mut().for_each(|p| *p /= total);
    }
    let kept: Vec<usize> = (0..n).filter(|&i| w[i] > 1e-12).collect();
    let total: f64 = kept.iter().map(|&i| w[i]).sum();
    Ok(CapacityResult {
        value_bits: upper,
        radius: upper,
        lower_bound: lower,
        center: sigma,
        optimal_ensemble: Ensemble::new(kept.iter().map(|&i| (w[i] / total, inputs[i].clone())).collect())?,
        optimal_outputs: kept.iter().map(|&i| outputs[i].clone()).collect(),
        iterations,
        converged,
        balls: None,
    })
}

/// `S(N(ρ)) − S(N^c(ρ))`.
pub fn coherent_info(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    check_dims(ch.in_dim(), rho.dim())?;
    let out = von_neumann_entropy(&ch.apply(rho)?);
    let env = von_neumann_entropy(&ch.complementary().apply(rho)?);
    Ok(out - env)
}

/// Largest coherent information over the candidates.
///
/// Pure inputs always give zero coherent information, so the estimate is
/// floored at zero. The reported balls are the Holevo quantities of the
/// spectral decomposition of the best input through the channel and through
/// its complementary channel.
pub fn quantum_capacity_single_use(ch: &KrausChannel, candidates: &[DensityMatrix]) -> Result<CapacityResult> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate inputs"));
    }
    let mut best: Option<(f64, usize)> = None;
    for (i, rho) in candidates.iter().enumerate() {
        let v = coherent_info(ch, rho)?;
        if best.is_none_or(|b| v > b.0) {
            best = Some((v, i));
        }
    }
    let (value, idx) = best.expect("nonempty candidates");
    let (input, value) =
        if value > 0.0 { (candidates[idx].clone(), value) } else { (DensityMatrix::basis(ch.in_dim(), 0)?, 0.0) };
    let ensemble = Ensemble::spectral(&input);
    let comp = ch.complementary();
    let balls = BallPair::new(channel_holevo(ch, &ensemble)?, channel_holevo(&comp, &ensemble)?);
    let outputs = ensemble.entries().iter().map(|(_, s)| ch.apply(s)).collect::<Result<Vec<_>>>()?;
    Ok(CapacityResult {
        value_bits: value,
        radius: value,
        lower_bound: value,
        center: ch.apply(&input)?,
        optimal_ensemble: ensemble,
        optimal_outputs: outputs,
        iterations: candidates.len(),
        converged: true,
        balls: Some(balls),
    })
}

/// `χ_AB − χ_AE` for one ensemble; may be negative.
pub fn private_info(ch: &KrausChannel, ens: &Ensemble) -> Result<f64> {
    Ok(channel_holevo(ch, ens)? - channel_holevo(&ch.complementary(), ens)?)
}

/// Private information of a channel model. Declared models report their
/// declared single-use private capacity.
pub fn private_info_model(model: &ChannelModel, ens: &Ensemble) -> Result<f64> {
    match model {
        ChannelModel::Kraus(ch) => private_info(ch, ens),
        ChannelModel::Declared(d) => Ok(d.private_capacity_bits),
    }
}

/// Largest private information over candidate ensembles, floored at zero.
pub fn private_capacity_single_use(model: &ChannelModel, ensembles: &[Ensemble]) -> Result<f64> {
    match model {
        ChannelModel::Declared(d) => Ok(d.private_capacity_bits),
        ChannelModel::Kraus(ch) => {
            if ensembles.is_empty() {
                return Err(Error::Empty("candidate ensembles"));
            }
            ensembles.iter().try_fold(0.0f64, |best, e| Ok(best.max(private_info(ch, e)?)))
        }
    }
}

/// Pure candidate inputs: a Fibonacci sphere plus the six axis states for
/// qubits, seeded random pure states plus the basis states otherwise.
pub fn pure_input_candidates(d: usize, count: usize, seed: u64) -> Vec<DensityMatrix> {
    if d == 2 {
        return probe_directions(count).iter().map(|n| bloch_to_density(&unit_bloch(n))).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<DensityMatrix> = (0..d).filter_map(|i| DensityMatrix::basis(d, i).ok()).collect();
    out.extend((0..count).map(|_| random_pure_state(&mut rng, d)));
    out
}

/// Mixed candidate inputs: the diagonal family `diag(t, 1 − t)` (or the
/// maximally mixed state for `d > 2`) followed by seeded random states.
pub fn mixed_input_candidates(d: usize, count: usize, seed: u64) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if d == 2 {
        let line = count / 2;
        for i in 0..line {
            let t = i as f64 / (line.max(2) - 1) as f64;
            out.push(DensityMatrix::diagonal(&[t, 1.0 - t]).expect("valid diagonal state"));
        }
        while out.len() < count {
            out.push(bloch_to_density(&random_bloch_vector(&mut rng, 1.0)));
        }
    } else {
        out.push(DensityMatrix::maximally_mixed(d));
        while out.len() < count {
            out.push(random_mixed_state(&mut rng, d));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_channel, ChannelKind, ChannelSpec};

    #[test]
    fn identity_capacity_is_one_bit() {
        let ch = build_channel(&ChannelSpec::new(ChannelKind::Identity)).unwrap();
        let res = hsw_capacity(&ch, &HswOptions::default()).unwrap();
        assert!((res.value_bits - 1.0).abs() < 1e-6, "{}", res.value_bits);
        assert!(res.converged);
    }
}
