mod common;

use nalgebra::Vector3;
use proptest::prelude::*;
use qcap_core::qmath::{
    binary_entropy, bloch_to_density, c, density_to_bloch, fidelity, holevo_quantity, partial_trace,
    random_bloch_vector, random_mixed_state, relative_entropy, relative_entropy_bloch, tensor, von_neumann_entropy,
    BlochVector, DensityMatrix, Ensemble, Subsystem,
};
use qcap_core::Error;

use common::{bloch_of, density_of, qubit_entropy_from_radius, rng, shannon_bits};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn bloch_origin_and_pole() {
    let mixed = bloch_to_density(&BlochVector::origin());
    assert!(mixed.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
    let north = bloch_to_density(&BlochVector::new(0.0, 0.0, 1.0).unwrap());
    assert!(north.max_abs_diff(&DensityMatrix::basis(2, 0).unwrap()) < 1e-15);
}

#[test]
fn bloch_eigenvalues_match_radius() {
    let r = BlochVector::new(0.3, 0.4, 0.5).unwrap();
    let mut ev = bloch_to_density(&r).eigenvalues();
    ev.sort_by(f64::total_cmp);
    let s = 0.5f64.sqrt();
    assert!(close(ev[0], (1.0 - s) / 2.0, 1e-12));
    assert!(close(ev[1], (1.0 + s) / 2.0, 1e-12));
}

#[test]
fn bloch_rejects_outside_ball_and_non_qubits() {
    assert!(matches!(BlochVector::new(1.0, 1.0, 0.0), Err(Error::OutsideBlochBall(_))));
    assert_eq!(density_to_bloch(&DensityMatrix::maximally_mixed(3)), Err(Error::NotQubit(3)));
}

#[test]
fn density_constructor_validates() {
    let bad_trace = nalgebra::DMatrix::from_row_slice(2, 2, &[c(0.6, 0.), c(0., 0.), c(0., 0.), c(0.6, 0.)]);
    assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace(_))));
    let not_herm = nalgebra::DMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.3, 0.), c(0., 0.), c(0.5, 0.)]);
    assert!(matches!(DensityMatrix::new(not_herm), Err(Error::NotHermitian(_))));
    let negative = nalgebra::DMatrix::from_row_slice(2, 2, &[c(1.2, 0.), c(0., 0.), c(0., 0.), c(-0.2, 0.)]);
    assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPositive(_))));
}

#[test]
fn entropy_examples() {
    assert!(close(von_neumann_entropy(&DensityMatrix::maximally_mixed(2)), 1.0, 1e-12));
    assert!(close(von_neumann_entropy(&DensityMatrix::basis(2, 0).unwrap()), 0.0, 1e-12));
    let s = von_neumann_entropy(&DensityMatrix::diagonal(&[0.9, 0.1]).unwrap());
    assert!(close(s, -0.9 * 0.9f64.log2() - 0.1 * 0.1f64.log2(), 1e-12));
}

#[test]
fn binary_entropy_examples() {
    assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
    assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
    assert!(close(binary_entropy(0.25).unwrap(), -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2(), 1e-15));
    assert!(binary_entropy(1.5).is_err());
    assert!(binary_entropy(-0.1).is_err());
}

#[test]
fn relative_entropy_examples() {
    let zero = DensityMatrix::basis(2, 0).unwrap();
    let one = DensityMatrix::basis(2, 1).unwrap();
    let half = DensityMatrix::maximally_mixed(2);
    assert!(close(relative_entropy(&half, &half).unwrap(), 0.0, 1e-12));
    assert!(close(relative_entropy(&zero, &half).unwrap(), 1.0, 1e-12));
    assert_eq!(relative_entropy(&zero, &one).unwrap(), f64::INFINITY);
    assert!(matches!(
        relative_entropy(&zero, &DensityMatrix::maximally_mixed(3)),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn commuting_relative_entropy_is_classical() {
    let p: [f64; 3] = [0.7, 0.2, 0.1];
    let q = [0.3, 0.3, 0.4];
    let expected: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).log2()).sum();
    let d = relative_entropy(&DensityMatrix::diagonal(&p).unwrap(), &DensityMatrix::diagonal(&q).unwrap()).unwrap();
    assert!(close(d, expected, 1e-12));
}

#[test]
fn bloch_relative_entropy_examples() {
    let r = BlochVector::new(0.2, -0.3, 0.4).unwrap();
    assert!(close(relative_entropy_bloch(&r, &r), 0.0, 1e-12));
    let at_center = relative_entropy_bloch(&r, &BlochVector::origin());
    assert!(close(at_center, 1.0 - qubit_entropy_from_radius(r.norm()), 1e-12));
    let pure = BlochVector::new(0.0, 0.6, 0.8).unwrap();
    let sigma = BlochVector::new(0.1, 0.2, -0.3).unwrap();
    let matrix = relative_entropy(&bloch_to_density(&pure), &bloch_to_density(&sigma)).unwrap();
    assert!(close(relative_entropy_bloch(&pure, &sigma), matrix, 1e-9));
    let edge = BlochVector::new(0.0, 0.0, 1.0).unwrap();
    assert_eq!(relative_entropy_bloch(&r, &edge), f64::INFINITY);
}

#[test]
fn partial_trace_examples() {
    let mut r = rng(11);
    let a = random_mixed_state(&mut r, 2);
    let b = random_mixed_state(&mut r, 3);
    let ab = tensor(&a, &b);
    assert!(partial_trace(&ab, Subsystem::B, (2, 3)).unwrap().max_abs_diff(&a) < 1e-12);
    assert!(partial_trace(&ab, Subsystem::A, (2, 3)).unwrap().max_abs_diff(&b) < 1e-12);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::pure(&[c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]).unwrap();
    let reduced = partial_trace(&bell, Subsystem::B, (2, 2)).unwrap();
    assert!(reduced.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-12);
    assert!(partial_trace(&bell, Subsystem::B, (3, 2)).is_err());
}

#[test]
fn fidelity_examples() {
    let zero = DensityMatrix::basis(2, 0).unwrap();
    let one = DensityMatrix::basis(2, 1).unwrap();
    let half = DensityMatrix::maximally_mixed(2);
    assert!(close(fidelity(&half, &half).unwrap(), 1.0, 1e-12));
    assert!(close(fidelity(&zero, &one).unwrap(), 0.0, 1e-12));
    assert!(close(fidelity(&zero, &half).unwrap(), 0.5, 1e-12));
    assert!(fidelity(&zero, &DensityMatrix::maximally_mixed(3)).is_err());
}

#[test]
fn holevo_examples() {
    let ens =
        Ensemble::uniform(vec![DensityMatrix::basis(2, 0).unwrap(), DensityMatrix::basis(2, 1).unwrap()]).unwrap();
    assert!(close(holevo_quantity(&ens), 1.0, 1e-12));
    let single = Ensemble::new(vec![(1.0, random_mixed_state(&mut rng(3), 2))]).unwrap();
    assert!(close(holevo_quantity(&single), 0.0, 1e-12));
    assert!(Ensemble::new(vec![(0.7, DensityMatrix::maximally_mixed(2))]).is_err());
}

fn state_pair(seed: u64, d: usize) -> (DensityMatrix, DensityMatrix) {
    let mut r = rng(seed);
    (random_mixed_state(&mut r, d), random_mixed_state(&mut r, d))
}

#[test]
fn asymmetry_witness_exists() {
    let found = (0..200).any(|seed| {
        let (a, b) = state_pair(seed, 2);
        (relative_entropy(&a, &b).unwrap() - relative_entropy(&b, &a).unwrap()).abs() > 0.01
    });
    assert!(found);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bloch_round_trip(seed in any::<u64>()) {
        let r = random_bloch_vector(&mut rng(seed), 1.0);
        let back = density_to_bloch(&bloch_to_density(&r)).unwrap();
        prop_assert!((back.as_vector() - r.as_vector()).norm() < 1e-12);
        prop_assert!((bloch_of(bloch_to_density(&r).matrix()) - r.as_vector()).norm() < 1e-12);
    }

    #[test]
    fn entropy_bounds_and_spectrum(seed in any::<u64>(), d in 2usize..5) {
        let rho = random_mixed_state(&mut rng(seed), d);
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= -1e-12 && s <= (d as f64).log2() + 1e-12);
        prop_assert!((s - shannon_bits(&rho.eigenvalues())).abs() < 1e-10);
    }

    #[test]
    fn klein_inequality_and_identity(seed in any::<u64>(), d in 2usize..4) {
        let (a, b) = state_pair(seed, d);
        prop_assert!(relative_entropy(&a, &b).unwrap() >= 0.0);
        prop_assert!(relative_entropy(&a, &a).unwrap().abs() < 1e-9);
    }

    #[test]
    fn bloch_form_matches_matrix_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_bloch_vector(&mut r, 0.999);
        let b = random_bloch_vector(&mut r, 0.999);
        let m = relative_entropy(&density_of(a.as_vector()), &density_of(b.as_vector())).unwrap();
        prop_assert!((relative_entropy_bloch(&a, &b) - m).abs() < 1e-9);
    }

    #[test]
    fn additivity_over_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s: Vec<DensityMatrix> = (0..4).map(|_| random_mixed_state(&mut r, 2)).collect();
        let lhs = relative_entropy(&tensor(&s[0], &s[1]), &tensor(&s[2], &s[3])).unwrap();
        let rhs = relative_entropy(&s[0], &s[2]).unwrap() + relative_entropy(&s[1], &s[3]).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn fidelity_symmetric_and_multiplicative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s: Vec<DensityMatrix> = (0..4).map(|_| random_mixed_state(&mut r, 2)).collect();
        let f01 = fidelity(&s[0], &s[1]).unwrap();
        prop_assert!((f01 - fidelity(&s[1], &s[0]).unwrap()).abs() < 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f01));
        let joint = fidelity(&tensor(&s[0], &s[2]), &tensor(&s[1], &s[3])).unwrap();
        prop_assert!((joint - f01 * fidelity(&s[2], &s[3]).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn holevo_is_average_divergence(seed in any::<u64>(), n in 1usize..6, d in 2usize..4) {
        let mut r = rng(seed);
        let states: Vec<DensityMatrix> = (0..n).map(|_| random_mixed_state(&mut r, d)).collect();
        let raw: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let total: f64 = raw.iter().sum();
        let ens = Ensemble::new(raw.iter().map(|w| w / total).zip(states).collect()).unwrap();
        let sigma = ens.average();
        let chi = holevo_quantity(&ens);
        let avg: f64 = ens.entries().iter().map(|(p, s)| p * relative_entropy(s, &sigma).unwrap()).sum();
        prop_assert!((chi - avg).abs() < 1e-9);
        prop_assert!(chi >= -1e-12 && chi <= (d as f64).log2() + 1e-12);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>()) {
        let rho = random_mixed_state(&mut rng(seed), 6);
        prop_assert!((partial_trace(&rho, Subsystem::A, (2, 3)).unwrap().trace() - 1.0).abs() < 1e-12);
        prop_assert!((partial_trace(&rho, Subsystem::B, (2, 3)).unwrap().trace() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn eigenvalues_of_bloch_vector_helper() {
    let r = BlochVector::from_vector(Vector3::new(0.0, 0.0, -0.6)).unwrap();
    let (hi, lo) = r.eigenvalues();
    assert!(close(hi, 0.8, 1e-15) && close(lo, 0.2, 1e-15));
}
