mod common;

use proptest::prelude::*;
use qcap_core::capacity::{coherent_info, private_info};
use qcap_core::channels::{build_channel, tensor_channels, ChannelKind, ChannelSpec};
use qcap_core::qmath::{
    c, random_mixed_state, random_pure_state, relative_entropy, tensor, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, Ensemble,
};
use qcap_core::superact::{
    decomposition_check, decomposition_check_joint, depolarizing_erasure_radius, entropy_extremes, joint_radius,
    joint_radius_at, linear_grid, superactivation_value, superball_center_and_boundary, sweep, JointConstruction,
    ReferenceModel,
};
use qcap_core::zeroerr::epr_inputs;
use qcap_core::Error;

use common::{rng, shannon_bits};

#[test]
fn superactivation_value_examples() {
    assert_eq!(superactivation_value(0.0).unwrap(), 0.0);
    assert!((superactivation_value(0.02).unwrap() - 0.01).abs() < 1e-15);
    assert!(matches!(superactivation_value(-0.1), Err(Error::InvalidParameter(_))));
    assert!(superactivation_value(f64::NAN).is_err());
}

#[test]
fn joint_radius_examples() {
    let model = ReferenceModel::default();
    let spec = |p| {
        JointConstruction::new(p, ChannelSpec::new(ChannelKind::Identity), ChannelSpec::new(ChannelKind::Erasure))
            .unwrap()
    };
    assert_eq!(joint_radius(&spec(0.0), &model), 0.0);
    assert_eq!(model.r_h2(0.002), 0.01);
    assert!((joint_radius(&spec(0.002), &model) - 2.0 * 0.002 * 0.998 * 0.01).abs() < 1e-15);
    assert_eq!(joint_radius(&spec(0.5), &model), 0.0);
    assert!(JointConstruction::new(
        1.5,
        ChannelSpec::new(ChannelKind::Identity),
        ChannelSpec::new(ChannelKind::Identity)
    )
    .is_err());
}

#[test]
fn weight_at_reference_point() {
    // 2·0.004·0.996, computed rather than read off a plot.
    let w = joint_radius_at(0.004, &ReferenceModel::default()) / 0.01;
    assert!((w - 0.007968).abs() < 1e-15);
}

#[test]
fn reference_model_invariants() {
    let m = ReferenceModel::default();
    assert_eq!(m.p1, 0.02);
    assert_eq!(m.window, (0.0, 0.0041));
    assert_eq!(m.r_h2_inside, 0.5 * m.p1);
    assert_eq!(m.r_hh, 0.0);
    let custom = ReferenceModel::from_toml_str("P1_horodecki = 0.1\nwindow_lo = 0.2\nwindow_hi = 0.3\n").unwrap();
    assert_eq!(custom.r_h2_inside, 0.05);
    assert!(custom.in_window(0.25) && !custom.in_window(0.2) && !custom.in_window(0.3));
    assert!(ReferenceModel::from_toml_str("P1_horodecki = 0.1\nwindow_lo = 0.3\nwindow_hi = 0.2\n").is_err());
    assert!(ReferenceModel::from_toml_str("P1_horodecki = 0.1\nwindow_lo = 0.0\nwindow_hi = 0.2\nextra = 1\n").is_err());
    assert!(matches!(ReferenceModel::from_toml_str("P1_horodecki = "), Err(Error::Parse(_))));
}

#[test]
fn sweep_examples() {
    let model = ReferenceModel::default();
    let outside = sweep(&[0.0, 0.5, 1.0], &model).unwrap();
    assert!(outside.rows.iter().all(|r| r.r_super == 0.0));
    assert_eq!(outside.detected_window(), None);

    let inside = linear_grid(0.0001, 0.004, 100).unwrap();
    let res = sweep(&inside, &model).unwrap();
    assert!(res.rows.iter().all(|r| r.r_super > 0.0));

    assert!(sweep(&[0.1, 1.2], &model).is_err());
}

#[test]
fn detected_window_matches_model() {
    let model = ReferenceModel::default();
    let grid = linear_grid(0.0, 0.01, 1000).unwrap();
    let res = sweep(&grid, &model).unwrap();
    let expected: Vec<f64> = grid.iter().copied().filter(|&p| p > 0.0 && p < 0.0041).collect();
    assert_eq!(res.activation_points(), expected);
    let (lo, hi) = res.detected_window().unwrap();
    assert_eq!(lo, grid[1]);
    assert!(hi < 0.0041 && hi + 1e-5 >= 0.0041 - 1e-12);
}

#[test]
fn maximum_sits_at_the_upper_edge() {
    let model = ReferenceModel::default();
    let grid = linear_grid(0.0, 0.0041, 4100).unwrap();
    let res = sweep(&grid, &model).unwrap();
    let inside: Vec<_> = res.rows.iter().filter(|r| model.in_window(r.p_c)).collect();
    let best = inside.iter().max_by(|a, b| a.r_super.total_cmp(&b.r_super)).unwrap();
    assert_eq!(best.p_c, inside.last().unwrap().p_c);
    assert!(inside.windows(2).all(|w| w[1].r_super > w[0].r_super));
}

#[test]
fn window_edges() {
    let model = ReferenceModel::default();
    let near_zero = sweep(&[1e-12, 1e-9, 1e-6], &model).unwrap();
    for r in &near_zero.rows {
        assert_eq!(r.r_h2, 0.01);
        assert!(r.r_super <= 2.0 * r.p_c * 0.01 + 1e-18);
    }
    let edge = sweep(&[0.0041 - 1e-12, 0.0041, 0.0041 + 1e-12], &model).unwrap();
    assert_eq!(edge.rows[0].r_h2, 0.01);
    assert_eq!(edge.rows[1].r_h2, 0.0);
    assert_eq!(edge.rows[2].r_h2, 0.0);
    assert!(edge.rows[0].r_super > 8e-5 && edge.rows[1].r_super == 0.0);
}

#[test]
fn sweep_csv() {
    let res = sweep(&[0.0, 0.002], &ReferenceModel::default()).unwrap();
    let text = res.to_csv(&["model reference".to_string()]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# model reference");
    assert_eq!(lines[1], "p_C,r_H2,r_super");
    assert_eq!(lines[2], "0,0,0");
    assert!(lines[3].starts_with("0.002,0.01,"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn grid_construction() {
    let g = linear_grid(0.0, 1.0, 4).unwrap();
    assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert!(linear_grid(0.5, 0.5, 3).is_err());
    assert!(linear_grid(0.0, 1.0, 0).is_err());
    assert!(linear_grid(-0.1, 1.0, 3).is_err());
}

#[test]
fn decomposition_examples() {
    let mut r = rng(21);
    for _ in 0..100 {
        let s: Vec<DensityMatrix> = (0..4).map(|_| random_mixed_state(&mut r, 2)).collect();
        let (lhs, rhs) = decomposition_check(&s[0], &s[1], &s[2], &s[3]).unwrap();
        assert!((lhs - rhs).abs() < 1e-9);
    }
    let a = random_mixed_state(&mut r, 2);
    let (lhs, rhs) = decomposition_check(&a, &a, &a, &a).unwrap();
    assert!(lhs.abs() < 1e-12 && rhs.abs() < 1e-12);
    let q = random_mixed_state(&mut r, 3);
    assert!(matches!(decomposition_check(&a, &a, &q, &a), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn bell_witness_breaks_additivity() {
    let half = DensityMatrix::maximally_mixed(2);
    for bell in epr_inputs() {
        let (joint, marginals) = decomposition_check_joint(&bell, (2, 2), &half, &half).unwrap();
        // D(pure‖I/4) = log2(4) − S(pure); both marginals are I/2.
        let oracle = 2.0 - von_neumann_entropy(&bell);
        assert!((joint - oracle).abs() < 1e-9);
        assert!((joint - 2.0).abs() < 1e-9);
        assert!(marginals.abs() < 1e-12);
    }
    // A product joint state satisfies the equality.
    let mut r = rng(22);
    let (a, b) = (random_mixed_state(&mut r, 2), random_mixed_state(&mut r, 3));
    let (s1, s2) = (random_mixed_state(&mut r, 2), random_mixed_state(&mut r, 3));
    let (joint, marginals) = decomposition_check_joint(&tensor(&a, &b), (2, 3), &s1, &s2).unwrap();
    assert!((joint - marginals).abs() < 1e-9);
}

#[test]
fn depolarizing_erasure_examples() {
    assert!((depolarizing_erasure_radius(0.0).unwrap() - 0.5).abs() < 1e-15);
    assert!(depolarizing_erasure_radius(1.0).unwrap().abs() < 1e-15);
    let expected = 0.5 * (1.0 - shannon_bits(&[0.25, 0.75]));
    assert!((depolarizing_erasure_radius(0.5).unwrap() - expected).abs() < 1e-15);
    assert!(depolarizing_erasure_radius(1.1).is_err());
}

#[test]
fn superball_selection() {
    let mut r = rng(23);
    let half = DensityMatrix::maximally_mixed(2);
    let nearly_pure = DensityMatrix::diagonal(&[0.99, 0.01]).unwrap();
    let (center, _) = superball_center_and_boundary(&half, &nearly_pure, std::slice::from_ref(&nearly_pure)).unwrap();
    assert!(center.max_abs_diff(&half) < 1e-15);
    let (center, _) = superball_center_and_boundary(&nearly_pure, &half, std::slice::from_ref(&nearly_pure)).unwrap();
    assert!(center.max_abs_diff(&half) < 1e-15);

    let single = random_mixed_state(&mut r, 2);
    let (center, boundary) = superball_center_and_boundary(&single, &single, std::slice::from_ref(&single)).unwrap();
    assert!(center.max_abs_diff(&single) < 1e-15);
    assert_eq!(boundary, 0);

    let list: Vec<DensityMatrix> = (0..30)
        .map(|i| if i % 3 == 0 { random_pure_state(&mut r, 2) } else { random_mixed_state(&mut r, 2) })
        .collect();
    let entropies: Vec<f64> = list.iter().map(von_neumann_entropy).collect();
    let (_, boundary) = superball_center_and_boundary(&half, &half, &list).unwrap();
    assert!(entropies.iter().all(|&s| entropies[boundary] <= s));
    let (hi, lo) = entropy_extremes(&list).unwrap();
    assert!(entropies.iter().all(|&s| s <= entropies[hi]));
    assert_eq!(lo, boundary);

    // Ties go to the lowest index.
    let tied = vec![half.clone(), nearly_pure.clone(), half.clone(), nearly_pure.clone()];
    assert_eq!(entropy_extremes(&tied).unwrap(), (0, 1));
    assert!(matches!(superball_center_and_boundary(&half, &half, &[]), Err(Error::Empty(_))));
}

/// Input `Σ pᵢ φᵢ ⊗ |i⟩⟨i|`: the ensemble with a classical flag sent
/// through the erasure channel.
fn flagged_ensemble(ens: &[(f64, DensityMatrix)]) -> DensityMatrix {
    let k = ens.len();
    let d = ens[0].1.dim();
    let mut acc = ComplexMatrix::zeros(d * k, d * k);
    for (i, (p, phi)) in ens.iter().enumerate() {
        acc += tensor(phi, &DensityMatrix::basis(k, i).unwrap()).matrix() * c(*p, 0.0);
    }
    DensityMatrix::new(acc).unwrap()
}

#[test]
fn erasure_assistance_yields_half_the_private_information() {
    let erasure = build_channel(&ChannelSpec::new(ChannelKind::Erasure).with_param("p", 0.5)).unwrap();
    let mut r = rng(24);
    for (kind, p) in
        [(ChannelKind::AmplitudeDamping, 0.7), (ChannelKind::Depolarizing, 0.2), (ChannelKind::Identity, 0.0)]
    {
        let spec = if kind == ChannelKind::Identity {
            ChannelSpec::new(kind)
        } else {
            ChannelSpec::new(kind).with_param("p", p)
        };
        let ch = build_channel(&spec).unwrap();
        let joint = tensor_channels(&ch, &erasure);
        for _ in 0..5 {
            let ens = vec![(0.3, random_pure_state(&mut r, 2)), (0.7, random_pure_state(&mut r, 2))];
            let p1 = private_info(&ch, &Ensemble::new(ens.clone()).unwrap()).unwrap();
            let ic = coherent_info(&joint, &flagged_ensemble(&ens)).unwrap();
            assert!((ic - 0.5 * p1).abs() < 1e-9, "{kind}: {ic} vs {}", 0.5 * p1);
        }
    }
}

#[test]
fn joint_relative_entropy_oracle() {
    // Cross-check the joint form against an explicitly built product reference.
    let mut r = rng(25);
    let rho = random_mixed_state(&mut r, 4);
    let (s1, s2) = (random_mixed_state(&mut r, 2), random_mixed_state(&mut r, 2));
    let (joint, _) = decomposition_check_joint(&rho, (2, 2), &s1, &s2).unwrap();
    let mut prod = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    prod[(i * 2 + k, j * 2 + l)] = s1.matrix()[(i, j)] * s2.matrix()[(k, l)];
                }
            }
        }
    }
    let oracle = relative_entropy(&rho, &DensityMatrix::new(prod).unwrap()).unwrap();
    assert!((joint - oracle).abs() < 1e-12);
}

proptest! {
    #[test]
    fn superactivation_is_linear(a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let f = |x| superactivation_value(x).unwrap();
        prop_assert!((f(a + b) - f(a) - f(b)).abs() <= 1e-12 * (1.0 + a + b));
        prop_assert!((f(2.0 * a) - a).abs() <= 1e-15 * (1.0 + a));
    }

    #[test]
    fn sweep_identity_holds(p in 0.0f64..=1.0) {
        let model = ReferenceModel::default();
        let row = sweep(&[p], &model).unwrap().rows[0];
        prop_assert_eq!(row.r_super, 2.0 * p * (1.0 - p) * row.r_h2);
        if !(p > 0.0 && p < 0.0041) {
            prop_assert_eq!(row.r_super, 0.0);
        }
    }
}
