//! Property suites for the invariants the solvers promise.

#![allow(clippy::needless_range_loop)]

mod common;

use common::{conjugated_instance, power_iteration_norm, random_symmetric_instance};
use proptest::prelude::*;
use spheremax::rng::SplitMix64;
use spheremax::{
    classify_global_max, diagnose_boundary, eigendecompose, eval_j, g_value, maximize_on_sphere,
    spectral_resolvent, Operator, SymmetricOperator, Vector,
};

fn symmetric_rows(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, n), n).prop_map(
        move |mut rows| {
            for i in 0..n {
                for j in 0..i {
                    let avg = 0.5 * (rows[i][j] + rows[j][i]);
                    rows[i][j] = avg;
                    rows[j][i] = avg;
                }
            }
            rows
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_invariants_hold_on_random_matrices(rows in symmetric_rows(5)) {
        let a = SymmetricOperator::from_rows(rows).unwrap();
        let s = eigendecompose(&a).unwrap();
        prop_assert!(s.orthonormality_residual() <= 1e-10);
        prop_assert!(s.reconstruction_residual(&a) <= 1e-9 * (1.0 + a.max_abs_entry()));
        for w in s.eigenvalues().windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn apply_is_linear(
        rows in symmetric_rows(4),
        x in proptest::collection::vec(-2.0f64..2.0, 4),
        y in proptest::collection::vec(-2.0f64..2.0, 4),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let a = SymmetricOperator::from_rows(rows).unwrap();
        let x = Vector::new(x).unwrap();
        let y = Vector::new(y).unwrap();
        let combined = a.apply(&x.scaled(alpha).add_scaled(beta, &y));
        let separate = a.apply(&x).scaled(alpha).add_scaled(beta, &a.apply(&y));
        let scale = combined.norm().max(separate.norm()).max(1.0);
        prop_assert!(combined.sub(&separate).norm() <= 1e-12 * scale);
    }

    #[test]
    fn monotone_derivative_inequality(
        rows in symmetric_rows(4),
        x in proptest::collection::vec(-2.0f64..2.0, 4),
        v in proptest::collection::vec(-2.0f64..2.0, 4),
        z in proptest::collection::vec(-1.0f64..1.0, 4),
        excess in 0.01f64..3.0,
    ) {
        // The gradient of lambda ||.||^2 - J is strongly monotone with
        // modulus 2 (lambda - ||T||) as soon as lambda clears the norm.
        let a = SymmetricOperator::from_rows(rows).unwrap();
        let s = eigendecompose(&a).unwrap();
        let norm = spheremax::operator_norm(&s);
        let lambda = norm + excess;
        let x = Vector::new(x).unwrap();
        let v = Vector::new(v).unwrap();
        let z = Vector::new(z).unwrap();

        let field = |p: &Vector| p.scaled(2.0 * lambda).sub(&a.apply(p).sub(&z).scaled(2.0));
        let difference = x.sub(&v);
        let lhs = field(&x).sub(&field(&v)).dot(&difference);
        prop_assert!(lhs >= 2.0 * (lambda - norm) * difference.norm_sq() - 1e-9);
    }
}

#[test]
fn operator_norm_agrees_with_power_iteration() {
    let mut rng = SplitMix64::new(2024);
    for trial in 0..25 {
        let n = 2 + (trial % 6);
        let inst = random_symmetric_instance(n, &mut rng);
        let independent = power_iteration_norm(inst.operator(), &mut rng);
        assert!(
            (inst.op_norm() - independent).abs() <= 1e-8 * (1.0 + inst.op_norm()),
            "trial {trial}: {} vs {}",
            inst.op_norm(),
            independent
        );
    }
}

#[test]
fn resolvent_is_the_global_minimum_of_the_shifted_functional() {
    // lambda ||x||^2 - J(x) is convex with its critical point at the
    // resolvent solution, so no sampled point goes below it.
    let mut rng = SplitMix64::new(31);
    for trial in 0..20 {
        let n = 2 + (trial % 5);
        let inst = random_symmetric_instance(n, &mut rng);
        let lambda = inst.op_norm() + 0.3 + rng.uniform();
        let v_hat = spectral_resolvent(&inst, lambda).unwrap().v_hat;
        let shifted = |x: &Vector| lambda * x.norm_sq() - eval_j(inst.operator(), inst.z(), x);
        let floor = shifted(&v_hat);
        for _ in 0..200 {
            let x = v_hat.add_scaled(rng.range(-2.0, 2.0), &rng.gaussian_vector(n));
            assert!(shifted(&x) >= floor - 1e-9, "trial {trial}");
        }
    }
}

#[test]
fn g_is_strictly_decreasing_on_lambda_grids() {
    let mut rng = SplitMix64::new(7);
    for trial in 0..20 {
        let n = 2 + (trial % 6);
        let inst = random_symmetric_instance(n, &mut rng);
        let scale = 1.0 + inst.op_norm();
        let mut previous = f64::INFINITY;
        for k in 0..40 {
            let lambda = inst.op_norm() + 1e-3 * scale * (8.0f64).powf(k as f64 / 10.0);
            let g = g_value(&inst, lambda).unwrap();
            assert!(g < previous, "trial {trial}, sample {k}");
            previous = g;
        }
    }
}

#[test]
fn g_approaches_theta_from_below_when_finite() {
    let mut rng = SplitMix64::new(99);
    for trial in 0..10 {
        // Top eigenvalue attains the norm but z avoids its eigenspace.
        let eigenvalues = [1.5 + rng.uniform(), 0.8, 0.1, -0.9];
        let z_spectral = [0.0, 1.0, -0.5, 0.25];
        let inst = conjugated_instance(&eigenvalues, &z_spectral, &mut rng);
        let diagnosis = diagnose_boundary(&inst);
        assert!(diagnosis.theta.is_finite(), "trial {trial}");

        let scale = 1.0 + inst.op_norm();
        let mut previous = 0.0;
        for k in (0..12).rev() {
            let eps = 1e-6 * scale * 4.0f64.powi(k);
            let g = g_value(&inst, inst.op_norm() + eps).unwrap();
            assert!(g > previous, "trial {trial}: approach not monotone");
            assert!(g < diagnosis.theta, "trial {trial}: overshoot");
            previous = g;
        }
        assert!(
            diagnosis.theta - previous <= 1e-4 * diagnosis.theta,
            "trial {trial}: terminal gap {}",
            diagnosis.theta - previous
        );
    }
}

#[test]
fn g_blows_up_when_theta_is_infinite() {
    for seed in 0..10 {
        let inst = spheremax::positive_instance_generator(3 + (seed as usize % 4), seed);
        assert!(diagnose_boundary(&inst).theta.is_infinite());
        let g = g_value(&inst, inst.op_norm() + 1e-5).unwrap();
        assert!(g > 1e8, "seed {seed}: g = {g}");
    }
}

#[test]
fn maximizers_with_positive_top_eigenvalue_have_escape_directions() {
    // When the top eigenvalue is positive, any near-critical point can be
    // improved along the top eigenvector, so no global maximum exists.
    let mut rng = SplitMix64::new(55);
    for trial in 0..20 {
        let n = 3 + (trial % 4);
        let inst = random_symmetric_instance(n, &mut rng);
        let classification = classify_global_max(&inst, 1e-9);
        if classification.t_nonpositive {
            continue;
        }
        assert!(!classification.has_global_max);
        let Some(candidate) = classification.witness else {
            continue;
        };
        let direction = inst.spectrum().eigenvector(0);
        let base = eval_j(inst.operator(), inst.z(), &candidate);
        let improved = (1..=4).any(|k| {
            let eps = 10.0_f64.powi(-k);
            eval_j(
                inst.operator(),
                inst.z(),
                &candidate.add_scaled(eps, &direction),
            ) > base
                || eval_j(
                    inst.operator(),
                    inst.z(),
                    &candidate.add_scaled(-eps, &direction),
                ) > base
        });
        assert!(improved, "trial {trial}: no escape direction found");
    }
}

#[test]
fn interior_maximizer_matches_oracle_on_small_instances() {
    let mut rng = SplitMix64::new(17);
    for trial in 0..8 {
        let n = 2 + (trial % 5);
        let inst = random_symmetric_instance(n, &mut rng);
        let theta = diagnose_boundary(&inst).theta;
        let r = if theta.is_finite() { 0.5 * theta } else { 1.0 };
        let solution = maximize_on_sphere(&inst, r).unwrap();
        let (best, value) =
            spheremax::brute_force_max(inst.operator(), inst.z(), r, 10, trial as u64);
        assert!(
            (value - solution.gamma).abs() <= 1e-6 * (1.0 + solution.gamma.abs()),
            "trial {trial}: oracle value {value} vs solver {}",
            solution.gamma
        );
        assert!(
            best.sub(&solution.x_hat).norm() <= 1e-5 * (1.0 + r.sqrt()),
            "trial {trial}: maximizer gap {}",
            best.sub(&solution.x_hat).norm()
        );
    }
}
