//! Solving T x - lambda x = z for lambda above the operator norm.
//!
//! Two independent backends: a closed-form spectral solve and a Banach
//! fixed-point iteration. The squared norm of the solution as a function of
//! lambda is the curve `g`, evaluated directly from the spectral sum.

use serde::Serialize;

use crate::error::Error;
use crate::instance::Instance;
use crate::linalg::{Operator, Vector};

/// Solution of T x - lambda x = z together with its achieved residual.
#[derive(Debug, Clone, Serialize)]
pub struct ResolventSolution {
    pub lambda: f64,
    pub v_hat: Vector,
    /// ||T v - lambda v - z||, recomputed from the dense operator.
    pub residual: f64,
    /// Fixed-point steps taken; 0 for the spectral backend.
    pub iterations: usize,
}

fn residual_norm(inst: &Instance, lambda: f64, v: &Vector) -> f64 {
    inst.operator()
        .apply(v)
        .add_scaled(-lambda, v)
        .sub(inst.z())
        .norm()
}

/// Closed-form solve in the eigenvector basis: v_i = z_i / (lambda_i - lambda).
pub fn spectral_resolvent(inst: &Instance, lambda: f64) -> Result<ResolventSolution, Error> {
    inst.require_lambda_above_norm(lambda)?;
    let coords = Vector::from_fn(inst.dim(), |i| {
        inst.z_spectral()[i] / (inst.spectrum().eigenvalues()[i] - lambda)
    });
    let v_hat = inst.spectrum().from_spectral(&coords);
    let residual = residual_norm(inst, lambda, &v_hat);
    Ok(ResolventSolution {
        lambda,
        v_hat,
        residual,
        iterations: 0,
    })
}

/// Iteration cap for the fixed-point backend: the worst-case count for the
/// step-size criterion under geometric decay with ratio q = ||T||/lambda,
/// plus slack, clamped to something that keeps a mistaken call from hanging.
fn contraction_cap(tol: f64, q: f64) -> usize {
    const SLACK: usize = 64;
    const HARD_CAP: usize = 5_000_000;
    if q <= 1e-6 {
        return SLACK;
    }
    let estimate = ((tol * (1.0 - q)).ln() / q.ln()).ceil();
    if !estimate.is_finite() || estimate < 0.0 {
        return SLACK;
    }
    ((estimate as usize).saturating_add(SLACK)).min(HARD_CAP)
}

/// Fixed-point iteration x <- (T x - z) / lambda from x0 = 0, stopped when
/// the step norm drops to `tol`. The map is a contraction with ratio
/// ||T||/lambda < 1, so the result lies within tol * lambda / (lambda - ||T||)
/// of the exact solution.
pub fn contraction_resolvent(
    inst: &Instance,
    lambda: f64,
    tol: f64,
) -> Result<ResolventSolution, Error> {
    contraction_resolvent_trace(inst, lambda, tol).map(|(solution, _)| solution)
}

/// Same as [`contraction_resolvent`] but also returns the step norms, so the
/// observed contraction ratio can be audited.
pub fn contraction_resolvent_trace(
    inst: &Instance,
    lambda: f64,
    tol: f64,
) -> Result<(ResolventSolution, Vec<f64>), Error> {
    inst.require_lambda_above_norm(lambda)?;
    assert!(tol > 0.0, "tolerance must be positive");

    let q = inst.op_norm() / lambda;
    let cap = contraction_cap(tol, q);
    let inv_lambda = 1.0 / lambda;

    let mut x = Vector::zeros(inst.dim());
    let mut step_norms = Vec::new();
    for iteration in 1..=cap {
        let next = inst.operator().apply(&x).sub(inst.z()).scaled(inv_lambda);
        let step = next.sub(&x).norm();
        step_norms.push(step);
        x = next;
        if step <= tol {
            let residual = residual_norm(inst, lambda, &x);
            return Ok((
                ResolventSolution {
                    lambda,
                    v_hat: x,
                    residual,
                    iterations: iteration,
                },
                step_norms,
            ));
        }
    }
    Err(Error::IterationCapExceeded { cap, lambda })
}

/// g(lambda) = ||v_lambda||^2, evaluated as the spectral sum
/// sum_i z_i^2 / (lambda_i - lambda)^2 without forming the solution.
pub fn g_value(inst: &Instance, lambda: f64) -> Result<f64, Error> {
    inst.require_lambda_above_norm(lambda)?;
    Ok(g_sum(inst, lambda))
}

/// The bare secular sum; callers are responsible for domain checks.
pub(crate) fn g_sum(inst: &Instance, mu: f64) -> f64 {
    inst.spectrum()
        .eigenvalues()
        .iter()
        .zip(inst.z_spectral().as_slice())
        .map(|(&li, &zi)| {
            let d = li - mu;
            (zi / d) * (zi / d)
        })
        .sum()
}

/// Derivative of the secular sum in mu: -2 sum_i z_i^2 / (mu - lambda_i)^3.
pub(crate) fn g_sum_derivative(inst: &Instance, mu: f64) -> f64 {
    -2.0 * inst
        .spectrum()
        .eigenvalues()
        .iter()
        .zip(inst.z_spectral().as_slice())
        .map(|(&li, &zi)| {
            let d = mu - li;
            zi * zi / (d * d * d)
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_solve_on_diagonal_instance() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap();
        let sol = spectral_resolvent(&inst, 3.0).unwrap();
        assert!((sol.v_hat[0] - 0.0).abs() < 1e-15);
        assert!((sol.v_hat[1] + 0.5).abs() < 1e-15);
        assert!(sol.residual <= 1e-10 * (1.0 + inst.z().norm()));
    }

    #[test]
    fn spectral_solve_with_dominant_negative_eigenvalue() {
        let inst = Instance::from_diag(&[1.0, -3.0], &[1.0, 0.0]).unwrap();
        let sol = spectral_resolvent(&inst, 4.0).unwrap();
        assert!((sol.v_hat[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((sol.v_hat[1] - 0.0).abs() < 1e-15);
    }

    #[test]
    fn zero_operator_gives_minus_z_over_lambda() {
        let inst = Instance::new(
            crate::SymmetricOperator::zeros(2),
            Vector::from_slice(&[1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let sol = spectral_resolvent(&inst, 1.0).unwrap();
        assert_eq!(sol.v_hat.as_slice(), &[-1.0, 0.0]);
    }

    #[test]
    fn lambda_at_or_below_norm_is_rejected() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap();
        for lambda in [2.0, 1.5, -4.0, 2.0 + 1e-15] {
            let err = spectral_resolvent(&inst, lambda).unwrap_err();
            assert!(
                matches!(err, Error::LambdaTooSmall { .. }),
                "lambda={lambda}"
            );
        }
        assert!(spectral_resolvent(&inst, 2.0 + 1e-9).is_ok());
    }

    #[test]
    fn contraction_matches_spectral_backend() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap();
        let tol = 1e-12;
        let lambda = 3.0;
        let spectral = spectral_resolvent(&inst, lambda).unwrap();
        let fixed_point = contraction_resolvent(&inst, lambda, tol).unwrap();
        let gap = spectral.v_hat.sub(&fixed_point.v_hat).norm();
        assert!(
            gap <= tol * lambda / (lambda - inst.op_norm()),
            "backend gap {gap}"
        );
        assert!(fixed_point.iterations > 0);
    }

    #[test]
    fn contraction_on_zero_operator_converges_in_one_step() {
        let inst = Instance::new(
            crate::SymmetricOperator::zeros(2),
            Vector::from_slice(&[1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let sol = contraction_resolvent(&inst, 2.0, 1e-12).unwrap();
        assert_eq!(sol.v_hat.as_slice(), &[-0.5, 0.0]);
        // First step lands on -z/lambda; the second confirms it moved nowhere.
        assert!(sol.iterations <= 2);
    }

    #[test]
    fn first_iterate_is_minus_z_over_lambda() {
        let inst = Instance::from_diag(&[0.5, -0.25], &[2.0, 1.0]).unwrap();
        let (_, steps) = contraction_resolvent_trace(&inst, 2.0, 1e-13).unwrap();
        // Step 1 from x0 = 0 has norm ||z|| / lambda.
        assert!((steps[0] - inst.z().norm() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn step_norms_contract_at_the_predicted_ratio() {
        let inst = Instance::from_diag(&[1.5, -0.5, 0.25], &[1.0, 1.0, 1.0]).unwrap();
        let lambda = 2.0;
        let q = inst.op_norm() / lambda;
        let (_, steps) = contraction_resolvent_trace(&inst, lambda, 1e-13).unwrap();
        // Ratios are only meaningful while the steps sit above the
        // floating-point noise floor of the iteration arithmetic.
        let floor = 1e-3 * (1.0 + inst.z().norm());
        for pair in steps.windows(2) {
            if pair[1] >= floor {
                assert!(
                    pair[1] / pair[0] <= q + 1e-10,
                    "ratio {}",
                    pair[1] / pair[0]
                );
            }
        }
    }

    #[test]
    fn g_value_matches_closed_form() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!((g_value(&inst, 3.0).unwrap() - 0.25).abs() < 1e-15);
        let inst = Instance::from_diag(&[1.0, -3.0], &[1.0, 0.0]).unwrap();
        assert!((g_value(&inst, 4.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn g_decays_toward_zero_for_large_lambda() {
        let inst = Instance::from_diag(&[1.0, -2.0, 0.5], &[1.0, 2.0, -1.0]).unwrap();
        let mut previous = f64::INFINITY;
        for k in 0..40 {
            let lambda = 2.5 + 2.0_f64.powf(k as f64 / 4.0);
            let g = g_value(&inst, lambda).unwrap();
            assert!(g < previous);
            previous = g;
        }
        assert!(previous < 1e-4);
    }
}
