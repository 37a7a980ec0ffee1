//! Maximization of J(x) = <T x - 2 z, x> over the sphere ||x||^2 = r.
//!
//! For r below the boundary threshold theta the unique maximizer is the
//! resolvent solution at the multiplier mu = g^{-1}(r) > ||T||, found by
//! safeguarded root-finding on the strictly decreasing secular sum. At and
//! beyond theta the solver follows standard trust-region practice: the
//! multiplier drops below the operator norm, and once it reaches the top
//! eigenvalue the maximizer gains a free top-eigenspace component and
//! uniqueness is lost. An independent projected-ascent oracle provides
//! reference values for everything.

use serde::Serialize;

use crate::boundary::diagnose_boundary;
use crate::error::Error;
use crate::instance::Instance;
use crate::linalg::{Operator, Vector};
use crate::resolvent::{g_sum, g_sum_derivative};
use crate::rng::SplitMix64;
use crate::tol;

/// Which branch produced a spherical solution.
///
/// `Interior`: multiplier above the operator norm, radius below theta, unique
/// well-posed maximum. `HardCase`: radius at or beyond theta; the multiplier
/// is clamped at or below the spectral boundary and uniqueness may fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Interior,
    HardCase,
}

/// A maximizer of J over the sphere of squared radius `r`.
#[derive(Debug, Clone, Serialize)]
pub struct SphericalSolution {
    pub r: f64,
    pub x_hat: Vector,
    /// Lagrange multiplier; equals the derivative of the value curve.
    pub multiplier: f64,
    /// J(x_hat).
    pub gamma: f64,
    pub regime: Regime,
    /// ||T x - mu x - z||, recomputed from the dense operator.
    pub euler_residual: f64,
    /// False when a sign or rotation freedom makes the maximizer non-unique.
    pub well_posed: bool,
}

/// J(x) = <T x, x> - 2 <z, x> for any linear map.
pub fn eval_j<O: Operator>(op: &O, z: &Vector, x: &Vector) -> f64 {
    op.apply(x).dot(x) - 2.0 * z.dot(x)
}

/// The secular sum sum_i z_i^2 / (lambda_i - mu)^2 on ]lambda_1, infinity[.
///
/// Coincides with [`crate::resolvent::g_value`] where both are defined, but is
/// also meaningful between the top eigenvalue and the operator norm.
pub fn secular_value(inst: &Instance, mu: f64) -> Result<f64, Error> {
    let gap_tol = tol::MU_EIGEN_GAP_REL * (1.0 + inst.op_norm());
    let lambda_1 = inst.spectrum().lambda_max();
    if let Some(&nearest) = inst
        .spectrum()
        .eigenvalues()
        .iter()
        .find(|&&li| (mu - li).abs() <= gap_tol)
    {
        return Err(Error::MuAtEigenvalue {
            mu,
            eigenvalue: nearest,
        });
    }
    if mu <= lambda_1 {
        return Err(Error::MuOutOfRange {
            mu,
            min: lambda_1,
            max: f64::INFINITY,
        });
    }
    Ok(g_sum(inst, mu))
}

/// Solves `g_sum(mu) = r` for mu in ]left_edge, infinity[ on a strictly
/// decreasing branch: geometric bracketing, bisection to a relative width of
/// [`tol::SECULAR_BISECT_REL`], then safeguarded Newton polish.
fn secular_root(inst: &Instance, r: f64, left_edge: f64) -> f64 {
    let scale = 1.0 + left_edge.abs();

    let mut delta = 1e-2 * scale;
    while g_sum(inst, left_edge + delta) <= r {
        delta *= 0.25;
        if delta < f64::EPSILON * scale {
            // r sits within rounding of the supremum at the edge; the root
            // is the edge itself to machine precision.
            return left_edge + delta;
        }
    }
    let mut lo = left_edge + delta;

    let mut width = scale;
    while g_sum(inst, left_edge + width) >= r {
        width *= 4.0;
        assert!(width.is_finite(), "secular bracket failed to close");
    }
    let mut hi = left_edge + width;

    while hi - lo > tol::SECULAR_BISECT_REL * (1.0 + lo.abs()) {
        let mid = 0.5 * (lo + hi);
        if g_sum(inst, mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut mu = 0.5 * (lo + hi);
    let mut best_mu = mu;
    let mut best_err = (g_sum(inst, mu) - r).abs();
    for _ in 0..8 {
        if best_err <= tol::SECULAR_TARGET_REL * r {
            break;
        }
        let derivative = g_sum_derivative(inst, mu);
        if derivative == 0.0 || !derivative.is_finite() {
            break;
        }
        let mut next = mu - (g_sum(inst, mu) - r) / derivative;
        if !(lo..=hi).contains(&next) {
            next = 0.5 * (lo + hi);
        }
        mu = next;
        let err = (g_sum(inst, mu) - r).abs();
        if err < best_err {
            best_err = err;
            best_mu = mu;
        }
    }
    best_mu
}

/// Inverts the resolvent curve: the unique mu > ||T|| with g(mu) = r.
///
/// Errors with [`Error::OutOfRange`] when r >= theta, the point where the
/// curve stops: beyond it the multiplier leaves ]||T||, infinity[.
pub fn invert_g(inst: &Instance, r: f64) -> Result<f64, Error> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius { r });
    }
    let theta = diagnose_boundary(inst).theta;
    if r >= theta {
        return Err(Error::OutOfRange { r, theta });
    }
    Ok(secular_root(inst, r, inst.op_norm()))
}

/// Data for the top-eigenvalue analysis used by the beyond-theta branch.
struct TopEigenData {
    lambda_1: f64,
    /// Indices of the eigenspace at lambda_1.
    top: Vec<bool>,
    /// Whether z has no component on that eigenspace.
    z_orthogonal: bool,
    /// Squared norm of the pseudo-inverse solution at mu = lambda_1
    /// (only meaningful when `z_orthogonal`).
    theta_top: f64,
}

fn top_eigen_data(inst: &Instance) -> TopEigenData {
    let eigenvalues = inst.spectrum().eigenvalues();
    let lambda_1 = inst.spectrum().lambda_max();
    let coincide = tol::EIG_COINCIDENCE_REL * (1.0 + inst.op_norm());
    let kernel_cut = tol::KERNEL_COMPONENT_REL * inst.z().norm();

    let top: Vec<bool> = eigenvalues
        .iter()
        .map(|&li| (lambda_1 - li).abs() <= coincide)
        .collect();
    let z_orthogonal = top
        .iter()
        .enumerate()
        .all(|(i, &t)| !t || inst.z_spectral()[i].abs() <= kernel_cut);
    let theta_top = if z_orthogonal {
        eigenvalues
            .iter()
            .zip(inst.z_spectral().as_slice())
            .zip(&top)
            .filter(|(_, &t)| !t)
            .map(|((&li, &zi), _)| {
                let d = li - lambda_1;
                (zi / d) * (zi / d)
            })
            .sum()
    } else {
        f64::INFINITY
    };

    TopEigenData {
        lambda_1,
        top,
        z_orthogonal,
        theta_top,
    }
}

fn solution_from_multiplier(inst: &Instance, r: f64, mu: f64, regime: Regime) -> SphericalSolution {
    let coords = Vector::from_fn(inst.dim(), |i| {
        inst.z_spectral()[i] / (inst.spectrum().eigenvalues()[i] - mu)
    });
    let x_hat = inst.spectrum().from_spectral(&coords);
    finish_solution(inst, r, mu, x_hat, regime, true)
}

fn finish_solution(
    inst: &Instance,
    r: f64,
    mu: f64,
    x_hat: Vector,
    regime: Regime,
    well_posed: bool,
) -> SphericalSolution {
    let gamma = eval_j(inst.operator(), inst.z(), &x_hat);
    let euler_residual = inst
        .operator()
        .apply(&x_hat)
        .add_scaled(-mu, &x_hat)
        .sub(inst.z())
        .norm();
    SphericalSolution {
        r,
        x_hat,
        multiplier: mu,
        gamma,
        regime,
        euler_residual,
        well_posed,
    }
}

/// Global maximizer of J over the sphere ||x||^2 = r.
///
/// Below theta this is the resolvent solution at mu = g^{-1}(r). At or beyond
/// a finite theta the multiplier continues down the secular curve into
/// ]lambda_1, ||T||] and, when z is orthogonal to the top eigenspace and the
/// radius exceeds the pseudo-inverse norm, clamps at lambda_1 with a free
/// top-eigenvector component of magnitude sqrt(r - ||x_min||^2), whose sign
/// freedom is recorded as `well_posed = false`.
pub fn maximize_on_sphere(inst: &Instance, r: f64) -> Result<SphericalSolution, Error> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius { r });
    }

    let theta = diagnose_boundary(inst).theta;
    if r < theta {
        let mu = secular_root(inst, r, inst.op_norm());
        return Ok(solution_from_multiplier(inst, r, mu, Regime::Interior));
    }

    // r >= theta (finite): the multiplier leaves ]||T||, infinity[. Radii
    // within rounding of the clamp threshold take the clamp branch so the
    // secular bracket is never squeezed against the pole.
    let top = top_eigen_data(inst);
    if top.z_orthogonal && r >= top.theta_top * (1.0 - 1e-12) {
        // Genuine hard case: clamp at lambda_1, fill the remaining mass with
        // a unit top eigenvector.
        let spill = (r - top.theta_top).max(0.0).sqrt();
        let coords = Vector::from_fn(inst.dim(), |i| {
            if top.top[i] {
                0.0
            } else {
                inst.z_spectral()[i] / (inst.spectrum().eigenvalues()[i] - top.lambda_1)
            }
        });
        let top_index = top.top.iter().position(|&t| t).expect("top eigenspace");
        let q = inst.spectrum().eigenvector(top_index);
        let x_hat = inst.spectrum().from_spectral(&coords).add_scaled(spill, &q);
        let unique = spill <= 1e-8 * r.sqrt();
        return Ok(finish_solution(
            inst,
            r,
            top.lambda_1,
            x_hat,
            Regime::HardCase,
            unique,
        ));
    }

    // The secular equation still has a root, now in ]lambda_1, ||T||]; the
    // maximizer stays unique but sits outside the resolvent curve's range.
    let mu = secular_root(inst, r, top.lambda_1);
    Ok(solution_from_multiplier(inst, r, mu, Regime::HardCase))
}

/// gamma(r) = sup of J over the sphere of squared radius r.
pub fn gamma_value(inst: &Instance, r: f64) -> Result<f64, Error> {
    Ok(maximize_on_sphere(inst, r)?.gamma)
}

/// gamma'(r) = g^{-1}(r), defined for 0 < r < theta.
pub fn gamma_prime(inst: &Instance, r: f64) -> Result<f64, Error> {
    invert_g(inst, r)
}

/// One projected-ascent run on the sphere from a given start point.
fn ascent_run<O: Operator>(op: &O, z: &Vector, r: f64, start: Vector) -> (Vector, f64) {
    let sqrt_r = r.sqrt();
    let project = |y: &Vector| -> Option<Vector> {
        let norm = y.norm();
        if norm <= 1e-300 {
            None
        } else {
            Some(y.scaled(sqrt_r / norm))
        }
    };

    let alpha_0 = 1.0 / (2.0 * op.frobenius_norm() + 1.0);
    let mut x = start;
    let mut value = eval_j(op, z, &x);

    for _ in 0..200 {
        let gradient = op
            .apply(&x)
            .add(&op.apply_transpose(&x))
            .add_scaled(-2.0, z);
        let mut alpha = alpha_0;
        let mut improved = false;
        while alpha > 1e-20 {
            if let Some(candidate) = project(&x.add_scaled(alpha, &gradient)) {
                let candidate_value = eval_j(op, z, &candidate);
                if candidate_value > value {
                    x = candidate;
                    value = candidate_value;
                    improved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, value)
}

/// In dimension two the whole circle can be scanned; the best grid point is
/// then polished by the ascent loop.
fn angular_scan<O: Operator>(op: &O, z: &Vector, r: f64) -> (Vector, f64) {
    const GRID: usize = 1_000_000;
    let sqrt_r = r.sqrt();
    let mut best = (Vector::zeros(2), f64::NEG_INFINITY);
    for k in 0..GRID {
        let angle = 2.0 * std::f64::consts::PI * (k as f64) / (GRID as f64);
        let x = Vector::from_fn(2, |i| {
            sqrt_r * if i == 0 { angle.cos() } else { angle.sin() }
        });
        let value = eval_j(op, z, &x);
        if value > best.1 {
            best = (x, value);
        }
    }
    ascent_run(op, z, r, best.0)
}

/// Every restart of the ascent oracle, in order: seeded random starts, plus a
/// dense angular scan when the dimension is two. Useful for witnessing
/// non-unique maximizers; [`brute_force_max`] keeps only the best.
pub fn brute_force_runs<O: Operator>(
    op: &O,
    z: &Vector,
    r: f64,
    restarts: usize,
    seed: u64,
) -> Vec<(Vector, f64)> {
    assert!(r > 0.0, "oracle radius must be positive");
    assert!(restarts >= 1, "need at least one restart");
    let mut rng = SplitMix64::new(seed);
    let mut runs = Vec::with_capacity(restarts + 1);
    for _ in 0..restarts {
        let start = rng.on_sphere(op.dim(), r);
        runs.push(ascent_run(op, z, r, start));
    }
    if op.dim() == 2 {
        runs.push(angular_scan(op, z, r));
    }
    runs
}

/// Best point and value found by the projected-ascent oracle.
pub fn brute_force_max<O: Operator>(
    op: &O,
    z: &Vector,
    r: f64,
    restarts: usize,
    seed: u64,
) -> (Vector, f64) {
    brute_force_runs(op, z, r, restarts, seed)
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite values"))
        .expect("at least one restart")
}

/// Report of the quadratic-growth audit behind well-posedness.
#[derive(Debug, Clone, Serialize)]
pub struct WellPosednessReport {
    pub r: f64,
    pub multiplier: f64,
    pub samples: usize,
    /// Max over samples of |gamma - J(x) - <(mu I - T)(x - x_hat), x - x_hat>|
    /// relative to 1 + |gamma|. Zero up to round-off: the identity is exact.
    pub max_identity_error: f64,
    /// Max over samples of the amount by which gamma - J(x) undercuts
    /// (mu - lambda_1) ||x - x_hat||^2. Should be zero: the gap dominates.
    pub max_growth_violation: f64,
}

/// Samples the sphere and checks the exact identity
/// gamma - J(x) = <(mu I - T)(x - x_hat), x - x_hat>, plus the quadratic
/// growth bound with modulus mu - lambda_1. This is the assertable form of
/// "every maximizing sequence converges to the maximizer".
pub fn wellposedness_check(
    inst: &Instance,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<WellPosednessReport, Error> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius { r });
    }
    let theta = diagnose_boundary(inst).theta;
    if r >= theta {
        return Err(Error::OutOfRange { r, theta });
    }

    let solution = maximize_on_sphere(inst, r)?;
    let mu = solution.multiplier;
    let lambda_1 = inst.spectrum().lambda_max();
    let gamma_scale = 1.0 + solution.gamma.abs();

    let mut rng = SplitMix64::new(seed);
    let mut max_identity_error = 0.0_f64;
    let mut max_growth_violation = 0.0_f64;
    for _ in 0..samples {
        let x = rng.on_sphere(inst.dim(), r);
        let difference = x.sub(&solution.x_hat);
        let lhs = solution.gamma - eval_j(inst.operator(), inst.z(), &x);
        let quadratic =
            mu * difference.norm_sq() - inst.operator().apply(&difference).dot(&difference);
        max_identity_error = max_identity_error.max((lhs - quadratic).abs() / gamma_scale);
        let growth_floor = (mu - lambda_1) * difference.norm_sq();
        max_growth_violation = max_growth_violation.max(growth_floor - lhs);
    }

    Ok(WellPosednessReport {
        r,
        multiplier: mu,
        samples,
        max_identity_error,
        max_growth_violation: max_growth_violation.max(0.0),
    })
}
