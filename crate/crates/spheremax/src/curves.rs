//! Sampling and auditing the value curve, plus two counterexamples that show
//! which hypotheses the curve structure actually needs.
//!
//! On ]0, theta[ the value curve gamma is expected to be increasing, strictly
//! concave, and differentiable with derivative g^{-1}; the audit checks all of
//! that numerically on a grid, with central differences as the independent
//! route to the derivative. The first counterexample drops symmetry (a
//! rotation-shear map on R^2) and watches the Euler identity fail; the second
//! truncates the shift-like operator diag(0, 1, ..., 1) and watches strict
//! concavity and uniqueness fail beyond the threshold.

use serde::Serialize;

use crate::boundary::diagnose_boundary;
use crate::error::Error;
use crate::instance::Instance;
use crate::linalg::{GeneralOperator, Operator, SymmetricOperator, Vector};
use crate::serde_util::serialize_maybe_infinite;
use crate::spherical::{
    brute_force_max, brute_force_runs, gamma_value, invert_g, maximize_on_sphere,
};
use crate::tol;

/// One node of a sampled value curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurveSample {
    pub r: f64,
    pub gamma: f64,
    /// Multiplier reported by the sphere solver.
    pub gamma_prime: f64,
    /// Root of the secular equation at this radius.
    pub g_inverse: f64,
    pub euler_residual: f64,
    /// Central difference of gamma with relative step [`tol::FD_RELATIVE_STEP`].
    pub fd_gamma_prime: f64,
}

/// Predicates computed from a sampled curve.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    /// gamma strictly increasing across the samples.
    pub monotone_gamma: bool,
    /// All divided second differences below -[`tol::CONCAVITY_STRICT`].
    pub strictly_concave: bool,
    /// g^{-1} strictly decreasing across the samples.
    pub monotone_g: bool,
    /// Max relative gap between the multiplier and the central difference.
    pub derivative_match: f64,
    pub euler_max_residual: f64,
    pub samples: Vec<CurveSample>,
}

/// Geometric grid of `steps` radii in [r_min, r_max].
pub(crate) fn geometric_grid(r_min: f64, r_max: f64, steps: usize) -> Vec<f64> {
    let ratio = r_max / r_min;
    (0..steps)
        .map(|k| r_min * ratio.powf(k as f64 / (steps - 1) as f64))
        .collect()
}

/// Samples the value curve on a geometric grid inside ]0, theta[.
///
/// Geometric rather than uniform so the steep region near r -> 0 (where the
/// derivative blows up) is represented.
pub fn sample_curve(
    inst: &Instance,
    r_min: f64,
    r_max: f64,
    steps: usize,
) -> Result<Vec<CurveSample>, Error> {
    if steps < 3 {
        return Err(Error::TooFewSamples {
            got: steps,
            required: 3,
        });
    }
    if !(r_min > 0.0) {
        return Err(Error::NonPositiveRadius { r: r_min });
    }
    let theta = diagnose_boundary(inst).theta;
    if !(r_min < r_max) || r_max >= theta {
        return Err(Error::OutOfRange { r: r_max, theta });
    }

    geometric_grid(r_min, r_max, steps)
        .into_iter()
        .map(|r| sample_at(inst, r))
        .collect()
}

fn sample_at(inst: &Instance, r: f64) -> Result<CurveSample, Error> {
    let solution = maximize_on_sphere(inst, r)?;
    let g_inverse = invert_g(inst, r)?;
    let step = tol::FD_RELATIVE_STEP * r;
    let fd_gamma_prime =
        (gamma_value(inst, r + step)? - gamma_value(inst, r - step)?) / (2.0 * step);
    Ok(CurveSample {
        r,
        gamma: solution.gamma,
        gamma_prime: solution.multiplier,
        g_inverse,
        euler_residual: solution.euler_residual,
        fd_gamma_prime,
    })
}

/// Evaluates the audit predicates over a sampled curve (needs >= 3 samples in
/// increasing radius order).
pub fn audit_curve(samples: &[CurveSample]) -> Result<AuditReport, Error> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            required: 3,
        });
    }

    let monotone_gamma = samples.windows(2).all(|w| w[1].gamma > w[0].gamma);
    let monotone_g = samples.windows(2).all(|w| w[1].g_inverse < w[0].g_inverse);
    let strictly_concave = samples.windows(3).all(|w| {
        divided_second_difference(
            (w[0].r, w[0].gamma),
            (w[1].r, w[1].gamma),
            (w[2].r, w[2].gamma),
        ) < -tol::CONCAVITY_STRICT
    });
    let derivative_match = samples
        .iter()
        .map(|s| ((s.gamma_prime - s.fd_gamma_prime) / s.gamma_prime).abs())
        .fold(0.0_f64, f64::max);
    let euler_max_residual = samples
        .iter()
        .map(|s| s.euler_residual)
        .fold(0.0_f64, f64::max);

    Ok(AuditReport {
        monotone_gamma,
        strictly_concave,
        monotone_g,
        derivative_match,
        euler_max_residual,
        samples: samples.to_vec(),
    })
}

/// Standard divided second difference f[a, b, c]; negative means concave.
pub(crate) fn divided_second_difference(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let first_ab = (b.1 - a.1) / (b.0 - a.0);
    let first_bc = (c.1 - b.1) / (c.0 - b.0);
    (first_bc - first_ab) / (c.0 - a.0)
}

/// One radius of the non-symmetric counterexample report.
#[derive(Debug, Clone, Serialize)]
pub struct R2Point {
    pub r: f64,
    pub x_hat: Vec<f64>,
    pub gamma: f64,
    /// Central difference of the oracle value curve.
    pub gamma_prime_fd: f64,
    /// T(x_hat) - gamma'(r) x_hat - z, which stays away from zero here.
    pub euler_residual_vector: Vec<f64>,
    /// Distance of the maximizer from (-sqrt(r), 0).
    pub maximizer_error: f64,
    /// |gamma - (r + 2 sqrt(r))|.
    pub gamma_error: f64,
    /// Distance of the residual vector from (0, sqrt(r)).
    pub residual_error: f64,
}

/// Report for the rotation-shear map on R^2 with z = (1, 0): the maximizer
/// and value curve have closed forms, but the Euler identity fails because
/// the map is not symmetric.
#[derive(Debug, Clone, Serialize)]
pub struct R2Report {
    pub points: Vec<R2Point>,
    pub max_maximizer_error: f64,
    pub max_gamma_error: f64,
    pub max_residual_error: f64,
    /// Whether every radius shows a residual bounded away from zero.
    pub euler_identity_fails: bool,
}

const R2_RADII: [f64; 3] = [0.25, 1.0, 4.0];
const R2_RESTARTS: usize = 8;

/// Runs the oracle on the non-symmetric map (t, s) -> (t + s, s - t) with
/// z = (1, 0) and reports how the curve behaves: gamma(r) = r + 2 sqrt(r)
/// with maximizer (-sqrt(r), 0), yet T(x) - gamma'(r) x - z = (0, sqrt(r)).
pub fn counterexample_r2(seed: u64) -> R2Report {
    let op = GeneralOperator::from_rows(vec![vec![1.0, 1.0], vec![-1.0, 1.0]])
        .expect("fixed 2x2 matrix");
    let z = Vector::from_slice(&[1.0, 0.0]).expect("fixed vector");

    let oracle_gamma = |r: f64| brute_force_max(&op, &z, r, R2_RESTARTS, seed).1;

    let mut points = Vec::with_capacity(R2_RADII.len());
    for &r in &R2_RADII {
        let (x_hat, gamma) = brute_force_max(&op, &z, r, R2_RESTARTS, seed);
        let step = tol::FD_RELATIVE_STEP * r;
        let gamma_prime_fd = (oracle_gamma(r + step) - oracle_gamma(r - step)) / (2.0 * step);
        let residual = op.apply(&x_hat).add_scaled(-gamma_prime_fd, &x_hat).sub(&z);

        let sqrt_r = r.sqrt();
        let expected_x = Vector::from_slice(&[-sqrt_r, 0.0]).expect("fixed vector");
        let expected_residual = Vector::from_slice(&[0.0, sqrt_r]).expect("fixed vector");
        points.push(R2Point {
            r,
            x_hat: x_hat.to_vec(),
            gamma,
            gamma_prime_fd,
            euler_residual_vector: residual.to_vec(),
            maximizer_error: x_hat.sub(&expected_x).norm(),
            gamma_error: (gamma - (r + 2.0 * sqrt_r)).abs(),
            residual_error: residual.sub(&expected_residual).norm(),
        });
    }

    let max_maximizer_error = points.iter().map(|p| p.maximizer_error).fold(0.0, f64::max);
    let max_gamma_error = points.iter().map(|p| p.gamma_error).fold(0.0, f64::max);
    let max_residual_error = points.iter().map(|p| p.residual_error).fold(0.0, f64::max);
    let euler_identity_fails = points.iter().all(|p| {
        Vector::from_slice(&p.euler_residual_vector)
            .map(|v| v.norm() > 0.5 * p.r.sqrt())
            .unwrap_or(false)
    });

    R2Report {
        points,
        max_maximizer_error,
        max_gamma_error,
        max_residual_error,
        euler_identity_fails,
    }
}

/// One radius of the truncated-shift counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct L2Sample {
    pub r: f64,
    pub gamma: f64,
    pub oracle_gamma: f64,
    pub well_posed: bool,
}

/// Max absolute error of a candidate closed form against the computed curve.
#[derive(Debug, Clone, Serialize)]
pub struct FitError {
    pub form: String,
    pub max_abs_err: f64,
}

/// Two distinct maximizers of (numerically) equal value at the same radius.
#[derive(Debug, Clone, Serialize)]
pub struct MultiMaxWitness {
    pub r: f64,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub value_gap: f64,
    pub separation: f64,
}

/// Report for the truncated operator diag(0, 1, ..., 1) on R^n, the
/// finite-dimensional stand-in for a symmetric but non-compact map.
#[derive(Debug, Clone, Serialize)]
pub struct L2Report {
    pub n: usize,
    /// 1 puts z on the annihilated coordinate, 2 on the first identity one.
    pub z_index: usize,
    #[serde(serialize_with = "serialize_maybe_infinite")]
    pub theta: f64,
    pub samples: Vec<L2Sample>,
    /// Candidate closed forms, reported side by side so the data itself
    /// adjudicates which one the supremum actually follows.
    pub fits: Vec<FitError>,
    /// A consecutive triple of samples with a vanishing second difference.
    pub affine_tail_detected: bool,
    pub multi_max: Option<MultiMaxWitness>,
}

const L2_GRID_MIN: f64 = 0.25;
const L2_GRID_MAX: f64 = 6.25;
const L2_GRID_STEPS: usize = 13;
const L2_RESTARTS: usize = 12;

/// Computes the value curve of the truncated shift-like operator on a grid
/// straddling r = 1 and r = 4, for z on coordinate `z_index` (1 or 2).
///
/// With z on the annihilated coordinate the curve is 2 sqrt(r) up to r = 1
/// and r + 1 beyond: an affine tail with non-unique maximizers, so strict
/// concavity and well-posedness both fail past the threshold. With z on an
/// identity coordinate the threshold is infinite and the computed supremum is
/// r + 2 sqrt(r), attained at -sqrt(r) on that coordinate; the sign-flipped
/// stationary value r - 2 sqrt(r) is reported alongside to document how far
/// the data sits from it.
pub fn counterexample_l2(n: usize, z_index: usize, seed: u64) -> Result<L2Report, Error> {
    if n < 4 {
        return Err(Error::DimensionTooSmall {
            got: n,
            required: 4,
        });
    }
    if z_index != 1 && z_index != 2 {
        return Err(Error::Schema(format!(
            "z_index must be 1 or 2, got {z_index}"
        )));
    }

    let mut diag = vec![1.0; n];
    diag[0] = 0.0;
    let t = SymmetricOperator::from_diag(&diag);
    let z = Vector::basis(n, z_index - 1);
    let inst = Instance::new(t, z)?;
    let theta = diagnose_boundary(&inst).theta;

    let grid = geometric_grid(L2_GRID_MIN, L2_GRID_MAX, L2_GRID_STEPS);
    let mut samples = Vec::with_capacity(grid.len());
    for &r in &grid {
        let solution = maximize_on_sphere(&inst, r)?;
        let (_, oracle_gamma) = brute_force_max(inst.operator(), inst.z(), r, L2_RESTARTS, seed);
        samples.push(L2Sample {
            r,
            gamma: solution.gamma,
            oracle_gamma,
            well_posed: solution.well_posed,
        });
    }

    let fit = |label: &str, f: &dyn Fn(f64) -> f64| FitError {
        form: label.to_string(),
        max_abs_err: samples
            .iter()
            .map(|s| (s.gamma - f(s.r)).abs())
            .fold(0.0, f64::max),
    };
    let fits = if z_index == 1 {
        vec![fit("2*sqrt(r) for r<=1, r+1 for r>=1", &|r| {
            if r <= 1.0 {
                2.0 * r.sqrt()
            } else {
                r + 1.0
            }
        })]
    } else {
        vec![
            fit("r+2*sqrt(r)", &|r| r + 2.0 * r.sqrt()),
            fit("r-2*sqrt(r)", &|r| r - 2.0 * r.sqrt()),
        ]
    };

    let affine_tail_detected = samples.windows(3).any(|w| {
        divided_second_difference(
            (w[0].r, w[0].gamma),
            (w[1].r, w[1].gamma),
            (w[2].r, w[2].gamma),
        ) >= -tol::CONCAVITY_STRICT
    });

    let multi_max = find_multi_max(&inst, 4.0, seed);

    Ok(L2Report {
        n,
        z_index,
        theta,
        samples,
        fits,
        affine_tail_detected,
        multi_max,
    })
}

/// Looks for two oracle runs that agree in value but land far apart.
fn find_multi_max(inst: &Instance, r: f64, seed: u64) -> Option<MultiMaxWitness> {
    let runs = brute_force_runs(inst.operator(), inst.z(), r, L2_RESTARTS, seed);
    let best = runs
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let near_best: Vec<&(Vector, f64)> = runs
        .iter()
        .filter(|(_, v)| (best - v).abs() <= 1e-6 * (1.0 + best.abs()))
        .collect();
    for (i, (xi, vi)) in near_best.iter().enumerate() {
        for (xj, vj) in near_best.iter().skip(i + 1) {
            let separation = xi.sub(xj).norm();
            if separation >= 0.05 * r.sqrt() {
                return Some(MultiMaxWitness {
                    r,
                    first: xi.to_vec(),
                    second: xj.to_vec(),
                    value_gap: (vi - vj).abs(),
                    separation,
                });
            }
        }
    }
    None
}
