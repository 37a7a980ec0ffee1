//! Named tolerances shared across the crate.
//!
//! Every comparison threshold used by constructors, diagnosers and solvers is
//! defined here so borderline cases can be constructed deliberately in tests.

/// Symmetry check in [`SymmetricOperator`](crate::SymmetricOperator):
/// max |a_ij - a_ji| <= SYMMETRY_REL * (1 + max |a_ij|).
pub const SYMMETRY_REL: f64 = 1e-12;

/// Jacobi sweep stop: off-diagonal Frobenius norm <= JACOBI_OFF_REL * ||A||_F.
pub const JACOBI_OFF_REL: f64 = 1e-14;

/// Hard cap on Jacobi sweeps; quadratic convergence makes ~10 typical.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Resolvent solves require lambda - ||T|| >= LAMBDA_MARGIN_REL * (1 + ||T||).
pub const LAMBDA_MARGIN_REL: f64 = 1e-12;

/// Eigenvalue counts as coinciding with a reference value (e.g. ||T||) when
/// |lambda_i - ref| <= EIG_COINCIDENCE_REL * (1 + ||T||). Coupled to the
/// eigensolver accuracy.
pub const EIG_COINCIDENCE_REL: f64 = 1e-9;

/// A spectral coefficient of z counts as zero on a kernel when
/// |z_i| <= KERNEL_COMPONENT_REL * ||z||.
pub const KERNEL_COMPONENT_REL: f64 = 1e-10;

/// Secular-sum evaluations reject mu within MU_EIGEN_GAP_REL * (1 + ||T||)
/// of an eigenvalue.
pub const MU_EIGEN_GAP_REL: f64 = 1e-12;

/// Bisection on the secular equation stops at this relative bracket width.
pub const SECULAR_BISECT_REL: f64 = 1e-13;

/// Target residual of the secular root: |g(mu) - r| <= SECULAR_TARGET_REL * r.
pub const SECULAR_TARGET_REL: f64 = 1e-12;

/// Relative step for central finite differences of the value curve.
pub const FD_RELATIVE_STEP: f64 = 1e-4;

/// Divided second differences below -CONCAVITY_STRICT count as strictly
/// concave; above it the segment is flagged as flat or convex.
pub const CONCAVITY_STRICT: f64 = 1e-12;

/// Dirichlet solves require 0 < mu <= lambda1 * (1 - MU_MARGIN_REL).
pub const MU_MARGIN_REL: f64 = 1e-10;
