//! Resolvent curves, boundary diagnosis and sphere-constrained quadratic
//! maximization for symmetric operators on R^n.
//!
//! Given a symmetric operator `T` and a non-zero vector `z`, the crate studies
//! the family of linear equations T x - lambda x = z for lambda above the
//! operator norm and the quadratic functional J(x) = <T x - 2 z, x> restricted
//! to spheres ||x||^2 = r. The two sides are linked: the squared solution norm
//! g(lambda) is strictly decreasing, its range ]0, theta[ is bounded by the
//! threshold of the boundary equation T x - ||T|| x = z, and for every radius
//! below theta the unique spherical maximizer of J is the resolvent solution
//! at the multiplier g^{-1}(r), with the value curve gamma satisfying
//! gamma' = g^{-1}.
//!
//! Modules:
//! - [`linalg`], [`eigen`], [`instance`]: dense vectors and operators, Jacobi
//!   eigendecomposition, validated problem instances.
//! - [`resolvent`]: spectral and fixed-point solvers for T x - lambda x = z
//!   and the curve g.
//! - [`boundary`]: the solution set of the boundary equation, the threshold
//!   theta, and a classifier for unconstrained global maxima of J.
//! - [`spherical`]: the sphere solver (interior and hard-case branches), the
//!   secular root-finder, a projected-ascent oracle and the well-posedness
//!   audit.
//! - [`curves`]: grid sampling of gamma, monotonicity/concavity audits, and
//!   two counterexamples showing symmetry and weak continuity are load-bearing.
//! - [`dirichlet`]: a 1D finite-difference Dirichlet problem reduced to the
//!   abstract machinery through the discrete energy inner product.
//!
//! ```
//! use spheremax::{Instance, spherical};
//!
//! // T = diag(2, 1), z = (0, 1): theta = 1, and below it the value curve is
//! // gamma(r) = r + 2 sqrt(r).
//! let inst = Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap();
//! let sol = spherical::maximize_on_sphere(&inst, 0.25).unwrap();
//! assert!((sol.gamma - 1.25).abs() < 1e-9);
//! assert!((sol.multiplier - 3.0).abs() < 1e-9);
//! ```

// Guards are written `!(x > 0.0)` on purpose: the negated form also rejects
// NaN, which `x <= 0.0` would let through. Dense matrix code indexes paired
// row/column positions, where range loops read better than iterators.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod boundary;
pub mod curves;
pub mod dirichlet;
pub mod eigen;
pub mod error;
pub mod instance;
pub mod linalg;
pub mod resolvent;
pub mod rng;
pub mod serde_util;
pub mod spherical;
pub mod tol;

pub use boundary::{
    classify_global_max, diagnose_boundary, positive_instance_generator, BoundaryDiagnosis,
    MaxClassification, SolutionSetKind,
};
pub use curves::{
    audit_curve, counterexample_l2, counterexample_r2, sample_curve, AuditReport, CurveSample,
    L2Report, R2Report,
};
pub use dirichlet::{
    build_problem, build_problem_from_samples, eta_curve, invert_psi, psi_value, solve_u_mu,
    DirichletCurveReport, DirichletProblem, DirichletSolution, EnergyTransform,
};
pub use eigen::{eigendecompose, operator_norm, Spectrum};
pub use error::Error;
pub use instance::{Instance, InstanceFile};
pub use linalg::{GeneralOperator, Operator, SymmetricOperator, Vector};
pub use resolvent::{
    contraction_resolvent, contraction_resolvent_trace, g_value, spectral_resolvent,
    ResolventSolution,
};
pub use spherical::{
    brute_force_max, brute_force_runs, eval_j, gamma_prime, gamma_value, invert_g,
    maximize_on_sphere, secular_value, wellposedness_check, Regime, SphericalSolution,
    WellPosednessReport,
};
