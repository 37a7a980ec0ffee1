//! Diagnosis of the boundary equation T x - ||T|| x = z.
//!
//! The solution set V may be empty, a single point, or an affine set; the
//! threshold theta = inf {||x||^2 : x in V} (with inf of the empty set being
//! +infinity) bounds the radius interval on which the interior machinery of
//! [`crate::spherical`] applies.

use serde::Serialize;

use crate::instance::Instance;
use crate::linalg::{SymmetricOperator, Vector};
use crate::rng::SplitMix64;
use crate::serde_util::serialize_maybe_infinite;
use crate::tol;

/// Shape of the solution set of the boundary equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionSetKind {
    Empty,
    Singleton,
    Affine,
}

/// Outcome of [`diagnose_boundary`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryDiagnosis {
    /// Whether ||T|| coincides with an eigenvalue of T (within tolerance).
    pub norm_is_eigenvalue: bool,
    pub v_kind: SolutionSetKind,
    /// inf {||x||^2 : x in V}; +infinity when V is empty.
    #[serde(serialize_with = "serialize_maybe_infinite")]
    pub theta: f64,
    /// The minimum-norm solution when V is non-empty.
    pub min_norm_solution: Option<Vector>,
    /// Dimension of the eigenspace at ||T|| (0 when the norm is not an
    /// eigenvalue).
    pub kernel_dim: usize,
}

/// Classifies the boundary equation in spectral coordinates.
///
/// With E = {i : lambda_i = ||T|| within tolerance}: the equation is solvable
/// iff z has no component on E; the minimum-norm solution then has coordinates
/// z_i / (lambda_i - ||T||) off E and zero on E.
pub fn diagnose_boundary(inst: &Instance) -> BoundaryDiagnosis {
    let norm = inst.op_norm();
    let eigenvalues = inst.spectrum().eigenvalues();
    let z_spectral = inst.z_spectral();

    let coincide = tol::EIG_COINCIDENCE_REL * (1.0 + norm);
    let kernel_cut = tol::KERNEL_COMPONENT_REL * inst.z().norm();

    let in_kernel: Vec<bool> = eigenvalues
        .iter()
        .map(|&li| (li - norm).abs() <= coincide)
        .collect();
    let kernel_dim = in_kernel.iter().filter(|&&b| b).count();
    let norm_is_eigenvalue = kernel_dim > 0;

    let obstructed = in_kernel
        .iter()
        .enumerate()
        .any(|(i, &k)| k && z_spectral[i].abs() > kernel_cut);

    if obstructed {
        return BoundaryDiagnosis {
            norm_is_eigenvalue,
            v_kind: SolutionSetKind::Empty,
            theta: f64::INFINITY,
            min_norm_solution: None,
            kernel_dim,
        };
    }

    let coords = Vector::from_fn(inst.dim(), |i| {
        if in_kernel[i] {
            0.0
        } else {
            z_spectral[i] / (eigenvalues[i] - norm)
        }
    });
    let theta = coords.norm_sq();
    let min_norm_solution = inst.spectrum().from_spectral(&coords);

    BoundaryDiagnosis {
        norm_is_eigenvalue,
        v_kind: if norm_is_eigenvalue {
            SolutionSetKind::Affine
        } else {
            SolutionSetKind::Singleton
        },
        theta,
        min_norm_solution: Some(min_norm_solution),
        kernel_dim,
    }
}

/// Outcome of [`classify_global_max`]: whether the quadratic functional
/// J(x) = <T x - 2 z, x> attains a global maximum over the whole space.
///
/// It does exactly when T x = z is solvable and T is non-positive; local and
/// global maxima coincide for this functional.
#[derive(Debug, Clone, Serialize)]
pub struct MaxClassification {
    pub has_global_max: bool,
    /// A solution of T x = z when one exists.
    pub witness: Option<Vector>,
    /// Whether lambda_1 <= tol, i.e. <T x, x> <= 0 everywhere.
    pub t_nonpositive: bool,
}

/// Decides global-maximum existence for J over all of R^n.
///
/// The witness is the pseudo-inverse solution of T x = z in spectral
/// coordinates; it exists iff z has no component on the kernel of T.
pub fn classify_global_max(inst: &Instance, tol_nonpositive: f64) -> MaxClassification {
    let eigenvalues = inst.spectrum().eigenvalues();
    let z_spectral = inst.z_spectral();
    let t_nonpositive = inst.spectrum().lambda_max() <= tol_nonpositive;

    let kernel_eig = tol::EIG_COINCIDENCE_REL * (1.0 + inst.op_norm());
    let kernel_cut = tol::KERNEL_COMPONENT_REL * inst.z().norm();

    let mut solvable = true;
    let coords = Vector::from_fn(inst.dim(), |i| {
        if eigenvalues[i].abs() <= kernel_eig {
            if z_spectral[i].abs() > kernel_cut {
                solvable = false;
            }
            0.0
        } else {
            z_spectral[i] / eigenvalues[i]
        }
    });

    let witness = if solvable {
        Some(inst.spectrum().from_spectral(&coords))
    } else {
        None
    };

    MaxClassification {
        has_global_max: witness.is_some() && t_nonpositive,
        witness,
        t_nonpositive,
    }
}

/// Generates a positive-semidefinite instance whose boundary equation has no
/// solution, so its threshold is +infinity: the top eigenvalue is strictly
/// dominant and z keeps a unit-size component on the top eigenvector.
pub fn positive_instance_generator(n: usize, seed: u64) -> Instance {
    assert!(n >= 2, "generator needs dimension >= 2");
    let mut rng = SplitMix64::new(seed);

    let mut diag = vec![0.0; n];
    diag[0] = 2.0 + rng.uniform();
    for d in diag.iter_mut().skip(1) {
        *d = rng.range(0.0, 1.5);
    }

    let q = random_orthogonal(n, &mut rng);
    let t = SymmetricOperator::from_conjugation(n, &q, &diag);

    let mut z_coords = vec![0.0; n];
    z_coords[0] = 1.0 + rng.uniform();
    for c in z_coords.iter_mut().skip(1) {
        *c = 0.5 * rng.gaussian();
    }
    let z = Vector::from_fn(n, |i| (0..n).map(|k| q[i * n + k] * z_coords[k]).sum());

    Instance::new(t, z).expect("generated instance is valid by construction")
}

/// Random orthogonal matrix (row-major, columns orthonormal) via
/// Gram-Schmidt on Gaussian columns, with one re-orthogonalization pass.
fn random_orthogonal(n: usize, rng: &mut SplitMix64) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for col in 0..n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        for _ in 0..2 {
            for prev in 0..col {
                let dot: f64 = (0..n).map(|i| v[i] * q[i * n + prev]).sum();
                for i in 0..n {
                    v[i] -= dot * q[i * n + prev];
                }
            }
        }
        let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-8 {
            // Degenerate draw; replace by a basis vector and redo the pass.
            v = vec![0.0; n];
            v[col] = 1.0;
            for prev in 0..col {
                let dot: f64 = (0..n).map(|i| v[i] * q[i * n + prev]).sum();
                for i in 0..n {
                    v[i] -= dot * q[i * n + prev];
                }
            }
        }
        let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for i in 0..n {
            q[i * n + col] = v[i] / norm;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obstructed_kernel_component_means_empty() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[1.0, 0.0]).unwrap();
        let d = diagnose_boundary(&inst);
        assert_eq!(d.v_kind, SolutionSetKind::Empty);
        assert!(d.theta.is_infinite());
        assert!(d.min_norm_solution.is_none());
        assert!(d.norm_is_eigenvalue);
    }

    #[test]
    fn affine_solution_set_with_min_norm_element() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap();
        let d = diagnose_boundary(&inst);
        assert_eq!(d.v_kind, SolutionSetKind::Affine);
        assert!((d.theta - 1.0).abs() <= 1e-12);
        assert_eq!(d.kernel_dim, 1);
        let m = d.min_norm_solution.unwrap();
        assert!((m[0] - 0.0).abs() < 1e-14);
        assert!((m[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn dominant_negative_eigenvalue_gives_singleton() {
        let inst = Instance::from_diag(&[1.0, -3.0], &[1.0, 0.0]).unwrap();
        let d = diagnose_boundary(&inst);
        assert_eq!(d.v_kind, SolutionSetKind::Singleton);
        assert!(!d.norm_is_eigenvalue);
        assert_eq!(d.kernel_dim, 0);
        assert!((d.theta - 0.25).abs() <= 1e-14);
        let m = d.min_norm_solution.unwrap();
        assert!((m[0] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn theta_is_positive_whenever_finite() {
        let cases = [
            Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap(),
            Instance::from_diag(&[1.0, -3.0], &[1.0, 0.0]).unwrap(),
            Instance::from_diag(&[0.5, -0.5, -2.0], &[0.1, 0.2, 0.3]).unwrap(),
        ];
        for inst in cases {
            let d = diagnose_boundary(&inst);
            if d.theta.is_finite() {
                assert!(d.theta > 0.0);
            }
        }
    }

    #[test]
    fn zero_operator_with_nonzero_z_is_empty() {
        let inst = Instance::new(
            SymmetricOperator::zeros(2),
            Vector::from_slice(&[1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let d = diagnose_boundary(&inst);
        assert_eq!(d.v_kind, SolutionSetKind::Empty);
        assert!(d.theta.is_infinite());
        assert_eq!(d.kernel_dim, 2);
    }

    #[test]
    fn classify_negative_definite_with_solution() {
        let inst = Instance::from_diag(&[-1.0, -2.0], &[1.0, 2.0]).unwrap();
        let c = classify_global_max(&inst, 1e-9);
        assert!(c.has_global_max);
        assert!(c.t_nonpositive);
        let w = c.witness.unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn classify_indefinite_is_negative() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[0.3, -0.4]).unwrap();
        let c = classify_global_max(&inst, 1e-9);
        assert!(!c.has_global_max);
        assert!(!c.t_nonpositive);
    }

    #[test]
    fn classify_unsolvable_kernel_component() {
        let inst = Instance::from_diag(&[-1.0, 0.0], &[0.0, 1.0]).unwrap();
        let c = classify_global_max(&inst, 1e-9);
        assert!(!c.has_global_max);
        assert!(c.t_nonpositive);
        assert!(c.witness.is_none());
    }

    #[test]
    fn generated_positive_instances_have_infinite_theta() {
        for seed in 0..20 {
            let inst = positive_instance_generator(2 + (seed as usize % 5), seed);
            let d = diagnose_boundary(&inst);
            assert!(d.theta.is_infinite(), "seed {seed}");
            assert!(
                inst.spectrum().lambda_min() >= -1e-10 * (1.0 + inst.op_norm()),
                "seed {seed}: lambda_min = {}",
                inst.spectrum().lambda_min()
            );
        }
    }

    #[test]
    fn identity_operator_is_always_obstructed() {
        let inst = Instance::new(
            SymmetricOperator::identity(3),
            Vector::from_slice(&[0.3, -0.1, 0.2]).unwrap(),
        )
        .unwrap();
        let d = diagnose_boundary(&inst);
        assert!(d.theta.is_infinite());
        assert_eq!(d.kernel_dim, 3);
    }
}
