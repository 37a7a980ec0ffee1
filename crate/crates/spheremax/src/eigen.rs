//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Dense and simple; accurate to near machine precision for the desk-scale
//! dimensions this crate targets (n up to a few hundred). Eigenvalues come
//! back sorted in descending order with the accumulated rotation matrix, whose
//! columns are the orthonormal eigenvectors.

use crate::error::Error;
use crate::linalg::{Operator, SymmetricOperator, Vector};
use crate::tol;

/// Eigenvalues (descending) and an orthonormal eigenvector basis of a
/// symmetric operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Row-major n x n; column k is the eigenvector for `eigenvalues[k]`.
    q: Vec<f64>,
    n: usize,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Largest eigenvalue (first in descending order).
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest eigenvalue (last in descending order).
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[self.n - 1]
    }

    pub fn eigenvector(&self, k: usize) -> Vector {
        Vector::from_fn(self.n, |i| self.q[i * self.n + k])
    }

    /// Coordinates of `x` in the eigenvector basis: Q^T x.
    pub fn to_spectral(&self, x: &Vector) -> Vector {
        assert_eq!(self.n, x.dim(), "to_spectral dimension mismatch");
        Vector::from_fn(self.n, |k| {
            (0..self.n).map(|i| self.q[i * self.n + k] * x[i]).sum()
        })
    }

    /// Inverse of [`to_spectral`](Self::to_spectral): Q y.
    pub fn from_spectral(&self, y: &Vector) -> Vector {
        assert_eq!(self.n, y.dim(), "from_spectral dimension mismatch");
        Vector::from_fn(self.n, |i| {
            (0..self.n).map(|k| self.q[i * self.n + k] * y[k]).sum()
        })
    }

    /// max |(Q^T Q - I)_ij|, useful when validating a decomposition.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..self.n {
            for b in a..self.n {
                let dot: f64 = (0..self.n)
                    .map(|i| self.q[i * self.n + a] * self.q[i * self.n + b])
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// max |(A - Q diag Q^T)_ij| against the original operator.
    pub fn reconstruction_residual(&self, a: &SymmetricOperator) -> f64 {
        assert_eq!(self.n, a.dim(), "reconstruction dimension mismatch");
        let rebuilt = SymmetricOperator::from_conjugation(self.n, &self.q, &self.eigenvalues);
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((a.get(i, j) - rebuilt.get(i, j)).abs());
            }
        }
        worst
    }
}

/// Operator norm read off a spectrum: max(|lambda_1|, |lambda_n|).
pub fn operator_norm(spectrum: &Spectrum) -> f64 {
    spectrum.lambda_max().abs().max(spectrum.lambda_min().abs())
}

fn off_diagonal_frobenius(n: usize, a: &[f64]) -> f64 {
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += a[p * n + q] * a[p * n + q];
        }
    }
    (2.0 * sum).sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric operator.
///
/// Sweeps rotate every off-diagonal pair in turn until the off-diagonal
/// Frobenius norm falls below `JACOBI_OFF_REL * ||A||_F`, then sorts the
/// eigenvalues in descending order. Fails with
/// [`Error::EigenNonConvergence`] after [`tol::JACOBI_MAX_SWEEPS`] sweeps,
/// which signals pathological input rather than a tight budget.
pub fn eigendecompose(a: &SymmetricOperator) -> Result<Spectrum, Error> {
    let n = a.dim();
    let mut work = a.data().to_vec();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }

    let frobenius: f64 = work.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = tol::JACOBI_OFF_REL * frobenius;

    let mut converged = frobenius == 0.0;
    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        if off_diagonal_frobenius(n, &work) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for r in (p + 1)..n {
                let apq = work[p * n + r];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = work[p * n + p];
                let aqq = work[r * n + r];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                work[p * n + p] = app - t * apq;
                work[r * n + r] = aqq + t * apq;
                work[p * n + r] = 0.0;
                work[r * n + p] = 0.0;

                for j in 0..n {
                    if j == p || j == r {
                        continue;
                    }
                    let ajp = work[j * n + p];
                    let ajq = work[j * n + r];
                    let new_jp = ajp - s * (ajq + tau * ajp);
                    let new_jq = ajq + s * (ajp - tau * ajq);
                    work[j * n + p] = new_jp;
                    work[p * n + j] = new_jp;
                    work[j * n + r] = new_jq;
                    work[r * n + j] = new_jq;
                }

                for j in 0..n {
                    let qjp = q[j * n + p];
                    let qjq = q[j * n + r];
                    q[j * n + p] = qjp - s * (qjq + tau * qjp);
                    q[j * n + r] = qjq + s * (qjp - tau * qjq);
                }
            }
        }
    }

    if !converged && off_diagonal_frobenius(n, &work) > threshold {
        return Err(Error::EigenNonConvergence {
            sweeps: tol::JACOBI_MAX_SWEEPS,
            off_norm: off_diagonal_frobenius(n, &work),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        work[b * n + b]
            .partial_cmp(&work[a * n + a])
            .expect("eigenvalues are finite")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&k| work[k * n + k]).collect();
    let mut sorted_q = vec![0.0; n * n];
    for (dest, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted_q[i * n + dest] = q[i * n + src];
        }
    }

    Ok(Spectrum {
        eigenvalues,
        q: sorted_q,
        n,
    })
}
