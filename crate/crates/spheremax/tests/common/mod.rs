//! Shared construction helpers for the integration suites.

#![allow(clippy::needless_range_loop)]

use spheremax::rng::SplitMix64;
use spheremax::{Instance, Operator, SymmetricOperator, Vector};

/// Random orthogonal matrix as rows, built from composed Givens rotations.
pub fn random_orthogonal(n: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..(2 * n * n) {
        let i = (rng.next_u64() as usize) % n;
        let mut j = (rng.next_u64() as usize) % n;
        if i == j {
            j = (j + 1) % n;
        }
        let angle = rng.range(0.0, 2.0 * std::f64::consts::PI);
        let (c, s) = (angle.cos(), angle.sin());
        for row in q.iter_mut() {
            let (a, b) = (row[i], row[j]);
            row[i] = c * a - s * b;
            row[j] = s * a + c * b;
        }
    }
    q
}

/// Instance with prescribed eigenvalues and spectral z-coordinates, conjugated
/// by a random orthogonal matrix.
pub fn conjugated_instance(
    eigenvalues: &[f64],
    z_spectral: &[f64],
    rng: &mut SplitMix64,
) -> Instance {
    let n = eigenvalues.len();
    assert_eq!(n, z_spectral.len());
    let q = random_orthogonal(n, rng);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let sum: f64 = (0..n).map(|k| q[i][k] * eigenvalues[k] * q[j][k]).sum();
            rows[i][j] = sum;
            rows[j][i] = sum;
        }
    }
    let z = Vector::from_fn(n, |i| (0..n).map(|k| q[i][k] * z_spectral[k]).sum());
    let t = SymmetricOperator::from_rows(rows).expect("conjugation is symmetric");
    Instance::new(t, z).expect("constructed instance is valid")
}

/// Dense random symmetric instance with entries in [-1, 1] and unit-norm z.
pub fn random_symmetric_instance(n: usize, rng: &mut SplitMix64) -> Instance {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.range(-1.0, 1.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let t = SymmetricOperator::from_rows(rows).expect("symmetric by construction");
    let z = loop {
        let candidate = rng.gaussian_vector(n);
        if candidate.norm() > 1e-6 {
            break candidate.scaled(1.0 / candidate.norm());
        }
    };
    Instance::new(t, z).expect("random instance is valid")
}

/// Largest singular direction of a symmetric operator by power iteration on
/// T^2 (independent of the Jacobi decomposition).
#[allow(dead_code)] // each test target compiles its own copy of this module
pub fn power_iteration_norm(t: &SymmetricOperator, rng: &mut SplitMix64) -> f64 {
    let n = t.dim();
    let mut x = rng.gaussian_vector(n);
    x = x.scaled(1.0 / x.norm());
    let mut estimate = 0.0;
    for _ in 0..20_000 {
        let y = t.apply(&t.apply(&x));
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = y.scaled(1.0 / norm);
        let delta = next.sub(&x).norm().min(next.add(&x).norm());
        x = next;
        estimate = norm.sqrt();
        if delta < 1e-14 {
            break;
        }
    }
    estimate
}
