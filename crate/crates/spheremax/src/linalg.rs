//! Dense vectors and operators.
//!
//! Everything here is desk-scale: dense row-major storage, no BLAS. Operators
//! are immutable after construction; symmetric ones are validated rather than
//! silently symmetrized, since several downstream guarantees collapse when the
//! symmetry assumption is quietly repaired.

use std::ops::Index;

use serde::Serialize;

use crate::error::Error;
use crate::tol;

/// A finite real vector of dimension >= 1.
///
/// Serializes as a bare array; deserialization goes through the validating
/// constructors so no unchecked entries can enter.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector {
    entries: Vec<f64>,
}

impl Vector {
    /// Validating constructor: rejects empty vectors and non-finite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { entries })
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self, Error> {
        Self::new(entries.to_vec())
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            entries: (0..n).map(f).collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![0.0; n],
        }
    }

    /// Standard basis vector e_k (0-based) in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[k] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.entries.clone()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "dot product dimension mismatch: {} vs {}",
            self.dim(),
            other.dim()
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Vector {
        Vector {
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// self + factor * other.
    pub fn add_scaled(&self, factor: f64, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "add_scaled dimension mismatch");
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.add_scaled(1.0, other)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add_scaled(-1.0, other)
    }

    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// A linear map on R^n. Implemented by both operator kinds so the quadratic
/// functional and the ascent oracle accept either.
pub trait Operator {
    fn dim(&self) -> usize;

    /// Matrix-vector product A x. Panics on dimension mismatch.
    fn apply(&self, x: &Vector) -> Vector;

    /// Transpose product A^T x; coincides with `apply` for symmetric maps.
    fn apply_transpose(&self, x: &Vector) -> Vector;

    fn frobenius_norm(&self) -> f64;
}

fn rows_to_flat(rows: Vec<Vec<f64>>) -> Result<(usize, Vec<f64>), Error> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    let mut data = Vec::with_capacity(n * n);
    for (row, r) in rows.into_iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                row,
                cols: r.len(),
            });
        }
        for (col, value) in r.into_iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    index: row * n + col,
                });
            }
            data.push(value);
        }
    }
    Ok((n, data))
}

fn flat_apply(n: usize, data: &[f64], x: &Vector) -> Vector {
    assert_eq!(n, x.dim(), "apply dimension mismatch: {} vs {}", n, x.dim());
    Vector::from_fn(n, |i| {
        let row = &data[i * n..(i + 1) * n];
        row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum()
    })
}

fn flat_apply_transpose(n: usize, data: &[f64], x: &Vector) -> Vector {
    assert_eq!(n, x.dim(), "apply dimension mismatch: {} vs {}", n, x.dim());
    let mut out = vec![0.0; n];
    for (i, xi) in x.as_slice().iter().enumerate() {
        for (j, out_j) in out.iter_mut().enumerate() {
            *out_j += data[i * n + j] * xi;
        }
    }
    Vector::from_raw(out)
}

/// Dense square matrix without a symmetry requirement. Used by the
/// counterexample paths and the brute-force oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralOperator {
    n: usize,
    data: Vec<f64>,
}

impl GeneralOperator {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, Error> {
        let (n, data) = rows_to_flat(rows)?;
        Ok(Self { n, data })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

impl Operator for GeneralOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &Vector) -> Vector {
        flat_apply(self.n, &self.data, x)
    }

    fn apply_transpose(&self, x: &Vector) -> Vector {
        flat_apply_transpose(self.n, &self.data, x)
    }

    fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Dense symmetric matrix, validated at construction:
/// max |a_ij - a_ji| <= SYMMETRY_REL * (1 + max |a_ij|).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricOperator {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, Error> {
        let (n, data) = rows_to_flat(rows)?;
        let max_abs = data.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let allowed = tol::SYMMETRY_REL * (1.0 + max_abs);
        for i in 0..n {
            for j in (i + 1)..n {
                let deviation = (data[i * n + j] - data[j * n + i]).abs();
                if deviation > allowed {
                    return Err(Error::AsymmetricOperator {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        assert!(n >= 1, "diagonal operator needs dimension >= 1");
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            assert!(d.is_finite(), "diagonal entries must be finite");
            data[i * n + i] = *d;
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_diag(&vec![0.0; n])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }

    /// Builds Q * diag(d) * Q^T from an orthogonal factor given as flat
    /// row-major data, averaging the off-diagonal pair to keep the result
    /// symmetric to the last bit.
    pub(crate) fn from_conjugation(n: usize, q: &[f64], diag: &[f64]) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut sum = 0.0;
                for (k, d) in diag.iter().enumerate() {
                    sum += q[i * n + k] * d * q[j * n + k];
                }
                data[i * n + j] = sum;
                data[j * n + i] = sum;
            }
        }
        Self { n, data }
    }
}

impl Operator for SymmetricOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &Vector) -> Vector {
        flat_apply(self.n, &self.data, x)
    }

    fn apply_transpose(&self, x: &Vector) -> Vector {
        flat_apply(self.n, &self.data, x)
    }

    fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}
