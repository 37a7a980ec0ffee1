//! Problem instances: a symmetric operator together with a non-zero
//! right-hand side, with the eigendecomposition cached.

use serde::{Deserialize, Serialize};

use crate::eigen::{eigendecompose, operator_norm, Spectrum};
use crate::error::Error;
use crate::linalg::{Operator, SymmetricOperator, Vector};
use crate::tol;

/// An operator/right-hand-side pair (T, z) with z != 0.
///
/// Construction eigendecomposes T once; every solver in the crate works off
/// the cached spectrum and the spectral coordinates of z.
#[derive(Debug, Clone)]
pub struct Instance {
    t: SymmetricOperator,
    z: Vector,
    spectrum: Spectrum,
    op_norm: f64,
    z_spectral: Vector,
}

impl Instance {
    pub fn new(t: SymmetricOperator, z: Vector) -> Result<Self, Error> {
        if t.dim() != z.dim() {
            return Err(Error::DimensionMismatch {
                left: t.dim(),
                right: z.dim(),
            });
        }
        if z.norm() == 0.0 {
            return Err(Error::ZeroZ);
        }
        let spectrum = eigendecompose(&t)?;
        let op_norm = operator_norm(&spectrum);
        let z_spectral = spectrum.to_spectral(&z);
        Ok(Self {
            t,
            z,
            spectrum,
            op_norm,
            z_spectral,
        })
    }

    /// Convenience constructor for diagonal operators.
    pub fn from_diag(diag: &[f64], z: &[f64]) -> Result<Self, Error> {
        Self::new(SymmetricOperator::from_diag(diag), Vector::from_slice(z)?)
    }

    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    pub fn operator(&self) -> &SymmetricOperator {
        &self.t
    }

    pub fn z(&self) -> &Vector {
        &self.z
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// max(|lambda_1|, |lambda_n|).
    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    /// Coordinates of z in the eigenvector basis.
    pub fn z_spectral(&self) -> &Vector {
        &self.z_spectral
    }

    /// Enforces lambda > ||T|| with the crate-wide relative margin.
    pub(crate) fn require_lambda_above_norm(&self, lambda: f64) -> Result<(), Error> {
        let margin = tol::LAMBDA_MARGIN_REL * (1.0 + self.op_norm);
        if !lambda.is_finite() || lambda - self.op_norm < margin {
            return Err(Error::LambdaTooSmall {
                lambda,
                op_norm: self.op_norm,
            });
        }
        Ok(())
    }

    /// Parses and validates the instance JSON schema
    /// `{"dim": n, "T": [[row], ...], "z": [..]}`.
    pub fn from_json_str(text: &str) -> Result<Self, Error> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        file.into_instance()
    }
}

/// On-disk schema for instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dim: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    pub z: Vec<f64>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, Error> {
        if self.dim == 0 {
            return Err(Error::Schema("\"dim\" must be at least 1".into()));
        }
        if self.t.len() != self.dim {
            return Err(Error::Schema(format!(
                "\"T\" has {} rows, expected dim = {}",
                self.t.len(),
                self.dim
            )));
        }
        for (row, r) in self.t.iter().enumerate() {
            if r.len() != self.dim {
                return Err(Error::Schema(format!(
                    "\"T\" row {} has {} entries, expected dim = {}",
                    row,
                    r.len(),
                    self.dim
                )));
            }
            for (col, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Schema(format!("\"T\"[{row}][{col}] is not finite")));
                }
            }
        }
        if self.z.len() != self.dim {
            return Err(Error::Schema(format!(
                "\"z\" has {} entries, expected dim = {}",
                self.z.len(),
                self.dim
            )));
        }
        for (index, v) in self.z.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Schema(format!("\"z\"[{index}] is not finite")));
            }
        }
        let t = SymmetricOperator::from_rows(self.t)?;
        let z = Vector::new(self.z)?;
        Instance::new(t, z)
    }

    pub fn from_instance(instance: &Instance) -> Self {
        Self {
            dim: instance.dim(),
            t: instance.operator().rows(),
            z: instance.z().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caches_norm_and_spectral_coordinates() {
        let inst = Instance::from_diag(&[2.0, 1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(inst.op_norm(), 2.0);
        assert_eq!(inst.z_spectral().as_slice(), &[0.0, 1.0]);
        let back = inst.spectrum().from_spectral(inst.z_spectral());
        assert!(back.sub(inst.z()).norm() <= 1e-10 * inst.z().norm());
    }

    #[test]
    fn zero_z_is_rejected() {
        let err = Instance::from_diag(&[2.0, 1.0], &[0.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::ZeroZ);
    }

    #[test]
    fn json_loader_round_trips() {
        let text = r#"{"dim": 2, "T": [[2.0, 0.0], [0.0, 1.0]], "z": [0.0, 1.0]}"#;
        let inst = Instance::from_json_str(text).unwrap();
        assert_eq!(inst.op_norm(), 2.0);
    }

    #[test]
    fn json_loader_rejects_asymmetric() {
        let text = r#"{"dim": 2, "T": [[2.0, 0.5], [0.0, 1.0]], "z": [0.0, 1.0]}"#;
        let err = Instance::from_json_str(text).unwrap_err();
        assert!(matches!(
            err,
            Error::AsymmetricOperator { row: 0, col: 1, .. }
        ));
    }

    #[test]
    fn json_loader_reports_row_location() {
        let text = r#"{"dim": 2, "T": [[2.0, 0.0], [0.0]], "z": [0.0, 1.0]}"#;
        let err = Instance::from_json_str(text).unwrap_err();
        match err {
            Error::Schema(msg) => assert!(msg.contains("row 1"), "message: {msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn mismatched_dims_are_rejected() {
        let t = SymmetricOperator::from_diag(&[1.0, 2.0]);
        let z = Vector::from_slice(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            Instance::new(t, z).unwrap_err(),
            Error::DimensionMismatch { left: 2, right: 3 }
        );
    }
}
