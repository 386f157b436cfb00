//! Generator-set JSON and CSV helpers.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{symmetrize, AtomicMeasure, Isometry};

/// Tolerance for rotations given as explicit matrices; they are projected
/// onto SO(3) afterwards.
pub const MATRIX_INPUT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    pub angle: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quaternion: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis_angle: Option<AxisAngle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    pub translation: [f64; 3],
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

impl AtomSpec {
    pub fn isometry(&self) -> Result<Isometry> {
        let v = Vector3::from(self.translation);
        let given = [self.quaternion.is_some(), self.axis_angle.is_some(), self.matrix.is_some()];
        match given.iter().filter(|b| **b).count() {
            0 => Ok(Isometry::translation_only(v)),
            1 => {
                if let Some(q) = self.quaternion {
                    Isometry::from_quaternion(q, v)
                } else if let Some(aa) = &self.axis_angle {
                    Isometry::from_axis_angle(Vector3::from(aa.axis), aa.angle, v)
                } else {
                    let m = self.matrix.expect("checked");
                    let r = Matrix3::from_fn(|i, j| m[i][j]);
                    Isometry::from_approx_matrix(r, v, MATRIX_INPUT_TOL)
                }
            }
            _ => Err(Error::InvalidIsometry("give exactly one of quaternion, axis_angle, matrix".into())),
        }
    }
}

/// `{ "d": 3, "atoms": [...], "symmetrize": bool, "label": str }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSet {
    pub d: usize,
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub symmetrize: bool,
    #[serde(default)]
    pub label: String,
}

impl GeneratorSet {
    pub fn parse(text: &str) -> Result<Self> {
        let set: GeneratorSet = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if set.d != 3 {
            return Err(Error::InvalidArgument(format!("only d = 3 is supported, got {}", set.d)));
        }
        if set.atoms.is_empty() {
            return Err(Error::InvalidMeasure("generator set has no atoms".into()));
        }
        Ok(set)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The listed isometries, without weights.
    pub fn generators(&self) -> Result<Vec<Isometry>> {
        self.atoms.iter().map(AtomSpec::isometry).collect()
    }

    /// The measure described by the set; weights are normalized to sum to one.
    pub fn measure(&self) -> Result<AtomicMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((a.isometry()?, a.weight)))
            .collect::<Result<Vec<_>>>()?;
        let mu = AtomicMeasure::normalized(atoms, self.label.clone())?;
        Ok(if self.symmetrize { symmetrize(&mu).with_label(self.label.clone()) } else { mu })
    }
}

/// Fixed 17-significant-digit scientific format.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
