//! JSON file formats for observables, pairs and witnesses.
//!
//! Matrices are flat row-major lists of `[re, im]` entries:
//!
//! ```text
//! Povm     {"dim": d, "effects": [[[re, im], ...], ...], "labels": [...]}
//! Pair     {"first": Povm, "second": Povm}
//! Joint    {"dim": d, "n1": n1, "n2": n2, "effects": [...]}   row-major in (j, k)
//! Witness  {"lambda": λ, "mu": μ, "joint": Joint, "noise_first": [...], "noise_second": [...]}
//! ```
//!
//! Labels are integers or `{"lo": a, "hi": b}` bins and may be omitted.

use std::fs;
use std::path::{Path, PathBuf};

use incompat_core::{ComplexMatrix, JointPovm, Label, NoisePoint, Povm, PovmError, Witness, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("effect {index} has {got} entries, expected dim² = {expected}")]
    EntryCount {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("joint grid {n1}×{n2} needs {expected} effects, got {got}")]
    GridSize {
        n1: usize,
        n2: usize,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Povm(#[from] PovmError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelJson {
    Index(i64),
    Bin { lo: f64, hi: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub dim: usize,
    pub effects: Vec<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<LabelJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJson {
    pub first: PovmJson,
    pub second: PovmJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointJson {
    pub dim: usize,
    pub n1: usize,
    pub n2: usize,
    pub effects: Vec<Vec<C64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub lambda: f64,
    pub mu: f64,
    pub joint: JointJson,
    pub noise_first: Vec<f64>,
    pub noise_second: Vec<f64>,
}

fn matrix_entries(m: &ComplexMatrix) -> Vec<C64> {
    m.as_slice().to_vec()
}

fn matrices(dim: usize, effects: &[Vec<C64>]) -> Result<Vec<ComplexMatrix>, FormatError> {
    effects
        .iter()
        .enumerate()
        .map(|(index, entries)| {
            if entries.len() != dim * dim {
                return Err(FormatError::EntryCount {
                    index,
                    expected: dim * dim,
                    got: entries.len(),
                });
            }
            Ok(ComplexMatrix::from_row_major(dim, entries.clone()).expect("length checked"))
        })
        .collect()
}

impl From<&Povm> for PovmJson {
    fn from(p: &Povm) -> Self {
        let labels = p
            .labels()
            .iter()
            .map(|l| match *l {
                Label::Index(i) => LabelJson::Index(i),
                Label::Bin { lo, hi } => LabelJson::Bin { lo, hi },
            })
            .collect();
        Self {
            dim: p.dim(),
            effects: p.effects().iter().map(matrix_entries).collect(),
            labels: Some(labels),
        }
    }
}

impl PovmJson {
    /// Builds the observable and checks positivity and completeness.
    pub fn to_povm(&self) -> Result<Povm, FormatError> {
        let effects = matrices(self.dim, &self.effects)?;
        let povm = match &self.labels {
            None => Povm::from_effects(effects)?,
            Some(labels) => {
                let labels = labels
                    .iter()
                    .map(|l| match *l {
                        LabelJson::Index(i) => Label::Index(i),
                        LabelJson::Bin { lo, hi } => Label::Bin { lo, hi },
                    })
                    .collect();
                Povm::with_labels(effects, labels)?
            }
        };
        let report = povm.validate();
        if !report.ok {
            return Err(PovmError::Invalid {
                min_eig: report.min_eig,
                residual: report.completeness_residual,
            }
            .into());
        }
        Ok(povm)
    }
}

impl PairJson {
    pub fn new(first: &Povm, second: &Povm) -> Self {
        Self {
            first: first.into(),
            second: second.into(),
        }
    }

    pub fn to_pair(&self) -> Result<(Povm, Povm), FormatError> {
        Ok((self.first.to_povm()?, self.second.to_povm()?))
    }
}

impl From<&JointPovm> for JointJson {
    fn from(g: &JointPovm) -> Self {
        Self {
            dim: g.dim(),
            n1: g.n1(),
            n2: g.n2(),
            effects: g.effects().iter().map(matrix_entries).collect(),
        }
    }
}

impl JointJson {
    /// Builds the grid without positivity checks; certification is the
    /// reader's business.
    pub fn to_joint(&self) -> Result<JointPovm, FormatError> {
        let expected = self.n1 * self.n2;
        if self.effects.len() != expected {
            return Err(FormatError::GridSize {
                n1: self.n1,
                n2: self.n2,
                expected,
                got: self.effects.len(),
            });
        }
        Ok(JointPovm::new(
            self.n1,
            self.n2,
            matrices(self.dim, &self.effects)?,
        )?)
    }
}

impl WitnessJson {
    pub fn new(witness: &Witness, point: NoisePoint) -> Self {
        Self {
            lambda: point.lambda(),
            mu: point.mu(),
            joint: (&witness.joint).into(),
            noise_first: witness.noise_first.weights().to_vec(),
            noise_second: witness.noise_second.weights().to_vec(),
        }
    }
}

pub fn read_pair(path: &Path) -> Result<(Povm, Povm), FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str::<PairJson>(&text)?.to_pair()
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| FormatError::Write {
        path: path.to_path_buf(),
        source,
    })
}
