//! Observables with finitely many outcomes, joint observables on product
//! outcome grids, trivial observables and noise points.

use alloc::vec::Vec;

use crate::error::PovmError;
use crate::linalg::ComplexMatrix;

/// Effects may dip this far below zero and still count as positive.
pub const PSD_TOL: f64 = 1e-9;
/// Frobenius tolerance on `Σ effects − I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance on the sum of a probability vector.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Outcome label: a plain index or an angular bin `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Label {
    Index(i64),
    Bin { lo: f64, hi: f64 },
}

/// Numbers behind a validity verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    pub min_eig: f64,
    pub completeness_residual: f64,
    pub ok: bool,
}

impl ValidationReport {
    fn from_parts(min_eig: f64, completeness_residual: f64) -> Self {
        let ok = min_eig >= -PSD_TOL && completeness_residual <= COMPLETENESS_TOL;
        Self {
            min_eig,
            completeness_residual,
            ok,
        }
    }
}

/// A finite-outcome observable: Hermitian effects on a `dim`-dimensional
/// space. Construction only checks shapes; [`Povm::validate`] checks
/// positivity and completeness.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    labels: Vec<Label>,
}

impl Povm {
    /// Effects labelled `0, 1, …`.
    pub fn from_effects(effects: Vec<ComplexMatrix>) -> Result<Self, PovmError> {
        let labels = (0..effects.len() as i64).map(Label::Index).collect();
        Self::with_labels(effects, labels)
    }

    pub fn with_labels(effects: Vec<ComplexMatrix>, labels: Vec<Label>) -> Result<Self, PovmError> {
        let dim = effects.first().ok_or(PovmError::Empty)?.dim();
        check_effects(&effects, dim)?;
        if labels.len() != effects.len() {
            return Err(PovmError::LabelCount {
                labels: labels.len(),
                effects: effects.len(),
            });
        }
        Ok(Self {
            dim,
            effects,
            labels,
        })
    }

    /// Like [`Povm::with_labels`] but also rejects observables that fail
    /// [`Povm::validate`].
    pub fn validated(effects: Vec<ComplexMatrix>, labels: Vec<Label>) -> Result<Self, PovmError> {
        let povm = Self::with_labels(effects, labels)?;
        povm.require_valid()?;
        Ok(povm)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, j: usize) -> &ComplexMatrix {
        &self.effects[j]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn validate(&self) -> ValidationReport {
        let (min_eig, residual) = effects_report(&self.effects, self.dim);
        ValidationReport::from_parts(min_eig, residual)
    }

    pub(crate) fn require_valid(&self) -> Result<(), PovmError> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            Err(PovmError::Invalid {
                min_eig: report.min_eig,
                residual: report.completeness_residual,
            })
        }
    }

    /// The noisy version `weight·M + (1−weight)·T` with `T(j) = noise_j·I`.
    pub fn mix_with_trivial(&self, weight: f64, noise: &TrivialNoise) -> Result<Self, PovmError> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(PovmError::Weight(weight));
        }
        if noise.len() != self.outcomes() {
            return Err(PovmError::OutcomeMismatch {
                left: self.outcomes(),
                right: noise.len(),
            });
        }
        let effects = self
            .effects
            .iter()
            .zip(noise.weights())
            .map(|(e, &w)| {
                let mut out = e.scale(weight);
                out.add_identity((1.0 - weight) * w);
                out
            })
            .collect();
        Ok(Self {
            dim: self.dim,
            effects,
            labels: self.labels.clone(),
        })
    }

    /// The trivial observable `T(j) = tr(M(j))/d · I` obtained by feeding the
    /// maximally mixed state.
    pub fn uniform_trivial(&self) -> TrivialNoise {
        let d = self.dim as f64;
        let raw: Vec<f64> = self
            .effects
            .iter()
            .map(|e| (e.trace_re() / d).max(0.0))
            .collect();
        let total: f64 = raw.iter().sum();
        let weights = if total > 0.0 {
            raw.iter().map(|w| w / total).collect()
        } else {
            alloc::vec![1.0 / raw.len() as f64; raw.len()]
        };
        TrivialNoise { weights }
    }

    /// Largest Frobenius distance between corresponding effects.
    pub fn max_effect_distance(&self, other: &Povm) -> Result<f64, PovmError> {
        if self.dim != other.dim {
            return Err(PovmError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.outcomes() != other.outcomes() {
            return Err(PovmError::OutcomeMismatch {
                left: self.outcomes(),
                right: other.outcomes(),
            });
        }
        Ok(self
            .effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max))
    }
}

/// Probability vector over outcome labels defining the trivial observable
/// `T(j) = weights[j]·I`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivialNoise {
    weights: Vec<f64>,
}

impl TrivialNoise {
    pub fn new(weights: Vec<f64>) -> Result<Self, PovmError> {
        if weights.is_empty() {
            return Err(PovmError::Empty);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(PovmError::Probability("negative or non-finite weight"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(PovmError::Probability("weights do not sum to 1"));
        }
        Ok(Self { weights })
    }

    pub fn uniform(outcomes: usize) -> Self {
        Self {
            weights: alloc::vec![1.0 / outcomes as f64; outcomes],
        }
    }

    /// Clips negative entries and rescales to unit sum. An all-zero vector
    /// becomes uniform.
    pub fn clip_normalize(raw: &[f64]) -> Self {
        let clipped: Vec<f64> = raw.iter().map(|w| w.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total > 0.0 && total.is_finite() {
            Self {
                weights: clipped.iter().map(|w| w / total).collect(),
            }
        } else {
            Self::uniform(raw.len())
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// A joint observable on the outcome grid `n1 × n2`, stored row-major:
/// effect `(j, k)` lives at index `j·n2 + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPovm {
    dim: usize,
    n1: usize,
    n2: usize,
    effects: Vec<ComplexMatrix>,
}

impl JointPovm {
    pub fn new(n1: usize, n2: usize, effects: Vec<ComplexMatrix>) -> Result<Self, PovmError> {
        if n1 == 0 || n2 == 0 {
            return Err(PovmError::Empty);
        }
        if effects.len() != n1 * n2 {
            return Err(PovmError::OutcomeMismatch {
                left: n1 * n2,
                right: effects.len(),
            });
        }
        let dim = effects[0].dim();
        check_effects(&effects, dim)?;
        Ok(Self {
            dim,
            n1,
            n2,
            effects,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, j: usize, k: usize) -> &ComplexMatrix {
        &self.effects[j * self.n2 + k]
    }

    pub fn validate(&self) -> ValidationReport {
        let (min_eig, residual) = effects_report(&self.effects, self.dim);
        ValidationReport::from_parts(min_eig, residual)
    }

    fn require_valid(&self) -> Result<(), PovmError> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            Err(PovmError::Invalid {
                min_eig: report.min_eig,
                residual: report.completeness_residual,
            })
        }
    }

    /// Row sums without validity checks.
    pub(crate) fn row_sums(&self) -> Vec<ComplexMatrix> {
        (0..self.n1)
            .map(|j| {
                let mut acc = ComplexMatrix::zeros(self.dim);
                for k in 0..self.n2 {
                    acc += self.effect(j, k);
                }
                acc
            })
            .collect()
    }

    /// Column sums without validity checks.
    pub(crate) fn column_sums(&self) -> Vec<ComplexMatrix> {
        (0..self.n2)
            .map(|k| {
                let mut acc = ComplexMatrix::zeros(self.dim);
                for j in 0..self.n1 {
                    acc += self.effect(j, k);
                }
                acc
            })
            .collect()
    }

    /// First margin: effect `j` is `Σ_k G[j,k]`.
    pub fn margin_first(&self) -> Result<Povm, PovmError> {
        self.require_valid()?;
        Povm::from_effects(self.row_sums())
    }

    /// Second margin: effect `k` is `Σ_j G[j,k]`.
    pub fn margin_second(&self) -> Result<Povm, PovmError> {
        self.require_valid()?;
        Povm::from_effects(self.column_sums())
    }
}

/// Noise coordinates `(λ, μ) ∈ [0,1]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisePoint {
    lambda: f64,
    mu: f64,
}

impl NoisePoint {
    pub fn new(lambda: f64, mu: f64) -> Result<Self, PovmError> {
        for x in [lambda, mu] {
            if !(0.0..=1.0).contains(&x) {
                return Err(PovmError::NoiseCoordinate(x));
            }
        }
        Ok(Self { lambda, mu })
    }

    /// The point `(t, t)` on the symmetry line.
    pub fn diagonal(t: f64) -> Result<Self, PovmError> {
        Self::new(t, t)
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Whether the point lies in the triangle `λ + μ ≤ 1`.
    pub fn in_triangle(&self) -> bool {
        self.lambda + self.mu <= 1.0
    }
}

fn check_effects(effects: &[ComplexMatrix], dim: usize) -> Result<(), PovmError> {
    for (index, e) in effects.iter().enumerate() {
        if e.dim() != dim {
            return Err(PovmError::EffectDimension {
                index,
                expected: dim,
                found: e.dim(),
            });
        }
        if !e.is_hermitian() {
            return Err(PovmError::Linalg(crate::error::LinalgError::NotHermitian {
                defect: e.hermitian_defect(),
            }));
        }
    }
    Ok(())
}

fn effects_report(effects: &[ComplexMatrix], dim: usize) -> (f64, f64) {
    let mut sum = ComplexMatrix::zeros(dim);
    let mut min_eig = f64::INFINITY;
    for e in effects {
        sum += e;
        // Shapes and Hermiticity were checked at construction.
        let w = crate::linalg::jacobi_min_eigenvalue(e);
        min_eig = min_eig.min(w);
    }
    sum.add_identity(-1.0);
    (min_eig, sum.frobenius_norm())
}
