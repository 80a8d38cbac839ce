use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix of dimension {dim} needs {} entries, got {len}", dim * dim)]
    EntryCount { dim: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (‖M − M†‖_F = {defect:e})")]
    NotHermitian { defect: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PovmError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("observable has no outcomes")]
    Empty,
    #[error("effect {index} has dimension {found}, expected {expected}")]
    EffectDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("{labels} labels given for {effects} effects")]
    LabelCount { labels: usize, effects: usize },
    #[error("outcome count mismatch: {left} vs {right}")]
    OutcomeMismatch { left: usize, right: usize },
    #[error("observables act on different spaces: dimension {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid observable: min eigenvalue {min_eig:e}, completeness residual {residual:e}")]
    Invalid { min_eig: f64, residual: f64 },
    #[error("invalid probability vector: {0}")]
    Probability(&'static str),
    #[error("mixing weight {0} outside [0, 1]")]
    Weight(f64),
    #[error("noise coordinate {0} outside [0, 1]")]
    NoiseCoordinate(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },
    #[error("need at least {min} outcomes, got {got}")]
    TooFewOutcomes { min: usize, got: usize },
    #[error("random draw stayed singular after {0} attempts")]
    Singular(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloningError {
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("not a density matrix: {0}")]
    NotDensity(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error("tol_feasible ({feasible:e}) must be below tol_infeasible ({infeasible:e})")]
    Tolerances { feasible: f64, infeasible: f64 },
    #[error("witness shape does not match the problem")]
    WitnessShape,
}
