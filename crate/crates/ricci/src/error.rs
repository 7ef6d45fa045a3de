use thiserror::Error;

/// Errors produced by chain construction, transport solves and bound evaluation.
#[derive(Debug, Error)]
pub enum RicciError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not square: {rows} rows, {cols} cols")]
    NotSquare { rows: usize, cols: usize },

    #[error("row {row} is not stochastic: sums to {sum}")]
    NonStochasticRow { row: usize, sum: f64 },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("metric violation: {0}")]
    MetricViolation(String),

    #[error("stationary distribution is not unique: {classes} recurrent classes")]
    NonUniqueStationary { classes: usize },

    #[error("supplied stationary distribution fails pi P = pi (l1 error {err})")]
    StationaryMismatch { err: f64 },

    #[error("stationary mass is zero at state {state}")]
    ZeroMass { state: usize },

    #[error("space is not {eps}-geodesic: witness pair ({x}, {y})")]
    NotGeodesic { eps: f64, x: usize, y: usize },

    #[error("kappa_{k} = {kappa} is not positive")]
    NonPositiveKappa { k: usize, kappa: f64 },

    #[error("no positive kappa_k in the profile horizon")]
    NoPositiveKappa,

    #[error("pair ({x}, {y}) reached by a coupling is outside the audited pair set")]
    IncompletePairSet { x: usize, y: usize },

    #[error("bound not attained within the profile horizon K = {horizon}")]
    Unbounded { horizon: usize },

    #[error("V fails the domination precondition at state {state}: V = {v}, required {required}")]
    InvalidV { state: usize, v: f64, required: f64 },

    #[error("S fails to dominate sigma^2/n at state {state}: S = {s}, required {required}")]
    InvalidS { state: usize, s: f64, required: f64 },

    #[error("granularity sigma_inf is zero")]
    ZeroGranularity,

    #[error("chain is not reversible (detailed balance fails)")]
    NotReversible,

    #[error("instance too large: {states} states exceeds cap {cap}")]
    TooLarge { states: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RicciError>;
