use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Clone, Debug, Error)]
pub enum Error {
    #[error("eigensolver did not converge (dim {dim}, worst off-diagonal {off_diagonal:e})")]
    EigenNonConvergence { dim: usize, off_diagonal: f64 },

    #[error("non-finite derivative at t = {t}, y = {y:?}")]
    NonFiniteDerivative { t: f64, y: Vec<f64> },

    #[error("non-finite integrand at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("trap minima are not well separated: overlap {epsilon} >= {max}")]
    OverlapTooLarge { epsilon: f64, max: f64 },

    #[error("state (q = {q}, p = {p}) lies outside the chart q² + p² < 4J = {four_j}")]
    OutsideChart { q: f64, p: f64, four_j: f64 },

    #[error("orbit left the chart at t = {t} (q = {q}, p = {p})")]
    ChartExit { t: f64, q: f64, p: f64 },

    #[error("spectrum analysis needs at least 5 levels, got {0}")]
    TooFewLevels(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("orbit classifiers disagree: sign test says {sign_test}, energy test says {energy_test} (E = {energy}, E_sep = {separatrix})")]
    ClassifierDisagreement {
        sign_test: &'static str,
        energy_test: &'static str,
        energy: f64,
        separatrix: f64,
    },
}
