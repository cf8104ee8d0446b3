use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("IncompatibleFlux: net boundary flux {imbalance:.3e} exceeds tolerance {tolerance:.3e}")]
    IncompatibleFlux { imbalance: f64, tolerance: f64 },

    #[error("BadTheta: theta = {theta} must lie in (0, {max})")]
    BadTheta { theta: f64, max: f64 },

    #[error("BadDelta: blend width {delta} must lie in (0, {max}]")]
    BadDelta { delta: f64, max: f64 },

    #[error("SolverDiverged: elliptic solve produced non-finite values")]
    SolverDiverged,

    #[error("CflViolation: Courant number {courant:.4} exceeds {limit}")]
    CflViolation { courant: f64, limit: f64 },

    #[error("NanDetected at step {step} (t = {t})")]
    NanDetected { step: usize, t: f64 },

    #[error("MissingHistory: no snapshot coverage for window starting at t = {t}")]
    MissingHistory { t: f64 },

    #[error("NoConvergence after {iterations} Picard iterations (last difference {last_diff:.3e}, ratio {ratio:.3})")]
    NoConvergence { iterations: usize, last_diff: f64, ratio: f64 },

    #[error("HypothesisFailed at t = {t}: {lhs:.6e} > {rhs:.6e}")]
    HypothesisFailed { t: f64, lhs: f64, rhs: f64 },

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("boundary table: {0}")]
    Table(String),

    #[error("ParseError: {0}")]
    Parse(String),

    #[error("ValidationError: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
