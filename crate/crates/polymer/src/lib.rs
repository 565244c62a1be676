//! Numerical laboratory for one-dimensional random polymer Jacobi matrices.
//!
//! A chain is built by randomly concatenating two finite building blocks
//! ("polymers"), each a short list of hopping and potential values. The crate
//! provides the 2x2 transfer-matrix algebra over such chains, detection of
//! critical energies (where the two polymer transfer matrices commute and are
//! elliptic), Pruefer-variable eigenvalue counting, the polymer phase-shift
//! dynamics at a critical energy, Monte Carlo estimators and closed-form
//! asymptotics for the Lyapunov exponent and the integrated density of
//! states, level statistics in the critical window, and time-averaged
//! transport moments of the position operator.
//!
//! The `io_cli` module exposes everything through a declarative experiment
//! runner with reproducible seeded output (CSV reports and SVG plots).

pub mod critical;
pub mod io_cli;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod phase_flow;
pub mod pruefer;
pub mod transfer;
pub mod transport;

/// Crate-wide error type. Variants are named after the contract they break.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("hopping entries must be strictly positive (offending value {0})")]
    NonPositiveHopping(f64),
    #[error("hopping and potential lists must have equal nonzero length ({t} vs {v})")]
    LengthMismatch { t: usize, v: usize },
    #[error("probability must lie in [0, 1] (got {0})")]
    InvalidProbability(f64),
    #[error("window [{k_min}, {k_max}] does not contain polymer index 0")]
    EmptyWindow { k_min: i64, k_max: i64 },
    #[error("configuration does not cover polymer index {0}")]
    InsufficientConfiguration(i64),
    #[error("window does not cover site {0}")]
    InsufficientWindow(i64),
    #[error("energy {0} is not critical: {1}")]
    NotCritical(f64, String),
    #[error("criticality order not determined: slope {slope} deviates from an integer by {residual}")]
    OrderUndetermined { slope: f64, residual: f64 },
    #[error("energy {0} is an eigenvalue within phase tolerance")]
    Degenerate(f64),
    #[error("eigenvalue index {j} out of range 1..={n}")]
    IndexOutOfRange { j: usize, n: usize },
    #[error("value {0} is not an eigenvalue (boundary residual {1:.3e})")]
    NotAnEigenvalue(f64, f64),
    #[error("angle averages violate the non-anomaly hypothesis: {0}")]
    AnomalousAngles(String),
    #[error("reflection coefficient |b| = {0:.3} exceeds the small-detuning guard {1}")]
    BranchGuard(f64, f64),
    #[error("critical window contains too few eigenvalues ({0} samples below 3)")]
    WindowTooNarrow(usize),
    #[error("tridiagonal system is singular at pivot {0}")]
    SingularSystem(usize),
    #[error("energy quadrature failed to converge ({0:.3e} relative change after max refinements)")]
    QuadratureUnderResolved(f64),
    #[error("truncation radius {radius} too small for time horizon {t_max:.1}")]
    FrontEscape { radius: i64, t_max: f64 },
    #[error("moment series needs >= {need} points spanning >= {decades} decades")]
    InsufficientRange { need: usize, decades: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid value for `{key}`: {msg}")]
    Validation { key: String, msg: String },
    #[error("csv does not match the `{kind}` schema: {msg}")]
    SchemaMismatch { kind: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
