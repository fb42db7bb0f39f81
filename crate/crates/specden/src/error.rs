//! Error types for every stage of the pipeline.

use thiserror::Error;

/// Rejected probe-frequency grid.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("frequency grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("frequency grid must be strictly increasing (violated at index {0})")]
    NotIncreasing(usize),
    #[error("frequency grid contains a non-finite value at index {0}")]
    NonFinite(usize),
}

/// Rejected probe or model configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

/// Rejected spectral-density parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("support [{min}, {max}] is empty or inverted")]
    EmptySupport { min: f64, max: f64 },
    #[error("declared support [{min}, {max}] does not match the one fixed by the parameters")]
    SupportMismatch { min: f64, max: f64 },
    #[error("tabulated data needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("tabulated frequencies and values differ in length ({omegas} vs {values})")]
    LengthMismatch { omegas: usize, values: usize },
    #[error("tabulated frequencies must be strictly increasing (violated at index {0})")]
    NotIncreasing(usize),
    #[error("tabulated value at index {index} is negative ({value})")]
    NegativeSample { index: usize, value: f64 },
    #[error("tabulated entry at index {0} is not finite")]
    NonFiniteSample(usize),
    #[error("unknown spectral-density kind {0:?}")]
    UnknownKind(String),
    #[error("bad parameter block for kind {kind:?}: {detail}")]
    BadParams { kind: &'static str, detail: String },
}

/// The adaptive quadrature could not reach the requested tolerance.
#[derive(Debug, Clone, PartialEq, Error)]
#[error(
    "quadrature on [{lower}, {upper}] stalled at estimated error {error:.3e} \
     (tolerance {tolerance:.3e}, {panels} panels)"
)]
pub struct QuadratureFailure {
    pub lower: f64,
    pub upper: f64,
    pub error: f64,
    pub tolerance: f64,
    pub panels: usize,
}

/// Emission-dynamics failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    /// The frequency window failed to account for the initial excitation:
    /// spectral weight is missing from the inversion integral.
    #[error("frequency window too narrow: {0}")]
    WindowTooNarrow(String),
    /// The adaptive ODE stepper gave up (step underflow, budget, or norm drift).
    #[error("stepper failure: {0}")]
    StepperFailure(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureFailure),
    #[error("t_max must be positive and finite, got {0}")]
    BadTimeSpan(f64),
    #[error("need at least 2 output samples, got {0}")]
    TooFewSamples(usize),
    #[error("need at least 1 bath mode, got {0}")]
    NoModes(usize),
}

/// Reconstruction-stage failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error("array length {got} does not match grid length {expected}")]
    GridMismatch { expected: usize, got: usize },
    #[error("verdict needs at least {needed} unflagged points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("spectrum carries no uncertainties; sigma_R and sigma_T are required")]
    MissingUncertainty,
    #[error("reflectance floor must be in (0, 1), got {0}")]
    BadFloor(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("reflectance at index {index} is outside [0, 1]: {value}")]
    BadReflectance { index: usize, value: f64 },
    #[error("transmittance at index {index} is outside [0, 1]: {value}")]
    BadTransmittance { index: usize, value: f64 },
    #[error("sigma at index {index} is negative or non-finite: {value}")]
    BadSigma { index: usize, value: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Malformed on-disk data (CSV spectra, histories, tabulated densities).
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:1: unrecognized header {found:?}")]
    Header { path: String, found: String },
    #[error("{path}:{line}: expected {expected} fields, found {found}")]
    FieldCount {
        path: String,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: could not parse {field:?} as a number")]
    BadNumber {
        path: String,
        line: usize,
        field: String,
    },
    #[error("{path}:{line}: unknown flag token {token:?}")]
    BadFlag {
        path: String,
        line: usize,
        token: String,
    },
    #[error("{path}: no data rows")]
    Empty { path: String },
    #[error("{path}: {source}")]
    Sd {
        path: String,
        #[source]
        source: SdError,
    },
    #[error("{path}: {source}")]
    Grid {
        path: String,
        #[source]
        source: GridError,
    },
    #[error("{path}: {source}")]
    Spectrum {
        path: String,
        #[source]
        source: ReconstructError,
    },
}
