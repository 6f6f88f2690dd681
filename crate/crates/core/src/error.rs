use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("requested depth {requested} exceeds the configured cap {cap}")]
    DepthExceeded { requested: usize, cap: usize },
    #[error("not enough usable input: {0}")]
    EmptyInput(String),
    #[error("value {value} lies outside [{lo}, {hi}]")]
    RangeViolation { value: f64, lo: f64, hi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),
    #[error("constants for m = {0} are not tabulated (only m = 0 is supported)")]
    UnsupportedConstants(i64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("histograms have different bin edges")]
    EdgeMismatch,
    #[error("invalid bin specification: {0}")]
    BinSpec(String),
    #[error("linear part of map {index} is not contracting (spectral norm {norm})")]
    NonContracting { index: usize, norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
