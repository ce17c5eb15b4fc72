use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("field is not mean-zero (mode 0 = {0})")]
    NotMeanZero(Complex64),

    #[error("grid of {m} points cannot resolve modes up to {n} (need m >= {need})")]
    GridTooSmall { m: usize, n: usize, need: usize },

    #[error("Sobolev index {s} outside {range}")]
    SobolevRange { s: f64, range: &'static str },

    #[error("no oscillatory regime: c^2 + 2a = {0} <= 0")]
    NoOscillatoryRegime(f64),

    #[error("small-oscillation period {t0} is not below 2pi; no 2pi-periodic wave in this family")]
    PeriodTooLong { t0: f64 },

    #[error("turning point {f0} lies outside the potential well ({lo}, {hi})")]
    DivergentOrbit { f0: f64, lo: f64, hi: f64 },

    #[error("period root not bracketed: scanned periods [{lo}, {hi}] against target {target}")]
    NotBracketed { lo: f64, hi: f64, target: f64 },

    #[error("root finder did not converge: period error {0:e}")]
    NoConvergence(f64),

    #[error("elliptic parameter must lie in [0, 1), got {0}")]
    InvalidModulus(f64),

    #[error("roots must satisfy b1 < b2 < b3, got ({0}, {1}, {2})")]
    UnsortedRoots(f64, f64, f64),

    #[error("solution norm grew by {growth:.3}x at t = {t}; time step is unstable")]
    BlowUp { t: f64, growth: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
