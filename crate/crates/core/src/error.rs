use thiserror::Error;

/// Errors raised by the exact and numerical layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{value} is not fully factored below the trial-division bound {bound}")]
    FactorizationBound { value: String, bound: u64 },

    #[error("element is not invertible modulo {0}")]
    NotInvertible(u64),

    #[error("radicand {radicand} exceeds the class number bound {bound}")]
    ClassNumberBound { radicand: u64, bound: u64 },

    #[error("continued fraction period not found within {0} steps")]
    PeriodCap(usize),

    #[error("enumeration bound exceeded: modulus {modulus} > {bound}")]
    EnumerationBound { modulus: u64, bound: u64 },

    #[error("ray class formula is not an exact division: {numerator} / {denominator}")]
    InexactDivision { numerator: u64, denominator: u64 },

    #[error("no fiducial below tolerance after {restarts} restarts (best potential {best:e})")]
    NotFound { restarts: usize, best: f64 },

    #[error("overlap table is not a SIC: worst normalized modulus deviates by {0:e}")]
    NotSic(f64),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
