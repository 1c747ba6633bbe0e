use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRatError {
    #[error("decimal notation is not accepted, write `{0}` as p/q")]
    Decimal(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed rational `{0}`")]
    Malformed(String),
}

/// Violations of the piecewise-linear map invariants. Indices refer to
/// breakpoint positions (0-based) or, for slopes, to the segment between
/// breakpoints `index` and `index + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("a map needs at least two breakpoints")]
    TooFewPoints,
    #[error("xs and ys have different lengths ({xs} vs {ys})")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("first breakpoint must be x = 0, found {0}")]
    BadStart(Rat),
    #[error("last breakpoint must be x = 1, found {0}")]
    BadEnd(Rat),
    #[error("breakpoint {index}: x = {x} does not exceed the previous breakpoint")]
    NotIncreasing { index: usize, x: Rat },
    #[error("breakpoint {index}: y = {y} lies outside [0,1]")]
    OutOfRange { index: usize, y: Rat },
    #[error("segment {index}: zero slope (y = {y} on both ends)")]
    ZeroSlope { index: usize, y: Rat },
}

/// Errors raised by the map file and certificate readers, with 1-based
/// line and column positions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: {source}")]
    Map {
        line: usize,
        column: usize,
        #[source]
        source: MapError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Rat(#[from] ParseRatError),
    #[error("argument {0} lies outside [0,1]")]
    Domain(Rat),
    #[error("{what} budget exceeded: reached {reached}, limit {limit}")]
    Budget { what: &'static str, reached: usize, limit: usize },
    #[error("discontinuity: {0}")]
    Continuity(String),
    #[error("invalid window map: {0}")]
    InvalidWindow(String),
    #[error("determining values {} and {} share a grid cell", .0.0, .0.1)]
    CellCollision(Box<(Rat, Rat)>),
    #[error("reflection leaves [0,1]: {0}")]
    Range(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
