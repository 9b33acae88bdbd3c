use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incidence matrix at level {level} has a zero row or column")]
    ZeroRowOrColumn { level: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("level {level} out of range 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("bad cut sequence: {0}")]
    BadCutSequence(String),
    #[error("order table disagrees with incidence at level {level}, vertex {vertex}")]
    OrderMismatch { level: usize, vertex: usize },
    #[error("empty vertex set in subdiagram at level {level}")]
    BadSubdiagram { level: usize },
    #[error("substitution is not left proper")]
    NotLeftProper,
    #[error("invalid path prefix: {0}")]
    InvalidPrefix(String),
    #[error("ordinal out of range")]
    OrdinalOutOfRange,
    #[error("equal column sums fail at level {level}")]
    NotEcs { level: usize },
    #[error("no distinguished eigenvalue greater than one")]
    NoDistinguishedEigenvalue,
    #[error("comparison is inconclusive at the current precision: {0}")]
    Inconclusive(String),
    #[error("spine broken at level {level}: zero vertical entry")]
    SpineBroken { level: usize },
    #[error("not a 2x2 equal row sum diagram: {0}")]
    NotTwoByTwoErs(String),
    #[error("equal row sums fail at level {level}")]
    NotErs { level: usize },
    #[error("tower of height {height} exceeds the floor cap {cap}")]
    CapExceeded { height: String, cap: usize },
    #[error("empty table")]
    EmptyTable,
    #[error("brute force enumeration too large ({0} prefixes)")]
    TooLarge(String),
    #[error("substitution scheme is not proper at stage {stage}")]
    NotProper { stage: usize },
    #[error("empty substitution scheme")]
    EmptyScheme,
    #[error("bad period {period} for window of length {len}")]
    BadPeriod { period: usize, len: usize },
    #[error("bad kneading map: {0}")]
    BadKneadingMap(String),
    #[error("scale too short: {0}")]
    ScaleTooShort(String),
    #[error("gap k - Q(k) unbounded on the built range")]
    UnboundedGapOnRange,
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
