use thiserror::Error;

/// Row or column of a Cayley table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row(usize),
    Column(usize),
}

impl std::fmt::Display for Line {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Line::Row(r) => write!(f, "row {r}"),
            Line::Column(c) => write!(f, "column {c}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("entry {value} at ({row}, {col}) is outside 0..{n}")]
    EntryOutOfRange { row: usize, col: usize, value: usize, n: usize },

    #[error("not a Latin square: {0} repeats an entry")]
    NotLatinSquare(Line),

    #[error("table has no two-sided identity element")]
    NoIdentity,

    #[error("empty table")]
    Empty,

    #[error("loop of order {0} exceeds the supported maximum of 65536")]
    TooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown builtin loop `{0}`")]
    UnknownName(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("subloop is not normal: {0}")]
    NotNormal(String),

    #[error("cap of {cap} exceeded (reached {partial} before stopping)")]
    CapExceeded { cap: usize, partial: usize },

    #[error("upper central series stalled at order {order} before reaching the whole loop")]
    SeriesStalled { order: usize },

    #[error("primary decomposition failed: {0}")]
    DecompositionFailure(String),

    #[error("chain is not descending at position {0}")]
    NotDescending(usize),

    #[error("group is not materialized")]
    NotMaterialized,

    #[error("not a central direct factor: {0}")]
    NotCentralFactor(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no complement found (search exhausted)")]
    NoComplementFound,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
