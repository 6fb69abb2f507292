use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polarization type: {0}")]
    InvalidPolarization(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("period matrix not symmetric: |tau[{row}][{col}] - tau[{col}][{row}]| = {deviation:e} exceeds {tol:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
        tol: f64,
    },

    #[error("imaginary part of period matrix not positive definite (smallest eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("vector is not a lattice point (coordinate {index} off integrality by {offset:e})")]
    LatticeMembership { index: usize, offset: f64 },

    #[error("group of order {order} exceeds enumeration cap {cap}")]
    SizeLimit { order: u128, cap: u128 },

    #[error("element {0:?} has an odd coordinate and is not in 2K1")]
    NotHalvable(Vec<i64>),

    #[error("pairing map is not injective for type {d:?}: classes {first:?} and {second:?} coincide")]
    InjectivityOfPsiFailed {
        d: Vec<u32>,
        first: Vec<i64>,
        second: Vec<i64>,
    },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("near-degenerate period matrix: {0}")]
    NearDegenerate(String),

    #[error("theta value overflows f64 (log magnitude {0:.1})")]
    Overflow(f64),

    #[error("degenerate sampling: evaluation matrix has rank {rank} < {expected}")]
    DegenerateSampling { rank: usize, expected: usize },

    #[error("interpolation system ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("interpolation residual {residual:e} relative to scale exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("block structure leak: off-block entry {residual:e} exceeds {limit:e}")]
    BlockLeak { residual: f64, limit: f64 },

    #[error("block criterion says {block}, direct SVD says {direct}")]
    VerdictMismatch { block: Verdict, direct: Verdict },

    #[error("multiplication map is injective; kernel is empty")]
    EmptyKernel,

    #[error("span mismatch: principal-angle residual {residual:e} (dimensions {left} vs {right})")]
    SpanMismatch {
        residual: f64,
        left: usize,
        right: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

/// Outcome of a rank test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    FullRank,
    Deficient,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::FullRank => f.write_str("full-rank"),
            Verdict::Deficient => f.write_str("deficient"),
        }
    }
}
