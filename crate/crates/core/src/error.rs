use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Each variant carries a stable identifier (see [`Error::code`]) that the
/// command-line front end prints alongside the message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tree has no nodes")]
    EmptyTree,
    #[error("node {node} refers to missing parent {parent}")]
    ParentOutOfRange { node: usize, parent: usize },
    #[error("parent links contain a cycle through node {node}")]
    CycleDetected { node: usize },
    #[error("more than one root: nodes {first} and {second} have no parent")]
    MultipleRoots { first: usize, second: usize },
    #[error("node {node} has height {child} but its parent {parent} has height {parent_height}")]
    NonIncreasingHeight {
        node: usize,
        parent: usize,
        child: f64,
        parent_height: f64,
    },
    #[error("node {node} has non-finite height {height}")]
    NonFiniteHeight { node: usize, height: f64 },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("leaf order does not match the tree's leaves: {0}")]
    OrderMismatch(String),
    #[error("shift amount must be non-negative, got {0}")]
    NegativeEpsilon(f64),
    #[error("epsilon must be strictly positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("three-point condition fails at ({i}, {j}, {k})")]
    ThreePointViolation { i: usize, j: usize, k: usize },
    #[error("entry ({i}, {j}) lies below a diagonal entry")]
    DiagonalDominanceViolation { i: usize, j: usize },
    #[error("tree has {found} leaves, more than the limit of {limit}")]
    TooManyLeaves { found: usize, limit: usize },
    #[error("leaf count must be at least 1, got {0}")]
    InvalidLeafCount(usize),
    #[error("invalid height range [{0}, {1})")]
    InvalidHeightRange(f64, f64),
    #[error("invalid partial matching: {0}")]
    InvalidMatching(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("barcodes hold {found} intervals in total, brute force handles at most {limit}")]
    TooLarge { found: usize, limit: usize },
    #[error("leaf counts differ: {0} vs {1}")]
    LeafCountMismatch(usize, usize),
    #[error("leaf heights are not pairwise distinct (height {0} repeats)")]
    DuplicateLeafHeights(f64),
    #[error("trees lie in different chambers")]
    NotSameChamber,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("sample count must be at least 1")]
    InvalidSampleCount,
    #[error("candidate scan found {scan} but bisection found {bisect}")]
    CandidateScanDefect { scan: f64, bisect: f64 },
    #[error("decision is not monotone: feasible at {feasible} but infeasible at {infeasible}")]
    MonotonicityDefect { feasible: f64, infeasible: f64 },
    #[error("witness check failed: {0}")]
    WitnessDefect(String),
    #[error("line {line}, field `{field}`: {message}")]
    Syntax {
        line: usize,
        field: String,
        message: String,
    },
}

impl Error {
    /// Stable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyTree => "EmptyTree",
            Error::ParentOutOfRange { .. } => "ParentOutOfRange",
            Error::CycleDetected { .. } => "CycleDetected",
            Error::MultipleRoots { .. } => "MultipleRoots",
            Error::NonIncreasingHeight { .. } => "NonIncreasingHeight",
            Error::NonFiniteHeight { .. } => "NonFiniteHeight",
            Error::InvalidPoint(_) => "InvalidPoint",
            Error::OrderMismatch(_) => "OrderMismatch",
            Error::NegativeEpsilon(_) => "NegativeEpsilon",
            Error::NonPositiveEpsilon(_) => "NonPositiveEpsilon",
            Error::MalformedMatrix(_) => "MalformedMatrix",
            Error::ThreePointViolation { .. } => "ThreePointViolation",
            Error::DiagonalDominanceViolation { .. } => "DiagonalDominanceViolation",
            Error::TooManyLeaves { .. } => "TooManyLeaves",
            Error::InvalidLeafCount(_) => "InvalidLeafCount",
            Error::InvalidHeightRange(..) => "InvalidHeightRange",
            Error::InvalidMatching(_) => "InvalidMatching",
            Error::InvalidInterval(_) => "InvalidInterval",
            Error::TooLarge { .. } => "TooLarge",
            Error::LeafCountMismatch(..) => "LeafCountMismatch",
            Error::DuplicateLeafHeights(_) => "DuplicateLeafHeights",
            Error::NotSameChamber => "NotSameChamber",
            Error::InvalidPath(_) => "InvalidPath",
            Error::InvalidSampleCount => "InvalidSampleCount",
            Error::CandidateScanDefect { .. } => "CandidateScanDefect",
            Error::MonotonicityDefect { .. } => "MonotonicityDefect",
            Error::WitnessDefect(_) => "WitnessDefect",
            Error::Syntax { .. } => "SyntaxError",
        }
    }

    /// Whether the error comes from reading malformed input text rather than
    /// from a domain rule.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Syntax { .. })
    }
}
