use thiserror::Error;

use crate::graph::Direction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected 2 node labels, found {tokens}")]
    EdgeArity { line: usize, tokens: usize },
    #[error("tree literal: {msg} at position {pos}")]
    TreeLiteral { pos: usize, msg: &'static str },
    #[error("line {line}: {msg}")]
    Matrix { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Weights { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown node label {0:?}")]
    UnknownLabel(String),
    #[error("node index {0} out of range for graph with {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("direction {requested:?} is not valid for a {} graph", if *.directed { "directed" } else { "undirected" })]
    DirectionMismatch { requested: Direction, directed: bool },
    #[error("graph has no nodes")]
    Empty,
    #[error("graphs must both be directed or both undirected")]
    KindMismatch,
}

/// Raised by the tree distance when an internal accounting invariant breaks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TedError {
    #[error("level {level}: matching residual {matching} - {padding_below} is odd or negative")]
    MatchingResidual {
        level: usize,
        matching: i64,
        padding_below: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("tree with {size} nodes exceeds the oracle cap of {cap}")]
    TooLarge { size: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weights must be strictly positive (level {level})")]
    NonPositive { level: usize },
}

/// Umbrella error for the node-level APIs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NedError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ted(#[from] TedError),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("graph is directed; use the directed node distance")]
    NeedsUndirected,
    #[error("graph is undirected; the directed node distance needs directed graphs")]
    NeedsDirected,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("ratio {0} is outside [0, 1]")]
    Ratio(f64),
    #[error("l must be at least 1")]
    ZeroL,
    #[error("anonymized graph has {anon} nodes but the ground truth covers {truth}")]
    TruthSize { anon: usize, truth: usize },
    #[error(transparent)]
    Ned(#[from] NedError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
