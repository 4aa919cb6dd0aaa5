use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ordinal: {0}")]
    InvalidOrdinal(String),
    #[error("{0} is not a limit ordinal")]
    NotLimit(String),
    #[error("invalid finite set: {0}")]
    InvalidSet(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("set is empty")]
    EmptySet,
    #[error("{set} is not a member of {family}")]
    NotMember { set: String, family: String },
    #[error("stream is not strictly increasing at {0}")]
    NotIncreasing(u64),
    #[error("stream exhausted after {0} elements")]
    StreamExhausted(usize),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid tree node: {0}")]
    InvalidNode(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("node {0} is not maximal")]
    NotMaximal(String),
    #[error("empty cell at {0}")]
    EmptyCell(String),
    #[error("point {0} lies outside its cell")]
    SelectorOutside(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("{0}")]
    Config(String),
}
