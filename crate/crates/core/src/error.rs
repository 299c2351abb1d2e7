use thiserror::Error;

use crate::layout::{Basis, Site};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("code distance must be at least 1")]
    ZeroDistance,
    #[error("{0} is not a syndrome site")]
    NotASyndromeSite(Site),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("a trial needs at least one noisy round")]
    NoRounds,
    #[error("fault probability {0} outside [0, 1)")]
    BadProbability(f64),
    #[error("fault round {round} outside noisy rounds 1..={rounds}")]
    FaultRoundOutOfRange { round: usize, rounds: usize },
    #[error("fault references op {op} but the schedule has {ops} ops")]
    UnknownOp { op: usize, ops: usize },
    #[error("fault class {class} does not apply to op {op}")]
    ClassMismatch { op: usize, class: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("{basis} events must share a basis with the graph")]
    BasisMismatch { basis: Basis },
    #[error("a single fault produced {count} {basis}-type detection events: {fault}")]
    TooManyEvents {
        basis: Basis,
        count: usize,
        fault: String,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("perfect matching needs an even node count, got {0}")]
    OddNodeCount(usize),
    #[error("edge ({0}, {1}) is not between two distinct nodes of the problem")]
    InvalidEdge(usize, usize),
    #[error("no weight given for pair ({0}, {1})")]
    MissingWeight(usize, usize),
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("corrected frame still violates {basis} stabilizers at {sites:?}")]
    UnsatisfiedStabilizer { basis: Basis, sites: Vec<Site> },
    #[error("decoder built for {expected} rounds, record has {actual}")]
    RoundMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("need at least {needed} point estimates, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("curves do not cross inside the sampled range")]
    NoCrossing,
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed results file: {0}")]
    Parse(String),
}
