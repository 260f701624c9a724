use thiserror::Error;

use crate::game::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} is out of range for an instance with {n} vertices")]
    UnknownVertex { vertex: Vertex, n: usize },

    #[error("self-arc on vertex {0}")]
    SelfArc(Vertex),

    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(Vertex, Vertex),

    #[error("n * W = {n} * {max_abs_weight} exceeds the arithmetic guard")]
    WeightOverflow { n: usize, max_abs_weight: i64 },

    #[error("partition covers {got} vertices but the instance has {expected}")]
    PartitionSize { expected: usize, got: usize },

    #[error("vertex {0} is assigned to more than one coalition")]
    DuplicateMember(Vertex),

    #[error("vertex {0} is not assigned to any coalition")]
    MissingMember(Vertex),

    #[error("color {color} is outside 1..={k}")]
    ColorOutOfRange { color: usize, k: usize },

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("signature table grew past the cap of {cap} entries")]
    ResourceLimit { cap: usize },

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("assignment has {got} values but the formula has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },

    #[error("assignment leaves clause {} unsatisfied", .0 + 1)]
    UnsatisfiedClause(usize),

    #[error("{0}")]
    Precondition(String),
}
