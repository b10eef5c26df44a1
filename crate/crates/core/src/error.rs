use thiserror::Error;

use crate::rational::Rational;
use crate::word::Word;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("partitions have different ambient sets")]
    AmbientMismatch,

    #[error("not a partition: {0}")]
    NotPartition(String),

    #[error("clopen set must be nonempty")]
    EmptySet,

    #[error("invalid transducer: {0}")]
    InvalidMap(String),

    #[error("invalid prefix exchange: {0}")]
    InvalidExchange(String),

    #[error("exchange ambient is not the whole space")]
    AmbientNotWhole,

    #[error("map is not surjective: image misses [{witness}]")]
    NotSurjective { witness: Word },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure is not normalized (total {0})")]
    NotNormalized(Box<Rational>),

    #[error("measure not preserved at [{witness}]: mu(f^-1) = {lhs}, nu = {rhs}")]
    PreservationViolated { witness: Word, lhs: Box<Rational>, rhs: Box<Rational> },

    #[error("set is not resolvable: {0}")]
    Unresolvable(String),

    #[error("search budget exhausted: {0}")]
    Budget(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("malformed value set: {0}")]
    MalformedValues(String),
}
