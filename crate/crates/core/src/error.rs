use thiserror::Error;

use crate::functor::StateId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("constant set must be non-empty")]
    EmptyConstant,

    #[error("exponent alphabet must be non-empty")]
    EmptyAlphabet,

    #[error("duplicate element `{0}`")]
    Duplicate(String),

    #[error("value does not match functor: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("unknown state `{0}`")]
    UnknownState(StateId),

    #[error("map is not total: no image for `{0}`")]
    NotTotal(StateId),

    #[error("point `{0}` is not in the carrier")]
    PointOutsideCarrier(StateId),

    #[error("functors differ: `{left}` vs `{right}`")]
    FunctorMismatch { left: String, right: String },

    /// A powerset value is non-empty, so no precise factorization exists.
    #[error("powerset value at `{0}` is non-empty; only empty-valued maps into Pow are precise")]
    PowNotPrecise(StateId),

    #[error("no isomorphism between the two factorizations")]
    NotIsomorphic,

    #[error("map is not a homomorphism of pointed coalgebras")]
    NotAHomomorphism,

    #[error("search space of {size} candidates exceeds guard {guard}")]
    SearchSpaceTooLarge { size: u128, guard: u128 },

    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(StateId),

    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn shape(expected: impl Into<String>, found: impl std::fmt::Display) -> Self {
        Error::ShapeMismatch {
            expected: expected.into(),
            found: found.to_string(),
        }
    }
}
