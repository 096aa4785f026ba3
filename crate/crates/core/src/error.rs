use thiserror::Error;

use crate::syntax::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("invalid atoms: {0}")]
    Atoms(String),
    #[error("conditioning event `{0}` is impossible")]
    ImpossibleCondition(String),
    #[error("{0}")]
    Nested(String),
    #[error("parameter `{symbol}` of `{quantity}` refers to a quantity with no assessed value")]
    Unresolved { symbol: String, quantity: String },
    #[error("value {value} for `{quantity}` lies outside [0,1]")]
    OutOfRange { quantity: String, value: String },
    #[error("the base assessment is incoherent")]
    Incoherent,
    #[error("the premises are not p-consistent")]
    NotPConsistent,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
