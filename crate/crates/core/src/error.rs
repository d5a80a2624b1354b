use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("parse error: {msg}")]
pub struct ParseError {
    pub msg: String,
}

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        ParseError { msg: msg.into() }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("signature error: {0}")]
    Signature(String),
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("formula is not prenex Pi2/Sigma2: {0}")]
    NotPrenex(String),
    #[error("non-ground term: {0}")]
    NonGround(String),
    #[error("elaboration failed: {0}")]
    Elaborate(String),
    #[error("invalid proof: {0}")]
    InvalidProof(String),
    #[error("end-sequent is not prenex Sigma1: {0}")]
    NotSigma1(String),
    #[error("stale redex descriptor: {0}")]
    StaleRedex(String),
    #[error("rewrite budget of {0} steps exhausted")]
    RewriteBudget(usize),
    #[error("step limit of {0} reductions exceeded")]
    StepLimit(usize),
    #[error("no admissible redex: {0}")]
    NoAdmissibleRedex(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
