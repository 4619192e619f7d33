use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: duplicate face identifier `{id}`")]
    DuplicateFace { line: usize, id: String },

    #[error("line {line}: value `{text}` is outside the representable range")]
    OutOfRange { line: usize, text: String },

    #[error("{0}")]
    Reference(String),

    #[error("mesh is not a closed triangulated surface: {0}")]
    InvalidMesh(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("face `{face}`: {reason}")]
    FaceDomain { face: String, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("linear program: {0}")]
    Lp(#[from] crate::simplex::LpError),

    #[error("reduced Hessian is not positive definite at iteration {iteration}")]
    Factorization { iteration: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
