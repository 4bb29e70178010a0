use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("integration window too small: {0}")]
    Window(String),

    #[error("model outside its validity range: {0}")]
    ModelValidity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed config: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command layer: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence(_) | Error::Window(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}
