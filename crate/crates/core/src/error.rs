use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("photon number not conserved: input has {input}, output has {output}")]
    Conservation { input: usize, output: usize },
    #[error("value outside domain: {0}")]
    Domain(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeLimit(_) => 3,
            Error::Numeric(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
