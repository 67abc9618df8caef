use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Component counts of two objects that must agree do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An argument lies outside the domain of the operation (negative box side,
    /// unbounded region, K larger than the patch, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A finite patch does not faithfully cover the set an average is taken over.
    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("unsupported transform: {0}")]
    UnsupportedTransform(String),

    /// Invalid data handed to a constructor.
    #[error("construction error: {0}")]
    Construction(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
