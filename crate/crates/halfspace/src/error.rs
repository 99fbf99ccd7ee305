use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("quadrature did not converge ({context}): error estimate {estimate:.3e} after {panels} panels")]
    Quadrature {
        context: String,
        estimate: f64,
        panels: usize,
    },
    #[error("ill-conditioned system: condition estimate {0:.3e}")]
    IllConditioned(f64),
    #[error("singular system")]
    Singular,
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Prefix a quadrature failure with the stage that triggered it.
    pub fn with_context(self, ctx: &str) -> Error {
        match self {
            Error::Quadrature {
                context,
                estimate,
                panels,
            } => Error::Quadrature {
                context: format!("{ctx}: {context}"),
                estimate,
                panels,
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
