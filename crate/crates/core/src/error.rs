use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation point inside the pole guard around s = {0}")]
    Pole(num_complex::Complex64),

    #[error("requested length {requested} exceeds stored length {available}")]
    Length { requested: usize, available: usize },

    #[error("sequence is not invertible: leading coefficient a[1] = 0")]
    NonInvertible,

    #[error("insufficient decay: {0}")]
    InsufficientDecay(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown generator family `{0}`")]
    UnknownFamily(String),

    #[error("malformed coefficient file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
