use thiserror::Error;

/// Which factor of the integrand failed the positivity requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleKind {
    Zero,
    Negative,
}

impl std::fmt::Display for PoleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoleKind::Zero => f.write_str("zero"),
            PoleKind::Negative => f.write_str("negative"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("cannot parse rational {0:?}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no threshold: both sides have the same eta coefficient")]
    NoThreshold,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("integrand pole: factor {factor} is {kind}")]
    Pole { factor: usize, kind: PoleKind },

    #[error("certification failed: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
