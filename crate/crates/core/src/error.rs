use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element reduces to the identity")]
    IdentityElement,

    #[error("free basis rank must lie in 2..=26, got {0}")]
    InvalidRank(usize),

    #[error("letter `{letter}` is outside the basis of rank {rank}")]
    LetterOutOfBasis { letter: char, rank: usize },

    #[error("basis mismatch: rank {left} vs rank {right}")]
    BasisMismatch { left: usize, right: usize },

    #[error("requires rank ≥ {needed}, got rank {got}")]
    RankTooSmall { needed: usize, got: usize },

    #[error("degenerate twist: twisted letter and twistor are both `{0}`")]
    DegenerateTwist(char),

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),

    #[error("scalar must be positive, got {0}")]
    NonPositiveScalar(String),

    #[error("operation undefined on the zero current")]
    ZeroCurrent,

    #[error("projective vectors have different levels ({0} vs {1})")]
    LevelMismatch(usize, usize),

    #[error("every test class has translation length 0")]
    AllElliptic,

    #[error("sequence for `{subject}` did not reach linear growth within {cap} steps: [{sequence}]")]
    NotStabilized {
        subject: String,
        cap: usize,
        sequence: String,
    },

    #[error("(a; mu_f) must be odd, got {0}")]
    ParityPrecondition(String),

    #[error("word `{0}` uses letters outside {{a, b}}")]
    LettersOutsideAB(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Error {
    /// Stable short code, printed by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IdentityElement => "identity-element",
            Error::InvalidRank(_) => "invalid-rank",
            Error::LetterOutOfBasis { .. } => "letter-out-of-basis",
            Error::BasisMismatch { .. } => "basis-mismatch",
            Error::RankTooSmall { .. } => "rank-too-small",
            Error::DegenerateTwist(_) => "degenerate-twist",
            Error::NotAutomorphism(_) => "not-automorphism",
            Error::InvalidSplitting(_) => "invalid-splitting",
            Error::NonPositiveScalar(_) => "non-positive-scalar",
            Error::ZeroCurrent => "zero-current",
            Error::LevelMismatch(..) => "level-mismatch",
            Error::AllElliptic => "all-elliptic",
            Error::NotStabilized { .. } => "not-stabilized",
            Error::ParityPrecondition(_) => "parity-precondition",
            Error::LettersOutsideAB(_) => "letters-outside-ab",
            Error::Parse { .. } => "parse",
        }
    }
}
