use thiserror::Error;

use crate::surface::SurfaceType;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate surface {0}: fundamental group is trivial or cyclic")]
    DegenerateSurface(SurfaceType),

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("presentation mismatch: rank {left} vs rank {right}")]
    PresentationMismatch { left: usize, right: usize },

    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("no built-in generator library for surface {0}")]
    UnsupportedSurface(SurfaceType),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("invalid marking: {0}")]
    InvalidMarking(String),

    #[error("cap of {cap} exceeded ({found} found so far)")]
    CapExceeded { cap: usize, found: usize },

    #[error("word `{word}` is not in the subgroup: it ends at coset {coset}")]
    NotInSubgroup { word: String, coset: usize },

    #[error("automorphism does not preserve the subgroup: subgroup generator {generator} is sent to coset {coset}")]
    DoesNotPreserve { generator: String, coset: usize },

    #[error("generator {0} moves the chosen vector")]
    MovesVector(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
