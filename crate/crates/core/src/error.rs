use thiserror::Error;

use crate::symbols::Label;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("could not parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("duplicate label {0}")]
    DuplicateLabel(Label),

    #[error("label {label} out of range 1..={n}")]
    LabelOutOfRange { label: u32, n: usize },

    #[error("empty block")]
    EmptyBlock,

    #[error("missing label {0}")]
    MissingLabel(Label),

    #[error("level must be at least 1")]
    ZeroLevel,

    #[error("level {0} exceeds the supported maximum of {max}", max = crate::symbols::MAX_LABEL)]
    LevelTooLarge(usize),

    #[error("block width must be at least 1")]
    ZeroWidth,

    #[error("level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("label map is not injective on {0}")]
    NotInjective(Label),

    #[error("label {0} has no image under the relabeling")]
    UnmappedLabel(Label),

    #[error("label sets overlap at {0}")]
    OverlappingLabels(Label),

    #[error("chains have different label sets")]
    LabelSetMismatch,

    #[error("unsupported complex: {0}")]
    UnsupportedSpec(String),

    #[error("{0} is not a cell of the complex")]
    NotInComplex(String),

    #[error("{0} is not a critical cell")]
    NotCritical(String),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("residual maximum {0} is matched downward; the gradient field is inconsistent")]
    MatchedDownMaximum(String),

    #[error("reduction stalled at {0}: the residual maximum did not decrease")]
    StalledReduction(String),

    #[error("color {k} out of range for d = {d}")]
    ColorOutOfRange { k: usize, d: usize },

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("coefficient overflow")]
    Overflow,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
