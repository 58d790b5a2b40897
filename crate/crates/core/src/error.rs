use thiserror::Error;

/// Errors produced by the engine.
///
/// Resource caps (`PieceCapExceeded`, `BranchCapExceeded`, `LoopCapExceeded`,
/// `EnumerationCap`) are deliberately distinct from mathematical or input
/// errors: callers that must never guess turn them into an explicit
/// `Unknown` status instead of silently truncating.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("duplicate point in orbit")]
    DuplicatePoint,
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("argument outside the map domain")]
    OutOfDomain,
    #[error("piece cap exceeded ({0} pieces)")]
    PieceCapExceeded(usize),
    #[error("branch cap exceeded ({0} states visited)")]
    BranchCapExceeded(usize),
    #[error("loop-search cap exceeded ({0} states visited)")]
    LoopCapExceeded(usize),
    #[error("enumeration cap exceeded (period {0} above configured limit)")]
    EnumerationCap(usize),
    #[error("point is not a fixed point of the map")]
    NotAFixedPoint,
    #[error("coverage violation: {0}")]
    CoverageViolation(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("backward chain depth unreachable: {0}")]
    DepthUnreachable(String),
    #[error("parse error: {0}")]
    ParseError(String),
}

impl Error {
    /// True for errors caused by configurable resource limits rather than by
    /// the mathematics or the input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::PieceCapExceeded(_)
                | Error::BranchCapExceeded(_)
                | Error::LoopCapExceeded(_)
                | Error::EnumerationCap(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
