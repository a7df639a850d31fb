use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A map descriptor violates one of its invariants.
    #[error("invalid map descriptor: {0}")]
    Descriptor(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation is not available for this kind of map.
    #[error("unsupported: {0}")]
    Capability(String),
    /// The map degenerates (zero mean radius, |μ| ≥ 1, ...).
    #[error("degenerate map: {0}")]
    Degenerate(String),
    /// A trace does not reach deep enough for the requested analysis.
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    /// Planning produced no annulus pieces.
    #[error("empty plan: {0}")]
    EmptyPlan(String),
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
