use thiserror::Error;

use crate::relations::ElemId;
use crate::topograph::{CompatibilityViolation, GraphViolation, MapViolation};

/// Contract violations raised by operations whose preconditions fail.
///
/// Checks that produce *data* (validation reports, separation witnesses,
/// commutation witnesses) do not go through this type; only genuine misuse of
/// an operation does.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("carrier mismatch in {context}")]
    CarrierMismatch { context: &'static str },
    #[error("unknown element `{0}`")]
    UnknownElement(ElemId),
    #[error("duplicate element `{0}`")]
    DuplicateElement(ElemId),
    #[error("map is not surjective: `{0}` has no preimage")]
    NotSurjective(ElemId),
    #[error("kernel not contained in partition: `{0}` and `{1}` share a fiber but not a block")]
    KernelNotRefining(ElemId, ElemId),
    #[error("partition is not compatible with the graph: {0}")]
    Incompatible(CompatibilityViolation),
    #[error("graph has no orientation")]
    MissingOrientation,
    #[error("empty family")]
    EmptyFamily,
    #[error("base is not separating: `{0}` and `{1}` lie in every base member")]
    NotSeparating(ElemId, ElemId),
    #[error("partition is not a member of the base")]
    NotInBase,
    #[error("family does not commute with the bonding maps at level {level} on `{witness}`")]
    IncoherentFamily { level: u32, witness: ElemId },
    #[error("level {0} is not available in this system")]
    LevelUnavailable(u32),
    #[error("invalid graph: {0}")]
    InvalidGraph(GraphViolation),
    #[error("invalid graph map: {0}")]
    InvalidGraphMap(MapViolation),
    #[error("window of radius {got} is too small, need at least {needed}")]
    WindowTooSmall { needed: u32, got: u32 },
    #[error("presentation has the improper base and does not support this operation")]
    ImproperBase,
}
