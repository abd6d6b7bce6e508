//! Exact computations with cofinite graphs: finite relation and partition
//! algebra, compatible equivalence relations and quotient graphs, filter-base
//! presentations of cofinite uniformities, chain inverse systems, and
//! truncated profinite completions.

pub mod error;
pub mod relations;
pub mod topograph;
pub mod uniformity;
pub mod invsys;
pub mod presented;

pub use error::Error;
