//! Weisfeiler-Leman refinement with iteration counting, logarithmic-height
//! block decompositions of connected graphs, angle-walk vertex
//! identification for 3-connected planar graphs, and decomposition-aware
//! canonical certificates for planar graphs.
//!
//! Every heavy algorithm is paired with a brute-force counterpart in
//! [`oracle`] so results can be cross-checked on small inputs.

pub mod canon;
pub mod decompose;
pub mod error;
pub mod experiment;
pub mod families;
pub mod graph;
pub mod oracle;
pub mod planar;
pub mod wl;

pub use error::{Error, Result};
pub use graph::Graph;
