//! Exact inference in discrete Bayesian nets by component tree propagation.
//!
//! A net is split at the complete separators of its moral graph, the parts
//! are answered recursively, and their answers are stitched back together,
//! without ever triangulating the moral graph.

pub mod cli;
pub mod engine;
pub mod error;
pub mod format;
pub mod graph;
pub mod oracle;
pub mod random;
pub mod semibn;
pub mod tables;

pub use engine::Engine;
pub use error::{Error, Result};
pub use semibn::{Query, SemiBayesNet};
pub use tables::{Potential, VarId};
