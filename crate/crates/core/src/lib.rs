//! Schreier graphs of finitely generated groups: construction, exact walk
//! counts, spectral radii, local statistics, invariant random subgroups and
//! short-cycle counts.

pub mod builders;
pub mod cycles;
pub mod error;
pub mod exec;
pub mod graph;
pub mod irs;
pub mod local;
pub mod sgf;
pub mod spectral;
pub mod walks;
pub mod words;

pub use error::{Error, Result};
pub use graph::{Endpoint, Labeled, PermAction, SchreierGraph};
pub use words::{GenSet, Word};
