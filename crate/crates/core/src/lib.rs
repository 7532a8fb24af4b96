//! Exact ground-state tools for the two-dimensional Edwards-Anderson spin
//! glass on small lattices: couplings, ground states seen through windows,
//! critical values of single couplings, interfaces between two ground states
//! and the statistics built on them.

pub mod couplings;
pub mod cli;
pub mod criticality;
pub mod experiments;
pub mod error;
pub mod groundstate;
pub mod interface;
pub mod lattice;
pub mod report;
pub mod scene;
pub(crate) mod subsets;
pub mod tolerance;

pub use error::{LabError, Result};
