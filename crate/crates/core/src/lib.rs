//! Functional compression over tree networks.
//!
//! Sources observed at the leaves of a tree send colorings of their
//! characteristic graphs toward a receiver that needs a function of all of
//! them. The crate provides the graph constructions, coloring searches,
//! decodability checks, graph-entropy rate bounds and an end-to-end
//! simulator for the resulting codes.

pub mod ccc;
pub mod chargraph;
pub mod coloring;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod graph_entropy;
pub mod model;
pub mod netsim;
pub mod prob;

pub use error::{Error, Result};
pub use graph::Graph;
pub use model::{JointModel, Scenario};
