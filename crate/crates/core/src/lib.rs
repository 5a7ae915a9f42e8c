//! PageRank-centrality network formation games.
//!
//! Every node of a directed graph picks a fixed number of out-links to
//! maximize its own PageRank. The crate computes centralities and hitting
//! times, best responses, the tree-sum potential, equilibrium certificates
//! and best-response dynamics, in either `f64` or exact rational arithmetic.

pub mod centrality;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod experiment;
pub mod game;
pub mod graph;
pub mod linalg;
pub mod scalar;

pub use centrality::{hitting_times, kac_utility, pagerank, transition_matrix, GameSpec};
pub use error::{Error, Result};
pub use graph::{Configuration, OutDegreeProfile};
pub use scalar::{Rational, Scalar};
