//! Simulation core for first passage percolation on configuration-model
//! random graphs with i.i.d. exponential edge weights.
//!
//! The crate is organised bottom-up:
//!
//! * [`degree_model`] defines degree laws, their size-biased companions and samplers.
//! * [`config_model`] builds multigraphs by uniform stub matching.
//! * [`tree_flow`] implements the flow on a tree with prescribed degrees.
//! * [`swg`] grows shortest-weight graphs, in an annealed process mode and on realized graphs.
//! * [`oracle`] provides exponential edge weights and a textbook Dijkstra.
//! * [`limit_laws`] samples the limiting random variables of hopcount and weight.
//! * [`stats`] holds theory constants, goodness-of-fit tests and experiment summaries.
//! * [`par`] maps over replicates in parallel or sequentially, behind the `parallel` feature.

pub mod config_model;
pub mod degree_model;
pub mod limit_laws;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod special;
pub mod stats;
pub mod swg;
pub mod tree_flow;

pub use config_model::{DegreeSequence, MultiGraph};
pub use degree_model::{DegreeDistribution, DegreeLaw, Nu, SizeBiasedDistribution};
pub use oracle::WeightedGraph;
pub use rng::RngStream;
