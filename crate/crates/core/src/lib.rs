//! Distance-based controllability bounds for leader-follower consensus
//! networks `x' = -L x + B u`.
//!
//! The central quantity is `delta`, the length of the longest
//! pseudo-monotonically increasing sequence of distance-to-leaders
//! vectors ([`bound`]). It lower-bounds the rank of the controllability
//! matrix for every positive weighting of the graph; [`oracle`] computes
//! that rank exactly to check it. [`select`] finds minimal leader sets
//! for a target bound, [`generators`] and [`experiments`] produce the
//! random ensembles used for comparisons.

pub mod bound;
pub mod edgelist;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod matrix;
pub mod oracle;
pub mod rng;
pub mod select;

pub use bound::{
    brute_force_delta, delta_bound, is_pmi, mu_bound, upsilon_count, BoundError, BoundReport,
    DlMatrix, LeaderSet, PmiSequence,
};
pub use graph::{DistanceMatrix, Graph, GraphError, LaplacianMatrix, Weight};
