//! Temporal social network analytics.
//!
//! The crate is organised bottom-up:
//!
//! - [`tsn`]: timeframes, temporal networks, groups and groupings.
//! - [`community`]: k-clique percolation and Louvain modularity optimisation.
//! - [`importance`]: social position and degree/closeness/betweenness centrality.
//! - [`ged`]: the inclusion measure and the GED event classifier/tracker.
//! - [`baselines`]: the Asur et al. and Palla et al. trackers used for comparison.

pub mod baselines;
pub mod community;
pub mod error;
pub mod ged;
pub mod importance;
pub mod tsn;

pub use error::{Error, Result};
pub use tsn::{FrameGraph, Group, GroupId, GroupRef, Grouping, Interaction, NodeId, TemporalNetwork, WeightedEdge};
