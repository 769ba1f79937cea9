//! Multiplicative coalescent trajectories from breadth-first walks, with surplus edges,
//! ornamented excursions and scaling-limit checks.

pub mod alloc_stats;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod limit;
pub mod mosaic;
pub mod oracle;
pub mod stats;
pub mod surplus;
pub mod verify;
pub mod walk;

pub use config::{sample_clocks, sigma, ClockAssignment, RankedConfig, RngStream, StreamPurpose, WeightedConfig};
pub use dynamics::{build_f1, run_trajectory, MergerEvent, Trajectory};
pub use error::{Error, Result};
pub use graph::{Edge, EdgeKind, LabeledGraph, Partition};
pub use walk::{breadth_first_forest, decompose, Forest, WalkPath};
