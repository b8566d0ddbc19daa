//! Cooperative pathfinding on motion graphs.
//!
//! The crate covers the whole pipeline: grid-world instance generation
//! ([`graph`]), joint-state-space kinematics and solution validation
//! ([`joint`]), the planners ([`planner`]: joint-space A*, MA-RRT* and its
//! informed-sampling variant) and the benchmark harness ([`bench`]).

pub mod bench;
pub mod error;
pub mod graph;
pub mod joint;
pub mod planner;
pub mod util;

pub use error::{Error, Result};
