//! Multi-resolution quadtree abstractions of probabilistic occupancy grids,
//! selected by an information-bottleneck tree search, with path planning on
//! the reduced graphs.
//!
//! Pipeline: load a [`grid::GridMap`], build the full [`tree::QuadTree`],
//! aggregate an [`info::JointModel`] and its [`info::InfoCache`], pick an
//! abstraction per trade-off value with [`info::qtree_search`], realize its
//! [`graph::AbstractGraph`], and plan with [`planner::plan`].

pub mod error;
pub mod experiments;
pub mod graph;
pub mod grid;
pub mod info;
pub mod planner;
pub mod render;
pub mod tree;

mod par;

pub use error::{Error, Result};
pub use par::mode_name;
