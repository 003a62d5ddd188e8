//! Rule-aware 3D floorplanning.
//!
//! Blocks are placed one at a time on a stack of integer grids. For the
//! current block every design rule is turned into a `W × H` matrix over
//! candidate anchors (distance to bound terminals, adjacency to island
//! members, alignment with the partner on the other die, HPWL increment,
//! free space). Thresholding and multiplying the matrices yields the
//! availability mask, and any placer that only picks available cells
//! satisfies the maskable rules by construction.
//!
//! - [`model`]: circuits, constraints, task profiles, placement state
//! - [`metrics`]: rule metrics, normalization, satisfaction counts
//! - [`masks`]: rule matrices, binarization, availability, rule plugins
//! - [`env`]: episodic environment and dense reward reconstruction
//! - [`solvers`]: mask-guided greedy, simulated annealing, random baseline
//! - [`io`]: bookshelf ingestion, file formats, SVG, reports
//! - [`cli`]: the `fp3d` command line

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod env;
mod error;
pub mod grid;
pub mod io;
pub mod masks;
pub mod metrics;
pub mod model;
pub mod solvers;

pub use error::{Error, Result};
