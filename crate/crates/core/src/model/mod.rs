//! Problem instance, task profiles and the mutable placement state.

mod circuit;
mod constraints;
mod shape;
mod state;
mod task;

pub use circuit::{Block, Circuit, CircuitSpec, GridDims, Net, Pin, Terminal, DEFAULT_UTILIZATION};
pub use constraints::{AlignmentPair, BindMode, BoundaryBinding, ConstraintSet, Preplacement};
pub(crate) use shape::hard_shape;
pub use shape::{ar_candidates, ar_from_unit, clip_ar, shape_from_ar};
pub use state::{default_order, interval_overlap, FloorplanState, Placement};
pub use task::{Rule, RuleSet, TaskProfile, Thresholds, Weights};
