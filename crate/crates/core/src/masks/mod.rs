//! Rule matrices over every candidate anchor of a block, their binarization
//! and the availability mask that filters the action space.
//!
//! Every real-valued mask is indexed by the anchor `(x, y)` of the subject
//! block and holds the value the corresponding metric would take if the
//! block were placed there. Anchors whose footprint overhangs the die still
//! receive values; the position mask removes them.

mod adjacency;
mod alignment;
mod binarize;
mod engine;
mod plugin;
mod position;
mod terminal;
mod wire;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grid::Grid;

pub use adjacency::{adjacent_block_mask, merge_block_masks};
pub use alignment::alignment_mask;
pub use binarize::binarize;
pub use engine::{availability_mask, BlockMasks, MaskEngine, Rung};
pub use plugin::{
    block_distance_mask, AlignmentRule, BlockDistanceRule, GroupingRule, RulePlugin, Sense,
    TerminalRule,
};
pub use position::position_mask;
pub use terminal::{adjacent_terminal_mask, merge_terminal_masks};
pub use wire::wire_mask;

pub type BinaryMask = Grid<bool>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleTag {
    /// T: block-terminal distance.
    Terminal,
    /// B: block-block adjacency length.
    AdjacentBlock,
    /// A: inter-die alignment score.
    Alignment,
    /// P: in-bounds and overlap-free.
    Position,
    /// HPWL increment.
    Wire,
    /// Rule contributed by a [`RulePlugin`].
    Custom(String),
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTag::Terminal => f.write_str("terminal"),
            RuleTag::AdjacentBlock => f.write_str("block"),
            RuleTag::Alignment => f.write_str("alignment"),
            RuleTag::Position => f.write_str("position"),
            RuleTag::Wire => f.write_str("wire"),
            RuleTag::Custom(name) => f.write_str(name),
        }
    }
}

impl std::str::FromStr for RuleTag {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Ok(match s {
            "terminal" | "T" => RuleTag::Terminal,
            "block" | "B" => RuleTag::AdjacentBlock,
            "alignment" | "A" => RuleTag::Alignment,
            "position" | "P" => RuleTag::Position,
            "wire" | "W" => RuleTag::Wire,
            other => return Err(crate::Error::UnknownRule(other.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MergeMode {
    None,
    Max,
    Min,
    Sum,
}

/// A `W × H` rule matrix for one subject block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleMask {
    pub tag: RuleTag,
    pub block: usize,
    pub merge: MergeMode,
    pub values: Grid<f64>,
}

impl RuleMask {
    pub fn new(tag: RuleTag, block: usize, values: Grid<f64>) -> Self {
        RuleMask {
            tag,
            block,
            merge: MergeMode::None,
            values,
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        *self.values.get(x, y)
    }
}
