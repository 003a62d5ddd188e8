use super::adjacency::adjacent_block_mask;
use super::alignment::alignment_mask_exec;
use super::terminal::terminal_mask_exec;
use super::{binarize, merge_block_masks, merge_terminal_masks, BinaryMask, RuleMask, RuleTag};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::metrics::{self, alignment_score, group_pairs};
use crate::model::{Circuit, FloorplanState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// A design rule expressed as a rule matrix, its binarization and a scalar
/// metric. New rules plug into [`super::MaskEngine`] through this trait.
pub trait RulePlugin: Send + Sync {
    fn name(&self) -> &str;

    /// Rule matrix for `block` in `state`, or `None` when the block is not
    /// subject to the rule (its binary mask is then all ones). Must be a pure
    /// function of its arguments.
    fn build(&self, state: &FloorplanState, block: usize) -> Result<Option<RuleMask>>;

    fn binarize(&self, mask: &RuleMask) -> Result<BinaryMask>;

    fn metric(&self, state: &FloorplanState) -> f64;

    fn sense(&self) -> Sense;
}

/// Boundary rule: distance to the bound terminals, merged by max (`ALL`) or
/// min (`ANY`).
pub struct TerminalRule {
    pub threshold: f64,
    pub(crate) parallel: bool,
}

impl TerminalRule {
    pub fn new(threshold: f64) -> Self {
        TerminalRule {
            threshold,
            parallel: false,
        }
    }
}

impl RulePlugin for TerminalRule {
    fn name(&self) -> &str {
        "terminal"
    }

    fn build(&self, state: &FloorplanState, block: usize) -> Result<Option<RuleMask>> {
        let Some(bind) = state.circuit().binding_of(block) else {
            return Ok(None);
        };
        let masks: Vec<RuleMask> = bind
            .terminals
            .iter()
            .map(|&t| terminal_mask_exec(state, block, t, self.parallel))
            .collect();
        merge_terminal_masks(&masks, bind.mode).map(Some)
    }

    fn binarize(&self, mask: &RuleMask) -> Result<BinaryMask> {
        binarize(mask, self.threshold)
    }

    fn metric(&self, state: &FloorplanState) -> f64 {
        let binds = &state.circuit().constraints().boundary;
        if binds.is_empty() {
            return 0.0;
        }
        let total: u32 = binds
            .iter()
            .filter_map(|b| metrics::binding_distance(state, b).ok())
            .sum();
        f64::from(total) / binds.len() as f64
    }

    fn sense(&self) -> Sense {
        Sense::Minimize
    }
}

/// Grouping rule: adjacency length to every placed block sharing a voltage
/// island with the block, summed.
pub struct GroupingRule {
    pub threshold: f64,
}

impl GroupingRule {
    pub fn new(threshold: f64) -> Self {
        GroupingRule { threshold }
    }
}

impl RulePlugin for GroupingRule {
    fn name(&self) -> &str {
        "grouping"
    }

    /// `None` until another island member is placed, so the first member of
    /// an island places freely.
    fn build(&self, state: &FloorplanState, block: usize) -> Result<Option<RuleMask>> {
        let masks = state
            .circuit()
            .group_mates(block)
            .into_iter()
            .filter(|&m| state.is_placed(m))
            .map(|m| adjacent_block_mask(state, block, m))
            .collect::<Result<Vec<_>>>()?;
        if masks.is_empty() {
            return Ok(None);
        }
        let dims = state.dims();
        merge_block_masks(dims.width, dims.height, block, &masks).map(Some)
    }

    fn binarize(&self, mask: &RuleMask) -> Result<BinaryMask> {
        binarize(mask, self.threshold)
    }

    fn metric(&self, state: &FloorplanState) -> f64 {
        let pairs = group_pairs(state.circuit());
        if pairs.is_empty() {
            return 0.0;
        }
        let total: u32 = pairs
            .iter()
            .filter_map(|&(a, b)| metrics::block_adjacency(state, a, b).ok())
            .sum();
        f64::from(total) / pairs.len() as f64
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }
}

/// Inter-die alignment against the block's placed partner. The binarization
/// threshold is an intersection area of `frac · min(a_i, a_j)`, expressed in
/// score units of the pair.
pub struct AlignmentRule {
    score_threshold: Vec<f64>,
    pub(crate) parallel: bool,
}

impl AlignmentRule {
    pub fn new(circuit: &Circuit, frac: f64) -> Self {
        let mut score_threshold = vec![0.0; circuit.blocks().len()];
        for p in &circuit.constraints().alignment_pairs {
            let min_area = circuit.block(p.a).area.min(circuit.block(p.b).area) as f64;
            let t = frac * min_area / p.min_area;
            score_threshold[p.a] = t;
            score_threshold[p.b] = t;
        }
        AlignmentRule {
            score_threshold,
            parallel: false,
        }
    }

    pub fn score_threshold(&self, block: usize) -> f64 {
        self.score_threshold[block]
    }
}

impl RulePlugin for AlignmentRule {
    fn name(&self) -> &str {
        "alignment"
    }

    fn build(&self, state: &FloorplanState, block: usize) -> Result<Option<RuleMask>> {
        let Some(pair) = state.circuit().alignment_pair_of(block) else {
            return Ok(None);
        };
        let partner = if pair.a == block { pair.b } else { pair.a };
        if !state.is_placed(partner) {
            return Ok(None);
        }
        alignment_mask_exec(state, block, partner, pair.min_area, self.parallel).map(Some)
    }

    fn binarize(&self, mask: &RuleMask) -> Result<BinaryMask> {
        binarize(mask, self.score_threshold[mask.block])
    }

    fn metric(&self, state: &FloorplanState) -> f64 {
        let pairs = &state.circuit().constraints().alignment_pairs;
        if pairs.is_empty() {
            return 0.0;
        }
        let total: f64 = pairs
            .iter()
            .filter_map(|p| {
                Some(alignment_score(
                    &state.placement(p.a)?,
                    &state.placement(p.b)?,
                    p.min_area,
                ))
            })
            .sum();
        total / pairs.len() as f64
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }
}

/// Center-to-center Manhattan distance between `subject` anchored at each
/// cell and the placed `anchor`, plus its `≤ max_distance` binarization.
pub fn block_distance_mask(
    state: &FloorplanState,
    subject: usize,
    anchor: usize,
    max_distance: f64,
) -> Result<(RuleMask, BinaryMask)> {
    let p = state.placement(anchor).ok_or(Error::Unplaced(anchor))?;
    let dims = state.dims();
    let (ax, ay) = p.center2();
    let (w, h) = state.shape(subject);
    let values = Grid::from_fn(dims.width, dims.height, false, |x, y| {
        let cx = 2 * i64::from(x) + i64::from(w);
        let cy = 2 * i64::from(y) + i64::from(h);
        ((cx - ax).abs() + (cy - ay).abs()) as f64 / 2.0
    });
    let binary = values.map(|&d| d <= max_distance);
    let tag = RuleTag::Custom(BlockDistanceRule::NAME.into());
    Ok((RuleMask::new(tag, subject, values), binary))
}

/// Keeps each subject block within `max_distance` (center to center,
/// Manhattan) of a fixed anchor block.
pub struct BlockDistanceRule {
    pub anchor: usize,
    pub subjects: Vec<usize>,
    pub max_distance: f64,
}

impl BlockDistanceRule {
    pub const NAME: &'static str = "block-distance";
}

impl RulePlugin for BlockDistanceRule {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn build(&self, state: &FloorplanState, block: usize) -> Result<Option<RuleMask>> {
        if !self.subjects.contains(&block) || !state.is_placed(self.anchor) {
            return Ok(None);
        }
        block_distance_mask(state, block, self.anchor, self.max_distance).map(|(m, _)| Some(m))
    }

    fn binarize(&self, mask: &RuleMask) -> Result<BinaryMask> {
        Ok(mask.values.map(|&d| d <= self.max_distance))
    }

    /// Mean distance over placed subjects.
    fn metric(&self, state: &FloorplanState) -> f64 {
        let Some(a) = state.placement(self.anchor) else {
            return 0.0;
        };
        let (ax, ay) = a.center2();
        let ds: Vec<f64> = self
            .subjects
            .iter()
            .filter_map(|&s| state.placement(s))
            .map(|p| {
                let (cx, cy) = p.center2();
                ((cx - ax).abs() + (cy - ay).abs()) as f64 / 2.0
            })
            .collect();
        if ds.is_empty() {
            0.0
        } else {
            ds.iter().sum::<f64>() / ds.len() as f64
        }
    }

    fn sense(&self) -> Sense {
        Sense::Minimize
    }
}
