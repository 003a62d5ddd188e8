use std::fmt;

use serde::{Deserialize, Serialize};

use super::plugin::{AlignmentRule, GroupingRule, RulePlugin, TerminalRule};
use super::position::position_mask_exec;
use super::wire::wire_mask_exec;
use super::{BinaryMask, RuleMask};
use crate::error::Result;
use crate::model::{Circuit, FloorplanState, Rule, TaskProfile};

/// Which rule masks had to be dropped to leave at least one available cell.
/// Dropping is cumulative in this order; the position mask is never dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rung {
    Strict,
    DroppedPlugins,
    DroppedAlignment,
    DroppedGrouping,
    DroppedTerminal,
    Infeasible,
}

impl Rung {
    pub fn is_relaxed(self) -> bool {
        self != Rung::Strict
    }
}

impl fmt::Display for Rung {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rung::Strict => "strict",
            Rung::DroppedPlugins => "dropped-plugins",
            Rung::DroppedAlignment => "dropped-alignment",
            Rung::DroppedGrouping => "dropped-grouping",
            Rung::DroppedTerminal => "dropped-terminal",
            Rung::Infeasible => "infeasible",
        })
    }
}

/// `M = T̄ ⊙ B̄ ⊙ Ā ⊙ (plugins) ⊙ P̄`, with `None` standing for an all-ones
/// mask. When the product is empty the ladder drops plugin masks, then Ā,
/// then B̄, then T̄. Returns all zeros with [`Rung::Infeasible`] if `P̄`
/// alone is empty.
pub fn availability_mask(
    position: &BinaryMask,
    terminal: Option<&BinaryMask>,
    grouping: Option<&BinaryMask>,
    alignment: Option<&BinaryMask>,
    plugins: &[BinaryMask],
) -> (BinaryMask, Rung) {
    let product = |masks: &[Option<&BinaryMask>], with_plugins: bool| {
        let mut m = position.clone();
        for b in masks.iter().flatten() {
            m = m.and(b);
        }
        if with_plugins {
            for b in plugins {
                m = m.and(b);
            }
        }
        m
    };
    let mut ladder = vec![(
        Rung::Strict,
        product(&[terminal, grouping, alignment], true),
    )];
    if !plugins.is_empty() {
        ladder.push((
            Rung::DroppedPlugins,
            product(&[terminal, grouping, alignment], false),
        ));
    }
    ladder.push((
        Rung::DroppedAlignment,
        product(&[terminal, grouping], false),
    ));
    ladder.push((Rung::DroppedGrouping, product(&[terminal], false)));
    ladder.push((Rung::DroppedTerminal, position.clone()));
    for (rung, m) in ladder {
        if m.any() {
            return (m, rung);
        }
    }
    (position.clone(), Rung::Infeasible)
}

/// Every mask the placers and the environment need for one block.
#[derive(Clone, Debug)]
pub struct BlockMasks {
    pub block: usize,
    pub shape: (u32, u32),
    pub terminal: Option<RuleMask>,
    pub grouping: Option<RuleMask>,
    pub alignment: Option<RuleMask>,
    pub plugins: Vec<Option<RuleMask>>,
    pub position: BinaryMask,
    pub wire: RuleMask,
    pub availability: BinaryMask,
    pub rung: Rung,
}

impl BlockMasks {
    pub fn is_available(&self, x: u32, y: u32) -> bool {
        *self.availability.get(x, y)
    }
}

/// Builds rule masks for a task. Rules disabled by the task produce no mask;
/// rules marked feature-only produce a mask that never filters.
pub struct MaskEngine {
    task: TaskProfile,
    terminal: TerminalRule,
    grouping: GroupingRule,
    alignment: AlignmentRule,
    plugins: Vec<Box<dyn RulePlugin>>,
    parallel: bool,
}

impl MaskEngine {
    pub fn new(circuit: &Circuit, task: &TaskProfile) -> Self {
        MaskEngine {
            task: task.clone(),
            terminal: TerminalRule::new(task.thresholds.terminal),
            grouping: GroupingRule::new(task.thresholds.grouping),
            alignment: AlignmentRule::new(circuit, task.thresholds.alignment_frac),
            plugins: Vec::new(),
            parallel: false,
        }
    }

    pub fn with_plugin(mut self, plugin: Box<dyn RulePlugin>) -> Self {
        self.plugins.push(plugin);
        self
    }

    /// Evaluates grid cells on the rayon pool. Results are bit-identical to
    /// the sequential path.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self.terminal.parallel = on;
        self.alignment.parallel = on;
        self
    }

    pub fn task(&self) -> &TaskProfile {
        &self.task
    }

    pub fn plugins(&self) -> &[Box<dyn RulePlugin>] {
        &self.plugins
    }

    pub fn alignment_rule(&self) -> &AlignmentRule {
        &self.alignment
    }

    /// Masks for `block` at its current shape in `state`.
    pub fn block_masks(&self, state: &FloorplanState, block: usize) -> Result<BlockMasks> {
        let build = |rule: Rule,
                     plugin: &dyn RulePlugin|
         -> Result<(Option<RuleMask>, Option<BinaryMask>)> {
            if !self.task.enabled(rule) {
                return Ok((None, None));
            }
            let mask = plugin.build(state, block)?;
            let binary = match &mask {
                Some(m) if self.task.constrains(rule) => Some(plugin.binarize(m)?),
                _ => None,
            };
            Ok((mask, binary))
        };
        let (terminal, t_bin) = build(Rule::Boundary, &self.terminal)?;
        let (grouping, b_bin) = build(Rule::Grouping, &self.grouping)?;
        let (alignment, a_bin) = build(Rule::Alignment, &self.alignment)?;

        let mut plugins = Vec::with_capacity(self.plugins.len());
        let mut plugin_bins = Vec::new();
        for p in &self.plugins {
            let m = p.build(state, block)?;
            if let Some(m) = &m {
                plugin_bins.push(p.binarize(m)?);
            }
            plugins.push(m);
        }

        let position = position_mask_exec(state, block, self.parallel);
        let wire = wire_mask_exec(state, block, self.parallel);
        let (availability, rung) = availability_mask(
            &position,
            t_bin.as_ref(),
            b_bin.as_ref(),
            a_bin.as_ref(),
            &plugin_bins,
        );
        Ok(BlockMasks {
            block,
            shape: state.shape(block),
            terminal,
            grouping,
            alignment,
            plugins,
            position,
            wire,
            availability,
            rung,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn only(w: u32, h: u32, cells: &[(u32, u32)]) -> BinaryMask {
        let mut g = Grid::filled(w, h, false);
        for &(x, y) in cells {
            g.set(x, y, true);
        }
        g
    }

    #[test]
    fn unconstrained_block_gets_position_mask() {
        let p = only(4, 4, &[(0, 0), (1, 2)]);
        let (m, rung) = availability_mask(&p, None, None, None, &[]);
        assert_eq!(m, p);
        assert_eq!(rung, Rung::Strict);
    }

    #[test]
    fn product_of_single_cells() {
        let p = only(4, 4, &[(0, 0)]);
        let t = only(4, 4, &[(0, 0), (3, 3)]);
        let (m, rung) = availability_mask(&p, Some(&t), None, None, &[]);
        assert_eq!(m.count_ones(), 1);
        assert!(*m.get(0, 0));
        assert_eq!(rung, Rung::Strict);
    }

    #[test]
    fn ladder_drops_in_order() {
        let p = Grid::filled(3, 3, true);
        let t = only(3, 3, &[(0, 0)]);
        let b = only(3, 3, &[(2, 2)]);
        let a = only(3, 3, &[(0, 0), (2, 2)]);
        // T and B conflict: dropping A does not help, dropping B does
        let (m, rung) = availability_mask(&p, Some(&t), Some(&b), Some(&a), &[]);
        assert_eq!(rung, Rung::DroppedGrouping);
        assert_eq!(m, only(3, 3, &[(0, 0)]));
        // A alone conflicts
        let a2 = only(3, 3, &[(1, 1)]);
        let (m, rung) = availability_mask(&p, Some(&t), None, Some(&a2), &[]);
        assert_eq!(rung, Rung::DroppedAlignment);
        assert_eq!(m, t);
        // plugin conflicts first
        let d = only(3, 3, &[(1, 0)]);
        let (_, rung) = availability_mask(&p, Some(&t), None, None, &[d]);
        assert_eq!(rung, Rung::DroppedPlugins);
    }

    #[test]
    fn empty_position_mask_is_infeasible() {
        let p = Grid::filled(2, 2, false);
        let (m, rung) = availability_mask(&p, None, None, None, &[]);
        assert_eq!(rung, Rung::Infeasible);
        assert!(!m.any());
    }
}
