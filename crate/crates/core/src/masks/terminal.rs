use super::{MergeMode, RuleMask, RuleTag};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::metrics::block_terminal_distance;
use crate::model::{BindMode, FloorplanState};

/// `T[x][y]` = distance between `terminal` and `block` anchored at `(x, y)`,
/// using the block's current shape.
pub fn adjacent_terminal_mask(state: &FloorplanState, block: usize, terminal: usize) -> RuleMask {
    terminal_mask_exec(state, block, terminal, false)
}

pub(crate) fn terminal_mask_exec(
    state: &FloorplanState,
    block: usize,
    terminal: usize,
    parallel: bool,
) -> RuleMask {
    let dims = state.dims();
    let t = state.circuit().terminal(terminal);
    let values = Grid::from_fn(dims.width, dims.height, parallel, |x, y| {
        f64::from(block_terminal_distance(&state.footprint_at(block, x, y), t))
    });
    RuleMask::new(RuleTag::Terminal, block, values)
}

/// Elementwise max (`ALL`: every terminal must be reached) or min (`ANY`).
pub fn merge_terminal_masks(masks: &[RuleMask], mode: BindMode) -> Result<RuleMask> {
    let (first, rest) = masks.split_first().ok_or(Error::Empty("terminal masks"))?;
    let mut values = first.values.clone();
    for m in rest {
        if !m.values.same_dims(&values) {
            return Err(Error::Invalid("terminal masks differ in size".into()));
        }
        values = match mode {
            BindMode::All => values.zip_with(&m.values, |a, b| a.max(*b)),
            BindMode::Any => values.zip_with(&m.values, |a, b| a.min(*b)),
        };
    }
    Ok(RuleMask {
        tag: RuleTag::Terminal,
        block: first.block,
        merge: match mode {
            BindMode::All => MergeMode::Max,
            BindMode::Any => MergeMode::Min,
        },
        values,
    })
}
