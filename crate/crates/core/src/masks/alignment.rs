use super::{RuleMask, RuleTag};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::metrics::alignment_score;
use crate::model::FloorplanState;

/// Alignment score between `subject` anchored at each cell and its placed
/// partner on another layer.
pub fn alignment_mask(
    state: &FloorplanState,
    subject: usize,
    partner: usize,
    min_area: f64,
) -> Result<RuleMask> {
    alignment_mask_exec(state, subject, partner, min_area, false)
}

pub(crate) fn alignment_mask_exec(
    state: &FloorplanState,
    subject: usize,
    partner: usize,
    min_area: f64,
    parallel: bool,
) -> Result<RuleMask> {
    let p = state.placement(partner).ok_or(Error::Unplaced(partner))?;
    if state.layer(subject) == p.z {
        return Err(Error::LayerMismatch(subject, partner, "the same"));
    }
    let dims = state.dims();
    let values = Grid::from_fn(dims.width, dims.height, parallel, |x, y| {
        alignment_score(&state.footprint_at(subject, x, y), &p, min_area)
    });
    Ok(RuleMask::new(RuleTag::Alignment, subject, values))
}
