use super::{MergeMode, RuleMask, RuleTag};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::FloorplanState;

/// Adjacency length between `subject` anchored at every cell and the placed
/// block `anchor`, built strip by strip: only anchors that put `subject`
/// flush against one of the four sides of `anchor` can be non-zero.
pub fn adjacent_block_mask(
    state: &FloorplanState,
    subject: usize,
    anchor: usize,
) -> Result<RuleMask> {
    let p = state.placement(anchor).ok_or(Error::Unplaced(anchor))?;
    if state.layer(subject) != p.z {
        return Err(Error::LayerMismatch(subject, anchor, "different"));
    }
    let dims = state.dims();
    let (big_w, big_h) = (i64::from(dims.width), i64::from(dims.height));
    let (w1, h1) = state.shape(subject);
    let (w1, h1) = (i64::from(w1), i64::from(h1));
    let (x2, y2, w2, h2) = (
        i64::from(p.x),
        i64::from(p.y),
        i64::from(p.w),
        i64::from(p.h),
    );
    let mut values = Grid::filled(dims.width, dims.height, 0.0);

    let overlap = |lo1: i64, len1: i64, lo2: i64, len2: i64| {
        ((lo1 + len1).min(lo2 + len2) - lo1.max(lo2)).max(0)
    };

    // left of / right of the anchor: sweep y along the vertical contact
    let (ys, ye) = ((y2 - h1 + 1).max(0), (y2 + h2).min(big_h));
    for x1 in [x2 - w1, x2 + w2] {
        if (0..big_w).contains(&x1) {
            for y in ys..ye {
                values.set(x1 as u32, y as u32, overlap(y, h1, y2, h2) as f64);
            }
        }
    }
    // below / above the anchor: sweep x along the horizontal contact
    let (xs, xe) = ((x2 - w1 + 1).max(0), (x2 + w2).min(big_w));
    for y1 in [y2 - h1, y2 + h2] {
        if (0..big_h).contains(&y1) {
            for x in xs..xe {
                values.set(x as u32, y1 as u32, overlap(x, w1, x2, w2) as f64);
            }
        }
    }
    Ok(RuleMask::new(RuleTag::AdjacentBlock, subject, values))
}

/// Elementwise sum of the adjacent-block masks of one subject against each
/// placed island member. No members yields all zeros.
pub fn merge_block_masks(
    width: u32,
    height: u32,
    subject: usize,
    masks: &[RuleMask],
) -> Result<RuleMask> {
    let mut values = Grid::filled(width, height, 0.0);
    for m in masks {
        if !m.values.same_dims(&values) {
            return Err(Error::Invalid("block masks differ in size".into()));
        }
        values = values.zip_with(&m.values, |a, b| a + b);
    }
    Ok(RuleMask {
        tag: RuleTag::AdjacentBlock,
        block: subject,
        merge: MergeMode::Sum,
        values,
    })
}
