use super::{RuleMask, RuleTag};
use crate::grid::Grid;
use crate::metrics::member_centers2;
use crate::model::FloorplanState;

/// HPWL increase caused by placing `block` at each anchor, summed over the
/// nets that contain it. The baseline of each net is its extent over the
/// other placed members and its terminals.
///
/// The increment separates into an x term and a y term per net, so the mask
/// is assembled from one `W`-vector and one `H`-vector.
pub fn wire_mask(state: &FloorplanState, block: usize) -> RuleMask {
    wire_mask_exec(state, block, false)
}

pub(crate) fn wire_mask_exec(state: &FloorplanState, block: usize, parallel: bool) -> RuleMask {
    let dims = state.dims();
    let (w, h) = state.shape(block);
    // doubled coordinates keep half-cell centers exact
    let mut gx = vec![0i64; dims.width as usize];
    let mut gy = vec![0i64; dims.height as usize];
    for &k in state.circuit().nets_of(block) {
        let members = &state.circuit().nets()[k].members;
        let mut bbox: Option<(i64, i64, i64, i64)> = None;
        for (cx, cy) in member_centers2(state, members, Some(block)) {
            bbox = Some(match bbox {
                None => (cx, cx, cy, cy),
                Some((x0, x1, y0, y1)) => (x0.min(cx), x1.max(cx), y0.min(cy), y1.max(cy)),
            });
        }
        let Some((x0, x1, y0, y1)) = bbox else {
            continue;
        };
        for (x, g) in gx.iter_mut().enumerate() {
            let c = 2 * x as i64 + i64::from(w);
            *g += (c - x1).max(0) + (x0 - c).max(0);
        }
        for (y, g) in gy.iter_mut().enumerate() {
            let c = 2 * y as i64 + i64::from(h);
            *g += (c - y1).max(0) + (y0 - c).max(0);
        }
    }
    let values = Grid::from_fn(dims.width, dims.height, parallel, |x, y| {
        (gx[x as usize] + gy[y as usize]) as f64 / 2.0
    });
    RuleMask::new(RuleTag::Wire, block, values)
}
