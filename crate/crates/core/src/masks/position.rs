use super::BinaryMask;
use crate::grid::{Grid, PrefixSum};
use crate::model::FloorplanState;

/// `P[x][y] = 1` iff the block anchored at `(x, y)` lies inside the die and
/// covers no cell occupied by another placed block on its layer.
pub fn position_mask(state: &FloorplanState, block: usize) -> BinaryMask {
    position_mask_exec(state, block, false)
}

pub(crate) fn position_mask_exec(
    state: &FloorplanState,
    block: usize,
    parallel: bool,
) -> BinaryMask {
    let dims = state.dims();
    let layer = state.layer(block);
    let mut occ = Grid::filled(dims.width, dims.height, false);
    for (_, p) in state.placed().filter(|&(b, p)| b != block && p.z == layer) {
        for x in p.x..p.x_end().min(dims.width) {
            for y in p.y..p.y_end().min(dims.height) {
                occ.set(x, y, true);
            }
        }
    }
    let sums = PrefixSum::new(&occ);
    let (w, h) = state.shape(block);
    Grid::from_fn(dims.width, dims.height, parallel, |x, y| {
        let (x1, y1) = (x + w, y + h);
        x1 <= dims.width
            && y1 <= dims.height
            && sums.rect(x as usize, y as usize, x1 as usize, y1 as usize) == 0
    })
}
