use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Circuit, GridDims, Rule, TaskProfile};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Footprint of a placed block: the half-open cell rectangle
/// `[x, x+w) × [y, y+h)` on layer `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub z: u32,
}

impl Placement {
    pub fn x_end(&self) -> u32 {
        self.x + self.w
    }

    pub fn y_end(&self) -> u32 {
        self.y + self.h
    }

    pub fn area(&self) -> u64 {
        u64::from(self.w) * u64::from(self.h)
    }

    pub fn in_bounds(&self, dims: GridDims) -> bool {
        self.x_end() <= dims.width && self.y_end() <= dims.height && self.z < dims.layers
    }

    /// Doubled center, exact in integers.
    pub fn center2(&self) -> (i64, i64) {
        (
            2 * i64::from(self.x) + i64::from(self.w),
            2 * i64::from(self.y) + i64::from(self.h),
        )
    }

    pub fn center(&self) -> (f64, f64) {
        let (cx, cy) = self.center2();
        (cx as f64 / 2.0, cy as f64 / 2.0)
    }
}

/// Length of the overlap of `[a, a+la)` and `[b, b+lb)`.
#[inline]
pub fn interval_overlap(a: u32, la: u32, b: u32, lb: u32) -> u32 {
    (a + la).min(b + lb).saturating_sub(a.max(b))
}

/// Mutable placement snapshot for one circuit.
///
/// Movable blocks are placed in `order`; every block at an order position
/// below `cursor` is placed. Pre-placed blocks (rule d) are fixed at
/// construction and never appear in `order`.
#[derive(Clone, Debug)]
pub struct FloorplanState {
    circuit: Arc<Circuit>,
    shapes: Vec<(u32, u32)>,
    ratios: Vec<Option<f64>>,
    positions: Vec<Option<(u32, u32)>>,
    order: Vec<usize>,
    cursor: usize,
    fixed: Vec<usize>,
}

impl FloorplanState {
    /// Fresh state. `order` defaults to [`default_order`]; when given it must
    /// be a permutation of the movable blocks.
    pub fn new(
        circuit: Arc<Circuit>,
        task: &TaskProfile,
        order: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = circuit.blocks().len();
        let mut shapes: Vec<(u32, u32)> = circuit
            .blocks()
            .iter()
            .map(|b| (b.width, b.height))
            .collect();
        let mut positions = vec![None; n];
        let mut fixed = Vec::new();
        if task.enabled(Rule::Preplacement) {
            for p in &circuit.constraints().preplaced {
                shapes[p.block] = (p.w, p.h);
                positions[p.block] = Some((p.x, p.y));
                fixed.push(p.block);
            }
        }
        let movable: Vec<usize> = (0..n).filter(|&b| positions[b].is_none()).collect();
        let order = match order {
            None => default_order(&circuit, &movable),
            Some(order) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != movable {
                    return Err(Error::Invalid(
                        "placement order must be a permutation of the movable blocks".into(),
                    ));
                }
                order
            }
        };
        Ok(FloorplanState {
            circuit,
            shapes,
            ratios: vec![None; n],
            positions,
            order,
            cursor: 0,
            fixed,
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn circuit_arc(&self) -> &Arc<Circuit> {
        &self.circuit
    }

    pub fn dims(&self) -> GridDims {
        self.circuit.dims()
    }

    pub fn num_blocks(&self) -> usize {
        self.shapes.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn fixed_blocks(&self) -> &[usize] {
        &self.fixed
    }

    pub fn current_block(&self) -> Option<usize> {
        self.order.get(self.cursor).copied()
    }

    /// Block after the current one in the order.
    pub fn next_block(&self) -> Option<usize> {
        self.order.get(self.cursor + 1).copied()
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.order.len()
    }

    pub fn shape(&self, block: usize) -> (u32, u32) {
        self.shapes[block]
    }

    /// Ratio last requested for a soft block, if any.
    pub fn ratio(&self, block: usize) -> Option<f64> {
        self.ratios[block]
    }

    pub fn is_placed(&self, block: usize) -> bool {
        self.positions[block].is_some()
    }

    pub fn layer(&self, block: usize) -> u32 {
        self.circuit.block(block).layer
    }

    pub fn placement(&self, block: usize) -> Option<Placement> {
        let (x, y) = self.positions[block]?;
        let (w, h) = self.shapes[block];
        Some(Placement {
            x,
            y,
            w,
            h,
            z: self.layer(block),
        })
    }

    /// Footprint the block would have if anchored at `(x, y)`.
    pub fn footprint_at(&self, block: usize, x: u32, y: u32) -> Placement {
        let (w, h) = self.shapes[block];
        Placement {
            x,
            y,
            w,
            h,
            z: self.layer(block),
        }
    }

    pub fn placed(&self) -> impl Iterator<Item = (usize, Placement)> + '_ {
        (0..self.shapes.len()).filter_map(move |b| self.placement(b).map(|p| (b, p)))
    }

    /// Reshapes an unplaced soft block to the clipped ratio `ar`; hard and
    /// placed blocks are left unchanged.
    pub fn reshape(&mut self, block: usize, ar: f64) {
        let b = self.circuit.block(block);
        if b.soft && !self.is_placed(block) {
            self.shapes[block] = b.shape_at(ar);
            self.ratios[block] = Some(super::clip_ar(ar, b.ar_min, b.ar_max));
        }
    }

    /// Places the current block at `(x, y)` and advances the cursor.
    /// Bounds and overlap are the caller's responsibility (see the masks).
    pub fn place_current(&mut self, x: u32, y: u32) -> Result<usize> {
        let block = self.current_block().ok_or(Error::EpisodeTerminal)?;
        self.positions[block] = Some((x, y));
        self.cursor += 1;
        Ok(block)
    }

    /// Sets a block's position without touching the cursor. Used to evaluate
    /// hypothetical placements on a cloned state; out-of-bounds anchors are
    /// accepted.
    pub fn force_place(&mut self, block: usize, x: u32, y: u32) {
        self.positions[block] = Some((x, y));
    }

    /// Sets a block's shape directly, ignoring soft/hard. Test and replay use.
    pub fn force_shape(&mut self, block: usize, w: u32, h: u32) {
        self.shapes[block] = (w, h);
    }

    /// Moves the cursor past every block, as after a completed episode.
    /// Used when a layout is restored from a file.
    pub fn mark_done(&mut self) {
        self.cursor = self.order.len();
    }

    pub fn unplace(&mut self, block: usize) {
        self.positions[block] = None;
    }

    /// Binary occupancy of one layer; a cell is set when any placed block
    /// covers it. Footprints are clipped to the grid.
    pub fn occupancy(&self, layer: u32) -> Grid<bool> {
        let dims = self.dims();
        let mut g = Grid::filled(dims.width, dims.height, false);
        for (_, p) in self.placed().filter(|(_, p)| p.z == layer) {
            for x in p.x..p.x_end().min(dims.width) {
                for y in p.y..p.y_end().min(dims.height) {
                    g.set(x, y, true);
                }
            }
        }
        g
    }

    pub fn occupancy_grids(&self) -> Vec<Grid<bool>> {
        (0..self.dims().layers).map(|z| self.occupancy(z)).collect()
    }
}

/// Movable blocks by descending area, ties by id.
pub fn default_order(circuit: &Circuit, movable: &[usize]) -> Vec<usize> {
    let mut order = movable.to_vec();
    order.sort_by(|&a, &b| {
        circuit
            .block(b)
            .area
            .cmp(&circuit.block(a).area)
            .then(a.cmp(&b))
    });
    order
}
