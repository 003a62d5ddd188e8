//! Seeded synthetic circuits shaped like the small GSRC benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bookshelf::{apportion, balance_layers};
use super::constraints::{gen_constraints, ConstraintCounts};
use crate::error::{Error, Result};
use crate::model::{Block, Circuit, CircuitSpec, GridDims, Net, Pin, Terminal};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub name: String,
    pub blocks: usize,
    pub terminals: usize,
    pub nets: usize,
    pub dims: GridDims,
    pub utilization: f64,
    /// Largest to smallest raw block area.
    pub area_spread: f64,
    pub ar_min: f64,
    pub ar_max: f64,
    /// Inclusive range of pins per net.
    pub min_degree: usize,
    pub max_degree: usize,
    /// Probability that a net pin is a terminal rather than a block.
    pub terminal_pin_rate: f64,
}

impl SynthSpec {
    /// Ten soft blocks, 69 outline terminals and 118 nets on the default
    /// grid, at 30% utilization. Denser instances leave the greedy and random
    /// placers boxed in before the last blocks are placed.
    pub fn n10_like() -> Self {
        SynthSpec {
            name: "n10-synth".into(),
            blocks: 10,
            terminals: 69,
            nets: 118,
            dims: GridDims::default(),
            utilization: 0.3,
            area_spread: 4.0,
            ar_min: 1.0 / 3.0,
            ar_max: 3.0,
            min_degree: 2,
            max_degree: 4,
            terminal_pin_rate: 0.25,
        }
    }

    /// Constraint counts of the ten-block benchmark: ten aligned blocks, five
    /// boundary bindings and ten grouped blocks.
    pub const N10_COUNTS: ConstraintCounts = ConstraintCounts::new(10, 5, 10);
}

/// Outline cells walked counter-clockwise from the origin.
fn outline_cells(dims: GridDims) -> Vec<(u32, u32)> {
    let (w, h) = (dims.width, dims.height);
    if w == 1 || h == 1 {
        return (0..w).flat_map(|x| (0..h).map(move |y| (x, y))).collect();
    }
    let mut cells = Vec::new();
    cells.extend((0..w - 1).map(|x| (x, 0)));
    cells.extend((0..h - 1).map(|y| (w - 1, y)));
    cells.extend((1..w).rev().map(|x| (x, h - 1)));
    cells.extend((1..h).rev().map(|y| (0, y)));
    cells
}

pub fn synthesize(spec: &SynthSpec, seed: u64) -> Result<Circuit> {
    if spec.blocks == 0 {
        return Err(Error::Invalid(
            "synthetic circuit needs at least one block".into(),
        ));
    }
    if spec.min_degree < 2 || spec.min_degree > spec.max_degree {
        return Err(Error::Invalid(
            "net degree range must start at 2 or more".into(),
        ));
    }
    if !(spec.area_spread >= 1.0) {
        return Err(Error::Invalid("area spread must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = spec.dims;

    let weights: Vec<f64> = (0..spec.blocks)
        .map(|_| rng.gen_range(1.0..=spec.area_spread))
        .collect();
    let target =
        (spec.utilization * dims.cells_per_layer() as f64 * f64::from(dims.layers)).floor() as u64;
    let areas = apportion(&weights, target);
    let layers = balance_layers(&areas, dims.layers);
    let blocks: Vec<Block> = (0..spec.blocks)
        .map(|i| {
            Block::soft(
                i,
                format!("bk{}", i + 1),
                areas[i],
                spec.ar_min,
                spec.ar_max,
                layers[i],
            )
        })
        .collect();

    let outline = outline_cells(dims);
    if spec.terminals > outline.len() {
        return Err(Error::Invalid(format!(
            "{} terminals do not fit on the outline",
            spec.terminals
        )));
    }
    let offset = rng.gen_range(0.0..1.0);
    let terminals: Vec<Terminal> = (0..spec.terminals)
        .map(|k| {
            let at = ((k as f64 + offset) * outline.len() as f64 / spec.terminals as f64) as usize;
            let (x, y) = outline[at.min(outline.len() - 1)];
            Terminal {
                id: k,
                name: format!("p{}", k + 1),
                x,
                y,
                z: 0,
            }
        })
        .collect();

    let mut nets = Vec::with_capacity(spec.nets);
    for k in 0..spec.nets {
        let degree = rng.gen_range(spec.min_degree..=spec.max_degree);
        let mut members = BTreeSet::new();
        // every block gets at least one net
        members.insert(Pin::Block(if k < spec.blocks {
            k
        } else {
            rng.gen_range(0..spec.blocks)
        }));
        let mut tries = 0;
        while members.len() < degree && tries < 64 {
            tries += 1;
            let pin = if spec.terminals > 0 && rng.gen_bool(spec.terminal_pin_rate.clamp(0.0, 1.0))
            {
                Pin::Terminal(rng.gen_range(0..spec.terminals))
            } else {
                Pin::Block(rng.gen_range(0..spec.blocks))
            };
            members.insert(pin);
        }
        let mut members: Vec<Pin> = members.into_iter().collect();
        members.shuffle(&mut rng);
        nets.push(Net { members });
    }

    Circuit::new(CircuitSpec {
        name: spec.name.clone(),
        dims,
        utilization: spec.utilization,
        blocks,
        terminals,
        nets,
        constraints: Default::default(),
    })
}

/// Synthetic circuit with generated constraints, both from one seed.
pub fn synth_instance(spec: &SynthSpec, counts: ConstraintCounts, seed: u64) -> Result<Circuit> {
    let base = synthesize(spec, seed)?;
    gen_constraints(&base, counts, seed)?.apply(&base)
}
