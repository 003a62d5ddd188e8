//! Build every rule mask for one block on a small hand-made circuit and
//! print the availability mask as text.

use std::sync::Arc;

use floorplan3d::masks::MaskEngine;
use floorplan3d::model::{
    AlignmentPair, BindMode, Block, BoundaryBinding, Circuit, CircuitSpec, ConstraintSet,
    FloorplanState, GridDims, Net, Pin, TaskProfile, Terminal,
};

pub fn run_example() -> floorplan3d::Result<()> {
    // a: 4x4 on die 0, b: 3x3 on die 1 aligned with a and bound to a
    // terminal on the right edge
    let circuit = Arc::new(Circuit::new(CircuitSpec {
        name: "masks-demo".into(),
        dims: GridDims::new(12, 8, 2),
        utilization: 0.2,
        blocks: vec![Block::hard(0, "a", 4, 4, 0), Block::hard(1, "b", 3, 3, 1)],
        terminals: vec![Terminal {
            id: 0,
            name: "io".into(),
            x: 11,
            y: 3,
            z: 0,
        }],
        nets: vec![Net {
            members: vec![Pin::Block(0), Pin::Block(1), Pin::Terminal(0)],
        }],
        constraints: ConstraintSet {
            alignment_pairs: vec![AlignmentPair {
                a: 0,
                b: 1,
                min_area: 9.0,
            }],
            boundary: vec![BoundaryBinding {
                block: 1,
                terminals: vec![0],
                mode: BindMode::All,
            }],
            ..Default::default()
        },
    })?);
    let task = TaskProfile::task(1)?;
    let mut state = FloorplanState::new(circuit.clone(), &task, Some(vec![0, 1]))?;
    state.place_current(6, 2)?;

    let engine = MaskEngine::new(&circuit, &task);
    let m = engine.block_masks(&state, 1)?;
    let terminal = m.terminal.as_ref().expect("b is bound");
    let alignment = m.alignment.as_ref().expect("b has a partner");
    println!(
        "block b, rung {:?}, {} available anchors",
        m.rung,
        m.availability.count_ones()
    );
    for y in (0..state.dims().height).rev() {
        let row: String = (0..state.dims().width)
            .map(|x| match (m.is_available(x, y), *m.position.get(x, y)) {
                (true, _) => '#',
                (false, true) => '.',
                (false, false) => ' ',
            })
            .collect();
        println!("  |{row}|");
    }
    for y in 0..state.dims().height {
        for x in 0..state.dims().width {
            if m.is_available(x, y) {
                assert_eq!(terminal.get(x, y), 0.0);
                // scores are intersection / 9 cells; the mask keeps 10% of the smaller block
                assert!(alignment.get(x, y) >= engine.alignment_rule().score_threshold(1));
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
