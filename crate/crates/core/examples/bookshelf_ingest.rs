//! Read a bookshelf circuit, quantize it onto the grid, sample constraints
//! for it and write everything back out.

use std::path::Path;

use floorplan3d::io::{gen_constraints, load_dir, write_bookshelf, ConstraintCounts};
use floorplan3d::model::GridDims;

pub fn run_example() -> floorplan3d::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/two_block");
    let circuit = load_dir(&dir, GridDims::new(20, 20, 2), Some(0.5))?;
    for b in circuit.blocks() {
        println!(
            "{}: area {} cells, {} {}x{}, die {}",
            b.name,
            b.area,
            if b.soft { "soft" } else { "hard" },
            b.width,
            b.height,
            b.layer
        );
    }
    for t in circuit.terminals() {
        println!("{}: ({}, {})", t.name, t.x, t.y);
    }

    let file = gen_constraints(&circuit, ConstraintCounts::new(2, 1, 0), 0)?;
    print!("{}", file.to_json()?);
    let constrained = file.apply(&circuit)?;
    assert_eq!(constrained.constraints().alignment_pairs.len(), 1);

    let (blocks, _nets, pl) = write_bookshelf(&constrained);
    print!("{blocks}{pl}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
