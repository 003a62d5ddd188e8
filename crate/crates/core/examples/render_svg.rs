//! Place a circuit and draw both dies side by side as SVG.

use std::sync::Arc;

use floorplan3d::io::{render_svg, synth_instance, PlacementFile, SvgOptions, SynthSpec};
use floorplan3d::model::TaskProfile;
use floorplan3d::solvers::{greedy_place, SolverConfig};

pub fn run_example() -> floorplan3d::Result<()> {
    let circuit = Arc::new(synth_instance(
        &SynthSpec::n10_like(),
        SynthSpec::N10_COUNTS,
        1,
    )?);
    let task = TaskProfile::task(1)?;
    let sol = greedy_place(circuit.clone(), &task, &SolverConfig::default())?;

    let svg = render_svg(&sol.state, &SvgOptions::default());
    let dir = std::env::temp_dir().join("floorplan3d-example");
    std::fs::create_dir_all(&dir).map_err(|e| floorplan3d::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let path = dir.join("layout.svg");
    std::fs::write(&path, &svg).map_err(|e| floorplan3d::Error::Io {
        path: path.clone(),
        source: e,
    })?;
    PlacementFile::from_state(&sol.state, task.id, "greedy", 0).save(&dir.join("layout.json"))?;

    let rects = svg.matches("class=\"block").count();
    println!(
        "wrote {} ({rects} blocks, {} bytes)",
        path.display(),
        svg.len()
    );
    assert_eq!(rects, circuit.blocks().len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
