//! Place a synthetic ten-block, two-die circuit with the mask-guided greedy
//! placer and print what it achieved.

use std::sync::Arc;

use floorplan3d::io::{synth_instance, SynthSpec};
use floorplan3d::model::TaskProfile;
use floorplan3d::solvers::{greedy_place, SolverConfig, SolverKind};

pub fn run_example() -> floorplan3d::Result<()> {
    let circuit = Arc::new(synth_instance(
        &SynthSpec::n10_like(),
        SynthSpec::N10_COUNTS,
        7,
    )?);
    let task = TaskProfile::task(1)?;
    let sol = greedy_place(circuit, &task, &SolverConfig::new(SolverKind::Greedy, 0))?;

    let s = &sol.summary;
    println!(
        "circuit {} task {} ({} rules)",
        s.circuit, s.task, task.rules
    );
    println!(
        "hpwl {:.0} (baseline {:.0}), overlap {}",
        s.raw.hpwl, s.hpwl_baseline, s.raw.overlap
    );
    println!(
        "bound blocks on their terminals: {}/{}, mean terminal distance {}",
        s.satisfaction.boundary.satisfied, s.satisfaction.boundary.total, s.raw.distance
    );
    for (block, p) in sol.placements() {
        println!(
            "  block {block:>2} at ({:>3}, {:>3}) on die {} size {}x{}",
            p.x, p.y, p.z, p.w, p.h
        );
    }
    assert_eq!(s.raw.overlap, 0.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
