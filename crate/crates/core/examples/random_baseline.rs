//! Seeded random placement restricted to available anchors: every layout is
//! legal, but nothing is optimized.

use std::sync::Arc;

use floorplan3d::io::{synth_instance, SynthSpec};
use floorplan3d::model::TaskProfile;
use floorplan3d::solvers::{greedy_place, random_place, SolverConfig, SolverKind};

pub fn run_example() -> floorplan3d::Result<()> {
    let circuit = Arc::new(synth_instance(
        &SynthSpec::n10_like(),
        SynthSpec::N10_COUNTS,
        2,
    )?);
    let task = TaskProfile::task(2)?;
    let greedy = greedy_place(
        circuit.clone(),
        &task,
        &SolverConfig::new(SolverKind::Greedy, 0),
    )?;
    println!("greedy hpwl {:.0}", greedy.summary.raw.hpwl);

    let mut hpwl = Vec::new();
    for seed in 0..10 {
        let sol = random_place(circuit.clone(), &task, seed)?;
        assert_eq!(sol.summary.raw.overlap, 0.0);
        hpwl.push(sol.summary.raw.hpwl);
    }
    let mean = hpwl.iter().sum::<f64>() / hpwl.len() as f64;
    println!(
        "random hpwl over 10 seeds: mean {mean:.0}, min {:.0}",
        hpwl.iter().copied().fold(f64::INFINITY, f64::min)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
