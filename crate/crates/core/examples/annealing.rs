//! Anneal placement orders and aspect ratios, starting from the greedy
//! layout, and print the best-so-far cost curve.

use std::sync::Arc;

use floorplan3d::io::{synth_instance, SynthSpec};
use floorplan3d::model::TaskProfile;
use floorplan3d::solvers::{sa_place, SolverConfig, SolverKind};

pub fn run_example() -> floorplan3d::Result<()> {
    let circuit = Arc::new(synth_instance(
        &SynthSpec::n10_like(),
        SynthSpec::N10_COUNTS,
        11,
    )?);
    let task = TaskProfile::task(3)?;
    let mut config = SolverConfig::new(SolverKind::Anneal, 5);
    config.anneal.iterations = 120;
    let result = sa_place(circuit, &task, &config)?;

    println!(
        "T0 {:.4}, accepted {}, rejected as infeasible {}",
        result.initial_temperature, result.accepted, result.infeasible
    );
    for (i, c) in result.curve.iter().enumerate().step_by(20) {
        println!("  eval {i:>4}: best cost {c:.4}");
    }
    println!(
        "greedy start {:.4} -> best {:.4}",
        result.curve[0],
        result.best_cost()
    );
    assert!(result.curve.windows(2).all(|w| w[1] <= w[0]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
