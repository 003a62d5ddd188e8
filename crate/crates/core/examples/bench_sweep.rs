//! A small seed sweep through the library: three solvers on two synthetic
//! circuits, collected into a report with mean and std rows.

use std::sync::Arc;

use floorplan3d::io::{synth_instance, Report, SynthSpec};
use floorplan3d::model::TaskProfile;
use floorplan3d::solvers::{solve, SolverConfig, SolverKind};

pub fn run_example() -> floorplan3d::Result<()> {
    let task = TaskProfile::task(1)?;
    let mut summaries = Vec::new();
    for k in 0..2 {
        let spec = SynthSpec {
            name: format!("n10-synth-{k}"),
            ..SynthSpec::n10_like()
        };
        let circuit = Arc::new(synth_instance(&spec, SynthSpec::N10_COUNTS, k)?);
        for kind in [SolverKind::Greedy, SolverKind::Anneal, SolverKind::Random] {
            for seed in 0..3 {
                let mut config = SolverConfig::new(kind, seed);
                config.anneal.iterations = 30;
                summaries.push(solve(circuit.clone(), &task, &config)?.summary);
            }
        }
    }
    let report = Report::build(&summaries, false)?;
    for r in report.rows.iter().filter(|r| r.seed == "mean") {
        println!(
            "{:<12} {:<7} hpwl {:>8.0}  d {:.3}  aln {:.3}",
            r.circuit, r.solver, r.hpwl, r.d, r.aln
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
