//! Add a rule the engine does not know about: keep two blocks within a
//! Manhattan distance of an anchor block. The plug-in's mask joins the
//! availability product like the built-in rules.

use std::sync::Arc;

use floorplan3d::env::{Env, ResetOptions};
use floorplan3d::io::{synth_instance, SynthSpec};
use floorplan3d::masks::{BlockDistanceRule, MaskEngine, RulePlugin};
use floorplan3d::model::TaskProfile;
use floorplan3d::solvers::{greedy_in, SolverConfig};

pub fn run_example() -> floorplan3d::Result<()> {
    let circuit = Arc::new(synth_instance(
        &SynthSpec::n10_like(),
        SynthSpec::N10_COUNTS,
        4,
    )?);
    let task = TaskProfile::task(1)?;
    let order = floorplan3d::model::FloorplanState::new(circuit.clone(), &task, None)?
        .order()
        .to_vec();
    let anchor = order[0];
    // later unbound blocks on the anchor's die
    let subjects: Vec<usize> = order[1..]
        .iter()
        .copied()
        .filter(|&b| {
            circuit.block(b).layer == circuit.block(anchor).layer && circuit.binding_of(b).is_none()
        })
        .take(2)
        .collect();
    let rule = BlockDistanceRule {
        anchor,
        subjects: subjects.clone(),
        max_distance: 64.0,
    };

    let engine = MaskEngine::new(&circuit, &task).with_plugin(Box::new(rule));
    let mut env = Env::with_engine(circuit.clone(), engine)?;
    env.reset(ResetOptions::default())?;
    let sol = greedy_in(&mut env, &SolverConfig::default())?;

    let check = BlockDistanceRule {
        anchor,
        subjects,
        max_distance: 64.0,
    };
    println!(
        "mean distance of {:?} to block {anchor}: {:.1}, relaxed steps {}",
        check.subjects,
        check.metric(&sol.state),
        sol.summary.relaxations.len()
    );
    if sol.summary.relaxations.is_empty() {
        assert!(check.metric(&sol.state) <= 64.0);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
