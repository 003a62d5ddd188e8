//! Drive the environment step by step with a hand-written policy (first
//! available anchor, square blocks) and reconstruct the dense rewards.

use std::sync::Arc;

use floorplan3d::env::{Action, Env, ResetOptions};
use floorplan3d::io::{synth_instance, SynthSpec};
use floorplan3d::model::TaskProfile;

pub fn run_example() -> floorplan3d::Result<()> {
    let circuit = Arc::new(synth_instance(
        &SynthSpec::n10_like(),
        SynthSpec::N10_COUNTS,
        3,
    )?);
    let task = TaskProfile::task(2)?;
    let mut env = Env::new(circuit, task.clone())?;
    let mut obs = env.reset(ResetOptions::default())?;

    while let Some(block) = obs.block {
        let mask = obs.availability().expect("a block is pending");
        let (x, y, _) = mask.cells().find(|(_, _, &ok)| ok).expect("non-empty mask");
        let out = env.step(Action {
            x,
            y,
            ar_next: Some(1.0),
        })?;
        println!(
            "block {block:>2} -> ({x:>3}, {y:>3})  hpwl {:.3}  adjacency {:.3}",
            out.metrics.hpwl, out.metrics.adjacency
        );
        obs = out.observation;
    }

    let rewards = env.rewards()?;
    let metrics = env.trace().metrics();
    let w = &task.weights;
    let total: f64 = rewards.iter().sum();
    // the final weighted metrics are the baseline; the rest telescopes
    let b = metrics[metrics.len() - 1].weighted(w);
    let before_last = metrics
        .len()
        .checked_sub(2)
        .map_or(0.0, |t| metrics[t].weighted(w));
    let expect = before_last + rewards.len() as f64 * b;
    println!("sum of rewards {total:.6}, telescoped {expect:.6}");
    assert!((total - expect).abs() < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() -> floorplan3d::Result<()> {
    run_example()
}
