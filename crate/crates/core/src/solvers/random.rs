use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{baseline_for, fresh_state, replay, Decision, Solution, SolverConfig, SolverKind};
use crate::env::Env;
use crate::error::{Error, Result};
use crate::masks::Rung;
use crate::model::{ar_candidates, Circuit, TaskProfile};

/// Random baseline: every soft block gets a uniform ratio in its range and
/// every block a uniformly drawn available cell. When the drawn ratio leaves
/// no position at all, the greedy ratio candidates are tried in turn.
pub fn random_place(circuit: Arc<Circuit>, task: &TaskProfile, seed: u64) -> Result<Solution> {
    let mut env = Env::new(circuit, task.clone())?;
    random_in(&mut env, &SolverConfig::new(SolverKind::Random, seed))
}

pub fn random_in(env: &mut Env, config: &SolverConfig) -> Result<Solution> {
    let started = Instant::now();
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = fresh_state(env, None)?;
    let baseline = baseline_for(env.engine(), &state, config);
    let order = state.order().to_vec();
    let mut decisions = Vec::with_capacity(order.len());

    for &block in &order {
        let b = state.circuit().block(block).clone();
        let mut ratios: Vec<Option<f64>> = if b.soft {
            let first = if b.ar_min < b.ar_max {
                rng.gen_range(b.ar_min..=b.ar_max)
            } else {
                b.ar_min
            };
            std::iter::once(first)
                .chain(ar_candidates(b.ar_min, b.ar_max, config.ar_candidates))
                .map(Some)
                .collect()
        } else {
            vec![None]
        };
        let mut chosen = None;
        for ar in ratios.drain(..) {
            let mut trial = state.clone();
            if let Some(ar) = ar {
                trial.reshape(block, ar);
            }
            let masks = env.engine().block_masks(&trial, block)?;
            if masks.rung == Rung::Infeasible {
                continue;
            }
            let cells: Vec<(u32, u32)> = masks
                .availability
                .cells()
                .filter(|&(_, _, &ok)| ok)
                .map(|(x, y, _)| (x, y))
                .collect();
            let &(x, y) = cells.choose(&mut rng).ok_or(Error::Infeasible(block))?;
            chosen = Some((trial, x, y, masks.rung));
            break;
        }
        let (trial, x, y, rung) = chosen.ok_or(Error::Infeasible(block))?;
        state = trial;
        state.place_current(x, y)?;
        decisions.push(Decision {
            block,
            x,
            y,
            ratio: state.ratio(block),
            rung,
        });
    }
    replay(
        env,
        order,
        &decisions,
        config.seed,
        baseline,
        "random",
        started,
    )
}
