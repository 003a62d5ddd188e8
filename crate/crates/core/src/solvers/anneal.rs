use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::greedy::{decode, Ratios};
use super::{baseline_for, fresh_state, replay, Decision, Solution, SolverConfig};
use crate::env::Env;
use crate::error::{Error, Result};
use crate::masks::MaskEngine;
use crate::metrics::{measure, normalize};
use crate::model::{clip_ar, Circuit, FloorplanState, TaskProfile};

/// Relative frequency of each neighbourhood move.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveWeights {
    pub swap: f64,
    pub relocate: f64,
    pub ratio: f64,
}

impl Default for MoveWeights {
    fn default() -> Self {
        MoveWeights {
            swap: 1.0,
            relocate: 1.0,
            ratio: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    /// Genome evaluations, counting the initial greedy decode. One
    /// evaluation returns the greedy result.
    pub iterations: usize,
    /// Starting temperature; calibrated from random moves when absent.
    pub initial_temperature: Option<f64>,
    pub cooling: f64,
    /// Moves between two cooling steps.
    pub steps_per_temperature: usize,
    pub calibration_moves: usize,
    /// Acceptance probability of an average uphill move at the start.
    pub target_acceptance: f64,
    pub moves: MoveWeights,
    /// Half-width of a ratio perturbation, as a fraction of the block's
    /// log ratio range.
    pub ratio_jitter: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            iterations: 2000,
            initial_temperature: None,
            cooling: 0.95,
            steps_per_temperature: 20,
            calibration_moves: 50,
            target_acceptance: 0.8,
            moves: MoveWeights::default(),
            ratio_jitter: 0.25,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(format!("annealing: {m}")));
        if self.iterations == 0 {
            return bad("at least one iteration is required");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling factor must lie in (0, 1)");
        }
        if self.steps_per_temperature == 0 {
            return bad("steps per temperature must be positive");
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return bad("target acceptance must lie in (0, 1)");
        }
        if self.initial_temperature.is_some_and(|t| !(t > 0.0)) {
            return bad("initial temperature must be positive");
        }
        let m = self.moves;
        if [m.swap, m.relocate, m.ratio].iter().any(|w| !(*w >= 0.0)) {
            return bad("move weights must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct AnnealResult {
    pub solution: Solution,
    /// Best cost seen after each evaluation; the first entry is the greedy
    /// cost.
    pub curve: Vec<f64>,
    pub initial_temperature: f64,
    pub accepted: usize,
    /// Evaluations whose genome had no feasible decode.
    pub infeasible: usize,
}

impl AnnealResult {
    pub fn best_cost(&self) -> f64 {
        *self.curve.last().expect("curve holds the initial cost")
    }
}

#[derive(Clone, Debug)]
struct Genome {
    order: Vec<usize>,
    ratios: Vec<f64>,
}

struct Scored {
    genome: Genome,
    decisions: Vec<Decision>,
    cost: f64,
}

struct Evaluator<'a> {
    engine: &'a MaskEngine,
    circuit: Arc<Circuit>,
    task: TaskProfile,
    baseline: f64,
    tie: super::TieBreak,
}

impl Evaluator<'_> {
    fn cost(&self, state: &FloorplanState) -> Result<f64> {
        if self.circuit.blocks().is_empty() {
            return Ok(0.0);
        }
        let m = normalize(&measure(state, &self.task), &self.circuit, self.baseline)?;
        Ok(-m.weighted(&self.task.weights))
    }

    /// `None` when some block has no position at all.
    fn eval(&self, genome: Genome) -> Result<Option<Scored>> {
        let fresh =
            FloorplanState::new(self.circuit.clone(), &self.task, Some(genome.order.clone()))?;
        match decode(self.engine, fresh, Ratios::Fixed(&genome.ratios), self.tie) {
            Ok((state, decisions)) => Ok(Some(Scored {
                cost: self.cost(&state)?,
                genome,
                decisions,
            })),
            Err(Error::Infeasible(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

fn neighbour(
    g: &Genome,
    circuit: &Circuit,
    cfg: &AnnealConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Genome> {
    let n = g.order.len();
    let soft: Vec<usize> = g
        .order
        .iter()
        .copied()
        .filter(|&b| {
            let b = circuit.block(b);
            b.soft && b.ar_min < b.ar_max
        })
        .collect();
    let w = cfg.moves;
    let weights = [
        if n >= 2 { w.swap } else { 0.0 },
        if n >= 2 { w.relocate } else { 0.0 },
        if soft.is_empty() { 0.0 } else { w.ratio },
    ];
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut pick = rng.gen::<f64>() * total;
    let mut kind = 0;
    while kind < 2 && (weights[kind] == 0.0 || pick >= weights[kind]) {
        pick -= weights[kind];
        kind += 1;
    }
    while weights[kind] == 0.0 {
        kind -= 1;
    }
    let mut out = g.clone();
    match kind {
        0 => {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            out.order.swap(i, j);
        }
        1 => {
            let i = rng.gen_range(0..n);
            let b = out.order.remove(i);
            let j = (i + rng.gen_range(1..n)) % n;
            out.order.insert(j, b);
        }
        _ => {
            let b = soft[rng.gen_range(0..soft.len())];
            let blk = circuit.block(b);
            let span = (blk.ar_max / blk.ar_min).ln() * cfg.ratio_jitter;
            let r = (out.ratios[b].ln() + rng.gen_range(-1.0..=1.0) * span).exp();
            out.ratios[b] = clip_ar(r, blk.ar_min, blk.ar_max);
        }
    }
    Some(out)
}

/// Simulated annealing over placement orders and soft-block ratios. Each
/// genome is decoded by the greedy placer with its ratios fixed, so every
/// iterate respects the masks. Starts from the greedy solution and returns
/// the best genome seen.
pub fn sa_place(
    circuit: Arc<Circuit>,
    task: &TaskProfile,
    config: &SolverConfig,
) -> Result<AnnealResult> {
    let mut env = Env::new(circuit, task.clone())?;
    sa_in(&mut env, config)
}

pub fn sa_in(env: &mut Env, config: &SolverConfig) -> Result<AnnealResult> {
    let started = Instant::now();
    config.validate()?;
    let cfg = &config.anneal;
    let fresh = fresh_state(env, None)?;
    let circuit = fresh.circuit_arc().clone();
    let ev = Evaluator {
        engine: env.engine(),
        circuit: circuit.clone(),
        task: env.task().clone(),
        baseline: baseline_for(env.engine(), &fresh, config),
        tie: config.tie_break,
    };

    let order = fresh.order().to_vec();
    let (state, decisions) = decode(ev.engine, fresh, Ratios::Scan(config.ar_candidates), ev.tie)?;
    let mut ratios = vec![1.0; circuit.blocks().len()];
    for d in &decisions {
        if let Some(r) = d.ratio {
            ratios[d.block] = r;
        }
    }
    let initial = Scored {
        cost: ev.cost(&state)?,
        genome: Genome { order, ratios },
        decisions,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut curve = vec![initial.cost];
    let mut best = Scored {
        genome: initial.genome.clone(),
        decisions: initial.decisions.clone(),
        cost: initial.cost,
    };
    let mut infeasible = 0;
    let record = |s: Option<&Scored>, best: &mut Scored, curve: &mut Vec<f64>| {
        if let Some(s) = s {
            if s.cost < best.cost {
                best.genome = s.genome.clone();
                best.decisions = s.decisions.clone();
                best.cost = s.cost;
            }
        }
        curve.push(best.cost);
    };

    let budget = cfg.iterations - 1;
    let temperature = match cfg.initial_temperature {
        Some(t) => t,
        None => {
            let mut uphill = Vec::new();
            for _ in 0..cfg.calibration_moves.min(budget) {
                let Some(g) = neighbour(&initial.genome, &circuit, cfg, &mut rng) else {
                    break;
                };
                let s = ev.eval(g)?;
                match &s {
                    Some(s) if s.cost > initial.cost => uphill.push(s.cost - initial.cost),
                    None => infeasible += 1,
                    _ => {}
                }
                record(s.as_ref(), &mut best, &mut curve);
            }
            if uphill.is_empty() {
                1e-6
            } else {
                let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
                mean / -cfg.target_acceptance.ln()
            }
        }
    };

    let mut current = initial;
    let mut t = temperature;
    let mut accepted = 0;
    let mut moves = 0;
    while curve.len() < cfg.iterations {
        let Some(g) = neighbour(&current.genome, &circuit, cfg, &mut rng) else {
            break;
        };
        let s = ev.eval(g)?;
        record(s.as_ref(), &mut best, &mut curve);
        match s {
            Some(s) => {
                let delta = s.cost - current.cost;
                if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
                    current = s;
                    accepted += 1;
                }
            }
            None => infeasible += 1,
        }
        moves += 1;
        if moves % cfg.steps_per_temperature == 0 {
            t *= cfg.cooling;
        }
    }

    let baseline = ev.baseline;
    let solution = replay(
        env,
        best.genome.order,
        &best.decisions,
        config.seed,
        baseline,
        "sa",
        started,
    )?;
    Ok(AnnealResult {
        solution,
        curve,
        initial_temperature: temperature,
        accepted,
        infeasible,
    })
}
