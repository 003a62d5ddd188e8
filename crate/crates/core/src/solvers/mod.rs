//! Policy-free placers driven by the availability masks: a greedy placer, a
//! simulated annealer over placement orders and aspect ratios, and a seeded
//! random baseline.
//!
//! Every solver ends by replaying its decisions through [`Env`], so the
//! returned trace is exactly what a policy taking the same actions would see.

mod anneal;
mod greedy;
mod random;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use anneal::{sa_in, sa_place, AnnealConfig, AnnealResult};
pub use greedy::hpwl_baseline;
pub use random::{random_in, random_place};

use crate::env::{Action, Env, EpisodeSummary, EpisodeTrace, OrderPolicy, ResetOptions};
use crate::error::{Error, Result};
use crate::masks::{MaskEngine, Rung};
use crate::model::{Circuit, FloorplanState, Placement, TaskProfile, Weights};

pub const DEFAULT_AR_CANDIDATES: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    #[default]
    Greedy,
    #[serde(rename = "sa")]
    Anneal,
    Random,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Greedy => "greedy",
            SolverKind::Anneal => "sa",
            SolverKind::Random => "random",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(SolverKind::Greedy),
            "sa" => Ok(SolverKind::Anneal),
            "random" => Ok(SolverKind::Random),
            _ => Err(Error::Invalid(format!("unknown solver `{s}`"))),
        }
    }
}

/// How the greedy placer ranks available cells after the wire mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Wire increment, then alignment (higher first), adjacency (higher
    /// first), terminal distance, then cell position.
    #[default]
    RuleScores,
    /// Wire increment, then cell position.
    WireOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub seed: u64,
    /// Aspect-ratio candidates scanned per soft block.
    pub ar_candidates: usize,
    pub tie_break: TieBreak,
    pub anneal: AnnealConfig,
    /// HPWL normalizer; a greedy rollout when absent.
    pub hpwl_baseline: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kind: SolverKind::Greedy,
            seed: 0,
            ar_candidates: DEFAULT_AR_CANDIDATES,
            tie_break: TieBreak::RuleScores,
            anneal: AnnealConfig::default(),
            hpwl_baseline: None,
        }
    }
}

impl SolverConfig {
    pub fn new(kind: SolverKind, seed: u64) -> Self {
        SolverConfig {
            kind,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ar_candidates == 0 {
            return Err(Error::Invalid(
                "at least one aspect-ratio candidate is required".into(),
            ));
        }
        self.anneal.validate()
    }
}

/// One placement decision: the block, its anchor and the clipped ratio it
/// was shaped with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Decision {
    pub block: usize,
    pub x: u32,
    pub y: u32,
    pub ratio: Option<f64>,
    pub rung: Rung,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub state: FloorplanState,
    pub trace: EpisodeTrace,
    pub summary: EpisodeSummary,
}

impl Solution {
    /// Final placement of every block, by id. Unplaced blocks are absent.
    pub fn placements(&self) -> Vec<(usize, Placement)> {
        self.state.placed().collect()
    }

    /// The action sequence that reproduces this solution in [`Env`].
    pub fn actions(&self) -> Vec<Action> {
        self.trace.steps.iter().map(|s| s.action).collect()
    }

    /// Annealing cost of the final layout: the negated weighted normalized
    /// metrics.
    pub fn cost(&self, weights: &Weights) -> f64 {
        -self.summary.normalized.weighted(weights)
    }
}

/// Greedy placement: each block in order goes to the available cell with the
/// smallest wire-mask value, scanning `ar_candidates` shapes for soft blocks.
pub fn greedy_place(
    circuit: Arc<Circuit>,
    task: &TaskProfile,
    config: &SolverConfig,
) -> Result<Solution> {
    let mut env = Env::new(circuit, task.clone())?;
    greedy_in(&mut env, config)
}

/// [`greedy_place`] with a caller-built environment, e.g. one whose engine
/// carries rule plug-ins. Uses the default placement order.
pub fn greedy_in(env: &mut Env, config: &SolverConfig) -> Result<Solution> {
    let started = Instant::now();
    config.validate()?;
    let fresh = fresh_state(env, None)?;
    let baseline = baseline_for(env.engine(), &fresh, config);
    let order = fresh.order().to_vec();
    let (_, decisions) = greedy::decode(
        env.engine(),
        fresh,
        greedy::Ratios::Scan(config.ar_candidates),
        config.tie_break,
    )?;
    replay(
        env,
        order,
        &decisions,
        config.seed,
        baseline,
        "greedy",
        started,
    )
}

pub(crate) fn fresh_state(env: &Env, order: Option<Vec<usize>>) -> Result<FloorplanState> {
    FloorplanState::new(env.state().circuit_arc().clone(), env.task(), order)
}

pub(crate) fn baseline_for(
    engine: &MaskEngine,
    fresh: &FloorplanState,
    config: &SolverConfig,
) -> f64 {
    config
        .hpwl_baseline
        .unwrap_or_else(|| hpwl_baseline(engine, fresh))
}

/// Drives `env` through `decisions` and summarizes the episode.
pub(crate) fn replay(
    env: &mut Env,
    order: Vec<usize>,
    decisions: &[Decision],
    seed: u64,
    baseline: f64,
    solver: &str,
    started: Instant,
) -> Result<Solution> {
    env.reset(ResetOptions {
        order: OrderPolicy::Given(order),
        seed,
        first_ar: decisions.first().and_then(|d| d.ratio),
        hpwl_baseline: Some(baseline),
    })?;
    for (i, d) in decisions.iter().enumerate() {
        env.step(Action {
            x: d.x,
            y: d.y,
            ar_next: decisions.get(i + 1).and_then(|n| n.ratio),
        })?;
    }
    let mut summary = env.summary(solver)?;
    summary.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(Solution {
        state: env.state().clone(),
        trace: env.trace().clone(),
        summary,
    })
}

/// Runs the solver selected by `config.kind`. Annealing curves are dropped;
/// call [`sa_place`] to keep them.
pub fn solve(circuit: Arc<Circuit>, task: &TaskProfile, config: &SolverConfig) -> Result<Solution> {
    match config.kind {
        SolverKind::Greedy => greedy_place(circuit, task, config),
        SolverKind::Anneal => sa_place(circuit, task, config).map(|r| r.solution),
        SolverKind::Random => {
            let mut env = Env::new(circuit, task.clone())?;
            random_in(&mut env, config)
        }
    }
}
