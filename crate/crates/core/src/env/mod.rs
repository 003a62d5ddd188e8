//! Episodic placement environment.
//!
//! One block is placed per step, in the order fixed at reset. Each step
//! takes a cell `(x, y)` for the current block, which must be available
//! under the current availability mask, and an optional aspect ratio for the
//! next block. Pre-placed blocks are fixed at reset and take no step.

mod reward;
mod trace;

use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use reward::compute_rewards;
pub use trace::{read_jsonl, Action, EpisodeTrace, StepRecord, TraceStep};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::masks::{BinaryMask, BlockMasks, MaskEngine, Rung};
use crate::metrics::{measure, normalize, satisfaction_counts, MetricTuple, Satisfaction};
use crate::model::{Circuit, FloorplanState, TaskProfile};

#[derive(Clone, Debug, Default, PartialEq)]
pub enum OrderPolicy {
    /// Descending area, ties by id.
    #[default]
    Default,
    Given(Vec<usize>),
    /// Default order shuffled with the reset seed.
    Shuffled,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResetOptions {
    pub order: OrderPolicy,
    pub seed: u64,
    /// Aspect ratio for the first block when it is soft.
    pub first_ar: Option<f64>,
    /// HPWL normalizer. Computed from a greedy rollout when absent.
    pub hpwl_baseline: Option<f64>,
}

/// What a policy sees before choosing an action.
#[derive(Clone, Debug)]
pub struct Observation {
    pub block: Option<usize>,
    pub order: Vec<usize>,
    pub cursor: usize,
    /// One occupancy grid per layer.
    pub occupancy: Vec<Grid<bool>>,
    /// Masks for the current block; `None` once the episode is over.
    pub masks: Option<BlockMasks>,
}

impl Observation {
    pub fn availability(&self) -> Option<&BinaryMask> {
        self.masks.as_ref().map(|m| &m.availability)
    }

    pub fn rung(&self) -> Option<Rung> {
        self.masks.as_ref().map(|m| m.rung)
    }

    /// Named channels for a policy network: occupancy per layer, then wire,
    /// position, alignment, terminal and adjacent-block masks. Rules that do
    /// not apply to the block are all zeros.
    pub fn stack(&self) -> Vec<(String, Grid<f64>)> {
        let mut out: Vec<(String, Grid<f64>)> = self
            .occupancy
            .iter()
            .enumerate()
            .map(|(z, g)| (format!("occupancy-{z}"), g.map(|&b| f64::from(u8::from(b)))))
            .collect();
        let Some(m) = &self.masks else {
            return out;
        };
        let (w, h) = (m.position.width(), m.position.height());
        let zeros = || Grid::filled(w, h, 0.0);
        out.push(("wire".into(), m.wire.values.clone()));
        out.push((
            "position".into(),
            m.position.map(|&b| f64::from(u8::from(b))),
        ));
        for (name, rule) in [
            ("alignment", &m.alignment),
            ("terminal", &m.terminal),
            ("adjacent-block", &m.grouping),
        ] {
            out.push((
                name.into(),
                rule.as_ref().map_or_else(zeros, |r| r.values.clone()),
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub observation: Observation,
    /// Normalized metrics after the step.
    pub metrics: MetricTuple,
    pub terminal: bool,
}

/// Final report of one episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub circuit: String,
    pub task: u8,
    pub solver: String,
    pub seed: u64,
    pub raw: MetricTuple,
    pub normalized: MetricTuple,
    pub hpwl_baseline: f64,
    pub satisfaction: Satisfaction,
    /// Steps placed under a relaxed availability mask, as `(block, rung)`.
    pub relaxations: Vec<(usize, Rung)>,
    pub wall_ms: f64,
}

pub struct Env {
    engine: MaskEngine,
    state: FloorplanState,
    trace: EpisodeTrace,
    masks: Option<BlockMasks>,
    started: Instant,
}

impl Env {
    pub fn new(circuit: Arc<Circuit>, task: TaskProfile) -> Result<Self> {
        let engine = MaskEngine::new(&circuit, &task);
        Self::with_engine(circuit, engine)
    }

    /// Environment using a prepared engine, e.g. one with rule plug-ins.
    /// Call [`Env::reset`] before the first step.
    pub fn with_engine(circuit: Arc<Circuit>, engine: MaskEngine) -> Result<Self> {
        let state = FloorplanState::new(circuit.clone(), engine.task(), None)?;
        let mut trace = EpisodeTrace::new(circuit.name(), engine.task().id, 0, 1.0);
        trace.terminal = true;
        Ok(Env {
            trace,
            engine,
            state,
            masks: None,
            started: Instant::now(),
        })
    }

    pub fn reset(&mut self, opts: ResetOptions) -> Result<Observation> {
        let circuit = self.state.circuit_arc().clone();
        let task = self.engine.task().clone();
        let order = match opts.order {
            OrderPolicy::Default => None,
            OrderPolicy::Given(o) => Some(o),
            OrderPolicy::Shuffled => {
                let mut o = FloorplanState::new(circuit.clone(), &task, None)?
                    .order()
                    .to_vec();
                o.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
                Some(o)
            }
        };
        let mut state = FloorplanState::new(circuit.clone(), &task, order)?;
        let baseline = match opts.hpwl_baseline {
            Some(b) => b,
            None => crate::solvers::hpwl_baseline(&self.engine, &state),
        };
        if !(baseline > 0.0) {
            return Err(Error::Invalid(format!(
                "HPWL baseline must be positive, got {baseline}"
            )));
        }
        if let (Some(ar), Some(first)) = (opts.first_ar, state.current_block()) {
            state.reshape(first, ar);
        }
        self.state = state;
        self.trace = EpisodeTrace::new(circuit.name(), task.id, opts.seed, baseline);
        self.trace.terminal = self.state.is_done();
        self.started = Instant::now();
        self.refresh_masks()?;
        Ok(self.observation())
    }

    fn refresh_masks(&mut self) -> Result<()> {
        self.masks = match self.state.current_block() {
            Some(b) => Some(self.engine.block_masks(&self.state, b)?),
            None => None,
        };
        Ok(())
    }

    pub fn observation(&self) -> Observation {
        Observation {
            block: self.state.current_block(),
            order: self.state.order().to_vec(),
            cursor: self.state.cursor(),
            occupancy: self.state.occupancy_grids(),
            masks: self.masks.clone(),
        }
    }

    pub fn step(&mut self, action: Action) -> Result<StepOutcome> {
        let masks = self.masks.as_ref().ok_or(Error::EpisodeTerminal)?;
        let dims = self.state.dims();
        let block = masks.block;
        if action.x >= dims.width
            || action.y >= dims.height
            || !masks.is_available(action.x, action.y)
        {
            return Err(Error::InvalidAction {
                block,
                x: action.x,
                y: action.y,
            });
        }
        let rung = masks.rung;
        self.state.place_current(action.x, action.y)?;
        if let (Some(ar), Some(next)) = (action.ar_next, self.state.current_block()) {
            self.state.reshape(next, ar);
        }
        let raw = measure(&self.state, self.engine.task());
        let metrics = self.normalized(&raw)?;
        let (w, h) = self.state.shape(block);
        self.trace.steps.push(TraceStep {
            block,
            action,
            w,
            h,
            ratio: self.state.ratio(block),
            rung,
            raw,
            metrics,
        });
        self.trace.terminal = self.state.is_done();
        self.refresh_masks()?;
        Ok(StepOutcome {
            observation: self.observation(),
            metrics,
            terminal: self.trace.terminal,
        })
    }

    fn normalized(&self, raw: &MetricTuple) -> Result<MetricTuple> {
        if self.state.circuit().blocks().is_empty() {
            return Ok(MetricTuple {
                normalized: true,
                ..MetricTuple::default()
            });
        }
        normalize(raw, self.state.circuit(), self.trace.hpwl_baseline)
    }

    pub fn state(&self) -> &FloorplanState {
        &self.state
    }

    pub fn engine(&self) -> &MaskEngine {
        &self.engine
    }

    pub fn task(&self) -> &TaskProfile {
        self.engine.task()
    }

    pub fn trace(&self) -> &EpisodeTrace {
        &self.trace
    }

    pub fn masks(&self) -> Option<&BlockMasks> {
        self.masks.as_ref()
    }

    pub fn is_terminal(&self) -> bool {
        self.trace.terminal
    }

    /// Per-step rewards under the task weights.
    pub fn rewards(&self) -> Result<Vec<f64>> {
        self.trace.rewards(&self.task().weights)
    }

    /// Report for a finished episode, with metrics recomputed from the final
    /// state.
    pub fn summary(&self, solver: &str) -> Result<EpisodeSummary> {
        episode_summary(
            &self.state,
            &self.trace,
            self.task(),
            solver,
            self.started.elapsed().as_secs_f64() * 1e3,
        )
    }

    pub fn into_parts(self) -> (FloorplanState, EpisodeTrace) {
        (self.state, self.trace)
    }
}

/// Report for a terminal episode. Metrics are recomputed from `state`
/// rather than read from the trace.
pub fn episode_summary(
    state: &FloorplanState,
    trace: &EpisodeTrace,
    task: &TaskProfile,
    solver: &str,
    wall_ms: f64,
) -> Result<EpisodeSummary> {
    if !trace.terminal || !state.is_done() {
        return Err(Error::EpisodeRunning);
    }
    let raw = measure(state, task);
    let normalized = if state.circuit().blocks().is_empty() {
        MetricTuple {
            normalized: true,
            ..MetricTuple::default()
        }
    } else {
        normalize(&raw, state.circuit(), trace.hpwl_baseline)?
    };
    Ok(EpisodeSummary {
        circuit: trace.circuit.clone(),
        task: trace.task,
        solver: solver.to_string(),
        seed: trace.seed,
        raw,
        normalized,
        hpwl_baseline: trace.hpwl_baseline,
        satisfaction: satisfaction_counts(state, task)?,
        relaxations: trace.relaxations().map(|s| (s.block, s.rung)).collect(),
        wall_ms,
    })
}
