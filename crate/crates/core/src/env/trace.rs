use std::io::Write;

use serde::{Deserialize, Serialize};

use super::compute_rewards;
use crate::error::{Error, Result};
use crate::masks::Rung;
use crate::metrics::{normalize, MetricTuple};
use crate::model::{Circuit, Weights};

/// Position and next-block aspect ratio chosen at one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub x: u32,
    pub y: u32,
    /// Aspect ratio for the next block in the order; ignored for hard blocks
    /// and on the last step.
    pub ar_next: Option<f64>,
}

impl Action {
    pub fn at(x: u32, y: u32) -> Self {
        Action {
            x,
            y,
            ar_next: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub block: usize,
    pub action: Action,
    /// Shape the block was placed with.
    pub w: u32,
    pub h: u32,
    /// Aspect ratio the block was shaped with, for soft blocks.
    pub ratio: Option<f64>,
    pub rung: Rung,
    pub raw: MetricTuple,
    pub metrics: MetricTuple,
}

/// Per-step record of one episode. Rewards are a pure function of the
/// normalized metrics and the weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub circuit: String,
    pub task: u8,
    pub seed: u64,
    pub hpwl_baseline: f64,
    pub steps: Vec<TraceStep>,
    pub terminal: bool,
}

impl EpisodeTrace {
    pub fn new(circuit: &str, task: u8, seed: u64, hpwl_baseline: f64) -> Self {
        EpisodeTrace {
            circuit: circuit.to_string(),
            task,
            seed,
            hpwl_baseline,
            steps: Vec::new(),
            terminal: false,
        }
    }

    pub fn metrics(&self) -> Vec<MetricTuple> {
        self.steps.iter().map(|s| s.metrics).collect()
    }

    pub fn rewards(&self, weights: &Weights) -> Result<Vec<f64>> {
        compute_rewards(&self.metrics(), weights)
    }

    /// Steps that needed a relaxation rung.
    pub fn relaxations(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| s.rung.is_relaxed())
    }

    /// Re-normalizes every step against a new HPWL baseline.
    pub fn renormalize(&mut self, circuit: &Circuit, hpwl_baseline: f64) -> Result<()> {
        if !circuit.blocks().is_empty() {
            for s in &mut self.steps {
                s.metrics = normalize(&s.raw, circuit, hpwl_baseline)?;
            }
        }
        self.hpwl_baseline = hpwl_baseline;
        Ok(())
    }

    /// One JSON object per step: step index, block, action, normalized
    /// metrics and reward.
    pub fn write_jsonl<W: Write>(&self, mut out: W, weights: &Weights) -> Result<()> {
        let rewards = if self.steps.is_empty() {
            Vec::new()
        } else {
            self.rewards(weights)?
        };
        for (t, (s, r)) in self.steps.iter().zip(rewards).enumerate() {
            let rec = StepRecord {
                step: t + 1,
                block: s.block,
                action: s.action,
                rung: s.rung,
                metrics: s.metrics,
                reward: r,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n").map_err(|e| Error::io("<trace>", e))?;
        }
        Ok(())
    }
}

/// Line format of the JSON-lines trace export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub block: usize,
    pub action: Action,
    pub rung: Rung,
    pub metrics: MetricTuple,
    pub reward: f64,
}

/// Parses a JSON-lines trace export.
pub fn read_jsonl(text: &str) -> Result<Vec<StepRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
