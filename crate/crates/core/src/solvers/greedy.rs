use std::cmp::Ordering;

use super::{Decision, TieBreak};
use crate::error::{Error, Result};
use crate::masks::{BlockMasks, MaskEngine, Rung};
use crate::metrics::total_hpwl;
use crate::model::{ar_candidates, FloorplanState};

/// Where the greedy decoder takes soft-block aspect ratios from.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Ratios<'a> {
    /// Scan this many log-spaced candidates per block.
    Scan(usize),
    /// One ratio per block id.
    Fixed(&'a [f64]),
}

/// Score of one candidate cell; smaller is better.
#[derive(Clone, Copy, Debug)]
struct Key {
    rung: Rung,
    wire: f64,
    aln: f64,
    adj: f64,
    terminal: f64,
    x: u32,
    y: u32,
}

impl Key {
    fn cmp(&self, other: &Key, tie: TieBreak) -> Ordering {
        let head = self
            .rung
            .cmp(&other.rung)
            .then(self.wire.total_cmp(&other.wire));
        let rules = match tie {
            TieBreak::RuleScores => other
                .aln
                .total_cmp(&self.aln)
                .then(other.adj.total_cmp(&self.adj))
                .then(self.terminal.total_cmp(&other.terminal)),
            TieBreak::WireOnly => Ordering::Equal,
        };
        head.then(rules)
            .then(self.x.cmp(&other.x))
            .then(self.y.cmp(&other.y))
    }
}

fn best_cell(masks: &BlockMasks, tie: TieBreak) -> Option<Key> {
    if masks.rung == Rung::Infeasible {
        return None;
    }
    let value = |m: &Option<crate::masks::RuleMask>, x, y| m.as_ref().map_or(0.0, |m| m.get(x, y));
    let mut best: Option<Key> = None;
    for (x, y, &ok) in masks.availability.cells() {
        if !ok {
            continue;
        }
        let key = Key {
            rung: masks.rung,
            wire: masks.wire.get(x, y),
            aln: value(&masks.alignment, x, y),
            adj: value(&masks.grouping, x, y),
            terminal: value(&masks.terminal, x, y),
            x,
            y,
        };
        if best.is_none_or(|b| key.cmp(&b, tie) == Ordering::Less) {
            best = Some(key);
        }
    }
    best
}

/// Best `(ratio, cell)` for the current block of `state`. Candidates with a
/// milder relaxation rung win; among equal rungs the cell key decides and the
/// earlier candidate wins ties.
fn choose(
    engine: &MaskEngine,
    state: &FloorplanState,
    ratios: Ratios<'_>,
    tie: TieBreak,
) -> Result<(Option<f64>, Key)> {
    let block = state.current_block().ok_or(Error::EpisodeTerminal)?;
    let b = state.circuit().block(block);
    let candidates: Vec<Option<f64>> = if !b.soft {
        vec![None]
    } else {
        match ratios {
            Ratios::Scan(k) => ar_candidates(b.ar_min, b.ar_max, k)
                .into_iter()
                .map(Some)
                .collect(),
            Ratios::Fixed(ars) => vec![Some(ars[block])],
        }
    };
    let mut best: Option<(Option<f64>, Key)> = None;
    for ar in candidates {
        let masks = match ar {
            Some(ar) => {
                let mut trial = state.clone();
                trial.reshape(block, ar);
                engine.block_masks(&trial, block)?
            }
            None => engine.block_masks(state, block)?,
        };
        if let Some(key) = best_cell(&masks, tie) {
            if best
                .as_ref()
                .is_none_or(|(_, b)| key.cmp(b, tie) == Ordering::Less)
            {
                best = Some((ar, key));
            }
        }
    }
    best.ok_or(Error::Infeasible(block))
}

/// Places every block of `state` in order, each at its best cell.
pub(crate) fn decode(
    engine: &MaskEngine,
    mut state: FloorplanState,
    ratios: Ratios<'_>,
    tie: TieBreak,
) -> Result<(FloorplanState, Vec<Decision>)> {
    let mut decisions = Vec::with_capacity(state.order().len());
    while let Some(block) = state.current_block() {
        let (ar, key) = choose(engine, &state, ratios, tie)?;
        if let Some(ar) = ar {
            state.reshape(block, ar);
        }
        state.place_current(key.x, key.y)?;
        decisions.push(Decision {
            block,
            x: key.x,
            y: key.y,
            ratio: state.ratio(block),
            rung: key.rung,
        });
    }
    Ok((state, decisions))
}

/// HPWL normalizer for a fresh state: total HPWL after a greedy rollout.
/// Falls back to half the die perimeter per net when the rollout fails or
/// leaves zero wirelength.
pub fn hpwl_baseline(engine: &MaskEngine, state: &FloorplanState) -> f64 {
    let dims = state.dims();
    let fallback = (f64::from(dims.width) + f64::from(dims.height)) / 2.0
        * state.circuit().nets().len().max(1) as f64;
    match decode(
        engine,
        state.clone(),
        Ratios::Scan(super::DEFAULT_AR_CANDIDATES),
        TieBreak::RuleScores,
    ) {
        Ok((done, _)) => {
            let h = total_hpwl(&done);
            if h > 0.0 {
                h
            } else {
                fallback
            }
        }
        Err(_) => fallback,
    }
}
