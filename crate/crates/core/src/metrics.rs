//! Quantitative rule metrics and their per-circuit normalization.
//!
//! Pairwise metrics are pure functions of two [`Placement`]s; the
//! state-level wrappers check placement and layer preconditions. Episode
//! aggregates ([`measure`]) only see placed blocks, so an empty state
//! measures all-zero and HPWL grows as blocks are added.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    interval_overlap, BindMode, BoundaryBinding, Circuit, FloorplanState, Pin, Placement, Rule,
    TaskProfile, Terminal, Weights,
};

/// Distance from a point to the closed integer interval `[lo, hi]`.
#[inline]
fn dist_to_interval(p: i64, lo: i64, hi: i64) -> i64 {
    if p < lo {
        lo - p
    } else if p > hi {
        p - hi
    } else {
        0
    }
}

/// Minimum Manhattan distance between the terminal and the four edges of the
/// block, each edge taken as its inclusive run of boundary cells.
pub fn block_terminal_distance(p: &Placement, t: &Terminal) -> u32 {
    let (x0, y0) = (i64::from(p.x), i64::from(p.y));
    let (x1, y1) = (x0 + i64::from(p.w) - 1, y0 + i64::from(p.h) - 1);
    let (tx, ty) = (i64::from(t.x), i64::from(t.y));
    let dx = dist_to_interval(tx, x0, x1);
    let dy = dist_to_interval(ty, y0, y1);
    let bottom = dx + (ty - y0).abs();
    let top = dx + (ty - y1).abs();
    let left = (tx - x0).abs() + dy;
    let right = (tx - x1).abs() + dy;
    bottom.min(top).min(left).min(right) as u32
}

/// Length of the shared edge when the two footprints abut, else zero.
/// Corner contact counts as zero.
pub fn adjacency_length(a: &Placement, b: &Placement) -> u32 {
    if a.x_end() == b.x || b.x_end() == a.x {
        interval_overlap(a.y, a.h, b.y, b.h)
    } else if a.y_end() == b.y || b.y_end() == a.y {
        interval_overlap(a.x, a.w, b.x, b.w)
    } else {
        0
    }
}

/// Area of the intersection of the two footprints projected onto one plane.
pub fn projected_intersection(a: &Placement, b: &Placement) -> u64 {
    u64::from(interval_overlap(a.x, a.w, b.x, b.w))
        * u64::from(interval_overlap(a.y, a.h, b.y, b.h))
}

/// `min(1, intersection / min_area)`.
pub fn alignment_score(a: &Placement, b: &Placement, min_area: f64) -> f64 {
    (projected_intersection(a, b) as f64 / min_area).min(1.0)
}

/// Overlap area of two footprints, zero across layers.
pub fn pair_overlap(a: &Placement, b: &Placement) -> u64 {
    if a.z == b.z {
        projected_intersection(a, b)
    } else {
        0
    }
}

/// Length of the edges that face each other when `a` and `b` abut: heights
/// for side-by-side contact, widths for stacked contact.
pub fn facing_edges(a: &Placement, b: &Placement) -> Option<(u32, u32)> {
    if a.x_end() == b.x || b.x_end() == a.x {
        Some((a.h, b.h))
    } else if a.y_end() == b.y || b.y_end() == a.y {
        Some((a.w, b.w))
    } else {
        None
    }
}

fn placed(state: &FloorplanState, block: usize) -> Result<Placement> {
    state.placement(block).ok_or(Error::Unplaced(block))
}

pub fn terminal_distance(state: &FloorplanState, block: usize, terminal: usize) -> Result<u32> {
    let p = placed(state, block)?;
    Ok(block_terminal_distance(
        &p,
        state.circuit().terminal(terminal),
    ))
}

/// Distance of a boundary binding: max over its terminals under `ALL`, min
/// under `ANY`.
pub fn binding_distance(state: &FloorplanState, binding: &BoundaryBinding) -> Result<u32> {
    let p = placed(state, binding.block)?;
    let ds = binding
        .terminals
        .iter()
        .map(|&t| block_terminal_distance(&p, state.circuit().terminal(t)));
    Ok(match binding.mode {
        BindMode::All => ds.max(),
        BindMode::Any => ds.min(),
    }
    .unwrap_or(0))
}

pub fn block_adjacency(state: &FloorplanState, a: usize, b: usize) -> Result<u32> {
    let (pa, pb) = (placed(state, a)?, placed(state, b)?);
    if pa.z != pb.z {
        return Err(Error::LayerMismatch(a, b, "different"));
    }
    Ok(adjacency_length(&pa, &pb))
}

pub fn block_alignment(state: &FloorplanState, a: usize, b: usize, min_area: f64) -> Result<f64> {
    let (pa, pb) = (placed(state, a)?, placed(state, b)?);
    if pa.z == pb.z {
        return Err(Error::LayerMismatch(a, b, "the same"));
    }
    Ok(alignment_score(&pa, &pb, min_area))
}

/// Sum over nets of the half-perimeter of the bounding box of block centers
/// and terminal points, on the 2D projection. Only placed blocks count.
pub fn total_hpwl(state: &FloorplanState) -> f64 {
    let mut doubled = 0i64;
    for net in state.circuit().nets() {
        doubled += net_hpwl2(state, &net.members, None);
    }
    doubled as f64 / 2.0
}

/// Doubled HPWL of one net's member list, optionally skipping one block.
pub(crate) fn net_hpwl2(state: &FloorplanState, members: &[Pin], skip: Option<usize>) -> i64 {
    let mut bbox: Option<(i64, i64, i64, i64)> = None;
    for c in member_centers2(state, members, skip) {
        bbox = Some(match bbox {
            None => (c.0, c.0, c.1, c.1),
            Some((x0, x1, y0, y1)) => (x0.min(c.0), x1.max(c.0), y0.min(c.1), y1.max(c.1)),
        });
    }
    bbox.map_or(0, |(x0, x1, y0, y1)| x1 - x0 + y1 - y0)
}

/// Doubled centers of placed members (terminals always count).
pub(crate) fn member_centers2<'a>(
    state: &'a FloorplanState,
    members: &'a [Pin],
    skip: Option<usize>,
) -> impl Iterator<Item = (i64, i64)> + 'a {
    members.iter().filter_map(move |m| match *m {
        Pin::Block(b) if Some(b) == skip => None,
        Pin::Block(b) => state.placement(b).map(|p| p.center2()),
        Pin::Terminal(t) => {
            let t = state.circuit().terminal(t);
            Some((2 * i64::from(t.x), 2 * i64::from(t.y)))
        }
    })
}

/// Sum of pairwise overlap areas over placed blocks sharing a layer.
pub fn total_overlap(state: &FloorplanState) -> u64 {
    let placed: Vec<Placement> = state.placed().map(|(_, p)| p).collect();
    let mut total = 0;
    for (i, a) in placed.iter().enumerate() {
        for b in &placed[i + 1..] {
            total += pair_overlap(a, b);
        }
    }
    total
}

/// Episode-level metric snapshot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricTuple {
    /// Mean alignment score over alignment pairs.
    pub aln: f64,
    pub hpwl: f64,
    pub overlap: f64,
    /// Mean adjacency length over grouped block pairs.
    pub adjacency: f64,
    /// Mean block-terminal distance over boundary bindings.
    pub distance: f64,
    pub normalized: bool,
}

impl MetricTuple {
    /// `w_a·aln − w_o·o − w_HPWL·hpwl + w_l·l − w_d·d`.
    pub fn weighted(&self, w: &Weights) -> f64 {
        w.alignment * self.aln - w.overlap * self.overlap - w.hpwl * self.hpwl
            + w.adjacency * self.adjacency
            - w.distance * self.distance
    }

    /// Componentwise `self − prev`, weighted.
    pub fn weighted_delta(&self, prev: &MetricTuple, w: &Weights) -> f64 {
        w.alignment * (self.aln - prev.aln)
            - w.overlap * (self.overlap - prev.overlap)
            - w.hpwl * (self.hpwl - prev.hpwl)
            + w.adjacency * (self.adjacency - prev.adjacency)
            - w.distance * (self.distance - prev.distance)
    }
}

/// Unordered block pairs inside each voltage island.
pub fn group_pairs(circuit: &Circuit) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for g in &circuit.constraints().groups {
        for (i, &a) in g.iter().enumerate() {
            for &b in &g[i + 1..] {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Raw aggregate metrics of the current state under a task's rules. Pairs or
/// bindings with an unplaced block contribute zero.
pub fn measure(state: &FloorplanState, task: &TaskProfile) -> MetricTuple {
    let circuit = state.circuit();
    let cs = circuit.constraints();

    let mut aln = 0.0;
    if task.enabled(Rule::Alignment) && !cs.alignment_pairs.is_empty() {
        for pair in &cs.alignment_pairs {
            if let (Some(a), Some(b)) = (state.placement(pair.a), state.placement(pair.b)) {
                aln += alignment_score(&a, &b, pair.min_area);
            }
        }
        aln /= cs.alignment_pairs.len() as f64;
    }

    let mut adjacency = 0.0;
    if task.enabled(Rule::Grouping) {
        let pairs = group_pairs(circuit);
        if !pairs.is_empty() {
            for &(a, b) in &pairs {
                if let (Some(pa), Some(pb)) = (state.placement(a), state.placement(b)) {
                    adjacency += f64::from(adjacency_length(&pa, &pb));
                }
            }
            adjacency /= pairs.len() as f64;
        }
    }

    let mut distance = 0.0;
    if task.enabled(Rule::Boundary) && !cs.boundary.is_empty() {
        for bind in &cs.boundary {
            if state.is_placed(bind.block) {
                distance += f64::from(binding_distance(state, bind).unwrap_or(0));
            }
        }
        distance /= cs.boundary.len() as f64;
    }

    MetricTuple {
        aln,
        hpwl: total_hpwl(state),
        overlap: total_overlap(state) as f64,
        adjacency,
        distance,
        normalized: false,
    }
}

/// Scales raw metrics by circuit statistics: distance by the mean die side,
/// adjacency by the mean block side, overlap by the mean block area and HPWL
/// by the baseline `hpwl_baseline`. Alignment is already in `[0, 1]`.
pub fn normalize(raw: &MetricTuple, circuit: &Circuit, hpwl_baseline: f64) -> Result<MetricTuple> {
    let n = circuit.blocks().len();
    if n == 0 {
        return Err(Error::Empty("circuit has no blocks"));
    }
    if !(hpwl_baseline > 0.0) {
        return Err(Error::Invalid(format!(
            "HPWL baseline must be positive, got {hpwl_baseline}"
        )));
    }
    let dims = circuit.dims();
    let mean_area = circuit.total_block_area() as f64 / n as f64;
    Ok(MetricTuple {
        aln: raw.aln,
        hpwl: raw.hpwl / hpwl_baseline,
        overlap: raw.overlap / mean_area,
        adjacency: raw.adjacency / mean_area.sqrt(),
        distance: raw.distance / ((f64::from(dims.width) + f64::from(dims.height)) / 2.0),
        normalized: true,
    })
}

/// `(satisfied, total)` for one rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub satisfied: usize,
    pub total: usize,
}

impl Count {
    pub fn all_satisfied(&self) -> bool {
        self.satisfied == self.total
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Satisfaction {
    pub boundary: Count,
    pub grouping: Count,
    pub alignment: Count,
}

/// Counts bindings and pairs meeting the reporting thresholds:
/// distance `≤ 0`; adjacency `> 0.5·min(l₁, l₂)` over the facing edges;
/// projected intersection `> 0.5·min(a₁, a₂)`.
pub fn satisfaction_counts(state: &FloorplanState, task: &TaskProfile) -> Result<Satisfaction> {
    let circuit = state.circuit();
    let cs = circuit.constraints();
    let mut out = Satisfaction::default();

    if task.enabled(Rule::Boundary) {
        for bind in &cs.boundary {
            out.boundary.total += 1;
            if binding_distance(state, bind)? == 0 {
                out.boundary.satisfied += 1;
            }
        }
    }
    if task.enabled(Rule::Grouping) {
        for (a, b) in group_pairs(circuit) {
            out.grouping.total += 1;
            let (pa, pb) = (placed(state, a)?, placed(state, b)?);
            let l = adjacency_length(&pa, &pb);
            if let Some((la, lb)) = facing_edges(&pa, &pb) {
                if f64::from(l) > 0.5 * f64::from(la.min(lb)) {
                    out.grouping.satisfied += 1;
                }
            }
        }
    }
    if task.enabled(Rule::Alignment) {
        for pair in &cs.alignment_pairs {
            out.alignment.total += 1;
            let (pa, pb) = (placed(state, pair.a)?, placed(state, pair.b)?);
            let min_area = circuit.block(pair.a).area.min(circuit.block(pair.b).area);
            if projected_intersection(&pa, &pb) as f64 > 0.5 * min_area as f64 {
                out.alignment.satisfied += 1;
            }
        }
    }
    Ok(out)
}
