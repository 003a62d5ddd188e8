// Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use floorplan3d::masks::{
    adjacent_block_mask, adjacent_terminal_mask, alignment_mask, block_distance_mask,
    position_mask, wire_mask, MaskEngine, Rung,
};
use floorplan3d::metrics::{
    adjacency_length, alignment_score, binding_distance, block_terminal_distance, total_hpwl,
};
use floorplan3d::model::{
    AlignmentPair, BindMode, Block, BoundaryBinding, Circuit, CircuitSpec, ConstraintSet,
    FloorplanState, GridDims, Net, Pin, Placement, RuleSet, TaskProfile, Terminal,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random instance with up to three placed blocks and one subject
/// block that is unplaced.
pub struct Config {
    pub circuit: Arc<Circuit>,
    pub state: FloorplanState,
    pub subject: usize,
    pub task: TaskProfile,
}

pub fn random_config(seed: u64) -> Config {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (rng.gen_range(4..=16u32), rng.gen_range(4..=16u32));
    let dims = GridDims::new(w, h, 2);
    let placed_n = rng.gen_range(0..=3usize);
    let n = placed_n + 1;

    let mut blocks = Vec::new();
    for i in 0..n {
        let layer = rng.gen_range(0..2);
        let (bw, bh) = (rng.gen_range(1..=w / 2), rng.gen_range(1..=h / 2));
        if i == placed_n && rng.gen_bool(0.5) {
            let area = u64::from(bw * bh);
            blocks.push(Block::soft(i, format!("b{i}"), area, 0.5, 2.0, layer));
        } else {
            blocks.push(Block::hard(i, format!("b{i}"), bw, bh, layer));
        }
    }
    let subject = placed_n;

    let terminals: Vec<Terminal> = (0..rng.gen_range(1..=3usize))
        .map(|k| Terminal {
            id: k,
            name: format!("t{k}"),
            x: rng.gen_range(0..w),
            y: rng.gen_range(0..h),
            z: 0,
        })
        .collect();

    let mut nets = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut members = vec![Pin::Block(subject)];
        for b in 0..placed_n {
            if rng.gen_bool(0.6) {
                members.push(Pin::Block(b));
            }
        }
        for t in 0..terminals.len() {
            if rng.gen_bool(0.4) {
                members.push(Pin::Terminal(t));
            }
        }
        if members.len() < 2 {
            members.push(Pin::Terminal(0));
        }
        members.shuffle(&mut rng);
        nets.push(Net { members });
    }

    let mut constraints = ConstraintSet::default();
    let mut picked: Vec<usize> = (0..terminals.len()).filter(|_| rng.gen_bool(0.6)).collect();
    if picked.is_empty() {
        picked.push(0);
    }
    constraints.boundary.push(BoundaryBinding {
        block: subject,
        terminals: picked,
        mode: if rng.gen_bool(0.5) {
            BindMode::All
        } else {
            BindMode::Any
        },
    });
    let layer = blocks[subject].layer;
    let mates: Vec<usize> = (0..placed_n)
        .filter(|&b| blocks[b].layer == layer)
        .collect();
    for &m in &mates {
        if rng.gen_bool(0.7) {
            constraints.groups.push(vec![subject, m]);
        }
    }
    if let Some(&partner) = (0..placed_n)
        .filter(|&b| blocks[b].layer != layer)
        .collect::<Vec<_>>()
        .choose(&mut rng)
    {
        let min = blocks[subject].area.min(blocks[partner].area) as f64;
        constraints.alignment_pairs.push(AlignmentPair {
            a: subject,
            b: partner,
            min_area: min * rng.gen_range(0.2..=1.0),
        });
    }

    let circuit = Arc::new(
        Circuit::new(CircuitSpec {
            name: format!("oracle-{seed}"),
            dims,
            utilization: 1.0,
            blocks,
            terminals,
            nets,
            constraints,
        })
        .expect("generated circuit is valid"),
    );
    let mut rules = RuleSet::EMPTY;
    for r in [
        floorplan3d::model::Rule::Boundary,
        floorplan3d::model::Rule::Grouping,
    ] {
        rules = rules.with(r);
    }
    let mut task = TaskProfile::custom(rules);
    task.thresholds.terminal = f64::from(rng.gen_range(0..3u8));
    task.thresholds.grouping = f64::from(rng.gen_range(0..2u8));

    let mut state = FloorplanState::new(circuit.clone(), &task, None).unwrap();
    if circuit.block(subject).soft {
        state.reshape(subject, rng.gen_range(0.3..3.0));
    }
    for b in 0..placed_n {
        let (bw, bh) = state.shape(b);
        state.force_place(b, rng.gen_range(0..=w - bw), rng.gen_range(0..=h - bh));
    }
    Config {
        circuit,
        state,
        subject,
        task,
    }
}

fn cells(p: &Placement) -> impl Iterator<Item = (u32, u32)> + '_ {
    (p.x..p.x_end()).flat_map(move |x| (p.y..p.y_end()).map(move |y| (x, y)))
}

/// Compares every mask of the subject, cell by cell, against the metric
/// measured on a clone with the subject force-placed there. Returns the
/// number of cell comparisons.
pub fn check_masks(cfg: &Config) -> Result<usize, String> {
    let (state, s) = (&cfg.state, cfg.subject);
    let circuit = state.circuit();
    let dims = state.dims();
    let engine = MaskEngine::new(circuit, &cfg.task);
    let bm = engine.block_masks(state, s).map_err(|e| e.to_string())?;
    let binding = circuit.binding_of(s).cloned();
    let mates: Vec<usize> = circuit
        .group_mates(s)
        .into_iter()
        .filter(|&m| state.is_placed(m))
        .collect();
    let pair = circuit.alignment_pair_of(s).cloned();
    let others: Vec<(usize, Placement)> = state.placed().filter(|&(b, _)| b != s).collect();
    let hpwl_before = total_hpwl(state);

    let terminal_masks: Vec<_> = (0..circuit.terminals().len())
        .map(|t| adjacent_terminal_mask(state, s, t))
        .collect();
    let block_masks: Vec<_> = others
        .iter()
        .filter(|(_, p)| p.z == state.layer(s))
        .map(|&(b, _)| (b, adjacent_block_mask(state, s, b).unwrap()))
        .collect();
    let aln = pair.as_ref().map(|p| {
        let partner = if p.a == s { p.b } else { p.a };
        (
            partner,
            alignment_mask(state, s, partner, p.min_area).unwrap(),
        )
    });
    let wire = wire_mask(state, s);
    let position = position_mask(state, s);
    let distance: Vec<_> = others
        .iter()
        .map(|&(b, _)| (b, block_distance_mask(state, s, b, 5.0).unwrap()))
        .collect();

    let mut checked = 0;
    let mut probe = state.clone();
    for x in 0..dims.width {
        for y in 0..dims.height {
            probe.force_place(s, x, y);
            let p = probe.placement(s).unwrap();
            let at = |what: &str, got: f64, want: f64| -> Result<(), String> {
                if got == want {
                    Ok(())
                } else {
                    Err(format!("{what} at ({x}, {y}): mask {got}, metric {want}"))
                }
            };

            for (t, m) in terminal_masks.iter().enumerate() {
                let want = block_terminal_distance(&p, circuit.terminal(t));
                at("terminal", m.get(x, y), f64::from(want))?;
            }
            let t_metric = binding
                .as_ref()
                .map(|b| binding_distance(&probe, b).unwrap());
            if let (Some(m), Some(d)) = (&bm.terminal, t_metric) {
                at("merged terminal", m.get(x, y), f64::from(d))?;
            }

            for (b, m) in &block_masks {
                let want = adjacency_length(&p, &state.placement(*b).unwrap());
                at("adjacent block", m.get(x, y), f64::from(want))?;
            }
            let b_metric: u32 = mates
                .iter()
                .map(|&m| adjacency_length(&p, &state.placement(m).unwrap()))
                .sum();
            if let Some(m) = &bm.grouping {
                at("merged adjacency", m.get(x, y), f64::from(b_metric))?;
            }

            let a_metric = aln.as_ref().map(|(partner, m)| {
                let min = pair.as_ref().unwrap().min_area;
                let want = alignment_score(&p, &state.placement(*partner).unwrap(), min);
                (m.get(x, y), want)
            });
            if let Some((got, want)) = a_metric {
                at("alignment", got, want)?;
            }

            at("wire", wire.get(x, y), total_hpwl(&probe) - hpwl_before)?;

            let inside = p.in_bounds(dims);
            let free = others
                .iter()
                .filter(|(_, q)| q.z == p.z)
                .all(|(_, q)| cells(q).all(|c| !cells(&p).any(|d| d == c)));
            if *position.get(x, y) != (inside && free) {
                return Err(format!(
                    "position at ({x}, {y}): mask {}",
                    position.get(x, y)
                ));
            }
            if *bm.position.get(x, y) != *position.get(x, y) {
                return Err(format!("engine position at ({x}, {y}) differs"));
            }

            for (b, (m, bin)) in &distance {
                let (ax, ay) = state.placement(*b).unwrap().center();
                let (cx, cy) = p.center();
                let want = (cx - ax).abs() + (cy - ay).abs();
                at("block distance", m.get(x, y), want)?;
                if *bin.get(x, y) != (want <= 5.0) {
                    return Err(format!("block distance binarization at ({x}, {y})"));
                }
            }

            if bm.rung == Rung::Strict {
                let th = &cfg.task.thresholds;
                let t_ok = t_metric.is_none_or(|d| f64::from(d) <= th.terminal);
                let b_ok = bm.grouping.is_none()
                    || if th.grouping > 0.0 {
                        f64::from(b_metric) >= th.grouping
                    } else {
                        b_metric > 0
                    };
                let a_ok = a_metric
                    .is_none_or(|(_, score)| score >= engine.alignment_rule().score_threshold(s));
                let want = inside && free && t_ok && b_ok && a_ok;
                if bm.is_available(x, y) != want {
                    return Err(format!(
                        "availability at ({x}, {y}): mask {}, rules {want}",
                        bm.is_available(x, y)
                    ));
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}

pub fn build(
    dims: GridDims,
    blocks: Vec<Block>,
    terminals: &[(u32, u32)],
    nets: Vec<Vec<Pin>>,
    constraints: ConstraintSet,
) -> Arc<Circuit> {
    Arc::new(
        Circuit::new(CircuitSpec {
            name: "fixture".into(),
            dims,
            utilization: 1.0,
            blocks,
            terminals: terminals
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| Terminal {
                    id: i,
                    name: format!("t{i}"),
                    x,
                    y,
                    z: 0,
                })
                .collect(),
            nets: nets.into_iter().map(|members| Net { members }).collect(),
            constraints,
        })
        .unwrap(),
    )
}

/// State with every listed block force-placed at its anchor.
pub fn placed(
    circuit: &Arc<Circuit>,
    task: &TaskProfile,
    at: &[(usize, u32, u32)],
) -> FloorplanState {
    let mut s = FloorplanState::new(circuit.clone(), task, None).unwrap();
    for &(b, x, y) in at {
        s.force_place(b, x, y);
    }
    s
}

pub fn all_rules() -> TaskProfile {
    TaskProfile::task(3).unwrap()
}
