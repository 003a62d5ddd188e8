mod common;

use std::sync::Arc;

use common::build;
use floorplan3d::env::{compute_rewards, read_jsonl, Action, Env, OrderPolicy, ResetOptions};
use floorplan3d::io::{synth_instance, SynthSpec};
use floorplan3d::metrics::{measure, normalize, satisfaction_counts, total_overlap};
use floorplan3d::model::{
    BindMode, Block, BoundaryBinding, Circuit, CircuitSpec, ConstraintSet, GridDims, Pin,
    Preplacement, TaskProfile,
};
use floorplan3d::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts(baseline: f64) -> ResetOptions {
    ResetOptions {
        hpwl_baseline: Some(baseline),
        ..Default::default()
    }
}

fn two_hard() -> Arc<Circuit> {
    build(
        GridDims::new(6, 6, 1),
        vec![Block::hard(0, "a", 2, 2, 0), Block::hard(1, "b", 2, 2, 0)],
        &[(0, 0)],
        vec![
            vec![Pin::Block(0), Pin::Terminal(0)],
            vec![Pin::Block(0), Pin::Block(1)],
        ],
        ConstraintSet::default(),
    )
}

/// Plays an episode choosing uniformly among available cells. Stops early
/// when a block has nowhere to go.
fn random_episode(env: &mut Env, seed: u64) -> Vec<Action> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut actions = Vec::new();
    while let Some(m) = env.masks() {
        let cells: Vec<(u32, u32)> = m
            .availability
            .cells()
            .filter(|c| *c.2)
            .map(|c| (c.0, c.1))
            .collect();
        if cells.is_empty() {
            break;
        }
        let (x, y) = cells[rng.gen_range(0..cells.len())];
        let a = Action {
            x,
            y,
            ar_next: Some(rng.gen_range(0.1..10.0)),
        };
        env.step(a).unwrap();
        actions.push(a);
    }
    actions
}

#[test]
fn all_preplaced_is_terminal_at_reset() {
    let cs = ConstraintSet {
        preplaced: vec![Preplacement {
            block: 0,
            x: 1,
            y: 1,
            z: 0,
            w: 2,
            h: 2,
        }],
        ..Default::default()
    };
    let c = build(
        GridDims::new(4, 4, 1),
        vec![Block::hard(0, "a", 2, 2, 0)],
        &[],
        vec![],
        cs,
    );
    let mut env = Env::new(c, TaskProfile::task(3).unwrap()).unwrap();
    let obs = env.reset(opts(1.0)).unwrap();
    assert!(env.is_terminal());
    assert!(obs.block.is_none() && obs.masks.is_none());
    assert!(*obs.occupancy[0].get(1, 1));
    assert!(matches!(
        env.step(Action::at(0, 0)),
        Err(Error::EpisodeTerminal)
    ));
    let s = env.summary("none").unwrap();
    assert_eq!(s.raw.overlap, 0.0);
}

#[test]
fn single_unconstrained_block_sees_position_mask() {
    let c = build(
        GridDims::new(5, 4, 1),
        vec![Block::hard(0, "a", 2, 3, 0)],
        &[],
        vec![],
        ConstraintSet::default(),
    );
    let mut env = Env::new(c, TaskProfile::task(1).unwrap()).unwrap();
    let obs = env.reset(opts(1.0)).unwrap();
    assert_eq!((obs.block, obs.cursor), (Some(0), 0));
    let m = obs.masks.as_ref().unwrap();
    assert_eq!(m.availability, m.position);
    assert_eq!(m.availability.count_ones(), 4 * 2);
}

#[test]
fn task3_observation_carries_rule_masks() {
    let c = Arc::new(synth_instance(&SynthSpec::n10_like(), SynthSpec::N10_COUNTS, 1).unwrap());
    let mut env = Env::new(c.clone(), TaskProfile::task(3).unwrap()).unwrap();
    let mut seen = (false, false, false);
    env.reset(opts(1.0)).unwrap();
    while let Some(m) = env.masks().cloned() {
        let b = m.block;
        assert_eq!(m.terminal.is_some(), c.binding_of(b).is_some());
        assert_eq!(
            m.alignment.is_some(),
            c.alignment_partner(b)
                .is_some_and(|p| env.state().is_placed(p))
        );
        let placed_mates = c
            .group_mates(b)
            .into_iter()
            .any(|g| env.state().is_placed(g));
        assert_eq!(m.grouping.is_some(), placed_mates);
        seen.0 |= m.terminal.is_some();
        seen.1 |= m.alignment.is_some();
        seen.2 |= m.grouping.is_some();
        let stack = env.observation().stack();
        assert_eq!(stack.len(), 2 + 5);
        assert!(stack
            .iter()
            .all(|(_, g)| (g.width(), g.height()) == (128, 128)));
        let (x, y, _) = m.availability.cells().find(|c| *c.2).unwrap();
        env.step(Action::at(x, y)).unwrap();
    }
    assert_eq!(seen, (true, true, true));
}

#[test]
fn last_step_is_terminal_and_further_steps_fail() {
    let mut env = Env::new(two_hard(), TaskProfile::task(1).unwrap()).unwrap();
    env.reset(opts(1.0)).unwrap();
    assert!(!env.step(Action::at(0, 0)).unwrap().terminal);
    let out = env.step(Action::at(4, 4)).unwrap();
    assert!(out.terminal && out.observation.block.is_none());
    assert!(matches!(
        env.step(Action::at(0, 0)),
        Err(Error::EpisodeTerminal)
    ));
}

#[test]
fn unavailable_cell_is_rejected_without_side_effects() {
    let mut env = Env::new(two_hard(), TaskProfile::task(1).unwrap()).unwrap();
    env.reset(opts(1.0)).unwrap();
    env.step(Action::at(0, 0)).unwrap();
    for (x, y) in [(1, 1), (5, 5), (6, 0), (0, 99)] {
        let err = env.step(Action::at(x, y)).unwrap_err();
        assert!(
            matches!(err, Error::InvalidAction { block: 1, .. }),
            "{err}"
        );
    }
    assert_eq!(env.state().cursor(), 1);
    assert_eq!(env.trace().steps.len(), 1);
}

#[test]
fn bound_block_lands_on_its_terminal() {
    // any available cell with a zero distance threshold gives d = 0
    let cs = ConstraintSet {
        boundary: vec![BoundaryBinding {
            block: 0,
            terminals: vec![0],
            mode: BindMode::All,
        }],
        ..Default::default()
    };
    let c = build(
        GridDims::new(8, 8, 1),
        vec![Block::hard(0, "a", 2, 3, 0)],
        &[(7, 4)],
        vec![],
        cs,
    );
    let task = TaskProfile::task(1).unwrap();
    let mut env = Env::new(c.clone(), task.clone()).unwrap();
    env.reset(opts(1.0)).unwrap();
    let cells: Vec<_> = env
        .masks()
        .unwrap()
        .availability
        .cells()
        .filter(|c| *c.2)
        .map(|c| (c.0, c.1))
        .collect();
    assert!(!cells.is_empty());
    for (x, y) in cells {
        env.reset(opts(1.0)).unwrap();
        let out = env.step(Action::at(x, y)).unwrap();
        assert_eq!(out.metrics.distance, 0.0);
        assert_eq!(measure(env.state(), &task).distance, 0.0);
    }
}

#[test]
fn ar_next_is_clipped() {
    let c = build(
        GridDims::new(16, 16, 1),
        vec![
            Block::hard(0, "a", 2, 2, 0),
            Block::soft(1, "s", 16, 0.5, 2.0, 0),
        ],
        &[],
        vec![],
        ConstraintSet::default(),
    );
    let mut env = Env::new(c, TaskProfile::task(1).unwrap()).unwrap();
    let opts = ResetOptions {
        order: OrderPolicy::Given(vec![0, 1]),
        hpwl_baseline: Some(1.0),
        ..Default::default()
    };
    env.reset(opts.clone()).unwrap();
    env.step(Action {
        x: 0,
        y: 0,
        ar_next: Some(100.0),
    })
    .unwrap();
    assert_eq!(env.state().shape(1), (6, 3));
    assert_eq!(env.state().ratio(1), Some(2.0));
    env.reset(opts).unwrap();
    env.step(Action {
        x: 0,
        y: 0,
        ar_next: Some(1e-6),
    })
    .unwrap();
    assert_eq!(env.state().shape(1), (3, 6));
}

#[test]
fn soft_shapes_respect_ratio_bounds() {
    let c = Arc::new(synth_instance(&SynthSpec::n10_like(), SynthSpec::N10_COUNTS, 4).unwrap());
    let mut env = Env::new(c.clone(), TaskProfile::task(2).unwrap()).unwrap();
    env.reset(opts(1.0)).unwrap();
    random_episode(&mut env, 4);
    for s in &env.trace().steps {
        let b = c.block(s.block);
        let (w, h) = (f64::from(s.w), f64::from(s.h));
        assert!(s.w as u64 * s.h as u64 >= b.area);
        // rounding slack of one cell on either side
        assert!((w - 1.0) / (h + 1.0) <= b.ar_max && (w + 1.0) / (h - 1.0).max(1.0) >= b.ar_min);
    }
}

#[test]
fn jsonl_export_round_trips() {
    let c = Arc::new(synth_instance(&SynthSpec::n10_like(), SynthSpec::N10_COUNTS, 2).unwrap());
    let task = TaskProfile::task(3).unwrap();
    let mut env = Env::new(c, task.clone()).unwrap();
    env.reset(opts(500.0)).unwrap();
    random_episode(&mut env, 2);
    let mut buf = Vec::new();
    env.trace().write_jsonl(&mut buf, &task.weights).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let records = read_jsonl(&text).unwrap();
    let rewards = env.rewards().unwrap();
    assert_eq!(records.len(), env.trace().steps.len());
    for (i, (r, s)) in records.iter().zip(&env.trace().steps).enumerate() {
        assert_eq!(r.step, i + 1);
        assert_eq!(
            (r.block, r.action, r.metrics),
            (s.block, s.action, s.metrics)
        );
        assert_eq!(r.reward, rewards[i]);
    }
    // rewards recomputed from the exported metrics alone
    let metrics: Vec<_> = records.iter().map(|r| r.metrics).collect();
    assert_eq!(compute_rewards(&metrics, &task.weights).unwrap(), rewards);
}

#[test]
fn identical_actions_replay_identically() {
    let c = Arc::new(synth_instance(&SynthSpec::n10_like(), SynthSpec::N10_COUNTS, 6).unwrap());
    let task = TaskProfile::task(3).unwrap();
    let reset = ResetOptions {
        order: OrderPolicy::Shuffled,
        seed: 6,
        first_ar: Some(1.7),
        hpwl_baseline: Some(300.0),
    };
    let mut a = Env::new(c.clone(), task.clone()).unwrap();
    a.reset(reset.clone()).unwrap();
    let actions = random_episode(&mut a, 6);

    let mut b = Env::new(c, task).unwrap();
    b.reset(reset).unwrap();
    for act in &actions {
        b.step(*act).unwrap();
    }
    assert_eq!(a.trace(), b.trace());
    assert_eq!(
        a.state().placed().collect::<Vec<_>>(),
        b.state().placed().collect::<Vec<_>>()
    );
    assert_eq!(a.rewards().unwrap(), b.rewards().unwrap());
    assert_eq!(total_overlap(a.state()), 0);
}

#[test]
fn summary_matches_direct_recomputation() {
    let c = Arc::new(synth_instance(&SynthSpec::n10_like(), SynthSpec::N10_COUNTS, 8).unwrap());
    let task = TaskProfile::task(3).unwrap();
    let mut env = Env::new(c.clone(), task.clone()).unwrap();
    env.reset(opts(400.0)).unwrap();
    assert!(matches!(env.summary("x"), Err(Error::EpisodeRunning)));
    random_episode(&mut env, 8);
    let s = env.summary("random").unwrap();
    let raw = measure(env.state(), &task);
    assert_eq!(s.raw, raw);
    assert_eq!(s.normalized, normalize(&raw, &c, 400.0).unwrap());
    assert_eq!(
        s.satisfaction,
        satisfaction_counts(env.state(), &task).unwrap()
    );
    assert_eq!(s.raw.overlap, 0.0);
    assert_eq!(s.normalized, env.trace().steps.last().unwrap().metrics);
    let relaxed: Vec<_> = env
        .trace()
        .relaxations()
        .map(|t| (t.block, t.rung))
        .collect();
    assert_eq!(s.relaxations, relaxed);
}

#[test]
fn empty_circuit_gives_zero_report() {
    let c = Arc::new(
        Circuit::new(CircuitSpec {
            name: "empty".into(),
            dims: GridDims::new(4, 4, 2),
            utilization: 0.5,
            blocks: vec![],
            terminals: vec![],
            nets: vec![],
            constraints: ConstraintSet::default(),
        })
        .unwrap(),
    );
    let mut env = Env::new(c, TaskProfile::task(3).unwrap()).unwrap();
    env.reset(opts(1.0)).unwrap();
    assert!(env.is_terminal());
    let s = env.summary("greedy").unwrap();
    assert_eq!(s.raw.weighted(&Default::default()), 0.0);
    assert_eq!(s.normalized.weighted(&Default::default()), 0.0);
    assert!(s.relaxations.is_empty());
}

#[test]
fn nonpositive_baseline_is_rejected() {
    let mut env = Env::new(two_hard(), TaskProfile::task(1).unwrap()).unwrap();
    assert!(env.reset(opts(0.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn driven_episodes_never_overlap(seed in 0u64..10_000, task in 1u8..=3) {
        let c = Arc::new(synth_instance(&SynthSpec::n10_like(), SynthSpec::N10_COUNTS, seed % 20).unwrap());
        let mut env = Env::new(c.clone(), TaskProfile::task(task).unwrap()).unwrap();
        env.reset(ResetOptions { order: OrderPolicy::Shuffled, seed, first_ar: None, hpwl_baseline: Some(1.0) }).unwrap();
        random_episode(&mut env, seed);
        if !env.is_terminal() {
            prop_assert_eq!(env.masks().unwrap().availability.count_ones(), 0);
        }
        prop_assert_eq!(total_overlap(env.state()), 0);
        for (_, p) in env.state().placed() {
            prop_assert!(p.in_bounds(c.dims()));
        }
    }
}
