mod common;

use std::sync::Arc;

use common::build;
use floorplan3d::io::{synth_instance, SynthSpec};
use floorplan3d::masks::Rung;
use floorplan3d::metrics::{
    adjacency_length, binding_distance, satisfaction_counts, total_overlap,
};
use floorplan3d::model::{
    BindMode, Block, BoundaryBinding, Circuit, CircuitSpec, ConstraintSet, GridDims, Pin,
    Placement, TaskProfile,
};
use floorplan3d::solvers::{greedy_place, random_place, sa_place, solve, SolverConfig, SolverKind};

fn greedy() -> SolverConfig {
    SolverConfig::new(SolverKind::Greedy, 0)
}

fn sa(iterations: usize, seed: u64) -> SolverConfig {
    let mut c = SolverConfig::new(SolverKind::Anneal, seed);
    c.anneal.iterations = iterations;
    c
}

fn n10(seed: u64) -> Arc<Circuit> {
    Arc::new(synth_instance(&SynthSpec::n10_like(), SynthSpec::N10_COUNTS, seed).unwrap())
}

#[test]
fn unit_block_goes_to_its_terminal() {
    let c = build(
        GridDims::new(8, 8, 1),
        vec![Block::hard(0, "a", 1, 1, 0)],
        &[(0, 0)],
        vec![vec![Pin::Block(0), Pin::Terminal(0)]],
        ConstraintSet::default(),
    );
    let s = greedy_place(c, &TaskProfile::task(1).unwrap(), &greedy()).unwrap();
    let p = s.state.placement(0).unwrap();
    assert_eq!((p.x, p.y), (0, 0));
}

#[test]
fn empty_circuit_gives_empty_placement() {
    let c = Arc::new(
        Circuit::new(CircuitSpec {
            name: "empty".into(),
            dims: GridDims::new(4, 4, 1),
            utilization: 0.5,
            blocks: vec![],
            terminals: vec![],
            nets: vec![],
            constraints: ConstraintSet::default(),
        })
        .unwrap(),
    );
    let task = TaskProfile::task(3).unwrap();
    for kind in [SolverKind::Greedy, SolverKind::Anneal, SolverKind::Random] {
        let s = solve(c.clone(), &task, &SolverConfig::new(kind, 1)).unwrap();
        assert!(s.placements().is_empty());
        assert!(s.trace.steps.is_empty());
    }
}

/// A (2×2) bound to the corner terminal, grouped with B (2×2), on 8×8.
fn bound_and_grouped() -> Arc<Circuit> {
    let cs = ConstraintSet {
        groups: vec![vec![0, 1]],
        boundary: vec![BoundaryBinding {
            block: 0,
            terminals: vec![0],
            mode: BindMode::All,
        }],
        ..Default::default()
    };
    build(
        GridDims::new(8, 8, 1),
        vec![Block::hard(0, "A", 2, 2, 0), Block::hard(1, "B", 2, 2, 0)],
        &[(0, 0)],
        vec![vec![Pin::Block(0), Pin::Block(1)]],
        cs,
    )
}

#[test]
fn bound_and_grouped_pair() {
    let c = bound_and_grouped();
    let task = TaskProfile::task(3).unwrap();

    // exhaustive: layouts with d(A) = 0 and l(A, B) ≥ 1 exist
    let at = |x, y| Placement {
        x,
        y,
        z: 0,
        w: 2,
        h: 2,
    };
    let mut witnesses = 0;
    for (ax, ay) in (0..=6).flat_map(|x| (0..=6).map(move |y| (x, y))) {
        let a = at(ax, ay);
        if !(ax == 0 && ay == 0) {
            continue;
        }
        for (bx, by) in (0..=6).flat_map(|x| (0..=6).map(move |y| (x, y))) {
            let b = at(bx, by);
            if floorplan3d::metrics::pair_overlap(&a, &b) == 0 && adjacency_length(&a, &b) >= 1 {
                witnesses += 1;
            }
        }
    }
    assert!(witnesses > 0);

    let s = greedy_place(c.clone(), &task, &greedy()).unwrap();
    assert!(s.summary.relaxations.is_empty());
    let d = binding_distance(&s.state, &c.constraints().boundary[0]).unwrap();
    assert_eq!(d, 0);
    let (a, b) = (s.state.placement(0).unwrap(), s.state.placement(1).unwrap());
    assert!(adjacency_length(&a, &b) >= 1);
}

#[test]
fn one_iteration_of_annealing_is_greedy() {
    for seed in [0, 3] {
        let c = n10(seed);
        let task = TaskProfile::task(3).unwrap();
        let g = greedy_place(c.clone(), &task, &greedy()).unwrap();
        let r = sa_place(c, &task, &sa(1, seed)).unwrap();
        assert_eq!(r.curve.len(), 1);
        assert_eq!(r.solution.placements(), g.placements());
        assert_eq!(r.best_cost(), g.cost(&task.weights));
    }
}

/// Two equal 2×2 blocks. `P` talks to the corner terminal, `Q` only to
/// `P`. Equal areas order by id, so `first` is placed first.
fn order_instance(first_is_p: bool) -> Arc<Circuit> {
    let (p, q) = if first_is_p { (0, 1) } else { (1, 0) };
    let mut blocks = vec![Block::hard(p, "P", 2, 2, 0), Block::hard(q, "Q", 2, 2, 0)];
    blocks.sort_by_key(|b| b.id);
    build(
        GridDims::new(8, 8, 1),
        blocks,
        &[(0, 0)],
        vec![
            vec![Pin::Block(p), Pin::Terminal(0)],
            vec![Pin::Block(p), Pin::Terminal(0)],
            vec![Pin::Block(p), Pin::Block(q)],
        ],
        ConstraintSet::default(),
    )
}

#[test]
fn annealing_finds_the_better_order() {
    let task = TaskProfile::task(2).unwrap();
    let cost_of = |first_is_p| {
        let c = order_instance(first_is_p);
        let cfg = SolverConfig {
            hpwl_baseline: Some(1.0),
            ..greedy()
        };
        greedy_place(c, &task, &cfg).unwrap().cost(&task.weights)
    };
    let (p_first, q_first) = (cost_of(true), cost_of(false));
    assert!(p_first < q_first, "{p_first} vs {q_first}");

    let mut cfg = sa(100, 7);
    cfg.hpwl_baseline = Some(1.0);
    let r = sa_place(order_instance(false), &task, &cfg).unwrap();
    assert_eq!(r.curve[0], q_first);
    assert!(r.best_cost() <= p_first, "{} vs {p_first}", r.best_cost());
}

#[test]
fn random_is_seeded_and_sound() {
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
        vec![
            Block::hard(0, "A", 2, 2, 0),
            Block::soft(1, "B", 6, 0.5, 2.0, 0),
        ],
        &[(7, 3)],
        vec![vec![Pin::Block(0), Pin::Block(1)]],
        cs,
    );
    let task = TaskProfile::task(1).unwrap();
    for seed in 0..100 {
        let s = random_place(c.clone(), &task, seed).unwrap();
        assert_eq!(total_overlap(&s.state), 0);
        if s.summary.relaxations.is_empty() {
            assert_eq!(
                binding_distance(&s.state, &c.constraints().boundary[0]).unwrap(),
                0
            );
        }
        let again = random_place(c.clone(), &task, seed).unwrap();
        assert_eq!(s.placements(), again.placements());
    }
    let layouts: std::collections::BTreeSet<_> = (0..20)
        .map(|seed| {
            format!(
                "{:?}",
                random_place(c.clone(), &task, seed).unwrap().placements()
            )
        })
        .collect();
    assert!(layouts.len() > 1);
}

#[test]
fn greedy_is_deterministic() {
    let c = n10(5);
    let task = TaskProfile::task(3).unwrap();
    let a = greedy_place(c.clone(), &task, &greedy()).unwrap();
    let b = greedy_place(c, &task, &greedy()).unwrap();
    assert_eq!(a.placements(), b.placements());
    assert_eq!(a.trace, b.trace);
}

#[test]
fn unrelaxed_runs_satisfy_the_boundary_rule() {
    let task = TaskProfile::task(1).unwrap();
    let mut checked = 0;
    for seed in 0..5 {
        let c = n10(seed);
        for kind in [SolverKind::Greedy, SolverKind::Random] {
            let s = solve(c.clone(), &task, &SolverConfig::new(kind, seed)).unwrap();
            assert_eq!(total_overlap(&s.state), 0);
            assert!(s.placements().iter().all(|(_, p)| p.in_bounds(c.dims())));
            if s.summary.relaxations.is_empty() {
                let sat = satisfaction_counts(&s.state, &task).unwrap();
                assert!(sat.boundary.all_satisfied(), "{sat:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn bound_blocks_keep_the_terminal_rule_until_it_is_dropped() {
    let task = TaskProfile::task(3).unwrap();
    for seed in 0..5 {
        let c = n10(seed);
        let s = greedy_place(c.clone(), &task, &greedy()).unwrap();
        assert_eq!(total_overlap(&s.state), 0);
        for step in &s.trace.steps {
            if let Some(b) = c.binding_of(step.block) {
                if step.rung < Rung::DroppedTerminal {
                    assert_eq!(binding_distance(&s.state, b).unwrap(), 0);
                }
            }
        }
    }
}

#[test]
fn annealing_curve_never_rises() {
    let c = n10(2);
    let task = TaskProfile::task(2).unwrap();
    let r = sa_place(c.clone(), &task, &sa(60, 2)).unwrap();
    assert_eq!(r.curve.len(), 60);
    assert!(r.curve.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(r.best_cost(), r.solution.cost(&task.weights));
    let g = greedy_place(c, &task, &greedy()).unwrap();
    assert!(r.best_cost() <= g.cost(&task.weights));
}

#[test]
fn invalid_configs_are_rejected() {
    let c = n10(0);
    let task = TaskProfile::task(1).unwrap();
    let mut cfg = greedy();
    cfg.ar_candidates = 0;
    assert!(greedy_place(c.clone(), &task, &cfg).is_err());
    let mut cfg = sa(0, 0);
    assert!(sa_place(c.clone(), &task, &cfg).is_err());
    cfg.anneal.iterations = 5;
    cfg.anneal.cooling = 1.0;
    assert!(sa_place(c, &task, &cfg).is_err());
}
