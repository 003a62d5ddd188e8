//! The `fp3d` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 infeasible or invalid instance, 3 I/O
//! and parse errors. Diagnostics go to standard error as
//! `error[<kind>]: <message>`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::env::{
    episode_summary, Action, Env, EpisodeSummary, EpisodeTrace, OrderPolicy, ResetOptions,
};
use crate::error::{Error, Result};
use crate::io::{
    gen_constraints, load_circuit, mask_csv, mask_pgm, render_svg, save_circuit, synth_instance,
    synthesize, write_file, ConstraintCounts, ConstraintFile, PlacementFile, Report, SvgOptions,
    SynthSpec,
};
use crate::masks::MaskEngine;
use crate::model::{Circuit, FloorplanState, GridDims, TaskProfile, Thresholds, Weights};
use crate::solvers::{self, hpwl_baseline, SolverConfig, SolverKind};

#[derive(Parser, Debug)]
#[command(name = "fp3d", version, about = "Rule-aware 3D floorplanning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Place one circuit and write the layout, a report and the step trace.
    Solve(SolveArgs),
    /// Recompute the report of a placement file.
    Eval(EvalArgs),
    /// Dump the rule masks of a block after the first K steps.
    Masks(MasksArgs),
    /// Sample a constraint file for a circuit.
    GenConstraints(GenArgs),
    /// Draw a placement file as SVG.
    Render(RenderArgs),
    /// Seed sweep over circuits, tasks and solvers.
    Bench(BenchArgs),
    /// Write a synthetic ten-block circuit as JSON.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct CircuitArgs {
    /// Bookshelf directory (`.blocks`, `.nets`, `.pl`) or JSON circuit.
    #[arg(long)]
    circuit: PathBuf,
    /// Constraint file replacing the circuit's own constraints.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Grid used when quantizing bookshelf input.
    #[arg(long, default_value = "128x128x2")]
    dims: GridDims,
    /// Target area utilization for bookshelf input.
    #[arg(long)]
    utilization: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct TaskArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    task: u8,
    /// Reward weights `aln,overlap,hpwl,adjacency,distance`.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<Weights>,
    /// Mask thresholds `terminal,grouping,alignment_frac`.
    #[arg(long, value_parser = parse_thresholds)]
    thresholds: Option<Thresholds>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long, default_value = "greedy", value_parser = parse_solver)]
    solver: SolverKind,
    /// Aspect-ratio candidates per soft block.
    #[arg(long, default_value_t = solvers::DEFAULT_AR_CANDIDATES)]
    ar_candidates: usize,
    /// Annealing budget in decoded layouts.
    #[arg(long)]
    iterations: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[command(flatten)]
    task: TaskArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[command(flatten)]
    task: TaskArgs,
    #[arg(long)]
    placement: PathBuf,
    /// HPWL normalizer; a greedy rollout when absent.
    #[arg(long)]
    hpwl_baseline: Option<f64>,
    /// Write JSON instead of CSV.
    #[arg(long)]
    json: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MasksArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[command(flatten)]
    task: TaskArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Block id or name.
    #[arg(long)]
    block: String,
    /// Steps of the solver's trajectory to replay first.
    #[arg(long, default_value_t = 0)]
    at_step: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Constrained block counts `alignment,boundary,grouping`.
    #[arg(long, default_value = "10,5,10", value_parser = parse_counts)]
    counts: ConstraintCounts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long)]
    placement: PathBuf,
    /// Pixels per grid cell.
    #[arg(long, default_value_t = 4.0)]
    scale: f64,
    #[arg(long)]
    no_terminals: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Circuits to sweep; may be repeated.
    #[arg(long)]
    circuit: Vec<PathBuf>,
    /// Constraint file applied to every `--circuit`.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Also sweep this many synthetic ten-block instances.
    #[arg(long, default_value_t = 0)]
    synthetic: usize,
    #[arg(long, default_value = "128x128x2")]
    dims: GridDims,
    #[arg(long)]
    utilization: Option<f64>,
    #[arg(long, default_value = "1,2,3", value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=3))]
    tasks: Vec<u8>,
    #[arg(long, default_value = "greedy,sa,random", value_delimiter = ',', value_parser = parse_solver)]
    solvers: Vec<SolverKind>,
    /// Seeds `0..N`.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, value_parser = parse_weights)]
    weights: Option<Weights>,
    #[arg(long, value_parser = parse_thresholds)]
    thresholds: Option<Thresholds>,
    #[arg(long, default_value_t = solvers::DEFAULT_AR_CANDIDATES)]
    ar_candidates: usize,
    #[arg(long)]
    iterations: Option<usize>,
    /// Add wall-clock times to the report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave the circuit unconstrained.
    #[arg(long)]
    bare: bool,
    #[arg(long)]
    out: PathBuf,
}

fn numbers<const N: usize>(s: &str, what: &str) -> std::result::Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(format!("{what} must be finite and non-negative"));
    }
    v.try_into()
        .map_err(|_| format!("expected {N} comma-separated {what}"))
}

fn parse_weights(s: &str) -> std::result::Result<Weights, String> {
    let [alignment, overlap, hpwl, adjacency, distance] = numbers::<5>(s, "weights")?;
    Ok(Weights {
        alignment,
        overlap,
        hpwl,
        adjacency,
        distance,
    })
}

fn parse_thresholds(s: &str) -> std::result::Result<Thresholds, String> {
    let [terminal, grouping, alignment_frac] = numbers::<3>(s, "thresholds")?;
    Ok(Thresholds {
        terminal,
        grouping,
        alignment_frac,
    })
}

fn parse_counts(s: &str) -> std::result::Result<ConstraintCounts, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{p}` is not a count"))
        })
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [a, b, g] => Ok(ConstraintCounts::new(a, b, g)),
        _ => Err("expected `alignment,boundary,grouping`".into()),
    }
}

fn parse_solver(s: &str) -> std::result::Result<SolverKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit code for an error: 3 for unreadable or malformed input, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. }
        | Error::Parse { .. }
        | Error::Json(_)
        | Error::Csv(_)
        | Error::UnknownSymbol(_) => 3,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    let text = e.render().to_string();
                    eprint!(
                        "error[usage]: {}",
                        text.strip_prefix("error: ").unwrap_or(&text)
                    );
                    1
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Solve(a) => solve(a),
        Command::Eval(a) => eval(a),
        Command::Masks(a) => masks(a),
        Command::GenConstraints(a) => gen(a),
        Command::Render(a) => render(a),
        Command::Bench(a) => bench(a),
        Command::Synth(a) => synth(a),
    }
}

fn load(args: &CircuitArgs) -> Result<Arc<Circuit>> {
    load_with(
        &args.circuit,
        args.constraints.as_deref(),
        args.dims,
        args.utilization,
    )
}

fn load_with(
    path: &Path,
    constraints: Option<&Path>,
    dims: GridDims,
    util: Option<f64>,
) -> Result<Arc<Circuit>> {
    let circuit = load_circuit(path, dims, util)?;
    Ok(Arc::new(match constraints {
        Some(p) => ConstraintFile::load(p)?.apply(&circuit)?,
        None => circuit,
    }))
}

fn profile(
    id: u8,
    weights: Option<Weights>,
    thresholds: Option<Thresholds>,
) -> Result<TaskProfile> {
    let mut task = TaskProfile::task(id)?;
    if let Some(w) = weights {
        task.weights = w;
    }
    if let Some(t) = thresholds {
        task.thresholds = t;
    }
    Ok(task)
}

fn task_of(args: &TaskArgs) -> Result<TaskProfile> {
    profile(args.task, args.weights, args.thresholds)
}

fn config_of(args: &SolverArgs, seed: u64) -> Result<SolverConfig> {
    let mut config = SolverConfig::new(args.solver, seed);
    config.ar_candidates = args.ar_candidates;
    if let Some(n) = args.iterations {
        config.anneal.iterations = n;
    }
    config.validate()?;
    Ok(config)
}

fn solve(a: SolveArgs) -> Result<()> {
    let circuit = load(&a.circuit)?;
    let task = task_of(&a.task)?;
    let config = config_of(&a.solver, a.seed)?;
    let sol = solvers::solve(circuit, &task, &config)?;
    let solver = config.kind.to_string();

    let placement = PlacementFile::from_state(&sol.state, task.id, &solver, a.seed);
    write_file(&a.out.join("placement.json"), placement.to_json()?)?;
    let report = Report::build(std::slice::from_ref(&sol.summary), false)?;
    write_file(&a.out.join("report.csv"), report.to_csv()?)?;
    let mut trace = Vec::new();
    sol.trace.write_jsonl(&mut trace, &task.weights)?;
    write_file(&a.out.join("trace.jsonl"), trace)?;

    let s = &sol.summary;
    println!(
        "{} task {} {} seed {}: hpwl {:.1} overlap {} aln {:.3} d {:.3} l {:.3} relaxed {}",
        s.circuit,
        s.task,
        s.solver,
        s.seed,
        s.raw.hpwl,
        s.raw.overlap,
        s.normalized.aln,
        s.normalized.distance,
        s.normalized.adjacency,
        s.relaxations.len()
    );
    Ok(())
}

/// Summary of a restored layout; relaxations are unknown and left empty.
fn summarize(
    state: &FloorplanState,
    task: &TaskProfile,
    header: &crate::io::PlacementHeader,
    baseline: f64,
) -> Result<EpisodeSummary> {
    let mut trace = EpisodeTrace::new(state.circuit().name(), task.id, header.seed, baseline);
    trace.terminal = true;
    episode_summary(state, &trace, task, &header.solver, 0.0)
}

fn eval(a: EvalArgs) -> Result<()> {
    let circuit = load(&a.circuit)?;
    let task = task_of(&a.task)?;
    let file = PlacementFile::load(&a.placement)?;
    let state = file.restore(circuit.clone(), &task)?;
    let baseline = match a.hpwl_baseline {
        Some(b) => b,
        None => {
            let fresh = FloorplanState::new(circuit.clone(), &task, None)?;
            hpwl_baseline(&MaskEngine::new(&circuit, &task), &fresh)
        }
    };
    let summary = summarize(&state, &task, &file.header, baseline)?;
    let report = Report::build(&[summary], false)?;
    let text = if a.json {
        report.to_json()?
    } else {
        report.to_csv()?
    };
    match a.out {
        Some(p) => write_file(&p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn block_id(circuit: &Circuit, s: &str) -> Result<usize> {
    circuit
        .block_id(s)
        .or_else(|| {
            s.parse::<usize>()
                .ok()
                .filter(|&i| i < circuit.blocks().len())
        })
        .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
}

fn masks(a: MasksArgs) -> Result<()> {
    let circuit = load(&a.circuit)?;
    let task = task_of(&a.task)?;
    let block = block_id(&circuit, &a.block)?;
    let config = config_of(&a.solver, a.seed)?;
    let sol = solvers::solve(circuit.clone(), &task, &config)?;
    let steps = &sol.trace.steps;
    if a.at_step > steps.len() {
        return Err(Error::Invalid(format!(
            "the episode has only {} steps",
            steps.len()
        )));
    }

    let mut env = Env::new(circuit, task)?;
    env.reset(ResetOptions {
        order: OrderPolicy::Given(sol.state.order().to_vec()),
        seed: a.seed,
        first_ar: steps.first().and_then(|s| s.ratio),
        hpwl_baseline: Some(sol.trace.hpwl_baseline),
    })?;
    for (i, s) in steps[..a.at_step].iter().enumerate() {
        env.step(Action {
            ar_next: steps.get(i + 1).and_then(|n| n.ratio),
            ..s.action
        })?;
    }
    let bm = if env.state().current_block() == Some(block) {
        env.masks().cloned().ok_or(Error::EpisodeTerminal)?
    } else {
        let mut state = env.state().clone();
        state.unplace(block);
        env.engine().block_masks(&state, block)?
    };

    let as_f64 = |g: &crate::grid::Grid<bool>| g.map(|&b| f64::from(u8::from(b)));
    let mut dumps = vec![
        ("wire".to_string(), bm.wire.values.clone()),
        ("position".to_string(), as_f64(&bm.position)),
        ("availability".to_string(), as_f64(&bm.availability)),
    ];
    for (name, m) in [
        ("terminal", &bm.terminal),
        ("adjacent-block", &bm.grouping),
        ("alignment", &bm.alignment),
    ] {
        if let Some(m) = m {
            dumps.push((name.to_string(), m.values.clone()));
        }
    }
    for m in bm.plugins.iter().flatten() {
        dumps.push((m.tag.to_string(), m.values.clone()));
    }
    for (name, grid) in &dumps {
        write_file(&a.out.join(format!("{name}.csv")), mask_csv(grid))?;
        write_file(&a.out.join(format!("{name}.pgm")), mask_pgm(grid))?;
    }
    let names: Vec<&str> = dumps.iter().map(|(n, _)| n.as_str()).collect();
    println!(
        "block {block} after {} steps, rung {:?}: {}",
        a.at_step,
        bm.rung,
        names.join(" ")
    );
    Ok(())
}

fn gen(a: GenArgs) -> Result<()> {
    let circuit = load(&a.circuit)?;
    let text = gen_constraints(&circuit, a.counts, a.seed)?.to_json()?;
    match a.out {
        Some(p) => write_file(&p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(a: RenderArgs) -> Result<()> {
    let circuit = load(&a.circuit)?;
    let file = PlacementFile::load(&a.placement)?;
    let task = TaskProfile::task(file.header.task)
        .unwrap_or_else(|_| TaskProfile::custom(Default::default()));
    let state = file.restore(circuit, &task)?;
    let opts = SvgOptions {
        scale: a.scale,
        terminals: !a.no_terminals,
        ..SvgOptions::default()
    };
    write_file(&a.out, render_svg(&state, &opts))
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut circuits = Vec::new();
    for p in &a.circuit {
        circuits.push(load_with(
            p,
            a.constraints.as_deref(),
            a.dims,
            a.utilization,
        )?);
    }
    for k in 0..a.synthetic {
        let spec = SynthSpec {
            name: format!("n10-synth-{k}"),
            dims: a.dims,
            utilization: a.utilization.unwrap_or(SynthSpec::n10_like().utilization),
            ..SynthSpec::n10_like()
        };
        circuits.push(Arc::new(synth_instance(
            &spec,
            SynthSpec::N10_COUNTS,
            k as u64,
        )?));
    }
    if circuits.is_empty() {
        return Err(Error::Empty(
            "no circuits to sweep; pass --circuit or --synthetic",
        ));
    }
    let tasks: Vec<TaskProfile> = a
        .tasks
        .iter()
        .map(|&t| profile(t, a.weights, a.thresholds))
        .collect::<Result<_>>()?;

    // one normalizer per (circuit, task), shared by every solver and seed
    let pairs: Vec<(usize, usize)> = (0..circuits.len())
        .flat_map(|c| (0..tasks.len()).map(move |t| (c, t)))
        .collect();
    let baselines: Vec<f64> = pairs
        .par_iter()
        .map(|&(c, t)| {
            let fresh = FloorplanState::new(circuits[c].clone(), &tasks[t], None)?;
            Ok(hpwl_baseline(
                &MaskEngine::new(&circuits[c], &tasks[t]),
                &fresh,
            ))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, SolverKind, u64)> = (0..pairs.len())
        .flat_map(|i| {
            a.solvers
                .iter()
                .flat_map(move |&s| (0..a.seeds).map(move |seed| (i, s, seed)))
        })
        .collect();
    let results: Vec<Result<(EpisodeSummary, PlacementFile)>> = cells
        .par_iter()
        .map(|&(i, kind, seed)| {
            let (c, t) = pairs[i];
            let mut config = SolverConfig::new(kind, seed);
            config.ar_candidates = a.ar_candidates;
            config.hpwl_baseline = Some(baselines[i]);
            if let Some(n) = a.iterations {
                config.anneal.iterations = n;
            }
            config.validate()?;
            let sol = solvers::solve(circuits[c].clone(), &tasks[t], &config)?;
            let file = PlacementFile::from_state(&sol.state, tasks[t].id, &kind.to_string(), seed);
            Ok((sol.summary, file))
        })
        .collect();

    let mut summaries = Vec::new();
    let mut failed = None;
    for ((i, kind, seed), r) in cells.iter().zip(results) {
        let (c, t) = pairs[*i];
        match r {
            Ok((summary, file)) => {
                let name = format!(
                    "{}_t{}_{}_s{}.json",
                    circuits[c].name(),
                    tasks[t].id,
                    kind,
                    seed
                );
                write_file(&a.out.join("placements").join(name), file.to_json()?)?;
                summaries.push(summary);
            }
            Err(e) => {
                eprintln!(
                    "warning[{}]: {} task {} {kind} seed {seed}: {e}",
                    e.kind(),
                    circuits[c].name(),
                    tasks[t].id
                );
                failed.get_or_insert(e);
            }
        }
    }
    if !summaries.is_empty() {
        let report = Report::build(&summaries, a.timing)?;
        write_file(&a.out.join("report.csv"), report.to_csv()?)?;
        write_file(&a.out.join("report.json"), report.to_json()?)?;
    }
    println!(
        "{} runs, {} failed",
        cells.len(),
        cells.len() - summaries.len()
    );
    match failed {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        name: format!("n10-synth-{}", a.seed),
        ..SynthSpec::n10_like()
    };
    let circuit = if a.bare {
        synthesize(&spec, a.seed)?
    } else {
        synth_instance(&spec, SynthSpec::N10_COUNTS, a.seed)?
    };
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    save_circuit(&circuit, &a.out)
}
