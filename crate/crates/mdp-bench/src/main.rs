//! Benchmark harness for the mdp-reach solvers: solve ASCII grid maps,
//! dump convergence traces and policies, export reachability-landscape
//! heatmaps, tabulate solver comparisons, and sweep the MFPT period.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mdp_reach::gridworld::{build_mdp_2d, build_mdp_3d, parse_grid, GridMap, NoiseModel};
use mdp_reach::solvers::{mfpt_pi_observed, mfpt_vi_observed};
use mdp_reach::{
    Accuracy, Mdp, ReachabilityLandscape, SolveResult, SolverConfig, SolverKind,
};

use mdp_bench::output::{
    ms, policy_hash, write_landscape_pgms, write_policy_csv, write_trace_csv,
    write_trajectory_csv,
};

#[derive(Parser)]
#[command(
    name = "mdp-bench",
    version,
    about = "Solve grid-world MDPs and benchmark the six solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one map with one solver; write trace, policy, and rollout files.
    Solve(SolveArgs),
    /// Solve with an MFPT solver and export each recomputed landscape as PGM.
    Landscape(LandscapeArgs),
    /// Run a solver set over a map set and emit a benchmark CSV.
    Bench(BenchArgs),
    /// Run mfpt-vi once per MFPT period value and emit a CSV.
    SweepFrequency(SweepArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Discount factor.
    #[arg(long, default_value_t = 0.95)]
    gamma: f64,
    /// Probability mass diverted from the intended move.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Reward on entering a goal cell.
    #[arg(long, default_value_t = 100.0)]
    goal_reward: f64,
    /// Reward on entering an obstacle cell.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    obstacle_penalty: f64,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Convergence threshold on the per-iteration delta.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Iterations between landscape recomputations (defaults: 3 for
    /// mfpt-vi, 1 for mfpt-pi).
    #[arg(long)]
    mfpt_period: Option<usize>,
    /// Solve landscapes with Gauss-Seidel at this tolerance instead of LU.
    #[arg(long)]
    mfpt_tol: Option<f64>,
    /// Iteration safety cap.
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
}

impl ConfigArgs {
    fn to_config(&self, solver: SolverKind) -> SolverConfig {
        let default_period = if solver == SolverKind::MfptPi { 1 } else { 3 };
        SolverConfig {
            epsilon: self.epsilon,
            mfpt_period: self.mfpt_period.unwrap_or(default_period),
            mfpt_accuracy: match self.mfpt_tol {
                Some(tol) => Accuracy::Fast { tol },
                None => Accuracy::Direct,
            },
            max_iterations: self.max_iters,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the ASCII map.
    #[arg(long)]
    map: PathBuf,
    /// One of: vi, vi-ps, mfpt-vi, pi, pi-le, mfpt-pi.
    #[arg(long)]
    solver: SolverKind,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Write the final policy as CSV here.
    #[arg(long)]
    policy_out: Option<PathBuf>,
    /// Roll out the final policy from the map's start cell into this CSV.
    #[arg(long)]
    rollout_out: Option<PathBuf>,
    /// RNG seed for the rollout.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Transition cap for the rollout.
    #[arg(long, default_value_t = 10_000)]
    max_rollout_steps: usize,
}

#[derive(Args)]
struct LandscapeArgs {
    /// Path to the ASCII map.
    #[arg(long)]
    map: PathBuf,
    /// mfpt-vi or mfpt-pi.
    #[arg(long, default_value = "mfpt-pi")]
    solver: SolverKind,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Path prefix for the PGM files.
    #[arg(long)]
    landscape_out: String,
    /// Landscape values at or above this clip render as white.
    #[arg(long, default_value_t = 100.0)]
    clip: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Map files; one benchmark row per (map, solver) pair.
    #[arg(long, required = true, num_args = 1..)]
    maps: Vec<PathBuf>,
    /// Solvers to run (default: all six).
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    solvers: Option<Vec<SolverKind>>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Path to the ASCII map.
    #[arg(long)]
    map: PathBuf,
    /// MFPT period values to benchmark.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    p_values: Vec<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(converged) => {
            if !converged {
                std::process::exit(1);
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Landscape(args) => cmd_landscape(args),
        Command::Bench(args) => cmd_bench(args),
        Command::SweepFrequency(args) => cmd_sweep_frequency(args),
    }
}

fn load_model(map: &Path, model: &ModelArgs) -> Result<(GridMap, Mdp)> {
    let text = std::fs::read_to_string(map)
        .with_context(|| format!("reading map {}", map.display()))?;
    let grid = parse_grid(&text).with_context(|| format!("parsing map {}", map.display()))?;
    let noise = NoiseModel::new(model.eta).context("invalid --eta")?;
    let mdp = if grid.is_3d() {
        build_mdp_3d(
            &grid,
            noise,
            model.goal_reward,
            model.obstacle_penalty,
            model.gamma,
        )
    } else {
        build_mdp_2d(
            &grid,
            noise,
            model.goal_reward,
            model.obstacle_penalty,
            model.gamma,
        )
    }
    .with_context(|| format!("building model from {}", map.display()))?;
    Ok((grid, mdp))
}

fn summary_line(solver: SolverKind, mdp: &Mdp, result: &SolveResult, total_ms: f64) -> String {
    format!(
        "solver={} states={} iterations={} total_ms={:.3} converged={} policy_hash={:016x}",
        solver,
        mdp.num_states(),
        result.trace.num_iterations(),
        total_ms,
        result.trace.converged(),
        policy_hash(&result.policy),
    )
}

fn cmd_solve(args: SolveArgs) -> Result<bool> {
    let (grid, mdp) = load_model(&args.map, &args.model)?;
    let cfg = args.config.to_config(args.solver);
    let started = Instant::now();
    let result = args.solver.solve(&mdp, &cfg)?;
    let total_ms = ms(started.elapsed());
    if let Some(path) = &args.trace_out {
        write_trace_csv(path, &result.trace)?;
    }
    if let Some(path) = &args.policy_out {
        write_policy_csv(path, &result.policy)?;
    }
    if let Some(path) = &args.rollout_out {
        let start = grid
            .start()
            .context("map has no start cell for the rollout")?;
        let trajectory = mdp_reach::gridworld::rollout_policy(
            &mdp,
            &result.policy,
            start,
            args.max_rollout_steps,
            args.seed,
        );
        write_trajectory_csv(path, &grid, &trajectory)?;
    }
    print_out(&format!("{}\n", summary_line(args.solver, &mdp, &result, total_ms)));
    Ok(result.trace.converged())
}

fn cmd_landscape(args: LandscapeArgs) -> Result<bool> {
    if !args.solver.is_mfpt_family() {
        bail!(
            "--solver {} records no landscapes (use mfpt-vi or mfpt-pi)",
            args.solver
        );
    }
    if !args.clip.is_finite() || args.clip <= 0.0 {
        bail!("--clip must be positive");
    }
    let (grid, mdp) = load_model(&args.map, &args.model)?;
    let cfg = args.config.to_config(args.solver);
    let mut snapshots: Vec<(usize, ReachabilityLandscape)> = Vec::new();
    let started = Instant::now();
    let result = {
        let mut on_landscape = |iteration: usize, landscape: &ReachabilityLandscape| {
            snapshots.push((iteration, landscape.clone()));
        };
        match args.solver {
            SolverKind::MfptVi => mfpt_vi_observed(&mdp, &cfg, &mut on_landscape)?,
            SolverKind::MfptPi => mfpt_pi_observed(&mdp, &cfg, &mut on_landscape)?,
            _ => unreachable!(),
        }
    };
    let total_ms = ms(started.elapsed());
    let mut written = 0usize;
    for (seq, (_, landscape)) in snapshots.iter().enumerate() {
        written +=
            write_landscape_pgms(&args.landscape_out, seq, &grid, landscape, args.clip)?.len();
    }
    print_out(&format!(
        "{}\nlandscapes={} files={} prefix={}\n",
        summary_line(args.solver, &mdp, &result, total_ms),
        snapshots.len(),
        written,
        args.landscape_out
    ));
    Ok(result.trace.converged())
}

/// Header of the benchmark CSV.
const BENCH_HEADER: &str =
    "map,states,solver,iterations,converged,total_ms,bellman_ms,pe_ms,pi_ms,mfpt_ms,sort_ms";

fn cmd_bench(args: BenchArgs) -> Result<bool> {
    let solvers = args.solvers.clone().unwrap_or_else(|| SolverKind::ALL.to_vec());
    let mut models = Vec::new();
    for map in &args.maps {
        let (_, mdp) = load_model(map, &args.model)?;
        let name = map
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| map.display().to_string());
        models.push((name, mdp));
    }
    // One cell per (map, solver); cells run in parallel and rows are
    // emitted in deterministic map-major order.
    let cells: Vec<(usize, &(String, Mdp), SolverKind)> = models
        .iter()
        .enumerate()
        .flat_map(|(i, model)| {
            solvers
                .iter()
                .enumerate()
                .map(move |(j, solver)| (i * SolverKind::ALL.len() + j, model, *solver))
        })
        .collect();
    let mut rows: Vec<(usize, String, bool)> = cells
        .par_iter()
        .map(|(ord, (name, mdp), solver)| {
            let cfg = args.config.to_config(*solver);
            let started = Instant::now();
            let result = solver.solve(mdp, &cfg)?;
            let total_ms = ms(started.elapsed());
            let totals = result.trace.component_totals();
            let row = format!(
                "{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
                name,
                mdp.num_states(),
                solver,
                result.trace.num_iterations(),
                result.trace.converged(),
                total_ms,
                ms(totals.bellman),
                ms(totals.policy_evaluation),
                ms(totals.policy_improvement),
                ms(totals.mfpt),
                ms(totals.sort),
            );
            Ok((*ord, row, result.trace.converged()))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|(ord, _, _)| *ord);

    let mut table = String::from(BENCH_HEADER);
    table.push('\n');
    for (_, row, _) in &rows {
        table.push_str(row);
        table.push('\n');
    }
    emit(args.out.as_deref(), &table)?;
    Ok(rows.iter().all(|(_, _, converged)| *converged))
}

fn cmd_sweep_frequency(args: SweepArgs) -> Result<bool> {
    if args.p_values.is_empty() || args.p_values.contains(&0) {
        bail!("--p-values must be positive integers");
    }
    let (_, mdp) = load_model(&args.map, &args.model)?;
    let mut table = String::from("p,iterations,total_ms,policy_hash\n");
    let mut best: Option<(usize, f64)> = None;
    let mut all_converged = true;
    for &p in &args.p_values {
        let cfg = SolverConfig {
            mfpt_period: p,
            ..args.config.to_config(SolverKind::MfptVi)
        };
        let started = Instant::now();
        let result = mdp_reach::mfpt_vi(&mdp, &cfg)?;
        let total_ms = ms(started.elapsed());
        all_converged &= result.trace.converged();
        writeln!(
            table,
            "{},{},{:.3},{:016x}",
            p,
            result.trace.num_iterations(),
            total_ms,
            policy_hash(&result.policy)
        )?;
        if best.map(|(_, t)| total_ms < t).unwrap_or(true) {
            best = Some((p, total_ms));
        }
    }
    emit(args.out.as_deref(), &table)?;
    if let Some((p, t)) = best {
        print_out(&format!("best_p={p} best_total_ms={t:.3}\n"));
    }
    Ok(all_converged)
}

fn emit(out: Option<&Path>, table: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, table)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => print_out(table),
    }
    Ok(())
}

// stdout may be a pipe that closes early (e.g. piping into `head`); that is
// not an error worth panicking over.
fn print_out(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout();
    if stdout.write_all(text.as_bytes()).is_err() {
        std::process::exit(0);
    }
    let _ = stdout.flush();
}
