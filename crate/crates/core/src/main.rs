use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use coop_planner::bench::{self, BenchConfig, SuiteSpec};
use coop_planner::graph::{generate_grid_instance, io};
use coop_planner::joint::{load_solution, save_solution, validate_solution_with, SeparationMode};
use coop_planner::planner::{Algorithm, Budget, JointMetric, PlannerConfig, PlanningContext};
use coop_planner::util::write_atomic;

#[derive(Parser)]
#[command(name = "coop-planner", version, about = "Cooperative pathfinding: instance generation, planning, validation and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random grid-world instance.
    Generate(GenerateArgs),
    /// Plan a joint solution for an instance.
    Solve(SolveArgs),
    /// Check an instance file, and optionally a solution against it.
    Validate(ValidateArgs),
    /// Run planners over a generated instance suite.
    Bench(BenchArgs),
    /// Build curves, tables and figures from benchmark records.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Grid side length in waypoints.
    #[arg(long)]
    size: u32,
    #[arg(long)]
    agents: usize,
    /// Fraction of grid vertices removed as obstacles.
    #[arg(long, default_value_t = 0.1)]
    obstacle_ratio: f64,
    /// Minimum inter-agent distance in meters.
    #[arg(long, default_value_t = 0.8)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Ja,
    Marrtstar,
    Ismarrtstar,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Ja => Algorithm::Ja,
            AlgoArg::Marrtstar => Algorithm::MaRrtStar,
            AlgoArg::Ismarrtstar => Algorithm::IsMaRrtStar,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Sum,
    Max,
}

#[derive(Args)]
#[group(multiple = false)]
struct BudgetArgs {
    /// Wall-clock budget per run, in seconds [default: 2.5].
    #[arg(long)]
    time_budget: Option<f64>,
    /// Iteration budget per run (RRT* samples or A* expansions).
    #[arg(long)]
    iter_budget: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        match (self.time_budget, self.iter_budget) {
            (_, Some(k)) => Budget::Iterations(k),
            (Some(s), None) => Budget::Seconds(s),
            (None, None) => Budget::Seconds(2.5),
        }
    }
}

#[derive(Args)]
struct PlannerArgs {
    #[command(flatten)]
    budget: BudgetArgs,
    /// Greedy extension length in joint steps.
    #[arg(long, default_value_t = 10)]
    eta: u32,
    /// Near-radius scale.
    #[arg(long, default_value_t = 20.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    goal_bias: f64,
    #[arg(long, default_value_t = 0.5)]
    informed_bias: f64,
    /// Tube radius around single-agent optimal paths, in meters.
    #[arg(long, default_value_t = 2.0)]
    informed_radius: f64,
    /// Joint distance for nearest and near queries.
    #[arg(long, value_enum, default_value_t = MetricArg::Sum)]
    metric: MetricArg,
    /// Alternative joint moves a greedy step may try after a conflict.
    #[arg(long, default_value_t = 0)]
    greedy_alternatives: u32,
    /// Check separation only at timestep boundaries (permits swaps; for comparison only).
    #[arg(long)]
    discrete_separation: bool,
    /// Verify search-tree invariants every this many iterations.
    #[arg(long)]
    check_every: Option<u64>,
}

impl PlannerArgs {
    fn config(&self, rng_seed: u64) -> PlannerConfig {
        PlannerConfig {
            eta: self.eta,
            gamma: self.gamma,
            goal_bias: self.goal_bias,
            informed_bias: self.informed_bias,
            informed_radius: self.informed_radius,
            rng_seed,
            budget: self.budget.budget(),
            metric: match self.metric {
                MetricArg::Sum => JointMetric::Sum,
                MetricArg::Max => JointMetric::Max,
            },
            greedy_alternatives: self.greedy_alternatives,
            separation_mode: self.separation_mode(),
            check_every: self.check_every,
        }
    }

    fn separation_mode(&self) -> SeparationMode {
        if self.discrete_separation {
            SeparationMode::Discrete
        } else {
            SeparationMode::Continuous
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    planner: PlannerArgs,
    /// Solution file; printed to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Check separation only at timestep boundaries.
    #[arg(long)]
    discrete_separation: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid sizes, e.g. `10,30,50` or `10-12`.
    #[arg(long, default_value = "10,30,50", value_parser = parse_list)]
    sizes: Counts,
    /// Agent counts, e.g. `1-6` or `1,2,4`.
    #[arg(long, default_value = "1-6", value_parser = parse_list)]
    agent_counts: Counts,
    #[arg(long, default_value_t = 20)]
    per_cell: u32,
    /// Comma-separated algorithms to run.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ja,marrtstar,ismarrtstar")]
    algos: Vec<AlgoArg>,
    #[arg(long, default_value_t = 0.1)]
    obstacle_ratio: f64,
    #[arg(long, default_value_t = 0.8)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// Planner RNG seed, mixed with each run's instance seed and algorithm.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent runs; use 1 for publishable timings.
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    #[command(flatten)]
    planner: PlannerArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
struct Counts(Vec<u32>);

/// `a,b,c` with optional inclusive ranges `lo-hi`.
fn parse_list(s: &str) -> Result<Counts, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u32 = lo.trim().parse().map_err(|e| format!("`{part}`: {e}"))?;
                let hi: u32 = hi.trim().parse().map_err(|e| format!("`{part}`: {e}"))?;
                if lo > hi {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|e| format!("`{part}`: {e}"))?),
        }
    }
    if out.is_empty() {
        return Err("expected at least one value".into());
    }
    Ok(Counts(out))
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let inst = generate_grid_instance(args.size, args.agents, args.obstacle_ratio, args.separation, args.seed)?;
    write(&args.out, &io::save_instance(&inst)?)?;
    eprintln!("wrote {} ({} agents, {}x{} grid)", args.out.display(), args.agents, args.size, args.size);
    Ok(())
}

fn solve(args: SolveArgs) -> anyhow::Result<()> {
    let inst = io::load_instance(&read(&args.instance)?).with_context(|| format!("loading {}", args.instance.display()))?;
    let algorithm: Algorithm = args.algo.into();
    let config = args.planner.config(args.seed);
    let ctx = PlanningContext::new(&inst)?;
    let result = algorithm.plan(&ctx, &config)?;
    for t in &result.solutions {
        eprintln!(
            "{:>9.4}s  iteration {:>8}  cost {}",
            t.elapsed.as_secs_f64(),
            t.iteration,
            t.solution.total_cost
        );
    }
    eprintln!("status {}, {} iterations, lower bound {}", result.status, result.iterations, ctx.lower_bound());
    let Some(best) = result.best() else {
        bail!("no solution found ({})", result.status);
    };
    let text = save_solution(&inst, &best.solution, algorithm.name())?;
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> anyhow::Result<()> {
    let inst = io::load_instance(&read(&args.instance)?).with_context(|| format!("loading {}", args.instance.display()))?;
    let Some(sol_path) = &args.solution else {
        eprintln!("instance valid: {} agents", inst.n_agents());
        return Ok(());
    };
    let sol = load_solution(&inst, &read(sol_path)?).with_context(|| format!("loading {}", sol_path.display()))?;
    let mode = if args.discrete_separation {
        SeparationMode::Discrete
    } else {
        SeparationMode::Continuous
    };
    let verdict = validate_solution_with(&inst, &sol, mode);
    if verdict.is_valid() {
        eprintln!("solution valid, cost {}", sol.total_cost);
        Ok(())
    } else {
        for v in verdict.violations() {
            eprintln!("violation: {v}");
        }
        bail!("solution invalid ({} violations)", verdict.violations().len())
    }
}

fn run_bench(args: BenchArgs) -> anyhow::Result<()> {
    let config = BenchConfig {
        suite: SuiteSpec {
            grid_sizes: args.sizes.0,
            agent_counts: args.agent_counts.0,
            instances_per_cell: args.per_cell,
            obstacle_ratio: args.obstacle_ratio,
            separation: args.separation,
            base_seed: args.base_seed,
        },
        algorithms: args.algos.into_iter().map(Algorithm::from).collect(),
        planner: args.planner.config(args.seed),
        parallelism: args.parallelism,
    };
    config.validate()?;
    if config.parallelism > 1 {
        if cfg!(feature = "parallel") {
            if matches!(config.planner.budget, Budget::Seconds(_)) {
                eprintln!("warning: timed runs with parallelism > 1 compete for cores; use --parallelism 1 for publishable timings");
            }
        } else {
            eprintln!("warning: built without the `parallel` feature; running sequentially");
        }
    }
    std::fs::create_dir_all(&args.out_dir)?;
    let suite = bench::build_suite(&config.suite)?;
    bench::save_suite(&suite, &args.out_dir.join("instances"))?;

    #[derive(serde::Serialize)]
    struct Snapshot<'a> {
        #[serde(flatten)]
        config: &'a BenchConfig,
        suite_id: String,
        config_digest: String,
        timing_boundary: &'a str,
    }
    let snapshot = Snapshot {
        config: &config,
        suite_id: config.suite.suite_id(),
        config_digest: bench::config_digest(&config),
        timing_boundary: bench::TIMING_BOUNDARY_NOTE,
    };
    write(&args.out_dir.join("run_config.json"), &(serde_json::to_string_pretty(&snapshot)? + "\n"))?;

    eprintln!(
        "running {} instances x {} algorithms, budget {}",
        suite.len(),
        config.algorithms.len(),
        config.planner.budget
    );
    let records = bench::run_benchmark(&suite, &config, Some(&args.out_dir.join("records.csv")))?;
    for &a in &config.algorithms {
        let mine = records.iter().filter(|r| r.algorithm == a);
        let (runs, solved) = mine.fold((0, 0), |(n, s), r| (n + 1, s + r.solved() as usize));
        eprintln!("{a:>12}: solved {solved}/{runs}");
    }
    Ok(())
}

fn run_report(args: ReportArgs) -> anyhow::Result<()> {
    let records = bench::read_records(&args.records).with_context(|| format!("reading {}", args.records.display()))?;
    let summary = bench::report(&records, &args.out_dir)?;
    for s in &summary.algorithms {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}%"));
        eprintln!(
            "{:>12}: solved {}/{}, median suboptimality first {} best {} (n = {})",
            s.algorithm.name(),
            s.solved,
            s.runs,
            fmt(s.median_first_suboptimality_pct),
            fmt(s.median_best_suboptimality_pct),
            s.suboptimality_instances
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Validate(a) => validate(a),
        Command::Bench(a) => run_bench(a),
        Command::Report(a) => run_report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
