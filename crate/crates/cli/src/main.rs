//! `mgcbs` command-line front end.
//!
//! Exit codes: 0 ok, 1 usage or I/O error, 2 validation failure, 3 internal
//! invariant failure. `MGCBS_WORKERS` caps the worker pool used by
//! `bench --logic-only`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use mgcbs::graph::{load_instance, InstanceFile};
use mgcbs::harness::{emit_plot, gen_instances, run_bench, verify_paths, verify_solution, BenchCase, BenchConfig, RunMode};
use mgcbs::solution::SolutionFile;
use mgcbs::{maps, parse_map, Algorithm, Graph, Instance, Outcome, SearchError};

#[derive(Parser)]
#[command(name = "mgcbs", version, about = "Optimal multi-goal multi-agent pathfinding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample random instances on a map.
    Gen(GenArgs),
    /// Solve one instance.
    Solve(SolveArgs),
    /// Check a solution file.
    Verify(VerifyArgs),
    /// Render a verified solution as SVG.
    Plot(VerifyArgs),
    /// Run algorithms over generated instances and write CSV tables.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Map file, or the name of a bundled map.
    #[arg(long)]
    map: String,
    #[arg(long)]
    agents: usize,
    #[arg(long)]
    goals: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for `inst-NNN.json` files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Map file or bundled map name; defaults to the instance's `map` field.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "mgcbs")]
    algo: Algorithm,
    /// Budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Solution file to write on success.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    /// SVG output path (plot only).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Map files or bundled map names, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "crowded-a,crowded-b")]
    map: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    agents: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    goals: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Algorithms to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "hcbs,mgcbs-noforest,mgcbs,cbs-astar")]
    algo: Vec<Algorithm>,
    /// Speedups are relative to this algorithm.
    #[arg(long, default_value = "hcbs")]
    baseline: Algorithm,
    /// Optimality rows compare against this algorithm.
    #[arg(long, default_value = "cbs-astar")]
    referee: Algorithm,
    /// Directory for `runs.csv`, `summary.csv` and `optimality.csv`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Skip runtime measurement and run instances in parallel.
    #[arg(long)]
    logic_only: bool,
}

enum Failure {
    Usage(String),
    Validation(String),
    Internal(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_map(spec: &str) -> CliResult<Graph> {
    let path = Path::new(spec);
    if path.exists() {
        return parse_map(&read(path)?).map_err(|e| Failure::Usage(format!("{spec}: {e}")));
    }
    maps::builtin(spec).ok_or_else(|| Failure::Usage(format!("{spec}: no such file or bundled map")))
}

fn load_problem(map: Option<&str>, instance: &Path) -> CliResult<(Graph, Instance)> {
    let text = read(instance)?;
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", instance.display())))?;
    let graph = load_map(map.unwrap_or(&file.map))?;
    let inst = load_instance(&text, &graph).map_err(|e| Failure::Validation(format!("{}: {e}", instance.display())))?;
    Ok((graph, inst))
}

fn budget(seconds: f64) -> CliResult<Duration> {
    Duration::try_from_secs_f64(seconds).map_err(|_| Failure::Usage(format!("invalid timeout {seconds}")))
}

fn gen(args: GenArgs) -> CliResult<()> {
    let graph = load_map(&args.map)?;
    let instances = gen_instances(&graph, &args.map, args.agents, args.goals, args.count, args.seed)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::Usage(format!("{}: {e}", args.out.display())))?;
    for (i, inst) in instances.iter().enumerate() {
        write(
            &args.out.join(format!("inst-{i:03}.json")),
            &InstanceFile::from_instance(inst, &graph).to_json(),
        )?;
    }
    println!("wrote {} instances to {}", instances.len(), args.out.display());
    Ok(())
}

fn solve(args: SolveArgs) -> CliResult<()> {
    let (graph, inst) = load_problem(args.map.as_deref(), &args.instance)?;
    let report = match args.algo.solve(&graph, &inst, budget(args.timeout)?) {
        Ok(r) => r,
        Err(SearchError::Invariant(m)) => return Err(Failure::Internal(m)),
        Err(e) => return Err(Failure::Validation(e.to_string())),
    };
    let elapsed = report.elapsed.as_secs_f64();
    match &report.outcome {
        Outcome::Solved(sol) => {
            verify_paths(&graph, &inst, sol).map_err(|v| Failure::Internal(format!("solver output rejected: {v}")))?;
            let file = SolutionFile::new(sol, &graph, args.algo.name(), report.elapsed);
            if let Some(out) = &args.out {
                write(out, &file.to_json())?;
            }
            println!("outcome=solved algo={} cost={} elapsed_s={elapsed:.6}", args.algo, file.cost);
        }
        other => println!("outcome={} algo={} elapsed_s={elapsed:.6}", other.label(), args.algo),
    }
    Ok(())
}

fn load_solution(args: &VerifyArgs) -> CliResult<(Graph, Instance, SolutionFile)> {
    let (graph, inst) = load_problem(args.map.as_deref(), &args.instance)?;
    let sol: SolutionFile = serde_json::from_str(&read(&args.solution)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.solution.display())))?;
    Ok((graph, inst, sol))
}

fn verify(args: VerifyArgs) -> CliResult<()> {
    let (graph, inst, sol) = load_solution(&args)?;
    verify_solution(&graph, &inst, &sol).map_err(|v| Failure::Validation(format!("{}: {v}", v.class())))?;
    println!("ok cost={}", sol.cost);
    Ok(())
}

fn plot(args: VerifyArgs) -> CliResult<()> {
    let (graph, inst, sol) = load_solution(&args)?;
    let svg = emit_plot(&graph, &inst, &sol).map_err(|v| Failure::Validation(format!("{}: {v}", v.class())))?;
    match &args.out {
        Some(out) => write(out, &svg),
        None => {
            print!("{svg}");
            Ok(())
        }
    }
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let mut cases = Vec::new();
    for map in &args.map {
        let graph = load_map(map)?;
        for &agents in &args.agents {
            for &goals in &args.goals {
                cases.push(BenchCase {
                    map: map.clone(),
                    graph: graph.clone(),
                    agents,
                    goals,
                });
            }
        }
    }
    let cfg = BenchConfig {
        cases,
        count: args.count,
        seed: args.seed,
        budget: budget(args.timeout)?,
        algorithms: args.algo,
        baseline: Some(args.baseline),
        referee: Some(args.referee),
        mode: if args.logic_only {
            RunMode::LogicOnly
        } else {
            RunMode::Timing
        },
    };
    let report = run_bench(&cfg).map_err(|e| Failure::Validation(e.to_string()))?;
    if let Some(dir) = &args.csv {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        write(&dir.join("runs.csv"), &report.runs_csv())?;
        write(&dir.join("summary.csv"), &report.summary_csv())?;
        write(&dir.join("optimality.csv"), &report.optimality_csv())?;
    }
    print!("{}\n{}", report.summary_csv(), report.optimality_csv());
    if report.runs.iter().any(|r| r.outcome == "invalid" || r.outcome == "error") {
        return Err(Failure::Internal("some runs produced invalid solutions or errors".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Plot(a) => plot(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
