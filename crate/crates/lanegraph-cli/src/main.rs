//! Command line front end for the lane-level solver.
//!
//! Exit codes: 0 success (for `solve`: the optimal traversal is feasible),
//! 1 any error (with a one-line JSON error record on stderr), 2 for `solve`
//! when the optimum still contains infeasible turns, i.e. the map data
//! offers no legal lane assignment for the path.

use std::fmt::Display;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lanegraph::format::{
    load_network, load_path, result_to_json, save_network, save_path, save_result, sha256_hex,
    InputDigests, LoadError, ResultDocument,
};
use lanegraph::model::validate_path;
use lanegraph::{
    emit_instructions, export_dot, gen_dependency_chain, gen_random, oracle_best, solve_dijkstra,
    solve_sweep, GenSpec, LaneLevelGraph, OracleError, Traversal, ValidatedPath,
};

#[derive(Parser)]
#[command(
    name = "lanegraph",
    version,
    about = "Lane-level traversal solver for segment paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a path over a network and write a result document.
    Solve(SolveArgs),
    /// Solve one instance and confirm the cost against exhaustive search.
    OracleCheck(OracleCheckArgs),
    /// Generate a random instance or a lane-decision dependency chain.
    Gen(GenArgs),
    /// Render the lane-level graph as Graphviz DOT on stdout.
    ExportDot(ExportDotArgs),
    /// Time a solver on uniform 2-lane chains of growing length.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Sweep,
    Dijkstra,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Sweep => "sweep",
            Algorithm::Dijkstra => "dijkstra",
        }
    }

    fn run(self, g: &LaneLevelGraph) -> Traversal {
        match self {
            Algorithm::Sweep => solve_sweep(g),
            Algorithm::Dijkstra => solve_dijkstra(g),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Network file (JSON).
    #[arg(long)]
    network: PathBuf,
    /// Path file (JSON).
    #[arg(long)]
    path: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Sweep)]
    algorithm: Algorithm,
    /// Write the result document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    path: PathBuf,
    /// Refuse instances whose enumeration space exceeds this many states.
    #[arg(long, default_value_t = 10_000_000)]
    max_states: u64,
}

#[derive(Args)]
struct GenArgs {
    /// Generate the lane-decision dependency chain of this length instead
    /// of a random instance.
    #[arg(long, conflicts_with_all = ["segments", "max_lanes", "density", "inconvenient", "seed"])]
    chain: Option<u32>,
    #[arg(long, default_value_t = 8)]
    segments: u32,
    #[arg(long, default_value_t = 3)]
    max_lanes: u32,
    /// Fraction of lane pairs at each boundary that get a declared turn.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Fraction of declared turns marked inconvenient.
    #[arg(long, default_value_t = 0.2)]
    inconvenient: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes <prefix>.network.json and <prefix>.path.json.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct ExportDotArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    path: PathBuf,
    /// Solve first and highlight the optimal traversal.
    #[arg(long)]
    solve: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated chain lengths, e.g. 1000,10000,100000.
    #[arg(long, value_delimiter = ',', required = true)]
    chain_lengths: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Algorithm::Sweep)]
    algorithm: Algorithm,
    /// Timed runs per length (after one untimed warmup).
    #[arg(long, default_value_t = 5)]
    repeat: u32,
}

/// An error on its way to stderr as a one-line JSON record.
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl Display) -> Failure {
        Failure { kind, message: message.to_string() }
    }

    fn emit(self) -> ExitCode {
        let record = serde_json::json!({"error": self.kind, "message": self.message});
        eprintln!("{record}");
        ExitCode::from(1)
    }
}

fn load_failure(file: &FsPath, err: LoadError) -> Failure {
    let kind = match &err {
        LoadError::Io(_) => "io",
        LoadError::Parse { .. } => "parse",
        LoadError::UnsupportedVersion { .. } => "unsupported_version",
        LoadError::Malformed(_) => "malformed",
        LoadError::ValidationFailed(_) => "validation",
    };
    Failure::new(kind, format!("{}: {err}", file.display()))
}

/// Loads and cross-validates both inputs, returning the network (owned) and
/// the path resolution deferred to the caller via a closure-free two-step:
/// the network must outlive the validated path, so both are returned raw.
fn load_instance(
    network_file: &FsPath,
    path_file: &FsPath,
) -> Result<(lanegraph::RoadNetwork, lanegraph::Path), Failure> {
    let network = load_network(network_file).map_err(|e| load_failure(network_file, e))?;
    let path = load_path(path_file).map_err(|e| load_failure(path_file, e))?;
    Ok((network, path))
}

fn resolve<'n>(
    network: &'n lanegraph::RoadNetwork,
    path: &lanegraph::Path,
    path_file: &FsPath,
) -> Result<ValidatedPath<'n>, Failure> {
    validate_path(network, path)
        .map_err(|e| Failure::new("path", format!("{}: {e}", path_file.display())))
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, Failure> {
    let (network, path) = load_instance(&args.network, &args.path)?;
    let vp = resolve(&network, &path, &args.path)?;

    let started = Instant::now();
    let g = LaneLevelGraph::build(&vp);
    let traversal = args.algorithm.run(&g);
    let timing_ms = started.elapsed().as_secs_f64() * 1e3;

    let instructions = emit_instructions(&traversal, &vp);
    let digest = |file: &FsPath| -> Result<String, Failure> {
        let bytes = std::fs::read(file)
            .map_err(|e| Failure::new("io", format!("{}: {e}", file.display())))?;
        Ok(sha256_hex(&bytes))
    };
    let document = ResultDocument {
        algorithm: args.algorithm.name().to_owned(),
        traversal,
        instructions,
        timing_ms,
        input_digests: InputDigests {
            network: digest(&args.network)?,
            path: digest(&args.path)?,
        },
    };

    match &args.out {
        Some(out) => {
            save_result(out, &document).map_err(|e| load_failure(out, e))?;
            println!("{document} -> {}", out.display());
        }
        None => print!("{}", result_to_json(&document)),
    }
    Ok(if document.traversal.is_feasible() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<ExitCode, Failure> {
    let (network, path) = load_instance(&args.network, &args.path)?;
    let vp = resolve(&network, &path, &args.path)?;
    let g = LaneLevelGraph::build(&vp);
    let sweep = solve_sweep(&g);
    let dijkstra = solve_dijkstra(&g);
    let oracle = oracle_best(&vp, args.max_states).map_err(|e| match e {
        OracleError::SearchSpaceTooLarge { .. } => Failure::new("search_space", e),
    })?;

    let solvers_agree = sweep == dijkstra;
    let costs_match = dijkstra.total_cost == oracle.best.total_cost;
    println!(
        "sweep {} dijkstra {} oracle {} ({} of {} states evaluated): {}",
        sweep.total_cost,
        dijkstra.total_cost,
        oracle.best.total_cost,
        oracle.evaluated,
        oracle.search_space,
        if solvers_agree && costs_match { "match" } else { "MISMATCH" },
    );
    if !solvers_agree {
        return Err(Failure::new("solver_disagreement", "sweep and dijkstra traversals differ"));
    }
    if !costs_match {
        return Err(Failure::new(
            "oracle_mismatch",
            format!(
                "solver cost {} but exhaustive optimum {}",
                dijkstra.total_cost, oracle.best.total_cost
            ),
        ));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode, Failure> {
    let (network, path) = match args.chain {
        Some(length) => {
            if length < 2 {
                return Err(Failure::new("usage", "--chain needs a length of at least 2"));
            }
            gen_dependency_chain(length)
        }
        None => {
            if args.segments < 1 || args.max_lanes < 1 {
                return Err(Failure::new("usage", "--segments and --max-lanes must be positive"));
            }
            for (flag, value) in [("--density", args.density), ("--inconvenient", args.inconvenient)] {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Failure::new("usage", format!("{flag} must be within [0, 1]")));
                }
            }
            gen_random(&GenSpec {
                segments: args.segments,
                max_lanes: args.max_lanes,
                connection_density: args.density,
                inconvenient_fraction: args.inconvenient,
                seed: args.seed,
            })
        }
    };

    let prefix = args.out_prefix.display();
    let network_file = PathBuf::from(format!("{prefix}.network.json"));
    let path_file = PathBuf::from(format!("{prefix}.path.json"));
    save_network(&network_file, &network).map_err(|e| load_failure(&network_file, e))?;
    save_path(&path_file, &path).map_err(|e| load_failure(&path_file, e))?;
    println!(
        "wrote {} ({} segments, {} connections)",
        network_file.display(),
        network.segments().len(),
        network.connections().len()
    );
    println!("wrote {} ({} segments)", path_file.display(), path.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_dot(args: &ExportDotArgs) -> Result<ExitCode, Failure> {
    let (network, path) = load_instance(&args.network, &args.path)?;
    let vp = resolve(&network, &path, &args.path)?;
    let g = LaneLevelGraph::build(&vp);
    let traversal = args.solve.then(|| solve_sweep(&g));
    print!("{}", export_dot(&g, traversal.as_ref()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, Failure> {
    if args.repeat < 1 {
        return Err(Failure::new("usage", "--repeat must be at least 1"));
    }
    println!(
        "{:>10} {:>10} {:>10} {:>6} {:>10} {:>10}",
        "length", "nodes", "arcs", "runs", "min_ms", "mean_ms"
    );
    for &length in &args.chain_lengths {
        if length < 2 {
            return Err(Failure::new("usage", "chain lengths must be at least 2"));
        }
        let (network, path) = gen_dependency_chain(length);
        let vp = validate_path(&network, &path).expect("generated instance is valid");
        let g = LaneLevelGraph::build(&vp);
        let _ = args.algorithm.run(&g); // warmup
        let mut times_ms = Vec::with_capacity(args.repeat as usize);
        for _ in 0..args.repeat {
            let started = Instant::now();
            let traversal = args.algorithm.run(&g);
            times_ms.push(started.elapsed().as_secs_f64() * 1e3);
            debug_assert!(traversal.is_feasible());
        }
        let min = times_ms.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = times_ms.iter().sum::<f64>() / times_ms.len() as f64;
        println!(
            "{:>10} {:>10} {:>10} {:>6} {:>10.3} {:>10.3}",
            length,
            g.node_count(),
            g.arcs().len(),
            args.repeat,
            min,
            mean
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) =>
        {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => return Failure::new("usage", err).emit(),
    };
    let run = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
        Command::Gen(args) => cmd_gen(args),
        Command::ExportDot(args) => cmd_export_dot(args),
        Command::Bench(args) => cmd_bench(args),
    };
    run.unwrap_or_else(Failure::emit)
}
