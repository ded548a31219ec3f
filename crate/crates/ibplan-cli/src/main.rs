//! Command-line front end: compress occupancy grids into tree abstractions,
//! plan on them, sweep/bench across trade-off schedules, render scenes, and
//! verify the library's guarantees on a given map.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 property failure
//! from `verify`. Data goes to stdout (or `--out`); progress goes to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use ibplan::experiments::maps::{random_map, synthetic_blob_map, DEMO_MAP_SEED};
use ibplan::experiments::verify::{verify_map, VerifyConfig};
use ibplan::experiments::{
    bench_csv, run_bench, run_sweep, sweep_csv, write_bench_csv, write_sweep_csv, BenchConfig,
    CostArgs, SweepConfig,
};
use ibplan::graph::build_graph;
use ibplan::grid::{default_prior, load_map, load_prior, GridMap, MapFormat};
use ibplan::info::{greedy_search, qtree_search, BetaSchedule, InfoCache, JointModel};
use ibplan::planner::{plan_detailed, write_path_csv, PlanQuery, PlanSummary, ValueCache};
use ibplan::render::render_svg;
use ibplan::tree::{QuadTree, TreeAbstraction};
use ibplan::Error;

/// Trade-off values are dimensionless but log-base dependent: this tool
/// measures information in bits (base-2 logarithms) everywhere.
#[derive(Parser)]
#[command(name = "ibplan", version, about = "Occupancy-grid abstraction and multi-resolution planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Verbosity: quiet, info, or debug. The IBPLAN_LOG environment
    /// variable overrides the flag.
    #[arg(long, global = true, default_value = "info")]
    log_level: LogLevel,
}

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum LogLevel {
    Quiet,
    Info,
    Debug,
}

#[derive(Args)]
struct MapArgs {
    /// Map source: a .pgm/.csv file, or `random` / `blobs` for generated
    /// maps (see --size and --seed).
    #[arg(long)]
    map: String,

    /// Side length for generated maps; must be a power of two >= 2.
    #[arg(long, default_value_t = 128)]
    size: usize,

    /// Seed for generated maps and query sampling.
    #[arg(long, default_value_t = DEMO_MAP_SEED)]
    seed: u64,

    /// Optional cell-prior CSV (row-major, must sum to 1); uniform when
    /// absent.
    #[arg(long)]
    prior: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct CostFlags {
    /// Occupancy tolerance in [0, 1]: cells with p <= eps are traversable.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,

    /// Per-cell traversal cost offset, in (0, 1].
    #[arg(long, default_value_t = 0.001)]
    lambda1: f64,

    /// Occupancy-proportional cost weight, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    lambda2: f64,

    /// Obstacle penalty excess; any positive value works.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
}

impl CostFlags {
    fn to_args(self) -> CostArgs {
        CostArgs {
            eps: self.eps,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            gamma: self.gamma,
        }
    }
}

#[derive(Args, Clone)]
struct ScheduleFlags {
    /// File with one trade-off value per line, strictly increasing.
    #[arg(long, conflicts_with_all = ["beta_min", "beta_max", "beta_count"])]
    schedule: Option<PathBuf>,

    /// Smallest value of the geometric beta ladder.
    #[arg(long, default_value_t = 0.01)]
    beta_min: f64,

    /// Largest value of the geometric beta ladder.
    #[arg(long, default_value_t = 1e9)]
    beta_max: f64,

    /// Number of values in the geometric beta ladder.
    #[arg(long, default_value_t = 20)]
    beta_count: usize,
}

impl ScheduleFlags {
    fn build(&self) -> Result<BetaSchedule, Error> {
        match &self.schedule {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let values = text
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| {
                        l.trim().parse::<f64>().map_err(|_| {
                            Error::InvalidParameter(format!("bad beta {:?} in schedule", l))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                BetaSchedule::new(values)
            }
            None => BetaSchedule::geometric(self.beta_min, self.beta_max, self.beta_count),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compress a map into a tree abstraction and emit it as JSON.
    Compress {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        cost: CostFlags,
        /// Trade-off value; larger keeps more detail.
        #[arg(long)]
        beta: f64,
        /// Use the greedy baseline instead of the future-aware search.
        #[arg(long)]
        greedy: bool,
        /// Output JSON path (stdout when absent).
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also dump the per-node information gains as CSV.
        #[arg(long)]
        cache_csv: Option<PathBuf>,
    },
    /// Plan a path between two cells and emit a summary (stdout) plus an
    /// optional path CSV.
    Plan {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        cost: CostFlags,
        /// Trade-off value; omit to plan at the finest resolution.
        #[arg(long)]
        beta: Option<f64>,
        /// Start cell as `x,y`.
        #[arg(long, value_parser = parse_cell)]
        start: (usize, usize),
        /// Goal cell as `x,y`.
        #[arg(long, value_parser = parse_cell)]
        goal: (usize, usize),
        /// Path CSV output.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Summary JSON output (also printed to stdout).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Graph edge-list CSV output.
        #[arg(long)]
        graph_csv: Option<PathBuf>,
    },
    /// Sweep a beta schedule: per-beta compression, cost ratios, and phase
    /// timings as CSV.
    Sweep {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        cost: CostFlags,
        #[command(flatten)]
        schedule: ScheduleFlags,
        /// Start/goal pairs sampled per beta.
        #[arg(long, default_value_t = 200)]
        queries: usize,
        /// JSON file whose fields (betas, queries, seed, eps, lambda1,
        /// lambda2, gamma) override the corresponding flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path (stdout when absent).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Time the four pipeline phases against the finest-resolution search
    /// baseline over generated maps of several sizes.
    Bench {
        #[command(flatten)]
        cost: CostFlags,
        #[command(flatten)]
        schedule: ScheduleFlags,
        /// Comma-separated map sides, e.g. `128,256,512`.
        #[arg(long, value_delimiter = ',', default_value = "128,256")]
        sizes: Vec<usize>,
        /// Map generator seed.
        #[arg(long, default_value_t = DEMO_MAP_SEED)]
        seed: u64,
        /// Queries timed per (size, beta).
        #[arg(long, default_value_t = 100)]
        queries: usize,
        /// Output CSV path (stdout when absent).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Render the map, an abstraction, and optionally a planned path to SVG.
    Render {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        cost: CostFlags,
        /// Trade-off value; omit for the finest resolution.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_parser = parse_cell)]
        start: Option<(usize, usize)>,
        #[arg(long, value_parser = parse_cell)]
        goal: Option<(usize, usize)>,
        /// Output SVG path.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the property suite on a map and report pass/fail per property.
    Verify {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        cost: CostFlags,
        /// Queries per property that plans paths.
        #[arg(long, default_value_t = 10)]
        queries: usize,
    },
}

fn parse_cell(text: &str) -> Result<(usize, usize), String> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got {text:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad coordinate {t:?}"))
    };
    Ok((parse(x)?, parse(y)?))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let log = Logger::new(cli.log_level);
    match run(cli.command, &log) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct Logger {
    level: LogLevel,
}

impl Logger {
    fn new(flag: LogLevel) -> Self {
        let level = match std::env::var("IBPLAN_LOG").ok().as_deref() {
            Some("quiet") => LogLevel::Quiet,
            Some("info") => LogLevel::Info,
            Some("debug") => LogLevel::Debug,
            _ => flag,
        };
        Self { level }
    }

    fn info(&self, message: impl AsRef<str>) {
        if self.level >= LogLevel::Info {
            eprintln!("{}", message.as_ref());
        }
    }

    fn debug(&self, message: impl AsRef<str>) {
        if self.level >= LogLevel::Debug {
            eprintln!("{}", message.as_ref());
        }
    }
}

fn power_of_two_exponent(side: usize) -> Result<u32, Error> {
    if side >= 2 && side.is_power_of_two() {
        Ok(side.trailing_zeros())
    } else {
        Err(Error::NonPowerOfTwoSide(side))
    }
}

fn resolve_map(args: &MapArgs, log: &Logger) -> Result<GridMap, Error> {
    let map = match args.map.as_str() {
        "random" => random_map(power_of_two_exponent(args.size)?, args.seed),
        "blobs" | "synthetic" => synthetic_blob_map(power_of_two_exponent(args.size)?, args.seed),
        path => {
            let path = Path::new(path);
            load_map(path, MapFormat::from_path(path))?
        }
    };
    log.info(format!(
        "map: {}x{} ({} cells) from {}",
        map.side(),
        map.side(),
        map.cell_count(),
        args.map
    ));
    Ok(map)
}

struct Pipeline {
    map: GridMap,
    tree: QuadTree,
    cache: InfoCache,
    values: ValueCache,
}

fn build_pipeline(map_args: &MapArgs, cost: &CostFlags, log: &Logger) -> Result<Pipeline, Error> {
    let map = resolve_map(map_args, log)?;
    let tree = QuadTree::build(&map);
    let prior = match &map_args.prior {
        Some(path) => load_prior(path, &map)?,
        None => default_prior(&map),
    };
    let joint = JointModel::build(&map, &prior, &tree)?;
    let cache = InfoCache::build(&joint);
    let params = cost.to_args().params_for(map.side_exponent())?;
    let values = ValueCache::build(&map, &tree, &params)?;
    log.debug(format!(
        "tree: {} nodes, obstacle penalty {}",
        tree.node_count(),
        params.big_m()
    ));
    Ok(Pipeline {
        map,
        tree,
        cache,
        values,
    })
}

fn abstraction_for(
    p: &Pipeline,
    beta: Option<f64>,
    greedy: bool,
    log: &Logger,
) -> Result<TreeAbstraction, Error> {
    let abs = match beta {
        Some(beta) if greedy => greedy_search(&p.tree, &p.cache, beta)?,
        Some(beta) => qtree_search(&p.tree, &p.cache, beta)?,
        None => TreeAbstraction::full_resolution(&p.tree),
    };
    log.info(format!(
        "abstraction: {} leaves ({:.2}% of {} cells)",
        abs.leaf_count(),
        100.0 * abs.compression(),
        p.map.cell_count()
    ));
    Ok(abs)
}

/// Sweep overrides loadable from `--config`; fields present in the file
/// take precedence over the flags.
#[derive(serde::Deserialize, Default)]
struct SweepFileConfig {
    betas: Option<Vec<f64>>,
    queries: Option<usize>,
    seed: Option<u64>,
    eps: Option<f64>,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    gamma: Option<f64>,
}

fn run(command: Command, log: &Logger) -> Result<ExitCode, Error> {
    match command {
        Command::Compress {
            map,
            cost,
            beta,
            greedy,
            out,
            cache_csv,
        } => {
            let p = build_pipeline(&map, &cost, log)?;
            let abs = abstraction_for(&p, Some(beta), greedy, log)?;
            if let Some(path) = cache_csv {
                p.cache.write_csv(&p.tree, &path)?;
                log.info(format!("wrote information cache to {}", path.display()));
            }
            match out {
                Some(path) => {
                    abs.write_json(&path)?;
                    log.info(format!("wrote abstraction to {}", path.display()));
                }
                None => {
                    let leaves: Vec<usize> = abs.leaves().to_vec();
                    let dto = serde_json::json!({
                        "side_exponent": abs.side_exponent(),
                        "beta": abs.beta(),
                        "leaves": leaves,
                    });
                    println!("{}", serde_json::to_string_pretty(&dto).expect("valid json"));
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Plan {
            map,
            cost,
            beta,
            start,
            goal,
            out,
            summary,
            graph_csv,
        } => {
            let p = build_pipeline(&map, &cost, log)?;
            let abs = abstraction_for(&p, beta, false, log)?;
            let graph = build_graph(&p.tree, &abs);
            if let Some(path) = graph_csv {
                graph.write_edge_csv(&path)?;
            }
            let report = plan_detailed(
                &p.tree,
                &abs,
                &graph,
                &p.values,
                PlanQuery::new(start, goal),
            )?;
            log.info(format!(
                "path: {} nodes, cost {:.6}, feasible {}",
                report.path.len(),
                report.path.cost,
                report.path.feasible
            ));
            if let Some(path) = out {
                write_path_csv(&p.tree, &p.values, &report.path, &path)?;
                log.info(format!("wrote path to {}", path.display()));
            }
            let plan_summary = PlanSummary::new(&report, &graph);
            if let Some(path) = &summary {
                plan_summary.write_json(path)?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&plan_summary).expect("valid json")
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Sweep {
            map,
            cost,
            schedule,
            queries,
            config,
            out,
        } => {
            let file: SweepFileConfig = match &config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
                    .map_err(|e| Error::InvalidParameter(format!("bad config: {e}")))?,
                None => SweepFileConfig::default(),
            };
            let betas = match file.betas {
                Some(values) => BetaSchedule::new(values)?,
                None => schedule.build()?,
            };
            let mut sweep_config = SweepConfig::new(betas);
            sweep_config.query_count = file.queries.unwrap_or(queries);
            sweep_config.seed = file.seed.unwrap_or(map.seed);
            sweep_config.cost = CostArgs {
                eps: file.eps.unwrap_or(cost.eps),
                lambda1: file.lambda1.unwrap_or(cost.lambda1),
                lambda2: file.lambda2.unwrap_or(cost.lambda2),
                gamma: file.gamma.unwrap_or(cost.gamma),
            };
            let grid = resolve_map(&map, log)?;
            let output = run_sweep(&grid, &sweep_config)?;
            match output.first_feasible_compression {
                Some(c) => log.info(format!(
                    "first feasible plan at mean compression {:.2}% ({:.0}% of queries reached one)",
                    100.0 * c,
                    100.0 * output.queries_with_feasible
                )),
                None => log.info("no query reached a feasible plan"),
            }
            match out {
                Some(path) => {
                    write_sweep_csv(&output.rows, &path)?;
                    log.info(format!("wrote sweep to {}", path.display()));
                }
                None => print!("{}", sweep_csv(&output.rows)),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Bench {
            cost,
            schedule,
            sizes,
            seed,
            queries,
            out,
        } => {
            let betas = schedule.build()?;
            let mut bench_config = BenchConfig::new(betas);
            bench_config.query_count = queries;
            bench_config.seed = seed;
            bench_config.cost = cost.to_args();
            let maps = sizes
                .iter()
                .map(|&side| Ok(synthetic_blob_map(power_of_two_exponent(side)?, seed)))
                .collect::<Result<Vec<_>, Error>>()?;
            for m in &maps {
                log.info(format!("benchmarking {}x{}", m.side(), m.side()));
            }
            let rows = run_bench(&maps, &bench_config)?;
            match out {
                Some(path) => {
                    write_bench_csv(&rows, &path)?;
                    log.info(format!("wrote bench to {}", path.display()));
                }
                None => print!("{}", bench_csv(&rows)),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Render {
            map,
            cost,
            beta,
            start,
            goal,
            out,
        } => {
            let p = build_pipeline(&map, &cost, log)?;
            let abs = abstraction_for(&p, beta, false, log)?;
            let graph = build_graph(&p.tree, &abs);
            let path = match (start, goal) {
                (Some(s), Some(g)) => Some(plan_detailed(
                    &p.tree,
                    &abs,
                    &graph,
                    &p.values,
                    PlanQuery::new(s, g),
                )?),
                (None, None) => None,
                _ => {
                    return Err(Error::InvalidParameter(
                        "render needs both --start and --goal, or neither".into(),
                    ))
                }
            };
            let paths: Vec<&ibplan::planner::Path> =
                path.as_ref().map(|r| &r.path).into_iter().collect();
            render_svg(&p.map, &p.tree, &abs, Some(&p.values), &paths, &out)?;
            log.info(format!("wrote scene to {}", out.display()));
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            map,
            cost,
            queries,
        } => {
            let grid = resolve_map(&map, log)?;
            let config = VerifyConfig {
                seed: map.seed,
                query_count: queries,
                cost: cost.to_args(),
                ..VerifyConfig::default()
            };
            let reports = verify_map(&grid, &config)?;
            let mut failures = 0;
            for r in &reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("{status} {:<38} {}", r.name, r.details);
                if !r.passed {
                    failures += 1;
                }
            }
            if failures == 0 {
                log.info(format!("all {} properties hold", reports.len()));
                Ok(ExitCode::SUCCESS)
            } else {
                log.info(format!("{failures} properties failed"));
                Ok(ExitCode::from(2))
            }
        }
    }
}
