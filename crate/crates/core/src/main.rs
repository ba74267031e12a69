use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use degree_ldp::harness::{
    degree_orders, emit_csv, load_dataset, resolve_theta, run_pipeline, summarize, write_csv,
    ExperimentConfig, MetricsRow, ThetaChoice, DEFAULT_ALPHA, DEFAULT_P_SIZE, DEFAULT_TRIALS,
};
use degree_ldp::secagg::DEFAULT_LAMBDA;
use degree_ldp::seed::trial_seed;
use degree_ldp::{Graph, Result, Strategy};

#[derive(Parser)]
#[command(name = "degree-ldp", version, about = "Node-LDP degree sequence release")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print node count, edge count, max and average degree of an edge list.
    Stats { file: PathBuf },
    /// Non-private projection only: true-degree orders, truthful
    /// negotiation, no noise.
    Project(RunArgs),
    /// Run threshold selection and print the chosen θ.
    SelectTheta {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "deviation")]
        method: Method,
        /// Skip pairwise masking and sum in the clear.
        #[arg(long)]
        no_mask: bool,
    },
    /// Full private pipeline.
    Release(RunArgs),
    /// Grid over θ or ε, one CSV row per (point, strategy, trial).
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        over: SweepAxis,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sum,
    Deviation,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepAxis {
    Theta,
    Epsilon,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Dataset path, short name (facebook, wiki-vote, ...) or synthetic:N[:M[:SEED]].
    #[arg(long, default_value = "facebook")]
    dataset: String,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Positive integer, auto-sum or auto-deviation.
    #[arg(long, default_value = "auto-deviation")]
    theta: String,
    /// Candidate domain for automatic θ (defaults to d_max).
    #[arg(long = "K")]
    k_max: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_P_SIZE)]
    psize: u32,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: u32,
    /// A strategy name or "all".
    #[arg(long, default_value = "lpea-low")]
    strategy: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Private projection (NDOE orders and randomized negotiation) without
    /// the Laplace release; only meaningful for `project`.
    #[arg(long)]
    private: bool,
    /// Also write the per-trial release reports (noisy degree sequence and
    /// distribution) as JSON; only used by `release`.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Release without privacy: same as `project`.
    #[arg(long)]
    projection_only: bool,
    /// Write zero in the runtime column so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn strategies(&self) -> Result<Vec<Strategy>> {
        if self.strategy.eq_ignore_ascii_case("all") {
            Ok(Strategy::ALL.to_vec())
        } else {
            Ok(vec![self.strategy.parse()?])
        }
    }

    fn config(&self, strategy: Strategy, private: bool, noise: bool) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(&self.dataset, strategy, self.epsilon, self.theta.parse()?);
        cfg.alpha = self.alpha;
        cfg.k_max = self.k_max;
        cfg.p_size = self.psize;
        cfg.lambda = self.lambda;
        cfg.trials = self.trials;
        cfg.seed = self.seed;
        cfg.private_mode = private;
        cfg.add_noise = noise;
        cfg.record_runtime = !self.no_timing;
        cfg.validate()?;
        Ok(cfg)
    }

    fn mode(&self, release: bool) -> (bool, bool) {
        if release && !self.projection_only {
            (true, true)
        } else {
            (self.private && !self.projection_only, false)
        }
    }
}

fn output(rows: &[MetricsRow], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            emit_csv(rows, path)?;
            let s = summarize(rows);
            eprintln!(
                "{} rows -> {} (mean mae_seq {:.4}, mean edge_ratio {:.4})",
                rows.len(),
                path.display(),
                s.mae_seq,
                s.edge_ratio
            );
            Ok(())
        }
        None => write_csv(rows, io::stdout().lock()),
    }
}

fn run_grid(graph: &Graph, args: &RunArgs, release: bool, points: &[RunArgs]) -> Result<Vec<MetricsRow>> {
    let (private, noise) = args.mode(release);
    let mut rows = Vec::new();
    for point in points {
        for strategy in point.strategies()? {
            let cfg = point.config(strategy, private, noise)?;
            rows.extend(run_pipeline(graph, &cfg)?.into_iter().map(|o| o.row));
        }
    }
    Ok(rows)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats { file } => {
            let file = std::fs::File::open(file)?;
            let stats = degree_ldp::load_edge_list(io::BufReader::new(file))?.stats()?;
            let mut out = io::stdout().lock();
            writeln!(out, "nodes\t{}", stats.nodes)?;
            writeln!(out, "edges\t{}", stats.edges)?;
            writeln!(out, "d_min\t{}", stats.d_min)?;
            writeln!(out, "d_max\t{}", stats.d_max)?;
            writeln!(out, "d_avg\t{:.2}", stats.d_avg)?;
            Ok(())
        }
        Command::Project(args) => {
            let graph = load_dataset(&args.dataset)?;
            let rows = run_grid(&graph, &args, false, std::slice::from_ref(&args))?;
            output(&rows, args.out.as_ref())
        }
        Command::Release(args) => {
            let graph = load_dataset(&args.dataset)?;
            let (private, noise) = args.mode(true);
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            for strategy in args.strategies()? {
                for outcome in run_pipeline(&graph, &args.config(strategy, private, noise)?)? {
                    rows.push(outcome.row);
                    reports.extend(outcome.report);
                }
            }
            if let Some(path) = &args.report {
                let file = io::BufWriter::new(std::fs::File::create(path)?);
                serde_json::to_writer(file, &reports).map_err(io::Error::from)?;
            }
            output(&rows, args.out.as_ref())
        }
        Command::Sweep { run, over, values } => {
            let graph = load_dataset(&run.dataset)?;
            let points: Vec<RunArgs> = values
                .iter()
                .map(|v| {
                    let mut point = run.clone();
                    match over {
                        SweepAxis::Theta => point.theta = v.clone(),
                        SweepAxis::Epsilon => {
                            point.epsilon = v.parse().map_err(|_| {
                                degree_ldp::Error::InvalidParameter(format!("bad epsilon {v:?}"))
                            })?
                        }
                    }
                    Ok(point)
                })
                .collect::<Result<_>>()?;
            let rows = run_grid(&graph, &run, true, &points)?;
            output(&rows, run.out.as_ref())
        }
        Command::SelectTheta { run, method, no_mask } => {
            let graph = load_dataset(&run.dataset)?;
            let mut cfg = run.config(Strategy::LpeaLow, run.private, false)?;
            cfg.masking = !no_mask;
            cfg.theta = match method {
                Method::Sum => ThetaChoice::AutoSum,
                Method::Deviation => ThetaChoice::AutoDeviation,
            };
            let seed = trial_seed(cfg.seed, 0);
            let orders = degree_orders(&graph, &cfg, seed)?;
            let (theta, rounds) = resolve_theta(&graph, &orders, &cfg, seed)?;
            println!("{theta}");
            eprintln!("{rounds} aggregation rounds");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
