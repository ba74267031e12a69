//! End-to-end pipeline, multi-trial runner, dataset lookup and CSV output.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{load_edge_list, Graph};
use crate::mech::PrivacyParams;
use crate::metrics::{distribution_distance, mae, mse};
use crate::ndoe::{build_partitions, ndoe_sample};
use crate::projection::{project, ProjectionConfig, Strategy};
use crate::release::{degree_distribution, dsr, ReleaseReport};
use crate::secagg::{MaskTopology, DEFAULT_LAMBDA};
use crate::seed::{party_rng, phase_rng, trial_seed, Phase};
use crate::synth::preferential_attachment;
use crate::theta::{theta_by_deviation, theta_by_sum, ThetaMethod, ThetaSearchConfig};

/// Environment variable naming the directory that holds SNAP files.
pub const DATA_DIR_ENV: &str = "LDP_DEGREE_DATA_DIR";

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_P_SIZE: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaChoice {
    Fixed(u32),
    AutoSum,
    AutoDeviation,
}

impl FromStr for ThetaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto-sum" => Ok(ThetaChoice::AutoSum),
            "auto-deviation" => Ok(ThetaChoice::AutoDeviation),
            other => match other.parse::<u32>() {
                Ok(theta) if theta >= 1 => Ok(ThetaChoice::Fixed(theta)),
                _ => Err(invalid(format!(
                    "theta must be a positive integer, auto-sum or auto-deviation, got {other:?}"
                ))),
            },
        }
    }
}

impl fmt::Display for ThetaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaChoice::Fixed(theta) => write!(f, "{theta}"),
            ThetaChoice::AutoSum => f.write_str("auto-sum"),
            ThetaChoice::AutoDeviation => f.write_str("auto-deviation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub strategy: Strategy,
    pub epsilon: f64,
    pub alpha: f64,
    pub theta: ThetaChoice,
    /// Candidate domain for automatic θ; `None` means `d_max`.
    pub k_max: Option<u32>,
    pub p_size: u32,
    pub lambda: u32,
    pub trials: usize,
    pub seed: u64,
    /// NDOE orders and randomized-response negotiation. When off, orders
    /// are the true degrees and neighbors answer truthfully.
    pub private_mode: bool,
    /// Laplace release. When off, metrics are computed on projected degrees.
    pub add_noise: bool,
    /// Wall-clock runtime column; zero when off so output is reproducible.
    pub record_runtime: bool,
    pub masking: bool,
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<String>, strategy: Strategy, epsilon: f64, theta: ThetaChoice) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            strategy,
            epsilon,
            alpha: DEFAULT_ALPHA,
            theta,
            k_max: None,
            p_size: DEFAULT_P_SIZE,
            lambda: DEFAULT_LAMBDA,
            trials: DEFAULT_TRIALS,
            seed: 0,
            private_mode: true,
            add_noise: true,
            record_runtime: true,
            masking: true,
        }
    }

    /// Non-private projection-only regime: true-degree orders, truthful
    /// negotiation, no Laplace noise.
    pub fn projection_only(dataset: impl Into<String>, strategy: Strategy, theta: u32) -> Self {
        ExperimentConfig {
            private_mode: false,
            add_noise: false,
            ..ExperimentConfig::new(dataset, strategy, 1.0, ThetaChoice::Fixed(theta))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.p_size < 1 {
            return Err(invalid("partition size must be at least 1"));
        }
        PrivacyParams::new(self.epsilon, self.alpha)?;
        Ok(())
    }

    fn search_config(&self, k_max: u32, method: ThetaMethod) -> ThetaSearchConfig {
        ThetaSearchConfig {
            k_max,
            epsilon: self.epsilon,
            alpha: self.alpha,
            lambda: self.lambda,
            method,
            masking: self.masking,
            topology: MaskTopology::default(),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub dataset: String,
    pub strategy: String,
    pub epsilon: f64,
    pub alpha: f64,
    pub theta: u32,
    pub trial: usize,
    pub seed: u64,
    pub mae_seq: f64,
    pub mse_seq: f64,
    pub mae_dist: f64,
    pub edge_ratio: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub row: MetricsRow,
    pub report: Option<ReleaseReport>,
    pub theta_rounds: u32,
}

/// Resolves θ for one trial the way the selected protocol would.
pub fn resolve_theta(
    g: &Graph,
    orders: &[u32],
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(u32, u32)> {
    let d_max = g.stats()?.d_max;
    let k_max = cfg.k_max.unwrap_or(d_max).max(1);
    let mut rng = phase_rng(seed, Phase::ThetaSelect);
    match cfg.theta {
        ThetaChoice::Fixed(theta) => Ok((theta, 0)),
        ThetaChoice::AutoDeviation => {
            let search = cfg.search_config(k_max, ThetaMethod::ByDeviation);
            let sel = theta_by_deviation(&g.degree_sequence(), &search, &mut rng)?;
            Ok((sel.theta, sel.rounds))
        }
        ThetaChoice::AutoSum => {
            let search = cfg.search_config(k_max, ThetaMethod::BySum);
            let sel = theta_by_sum(g, orders, &search, &mut rng)?;
            Ok((sel.theta, sel.rounds))
        }
    }
}

/// Degree orders every node shares with its neighbors.
pub fn degree_orders(g: &Graph, cfg: &ExperimentConfig, seed: u64) -> Result<Vec<u32>> {
    let degrees = g.degree_sequence();
    if !cfg.private_mode {
        return Ok(degrees);
    }
    let stats = g.stats()?;
    let scheme = build_partitions(stats.d_min, stats.d_max, cfg.p_size)?;
    let budget = PrivacyParams::new(cfg.epsilon, cfg.alpha)?.ndoe_budget();
    degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| ndoe_sample(&mut party_rng(seed, Phase::Ndoe, i), d, budget, &scheme))
        .collect()
}

pub fn run_trial(g: &Graph, cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutcome> {
    let started = Instant::now();
    let seed = trial_seed(cfg.seed, trial);
    let params = PrivacyParams::new(cfg.epsilon, cfg.alpha)?;
    let n = g.node_count();

    let orders = degree_orders(g, cfg, seed)?;
    let (theta, theta_rounds) = resolve_theta(g, &orders, cfg, seed)?;
    let projection = ProjectionConfig {
        theta,
        strategy: cfg.strategy,
        private_mode: cfg.private_mode,
        params,
    };
    let projected = project(g, &orders, &projection, &mut phase_rng(seed, Phase::Projection))?;

    let original: Vec<f64> = g.degree_sequence().into_iter().map(f64::from).collect();
    let (released, released_dist, report) = if cfg.add_noise {
        let report = dsr(&projected, theta, &params, seed)?;
        (report.noisy_degrees.clone(), report.distribution.clone(), Some(report))
    } else {
        let released: Vec<f64> = projected.degrees().into_iter().map(f64::from).collect();
        let dist = degree_distribution(&released, n);
        (released, dist, None)
    };
    let original_dist = degree_distribution(&original, n);

    let edge_ratio = if g.edge_count() == 0 {
        1.0
    } else {
        projected.edge_count() as f64 / g.edge_count() as f64
    };
    let row = MetricsRow {
        dataset: cfg.dataset.clone(),
        strategy: cfg.strategy.to_string(),
        epsilon: cfg.epsilon,
        alpha: cfg.alpha,
        theta,
        trial,
        seed,
        mae_seq: mae(&original, &released)?,
        mse_seq: mse(&original, &released)?,
        mae_dist: distribution_distance(&original_dist, &released_dist)?,
        edge_ratio,
        runtime_ms: if cfg.record_runtime {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        },
    };
    Ok(TrialOutcome {
        row,
        report,
        theta_rounds,
    })
}

/// Runs all trials of `cfg` on `g`; trials are independent and run in
/// parallel, results come back in trial order.
pub fn run_pipeline(g: &Graph, cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(g, cfg, trial))
        .collect()
}

pub const CSV_HEADER: [&str; 12] = [
    "dataset",
    "strategy",
    "epsilon",
    "alpha",
    "theta",
    "trial",
    "seed",
    "mae_seq",
    "mse_seq",
    "mae_dist",
    "edge_ratio",
    "runtime_ms",
];

pub fn write_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file))
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Mean of each metric over a set of rows.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsSummary {
    pub mae_seq: f64,
    pub mse_seq: f64,
    pub mae_dist: f64,
    pub edge_ratio: f64,
}

pub fn summarize(rows: &[MetricsRow]) -> MetricsSummary {
    if rows.is_empty() {
        return MetricsSummary::default();
    }
    let n = rows.len() as f64;
    let mean = |f: fn(&MetricsRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    MetricsSummary {
        mae_seq: mean(|r| r.mae_seq),
        mse_seq: mean(|r| r.mse_seq),
        mae_dist: mean(|r| r.mae_dist),
        edge_ratio: mean(|r| r.edge_ratio),
    }
}

/// File names of the SNAP datasets used in the evaluation.
pub const KNOWN_DATASETS: [(&str, &str); 8] = [
    ("facebook", "facebook_combined.txt"),
    ("wiki-vote", "wiki-Vote.txt"),
    ("ca-hepph", "ca-HepPh.txt"),
    ("cit-hepph", "cit-HepPh.txt"),
    ("email-enron", "email-Enron.txt"),
    ("loc-brightkite", "loc-brightkite_edges.txt"),
    ("twitter", "twitter_combined.txt"),
    ("com-dblp", "com-dblp.ungraph.txt"),
];

fn data_dirs() -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        dirs.push(PathBuf::from(dir));
    }
    dirs.push(PathBuf::from("data"));
    dirs
}

/// Finds a dataset given a path, a short name from [`KNOWN_DATASETS`] or a
/// file name inside the data directory.
pub fn resolve_dataset(name: &str) -> Result<PathBuf> {
    let direct = Path::new(name);
    if direct.is_file() {
        return Ok(direct.to_path_buf());
    }
    let lowered = name.to_ascii_lowercase();
    let file_name = KNOWN_DATASETS
        .iter()
        .find(|(short, _)| *short == lowered)
        .map_or(name, |(_, file)| *file);
    data_dirs()
        .into_iter()
        .map(|dir| dir.join(file_name))
        .find(|p| p.is_file())
        .ok_or_else(|| Error::DatasetNotFound(name.to_owned()))
}

/// Loads a dataset by name or path. `synthetic:N[:M[:SEED]]` builds a
/// preferential-attachment graph with `N` nodes and `M` (default 3) edges
/// per new node.
pub fn load_dataset(name: &str) -> Result<Graph> {
    if let Some(spec) = name.strip_prefix("synthetic:") {
        let parts: Vec<&str> = spec.split(':').collect();
        let parse = |i: usize, default: u64| -> Result<u64> {
            parts
                .get(i)
                .map_or(Ok(default), |p| p.parse().map_err(|_| invalid(format!("bad synthetic spec {name:?}"))))
        };
        return preferential_attachment(parse(0, 2000)? as usize, parse(1, 3)? as usize, parse(2, 0)?);
    }
    let path = resolve_dataset(name)?;
    let file = std::fs::File::open(path)?;
    load_edge_list(std::io::BufReader::new(file))
}
