//! Campaign driver: expands the (scheme × λ × seed) grid, runs it and writes
//! the results table.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelConfig;
use crate::engine::{relative_gain, run, DirectionStats, MetricsReport, ModelConfig, Network, RunSeeds, SimulationRun};
use crate::error::{Error, Result};
use crate::phy::PhyConfig;
use crate::scheduler::{SchemeId, SchemeSpec};
use crate::topology::GeometryConfig;
use crate::traffic::{Direction, TrafficConfig};

/// First line of every results file. Bump the version when columns change.
pub const CSV_SCHEMA: &str = "# picotdd-results v1";

pub const CSV_COLUMNS: [&str; 11] = [
    "scheme",
    "lambda_dl",
    "seed",
    "direction",
    "mean_tput_mbps",
    "p5",
    "p50",
    "p95",
    "completed",
    "unfinished",
    "gain_vs_s1_pct",
];

/// Traffic parameters shared by every grid point; λ comes from the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficSection {
    pub dl_ul_arrival_ratio: f64,
    pub packet_size_bits: u64,
}

impl Default for TrafficSection {
    fn default() -> Self {
        let t = TrafficConfig::default();
        TrafficSection { dl_ul_arrival_ratio: t.dl_ul_arrival_ratio, packet_size_bits: t.packet_size_bits }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub schemes: Vec<SchemeId>,
    pub lambdas: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Simulated time per run including the warmup.
    pub duration_ms: u64,
    pub warmup_ms: u64,
    pub output_path: PathBuf,
    pub geometry: GeometryConfig,
    pub channel: ChannelConfig,
    pub traffic: TrafficSection,
    pub phy: PhyConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            schemes: SchemeId::ALL.to_vec(),
            lambdas: vec![0.5, 1.5, 2.5, 3.5, 10.0],
            seeds: vec![1, 2, 3, 4],
            duration_ms: 22_000,
            warmup_ms: 2_000,
            output_path: PathBuf::from("results.csv"),
            geometry: GeometryConfig::default(),
            channel: ChannelConfig::default(),
            traffic: TrafficSection::default(),
            phy: PhyConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub schemes: Option<Vec<SchemeId>>,
    pub lambdas: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    pub duration_ms: Option<u64>,
    pub warmup_ms: Option<u64>,
    pub output_path: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn model(&self) -> ModelConfig {
        ModelConfig { geometry: self.geometry.clone(), channel: self.channel.clone(), phy: self.phy.clone() }
    }

    pub fn traffic(&self, lambda_dl: f64) -> TrafficConfig {
        TrafficConfig {
            lambda_dl,
            dl_ul_arrival_ratio: self.traffic.dl_ul_arrival_ratio,
            packet_size_bits: self.traffic.packet_size_bits,
            duration_ms: self.duration_ms,
        }
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(v) = o.schemes {
            self.schemes = v;
        }
        if let Some(v) = o.lambdas {
            self.lambdas = v;
        }
        if let Some(v) = o.seeds {
            self.seeds = v;
        }
        if let Some(v) = o.duration_ms {
            self.duration_ms = v;
        }
        if let Some(v) = o.warmup_ms {
            self.warmup_ms = v;
        }
        if let Some(v) = o.output_path {
            self.output_path = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::config("schemes", "must not be empty"));
        }
        if self.lambdas.is_empty() {
            return Err(Error::config("lambdas", "must not be empty"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must not be empty"));
        }
        if self.duration_ms <= self.warmup_ms {
            return Err(Error::config("duration_ms", "must exceed warmup_ms"));
        }
        for &l in &self.lambdas {
            self.traffic(l).validate().map_err(|e| match e {
                Error::Config { key, reason } => Error::config(format!("lambdas ({key})"), reason),
                other => other,
            })?;
        }
        self.model().validate()
    }
}

/// Parses a campaign file, applies overrides and validates the result.
pub fn parse_campaign_str(text: &str, overrides: Overrides) -> Result<CampaignConfig> {
    let mut cfg: CampaignConfig = toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| format!(" (byte {})", s.start)).unwrap_or_default();
        Error::config("campaign file", format!("{}{at}", e.message()))
    })?;
    cfg.apply(overrides);
    cfg.validate()?;
    Ok(cfg)
}

/// Like [`parse_campaign_str`]; `None` means an empty file.
pub fn parse_campaign(path: Option<&Path>, overrides: Overrides) -> Result<CampaignConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_campaign_str(&text, overrides)
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub scheme: SchemeId,
    pub lambda_dl: f64,
    pub seed: u64,
    pub report: Result<MetricsReport>,
}

#[derive(Clone, Debug)]
pub struct CampaignResults {
    /// In (scheme, λ, seed) order of the configuration.
    pub runs: Vec<RunResult>,
}

struct Job {
    scheme: SchemeId,
    lambda_idx: usize,
    seed_idx: usize,
}

/// Runs the whole grid. Schemes share a drop per seed (paired seeds). Only a
/// failure to build a drop aborts; individual run failures are kept in the
/// results. `jobs` limits worker threads when parallelism is compiled in.
pub fn execute_campaign(cfg: &CampaignConfig, jobs: Option<usize>) -> Result<CampaignResults> {
    cfg.validate()?;
    let model = cfg.model();
    let networks = cfg
        .seeds
        .iter()
        .map(|&s| Network::build(&model, &RunSeeds::from_seed(s)))
        .collect::<Result<Vec<_>>>()?;

    let mut grid = Vec::new();
    for &scheme in &cfg.schemes {
        for lambda_idx in 0..cfg.lambdas.len() {
            for seed_idx in 0..cfg.seeds.len() {
                grid.push(Job { scheme, lambda_idx, seed_idx });
            }
        }
    }
    let total = grid.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let one = |job: &Job| {
        let seed = cfg.seeds[job.seed_idx];
        let lambda_dl = cfg.lambdas[job.lambda_idx];
        let sim = SimulationRun {
            scheme: SchemeSpec::new(job.scheme),
            traffic: cfg.traffic(lambda_dl),
            seeds: RunSeeds::from_seed(seed),
            duration_ms: cfg.duration_ms,
            warmup_ms: cfg.warmup_ms,
        };
        let report = run(&networks[job.seed_idx], sim);
        let n = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        match &report {
            Ok(r) => log::info!(
                "[{n}/{total}] {} λ={lambda_dl} seed={seed}: DL {:.2} Mbps, UL {:.2} Mbps",
                job.scheme,
                r.dl.mean_bps / 1e6,
                r.ul.mean_bps / 1e6
            ),
            Err(e) => log::error!("[{n}/{total}] {} λ={lambda_dl} seed={seed}: {e}", job.scheme),
        }
        RunResult { scheme: job.scheme, lambda_dl, seed, report }
    };
    let runs = run_all(&grid, jobs, one)?;
    Ok(CampaignResults { runs })
}

#[cfg(feature = "parallel")]
fn run_all<F>(grid: &[Job], jobs: Option<usize>, f: F) -> Result<Vec<RunResult>>
where
    F: Fn(&Job) -> RunResult + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(|| grid.par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_all<F>(grid: &[Job], _jobs: Option<usize>, f: F) -> Result<Vec<RunResult>>
where
    F: Fn(&Job) -> RunResult,
{
    Ok(grid.iter().map(f).collect())
}

fn fmt_mbps(bps: f64) -> String {
    format!("{:.6}", bps / 1e6)
}

impl CampaignResults {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.report.is_err()).count()
    }

    fn baseline(&self, lambda_dl: f64, seed: u64) -> Option<&MetricsReport> {
        self.runs
            .iter()
            .find(|r| r.scheme == SchemeId::S1 && r.lambda_dl == lambda_dl && r.seed == seed)
            .and_then(|r| r.report.as_ref().ok())
    }

    /// Writes the schema line, the header and one row per run and direction.
    /// A failed run yields a single row with direction `error` and empty
    /// value columns.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        writeln!(out, "{CSV_SCHEMA}").map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for r in &self.runs {
            let key = [r.scheme.to_string(), r.lambda_dl.to_string(), r.seed.to_string()];
            let report = match &r.report {
                Ok(rep) => rep,
                Err(_) => {
                    let mut row = key.to_vec();
                    row.push("error".into());
                    row.resize(CSV_COLUMNS.len(), String::new());
                    w.write_record(&row).map_err(csv_err)?;
                    continue;
                }
            };
            let base = self.baseline(r.lambda_dl, r.seed);
            for dir in [Direction::Dl, Direction::Ul] {
                let s: &DirectionStats = report.stats(dir);
                let gain = base
                    .and_then(|b| relative_gain(b.stats(dir).mean_bps, s.mean_bps).ok())
                    .map(|g| format!("{:.4}", 100.0 * g))
                    .unwrap_or_default();
                let mut row = key.to_vec();
                row.extend([
                    dir.to_string(),
                    fmt_mbps(s.mean_bps),
                    fmt_mbps(s.p5_bps),
                    fmt_mbps(s.p50_bps),
                    fmt_mbps(s.p95_bps),
                    s.completed.to_string(),
                    s.unfinished.to_string(),
                    gain,
                ]);
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        w.flush().map_err(io)
    }
}
