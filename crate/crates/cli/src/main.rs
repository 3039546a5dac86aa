use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use picotdd::{execute_campaign, parse_campaign, Error, Overrides, SchemeId};

/// Relative output paths are resolved against this directory when it is set.
const OUT_DIR_ENV: &str = "PICOTDD_OUT_DIR";

/// Run a dynamic-TDD campaign and write per-run throughput statistics as CSV.
#[derive(Parser, Debug)]
#[command(name = "picotdd", version)]
struct Args {
    /// Campaign file (TOML). Without it every setting takes its default.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated schemes, e.g. s1,s3,s4.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<SchemeId>>,
    /// Comma-separated DL arrival rates in packets/s per cell.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Simulated time per run including warmup.
    #[arg(long)]
    duration_ms: Option<u64>,
    #[arg(long)]
    warmup_ms: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, short)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let level = if args.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let overrides = Overrides {
        schemes: args.schemes,
        lambdas: args.lambdas,
        seeds: args.seeds,
        duration_ms: args.duration_ms,
        warmup_ms: args.warmup_ms,
        output_path: args.out,
    };
    let cfg = match parse_campaign(args.config.as_deref(), overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if cfg.output_path.is_relative() => PathBuf::from(dir).join(&cfg.output_path),
        _ => cfg.output_path.clone(),
    };

    let results = match execute_campaign(&cfg, args.jobs) {
        Ok(r) => r,
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = std::fs::File::create(&out)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", out.display())))
        .and_then(|f| results.write_csv(std::io::BufWriter::new(f)));
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let failed = results.failures();
    if failed > 0 {
        eprintln!("error: {failed} of {} runs failed; see error rows in {}", results.runs.len(), out.display());
        return ExitCode::from(2);
    }
    log::info!("wrote {} runs to {}", results.runs.len(), out.display());
    ExitCode::SUCCESS
}
