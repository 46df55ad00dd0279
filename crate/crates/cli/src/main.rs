//! Command-line front end for the cache-size sweep experiments.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use codedcache::simulator::{parse_config, run_experiment};

/// Sweep cache sizes and report average delivery rates as CSV.
///
/// Values from `--config` are applied first; flags given on the command
/// line override them.
#[derive(Debug, Parser)]
#[command(name = "codedcache", version)]
struct Args {
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    files: Option<usize>,
    /// Packets per file.
    #[arg(long)]
    packets: Option<usize>,
    /// Comma-separated cache sizes, in files.
    #[arg(long, value_name = "LIST")]
    cache_sizes: Option<String>,
    /// Zipf exponent of the demand distribution.
    #[arg(long)]
    alpha: Option<f64>,
    /// Delivery scheme: lfu, gcc, grasp or oracle. Repeatable.
    #[arg(long = "scheme", value_name = "NAME")]
    schemes: Vec<String>,
    /// rap-optimal, rap-uniform or lfu.
    #[arg(long)]
    placement: Option<String>,
    #[arg(long)]
    grasp_iterations: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write each trial's conflict graph in DIMACS format to this directory.
    #[arg(long, value_name = "DIR")]
    export_dimacs: Option<PathBuf>,
    /// Only evaluate the rate bound at each cache size.
    #[arg(long)]
    bound_only: bool,
    /// Draw one placement per cache size and reuse it in every trial.
    #[arg(long)]
    fix_placement: bool,
    /// Omit the timestamp comment and runtimes, making output reproducible.
    #[arg(long)]
    no_timestamp: bool,
    /// Bound aggregation over users: literal or max.
    #[arg(long)]
    bound: Option<String>,
}

impl Args {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push((key.to_string(), v));
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        push("users", self.users.map(|v| v.to_string()));
        push("files", self.files.map(|v| v.to_string()));
        push("packets", self.packets.map(|v| v.to_string()));
        push("cache_sizes", self.cache_sizes.clone());
        push("alpha", self.alpha.map(|v| v.to_string()));
        push(
            "schemes",
            (!self.schemes.is_empty()).then(|| self.schemes.join(",")),
        );
        push("placement", self.placement.clone());
        push(
            "grasp_iterations",
            self.grasp_iterations.map(|v| v.to_string()),
        );
        push("trials", self.trials.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("output", path(&self.output));
        push("export_dimacs", path(&self.export_dimacs));
        push("bound_only", self.bound_only.then(|| "true".into()));
        push("fix_placement", self.fix_placement.then(|| "true".into()));
        push("timestamp", self.no_timestamp.then(|| "false".into()));
        push("bound", self.bound.clone());
        out
    }
}

fn main() -> Result<()> {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => {
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        None => String::new(),
    };
    let config = parse_config(&text, &args.overrides()).with_context(|| match &args.config {
        Some(path) => format!("invalid configuration in {}", path.display()),
        None => "invalid configuration".to_string(),
    })?;
    let output = config.output.clone();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let rows = run_experiment(config, &mut lock)?;
    lock.flush()?;
    if let Some(path) = output {
        eprintln!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(())
}
