use std::path::PathBuf;
use std::process::ExitCode;

use agdplus::harness::{prepare, run_experiment, run_sweep, write_experiment};
use agdplus::oracle::NoiseSpec;
use agdplus::{Experiment, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "agdplus",
    version,
    about = "Run AGD+ convergence experiments under noisy gradient oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration for the configured number of repeats.
    Run(RunArgs),
    /// Run a matrix of method variants x Gaussian noise levels.
    Sweep(RunArgs),
    /// Print the reference optimum f* of the configured problem.
    Reference {
        #[arg(short, long)]
        config: PathBuf,
        /// Also print the minimizer.
        #[arg(long)]
        point: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(short, long)]
    config: PathBuf,
    /// Seed of the first repeat; repeat r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Replace the oracle with Gaussian noise of this per-coordinate sigma.
    #[arg(long)]
    sigma: Option<f64>,
    /// Keep about this many log-spaced rows per trace.
    #[arg(long)]
    thin: Option<usize>,
    /// Worker threads for concurrent repeats.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(short, long, default_value = "out")]
    out_dir: PathBuf,
}

impl RunArgs {
    fn load(&self) -> Result<Experiment> {
        let mut cfg = Experiment::from_file(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.repeats {
            cfg.repeats = r;
        }
        if let Some(k) = self.iterations {
            cfg.method.iterations = k;
        }
        if let Some(sigma) = self.sigma {
            cfg.oracle = NoiseSpec::Gaussian { sigma };
        }
        if self.thin.is_some() {
            cfg.thin = self.thin;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = args.load()?;
    let out = run_experiment(&cfg)?;
    let files = write_experiment(&out, &cfg, &args.out_dir)?;
    let k = cfg.method.iterations;
    println!(
        "{} on {}: f* = {}, {} repeat(s), {k} iterations",
        cfg.method.label(),
        out.prepared.problem.name,
        out.prepared.reference.value,
        out.runs.len()
    );
    if let Some(last) = out.aggregate.as_ref().and_then(|a| a.rows.last()) {
        println!(
            "final gap: median {:e} (q25 {:e}, q75 {:e})",
            last.median, last.q25, last.q75
        );
    }
    let restarts: usize = out.runs.iter().map(|r| r.meta.restarts.len()).sum();
    if restarts > 0 {
        println!("restarts: {restarts} across all repeats");
    }
    println!("wrote {} files to {}", files.len(), args.out_dir.display());
    Ok(())
}

fn sweep(args: RunArgs) -> Result<()> {
    let cfg = args.load()?;
    let files = run_sweep(&cfg, &args.out_dir)?;
    println!("wrote {} files to {}", files.len(), args.out_dir.display());
    Ok(())
}

fn reference(config: PathBuf, point: bool) -> Result<()> {
    let cfg = Experiment::from_file(&config)?;
    let prep = prepare(&cfg)?;
    let p = &prep.problem;
    let mut report = serde_json::json!({
        "problem": p.name,
        "dim": p.dim(),
        "smoothness": p.smoothness,
        "strong_convexity": p.strong_convexity,
        "f_star": prep.reference.value,
        "method": prep.reference.method,
        "certificate": prep.reference.certificate,
    });
    if point {
        report["x_star"] = serde_json::json!(prep.reference.point.to_vec());
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("json values serialize")
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Reference { config, point } => reference(config, point),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
