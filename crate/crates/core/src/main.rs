use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spreadlab::experiment::{run_and_emit, ExperimentConfig, OutputFormat, RunError};

/// Monte Carlo experiments on message spreading among transmitters and
/// receivers.
#[derive(Debug, Parser)]
#[command(name = "spreadlab", version)]
struct Args {
    /// Experiment config file (TOML).
    #[arg(long, value_name = "PATH", required_unless_present = "print_config")]
    config: Option<PathBuf>,
    /// Master seed; overrides `master_seed` in the config.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Replicate count; overrides `replicates` in the config.
    #[arg(long, value_name = "N")]
    replicates: Option<usize>,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Row format; overrides `format` in the config.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads, 0 = one per CPU.
    #[arg(long, value_name = "N", env = "SPREADLAB_THREADS", default_value_t = 0)]
    threads: usize,
    /// Print the effective config (defaults when no --config) with every key
    /// spelled out, then exit.
    #[arg(long)]
    print_config: bool,
}

fn load(args: &Args) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load(&args).and_then(|cfg| {
        if args.print_config {
            print!("{}", cfg.to_toml());
            return Ok(Vec::new());
        }
        let dir = PathBuf::from(&cfg.out_dir);
        run_and_emit(&cfg, args.threads, &dir, cfg.format)
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("spreadlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
