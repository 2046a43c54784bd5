use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use streamdrift::presets::{run_preset, PresetOptions, PRESETS};
use streamdrift::runner::{execute, summary_table};
use streamdrift::{Error, ExperimentConfig};

/// Prequential benchmarks on drifting streams.
#[derive(Parser, Debug)]
#[command(name = "streamdrift", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named preset or an experiment config file.
    Run(RunArgs),
    /// List the available presets.
    Presets,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Preset name (see `streamdrift presets`).
    #[arg(required_unless_present = "config", conflicts_with = "config")]
    preset: Option<String>,

    /// Experiment config file (TOML).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Run with this single seed instead of the configured ones.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory. Defaults to `out/<preset or experiment name>`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Parallel runs; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Directory holding the real datasets for table4 and table6-timing.
    #[arg(long, value_name = "DIR", env = "STREAMDRIFT_DATA", default_value = "data")]
    data_dir: PathBuf,
}

fn run(args: RunArgs) -> Result<(), Error> {
    if let Some(path) = &args.config {
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = args.seed {
            cfg.seeds = vec![seed];
        }
        let out = args
            .out
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
        let (_, results, artifacts) = execute(cfg, &out, args.jobs)?;
        print!("{}", summary_table(&results));
        println!("wrote {} runs to {}", artifacts.csvs.len(), out.display());
        return Ok(());
    }
    let name = args.preset.expect("clap requires a preset without --config");
    let opts = PresetOptions {
        seed: args.seed,
        data_dir: args.data_dir,
    };
    let out = args.out.unwrap_or_else(|| PathBuf::from("out").join(&name));
    let report = run_preset(&name, &opts, &out, args.jobs)?;
    print!("{report}");
    println!("wrote {}", out.display());
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
        Command::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            Ok(())
        }
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
