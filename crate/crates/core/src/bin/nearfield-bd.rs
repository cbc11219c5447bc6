use clap::{ArgGroup, Parser, Subcommand};
use nearfield_bd::experiments::{run_experiment, ExperimentConfig};
use nearfield_bd::{presets, Error};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nearfield-bd", version, about = "Near-field beam depth experiments as CSV sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config or a built-in preset.
    #[command(group(ArgGroup::new("source").required(true).args(["config", "preset"])))]
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Output CSV path; overrides the config. Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "NEARFIELD_BD_THREADS")]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List built-in presets.
    Presets,
}

fn run(
    config: Option<PathBuf>,
    preset: Option<String>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    seed: Option<u64>,
) -> nearfield_bd::Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut cfg = match (&config, &preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(name)) => presets::load(name)?,
        _ => return Err(Error::Config("give exactly one of --config or --preset".into())),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let table = run_experiment(&cfg)?;
    let label = preset.as_deref();
    match out.or(cfg.output.clone()) {
        Some(path) => {
            let file = File::create(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            table.write_csv(BufWriter::new(file), cfg.experiment, label)
        }
        None => table.write_csv(io::stdout().lock(), cfg.experiment, label),
    }
}

fn report(err: &Error) {
    eprintln!("error: {err}");
    if let Error::Sweep { failures } = err {
        for (i, e) in failures {
            eprintln!("  sweep index {i}: {e}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            print!("{}", presets::listing());
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            preset,
            out,
            threads,
            seed,
        } => match run(config, preset, out, threads, seed) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                report(&e);
                ExitCode::from(if e.is_validation() { 2 } else { 3 })
            }
        },
    }
}
