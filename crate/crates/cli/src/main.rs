use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use piezodyn_cli::commands;
use piezodyn_cli::{preset, CliError, RunConfig, PRESETS};

#[derive(Debug, Parser)]
#[command(name = "piezodyn", version, about = "Transient voltage of a damped piezoelectric rod")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the boundary and voltage time series as CSV.
    Simulate {
        #[command(flatten)]
        input: Input,
        /// Also plot the voltage as SVG.
        #[arg(long)]
        svg: bool,
    },
    /// Cross-check the solution; exits with 2 if a tolerance is exceeded.
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Run the `[sweep]` axes and write one summary row per run.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long, value_name = "K")]
        workers: Option<usize>,
    },
    /// Write interior field profiles at `output.snapshot_times`.
    Fields {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH", required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration.
    #[arg(long, value_parser = PRESETS)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

impl Input {
    fn load(&self) -> Result<(RunConfig, String), CliError> {
        match (&self.config, &self.preset) {
            (Some(path), _) => {
                let name = path
                    .file_stem()
                    .map_or_else(|| "run".to_owned(), |s| s.to_string_lossy().into_owned());
                Ok((RunConfig::load(path)?, name))
            }
            (None, Some(name)) => Ok((preset(name).expect("validated by clap"), name.clone())),
            (None, None) => unreachable!("clap requires one input"),
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Simulate { input, svg } => {
            let (config, name) = input.load()?;
            for path in commands::simulate(&config, &name, &input.out, svg)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Validate { input, inject_fault } => {
            let (config, _) = input.load()?;
            let report = commands::validate(&config, inject_fault)?;
            print!("{report}");
            if !report.passed() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Sweep { input, workers } => {
            let (config, name) = input.load()?;
            let workers = workers.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            });
            let (path, rows) = commands::sweep(&config, &name, &input.out, workers)?;
            println!("wrote {} ({rows} runs)", path.display());
        }
        Command::Fields { input } => {
            let (config, _) = input.load()?;
            for (t, path) in commands::fields(&config, &input.out)? {
                println!("t = {t:e} s: wrote {}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
