//! `phtraj`: command-line driver for the trajectory simulator.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when a simulation or
//! validation fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use photon_trajectories::analysis::{
    run_sweep, run_validation, Experiment, SweepResult, SweepSpec, VALIDATION_MAX_ABS, VALIDATION_MAX_Z,
};
use photon_trajectories::engine::{Execution, NoiseKind};
use photon_trajectories::vqa::{run_vqa, VqaConfig};
use photon_trajectories::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_SIMULATION: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "phtraj", version, about = "Noisy linear-optical circuits by stochastic trajectories")]
struct Cli {
    /// Master seed; overrides the one in a spec or config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trajectories per point; overrides the file value.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Evaluate on one thread without rayon.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One experiment at one error probability.
    Run {
        #[arg(long, value_parser = parse_experiment)]
        experiment: Experiment,
        #[arg(long, value_parser = parse_noise)]
        noise: NoiseKind,
        #[arg(long)]
        p: f64,
        /// Report states without herald normalization.
        #[arg(long)]
        raw: bool,
    },
    /// A noise sweep described by a JSON spec file.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        raw: bool,
    },
    /// Variational optimization described by a JSON config file.
    Vqa { config: PathBuf },
    /// Compare trajectory averages against the exact channel.
    Validate {
        #[arg(long, default_value_t = 0.05)]
        p: f64,
    },
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_noise(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Error with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_config() { EXIT_CONFIG } else { EXIT_SIMULATION };
        Failure(code, e.to_string())
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure(EXIT_CONFIG, msg.into())
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_SIMULATION, format!("{}: {e}", path.display()))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// Write `bytes` to `<out>/<name>` or to stdout.
fn emit(out: &Option<PathBuf>, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| io_err(&path, e))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure(EXIT_SIMULATION, e.to_string())),
    }
}

fn emit_sweep(cli: &Cli, stem: &str, result: &SweepResult) -> Result<(), Failure> {
    match cli.format {
        Format::Csv => {
            let mut buf = Vec::new();
            result.write_csv(&mut buf)?;
            emit(&cli.out, &format!("{stem}.csv"), &buf)
        }
        Format::Json => emit(&cli.out, &format!("{stem}.json"), result.to_json()?.as_bytes()),
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_err("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_err(e.to_string()))?;
    }
    let execution = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match &cli.command {
        Command::Run { experiment, noise, p, raw } => {
            let mut spec = SweepSpec::new(*experiment, *noise, vec![*p], cli.samples.unwrap_or(10_000), cli.seed.unwrap_or(0));
            spec.raw = *raw;
            let result = run_sweep(&spec, execution)?;
            emit_sweep(cli, "run", &result)
        }
        Command::Sweep { spec, raw } => {
            let mut spec = SweepSpec::from_json(&read_input(spec)?)?;
            if let Some(s) = cli.seed {
                spec.seed = s;
            }
            if let Some(n) = cli.samples {
                spec.n_samples = n;
            }
            spec.raw |= *raw;
            spec.validate()?;
            let result = run_sweep(&spec, execution)?;
            emit_sweep(cli, &format!("sweep_{}_{}", spec.experiment, spec.noise_type.label()), &result)
        }
        Command::Vqa { config } => {
            let mut cfg = VqaConfig::from_json(&read_input(config)?)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(n) = cli.samples {
                cfg.n_samples = n;
            }
            cfg.validate()?;
            let report = run_vqa(&cfg, execution)?;
            match &cli.out {
                Some(dir) => report.write_to(dir).map_err(Failure::from),
                None => emit(&None, "", report.summary_json()?.as_bytes()),
            }
        }
        Command::Validate { p } => {
            let cases = run_validation(*p, cli.samples.unwrap_or(100_000), cli.seed.unwrap_or(0), execution)?;
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&cases).map_err(Error::from)?,
                Format::Csv => {
                    let mut s = String::from("case,max_z,max_abs,passed\n");
                    for c in &cases {
                        s.push_str(&format!("{},{},{},{}\n", c.name, c.max_z, c.max_abs, c.passed));
                    }
                    s
                }
            };
            let ext = if cli.format == Format::Json { "json" } else { "csv" };
            emit(&cli.out, &format!("validate.{ext}"), text.as_bytes())?;
            let failed: Vec<&str> = cases.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure(
                    EXIT_SIMULATION,
                    format!(
                        "validation failed for {} (limits: {VALIDATION_MAX_Z} standard errors, {VALIDATION_MAX_ABS} absolute)",
                        failed.join(", ")
                    ),
                ))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("phtraj: {msg}");
            ExitCode::from(code)
        }
    }
}
