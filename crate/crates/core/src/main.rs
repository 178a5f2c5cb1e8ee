use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirac_cavity::config::{load_config_with_overrides, parse_override, BASELINE_DOCUMENT};
use dirac_cavity::sweep::{
    format_float, parse_axis, parse_tie, preset, run_sweep, SweepSpec, PRESETS,
};
use dirac_cavity::validate::{run_all, DEFAULT_SEED};
use dirac_cavity::{entropy_at, Error, RunConfig};

/// Cavity-mediated pseudospin entanglement of two Dirac quasiparticles.
#[derive(Parser)]
#[command(name = "dirac-cavity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy and Born ratio at one parameter point.
    Point(ConfigArgs),
    /// Evaluate a preset or custom grid and write CSV.
    Sweep(SweepArgs),
    /// Run the oracle suites; exit status 2 when any fails.
    Validate {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// List preset sweeps.
    Presets,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration; the built-in reference point when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set p1_eV=0.1` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, conflicts_with = "axis")]
    preset: Option<String>,
    /// Custom axis `key:min:max:count[:log]` (one or two).
    #[arg(long)]
    axis: Vec<String>,
    /// Custom tie `target=source` or `target=offset+scale*source`.
    #[arg(long)]
    tie: Vec<String>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

enum Failure {
    Usage(String),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(args: &ConfigArgs) -> Result<RunConfig, Failure> {
    let source = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        None => BASELINE_DOCUMENT.to_string(),
    };
    let overrides = args
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<dirac_cavity::Result<Vec<_>>>()?;
    Ok(load_config_with_overrides(&source, &overrides)?)
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let base = load(&args.config)?;
    let spec = match &args.preset {
        Some(name) => {
            let mut spec = preset(name, &base)?;
            spec.ties.extend(
                args.tie
                    .iter()
                    .map(|t| parse_tie(t))
                    .collect::<dirac_cavity::Result<Vec<_>>>()?,
            );
            spec
        }
        None => {
            if args.axis.is_empty() {
                return Err(Failure::Usage(
                    "sweep needs --preset or at least one --axis".into(),
                ));
            }
            SweepSpec {
                name: "custom".into(),
                axes: args
                    .axis
                    .iter()
                    .map(|a| parse_axis(a))
                    .collect::<dirac_cavity::Result<_>>()?,
                ties: args
                    .tie
                    .iter()
                    .map(|t| parse_tie(t))
                    .collect::<dirac_cavity::Result<_>>()?,
                base,
            }
        }
    };
    spec.validate()?;
    if args.workers == 0 {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    let result = run_sweep(&spec, args.workers)?;
    let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
    match &args.out {
        Some(path) => {
            result.write_csv(path)?;
            eprintln!(
                "wrote {} rows to {} in {:.2} s ({failed} failed points)",
                result.rows.len(),
                path.display(),
                result.wall_time.as_secs_f64()
            );
        }
        None => print!("{}", result.to_csv()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Point(args) => {
            let config = load(&args)?;
            let r = entropy_at(&config)?;
            println!(
                "S={} born_ratio={}",
                format_float(r.entropy),
                format_float(r.born_ratio)
            );
            let k = r.diagnostics.kernel;
            eprintln!(
                "skipped_nodes={} beyond_cutoff={} clamp_shift={:e}",
                k.skipped_nodes, k.beyond_cutoff, r.diagnostics.clamp_shift
            );
            Ok(())
        }
        Command::Sweep(args) => sweep(&args),
        Command::Validate { seed } => {
            println!("seed {seed}");
            let reports = run_all(seed);
            for r in &reports {
                println!("{}", r.line());
            }
            if reports.iter().all(|r| r.passed) {
                Ok(())
            } else {
                Err(Failure::Validation)
            }
        }
        Command::Presets => {
            for (name, description) in PRESETS {
                println!("{name:<12} {description}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => ExitCode::from(2),
    }
}
