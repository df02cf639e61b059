use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qimetric_cli::commands::amplitudes::{self, AmplitudesArgs};
use qimetric_cli::commands::metric::{self, MetricArgs};
use qimetric_cli::commands::noise::{self, NoiseArgs};
use qimetric_cli::commands::sweep::{self, SweepArgs};
use qimetric_cli::commands::third_order::{self, DerivativeArg, ThirdOrderArgs};
use qimetric_cli::commands::{validate, Output};
use qimetric_cli::config::MetricSourceArg;
use qimetric_cli::{CliResult, RunConfig};

/// Perturbative amplitudes, information metric and noise spectrum of a
/// harmonically driven two-level system.
#[derive(Debug, Parser)]
#[command(name = "qimetric", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// First-order and propagated amplitudes on a time grid.
    Amplitudes(AmplitudesFlags),
    /// Metric components, line element and signature at one time.
    Metric(MetricFlags),
    /// Closed-form and high-frequency metric over a time range.
    MetricSweep(SweepFlags),
    /// Noise spectrum grid, heatmap and the two susceptibility transforms.
    Noise(NoiseFlags),
    /// Third-order tensor and the Finsler line element.
    ThirdOrder(ThirdOrderFlags),
    /// Cross-checks of every closed form against its numerical oracle.
    Validate,
}

#[derive(Debug, Args)]
struct AmplitudesFlags {
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    /// Number of sample intervals; the CSV has `steps + 1` rows.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Args)]
struct MetricFlags {
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dl1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dl2: Option<f64>,
    #[arg(long, value_enum)]
    source: Option<MetricSourceArg>,
}

#[derive(Debug, Args)]
struct SweepFlags {
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    /// Number of time samples, endpoints included.
    #[arg(long)]
    nt: Option<usize>,
}

#[derive(Debug, Args)]
struct NoiseFlags {
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    omega1: Option<f64>,
    #[arg(long)]
    nomega: Option<usize>,
    /// Time at which the susceptibility transforms are evaluated.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
struct ThirdOrderFlags {
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dl1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dl2: Option<f64>,
    /// Use the state (1 + lambda1^2, lambda2^2) instead of the perturbed ground state.
    #[arg(long)]
    synthetic: bool,
    #[arg(long, value_enum, default_value = "analytic")]
    derivatives: DerivativeArg,
}

fn run(cli: Cli) -> CliResult<Output> {
    let path = cli.config.ok_or_else(|| {
        qimetric_cli::CliError::Config("missing --config <PATH>".into())
    })?;
    let cfg = RunConfig::load(&path)?;
    let out = cli.out.unwrap_or_else(|| cfg.output.directory.clone());
    match cli.command {
        Command::Amplitudes(f) => {
            let mut a = AmplitudesArgs::from_config(&cfg);
            a.t0 = f.t0.unwrap_or(a.t0);
            a.t1 = f.t1.unwrap_or(a.t1);
            a.steps = f.steps.unwrap_or(a.steps);
            amplitudes::run(&cfg, a, &out)
        }
        Command::Metric(f) => {
            let mut a = MetricArgs::from_config(&cfg);
            a.t = f.t.unwrap_or(a.t);
            a.dl1 = f.dl1.unwrap_or(a.dl1);
            a.dl2 = f.dl2.unwrap_or(a.dl2);
            a.source = f.source.unwrap_or(a.source);
            metric::run(&cfg, a, &out)
        }
        Command::MetricSweep(f) => {
            let mut a = SweepArgs::from_config(&cfg);
            a.t0 = f.t0.unwrap_or(a.t0);
            a.t1 = f.t1.unwrap_or(a.t1);
            a.nt = f.nt.unwrap_or(a.nt);
            sweep::run(&cfg, a, &out)
        }
        Command::Noise(f) => {
            let mut a = NoiseArgs::from_config(&cfg);
            a.t0 = f.t0.unwrap_or(a.t0);
            a.t1 = f.t1.unwrap_or(a.t1);
            a.nt = f.nt.unwrap_or(a.nt);
            a.omega0 = f.omega0.unwrap_or(a.omega0);
            a.omega1 = f.omega1.unwrap_or(a.omega1);
            a.nomega = f.nomega.unwrap_or(a.nomega);
            a.t = f.t.unwrap_or(a.t);
            noise::run(&cfg, a, &out)
        }
        Command::ThirdOrder(f) => {
            let mut a = ThirdOrderArgs::from_config(&cfg);
            a.t = f.t.unwrap_or(a.t);
            a.dl1 = f.dl1.unwrap_or(a.dl1);
            a.dl2 = f.dl2.unwrap_or(a.dl2);
            a.synthetic = f.synthetic;
            a.derivatives = f.derivatives;
            third_order::run(&cfg, a, &out)
        }
        Command::Validate => validate::run(&cfg, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(output) => {
            print!("{}", output.report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qimetric: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
