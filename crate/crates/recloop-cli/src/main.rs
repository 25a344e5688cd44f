//! recloop: run single closed-loop simulations, the replication sweep
//! campaigns, or emit the model-curve CSVs.
//!
//! Exit codes: 0 on success, 1 for configuration problems, 2 for I/O
//! problems.

use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use recloop_core::artifacts::{emit_curves, emit_run_artifacts};
use recloop_core::sweep::{run_sweep_with_progress, SweepError, SweepSpec};
use recloop_core::{run, SimulationConfig};

#[derive(Parser)]
#[command(
    name = "recloop",
    version,
    about = "Closed-loop recommender/opinion simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation from a JSON configuration file.
    Simulate {
        /// Path to a JSON file mirroring the simulation configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the seed from the configuration file.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for per-run artifact CSVs (omit to print metrics only).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record the full recommendation trace (users x steps entries).
        #[arg(long)]
        trace: bool,
    },
    /// Run one of the replication campaigns.
    Sweep {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Replications per grid point (default 50; 10 is a reasonable
        /// desk-scale setting for the heatmap).
        #[arg(long)]
        reps: Option<u32>,
        /// Override the susceptibility applied to every user.
        #[arg(long)]
        lambda: Option<f64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory (default: runs/<preset>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write sampled curves of the behavioural maps as CSV.
    Curves {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Preset {
    Rq1,
    Rq2,
    Rq2Ext,
    Rq3Omega,
    Rq3Heatmap,
}

impl Preset {
    fn spec(self) -> SweepSpec {
        match self {
            Preset::Rq1 => SweepSpec::preset_rq1(),
            Preset::Rq2 => SweepSpec::preset_rq2(),
            Preset::Rq2Ext => SweepSpec::preset_rq2_extended(),
            Preset::Rq3Omega => SweepSpec::preset_rq3_omega(),
            Preset::Rq3Heatmap => SweepSpec::preset_rq3_heatmap(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Preset::Rq1 => "rq1",
            Preset::Rq2 => "rq2",
            Preset::Rq2Ext => "rq2-ext",
            Preset::Rq3Omega => "rq3-omega",
            Preset::Rq3Heatmap => "rq3-heatmap",
        }
    }
}

enum CliError {
    Config(String),
    Io(String),
}

impl From<SweepError> for CliError {
    fn from(err: SweepError) -> Self {
        match err {
            SweepError::Io { .. } | SweepError::Corrupt { .. } => CliError::Io(err.to_string()),
            _ => CliError::Config(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    // Argument mistakes are configuration errors per the exit contract.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            out,
            trace,
        } => simulate(config, seed, out, trace),
        Command::Sweep {
            preset,
            reps,
            lambda,
            workers,
            out,
        } => sweep(preset, reps, lambda, workers, out),
        Command::Curves { out } => {
            let files = emit_curves(&out).map_err(CliError::from)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

fn simulate(
    config_path: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    trace: bool,
) -> Result<(), CliError> {
    let text = fs::read_to_string(&config_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", config_path.display())))?;
    let mut config: SimulationConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", config_path.display())))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if trace {
        config.trace.recommendations = true;
    }
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let summary = config.clone();
    let result = run(config).map_err(|e| CliError::Config(e.to_string()))?;

    println!(
        "run: {} users={} steps={} k={} alpha={} omega={} delta={} lambda={} seed={}",
        summary.initial_opinions.label(),
        summary.users,
        summary.steps,
        summary.k,
        summary.alpha,
        summary.omega,
        summary.delta,
        summary.lambda,
        summary.seed
    );
    println!("likes_pct        {:.4}", result.metrics.likes_pct);
    println!("watch_rate_pct   {:.4}", result.metrics.watch_rate_pct);
    println!(
        "dispersion       {:.6} -> {:.6}",
        result.dispersion_initial, result.metrics.dispersion
    );
    println!(
        "radicalisation   {:.6} -> {:.6}",
        result.radicalisation_initial, result.metrics.radicalisation
    );
    let pct = |f: f64, i: f64| {
        recloop_core::metrics::pct_change(f, i)
            .map(|v| format!("{v:.2}%"))
            .unwrap_or_else(|| "undefined".to_string())
    };
    println!(
        "dispersion_change     {}",
        pct(result.metrics.dispersion, result.dispersion_initial)
    );
    println!(
        "radicalisation_change {}",
        pct(result.metrics.radicalisation, result.radicalisation_initial)
    );
    println!(
        "dominance        {:.4} (stance {})",
        result.metrics.dominance, result.metrics.viral_stance
    );

    if let Some(out) = out {
        let files = emit_run_artifacts(&result, &out).map_err(CliError::from)?;
        for f in files {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn sweep(
    preset: Preset,
    reps: Option<u32>,
    lambda: Option<f64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut spec = preset.spec();
    if let Some(reps) = reps {
        spec.replications = reps;
    }
    if let Some(lambda) = lambda {
        spec.base.lambda = lambda;
    }
    let out = out.unwrap_or_else(|| PathBuf::from("runs").join(preset.name()));
    let workers = workers.unwrap_or(0);

    let total_runs = spec.grid().len() * spec.replications as usize;
    eprintln!(
        "sweep {}: {} grid points x {} reps = {} runs -> {}",
        preset.name(),
        spec.grid().len(),
        spec.replications,
        total_runs,
        out.display()
    );
    let table = run_sweep_with_progress(&spec, workers, &out, |done, total| {
        if done % 50 == 0 || done == total {
            eprintln!("  {done}/{total} runs");
        }
    })?;
    println!(
        "executed {} runs ({} resumed), {} aggregate rows -> {}",
        table.executed_runs,
        table.raw.len() - table.executed_runs,
        table.aggregate.len(),
        out.display()
    );
    Ok(())
}
