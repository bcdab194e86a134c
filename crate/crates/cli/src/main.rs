use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rodsim_cli::config::{
    apply_overrides, config_hash, load_config, CliError, ExperimentConfig, Overrides,
};
use rodsim_cli::experiment::{kernel_values, run_experiment, KernelChannel};
use rodsim_cli::report::{format_kernel_table, RunMeta};
use rodsim_cli::selftest;
use rodsim_core::params::Regime;

/// Brownian dynamics of a rod-like particle: anisotropic translational and
/// rotational Langevin simulation with classical white or quantum colored
/// bath noise, validated against closed-form oracles.
#[derive(Parser)]
#[command(name = "rodsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JobsArg {
    /// Worker threads (defaults to the hardware concurrency).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file (including sweeps).
    Run {
        config: PathBuf,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of trajectories.
        #[arg(long)]
        trajectories: Option<u64>,
        /// Override the bath regime.
        #[arg(long, value_parser = ["classical", "quantum"])]
        mode: Option<String>,
        /// Output directory (default: config, then $RODSIM_OUT_DIR, then ".").
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        jobs: JobsArg,
    },
    /// Tabulate the colored-noise autocovariance kernel of a quantum config.
    KernelTable {
        config: PathBuf,
        /// Largest lag to tabulate.
        #[arg(long)]
        tau_max: f64,
        /// Number of grid points from 0 to tau-max.
        #[arg(long, default_value_t = 129)]
        points: usize,
        /// Tabulate lags in [-tau-max, tau-max] instead of [0, tau-max].
        #[arg(long)]
        symmetric: bool,
        /// Which per-component kernel to tabulate.
        #[arg(long, default_value = "torque", value_parser = ["force-par", "force-perp", "torque"])]
        channel: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full acceptance suite and report one line per criterion.
    Selftest {
        #[command(flatten)]
        jobs: JobsArg,
    },
}

fn init_jobs(jobs: &JobsArg) {
    if let Some(n) = jobs.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn default_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("RODSIM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn parse_mode(s: &str) -> Regime {
    match s {
        "quantum" => Regime::Quantum,
        _ => Regime::Classical,
    }
}

fn cmd_run(
    config: PathBuf,
    seed: Option<u64>,
    trajectories: Option<u64>,
    mode: Option<String>,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    let mut cfg: ExperimentConfig = load_config(&config)?;
    apply_overrides(
        &mut cfg,
        &Overrides {
            seed,
            trajectories,
            mode: mode.as_deref().map(parse_mode),
            output_dir: None,
        },
    );
    let out_dir = default_out_dir(out);
    let outcome = run_experiment(&cfg, &out_dir)?;
    for point in &outcome.points {
        if outcome.points.len() > 1 {
            println!("point {:03} (seed {})", point.index, point.seed);
        }
        for check in &point.checks {
            println!(
                "  check {}: estimate {:.6e} oracle {:.6e} tolerance {:.6e} -> {}",
                check.id,
                check.estimate,
                check.oracle,
                check.tolerance,
                if check.pass { "pass" } else { "FAIL" }
            );
        }
        for file in &point.files {
            println!("  wrote {}", file.display());
        }
    }
    println!("overall: {}", if outcome.all_pass { "pass" } else { "FAIL" });
    Ok(outcome.all_pass)
}

fn cmd_kernel_table(
    config: PathBuf,
    tau_max: f64,
    points: usize,
    symmetric: bool,
    channel: &str,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = load_config(&config)?;
    let channel = match channel {
        "force-par" => KernelChannel::ForceParallel,
        "force-perp" => KernelChannel::ForcePerpendicular,
        _ => KernelChannel::Torque,
    };
    let points = points.max(2);
    let taus: Vec<f64> = if symmetric {
        (0..2 * points - 1)
            .map(|k| -tau_max + tau_max * k as f64 / (points - 1) as f64)
            .collect()
    } else {
        (0..points)
            .map(|k| tau_max * k as f64 / (points - 1) as f64)
            .collect()
    };
    let values = kernel_values(&cfg.bath, channel, &taus)?;
    let meta = RunMeta {
        config_hash: config_hash(&cfg),
        seed: cfg.experiment.seed,
    };
    let dir = default_out_dir(out);
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let path = dir.join("kernel.csv");
    std::fs::write(&path, format_kernel_table(&taus, &values, &meta)).map_err(|source| {
        CliError::Write {
            path: path.clone(),
            source,
        }
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_selftest() -> bool {
    let criteria = selftest::run_all();
    let mut all = true;
    for c in &criteria {
        for check in &c.checks {
            println!(
                "  check {}: estimate {:.6e} oracle {:.6e} tolerance {:.6e} -> {}",
                check.id,
                check.estimate,
                check.oracle,
                check.tolerance,
                if check.pass { "pass" } else { "FAIL" }
            );
        }
        let pass = c.pass();
        all &= pass;
        println!(
            "criterion {} ({}): {}",
            c.number,
            c.name,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("selftest: {}", if all { "PASS" } else { "FAIL" });
    all
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<bool, CliError> = match cli.command {
        Command::Run {
            config,
            seed,
            trajectories,
            mode,
            out,
            jobs,
        } => {
            init_jobs(&jobs);
            cmd_run(config, seed, trajectories, mode, out)
        }
        Command::KernelTable {
            config,
            tau_max,
            points,
            symmetric,
            channel,
            out,
        } => cmd_kernel_table(config, tau_max, points, symmetric, &channel, out).map(|()| true),
        Command::Selftest { jobs } => {
            init_jobs(&jobs);
            Ok(cmd_selftest())
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
