//! Thin CLI over the simulator library: single-arm runs, the
//! adaptive-vs-fixed comparison, and the built-in invariant suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isac_sim::config::{PolicyMode, RunConfig};
use isac_sim::output::{emit_compare_outputs, emit_outputs};
use isac_sim::selftest::run_selftest;
use isac_sim::sim::{compare_arms, run_simulation};
use isac_sim::trajectory::TrajectoryKind;

#[derive(Parser)]
#[command(
    name = "isac-sim",
    about = "Radar-sensing 60 GHz link simulator with range-based adaptive modulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Flat key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trajectory override (u_shaped, figure_of_eight, sine, hybrid).
    #[arg(long)]
    trajectory: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one arm (the configured policy) and write its outputs.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Policy override: adaptive, bpsk, qpsk, qam16 or qam64.
        #[arg(long)]
        policy: Option<String>,
    },
    /// Run the adaptive arm against all four fixed baselines with shared
    /// sensing and common random numbers.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

fn load_config(common: &CommonArgs) -> isac_sim::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(traj) = &common.trajectory {
        cfg.trajectory = TrajectoryKind::parse(traj)?;
    }
    Ok(cfg)
}

fn cmd_run(common: &CommonArgs, policy: Option<&str>) -> isac_sim::Result<()> {
    let mut cfg = load_config(common)?;
    if let Some(p) = policy {
        cfg.policy = PolicyMode::parse(p)?;
    }
    eprintln!(
        "running {} / {} / seed {} ...",
        cfg.trajectory.name(),
        cfg.policy.name(),
        cfg.seed
    );
    let (records, report) = run_simulation(&cfg)?;
    emit_outputs(&records, &report, &cfg.out_dir)?;
    println!(
        "{}: {} frames, avg throughput {:.3} Gbit/s, avg BER {:.4}",
        cfg.policy.name(),
        records.len(),
        report.avg_throughput_bps / 1e9,
        report.avg_ber
    );
    println!("outputs in {}", cfg.out_dir.display());
    Ok(())
}

fn cmd_compare(common: &CommonArgs) -> isac_sim::Result<()> {
    let cfg = load_config(common)?;
    eprintln!(
        "comparing adaptive vs fixed arms on {} / seed {} ...",
        cfg.trajectory.name(),
        cfg.seed
    );
    let out = compare_arms(&cfg)?;
    emit_compare_outputs(&out, &cfg.out_dir)?;
    for arm in &out.arms {
        println!(
            "{:<9} avg throughput {:>7.3} Gbit/s, avg BER {:.4}",
            arm.policy.name(),
            arm.avg_throughput_bps / 1e9,
            arm.avg_ber
        );
    }
    for (scheme, imp) in &out.report.improvement_pct {
        match imp {
            Some(pct) => println!("adaptive vs {:<6} {pct:+.1}%", scheme.name()),
            None => println!(
                "adaptive vs {:<6} undefined (baseline failed)",
                scheme.name()
            ),
        }
    }
    println!("outputs in {}", cfg.out_dir.display());
    Ok(())
}

fn cmd_selftest() -> bool {
    let mut all_ok = true;
    for (name, outcome) in run_selftest() {
        match outcome {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                all_ok = false;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    all_ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, policy } => cmd_run(common, policy.as_deref()),
        Command::Compare { common } => cmd_compare(common),
        Command::Selftest => {
            return if cmd_selftest() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
