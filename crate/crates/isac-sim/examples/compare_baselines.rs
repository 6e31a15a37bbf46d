//! Adaptive modulation against the four fixed baselines on one
//! trajectory, with shared sensing and common random numbers.
//!
//! Run with:
//! `cargo run --release -p isac-sim --example compare_baselines [trajectory]`
//! where `trajectory` is one of u_shaped, figure_of_eight, sine, hybrid
//! (default: a shortened figure_of_eight).

use isac_sim::sim::compare_arms;
use isac_sim::trajectory::TrajectoryKind;
use isac_sim::RunConfig;

fn main() {
    let mut cfg = RunConfig::default();
    match std::env::args().nth(1) {
        Some(name) => cfg.trajectory = TrajectoryKind::parse(&name).unwrap(),
        None => {
            cfg.trajectory = TrajectoryKind::FigureOfEight;
            cfg.scene.duration_s = 2.0;
        }
    }
    eprintln!("comparing on {} ...", cfg.trajectory.name());
    let out = compare_arms(&cfg).unwrap();

    println!("arm        avg throughput   avg BER");
    for arm in &out.arms {
        println!(
            "{:<9} {:>8.3} Gbit/s   {:.4}",
            arm.policy.name(),
            arm.avg_throughput_bps / 1e9,
            arm.avg_ber
        );
    }
    println!();
    for (scheme, imp) in &out.report.improvement_pct {
        match imp {
            Some(pct) => println!("adaptive vs {:<6}: {pct:+.1}%", scheme.name()),
            None => println!("adaptive vs {:<6}: baseline never succeeded", scheme.name()),
        }
    }
}
