//! Calibrate the free-space link budget and print the range-keyed
//! adaptation table with its derived SNR thresholds, plus the SNR-vs-range
//! curve the thresholds come from.
//!
//! Run with: `cargo run --release -p isac-sim --example link_adaptation`

use isac_sim::link_adapt::{calibrate_budget, snr_at_range, McsPolicy};
use isac_sim::SPEED_OF_LIGHT;

fn main() {
    let lambda = SPEED_OF_LIGHT / 60e9;
    let budget = calibrate_budget(10.0, 7.80, lambda, 1e-11).unwrap();
    println!(
        "calibrated budget: Pt*Gt*Gr = {:.4} mW at lambda = {:.3} mm, Np = -80 dBm",
        budget.ptgtgr * 1e3,
        lambda * 1e3
    );

    let policy = McsPolicy::standard(&budget).unwrap();
    println!("\nrange (m)      SNR threshold (dB)   scheme");
    let mut last = 0.0;
    for (bp, snr) in policy
        .breakpoints()
        .iter()
        .zip(policy.snr_breakpoints_db().iter().map(Some).chain([None]))
    {
        match snr {
            Some(snr) => println!(
                "{:>4.1} - {:<5.1}  > {snr:<18.2} {}",
                last,
                bp.max_range_m,
                bp.scheme.name()
            ),
            None => println!(
                "{:>4.1} +        (below)             {}",
                last,
                bp.scheme.name()
            ),
        }
        last = bp.max_range_m;
    }

    println!("\nSNR over range (20 dB/decade):");
    for d in [1.0, 2.0, 4.0, 6.0, 10.0, 16.0, 25.0, 40.0] {
        let snr = snr_at_range(&budget, d).unwrap();
        println!(
            "  d = {d:>5.1} m: {snr:>6.2} dB -> {}",
            policy.select_mcs(d).name()
        );
    }
}
