//! Synthesize one radar data cube for a chosen target, run the full
//! detection chain and print estimates against ground truth.
//!
//! Run with: `cargo run --release -p isac-sim --example radar_snapshot`

use isac_sim::golay::standard_preamble;
use isac_sim::radar::{detect_targets, synthesize_datacube, RadarConfig, RadarTarget};
use num_complex::Complex64;

fn main() {
    let cfg = RadarConfig::default();
    let waveform = standard_preamble();
    println!(
        "radar: {} antennas x {} pulses x {} fast-time samples",
        cfg.num_rx_antennas,
        cfg.num_pulses,
        cfg.fast_time_len()
    );
    println!(
        "bins: range {:.4} m, velocity {:.2} m/s, sin-azimuth {:.3}",
        cfg.range_bin_m(),
        cfg.velocity_bin_mps(),
        cfg.sin_azimuth_bin()
    );

    let truth: [(&str, f64, f64, f64, f64); 2] = [
        ("mobile user", 17.3, 12.0, 28.0, 1.0 / (17.3 * 17.3)),
        ("static clutter", 33.0, 0.0, -40.0, 1.0 / (33.0 * 33.0)),
    ];
    let targets: Vec<RadarTarget> = truth
        .iter()
        .map(|&(_, r, v, az_deg, a)| RadarTarget {
            range_m: r,
            velocity_mps: v,
            azimuth_rad: az_deg.to_radians(),
            amplitude: Complex64::new(a, 0.0),
        })
        .collect();

    let cube = synthesize_datacube(&cfg, &targets, &waveform, 7).unwrap();
    let detections = detect_targets(&cube, &cfg, &waveform).unwrap();

    println!("\ntruth:");
    for (name, r, v, az, _) in truth {
        println!("  {name:<14} r = {r:>6.2} m, v = {v:>6.2} m/s, az = {az:>6.1} deg");
    }
    println!("detections (by power):");
    for d in &detections {
        println!(
            "  {:<14} r = {:>6.2} m, v = {:>6.2} m/s, az = {:>6.1} deg",
            if d.moving { "moving" } else { "static" },
            d.range_m,
            d.velocity_mps,
            d.azimuth_rad.to_degrees()
        );
    }
}
