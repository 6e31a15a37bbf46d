//! Built-in invariant battery behind the `selftest` subcommand: quick
//! self-contained checks of the properties the simulator's results rest
//! on, suitable for a smoke run on a new machine.

use num_complex::Complex64;

use crate::config::RunConfig;
use crate::golay;
use crate::link_adapt::{calibrate_budget, snr_at_range, McsPolicy};
use crate::metrics::frame_throughput;
use crate::modulation::{demodulate, modulate, ModScheme};
use crate::radar::{self, RadarConfig, RadarTarget};
use crate::sim::run_simulation;

type Check = (&'static str, std::result::Result<(), String>);

fn fail(msg: impl Into<String>) -> std::result::Result<(), String> {
    Err(msg.into())
}

/// Run every self-check and return (name, outcome) pairs.
pub fn run_selftest() -> Vec<Check> {
    vec![
        ("golay complementarity 2..1024", golay_exactness()),
        ("preamble structure", preamble_structure()),
        ("adaptation table", adaptation_table()),
        ("ofdm noiseless round trip", ofdm_round_trip()),
        ("radar single-target estimates", radar_estimates()),
        ("throughput formula", throughput_formula()),
        ("short-run determinism", short_run_determinism()),
    ]
}

fn golay_exactness() -> std::result::Result<(), String> {
    let started = std::time::Instant::now();
    let mut len = 2usize;
    while len <= 1024 {
        let pair = golay::generate_golay_pair(len).map_err(|e| e.to_string())?;
        let ra = golay::autocorrelation(pair.a());
        let rb = golay::autocorrelation(pair.b());
        if ra[0] + rb[0] != 2 * len as i64 {
            return fail(format!("L={len}: zero-lag sum {}", ra[0] + rb[0]));
        }
        for k in 1..len {
            if ra[k] + rb[k] != 0 {
                return fail(format!("L={len}: lag {k} sum {}", ra[k] + rb[k]));
            }
        }
        len *= 2;
    }
    if started.elapsed() > std::time::Duration::from_secs(1) {
        return fail(format!("took {:?}, budget 1 s", started.elapsed()));
    }
    Ok(())
}

fn preamble_structure() -> std::result::Result<(), String> {
    let w = golay::standard_preamble();
    if w.len() != 768 {
        return fail(format!("preamble length {}", w.len()));
    }
    let pair = golay::generate_golay_pair(128).map_err(|e| e.to_string())?;
    let first: Vec<i8> = pair.b().iter().map(|&v| -v).collect();
    if w.samples()[..128] != first[..] {
        return fail("first block is not -b");
    }
    if golay::standard_preamble() != w {
        return fail("preamble not deterministic");
    }
    Ok(())
}

fn adaptation_table() -> std::result::Result<(), String> {
    let cfg = RunConfig::default();
    let budget =
        calibrate_budget(10.0, 7.8, cfg.radar.wavelength_m(), 1e-11).map_err(|e| e.to_string())?;
    let s16 = snr_at_range(&budget, 16.0).map_err(|e| e.to_string())?;
    let s6 = snr_at_range(&budget, 6.0).map_err(|e| e.to_string())?;
    if (s16 - 3.7176).abs() > 0.01 || (s6 - 12.2370).abs() > 0.01 {
        return fail(format!("breakpoint SNRs {s16:.3} / {s6:.3}"));
    }
    let policy = McsPolicy::standard(&budget).map_err(|e| e.to_string())?;
    for (d, want) in [
        (5.0, ModScheme::Qam64),
        (8.0, ModScheme::Qam16),
        (12.0, ModScheme::Qpsk),
        (20.0, ModScheme::Bpsk),
    ] {
        if policy.select_mcs(d) != want {
            return fail(format!("{d} m selected {:?}", policy.select_mcs(d)));
        }
    }
    Ok(())
}

fn ofdm_round_trip() -> std::result::Result<(), String> {
    for scheme in ModScheme::ALL {
        let bits: Vec<u8> = (0..384 * scheme.bits_per_symbol())
            .map(|i| ((i * 2654435761) >> 7) as u8 & 1)
            .collect();
        let syms = modulate(&bits, scheme).map_err(|e| e.to_string())?;
        let cfg = crate::ofdm::OfdmConfig::default();
        let time = crate::ofdm::ofdm_transmit(&syms, &cfg).map_err(|e| e.to_string())?;
        let grid = crate::ofdm::time_to_grid(&time[cfg.n_cp..], &cfg);
        let data: Vec<Complex64> = cfg.data_bins().map(|k| grid[k]).collect();
        if demodulate(&data, scheme) != bits {
            return fail(format!("{scheme:?} round trip"));
        }
    }
    Ok(())
}

fn radar_estimates() -> std::result::Result<(), String> {
    let cfg = RadarConfig {
        noise_power: 0.0,
        ..RadarConfig::default()
    };
    let w = golay::standard_preamble();
    let target = RadarTarget {
        range_m: 22.0,
        velocity_mps: 15.0,
        azimuth_rad: 25f64.to_radians(),
        amplitude: Complex64::new(1e-3, 0.0),
    };
    let cube = radar::synthesize_datacube(&cfg, &[target], &w, 0).map_err(|e| e.to_string())?;
    let dets = radar::detect_targets(&cube, &cfg, &w).map_err(|e| e.to_string())?;
    if dets.len() != 1 {
        return fail(format!("{} detections", dets.len()));
    }
    let d = &dets[0];
    if (d.range_m - 22.0).abs() > cfg.range_bin_m() {
        return fail(format!("range {}", d.range_m));
    }
    if (d.velocity_mps - 15.0).abs() > cfg.velocity_bin_mps() {
        return fail(format!("velocity {}", d.velocity_mps));
    }
    if (d.azimuth_rad.sin() - 25f64.to_radians().sin()).abs() > cfg.sin_azimuth_bin() {
        return fail(format!("azimuth {}", d.azimuth_rad.to_degrees()));
    }
    Ok(())
}

fn throughput_formula() -> std::result::Result<(), String> {
    if frame_throughput(ModScheme::Qam64, 0.0) != 9.504e9 {
        return fail("peak rate");
    }
    if crate::metrics::overhead() != 0.6 {
        return fail("overhead");
    }
    if frame_throughput(ModScheme::Qpsk, 0.2) != 0.0 {
        return fail("failure gate");
    }
    Ok(())
}

fn short_run_determinism() -> std::result::Result<(), String> {
    let mut cfg = RunConfig::default();
    cfg.radar.num_pulses = 64;
    cfg.radar.num_rx_antennas = 8;
    cfg.ofdm.symbols_per_frame = 4;
    cfg.scene.duration_s = 0.1;
    cfg.seed = 5;
    let (a, _) = run_simulation(&cfg).map_err(|e| e.to_string())?;
    let (b, _) = run_simulation(&cfg).map_err(|e| e.to_string())?;
    let csv_a = crate::output::frames_csv(&a);
    let csv_b = crate::output::frames_csv(&b);
    if csv_a != csv_b {
        return fail("two identical runs produced different CSV bytes");
    }
    Ok(())
}
