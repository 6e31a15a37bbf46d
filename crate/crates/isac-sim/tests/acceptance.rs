//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers (run with `-- --nocapture` to see
//! them). The heavy trajectory comparisons are computed once and shared.
//!
//! Expect a few minutes of wall time: the Monte-Carlo radar loop
//! synthesizes a full antenna x pulse x fast-time cube per frame.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use isac_sim::channel::{
    apply_comm_channel, matched_rx_weights, matched_tx_weights, steering_vector, CommChannelParams,
};
use isac_sim::golay::{autocorrelation, generate_golay_pair, standard_preamble};
use isac_sim::link_adapt::{calibrate_budget, snr_at_range, McsPolicy};
use isac_sim::metrics::{frame_throughput, overhead};
use isac_sim::modulation::{awgn_ber, modulate, ModScheme};
use isac_sim::ofdm::{build_frame, OfdmConfig, TrainingSymbol};
use isac_sim::output::frames_csv;
use isac_sim::radar::{
    detect_targets, synthesize_datacube, synthesize_datacube_into, RadarConfig, RadarTarget,
};
use isac_sim::receiver::{ofdm_receive, RxOptions, RxOutcome};
use isac_sim::sim::{compare_arms, CompareOutput};
use isac_sim::trajectory::TrajectoryKind;
use isac_sim::{RunConfig, SPEED_OF_LIGHT};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One full comparison run per trajectory, shared by criteria 6-8.
fn comparison(kind: TrajectoryKind) -> &'static CompareOutput {
    static CACHE: OnceLock<Mutex<BTreeMap<TrajectoryKind, &'static CompareOutput>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(kind).or_insert_with(|| {
        let mut cfg = RunConfig::default();
        cfg.trajectory = kind;
        cfg.seed = 1;
        let out = compare_arms(&cfg).expect("comparison run");
        Box::leak(Box::new(out))
    })
}

#[test]
fn acceptance_1_golay_exactness() {
    let start = Instant::now();
    let mut len = 2usize;
    while len <= 1024 {
        let pair = generate_golay_pair(len).unwrap();
        let ra = autocorrelation(pair.a());
        let rb = autocorrelation(pair.b());
        assert_eq!(ra[0] + rb[0], 2 * len as i64, "L={len} zero lag");
        for k in 1..len {
            assert_eq!(ra[k] + rb[k], 0, "L={len} lag {k}");
        }
        len *= 2;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1 golay exactness: PASS (L=2..1024 exact in {elapsed:?})");
}

#[test]
fn acceptance_2_estimator_accuracy_sweep() {
    let start = Instant::now();
    let cfg = RadarConfig {
        noise_power: 0.0,
        // Estimation always integrates every pulse; only the detection
        // scan is decimated.
        detection_pulse_stride: 16,
        ..RadarConfig::default()
    };
    let waveform = standard_preamble();
    let mut cube = synthesize_datacube(&cfg, &[], &waveform, 0).unwrap();

    let range_tol = 0.0568;
    let velocity_tol = cfg.velocity_bin_mps();
    assert!(velocity_tol <= 8.42);
    let sin_tol = 0.125;

    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut points = 0usize;
    for r_step in 0..43 {
        let r = 1.0 + r_step as f64;
        for v in [-15.0, 0.0, 15.0] {
            for az_step in 0..25 {
                let az_deg = -60.0 + 5.0 * az_step as f64;
                let target = RadarTarget {
                    range_m: r,
                    velocity_mps: v,
                    azimuth_rad: az_deg.to_radians(),
                    amplitude: Complex64::new(1.0 / (r * r), 0.0),
                };
                synthesize_datacube_into(&mut cube, &cfg, &[target], &waveform, 0).unwrap();
                let dets = detect_targets(&cube, &cfg, &waveform).unwrap();
                assert_eq!(dets.len(), 1, "r={r} v={v} az={az_deg}");
                let d = &dets[0];
                let range_err = (d.range_m - r).abs();
                let velocity_err = (d.velocity_mps - v).abs();
                let sin_err = (d.azimuth_rad.sin() - az_deg.to_radians().sin()).abs();
                assert!(
                    range_err <= range_tol,
                    "r={r} v={v} az={az_deg}: {range_err}"
                );
                assert!(
                    velocity_err <= velocity_tol,
                    "r={r} v={v} az={az_deg}: {velocity_err}"
                );
                assert!(sin_err <= sin_tol, "r={r} v={v} az={az_deg}: {sin_err}");
                worst = (
                    worst.0.max(range_err),
                    worst.1.max(velocity_err),
                    worst.2.max(sin_err),
                );
                points += 1;
            }
        }
    }
    println!(
        "ACCEPTANCE 2 estimator accuracy: PASS ({points} noiseless points; worst errors \
         {:.4} m / {:.3} m/s / {:.4} sin-az; {:?})",
        worst.0,
        worst.1,
        worst.2,
        start.elapsed()
    );
}

/// Full-chain BER measurement at one operating point.
fn measured_chain_ber(scheme: ModScheme, es_n0_db: f64, min_bits: usize, seed: u64) -> f64 {
    let cfg = OfdmConfig::default();
    let training = TrainingSymbol::standard(&cfg);
    let lambda = SPEED_OF_LIGHT / 60e9;
    let time_snr_db = es_n0_db - cfg.subcarrier_snr_gain_db();
    let bits_per_frame = cfg.bits_per_frame(scheme.bits_per_symbol());
    let frames = min_bits.div_ceil(bits_per_frame);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0usize;
    for trial in 0..frames {
        let bits: Vec<u8> = (0..bits_per_frame).map(|_| rng.gen_range(0..=1)).collect();
        let syms = modulate(&bits, scheme).unwrap();
        let tx = build_frame(&syms, &training, &cfg).unwrap();
        let u_bs = steering_vector(0.15, 16, lambda / 2.0, lambda);
        let u_mu = steering_vector(0.0, 4, lambda / 2.0, lambda);
        let chan = CommChannelParams {
            range_m: 20.0,
            doppler_one_way_hz: 0.0,
            bs_weights: matched_tx_weights(&u_bs),
            mu_weights: matched_rx_weights(&u_mu),
            bs_steering: u_bs,
            mu_steering: u_mu,
            snr_db: time_snr_db,
            sample_rate: cfg.sample_rate,
            rng_seed: seed ^ (7770 + trial as u64),
        };
        let rx = apply_comm_channel(&tx, &chan).unwrap();
        match ofdm_receive(&rx, &cfg, scheme, &training, &RxOptions::default()) {
            RxOutcome::Decoded { bits: rx_bits, .. } => {
                errors += bits.iter().zip(&rx_bits).filter(|(a, b)| a != b).count();
            }
            RxOutcome::Erased { .. } => errors += bits_per_frame / 2,
        }
    }
    errors as f64 / (frames * bits_per_frame) as f64
}

/// Symbol SNR (dB) where the analytic BER crosses `target`.
fn snr_for_ber(scheme: ModScheme, target: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0f64, 30.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if awgn_ber(scheme, 10f64.powf(mid / 10.0)) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn acceptance_3_modem_fidelity() {
    let start = Instant::now();
    // Noiseless end-to-end round trip is error-free for all schemes over
    // at least 100 random frames each.
    let ofdm = OfdmConfig::default();
    for scheme in ModScheme::ALL {
        let bits = 100 * ofdm.bits_per_frame(scheme.bits_per_symbol());
        let ber = measured_chain_ber(scheme, f64::INFINITY, bits, 5);
        assert_eq!(ber, 0.0, "{scheme:?} noiseless");
    }

    // AWGN curves within +-0.5 dB horizontal displacement of the
    // analytic references, over >= 1e6 bits per SNR point.
    let mut worst_shift = 0.0f64;
    for scheme in ModScheme::ALL {
        let mut previous = 0.51f64;
        for target_ber in [1e-1, 1e-2, 1e-3, 1e-4] {
            let snr_db = snr_for_ber(scheme, target_ber);
            let measured = measured_chain_ber(scheme, snr_db, 1_000_000, 9);
            // 3-sigma Monte-Carlo slack on each bound.
            let sigma = (target_ber / 1.0e6f64).sqrt();
            let upper = awgn_ber(scheme, 10f64.powf((snr_db - 0.5) / 10.0)) + 3.0 * sigma;
            let lower = awgn_ber(scheme, 10f64.powf((snr_db + 0.5) / 10.0)) - 3.0 * sigma;
            assert!(
                measured <= upper && measured >= lower,
                "{scheme:?} at {snr_db:.2} dB: measured {measured:.3e} outside \
                 [{lower:.3e}, {upper:.3e}]"
            );
            // Measured BER stays monotone over the sweep.
            assert!(measured < previous, "{scheme:?} BER not decreasing");
            previous = measured;
            // Track the equivalent horizontal displacement.
            if measured > 0.0 {
                let eq_snr = snr_for_ber(scheme, measured);
                worst_shift = worst_shift.max((eq_snr - snr_db).abs());
            }
        }
    }
    println!(
        "ACCEPTANCE 3 modem fidelity: PASS (noiseless exact; worst horizontal displacement \
         {worst_shift:.3} dB <= 0.5 dB; {:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_4_adaptation_table_reproduction() {
    let lambda = SPEED_OF_LIGHT / 60e9;
    let budget = calibrate_budget(10.0, 7.80, lambda, 1e-11).unwrap();
    let s16 = snr_at_range(&budget, 16.0).unwrap();
    let s6 = snr_at_range(&budget, 6.0).unwrap();
    assert!((s16 - 3.72).abs() <= 0.05, "snr(16 m) = {s16}");
    // The 6 m threshold follows the inverse-square law from the same
    // calibration point as the other rows: 7.80 + 20 log10(10/6).
    assert!((s6 - 12.24).abs() <= 0.05, "snr(6 m) = {s6}");

    let policy = McsPolicy::standard(&budget).unwrap();
    let rows = [
        (5.0, ModScheme::Qam64),
        (6.0, ModScheme::Qam16),
        (8.0, ModScheme::Qam16),
        (10.0, ModScheme::Qpsk),
        (12.0, ModScheme::Qpsk),
        (16.0, ModScheme::Bpsk),
        (20.0, ModScheme::Bpsk),
        (43.0, ModScheme::Bpsk),
    ];
    for (d, want) in rows {
        assert_eq!(policy.select_mcs(d), want, "{d} m");
        let snr = snr_at_range(&budget, d).unwrap();
        assert_eq!(policy.select_mcs_from_snr(snr), want, "{d} m via SNR");
    }
    println!(
        "ACCEPTANCE 4 table reproduction: PASS (snr(16)={s16:.3} dB, snr(6)={s6:.3} dB, all rows)"
    );
}

#[test]
fn acceptance_5_throughput_formula() {
    assert_eq!(frame_throughput(ModScheme::Qam64, 0.0), 9.504e9);
    assert_eq!(overhead(), 0.6);
    println!("ACCEPTANCE 5 throughput formula: PASS (9.504 Gbit/s exact, overhead 0.6 exact)");
}

#[test]
fn acceptance_6_trajectory_metric_targets() {
    let u = comparison(TrajectoryKind::UShaped);
    let f8 = comparison(TrajectoryKind::FigureOfEight);
    let (u_tput, u_ber) = (u.arms[0].avg_throughput_bps, u.arms[0].avg_ber);
    let (f8_tput, f8_ber) = (f8.arms[0].avg_throughput_bps, f8.arms[0].avg_ber);

    let mut lines = Vec::new();
    let mut ok = true;

    let u_tput_ok = (u_tput - 4.15e9).abs() <= 0.2 * 4.15e9;
    let u_ber_ok = (u_ber - 0.045).abs() <= 0.03;
    ok &= u_tput_ok && u_ber_ok;
    lines.push(format!(
        "u_shaped: {:.3} Gbit/s (target 4.15 +-20%) {} / BER {:.4} (target 0.045 +-0.03) {}",
        u_tput / 1e9,
        if u_tput_ok { "ok" } else { "OUT" },
        u_ber,
        if u_ber_ok { "ok" } else { "OUT" }
    ));

    let f8_tput_ok = (f8_tput - 1.50e9).abs() <= 0.2 * 1.50e9;
    let f8_ber_ok = (f8_ber - 0.10).abs() <= 0.04;
    ok &= f8_tput_ok && f8_ber_ok;
    lines.push(format!(
        "figure_of_eight: {:.3} Gbit/s (target 1.50 +-20%) {} / BER {:.4} (target 0.10 +-0.04) {}",
        f8_tput / 1e9,
        if f8_tput_ok { "ok" } else { "OUT" },
        f8_ber,
        if f8_ber_ok { "ok" } else { "OUT" }
    ));

    println!(
        "ACCEPTANCE 6 trajectory metric targets: {} ({})",
        if ok { "PASS" } else { "FAIL" },
        lines.join("; ")
    );
    assert!(ok, "{}", lines.join("; "));
}

#[test]
fn acceptance_7_adaptive_dominance() {
    let mut summary = Vec::new();
    for kind in TrajectoryKind::ALL {
        let out = comparison(kind);
        let adaptive = out.arms[0].avg_throughput_bps;
        for fixed in &out.arms[1..] {
            assert!(
                adaptive > fixed.avg_throughput_bps,
                "{}: adaptive {adaptive} not above {} ({})",
                kind.name(),
                fixed.avg_throughput_bps,
                fixed.policy.name()
            );
        }
        summary.push(format!("{} {:.2} G", kind.name(), adaptive / 1e9));
    }
    let u = comparison(TrajectoryKind::UShaped);
    let bpsk_improvement =
        u.report.improvement_pct[&ModScheme::Bpsk].expect("BPSK baseline succeeded on the U shape");
    assert!(
        (100.0..=300.0).contains(&bpsk_improvement),
        "U-shaped BPSK improvement {bpsk_improvement}%"
    );
    println!(
        "ACCEPTANCE 7 dominance: PASS (adaptive strictly above every fixed arm on {}; \
         U-shaped +{bpsk_improvement:.1}% over BPSK in [100, 300])",
        summary.join(", ")
    );
}

#[test]
fn acceptance_8_switching_sequence() {
    let u = comparison(TrajectoryKind::UShaped);
    let records = &u.arms[0].records;

    // Collapse the per-frame schemes into switch events.
    let mut sequence = vec![records[0].scheme];
    let mut switch_times = Vec::new();
    for pair in records.windows(2) {
        if pair[1].scheme != pair[0].scheme {
            sequence.push(pair[1].scheme);
            switch_times.push(pair[1].time_s);
        }
    }
    let expected = [
        ModScheme::Bpsk,
        ModScheme::Qpsk,
        ModScheme::Qam16,
        ModScheme::Qam64,
        ModScheme::Qam16,
        ModScheme::Qpsk,
        ModScheme::Bpsk,
    ];
    assert_eq!(sequence, expected, "switch times {switch_times:?}");

    // Each switch must sit within two frames of the true range crossing.
    let crossings = [16.0, 10.0, 6.0, 6.0, 10.0, 16.0];
    let frame_dt = records[1].time_s - records[0].time_s;
    for (i, (&switch_t, boundary)) in switch_times.iter().zip(crossings).enumerate() {
        let down_leg = i < 3;
        let true_crossing = records
            .windows(2)
            .find(|w| {
                if down_leg {
                    w[0].true_range_m >= boundary && w[1].true_range_m < boundary
                } else {
                    w[0].true_range_m < boundary && w[1].true_range_m >= boundary
                }
            })
            .map(|w| w[1].time_s)
            .expect("trajectory crosses the boundary");
        assert!(
            (switch_t - true_crossing).abs() <= 2.0 * frame_dt + 1e-9,
            "switch {i} at {switch_t:.3} s vs crossing {true_crossing:.3} s"
        );
    }
    println!(
        "ACCEPTANCE 8 switching sequence: PASS (palindromic sequence, switches at {:?} s)",
        switch_times
            .iter()
            .map(|t| (t * 1000.0).round() / 1000.0)
            .collect::<Vec<_>>()
    );
}

#[test]
fn acceptance_9_compare_determinism() {
    let mut cfg = RunConfig::default();
    cfg.trajectory = TrajectoryKind::UShaped;
    cfg.scene.duration_s = 1.5;
    cfg.seed = 404;
    let first = compare_arms(&cfg).unwrap();
    let second = compare_arms(&cfg).unwrap();
    for (a, b) in first.arms.iter().zip(&second.arms) {
        let csv_a = frames_csv(&a.records);
        let csv_b = frames_csv(&b.records);
        assert_eq!(csv_a.len(), csv_b.len(), "{}", a.policy.name());
        assert!(csv_a == csv_b, "{} differs between runs", a.policy.name());
    }
    println!(
        "ACCEPTANCE 9 determinism: PASS (byte-identical frames.csv across reruns for {} arms)",
        first.arms.len()
    );
}
