//! The OFDM receive chain: timing synchronization, coarse and fine carrier
//! frequency offset estimation, channel estimation, equalization,
//! per-symbol phase tracking and demapping.
//!
//! The channel is a single complex tap by construction, so a least-squares
//! estimate from one known training symbol plus one-tap equalization is
//! exact in the noiseless limit. Coarse CFO comes from the repetition of
//! the training symbol's two identical halves, fine CFO from averaging the
//! cyclic-prefix phase across the data symbols, and any residual shows up
//! as a common phase per symbol that a decision-directed rotator removes.

use num_complex::Complex64;

use crate::modulation::{self, ModScheme};
use crate::ofdm::{time_to_grid, OfdmConfig, TrainingSymbol};

/// Knobs of the synchronization stage.
#[derive(Debug, Clone)]
pub struct RxOptions {
    /// Largest timing offset (samples) searched for the frame start.
    pub max_timing_search: usize,
    /// Normalized correlation power below which the frame is declared
    /// lost and erased.
    pub sync_threshold: f64,
}

impl Default for RxOptions {
    fn default() -> Self {
        // The search window covers the longest one-way delay of the scene
        // (43.5 m is 383 samples at 2.64 GS/s) with margin.
        RxOptions {
            max_timing_search: 512,
            sync_threshold: 0.05,
        }
    }
}

/// Diagnostics of one receive attempt.
#[derive(Debug, Clone)]
pub struct RxReport {
    /// Whether timing synchronization found the frame.
    pub synced: bool,
    /// Peak normalized correlation of the timing search.
    pub sync_metric: f64,
    /// Estimated frame start within the record (samples).
    pub timing_offset: usize,
    /// Coarse CFO estimate from the training-symbol halves (Hz).
    pub cfo_coarse_hz: f64,
    /// Fine CFO estimate from cyclic-prefix correlation (Hz).
    pub cfo_fine_hz: f64,
}

impl RxReport {
    /// Total estimated carrier frequency offset (Hz).
    pub fn cfo_total_hz(&self) -> f64 {
        self.cfo_coarse_hz + self.cfo_fine_hz
    }
}

/// Outcome of one frame: decoded bits, or an erasure when synchronization
/// failed (the simulator scores an erased frame as BER 0.5).
#[derive(Debug, Clone)]
pub enum RxOutcome {
    Decoded { bits: Vec<u8>, report: RxReport },
    Erased { report: RxReport },
}

impl RxOutcome {
    /// The diagnostics regardless of outcome.
    pub fn report(&self) -> &RxReport {
        match self {
            RxOutcome::Decoded { report, .. } | RxOutcome::Erased { report } => report,
        }
    }
}

/// Demodulate one downlink frame (training symbol plus
/// `cfg.symbols_per_frame` data symbols) from a received record that may
/// start with propagation delay and noise.
pub fn ofdm_receive(
    rx: &[Complex64],
    cfg: &OfdmConfig,
    scheme: ModScheme,
    training: &TrainingSymbol,
    opts: &RxOptions,
) -> RxOutcome {
    let sps = cfg.samples_per_symbol();
    let frame_len = cfg.samples_per_frame();
    let ts = 1.0 / cfg.sample_rate;

    // Timing: normalized correlation against the full known training
    // symbol over the search window.
    let (timing, metric) = find_timing(rx, &training.time, opts, frame_len);
    if metric < opts.sync_threshold || timing + frame_len > rx.len() {
        return RxOutcome::Erased {
            report: RxReport {
                synced: false,
                sync_metric: metric,
                timing_offset: timing,
                cfo_coarse_hz: 0.0,
                cfo_fine_hz: 0.0,
            },
        };
    }
    let mut frame: Vec<Complex64> = rx[timing..timing + frame_len].to_vec();

    // Coarse CFO from the two identical halves of the training core.
    let half = cfg.n_fft / 2;
    let core0 = cfg.n_cp;
    let z: Complex64 = (0..half)
        .map(|n| frame[core0 + n].conj() * frame[core0 + n + half])
        .sum();
    let cfo_coarse = z.arg() / (2.0 * std::f64::consts::PI * half as f64 * ts);
    derotate(&mut frame, cfo_coarse, ts);

    // Fine CFO from cyclic-prefix correlation over the data symbols.
    let mut z = Complex64::default();
    for sym in 1..=cfg.symbols_per_frame {
        let start = sym * sps;
        for i in 0..cfg.n_cp {
            z += frame[start + i].conj() * frame[start + i + cfg.n_fft];
        }
    }
    let cfo_fine = z.arg() / (2.0 * std::f64::consts::PI * cfg.n_fft as f64 * ts);
    derotate(&mut frame, cfo_fine, ts);

    let report = RxReport {
        synced: true,
        sync_metric: metric,
        timing_offset: timing,
        cfo_coarse_hz: cfo_coarse,
        cfo_fine_hz: cfo_fine,
    };

    // Least-squares channel estimate from the training symbol's occupied
    // (even) bins, interpolated onto the odd bins.
    let train_grid = time_to_grid(&frame[core0..core0 + cfg.n_fft], cfg);
    let h = estimate_channel(&train_grid, training, cfg);

    // Equalize, track the common phase across symbols, demap. The phase
    // tracker carries the accumulated rotation from symbol to symbol so
    // each decision-directed increment stays far inside the
    // constellation's rotational ambiguity even when residual CFO drifts
    // over the frame.
    let mut bits = Vec::with_capacity(cfg.bits_per_frame(scheme.bits_per_symbol()));
    let mut tracker = Complex64::new(1.0, 0.0);
    for sym in 1..=cfg.symbols_per_frame {
        let start = sym * sps + cfg.n_cp;
        let grid = time_to_grid(&frame[start..start + cfg.n_fft], cfg);
        let mut eq: Vec<Complex64> = cfg
            .data_bins()
            .map(|k| {
                let hk = h[k];
                let y = if hk.norm_sqr() > 0.0 {
                    grid[k] / hk
                } else {
                    grid[k]
                };
                y * tracker
            })
            .collect();

        let rot: Complex64 = eq
            .iter()
            .map(|&y| y * modulation::nearest_point(y, scheme).conj())
            .sum();
        if rot.norm_sqr() > 0.0 {
            let fix = Complex64::from_polar(1.0, -rot.arg());
            for y in &mut eq {
                *y *= fix;
            }
            tracker *= fix;
        }
        bits.extend(modulation::demodulate(&eq, scheme));
    }
    RxOutcome::Decoded { bits, report }
}

/// Slide the known training waveform over the record and return the lag
/// with the highest normalized correlation power.
fn find_timing(
    rx: &[Complex64],
    train: &[Complex64],
    opts: &RxOptions,
    frame_len: usize,
) -> (usize, f64) {
    let m = train.len();
    if rx.len() < frame_len {
        return (0, 0.0);
    }
    let max_lag = opts.max_timing_search.min(rx.len() - frame_len);
    let train_energy: f64 = train.iter().map(|v| v.norm_sqr()).sum();

    // Prefix sums give each window's energy in O(1).
    let mut prefix = Vec::with_capacity(rx.len() + 1);
    prefix.push(0.0);
    for v in rx {
        prefix.push(prefix.last().unwrap() + v.norm_sqr());
    }

    let mut best = (0usize, 0.0f64);
    for lag in 0..=max_lag {
        let corr: Complex64 = (0..m).map(|t| rx[lag + t] * train[t].conj()).sum();
        let window_energy = prefix[lag + m] - prefix[lag];
        if window_energy <= 0.0 {
            continue;
        }
        let metric = corr.norm_sqr() / (window_energy * train_energy);
        if metric > best.1 {
            best = (lag, metric);
        }
    }
    best
}

/// Multiply the record by `exp(+j 2 pi f t)` to undo a `-f` offset.
fn derotate(frame: &mut [Complex64], cfo_hz: f64, ts: f64) {
    if cfo_hz == 0.0 {
        return;
    }
    let step = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * cfo_hz * ts);
    let mut phase = Complex64::new(1.0, 0.0);
    for v in frame.iter_mut() {
        *v *= phase;
        phase *= step;
    }
}

/// Timing hypotheses (samples) the channel estimator tests around the
/// synchronizer's lock.
const TIMING_HYPOTHESES: std::ops::RangeInclusive<i64> = -3..=3;

/// Least-squares channel estimate from the training symbol's occupied
/// (even) bins. The channel is one complex tap plus a possible residual
/// *integer* sample offset from the synchronizer (delays are
/// grid-aligned), so `H[k] = g exp(-j 2 pi d k / N)` with discrete `d`.
/// The estimator picks `d` by coherent combining across the training bins
/// - a matched test across a handful of hypotheses, robust far below
/// 0 dB - and averages the derotated bins into the gain. Per-bin noise is
/// suppressed by the full training bandwidth rather than surviving into
/// the equalizer.
fn estimate_channel(
    rx_grid: &[Complex64],
    training: &TrainingSymbol,
    cfg: &OfdmConfig,
) -> Vec<Complex64> {
    let bins = cfg.data_bins();
    let raw: Vec<(usize, Complex64)> = bins
        .clone()
        .filter(|k| training.grid[*k].norm_sqr() > 0.0)
        .map(|k| (k, rx_grid[k] / training.grid[k]))
        .collect();
    if raw.is_empty() {
        return vec![Complex64::new(1.0, 0.0); cfg.n_fft];
    }

    let mut best = (0.0f64, f64::MIN, Complex64::default());
    for d in TIMING_HYPOTHESES {
        let slope = -2.0 * std::f64::consts::PI * d as f64 / cfg.n_fft as f64;
        let sum: Complex64 = raw
            .iter()
            .map(|(k, h)| h * Complex64::from_polar(1.0, -slope * *k as f64))
            .sum();
        if sum.norm_sqr() > best.1 {
            best = (slope, sum.norm_sqr(), sum / raw.len() as f64);
        }
    }
    let (slope, _, gain) = best;

    let mut h = vec![Complex64::new(1.0, 0.0); cfg.n_fft];
    for k in bins {
        h[k] = gain * Complex64::from_polar(1.0, slope * k as f64);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        apply_comm_channel, matched_rx_weights, matched_tx_weights, steering_vector,
        CommChannelParams,
    };
    use crate::modulation::{awgn_ber, ber, modulate};
    use crate::ofdm::build_frame;
    use crate::SPEED_OF_LIGHT;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LAMBDA: f64 = SPEED_OF_LIGHT / 60e9;

    fn params(snr_db: f64, doppler: f64, seed: u64) -> CommChannelParams {
        let u_bs = steering_vector(0.2, 16, LAMBDA / 2.0, LAMBDA);
        let u_mu = steering_vector(-0.1, 4, LAMBDA / 2.0, LAMBDA);
        CommChannelParams {
            range_m: 12.0,
            doppler_one_way_hz: doppler,
            bs_weights: matched_tx_weights(&u_bs),
            mu_weights: matched_rx_weights(&u_mu),
            bs_steering: u_bs,
            mu_steering: u_mu,
            snr_db,
            sample_rate: 2.64e9,
            rng_seed: seed,
        }
    }

    fn random_bits(n: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
        (0..n).map(|_| rng.gen_range(0..=1)).collect()
    }

    fn run_frame(
        scheme: ModScheme,
        chan: &CommChannelParams,
        bits: &[u8],
        cfg: &OfdmConfig,
    ) -> (RxOutcome, Vec<u8>) {
        let training = TrainingSymbol::standard(cfg);
        let syms = modulate(bits, scheme).unwrap();
        let tx = build_frame(&syms, &training, cfg).unwrap();
        let rx = apply_comm_channel(&tx, chan).unwrap();
        let out = ofdm_receive(&rx, cfg, scheme, &training, &RxOptions::default());
        (out, bits.to_vec())
    }

    #[test]
    fn noiseless_round_trip_is_exact_for_all_schemes() {
        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for scheme in ModScheme::ALL {
            let bits = random_bits(cfg.bits_per_frame(scheme.bits_per_symbol()), &mut rng);
            let chan = params(f64::INFINITY, 0.0, 1);
            let (out, tx_bits) = run_frame(scheme, &chan, &bits, &cfg);
            match out {
                RxOutcome::Decoded { bits, report } => {
                    assert!(report.synced);
                    assert_eq!(bits, tx_bits, "{scheme:?}");
                }
                RxOutcome::Erased { .. } => panic!("{scheme:?} erased a noiseless frame"),
            }
        }
    }

    #[test]
    fn doppler_offset_is_estimated_and_corrected() {
        // One-way Doppler of a 15 m/s user at 60 GHz is about 3 kHz; the
        // residual after correction must stay far inside one percent of
        // the 5.16 MHz subcarrier spacing.
        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cfo = 3002.0;
        let bits = random_bits(cfg.bits_per_frame(2), &mut rng);
        let chan = params(15.0, cfo, 7);
        let (out, tx_bits) = run_frame(ModScheme::Qpsk, &chan, &bits, &cfg);
        match out {
            RxOutcome::Decoded { bits, report } => {
                let residual = (report.cfo_total_hz() - cfo).abs();
                assert!(
                    residual < 0.01 * cfg.subcarrier_spacing(),
                    "residual {residual} Hz"
                );
                assert_eq!(ber(&tx_bits, &bits).unwrap(), 0.0);
            }
            RxOutcome::Erased { .. } => panic!("erased"),
        }
    }

    #[test]
    fn cfo_correction_does_not_degrade_ber() {
        // A/B comparison at an SNR where QPSK sits near BER 1e-2: the
        // 3 kHz-offset run must stay within what a 0.1 dB SNR shift would
        // explain (plus Monte-Carlo slack).
        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let snr_time_db = 7.0 - cfg.subcarrier_snr_gain_db();
        let mut errors = [0usize; 2];
        let mut total = 0usize;
        for trial in 0..12 {
            let bits = random_bits(cfg.bits_per_frame(2), &mut rng);
            for (arm, doppler) in [(0usize, 0.0), (1, 3000.0)] {
                let chan = params(snr_time_db, doppler, 1000 + trial);
                let (out, tx_bits) = run_frame(ModScheme::Qpsk, &chan, &bits, &cfg);
                match out {
                    RxOutcome::Decoded { bits, .. } => {
                        errors[arm] += bits.iter().zip(&tx_bits).filter(|(a, b)| a != b).count();
                    }
                    RxOutcome::Erased { .. } => panic!("erased at 7 dB"),
                }
            }
            total += cfg.bits_per_frame(2);
        }
        let ber_ref = errors[0] as f64 / total as f64;
        let ber_cfo = errors[1] as f64 / total as f64;
        // Analytic BER slope at 7 dB for a 0.1 dB shift, plus 3-sigma of
        // the Monte-Carlo estimate.
        let g = 10f64.powf(0.7);
        let slope = awgn_ber(ModScheme::Qpsk, g * 10f64.powf(-0.01)) - awgn_ber(ModScheme::Qpsk, g);
        let sigma = (ber_ref.max(1e-6) / total as f64).sqrt();
        assert!(
            ber_cfo <= ber_ref + slope + 3.0 * sigma,
            "cfo {ber_cfo} vs ref {ber_ref} (allow +{})",
            slope + 3.0 * sigma
        );
    }

    #[test]
    fn pure_noise_is_erased() {
        let cfg = OfdmConfig::default();
        let chan = params(10.0, 0.0, 3);
        let noise_only = vec![Complex64::default(); cfg.samples_per_frame() + 600];
        let rx = apply_comm_channel(&noise_only, &chan).unwrap();
        let training = TrainingSymbol::standard(&cfg);
        let out = ofdm_receive(&rx, &cfg, ModScheme::Bpsk, &training, &RxOptions::default());
        assert!(matches!(out, RxOutcome::Erased { .. }));
    }

    #[test]
    fn matched_array_gain_improves_output_snr_by_n_times_m() {
        // Post-equalization SNR ratio between a 16x4 matched link and a
        // single-antenna link at identical noise power must be
        // 10 log10(64) = 18.06 dB within 0.3 dB.
        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let training = TrainingSymbol::standard(&cfg);

        let mut measure = |n: usize, m: usize, snr_db: f64, seed: u64| -> f64 {
            let u_bs = steering_vector(0.25, n, LAMBDA / 2.0, LAMBDA);
            let u_mu = steering_vector(0.0, m, LAMBDA / 2.0, LAMBDA);
            let chan = CommChannelParams {
                range_m: 5.0,
                doppler_one_way_hz: 0.0,
                bs_weights: matched_tx_weights(&u_bs),
                mu_weights: matched_rx_weights(&u_mu),
                bs_steering: u_bs,
                mu_steering: u_mu,
                snr_db,
                sample_rate: cfg.sample_rate,
                rng_seed: seed,
            };
            let bits = random_bits(cfg.bits_per_frame(2), &mut rng);
            let syms = modulate(&bits, ModScheme::Qpsk).unwrap();
            let tx = build_frame(&syms, &training, &cfg).unwrap();
            let rx = apply_comm_channel(&tx, &chan).unwrap();
            // Ideal-sync measurement: known timing and channel.
            let delay = (chan.range_m / SPEED_OF_LIGHT * cfg.sample_rate).round() as usize;
            let g = chan.end_to_end_gain();
            let mut sig = 0.0;
            let mut err = 0.0;
            for sym in 1..=cfg.symbols_per_frame {
                let start = delay + sym * cfg.samples_per_symbol() + cfg.n_cp;
                let grid = time_to_grid(&rx[start..start + cfg.n_fft], &cfg);
                for (i, k) in cfg.data_bins().enumerate() {
                    let eq = grid[k] / g;
                    let x = syms[(sym - 1) * cfg.n_data + i];
                    sig += x.norm_sqr();
                    err += (eq - x).norm_sqr();
                }
            }
            10.0 * (sig / err).log10()
        };

        // Same absolute noise power: the single-antenna arm's snr_db is
        // 18.06 dB lower by the noise_power() definition.
        let out_64 = measure(16, 4, 10.0, 5);
        let out_1 = measure(1, 1, 10.0 - 10.0 * 64f64.log10(), 6);
        let gain = out_64 - out_1;
        assert!(
            (gain - 10.0 * 64f64.log10()).abs() < 0.3,
            "array gain {gain} dB"
        );
    }
}
