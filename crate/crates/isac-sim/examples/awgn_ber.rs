//! Monte-Carlo BER of the full OFDM chain (sync, CFO, channel estimation,
//! equalization, phase tracking) on an AWGN link, against the analytic
//! Gray-mapped references.
//!
//! Run with: `cargo run --release -p isac-sim --example awgn_ber`

use isac_sim::channel::{
    apply_comm_channel, matched_rx_weights, matched_tx_weights, steering_vector, CommChannelParams,
};
use isac_sim::modulation::{awgn_ber, modulate, ModScheme};
use isac_sim::ofdm::{build_frame, OfdmConfig, TrainingSymbol};
use isac_sim::receiver::{ofdm_receive, RxOptions, RxOutcome};
use isac_sim::SPEED_OF_LIGHT;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = OfdmConfig::default();
    let training = TrainingSymbol::standard(&cfg);
    let lambda = SPEED_OF_LIGHT / 60e9;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    println!("scheme   Es/N0    measured    analytic   (>= 2e5 bits per point)");
    for scheme in ModScheme::ALL {
        for step in 0..5 {
            let snr_db = match scheme {
                ModScheme::Bpsk => -1.0 + 2.0 * f64::from(step),
                ModScheme::Qpsk => 2.0 + 2.0 * f64::from(step),
                ModScheme::Qam16 => 8.0 + 2.0 * f64::from(step),
                ModScheme::Qam64 => 13.0 + 2.0 * f64::from(step),
            };
            let time_snr_db = snr_db - cfg.subcarrier_snr_gain_db();
            let bits_per_frame = cfg.bits_per_frame(scheme.bits_per_symbol());
            let frames = (200_000 / bits_per_frame).max(4);
            let mut errors = 0usize;
            for trial in 0..frames {
                let bits: Vec<u8> = (0..bits_per_frame).map(|_| rng.gen_range(0..=1)).collect();
                let syms = modulate(&bits, scheme).unwrap();
                let tx = build_frame(&syms, &training, &cfg).unwrap();
                let u_bs = steering_vector(0.2, 16, lambda / 2.0, lambda);
                let u_mu = steering_vector(0.0, 4, lambda / 2.0, lambda);
                let chan = CommChannelParams {
                    range_m: 25.0,
                    doppler_one_way_hz: 0.0,
                    bs_weights: matched_tx_weights(&u_bs),
                    mu_weights: matched_rx_weights(&u_mu),
                    bs_steering: u_bs,
                    mu_steering: u_mu,
                    snr_db: time_snr_db,
                    sample_rate: cfg.sample_rate,
                    rng_seed: 40_000 + trial as u64,
                };
                let rx = apply_comm_channel(&tx, &chan).unwrap();
                match ofdm_receive(&rx, &cfg, scheme, &training, &RxOptions::default()) {
                    RxOutcome::Decoded { bits: rx_bits, .. } => {
                        errors += bits.iter().zip(&rx_bits).filter(|(a, b)| a != b).count();
                    }
                    RxOutcome::Erased { .. } => errors += bits_per_frame / 2,
                }
            }
            let measured = errors as f64 / (frames * bits_per_frame) as f64;
            let analytic = awgn_ber(scheme, 10f64.powf(snr_db / 10.0));
            println!(
                "{:<7} {:>5.1} dB  {:>9.2e}  {:>9.2e}",
                scheme.name(),
                snr_db,
                measured,
                analytic
            );
        }
    }
}
