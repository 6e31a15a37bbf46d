//! The per-frame sense -> adapt -> communicate loop.
//!
//! Each frame synthesizes the radar return of the current ground-truth
//! state, detects the user, and hands *only the estimates* to the
//! communication stage: the downlink channel, the beam steering and the
//! modulation choice are all driven by the sensed range, azimuth and
//! velocity, never by ground truth. On a radar miss the previous frame's
//! estimates are reused; before the first detection the BS falls back to
//! BPSK at boresight with the worst-case range.
//!
//! Comparison runs share the sensing stage and the per-frame bit and
//! noise substreams across arms (common random numbers), so arm
//! differences come from the policy alone.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    apply_comm_channel, matched_rx_weights, matched_tx_weights, steering_vector, CommChannelParams,
};
use crate::config::{PolicyMode, RunConfig};
use crate::error::SimError;
use crate::golay::{standard_preamble, PreambleWaveform};
use crate::link_adapt::{snr_at_range, LinkBudget, McsPolicy};
use crate::metrics::{aggregate, compare, FrameRecord, TrajectoryReport};
use crate::modulation::{ber, modulate, ModScheme};
use crate::ofdm::{build_frame, OfdmConfig, TrainingSymbol};
use crate::radar::{detect_targets, synthesize_datacube, synthesize_datacube_into, RadarTarget};
use crate::receiver::{ofdm_receive, RxOptions, RxOutcome};
use crate::seeds;
use crate::trajectory::sample_trajectory;
use crate::Result;

/// Stage-I output the communication stage is allowed to see.
#[derive(Debug, Clone, Copy)]
pub struct Estimates {
    pub range_m: f64,
    pub azimuth_rad: f64,
    pub velocity_mps: f64,
    /// False when these are fallback values rather than a detection.
    pub detected: bool,
}

impl Estimates {
    /// Pre-detection fallback: boresight, worst-case range, static.
    fn fallback(max_range_m: f64) -> Estimates {
        Estimates {
            range_m: max_range_m,
            azimuth_rad: 0.0,
            velocity_mps: 0.0,
            detected: false,
        }
    }
}

/// Immutable per-run state shared by every frame and arm.
struct LinkContext {
    waveform: PreambleWaveform,
    training: TrainingSymbol,
    budget: LinkBudget,
    policy: McsPolicy,
    ofdm: OfdmConfig,
    rx_options: RxOptions,
    wavelength_m: f64,
    element_spacing_m: f64,
    bs_antennas: usize,
    mu_antennas: usize,
}

/// Result of one communication attempt. Carries no ground truth.
struct CommOutcome {
    frame_ber: f64,
    snr_db: f64,
}

/// Run the downlink for one frame from the sensing estimates alone.
fn communicate_frame(
    est: &Estimates,
    scheme: ModScheme,
    ctx: &LinkContext,
    bits_seed: u64,
    noise_seed: u64,
) -> Result<CommOutcome> {
    // The estimate is bin-quantized; keep the link budget defined at
    // point-blank range.
    let range = est.range_m.max(0.01);
    let snr_db = snr_at_range(&ctx.budget, range)?;

    let mut rng = ChaCha8Rng::seed_from_u64(bits_seed);
    let n_bits = ctx.ofdm.bits_per_frame(scheme.bits_per_symbol());
    let bits: Vec<u8> = (0..n_bits).map(|_| rng.gen_range(0..=1u8)).collect();
    let symbols = modulate(&bits, scheme)?;
    let tx = build_frame(&symbols, &ctx.training, &ctx.ofdm)?;

    let u_bs = steering_vector(
        est.azimuth_rad,
        ctx.bs_antennas,
        ctx.element_spacing_m,
        ctx.wavelength_m,
    );
    let u_mu = steering_vector(
        0.0,
        ctx.mu_antennas,
        ctx.element_spacing_m,
        ctx.wavelength_m,
    );
    let params = CommChannelParams {
        range_m: est.range_m,
        doppler_one_way_hz: est.velocity_mps / ctx.wavelength_m,
        bs_weights: matched_tx_weights(&u_bs),
        mu_weights: matched_rx_weights(&u_mu),
        bs_steering: u_bs,
        mu_steering: u_mu,
        snr_db,
        sample_rate: ctx.ofdm.sample_rate,
        rng_seed: noise_seed,
    };
    let rx = apply_comm_channel(&tx, &params)?;
    let frame_ber = match ofdm_receive(&rx, &ctx.ofdm, scheme, &ctx.training, &ctx.rx_options) {
        RxOutcome::Decoded { bits: rx_bits, .. } => ber(&bits, &rx_bits)?,
        RxOutcome::Erased { .. } => 0.5,
    };
    Ok(CommOutcome { frame_ber, snr_db })
}

/// One arm of a comparison run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ArmResult {
    pub policy: PolicyMode,
    pub avg_throughput_bps: f64,
    pub avg_ber: f64,
    #[serde(skip)]
    pub records: Vec<FrameRecord>,
}

/// Output of [`compare_arms`]: the adaptive arm first, then the four
/// fixed baselines, plus the adaptive-centric comparison report.
#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub arms: Vec<ArmResult>,
    pub report: TrajectoryReport,
}

fn build_context(cfg: &RunConfig) -> Result<LinkContext> {
    cfg.validate()?;
    let waveform = standard_preamble();
    if (waveform.sample_rate - cfg.radar.sample_rate_hz).abs() > 1e-3 {
        return Err(SimError::Config(
            "radar sample rate must match the preamble waveform".into(),
        ));
    }
    let budget = crate::link_adapt::calibrate_budget(
        cfg.budget_ref_range_m,
        cfg.budget_ref_snr_db,
        cfg.radar.wavelength_m(),
        cfg.mu_noise_power_w,
    )?;
    Ok(LinkContext {
        training: TrainingSymbol::standard(&cfg.ofdm),
        policy: cfg.build_policy()?,
        budget,
        waveform,
        ofdm: cfg.ofdm.clone(),
        rx_options: RxOptions::default(),
        wavelength_m: cfg.radar.wavelength_m(),
        element_spacing_m: cfg.radar.element_spacing_m,
        bs_antennas: cfg.radar.num_rx_antennas,
        mu_antennas: cfg.mu_antennas,
    })
}

/// Simulate every frame of the trajectory for a set of policy arms that
/// share the sensing stage and the random substreams.
fn simulate_arms(cfg: &RunConfig, policies: &[PolicyMode]) -> Result<Vec<Vec<FrameRecord>>> {
    let ctx = build_context(cfg)?;
    let states = sample_trajectory(cfg.trajectory, &cfg.scene)?;
    let max_range = cfg.radar.max_unambiguous_range_m();
    for st in &states {
        if st.range_m > max_range {
            return Err(SimError::Config(format!(
                "trajectory reaches {:.2} m, beyond the unambiguous {:.2} m",
                st.range_m, max_range
            )));
        }
    }

    let mut records: Vec<Vec<FrameRecord>> = vec![Vec::with_capacity(states.len()); policies.len()];
    let mut last_est: Option<Estimates> = None;
    // One cube allocation lives across the whole run.
    let mut cube = synthesize_datacube(&cfg.radar, &[], &ctx.waveform, 0)?;

    for (k, state) in states.iter().enumerate() {
        let frame = k as u64;
        let radar_seed = seeds::derive(cfg.seed, &[frame, seeds::STAGE_RADAR]);
        synthesize_datacube_into(
            &mut cube,
            &cfg.radar,
            &[RadarTarget::from(state)],
            &ctx.waveform,
            radar_seed,
        )?;
        let detections = detect_targets(&cube, &cfg.radar, &ctx.waveform)?;
        if let Some(d) = detections.first() {
            last_est = Some(Estimates {
                range_m: d.range_m,
                azimuth_rad: d.azimuth_rad,
                velocity_mps: d.velocity_mps,
                detected: true,
            });
        }
        let est = last_est.unwrap_or_else(|| Estimates::fallback(max_range));

        let bits_seed = seeds::derive(cfg.seed, &[frame, seeds::STAGE_BITS]);
        let noise_seed = seeds::derive(cfg.seed, &[frame, seeds::STAGE_COMM]);

        for (arm, &policy) in policies.iter().enumerate() {
            let scheme = match policy {
                PolicyMode::Adaptive => {
                    if est.detected {
                        ctx.policy.select_mcs(est.range_m)
                    } else {
                        ModScheme::Bpsk
                    }
                }
                PolicyMode::Fixed(s) => s,
            };
            let outcome = communicate_frame(&est, scheme, &ctx, bits_seed, noise_seed)?;
            records[arm].push(
                FrameRecord {
                    time_s: state.time_s,
                    true_range_m: state.range_m,
                    est_range_m: est.range_m,
                    true_az_deg: state.azimuth_rad.to_degrees(),
                    est_az_deg: est.azimuth_rad.to_degrees(),
                    snr_db: outcome.snr_db,
                    scheme,
                    frame_ber: outcome.frame_ber,
                    success: false,
                    throughput_bps: 0.0,
                }
                .score(),
            );
        }
    }
    Ok(records)
}

/// Run one arm (the config's policy) over its trajectory.
pub fn run_simulation(cfg: &RunConfig) -> Result<(Vec<FrameRecord>, TrajectoryReport)> {
    let mut records = simulate_arms(cfg, &[cfg.policy])?;
    let records = records.pop().expect("one arm simulated");
    let report = compare(cfg.trajectory, &records, &BTreeMap::new())?;
    Ok((records, report))
}

/// Run the adaptive arm against all four fixed baselines with shared
/// sensing and common random numbers.
pub fn compare_arms(cfg: &RunConfig) -> Result<CompareOutput> {
    let policies = [
        PolicyMode::Adaptive,
        PolicyMode::Fixed(ModScheme::Bpsk),
        PolicyMode::Fixed(ModScheme::Qpsk),
        PolicyMode::Fixed(ModScheme::Qam16),
        PolicyMode::Fixed(ModScheme::Qam64),
    ];
    let all_records = simulate_arms(cfg, &policies)?;

    let mut arms = Vec::with_capacity(policies.len());
    let mut fixed_tputs = BTreeMap::new();
    for (policy, records) in policies.iter().zip(all_records) {
        let (avg_throughput_bps, avg_ber) = aggregate(&records)?;
        if let PolicyMode::Fixed(scheme) = policy {
            fixed_tputs.insert(*scheme, avg_throughput_bps);
        }
        arms.push(ArmResult {
            policy: *policy,
            avg_throughput_bps,
            avg_ber,
            records,
        });
    }
    let report = compare(cfg.trajectory, &arms[0].records, &fixed_tputs)?;
    Ok(CompareOutput { arms, report })
}
