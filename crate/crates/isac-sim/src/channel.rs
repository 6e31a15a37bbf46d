//! The beamformed single-tap downlink channel between the BS and MU arrays.
//!
//! The channel applies the end-to-end beamforming gain
//! `g = (w_MU^H u_MU)(u_BS^T w_BS)`, an integer-sample propagation delay,
//! a one-way Doppler rotation and circular white Gaussian noise at the MU
//! combiner output. `snr_db` is the post-beamforming time-domain SNR the
//! link would see with conjugate-matched beams at both ends; steering the
//! weights away from the array responses shows up as a real SNR loss.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::SimError;
use crate::Result;
use crate::SPEED_OF_LIGHT;

/// Array phase response toward an angle: element `k` carries
/// `exp(-j k (2 pi / lambda) spacing sin(angle))`.
pub fn steering_vector(
    angle_rad: f64,
    n_elements: usize,
    spacing_m: f64,
    wavelength_m: f64,
) -> Vec<Complex64> {
    let phase_step = -2.0 * std::f64::consts::PI / wavelength_m * spacing_m * angle_rad.sin();
    (0..n_elements)
        .map(|k| Complex64::from_polar(1.0, phase_step * k as f64))
        .collect()
}

/// Unit-norm receive combiner matched to an array response:
/// `w = u / ||u||`, so `w^H u = ||u|| = sqrt(n)`.
pub fn matched_rx_weights(u: &[Complex64]) -> Vec<Complex64> {
    let norm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    u.iter().map(|v| v / norm).collect()
}

/// Unit-norm transmit precoder matched to an array response under the
/// transpose pairing of the channel model: `w = conj(u) / ||u||`, so
/// `u^T w = ||u|| = sqrt(n)`.
pub fn matched_tx_weights(u: &[Complex64]) -> Vec<Complex64> {
    let norm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    u.iter().map(|v| v.conj() / norm).collect()
}

/// Parameters of one downlink frame's channel realization.
#[derive(Debug, Clone)]
pub struct CommChannelParams {
    /// One-way propagation distance in meters.
    pub range_m: f64,
    /// One-way Doppler shift in Hz (half the two-way radar Doppler).
    pub doppler_one_way_hz: f64,
    /// BS transmit precoder (unit norm).
    pub bs_weights: Vec<Complex64>,
    /// MU receive combiner (unit norm).
    pub mu_weights: Vec<Complex64>,
    /// BS array response toward the MU.
    pub bs_steering: Vec<Complex64>,
    /// MU array response toward the BS.
    pub mu_steering: Vec<Complex64>,
    /// Post-beamforming time-domain SNR (dB) under matched beams;
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Baseband sample rate in Hz.
    pub sample_rate: f64,
    /// Seed of the noise substream.
    pub rng_seed: u64,
}

impl CommChannelParams {
    fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("bs_weights", &self.bs_weights),
            ("mu_weights", &self.mu_weights),
        ] {
            let norm = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(SimError::invalid(format!("{name} norm {norm} != 1")));
            }
        }
        if self.bs_weights.len() != self.bs_steering.len()
            || self.mu_weights.len() != self.mu_steering.len()
        {
            return Err(SimError::invalid(
                "weight and steering vector lengths disagree".to_string(),
            ));
        }
        if self.range_m < 0.0 {
            return Err(SimError::invalid(format!(
                "negative range {}",
                self.range_m
            )));
        }
        Ok(())
    }

    /// Scalar end-to-end beamforming gain `(w_MU^H u_MU)(u_BS^T w_BS)`.
    pub fn end_to_end_gain(&self) -> Complex64 {
        let rx: Complex64 = self
            .mu_weights
            .iter()
            .zip(&self.mu_steering)
            .map(|(w, u)| w.conj() * u)
            .sum();
        let tx: Complex64 = self
            .bs_steering
            .iter()
            .zip(&self.bs_weights)
            .map(|(u, w)| u * w)
            .sum();
        rx * tx
    }

    /// Noise variance at the combiner output implied by `snr_db`, scaled so
    /// matched beams at both ends realize exactly that SNR for unit-power
    /// transmit samples.
    pub fn noise_power(&self) -> f64 {
        if self.snr_db.is_infinite() {
            return 0.0;
        }
        let matched_power = (self.bs_weights.len() * self.mu_weights.len()) as f64;
        matched_power * 10f64.powf(-self.snr_db / 10.0)
    }
}

/// Propagate transmit samples through the beamformed channel: delay by the
/// nearest whole sample, scale by the beamforming gain, rotate by the
/// one-way Doppler and add combiner noise.
pub fn apply_comm_channel(tx: &[Complex64], params: &CommChannelParams) -> Result<Vec<Complex64>> {
    params.validate()?;
    let delay = (params.range_m / SPEED_OF_LIGHT * params.sample_rate).round() as usize;
    let g = params.end_to_end_gain();
    let sigma2 = params.noise_power();
    let n_out = delay + tx.len();

    let mut rx = vec![Complex64::default(); n_out];
    let ts = 1.0 / params.sample_rate;
    for (i, &s) in tx.iter().enumerate() {
        let t = (delay + i) as f64 * ts;
        let rot = Complex64::from_polar(
            1.0,
            -2.0 * std::f64::consts::PI * params.doppler_one_way_hz * t,
        );
        rx[delay + i] = g * s * rot;
    }
    if sigma2 > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        let std_dev = (sigma2 / 2.0).sqrt();
        for v in &mut rx {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *v += Complex64::new(re * std_dev, im * std_dev);
        }
    }
    Ok(rx)
}
