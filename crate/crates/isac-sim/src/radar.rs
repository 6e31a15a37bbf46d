//! Stage I sensing: synthesis of the reflected data cube and the
//! matched-filter + Fourier estimation chain.
//!
//! The cube is indexed antenna x pulse x fast time. Matched filtering
//! along fast time locates the range bin, a discrete Fourier transform
//! across pulses at that bin gives the Doppler velocity, and one across
//! antennas gives the azimuth. Peak extraction works on the noncoherently
//! integrated power profile with a fixed threshold over the estimated
//! noise floor, and masks the known block-structure sidelobes of the
//! preamble so they cannot spawn phantom targets.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dsp;
use crate::error::SimError;
use crate::golay::{autocorrelation, PreambleWaveform};
use crate::seeds;
use crate::trajectory::TargetState;
use crate::Result;
use crate::SPEED_OF_LIGHT;

/// Radar-stage configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RadarConfig {
    /// Carrier frequency in Hz.
    pub carrier_freq_hz: f64,
    /// Fast-time sample rate in Hz.
    pub sample_rate_hz: f64,
    /// Pulse repetition interval in seconds.
    pub pri_s: f64,
    /// Transmit duty cycle within the PRI.
    pub duty_cycle: f64,
    /// Pulses per coherent processing interval.
    pub num_pulses: usize,
    /// Receive array elements.
    pub num_rx_antennas: usize,
    /// Element spacing in meters (half wavelength by default).
    pub element_spacing_m: f64,
    /// Complex noise power per fast-time sample.
    pub noise_power: f64,
    /// Detection threshold over the estimated noise floor, dB.
    pub detection_threshold_db: f64,
    /// Pulse decimation of the detection scan (estimation always uses
    /// every pulse). 1 integrates the full cube.
    pub detection_pulse_stride: usize,
}

impl Default for RadarConfig {
    fn default() -> Self {
        let carrier_freq_hz = 60e9;
        RadarConfig {
            carrier_freq_hz,
            sample_rate_hz: 2.64e9,
            pri_s: 0.58e-6,
            duty_cycle: 0.5,
            num_pulses: 512,
            num_rx_antennas: 16,
            element_spacing_m: SPEED_OF_LIGHT / carrier_freq_hz / 2.0,
            noise_power: 1e-6,
            detection_threshold_db: 13.0,
            detection_pulse_stride: 4,
        }
    }
}

impl RadarConfig {
    /// Carrier wavelength in meters.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    /// Fast-time samples per PRI.
    pub fn fast_time_len(&self) -> usize {
        (self.sample_rate_hz * self.pri_s).round() as usize
    }

    /// Largest unambiguous range: echoes must return within the listening
    /// window `(1 - duty) * PRI`.
    pub fn max_unambiguous_range_m(&self) -> f64 {
        (1.0 - self.duty_cycle) * self.pri_s * SPEED_OF_LIGHT / 2.0
    }

    /// Width of one range bin, `c / (2 Fs)`.
    pub fn range_bin_m(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.sample_rate_hz)
    }

    /// Number of range bins covering the unambiguous window.
    pub fn num_range_bins(&self) -> usize {
        (self.max_unambiguous_range_m() / self.range_bin_m()).round() as usize + 1
    }

    /// Width of one Doppler velocity bin, `lambda / (2 P T_PRI)`.
    pub fn velocity_bin_mps(&self) -> f64 {
        self.wavelength_m() / (2.0 * self.num_pulses as f64 * self.pri_s)
    }

    /// Width of one spatial bin in sine space, `lambda / (N d)`.
    pub fn sin_azimuth_bin(&self) -> f64 {
        self.wavelength_m() / (self.num_rx_antennas as f64 * self.element_spacing_m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.carrier_freq_hz <= 0.0 || self.sample_rate_hz <= 0.0 || self.pri_s <= 0.0 {
            return Err(SimError::Config("radar rates must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.duty_cycle) {
            return Err(SimError::Config("duty cycle must be in (0, 1)".into()));
        }
        if self.num_pulses == 0 || self.num_rx_antennas == 0 {
            return Err(SimError::Config(
                "pulse and antenna counts must be positive".into(),
            ));
        }
        if self.element_spacing_m <= 0.0 {
            return Err(SimError::Config("element spacing must be positive".into()));
        }
        if self.noise_power < 0.0 {
            return Err(SimError::Config("noise power must be nonnegative".into()));
        }
        if self.detection_pulse_stride == 0 || self.detection_pulse_stride > self.num_pulses {
            return Err(SimError::Config("detection stride out of range".into()));
        }
        Ok(())
    }
}

/// One point scatterer for cube synthesis.
#[derive(Debug, Clone, Copy)]
pub struct RadarTarget {
    pub range_m: f64,
    pub velocity_mps: f64,
    pub azimuth_rad: f64,
    pub amplitude: Complex64,
}

impl From<&TargetState> for RadarTarget {
    fn from(st: &TargetState) -> RadarTarget {
        RadarTarget {
            range_m: st.range_m,
            velocity_mps: st.radial_velocity_mps,
            azimuth_rad: st.azimuth_rad,
            amplitude: st.reflectivity_complex(),
        }
    }
}

/// Complex radar returns indexed `[antenna][pulse][fast time]`.
#[derive(Debug, Clone)]
pub struct DataCube {
    pub num_antennas: usize,
    pub num_pulses: usize,
    pub fast_time_len: usize,
    samples: Vec<Complex64>,
}

impl DataCube {
    fn zeroed(num_antennas: usize, num_pulses: usize, fast_time_len: usize) -> DataCube {
        DataCube {
            num_antennas,
            num_pulses,
            fast_time_len,
            samples: vec![Complex64::default(); num_antennas * num_pulses * fast_time_len],
        }
    }

    #[inline]
    fn record_index(&self, antenna: usize, pulse: usize) -> usize {
        (antenna * self.num_pulses + pulse) * self.fast_time_len
    }

    /// Fast-time record of one antenna/pulse pair.
    pub fn record(&self, antenna: usize, pulse: usize) -> &[Complex64] {
        let i = self.record_index(antenna, pulse);
        &self.samples[i..i + self.fast_time_len]
    }

    /// Single sample accessor.
    pub fn at(&self, antenna: usize, pulse: usize, tau: usize) -> Complex64 {
        self.samples[self.record_index(antenna, pulse) + tau]
    }

    /// Elementwise sum of two cubes of identical shape.
    pub fn add(&self, other: &DataCube) -> Result<DataCube> {
        if self.samples.len() != other.samples.len() {
            return Err(SimError::LengthMismatch {
                context: "data cube sum",
                left: self.samples.len(),
                right: other.samples.len(),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.samples.iter_mut().zip(&other.samples) {
            *a += b;
        }
        Ok(out)
    }
}

/// Two-way Doppler frequency `2 v / lambda` of a radial velocity.
pub fn doppler_frequency(velocity_mps: f64, wavelength_m: f64) -> f64 {
    2.0 * velocity_mps / wavelength_m
}

/// Synthesize the reflected data cube for a set of point targets plus
/// circular white Gaussian noise of the configured power. Fractional
/// echo delays are rounded to the nearest fast-time bin.
pub fn synthesize_datacube(
    cfg: &RadarConfig,
    targets: &[RadarTarget],
    waveform: &PreambleWaveform,
    rng_seed: u64,
) -> Result<DataCube> {
    let mut cube = DataCube::zeroed(0, 0, 0);
    synthesize_datacube_into(&mut cube, cfg, targets, waveform, rng_seed)?;
    Ok(cube)
}

/// [`synthesize_datacube`] into a reusable buffer: the hot loop of a long
/// run keeps one cube allocation alive across frames.
pub fn synthesize_datacube_into(
    cube: &mut DataCube,
    cfg: &RadarConfig,
    targets: &[RadarTarget],
    waveform: &PreambleWaveform,
    rng_seed: u64,
) -> Result<()> {
    cfg.validate()?;
    let q = cfg.fast_time_len();
    if waveform.len() > q {
        return Err(SimError::invalid(format!(
            "waveform ({} samples) exceeds the PRI ({q} samples)",
            waveform.len()
        )));
    }
    for t in targets {
        if t.range_m < 0.0 || t.range_m > cfg.max_unambiguous_range_m() {
            return Err(SimError::invalid(format!(
                "target range {} m outside the unambiguous window 0..{:.2} m",
                t.range_m,
                cfg.max_unambiguous_range_m()
            )));
        }
    }

    cube.num_antennas = cfg.num_rx_antennas;
    cube.num_pulses = cfg.num_pulses;
    cube.fast_time_len = q;
    let total = cfg.num_rx_antennas * cfg.num_pulses * q;
    cube.samples.clear();
    cube.samples.resize(total, Complex64::default());
    let lambda = cfg.wavelength_m();
    let template: Vec<f64> = waveform.samples().iter().map(|&x| f64::from(x)).collect();
    let num_pulses = cfg.num_pulses;

    for target in targets {
        let delay_bin =
            (2.0 * target.range_m / SPEED_OF_LIGHT * cfg.sample_rate_hz).round() as usize;
        let doppler = doppler_frequency(target.velocity_mps, lambda);
        let pulse_phase: Vec<Complex64> = (0..num_pulses)
            .map(|p| {
                Complex64::from_polar(
                    1.0,
                    -2.0 * std::f64::consts::PI * doppler * p as f64 * cfg.pri_s,
                )
            })
            .collect();
        let spatial_step =
            -2.0 * std::f64::consts::PI / lambda * cfg.element_spacing_m * target.azimuth_rad.sin();
        let span = waveform.len().min(q - delay_bin);

        cube.samples
            .par_chunks_mut(num_pulses * q)
            .enumerate()
            .for_each(|(n, antenna_slice)| {
                let antenna = Complex64::from_polar(1.0, spatial_step * n as f64);
                for (p, record) in antenna_slice.chunks_mut(q).enumerate() {
                    let scale = target.amplitude * antenna * pulse_phase[p];
                    let echo = &mut record[delay_bin..delay_bin + span];
                    for (slot, &x) in echo.iter_mut().zip(&template) {
                        *slot += scale * x;
                    }
                }
            });
    }

    if cfg.noise_power > 0.0 {
        let std_dev = (cfg.noise_power / 2.0).sqrt();
        let per_antenna = cfg.num_pulses * q;
        cube.samples
            .par_chunks_mut(per_antenna)
            .enumerate()
            .for_each(|(n, slice)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(rng_seed, &[n as u64]));
                for v in slice {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    *v += Complex64::new(re * std_dev, im * std_dev);
                }
            });
    }
    Ok(())
}

/// Noncoherently integrated range profile: mean matched-filter output
/// power per range bin, plus its peak bin.
#[derive(Debug, Clone)]
pub struct RangeProfile {
    /// Mean `|correlation|^2` over the integrated records, per range bin.
    pub power: Vec<f64>,
    /// Bin with the highest integrated power.
    pub peak_bin: usize,
}

impl RangeProfile {
    /// Range in meters of a bin under the given configuration.
    pub fn bin_to_range(cfg: &RadarConfig, bin: usize) -> f64 {
        bin as f64 * cfg.range_bin_m()
    }
}

/// Matched-filter every fast-time record against the preamble and
/// integrate the output power over all antennas and pulses.
pub fn range_profile(
    cube: &DataCube,
    cfg: &RadarConfig,
    waveform: &PreambleWaveform,
) -> RangeProfile {
    integrated_range_power(cube, cfg, waveform, 1)
}

fn integrated_range_power(
    cube: &DataCube,
    cfg: &RadarConfig,
    waveform: &PreambleWaveform,
    pulse_stride: usize,
) -> RangeProfile {
    let bins = cfg.num_range_bins().min(cube.fast_time_len);
    let correlator = dsp::TemplateCorrelator::new(waveform.samples(), bins - 1);
    // Per-antenna partial sums keep the accumulation order fixed no
    // matter how rayon schedules the work.
    let partials: Vec<Vec<f64>> = (0..cube.num_antennas)
        .into_par_iter()
        .map(|n| {
            let mut acc = vec![0.0f64; bins];
            let mut work = Vec::new();
            let mut p = 0;
            while p < cube.num_pulses {
                let corr = correlator.correlate_into(cube.record(n, p), &mut work);
                for (a, c) in acc.iter_mut().zip(corr) {
                    *a += c.norm_sqr();
                }
                p += pulse_stride;
            }
            acc
        })
        .collect();

    let pulses_used = cube.num_pulses.div_ceil(pulse_stride);
    let scale = 1.0 / (cube.num_antennas * pulses_used) as f64;
    let mut power = vec![0.0f64; bins];
    for acc in &partials {
        for (p, a) in power.iter_mut().zip(acc) {
            *p += a;
        }
    }
    for p in &mut power {
        *p *= scale;
    }
    let peak_bin = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite power"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    RangeProfile { power, peak_bin }
}

/// Matched-filter output of every record at one range bin, as an
/// antenna-major `[n][p]` matrix.
fn compressed_at_bin(cube: &DataCube, waveform: &PreambleWaveform, bin: usize) -> Vec<Complex64> {
    let template = waveform.samples();
    let q = cube.fast_time_len;
    let span = template.len().min(q - bin);
    let mut out = vec![Complex64::default(); cube.num_antennas * cube.num_pulses];
    out.par_chunks_mut(cube.num_pulses)
        .enumerate()
        .for_each(|(n, row)| {
            for (p, slot) in row.iter_mut().enumerate() {
                let rec = cube.record(n, p);
                let mut acc = Complex64::default();
                for t in 0..span {
                    if template[t] > 0 {
                        acc += rec[bin + t];
                    } else {
                        acc -= rec[bin + t];
                    }
                }
                *slot = acc;
            }
        });
    out
}

/// Signed peak index of an unnormalized `+j` transform of `data`,
/// with power optionally accumulated across repeated rows.
fn spectral_peak(rows: &[&[Complex64]], len: usize) -> i64 {
    let mut power = vec![0.0f64; len];
    let mut buf = vec![Complex64::default(); len];
    for row in rows {
        buf.copy_from_slice(row);
        dsp::ifft_inplace(&mut buf);
        for (pw, v) in power.iter_mut().zip(&buf) {
            *pw += v.norm_sqr();
        }
    }
    let peak = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite power"))
        .map(|(i, _)| i)
        .unwrap_or(0) as i64;
    if peak >= len as i64 / 2 + len as i64 % 2 {
        peak - len as i64
    } else {
        peak
    }
}

fn doppler_from_compressed(z: &[Complex64], cube: &DataCube, cfg: &RadarConfig) -> f64 {
    let rows: Vec<&[Complex64]> = z.chunks(cube.num_pulses).collect();
    let k = spectral_peak(&rows, cube.num_pulses);
    let freq = k as f64 / (cube.num_pulses as f64 * cfg.pri_s);
    freq * cfg.wavelength_m() / 2.0
}

fn angle_from_compressed(
    z: &[Complex64],
    cube: &DataCube,
    cfg: &RadarConfig,
    pulse_range: std::ops::Range<usize>,
) -> f64 {
    let n_ant = cube.num_antennas;
    // Transpose: one spatial snapshot per selected pulse.
    let snapshots: Vec<Vec<Complex64>> = pulse_range
        .map(|p| (0..n_ant).map(|n| z[n * cube.num_pulses + p]).collect())
        .collect();
    let rows: Vec<&[Complex64]> = snapshots.iter().map(Vec::as_slice).collect();
    let k = spectral_peak(&rows, n_ant);
    let sin_az = (k as f64 / n_ant as f64) * cfg.wavelength_m() / cfg.element_spacing_m;
    sin_az.clamp(-1.0, 1.0).asin()
}

/// Doppler velocity estimate at a detected range bin: a pulse-axis DFT of
/// the compressed returns, integrated over antennas.
pub fn doppler_spectrum(
    cube: &DataCube,
    cfg: &RadarConfig,
    waveform: &PreambleWaveform,
    range_bin: usize,
) -> Result<f64> {
    if range_bin >= cube.fast_time_len {
        return Err(SimError::invalid(format!(
            "range bin {range_bin} out of cube"
        )));
    }
    let z = compressed_at_bin(cube, waveform, range_bin);
    Ok(doppler_from_compressed(&z, cube, cfg))
}

/// Azimuth estimate at a detected range bin: an antenna-axis DFT of the
/// compressed returns, integrated over the selected pulses.
pub fn angle_spectrum(
    cube: &DataCube,
    cfg: &RadarConfig,
    waveform: &PreambleWaveform,
    range_bin: usize,
    pulse_range: std::ops::Range<usize>,
) -> Result<f64> {
    if range_bin >= cube.fast_time_len {
        return Err(SimError::invalid(format!(
            "range bin {range_bin} out of cube"
        )));
    }
    if pulse_range.end > cube.num_pulses || pulse_range.is_empty() {
        return Err(SimError::invalid("pulse slice out of cube".to_string()));
    }
    let z = compressed_at_bin(cube, waveform, range_bin);
    Ok(angle_from_compressed(&z, cube, cfg, pulse_range))
}

/// One detected target.
#[derive(Debug, Clone)]
pub struct Detection {
    pub range_m: f64,
    pub velocity_mps: f64,
    pub azimuth_rad: f64,
    /// Integrated matched-filter peak power.
    pub peak_power: f64,
    /// True when the Doppler magnitude exceeds half a velocity bin,
    /// separating the moving MU from static clutter.
    pub moving: bool,
}

/// Upper bound on detections returned per cube.
const MAX_DETECTIONS: usize = 8;
/// Exclusion half-width (bins) around an accepted peak.
const PEAK_MASK_HALF_WIDTH: usize = 8;
/// Power margin (linear) a candidate must clear over the predicted
/// sidelobes of already-accepted peaks.
const SIDELOBE_MARGIN: f64 = 4.0;

/// Detect targets in a cube: find integrated matched-filter peaks above
/// the noise floor by `detection_threshold_db`, reject the preamble's own
/// correlation sidelobes, and attach Doppler and azimuth estimates.
/// Detections come back ordered by decreasing peak power.
pub fn detect_targets(
    cube: &DataCube,
    cfg: &RadarConfig,
    waveform: &PreambleWaveform,
) -> Result<Vec<Detection>> {
    let profile = integrated_range_power(cube, cfg, waveform, cfg.detection_pulse_stride);
    let bins = profile.power.len();

    // Noise floor from the median bin power; with a target present the
    // median sits on the sidelobe floor, still far below the peak.
    let mut sorted = profile.power.clone();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite power"));
    let floor = sorted[bins / 2];
    let threshold = floor * 10f64.powf(cfg.detection_threshold_db / 10.0);

    // Normalized autocorrelation magnitude of the waveform, used to
    // predict where an accepted echo's own sidelobes land.
    let ac = autocorrelation(waveform.samples());
    let ac_norm: Vec<f64> = ac.iter().map(|&v| v.abs() as f64 / ac[0] as f64).collect();

    let mut masked = vec![false; bins];
    let mut detections = Vec::new();
    while detections.len() < MAX_DETECTIONS {
        let candidate = profile
            .power
            .iter()
            .enumerate()
            .filter(|(i, p)| !masked[*i] && **p > threshold)
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite power"));
        let Some((bin, &peak_power)) = candidate else {
            break;
        };

        let z = compressed_at_bin(cube, waveform, bin);
        let velocity = doppler_from_compressed(&z, cube, cfg);
        let azimuth = angle_from_compressed(&z, cube, cfg, 0..cube.num_pulses);
        detections.push(Detection {
            range_m: RangeProfile::bin_to_range(cfg, bin),
            velocity_mps: velocity,
            azimuth_rad: azimuth,
            peak_power,
            moving: velocity.abs() > cfg.velocity_bin_mps() / 2.0,
        });

        // Mask the peak's neighborhood and every bin where this echo's
        // own correlation sidelobes could masquerade as a target.
        for (k, slot) in masked.iter_mut().enumerate() {
            let lag = bin.abs_diff(k);
            if lag <= PEAK_MASK_HALF_WIDTH {
                *slot = true;
            } else if lag < ac_norm.len() {
                let predicted = peak_power * ac_norm[lag] * ac_norm[lag];
                if profile.power[k] <= SIDELOBE_MARGIN * predicted {
                    *slot = true;
                }
            }
        }
    }
    Ok(detections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golay::standard_preamble;

    fn small_cfg() -> RadarConfig {
        RadarConfig {
            num_pulses: 8,
            num_rx_antennas: 2,
            noise_power: 0.0,
            detection_pulse_stride: 1,
            ..RadarConfig::default()
        }
    }

    fn target(r: f64, v: f64, az_deg: f64, amp: f64) -> RadarTarget {
        RadarTarget {
            range_m: r,
            velocity_mps: v,
            azimuth_rad: az_deg.to_radians(),
            amplitude: Complex64::new(amp, 0.0),
        }
    }

    #[test]
    fn default_config_matches_the_link_parameters() {
        let cfg = RadarConfig::default();
        assert_eq!(cfg.fast_time_len(), 1531);
        assert!((cfg.max_unambiguous_range_m() - 43.47).abs() < 0.05);
        assert!((cfg.range_bin_m() - 0.0568).abs() < 1e-4);
        assert!((cfg.velocity_bin_mps() - 8.41).abs() < 0.02);
        assert!((cfg.sin_azimuth_bin() - 0.125).abs() < 1e-12);
        assert_eq!(cfg.num_range_bins(), 767);
    }

    #[test]
    fn doppler_frequency_examples() {
        assert_eq!(doppler_frequency(0.0, 0.005), 0.0);
        assert_eq!(doppler_frequency(15.0, 0.005), 6000.0);
        assert_eq!(doppler_frequency(-15.0, 0.005), -6000.0);
    }

    #[test]
    fn zero_range_boresight_target_repeats_the_waveform() {
        let cfg = small_cfg();
        let w = standard_preamble();
        let cube = synthesize_datacube(&cfg, &[target(0.0, 0.0, 0.0, 1.0)], &w, 0).unwrap();
        for n in 0..cfg.num_rx_antennas {
            for p in 0..cfg.num_pulses {
                let rec = cube.record(n, p);
                for (t, &x) in w.samples().iter().enumerate() {
                    assert_eq!(rec[t], Complex64::new(f64::from(x), 0.0));
                }
                for &v in &rec[w.len()..] {
                    assert_eq!(v, Complex64::default());
                }
            }
        }
    }

    #[test]
    fn echo_onset_lands_in_the_computed_delay_bin() {
        let cfg = small_cfg();
        let w = standard_preamble();
        let cube = synthesize_datacube(&cfg, &[target(10.0, 0.0, 0.0, 1.0)], &w, 0).unwrap();
        let expected = (2.0 * 10.0 / SPEED_OF_LIGHT * cfg.sample_rate_hz).round() as usize;
        assert_eq!(expected, 176);
        let rec = cube.record(1, 3);
        for &v in &rec[..expected] {
            assert_eq!(v, Complex64::default());
        }
        assert!(rec[expected].norm() > 0.0);
    }

    #[test]
    fn synthesis_is_linear_in_the_target_set() {
        let cfg = small_cfg();
        let w = standard_preamble();
        let a = target(12.0, 10.0, 20.0, 0.8);
        let b = target(30.0, -5.0, -35.0, 1.3);
        let cube_a = synthesize_datacube(&cfg, &[a], &w, 0).unwrap();
        let cube_b = synthesize_datacube(&cfg, &[b], &w, 0).unwrap();
        let cube_ab = synthesize_datacube(&cfg, &[a, b], &w, 0).unwrap();
        let sum = cube_a.add(&cube_b).unwrap();
        let mut max_rel = 0.0f64;
        for n in 0..cfg.num_rx_antennas {
            for p in 0..cfg.num_pulses {
                for t in 0..cube_ab.fast_time_len {
                    let d = (cube_ab.at(n, p, t) - sum.at(n, p, t)).norm();
                    let scale = cube_ab.at(n, p, t).norm().max(1.0);
                    max_rel = max_rel.max(d / scale);
                }
            }
        }
        assert!(max_rel < 1e-12, "max relative deviation {max_rel}");
    }

    #[test]
    fn out_of_window_targets_are_rejected() {
        let cfg = small_cfg();
        let w = standard_preamble();
        assert!(synthesize_datacube(&cfg, &[target(44.0, 0.0, 0.0, 1.0)], &w, 0).is_err());
    }

    #[test]
    fn range_peak_is_within_one_bin() {
        let cfg = small_cfg();
        let w = standard_preamble();
        for r in [10.0, 43.0] {
            let cube = synthesize_datacube(&cfg, &[target(r, 0.0, 0.0, 1.0)], &w, 0).unwrap();
            let profile = range_profile(&cube, &cfg, &w);
            let est = RangeProfile::bin_to_range(&cfg, profile.peak_bin);
            assert!((est - r).abs() <= cfg.range_bin_m(), "r={r}: est {est}");
        }
    }

    #[test]
    fn noise_only_cube_yields_no_detections() {
        let cfg = RadarConfig {
            noise_power: 1e-6,
            ..small_cfg()
        };
        let w = standard_preamble();
        let cube = synthesize_datacube(&cfg, &[], &w, 7).unwrap();
        let detections = detect_targets(&cube, &cfg, &w).unwrap();
        assert!(detections.is_empty(), "{detections:?}");
    }

    #[test]
    fn zero_cube_yields_no_detections() {
        let cfg = small_cfg();
        let w = standard_preamble();
        let cube = synthesize_datacube(&cfg, &[], &w, 0).unwrap();
        assert!(detect_targets(&cube, &cfg, &w).unwrap().is_empty());
    }

    #[test]
    fn noise_floor_matches_configured_power_times_energy() {
        // Mean matched-filter output power over noise-only cubes is
        // noise_power * waveform energy.
        let cfg = RadarConfig {
            num_pulses: 2,
            num_rx_antennas: 2,
            noise_power: 3e-4,
            detection_pulse_stride: 1,
            ..RadarConfig::default()
        };
        let w = standard_preamble();
        let mut mean = 0.0;
        let cubes = 100;
        for seed in 0..cubes {
            let cube = synthesize_datacube(&cfg, &[], &w, seed).unwrap();
            let profile = range_profile(&cube, &cfg, &w);
            mean += profile.power.iter().sum::<f64>() / profile.power.len() as f64;
        }
        mean /= cubes as f64;
        let expect = cfg.noise_power * w.energy();
        assert!(
            ((mean - expect) / expect).abs() < 0.05,
            "measured {mean}, expected {expect}"
        );
    }

    #[test]
    fn static_target_measures_zero_velocity() {
        let cfg = small_cfg();
        let w = standard_preamble();
        let cube = synthesize_datacube(&cfg, &[target(15.0, 0.0, 0.0, 1.0)], &w, 0).unwrap();
        let profile = range_profile(&cube, &cfg, &w);
        let v = doppler_spectrum(&cube, &cfg, &w, profile.peak_bin).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn moving_target_velocity_is_within_one_bin() {
        let cfg = RadarConfig {
            noise_power: 0.0,
            detection_pulse_stride: 1,
            ..RadarConfig::default()
        };
        let w = standard_preamble();
        for v in [15.0, -15.0] {
            let cube = synthesize_datacube(&cfg, &[target(20.0, v, 0.0, 1.0)], &w, 0).unwrap();
            let profile = range_profile(&cube, &cfg, &w);
            let est = doppler_spectrum(&cube, &cfg, &w, profile.peak_bin).unwrap();
            assert!(
                (est - v).abs() <= cfg.velocity_bin_mps(),
                "v={v}: est {est}"
            );
            assert_eq!(est.signum(), v.signum());
        }
    }

    #[test]
    fn boresight_and_thirty_degree_angles_hit_exact_bins() {
        let cfg = RadarConfig {
            num_pulses: 4,
            noise_power: 0.0,
            detection_pulse_stride: 1,
            ..RadarConfig::default()
        };
        let w = standard_preamble();
        for (az, expect_sin) in [(0.0, 0.0), (30.0, 0.5), (-30.0, -0.5)] {
            let cube = synthesize_datacube(&cfg, &[target(10.0, 0.0, az, 1.0)], &w, 0).unwrap();
            let profile = range_profile(&cube, &cfg, &w);
            let est = angle_spectrum(&cube, &cfg, &w, profile.peak_bin, 0..cfg.num_pulses).unwrap();
            // 30 degrees maps to sin-space bin 4 of 16 exactly.
            assert!(
                (est.sin() - expect_sin).abs() < 1e-9,
                "az={az}: sin {}",
                est.sin()
            );
        }
    }

    #[test]
    fn single_target_detection_composes_all_three_estimates() {
        let cfg = RadarConfig {
            noise_power: 0.0,
            detection_pulse_stride: 4,
            ..RadarConfig::default()
        };
        let w = standard_preamble();
        let (r, v, az) = (22.0, 15.0, 25.0);
        let cube = synthesize_datacube(&cfg, &[target(r, v, az, 1e-3)], &w, 0).unwrap();
        let detections = detect_targets(&cube, &cfg, &w).unwrap();
        assert_eq!(detections.len(), 1, "{detections:?}");
        let d = &detections[0];
        assert!((d.range_m - r).abs() <= cfg.range_bin_m());
        assert!((d.velocity_mps - v).abs() <= cfg.velocity_bin_mps());
        assert!((d.azimuth_rad.sin() - az.to_radians().sin()).abs() <= cfg.sin_azimuth_bin());
        assert!(d.moving);
    }

    #[test]
    fn moving_user_and_static_clutter_are_separated() {
        let cfg = RadarConfig {
            noise_power: 1e-8,
            detection_pulse_stride: 4,
            ..RadarConfig::default()
        };
        let w = standard_preamble();
        let mu = target(18.0, 15.0, 10.0, 1.0 / (18.0f64 * 18.0));
        let clutter = target(31.0, 0.0, -20.0, 1.0 / (31.0f64 * 31.0));
        let cube = synthesize_datacube(&cfg, &[mu, clutter], &w, 5).unwrap();
        let detections = detect_targets(&cube, &cfg, &w).unwrap();
        assert_eq!(detections.len(), 2, "{detections:?}");
        let moving: Vec<&Detection> = detections.iter().filter(|d| d.moving).collect();
        assert_eq!(moving.len(), 1);
        assert!((moving[0].range_m - 18.0).abs() <= cfg.range_bin_m());
        let still: Vec<&Detection> = detections.iter().filter(|d| !d.moving).collect();
        assert_eq!(still.len(), 1);
        assert!((still[0].range_m - 31.0).abs() <= cfg.range_bin_m());
    }
}
