//! OFDM framing: subcarrier mapping, IFFT/CP transmit chain and the known
//! training symbol used for synchronization and channel estimation.
//!
//! Each OFDM symbol carries 384 modulated subcarriers placed on indices
//! 64..448 of the natural-order 512-point grid (64 nulls at both ends of
//! the array), is transformed with a 512-point IFFT and prepended with a
//! 128-sample cyclic prefix, giving 640 transmit samples per symbol and a
//! data overhead of 384/640 = 0.6.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsp;
use crate::error::SimError;
use crate::Result;

/// Seed of the deterministic training-symbol subcarrier values; part of the
/// waveform contract shared by transmitter and receiver.
const TRAINING_SEED: u64 = 0x0fd3_17a1;

/// OFDM numerology of the downlink.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OfdmConfig {
    /// IFFT length.
    pub n_fft: usize,
    /// Cyclic-prefix length in samples.
    pub n_cp: usize,
    /// Modulated subcarriers per symbol.
    pub n_data: usize,
    /// Null subcarriers at each end of the natural-order grid.
    pub n_null_each_side: usize,
    /// Data symbols per downlink frame (excluding the training symbol).
    pub symbols_per_frame: usize,
    /// Baseband sample rate in Hz.
    pub sample_rate: f64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        OfdmConfig {
            n_fft: 512,
            n_cp: 128,
            n_data: 384,
            n_null_each_side: 64,
            symbols_per_frame: 16,
            sample_rate: 2.64e9,
        }
    }
}

impl OfdmConfig {
    /// Check the structural invariants of the numerology.
    pub fn validate(&self) -> Result<()> {
        if self.n_fft == 0 || !self.n_fft.is_power_of_two() {
            return Err(SimError::Config(format!(
                "n_fft must be a power of two, got {}",
                self.n_fft
            )));
        }
        if 2 * self.n_null_each_side + self.n_data != self.n_fft {
            return Err(SimError::Config(format!(
                "nulls and data do not fill the grid: 2*{} + {} != {}",
                self.n_null_each_side, self.n_data, self.n_fft
            )));
        }
        if self.n_cp == 0 || self.n_cp >= self.n_fft {
            return Err(SimError::Config(format!(
                "cyclic prefix {} out of range for n_fft {}",
                self.n_cp, self.n_fft
            )));
        }
        if self.symbols_per_frame == 0 {
            return Err(SimError::Config(
                "symbols_per_frame must be positive".into(),
            ));
        }
        if self.sample_rate <= 0.0 {
            return Err(SimError::Config("sample_rate must be positive".into()));
        }
        Ok(())
    }

    /// Natural-order indices of the modulated subcarriers.
    pub fn data_bins(&self) -> std::ops::Range<usize> {
        self.n_null_each_side..self.n_null_each_side + self.n_data
    }

    /// Transmit samples per OFDM symbol including the cyclic prefix.
    pub fn samples_per_symbol(&self) -> usize {
        self.n_fft + self.n_cp
    }

    /// Data overhead factor `n_data / (n_fft + n_cp)`.
    pub fn overhead(&self) -> f64 {
        self.n_data as f64 / self.samples_per_symbol() as f64
    }

    /// Subcarrier spacing in Hz.
    pub fn subcarrier_spacing(&self) -> f64 {
        self.sample_rate / self.n_fft as f64
    }

    /// Amplitude applied after the orthonormal IFFT so the mean transmit
    /// sample power is exactly one for unit-power constellations.
    pub fn power_scale(&self) -> f64 {
        (self.n_fft as f64 / self.n_data as f64).sqrt()
    }

    /// Ratio (dB) between per-subcarrier symbol SNR and the time-domain
    /// SNR: the signal occupies `n_data` of `n_fft` bins while white noise
    /// fills all of them.
    pub fn subcarrier_snr_gain_db(&self) -> f64 {
        10.0 * (self.n_fft as f64 / self.n_data as f64).log10()
    }

    /// Samples in one downlink frame: training symbol plus data symbols.
    pub fn samples_per_frame(&self) -> usize {
        (self.symbols_per_frame + 1) * self.samples_per_symbol()
    }

    /// Data bits carried by one frame at the given bits-per-symbol.
    pub fn bits_per_frame(&self, bits_per_symbol: usize) -> usize {
        self.symbols_per_frame * self.n_data * bits_per_symbol
    }
}

/// Transform one natural-order frequency grid into `n_fft + n_cp` time
/// samples (orthonormal IFFT, power scale, cyclic prefix).
fn grid_to_time(grid: &[Complex64], cfg: &OfdmConfig) -> Vec<Complex64> {
    let mut core = grid.to_vec();
    dsp::ifft_inplace(&mut core);
    let scale = cfg.power_scale() / (cfg.n_fft as f64).sqrt();
    for v in &mut core {
        *v *= scale;
    }
    let mut out = Vec::with_capacity(cfg.samples_per_symbol());
    out.extend_from_slice(&core[cfg.n_fft - cfg.n_cp..]);
    out.extend_from_slice(&core);
    out
}

/// Forward transform of one CP-stripped symbol core back to the
/// natural-order grid, inverting [`grid_to_time`] exactly.
pub fn time_to_grid(core: &[Complex64], cfg: &OfdmConfig) -> Vec<Complex64> {
    let mut grid = core.to_vec();
    dsp::fft_inplace(&mut grid);
    let scale = 1.0 / (cfg.power_scale() * (cfg.n_fft as f64).sqrt());
    for v in &mut grid {
        *v *= scale;
    }
    grid
}

/// Map modulated symbols onto OFDM symbols and produce the time-domain
/// transmit samples. The symbol count must be a whole number of OFDM
/// symbols (`k * n_data`).
pub fn ofdm_transmit(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    if symbols.len() % cfg.n_data != 0 {
        return Err(SimError::invalid(format!(
            "{} symbols do not fill whole OFDM symbols of {} subcarriers",
            symbols.len(),
            cfg.n_data
        )));
    }
    let mut out = Vec::with_capacity(symbols.len() / cfg.n_data * cfg.samples_per_symbol());
    for chunk in symbols.chunks_exact(cfg.n_data) {
        let mut grid = vec![Complex64::default(); cfg.n_fft];
        grid[cfg.data_bins()].copy_from_slice(chunk);
        out.extend_from_slice(&grid_to_time(&grid, cfg));
    }
    Ok(out)
}

/// The known training symbol prepended to every frame.
///
/// It occupies only the even-indexed data subcarriers (amplitude `sqrt(2)`
/// QPSK points, fixed seed), which makes its two time-domain halves
/// identical - the property the coarse frequency-offset estimator relies
/// on - while keeping the same mean transmit power as a data symbol.
#[derive(Debug, Clone)]
pub struct TrainingSymbol {
    /// Natural-order subcarrier values (zeros on odd and null bins).
    pub grid: Vec<Complex64>,
    /// Time-domain symbol including cyclic prefix.
    pub time: Vec<Complex64>,
}

impl TrainingSymbol {
    /// Build the standard training symbol for the given numerology.
    pub fn standard(cfg: &OfdmConfig) -> TrainingSymbol {
        let mut rng = ChaCha8Rng::seed_from_u64(TRAINING_SEED);
        let mut grid = vec![Complex64::default(); cfg.n_fft];
        for k in cfg.data_bins() {
            if k % 2 == 0 {
                // QPSK corners of power 2: half the bins at twice the
                // power keep the symbol at data-symbol energy.
                let re = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let im = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                grid[k] = Complex64::new(re, im);
            }
        }
        let time = grid_to_time(&grid, cfg);
        TrainingSymbol { grid, time }
    }

    /// Time-domain core without the cyclic prefix.
    pub fn core<'a>(&'a self, cfg: &OfdmConfig) -> &'a [Complex64] {
        &self.time[cfg.n_cp..]
    }
}

/// Assemble a full transmit frame: training symbol followed by the data
/// symbols that carry `bits`.
pub fn build_frame(
    data_symbols: &[Complex64],
    training: &TrainingSymbol,
    cfg: &OfdmConfig,
) -> Result<Vec<Complex64>> {
    if data_symbols.len() != cfg.symbols_per_frame * cfg.n_data {
        return Err(SimError::invalid(format!(
            "frame expects {} data symbols, got {}",
            cfg.symbols_per_frame * cfg.n_data,
            data_symbols.len()
        )));
    }
    let mut frame = Vec::with_capacity(cfg.samples_per_frame());
    frame.extend_from_slice(&training.time);
    frame.extend_from_slice(&ofdm_transmit(data_symbols, cfg)?);
    Ok(frame)
}
