//! Complementary Golay pairs and the 768-sample radar preamble.
//!
//! A Golay complementary pair is two bipolar sequences whose aperiodic
//! autocorrelations sum to a perfect impulse: `2L` at lag zero and exactly
//! zero everywhere else, in integer arithmetic. Pulse compression against
//! such a pair (or against the 768-sample preamble assembled from it) gives
//! the very high peak-to-sidelobe ratio the sensing stage relies on.

use num_complex::Complex64;

use crate::error::SimError;
use crate::Result;

/// Transmit duty cycle of the sensing stage.
pub const DEFAULT_DUTY_CYCLE: f64 = 0.5;
/// Baseband sample rate shared by the radar and OFDM stages (Hz).
pub const DEFAULT_SAMPLE_RATE: f64 = 2.64e9;
/// Number of bipolar samples in the radar preamble.
pub const PREAMBLE_LEN: usize = 768;

/// A complementary pair of bipolar (+1/-1) sequences of equal power-of-two
/// length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolayPair {
    a: Vec<i8>,
    b: Vec<i8>,
}

impl GolayPair {
    /// Sequence `a` of the pair.
    pub fn a(&self) -> &[i8] {
        &self.a
    }

    /// Sequence `b` of the pair.
    pub fn b(&self) -> &[i8] {
        &self.b
    }

    /// Common length of both sequences.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    /// True only for the degenerate empty pair (never produced by
    /// [`generate_golay_pair`]).
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// The 768-sample bipolar probing waveform transmitted during the sensing
/// stage, together with its timing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PreambleWaveform {
    samples: Vec<i8>,
    /// Fraction of the pulse repetition interval spent transmitting.
    pub duty_cycle: f64,
    /// Baseband sample rate in Hz.
    pub sample_rate: f64,
}

impl PreambleWaveform {
    /// Bipolar samples of the waveform.
    pub fn samples(&self) -> &[i8] {
        &self.samples
    }

    /// Number of samples (always [`PREAMBLE_LEN`]).
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; the waveform is never empty.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Energy of the waveform, `sum(x^2) = len` for bipolar samples.
    pub fn energy(&self) -> f64 {
        self.samples.len() as f64
    }
}

/// Generate a complementary Golay pair of the given power-of-two length
/// using the standard recursive doubling construction
/// `a' = a || b`, `b' = a || -b` from the base pair `([+1,+1], [+1,-1])`.
pub fn generate_golay_pair(length: usize) -> Result<GolayPair> {
    if length < 2 || !length.is_power_of_two() {
        return Err(SimError::invalid(format!(
            "Golay pair length must be a power of two >= 2, got {length}"
        )));
    }
    let mut a: Vec<i8> = vec![1, 1];
    let mut b: Vec<i8> = vec![1, -1];
    while a.len() < length {
        let next_a: Vec<i8> = a.iter().chain(b.iter()).copied().collect();
        let next_b: Vec<i8> = a.iter().copied().chain(b.iter().map(|&v| -v)).collect();
        a = next_a;
        b = next_b;
    }
    Ok(GolayPair { a, b })
}

/// Aperiodic autocorrelation of a bipolar sequence at every non-negative
/// lag, in exact integer arithmetic. `out[k] = sum_t x[t+k] * x[t]`.
pub fn autocorrelation(seq: &[i8]) -> Vec<i64> {
    let n = seq.len();
    (0..n)
        .map(|k| {
            (0..n - k)
                .map(|t| i64::from(seq[t + k]) * i64::from(seq[t]))
                .sum()
        })
        .collect()
}

/// Cross-correlate a complex record against a bipolar template at every
/// non-negative lag; the template is taken as zero past the end of the
/// record. `out[k] = sum_t rx[t+k] * template[t]`.
pub fn correlate_bipolar(rx: &[Complex64], template: &[i8]) -> Vec<Complex64> {
    let n = rx.len();
    let m = template.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let span = m.min(n - k);
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..span {
            let s = rx[k + t];
            if template[t] > 0 {
                acc += s;
            } else {
                acc -= s;
            }
        }
        *slot = acc;
    }
    out
}

/// Ideal complementary correlator: correlate `rx_a` against `a` and `rx_b`
/// against `b` and sum. For a noiseless echo of the pair delayed by `k0`
/// samples the profile is `2L * amplitude` at lag `k0` and zero elsewhere.
pub fn complementary_correlate(
    pair: &GolayPair,
    rx_a: &[Complex64],
    rx_b: &[Complex64],
) -> Result<Vec<Complex64>> {
    if rx_a.len() != rx_b.len() {
        return Err(SimError::LengthMismatch {
            context: "complementary correlator inputs",
            left: rx_a.len(),
            right: rx_b.len(),
        });
    }
    if rx_a.len() < pair.len() {
        return Err(SimError::invalid(format!(
            "received records shorter than the pair: {} < {}",
            rx_a.len(),
            pair.len()
        )));
    }
    let ca = correlate_bipolar(rx_a, pair.a());
    let cb = correlate_bipolar(rx_b, pair.b());
    Ok(ca.iter().zip(&cb).map(|(x, y)| x + y).collect())
}

/// Assemble the 768-sample preamble from a length-128 pair as the block
/// sequence `Gu512 || Gv256` with `Gu512 = [-b, -a, b, -a]` and
/// `Gv256 = [-b, a]`, mirroring the channel-estimation prefix of the
/// IEEE 802.11ad preamble.
pub fn build_preamble(pair_128: &GolayPair) -> Result<PreambleWaveform> {
    if pair_128.len() != 128 {
        return Err(SimError::invalid(format!(
            "preamble requires a length-128 pair, got {}",
            pair_128.len()
        )));
    }
    let a = pair_128.a();
    let b = pair_128.b();
    let neg = |s: &[i8]| s.iter().map(|&v| -v).collect::<Vec<i8>>();

    let mut samples = Vec::with_capacity(PREAMBLE_LEN);
    samples.extend_from_slice(&neg(b));
    samples.extend_from_slice(&neg(a));
    samples.extend_from_slice(b);
    samples.extend_from_slice(&neg(a));
    samples.extend_from_slice(&neg(b));
    samples.extend_from_slice(a);
    debug_assert_eq!(samples.len(), PREAMBLE_LEN);

    Ok(PreambleWaveform {
        samples,
        duty_cycle: DEFAULT_DUTY_CYCLE,
        sample_rate: DEFAULT_SAMPLE_RATE,
    })
}

/// Build the standard waveform used throughout the simulator: the preamble
/// assembled from the recursive length-128 pair.
pub fn standard_preamble() -> PreambleWaveform {
    let pair = generate_golay_pair(128).expect("128 is a valid Golay length");
    build_preamble(&pair).expect("pair has length 128")
}

/// Peak-to-maximum-sidelobe ratio (dB) of the waveform's own matched-filter
/// output, i.e. of its aperiodic autocorrelation.
pub fn matched_filter_psl_db(waveform: &PreambleWaveform) -> f64 {
    let ac = autocorrelation(waveform.samples());
    let peak = ac[0].abs();
    let max_side = ac[1..].iter().map(|v| v.abs()).max().unwrap_or(0);
    20.0 * (peak as f64 / max_side as f64).log10()
}
