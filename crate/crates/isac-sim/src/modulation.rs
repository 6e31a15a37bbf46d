//! Modulation alphabets, Gray bit mapping and analytic AWGN error rates.
//!
//! All four alphabets are normalized to unit average symbol power and use a
//! reflected Gray code independently on the I and Q axes, so
//! minimum-distance demodulation reduces to per-axis level slicing.

use num_complex::Complex64;

use crate::error::SimError;
use crate::Result;

/// Modulation scheme of one downlink frame.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum ModScheme {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl ModScheme {
    /// All schemes in increasing spectral-efficiency order.
    pub const ALL: [ModScheme; 4] = [
        ModScheme::Bpsk,
        ModScheme::Qpsk,
        ModScheme::Qam16,
        ModScheme::Qam64,
    ];

    /// Bits carried by one symbol: 1, 2, 4 or 6.
    pub fn bits_per_symbol(self) -> usize {
        match self {
            ModScheme::Bpsk => 1,
            ModScheme::Qpsk => 2,
            ModScheme::Qam16 => 4,
            ModScheme::Qam64 => 6,
        }
    }

    /// Constellation size `M`.
    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    /// Per-axis amplitude normalization factor making the mean symbol
    /// power exactly one.
    fn axis_scale(self) -> f64 {
        match self {
            ModScheme::Bpsk => 1.0,
            ModScheme::Qpsk => 1.0 / 2.0_f64.sqrt(),
            ModScheme::Qam16 => 1.0 / 10.0_f64.sqrt(),
            ModScheme::Qam64 => 1.0 / 42.0_f64.sqrt(),
        }
    }

    /// Bits mapped to each quadrature axis.
    fn bits_per_axis(self) -> usize {
        match self {
            ModScheme::Bpsk => 1,
            ModScheme::Qpsk => 1,
            ModScheme::Qam16 => 2,
            ModScheme::Qam64 => 3,
        }
    }

    /// Canonical lowercase name used in configs, CSV records and plots.
    pub fn name(self) -> &'static str {
        match self {
            ModScheme::Bpsk => "bpsk",
            ModScheme::Qpsk => "qpsk",
            ModScheme::Qam16 => "qam16",
            ModScheme::Qam64 => "qam64",
        }
    }

    /// Parse the canonical name.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "bpsk" => Ok(ModScheme::Bpsk),
            "qpsk" => Ok(ModScheme::Qpsk),
            "qam16" => Ok(ModScheme::Qam16),
            "qam64" => Ok(ModScheme::Qam64),
            other => Err(SimError::invalid(format!("unknown scheme '{other}'"))),
        }
    }

    /// The full constellation as `(gray label, point)` pairs, label bits
    /// ordered I-axis first.
    pub fn constellation(self) -> Vec<(u32, Complex64)> {
        let axis_bits = self.bits_per_axis();
        let mut points = Vec::with_capacity(self.order());
        match self {
            ModScheme::Bpsk => {
                for label in 0..2u32 {
                    points.push((label, Complex64::new(axis_level(label, 1), 0.0)));
                }
            }
            _ => {
                for label in 0..self.order() as u32 {
                    let i_bits = label >> axis_bits;
                    let q_bits = label & ((1 << axis_bits) - 1);
                    let p = Complex64::new(
                        axis_level(i_bits, axis_bits),
                        axis_level(q_bits, axis_bits),
                    ) * self.axis_scale();
                    points.push((label, p));
                }
            }
        }
        points
    }
}

/// Unnormalized odd-integer level for a Gray label, oriented so the
/// all-zeros label takes the most positive level.
fn axis_level(gray: u32, axis_bits: usize) -> f64 {
    // Gray -> binary index, then map index 0 -> highest level.
    let mut bin = gray;
    let mut shift = 1;
    while shift < axis_bits {
        bin ^= gray >> shift;
        shift += 1;
    }
    let levels = 1u32 << axis_bits;
    (levels as f64 - 1.0) - 2.0 * f64::from(bin)
}

/// Map a bit slice onto constellation symbols. The bit count must divide
/// evenly into symbols.
pub fn modulate(bits: &[u8], scheme: ModScheme) -> Result<Vec<Complex64>> {
    let bps = scheme.bits_per_symbol();
    if bits.len() % bps != 0 {
        return Err(SimError::invalid(format!(
            "{} bits do not divide into {}-bit symbols",
            bits.len(),
            bps
        )));
    }
    let axis_bits = scheme.bits_per_axis();
    let scale = scheme.axis_scale();
    let mut out = Vec::with_capacity(bits.len() / bps);
    for chunk in bits.chunks_exact(bps) {
        let mut label = 0u32;
        for &b in chunk {
            label = (label << 1) | u32::from(b & 1);
        }
        let sym = if scheme == ModScheme::Bpsk {
            Complex64::new(axis_level(label, 1), 0.0)
        } else {
            let i_bits = label >> axis_bits;
            let q_bits = label & ((1 << axis_bits) - 1);
            Complex64::new(axis_level(i_bits, axis_bits), axis_level(q_bits, axis_bits)) * scale
        };
        out.push(sym);
    }
    Ok(out)
}

/// Minimum-Euclidean-distance demodulation back to bits (hard decisions).
pub fn demodulate(symbols: &[Complex64], scheme: ModScheme) -> Vec<u8> {
    let bps = scheme.bits_per_symbol();
    let mut bits = Vec::with_capacity(symbols.len() * bps);
    for &s in symbols {
        let label = slice_symbol(s, scheme);
        for k in (0..bps).rev() {
            bits.push(((label >> k) & 1) as u8);
        }
    }
    bits
}

/// Hard decision for one received symbol: the Gray label of the nearest
/// constellation point.
pub fn slice_symbol(s: Complex64, scheme: ModScheme) -> u32 {
    if scheme == ModScheme::Bpsk {
        return u32::from(s.re < 0.0);
    }
    let axis_bits = scheme.bits_per_axis();
    let i = slice_axis(s.re / scheme.axis_scale(), axis_bits);
    let q = slice_axis(s.im / scheme.axis_scale(), axis_bits);
    (i << axis_bits) | q
}

/// Nearest odd-integer level on one axis, returned as a Gray label.
fn slice_axis(v: f64, axis_bits: usize) -> u32 {
    let levels = 1i64 << axis_bits;
    // Levels are {L-1, L-3, ..., -(L-1)} indexed from the most positive.
    let idx = ((levels - 1) as f64 - v) / 2.0;
    let idx = idx.round().clamp(0.0, (levels - 1) as f64) as u32;
    idx ^ (idx >> 1) // binary index -> Gray label
}

/// Nearest constellation point (the re-modulated hard decision).
pub fn nearest_point(s: Complex64, scheme: ModScheme) -> Complex64 {
    let label = slice_symbol(s, scheme);
    if scheme == ModScheme::Bpsk {
        Complex64::new(axis_level(label, 1), 0.0)
    } else {
        let axis_bits = scheme.bits_per_axis();
        Complex64::new(
            axis_level(label >> axis_bits, axis_bits),
            axis_level(label & ((1 << axis_bits) - 1), axis_bits),
        ) * scheme.axis_scale()
    }
}

/// Fraction of differing bits between two equal-length bit strings.
pub fn ber(tx_bits: &[u8], rx_bits: &[u8]) -> Result<f64> {
    if tx_bits.len() != rx_bits.len() {
        return Err(SimError::LengthMismatch {
            context: "bit error rate operands",
            left: tx_bits.len(),
            right: rx_bits.len(),
        });
    }
    if tx_bits.is_empty() {
        return Err(SimError::invalid("bit error rate of empty strings"));
    }
    let errors = tx_bits
        .iter()
        .zip(rx_bits)
        .filter(|(a, b)| (**a & 1) != (**b & 1))
        .count();
    Ok(errors as f64 / tx_bits.len() as f64)
}

/// Gaussian tail function `Q(x)`.
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Exact bit error probability of the Gray-mapped alphabets on an AWGN
/// channel at the given symbol SNR `Es/N0` (linear).
///
/// BPSK follows the classic `Q(sqrt(2 Eb/N0))`; the square constellations
/// (QPSK included, as 4-QAM) use the closed-form Gray-mapped expansion over
/// per-axis PAM decisions.
pub fn awgn_ber(scheme: ModScheme, snr_symbol_linear: f64) -> f64 {
    let g = snr_symbol_linear.max(0.0);
    match scheme {
        ModScheme::Bpsk => q_func((2.0 * g).sqrt()),
        _ => square_qam_ber(scheme.order() as u32, g),
    }
}

/// Gray-mapped square M-QAM exact bit error probability at symbol SNR `g`.
fn square_qam_ber(m: u32, g: f64) -> f64 {
    let sqrt_m = (f64::from(m)).sqrt().round() as u32;
    let log2_sqrt_m = sqrt_m.trailing_zeros();
    let mut total = 0.0;
    for k in 1..=log2_sqrt_m {
        let mut pk = 0.0;
        let upper = ((1.0 - 2.0_f64.powi(-(k as i32))) * f64::from(sqrt_m)) as u32;
        for i in 0..upper {
            let ratio = (i * (1 << (k - 1))) / sqrt_m;
            let sign = if ratio % 2 == 0 { 1.0 } else { -1.0 };
            let weight = f64::from(1u32 << (k - 1))
                - (f64::from(i * (1 << (k - 1))) / f64::from(sqrt_m) + 0.5).floor();
            let arg = f64::from(2 * i + 1) * (3.0 * g / (2.0 * (f64::from(m) - 1.0))).sqrt();
            pk += sign * weight * libm::erfc(arg);
        }
        total += pk / f64::from(sqrt_m);
    }
    total / f64::from(log2_sqrt_m)
}
