//! Per-frame throughput, trajectory aggregation and the adaptive-vs-fixed
//! comparison report.

use std::collections::BTreeMap;

use crate::error::SimError;
use crate::modulation::ModScheme;
use crate::trajectory::TrajectoryKind;
use crate::Result;

/// Symbol/sampling rate used by the throughput formula (samples per
/// second).
pub const SAMPLE_RATE: f64 = 2.64e9;
/// Numerator and denominator of the data overhead `384/640 = 0.6`.
pub const OVERHEAD_DATA: f64 = 384.0;
pub const OVERHEAD_TOTAL: f64 = 640.0;
/// A frame counts as successfully received only when its BER is strictly
/// below this threshold.
pub const SUCCESS_BER: f64 = 0.1;

/// Data overhead factor (exactly 0.6).
pub fn overhead() -> f64 {
    OVERHEAD_DATA / OVERHEAD_TOTAL
}

/// Throughput of one frame:
/// `Fs * overhead * log2(M) * (1 - BER) * S`, where the success flag `S`
/// gates frames at BER >= 0.1 to zero.
pub fn frame_throughput(scheme: ModScheme, frame_ber: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&frame_ber));
    if frame_ber >= SUCCESS_BER {
        return 0.0;
    }
    // Ordered so the BER-free case stays exact in floating point:
    // 2.64e9 * 384 * bits / 640 is an integer.
    SAMPLE_RATE * OVERHEAD_DATA * scheme.bits_per_symbol() as f64 / OVERHEAD_TOTAL
        * (1.0 - frame_ber)
}

/// Everything recorded about one sense-then-communicate frame.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FrameRecord {
    /// Frame timestamp in seconds.
    pub time_s: f64,
    /// Ground-truth range (reporting only).
    pub true_range_m: f64,
    /// Range estimate the controller acted on.
    pub est_range_m: f64,
    /// Ground-truth azimuth in degrees (reporting only).
    pub true_az_deg: f64,
    /// Azimuth estimate the beam was steered to, degrees.
    pub est_az_deg: f64,
    /// Link SNR (dB) of the frame under the calibrated budget.
    pub snr_db: f64,
    /// Modulation scheme used for the frame.
    pub scheme: ModScheme,
    /// Measured bit error rate of the frame (0.5 for erasures).
    pub frame_ber: f64,
    /// Success flag `S` (BER strictly below 0.1).
    pub success: bool,
    /// Frame throughput in bit/s.
    pub throughput_bps: f64,
}

impl FrameRecord {
    /// Fill the success flag and throughput from the scheme and BER.
    pub fn score(mut self) -> FrameRecord {
        self.success = self.frame_ber < SUCCESS_BER;
        self.throughput_bps = frame_throughput(self.scheme, self.frame_ber);
        self
    }
}

/// Mean throughput and BER of a frame sequence. Failed frames count as
/// zero throughput but keep their measured BER in the average.
pub fn aggregate(records: &[FrameRecord]) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(SimError::invalid(
            "cannot aggregate zero frames".to_string(),
        ));
    }
    let n = records.len() as f64;
    let avg_tput = records.iter().map(|r| r.throughput_bps).sum::<f64>() / n;
    let avg_ber = records.iter().map(|r| r.frame_ber).sum::<f64>() / n;
    Ok((avg_tput, avg_ber))
}

/// Aggregated result of one trajectory run, with percentage improvements
/// of the adaptive arm over each fixed-modulation baseline.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryReport {
    pub kind: TrajectoryKind,
    pub frames: usize,
    pub avg_throughput_bps: f64,
    pub avg_ber: f64,
    /// `100 * (adaptive / fixed - 1)` per baseline; `None` when the
    /// baseline never got a frame through.
    pub improvement_pct: BTreeMap<ModScheme, Option<f64>>,
}

/// Build the comparison report from the adaptive arm's records and each
/// fixed arm's aggregate throughput. Arms must share the trajectory and
/// the noise realizations for the comparison to be meaningful.
pub fn compare(
    kind: TrajectoryKind,
    adaptive: &[FrameRecord],
    fixed: &BTreeMap<ModScheme, f64>,
) -> Result<TrajectoryReport> {
    let (avg_tput, avg_ber) = aggregate(adaptive)?;
    let mut improvement_pct = BTreeMap::new();
    for (&scheme, &baseline_tput) in fixed {
        let imp = if baseline_tput > 0.0 {
            Some(100.0 * (avg_tput / baseline_tput - 1.0))
        } else {
            None
        };
        improvement_pct.insert(scheme, imp);
    }
    Ok(TrajectoryReport {
        kind,
        frames: adaptive.len(),
        avg_throughput_bps: avg_tput,
        avg_ber,
        improvement_pct,
    })
}
