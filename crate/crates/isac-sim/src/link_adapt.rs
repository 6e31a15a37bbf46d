//! Range-keyed adaptive modulation: the free-space SNR model and the
//! breakpoint policy that switches the scheme as the sensed range moves.
//!
//! The SNR at the mobile user follows the one-way free-space budget
//! `SNR = Pt Gt Gr lambda^2 / ((4 pi d)^2 Np)`. The individual gains are
//! never needed: the product is calibrated from one reference point
//! (7.80 dB at 10 m, the QPSK/16-QAM switch) and the policy's SNR
//! breakpoints are then derived from its range breakpoints through the
//! same budget, keeping the two selectors consistent at every distance.

use crate::error::SimError;
use crate::modulation::ModScheme;
use crate::Result;

/// Free-space link budget of the downlink.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinkBudget {
    /// Product `Pt * Gt * Gr` in watts (gains folded in).
    pub ptgtgr: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Noise power at the MU receiver in watts.
    pub noise_power: f64,
}

impl LinkBudget {
    fn validate(&self) -> Result<()> {
        if self.ptgtgr <= 0.0 || self.wavelength <= 0.0 || self.noise_power <= 0.0 {
            return Err(SimError::invalid(format!(
                "link budget fields must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// SNR in dB at range `d` under the free-space budget; falls at exactly
/// 20 dB per decade of distance.
pub fn snr_at_range(budget: &LinkBudget, d: f64) -> Result<f64> {
    budget.validate()?;
    if d <= 0.0 {
        return Err(SimError::invalid(format!(
            "range must be positive, got {d}"
        )));
    }
    let denom = (4.0 * std::f64::consts::PI * d).powi(2) * budget.noise_power;
    let linear = budget.ptgtgr * budget.wavelength * budget.wavelength / denom;
    Ok(10.0 * linear.log10())
}

/// Solve the budget for the gain product that realizes `reference_snr_db`
/// at `reference_range`; the system is specified by its operating points,
/// not by the individual gains.
pub fn calibrate_budget(
    reference_range: f64,
    reference_snr_db: f64,
    wavelength: f64,
    noise_power: f64,
) -> Result<LinkBudget> {
    if reference_range <= 0.0 || wavelength <= 0.0 || noise_power <= 0.0 {
        return Err(SimError::invalid(
            "calibration inputs must be positive".to_string(),
        ));
    }
    let snr_lin = 10f64.powf(reference_snr_db / 10.0);
    let ptgtgr = snr_lin * (4.0 * std::f64::consts::PI * reference_range).powi(2) * noise_power
        / (wavelength * wavelength);
    Ok(LinkBudget {
        ptgtgr,
        wavelength,
        noise_power,
    })
}

/// One row of the adaptation table: use `scheme` up to (and including)
/// `max_range_m`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McsBreakpoint {
    pub max_range_m: f64,
    pub scheme: ModScheme,
}

/// Range-keyed modulation policy with budget-derived SNR breakpoints.
///
/// Boundaries belong to the lower-order (more robust) scheme: exactly 6 m
/// selects 16-QAM, exactly 10 m selects QPSK.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McsPolicy {
    /// Rows in increasing range order, ending with the fallback scheme at
    /// unbounded range.
    breakpoints: Vec<McsBreakpoint>,
    /// SNR (dB) at each finite range breakpoint under the calibrated
    /// budget, decreasing.
    snr_breakpoints_db: Vec<f64>,
}

impl McsPolicy {
    /// The adaptation table of the system: 64-QAM below 6 m, 16-QAM to
    /// 10 m, QPSK to 16 m, BPSK beyond.
    pub fn standard(budget: &LinkBudget) -> Result<McsPolicy> {
        McsPolicy::from_breakpoints(
            vec![
                McsBreakpoint {
                    max_range_m: 6.0,
                    scheme: ModScheme::Qam64,
                },
                McsBreakpoint {
                    max_range_m: 10.0,
                    scheme: ModScheme::Qam16,
                },
                McsBreakpoint {
                    max_range_m: 16.0,
                    scheme: ModScheme::Qpsk,
                },
                McsBreakpoint {
                    max_range_m: f64::INFINITY,
                    scheme: ModScheme::Bpsk,
                },
            ],
            budget,
        )
    }

    /// Build a policy from explicit rows, deriving the SNR breakpoints
    /// from the ranges through the budget.
    pub fn from_breakpoints(
        breakpoints: Vec<McsBreakpoint>,
        budget: &LinkBudget,
    ) -> Result<McsPolicy> {
        if breakpoints.is_empty() {
            return Err(SimError::invalid(
                "policy needs at least one row".to_string(),
            ));
        }
        if !breakpoints.last().unwrap().max_range_m.is_infinite() {
            return Err(SimError::invalid(
                "last policy row must cover unbounded range".to_string(),
            ));
        }
        for pair in breakpoints.windows(2) {
            if pair[0].max_range_m >= pair[1].max_range_m {
                return Err(SimError::invalid(
                    "policy ranges must be strictly increasing".to_string(),
                ));
            }
            if pair[0].scheme.bits_per_symbol() <= pair[1].scheme.bits_per_symbol() {
                return Err(SimError::invalid(
                    "policy schemes must decrease in order with range".to_string(),
                ));
            }
        }
        let snr_breakpoints_db = breakpoints[..breakpoints.len() - 1]
            .iter()
            .map(|bp| snr_at_range(budget, bp.max_range_m))
            .collect::<Result<Vec<f64>>>()?;
        Ok(McsPolicy {
            breakpoints,
            snr_breakpoints_db,
        })
    }

    /// Rows of the policy.
    pub fn breakpoints(&self) -> &[McsBreakpoint] {
        &self.breakpoints
    }

    /// Budget-derived SNR thresholds (dB), one per finite range row.
    pub fn snr_breakpoints_db(&self) -> &[f64] {
        &self.snr_breakpoints_db
    }

    /// Scheme for a sensed range. Boundary ranges fall to the lower-order
    /// row (`d < max_range` keeps the row's scheme).
    pub fn select_mcs(&self, range_m: f64) -> ModScheme {
        for bp in &self.breakpoints {
            if range_m < bp.max_range_m {
                return bp.scheme;
            }
        }
        self.breakpoints.last().unwrap().scheme
    }

    /// Scheme for an SNR estimate; consistent with [`Self::select_mcs`]
    /// under the calibrating budget at every distance.
    pub fn select_mcs_from_snr(&self, snr_db: f64) -> ModScheme {
        for (i, &threshold) in self.snr_breakpoints_db.iter().enumerate() {
            if snr_db > threshold {
                return self.breakpoints[i].scheme;
            }
        }
        self.breakpoints.last().unwrap().scheme
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SPEED_OF_LIGHT;

    const LAMBDA: f64 = SPEED_OF_LIGHT / 60e9;
    const NOISE_W: f64 = 1e-11; // -80 dBm

    fn budget() -> LinkBudget {
        calibrate_budget(10.0, 7.80, LAMBDA, NOISE_W).unwrap()
    }

    #[test]
    fn calibration_hits_the_reference_exactly() {
        let b = budget();
        let snr = snr_at_range(&b, 10.0).unwrap();
        assert!((snr - 7.80).abs() < 1e-9, "{snr}");
    }

    #[test]
    fn calibrated_product_matches_hand_evaluation() {
        // 10^0.78 * (4 pi 10)^2 * 1e-11 / 0.005^2 with the nominal 5 mm
        // wavelength.
        let b = calibrate_budget(10.0, 7.80, 0.005, NOISE_W).unwrap();
        assert!((b.ptgtgr - 0.03806).abs() < 5e-5, "{}", b.ptgtgr);
    }

    #[test]
    fn doubling_distance_costs_six_db() {
        let b = budget();
        let s1 = snr_at_range(&b, 7.0).unwrap();
        let s2 = snr_at_range(&b, 14.0).unwrap();
        assert!((s1 - s2 - 20.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn table_rows_follow_the_inverse_square_law() {
        let b = budget();
        // 16 m: 7.80 - 20 log10(1.6) = 3.718 dB.
        let s16 = snr_at_range(&b, 16.0).unwrap();
        assert!((s16 - 3.7176).abs() < 0.001, "{s16}");
        // 6 m: 7.80 + 20 log10(10/6) = 12.237 dB.
        let s6 = snr_at_range(&b, 6.0).unwrap();
        assert!((s6 - 12.2370).abs() < 0.001, "{s6}");
    }

    #[test]
    fn nonpositive_range_is_rejected() {
        assert!(snr_at_range(&budget(), 0.0).is_err());
        assert!(snr_at_range(&budget(), -3.0).is_err());
    }

    #[test]
    fn range_selector_reproduces_the_table() {
        let p = McsPolicy::standard(&budget()).unwrap();
        assert_eq!(p.select_mcs(5.0), ModScheme::Qam64);
        assert_eq!(p.select_mcs(8.0), ModScheme::Qam16);
        assert_eq!(p.select_mcs(12.0), ModScheme::Qpsk);
        assert_eq!(p.select_mcs(20.0), ModScheme::Bpsk);
        // Boundaries belong to the lower-order scheme.
        assert_eq!(p.select_mcs(6.0), ModScheme::Qam16);
        assert_eq!(p.select_mcs(10.0), ModScheme::Qpsk);
        assert_eq!(p.select_mcs(16.0), ModScheme::Bpsk);
    }

    #[test]
    fn snr_selector_reproduces_the_table() {
        let p = McsPolicy::standard(&budget()).unwrap();
        assert_eq!(p.select_mcs_from_snr(13.0), ModScheme::Qam64);
        assert_eq!(p.select_mcs_from_snr(5.0), ModScheme::Qpsk);
        assert_eq!(p.select_mcs_from_snr(0.0), ModScheme::Bpsk);
        assert_eq!(p.select_mcs_from_snr(10.0), ModScheme::Qam16);
    }

    #[test]
    fn selectors_agree_on_a_fine_range_grid() {
        let b = budget();
        let p = McsPolicy::standard(&b).unwrap();
        let mut last_bits = usize::MAX;
        for i in 0..=430 {
            let d = 0.5 + i as f64 * 0.1;
            let by_range = p.select_mcs(d);
            let by_snr = p.select_mcs_from_snr(snr_at_range(&b, d).unwrap());
            assert_eq!(by_range, by_snr, "at {d} m");
            // Monotone: order never increases with range.
            assert!(by_range.bits_per_symbol() <= last_bits, "at {d} m");
            last_bits = by_range.bits_per_symbol();
        }
    }

    #[test]
    fn malformed_policies_are_rejected() {
        let b = budget();
        // Non-increasing ranges.
        assert!(McsPolicy::from_breakpoints(
            vec![
                McsBreakpoint {
                    max_range_m: 10.0,
                    scheme: ModScheme::Qam64
                },
                McsBreakpoint {
                    max_range_m: 6.0,
                    scheme: ModScheme::Qam16
                },
                McsBreakpoint {
                    max_range_m: f64::INFINITY,
                    scheme: ModScheme::Bpsk
                },
            ],
            &b
        )
        .is_err());
        // Missing unbounded fallback.
        assert!(McsPolicy::from_breakpoints(
            vec![McsBreakpoint {
                max_range_m: 6.0,
                scheme: ModScheme::Qam64
            }],
            &b
        )
        .is_err());
    }
}
