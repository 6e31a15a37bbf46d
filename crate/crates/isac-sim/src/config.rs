//! Run configuration: the flat key/value config format, CLI overrides and
//! validation.
//!
//! The config file is plain text, one `key = value` per line, `#` starts a
//! comment. Unknown keys are rejected so typos cannot silently fall back
//! to defaults. Two runs with equal configs produce byte-identical
//! outputs.

use std::path::{Path, PathBuf};

use crate::error::SimError;
use crate::link_adapt::{McsBreakpoint, McsPolicy};
use crate::modulation::ModScheme;
use crate::ofdm::OfdmConfig;
use crate::radar::RadarConfig;
use crate::trajectory::{SceneConfig, TrajectoryKind};
use crate::Result;

/// Modulation policy of one simulation arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyMode {
    /// Range-keyed adaptive switching from the sensed range.
    Adaptive,
    /// Fixed scheme on every frame.
    Fixed(ModScheme),
}

impl PolicyMode {
    pub fn name(self) -> &'static str {
        match self {
            PolicyMode::Adaptive => "adaptive",
            PolicyMode::Fixed(s) => s.name(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(PolicyMode::Adaptive),
            other => Ok(PolicyMode::Fixed(ModScheme::parse(other)?)),
        }
    }
}

/// Everything one run needs; serializable and diff-able.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trajectory: TrajectoryKind,
    pub scene: SceneConfig,
    pub radar: RadarConfig,
    pub ofdm: OfdmConfig,
    pub policy: PolicyMode,
    /// Range (m) of the link-budget calibration point.
    pub budget_ref_range_m: f64,
    /// SNR (dB) at the calibration range.
    pub budget_ref_snr_db: f64,
    /// MU noise power in watts (-80 dBm).
    pub mu_noise_power_w: f64,
    /// MU array elements.
    pub mu_antennas: usize,
    /// Optional policy table override: (max range, scheme) rows.
    pub policy_breakpoints: Option<Vec<McsBreakpoint>>,
    /// Master seed; all substreams derive from it.
    pub seed: u64,
    /// Output directory of `run`/`compare`.
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trajectory: TrajectoryKind::UShaped,
            scene: SceneConfig::default(),
            radar: RadarConfig::default(),
            ofdm: OfdmConfig::default(),
            policy: PolicyMode::Adaptive,
            budget_ref_range_m: 10.0,
            budget_ref_snr_db: 7.8,
            mu_noise_power_w: 1e-11,
            mu_antennas: 4,
            policy_breakpoints: None,
            seed: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Parse a config file, starting from defaults.
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(SimError::Config(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                )));
            };
            cfg.apply_kv(key.trim(), value.trim())
                .map_err(|e| SimError::Config(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply one `key = value` pair.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let bad_num = |k: &str, v: &str| SimError::Config(format!("{k}: bad number '{v}'"));
        match key {
            "trajectory.kind" => self.trajectory = TrajectoryKind::parse(value)?,
            "scene.speed_mps" => {
                self.scene.speed_mps = value.parse().map_err(|_| bad_num(key, value))?
            }
            "scene.frame_interval_s" => {
                self.scene.frame_interval_s = value.parse().map_err(|_| bad_num(key, value))?
            }
            "scene.duration_s" => {
                self.scene.duration_s = value.parse().map_err(|_| bad_num(key, value))?
            }
            "radar.pri_s" => self.radar.pri_s = value.parse().map_err(|_| bad_num(key, value))?,
            "radar.pulses" => {
                self.radar.num_pulses = value.parse().map_err(|_| bad_num(key, value))?
            }
            "radar.antennas" => {
                self.radar.num_rx_antennas = value.parse().map_err(|_| bad_num(key, value))?
            }
            "radar.noise_power" => {
                self.radar.noise_power = value.parse().map_err(|_| bad_num(key, value))?
            }
            "radar.detection_stride" => {
                self.radar.detection_pulse_stride =
                    value.parse().map_err(|_| bad_num(key, value))?
            }
            "ofdm.nfft" => {
                let nfft: usize = value.parse().map_err(|_| bad_num(key, value))?;
                // Keep the 1/8 null share on both ends.
                self.ofdm.n_fft = nfft;
                self.ofdm.n_null_each_side = nfft / 8;
                self.ofdm.n_data = nfft - 2 * (nfft / 8);
            }
            "ofdm.ncp" => self.ofdm.n_cp = value.parse().map_err(|_| bad_num(key, value))?,
            "ofdm.symbols_per_frame" => {
                self.ofdm.symbols_per_frame = value.parse().map_err(|_| bad_num(key, value))?
            }
            "policy" => self.policy = PolicyMode::parse(value)?,
            "policy.breakpoints" => self.policy_breakpoints = Some(parse_breakpoints(value)?),
            "budget.ref_range_m" => {
                self.budget_ref_range_m = value.parse().map_err(|_| bad_num(key, value))?
            }
            "budget.ref_snr_db" => {
                self.budget_ref_snr_db = value.parse().map_err(|_| bad_num(key, value))?
            }
            "mu.noise_power_w" => {
                self.mu_noise_power_w = value.parse().map_err(|_| bad_num(key, value))?
            }
            "mu.antennas" => self.mu_antennas = value.parse().map_err(|_| bad_num(key, value))?,
            "seed" => self.seed = value.parse().map_err(|_| bad_num(key, value))?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => {
                return Err(SimError::Config(format!("unknown key '{other}'")));
            }
        }
        Ok(())
    }

    /// Cross-field validation; run before any simulation work.
    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        self.ofdm.validate()?;
        if self.budget_ref_range_m <= 0.0 || self.mu_noise_power_w <= 0.0 {
            return Err(SimError::Config(
                "budget calibration must be positive".into(),
            ));
        }
        if self.mu_antennas == 0 {
            return Err(SimError::Config("MU needs at least one antenna".into()));
        }
        if (self.radar.sample_rate_hz - self.ofdm.sample_rate).abs() > 1e-3 {
            return Err(SimError::Config(
                "radar and OFDM stages share one sample rate".into(),
            ));
        }
        Ok(())
    }

    /// The adaptation policy implied by this config.
    pub fn build_policy(&self) -> Result<McsPolicy> {
        let budget = crate::link_adapt::calibrate_budget(
            self.budget_ref_range_m,
            self.budget_ref_snr_db,
            self.radar.wavelength_m(),
            self.mu_noise_power_w,
        )?;
        match &self.policy_breakpoints {
            Some(rows) => McsPolicy::from_breakpoints(rows.clone(), &budget),
            None => McsPolicy::standard(&budget),
        }
    }
}

/// Parse `6:qam64,10:qam16,16:qpsk,inf:bpsk`.
fn parse_breakpoints(value: &str) -> Result<Vec<McsBreakpoint>> {
    let mut rows = Vec::new();
    for item in value.split(',') {
        let (range, scheme) = item
            .trim()
            .split_once(':')
            .ok_or_else(|| SimError::Config(format!("breakpoint '{item}' is not range:scheme")))?;
        let max_range_m = if range.trim() == "inf" {
            f64::INFINITY
        } else {
            range
                .trim()
                .parse()
                .map_err(|_| SimError::Config(format!("bad breakpoint range '{range}'")))?
        };
        rows.push(McsBreakpoint {
            max_range_m,
            scheme: ModScheme::parse(scheme.trim())?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn file_round_trip_with_documented_keys() {
        let dir = std::env::temp_dir().join("isac_sim_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(
            &path,
            "# comment\n\
             trajectory.kind = figure_of_eight\n\
             scene.speed_mps = 15\n\
             radar.pri_s = 0.58e-6\n\
             radar.pulses = 512\n\
             ofdm.nfft = 512\n\
             ofdm.ncp = 128\n\
             policy = qam16   # fixed arm\n\
             budget.ref_range_m = 10\n\
             budget.ref_snr_db = 7.8\n\
             seed = 42\n\
             out_dir = /tmp/isac-out\n",
        )
        .unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.trajectory, TrajectoryKind::FigureOfEight);
        assert_eq!(cfg.policy, PolicyMode::Fixed(ModScheme::Qam16));
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.ofdm.n_data, 384);
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/isac-out"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_kv("radar.bandwidth", "1").is_err());
        assert!(cfg.apply_kv("radar.pulses", "not-a-number").is_err());
    }

    #[test]
    fn policy_breakpoints_parse_and_build() {
        let mut cfg = RunConfig::default();
        cfg.apply_kv("policy.breakpoints", "5:qam64, 12:qpsk, inf:bpsk")
            .unwrap();
        let policy = cfg.build_policy().unwrap();
        assert_eq!(policy.breakpoints().len(), 3);
        assert_eq!(policy.select_mcs(4.0), ModScheme::Qam64);
        assert_eq!(policy.select_mcs(40.0), ModScheme::Bpsk);
    }

    #[test]
    fn mismatched_sample_rates_fail_validation() {
        let mut cfg = RunConfig::default();
        cfg.ofdm.sample_rate = 1e9;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn policy_names_round_trip() {
        for p in [
            PolicyMode::Adaptive,
            PolicyMode::Fixed(ModScheme::Bpsk),
            PolicyMode::Fixed(ModScheme::Qam64),
        ] {
            assert_eq!(PolicyMode::parse(p.name()).unwrap(), p);
        }
        assert!(PolicyMode::parse("qam1024").is_err());
    }
}
