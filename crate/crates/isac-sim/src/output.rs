//! Result persistence: the per-frame CSV, the JSON summary and small SVG
//! plot files (BER over time with the scheme strip, and the throughput
//! bar chart). All output is byte-deterministic for a fixed run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::SimError;
use crate::metrics::{FrameRecord, TrajectoryReport, SUCCESS_BER};
use crate::modulation::ModScheme;
use crate::sim::CompareOutput;
use crate::Result;

/// Exact header of `frames.csv`.
pub const CSV_HEADER: &str =
    "time_s,true_range_m,est_range_m,true_az_deg,est_az_deg,snr_db,scheme,frame_ber,success,throughput_bps";

/// Render the per-frame records as CSV text.
pub fn frames_csv(records: &[FrameRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{:.3},{:.4},{:.4},{:.3},{:.3},{:.3},{},{:.6},{},{:.1}",
            r.time_s,
            r.true_range_m,
            r.est_range_m,
            r.true_az_deg,
            r.est_az_deg,
            r.snr_db,
            r.scheme.name(),
            r.frame_ber,
            u8::from(r.success),
            r.throughput_bps,
        );
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| SimError::io(path, e))
}

/// Write frames.csv, summary.json and the two plots for one arm.
pub fn emit_outputs(records: &[FrameRecord], report: &TrajectoryReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    write_file(&dir.join("frames.csv"), &frames_csv(records))?;
    let json = serde_json::to_string_pretty(report).map_err(|e| SimError::Config(e.to_string()))?;
    write_file(&dir.join("summary.json"), &(json + "\n"))?;
    write_file(&dir.join("ber_vs_time.svg"), &ber_vs_time_svg(records))?;
    let bars = vec![("adaptive".to_string(), report.avg_throughput_bps)];
    write_file(
        &dir.join("throughput_bars.svg"),
        &throughput_bars_svg(&bars),
    )?;
    Ok(())
}

/// Top-level summary of a comparison run.
#[derive(serde::Serialize)]
struct CompareSummary<'a> {
    trajectory: &'a str,
    frames: usize,
    arms: Vec<ArmSummary>,
    /// Adaptive-over-fixed improvements in percent (null when the
    /// baseline never succeeded).
    improvement_pct: &'a BTreeMap<ModScheme, Option<f64>>,
}

#[derive(serde::Serialize)]
struct ArmSummary {
    policy: String,
    avg_throughput_bps: f64,
    avg_ber: f64,
}

/// Write per-arm directories plus the combined summary and plots of a
/// comparison run.
pub fn emit_compare_outputs(out: &CompareOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let mut bars = Vec::new();
    for arm in &out.arms {
        let arm_dir = dir.join(arm.policy.name());
        std::fs::create_dir_all(&arm_dir).map_err(|e| SimError::io(&arm_dir, e))?;
        write_file(&arm_dir.join("frames.csv"), &frames_csv(&arm.records))?;
        write_file(
            &arm_dir.join("ber_vs_time.svg"),
            &ber_vs_time_svg(&arm.records),
        )?;
        bars.push((arm.policy.name().to_string(), arm.avg_throughput_bps));
    }

    let summary = CompareSummary {
        trajectory: out.report.kind.name(),
        frames: out.report.frames,
        arms: out
            .arms
            .iter()
            .map(|a| ArmSummary {
                policy: a.policy.name().to_string(),
                avg_throughput_bps: a.avg_throughput_bps,
                avg_ber: a.avg_ber,
            })
            .collect(),
        improvement_pct: &out.report.improvement_pct,
    };
    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| SimError::Config(e.to_string()))?;
    write_file(&dir.join("summary.json"), &(json + "\n"))?;
    write_file(
        &dir.join("ber_vs_time.svg"),
        &ber_vs_time_svg(&out.arms[0].records),
    )?;
    write_file(
        &dir.join("throughput_bars.svg"),
        &throughput_bars_svg(&bars),
    )?;
    Ok(())
}

fn scheme_color(scheme: ModScheme) -> &'static str {
    match scheme {
        ModScheme::Bpsk => "#4878cf",
        ModScheme::Qpsk => "#6acc65",
        ModScheme::Qam16 => "#d65f5f",
        ModScheme::Qam64 => "#b47cc7",
    }
}

const PLOT_W: f64 = 860.0;
const PLOT_H: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 80.0;

/// Per-frame BER over time with the active scheme shown as a colored
/// strip under the axis.
pub fn ber_vs_time_svg(records: &[FrameRecord]) -> String {
    let mut s = svg_header();
    if records.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let t_max = records.last().map(|r| r.time_s).unwrap_or(1.0).max(1e-9);
    let ber_max = records
        .iter()
        .map(|r| r.frame_ber)
        .fold(0.0f64, f64::max)
        .max(0.12);
    let x = |t: f64| MARGIN_L + t / t_max * (PLOT_W - MARGIN_L - MARGIN_R);
    let y = |b: f64| PLOT_H - MARGIN_B - b / ber_max * (PLOT_H - MARGIN_T - MARGIN_B);

    axes(&mut s, "time (s)", "frame BER");
    // Horizontal gridline and label at the success threshold.
    let _ = writeln!(
        s,
        "<line x1='{:.2}' y1='{:.2}' x2='{:.2}' y2='{:.2}' stroke='#cc3333' stroke-dasharray='6,4'/>",
        x(0.0),
        y(SUCCESS_BER),
        x(t_max),
        y(SUCCESS_BER)
    );
    let _ = writeln!(
        s,
        "<text x='{:.2}' y='{:.2}' font-size='12' fill='#cc3333'>BER 0.1</text>",
        x(t_max) - 56.0,
        y(SUCCESS_BER) - 5.0
    );

    // Scheme strip under the time axis.
    let strip_y = PLOT_H - MARGIN_B + 24.0;
    for pair in records.windows(2) {
        let _ = writeln!(
            s,
            "<rect x='{:.2}' y='{:.2}' width='{:.2}' height='10' fill='{}'/>",
            x(pair[0].time_s),
            strip_y,
            (x(pair[1].time_s) - x(pair[0].time_s)).max(0.3),
            scheme_color(pair[0].scheme)
        );
    }
    for (i, scheme) in ModScheme::ALL.iter().enumerate() {
        let lx = MARGIN_L + i as f64 * 90.0;
        let _ = writeln!(
            s,
            "<rect x='{:.2}' y='{:.2}' width='12' height='10' fill='{}'/><text x='{:.2}' y='{:.2}' font-size='12'>{}</text>",
            lx,
            strip_y + 18.0,
            scheme_color(*scheme),
            lx + 16.0,
            strip_y + 27.0,
            scheme.name()
        );
    }

    // BER polyline.
    let mut points = String::new();
    for r in records {
        let _ = write!(points, "{:.2},{:.2} ", x(r.time_s), y(r.frame_ber));
    }
    let _ = writeln!(
        s,
        "<polyline points='{}' fill='none' stroke='#222222' stroke-width='1'/>",
        points.trim_end()
    );

    // Axis tick labels.
    for i in 0..=4 {
        let t = t_max * f64::from(i) / 4.0;
        let _ = writeln!(
            s,
            "<text x='{:.2}' y='{:.2}' font-size='12' text-anchor='middle'>{t:.1}</text>",
            x(t),
            PLOT_H - MARGIN_B + 16.0
        );
        let b = ber_max * f64::from(i) / 4.0;
        let _ = writeln!(
            s,
            "<text x='{:.2}' y='{:.2}' font-size='12' text-anchor='end'>{b:.2}</text>",
            MARGIN_L - 6.0,
            y(b) + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Average throughput per arm as a bar chart.
pub fn throughput_bars_svg(bars: &[(String, f64)]) -> String {
    let mut s = svg_header();
    if bars.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let max = bars.iter().map(|b| b.1).fold(0.0f64, f64::max).max(1.0);
    let inner_w = PLOT_W - MARGIN_L - MARGIN_R;
    let slot = inner_w / bars.len() as f64;
    let y = |v: f64| PLOT_H - MARGIN_B - v / max * (PLOT_H - MARGIN_T - MARGIN_B);
    axes(&mut s, "arm", "avg throughput (Gbit/s)");
    for (i, (name, value)) in bars.iter().enumerate() {
        let cx = MARGIN_L + (i as f64 + 0.5) * slot;
        let w = slot * 0.6;
        let color = match name.as_str() {
            "adaptive" => "#e8a33d",
            other => ModScheme::parse(other)
                .map(scheme_color)
                .unwrap_or("#888888"),
        };
        let _ = writeln!(
            s,
            "<rect x='{:.2}' y='{:.2}' width='{:.2}' height='{:.2}' fill='{}'/>",
            cx - w / 2.0,
            y(*value),
            w,
            (PLOT_H - MARGIN_B - y(*value)).max(0.0),
            color
        );
        let _ = writeln!(
            s,
            "<text x='{:.2}' y='{:.2}' font-size='13' text-anchor='middle'>{}</text>",
            cx,
            PLOT_H - MARGIN_B + 18.0,
            name
        );
        let _ = writeln!(
            s,
            "<text x='{:.2}' y='{:.2}' font-size='12' text-anchor='middle'>{:.2}</text>",
            cx,
            y(*value) - 6.0,
            value / 1e9
        );
    }
    s.push_str("</svg>\n");
    s
}

fn svg_header() -> String {
    format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{PLOT_W}' height='{PLOT_H}' \
         viewBox='0 0 {PLOT_W} {PLOT_H}'>\n<rect width='100%' height='100%' fill='white'/>\n"
    )
}

fn axes(s: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        s,
        "<line x1='{MARGIN_L}' y1='{MARGIN_T}' x2='{MARGIN_L}' y2='{:.2}' stroke='black'/>",
        PLOT_H - MARGIN_B
    );
    let _ = writeln!(
        s,
        "<line x1='{MARGIN_L}' y1='{:.2}' x2='{:.2}' y2='{:.2}' stroke='black'/>",
        PLOT_H - MARGIN_B,
        PLOT_W - MARGIN_R,
        PLOT_H - MARGIN_B
    );
    let _ = writeln!(
        s,
        "<text x='{:.2}' y='{:.2}' font-size='13' text-anchor='middle'>{x_label}</text>",
        (MARGIN_L + PLOT_W - MARGIN_R) / 2.0,
        PLOT_H - 8.0
    );
    let _ = writeln!(
        s,
        "<text x='16' y='{:.2}' font-size='13' transform='rotate(-90 16 {:.2})' text-anchor='middle'>{y_label}</text>",
        (MARGIN_T + PLOT_H - MARGIN_B) / 2.0,
        (MARGIN_T + PLOT_H - MARGIN_B) / 2.0
    );
}
