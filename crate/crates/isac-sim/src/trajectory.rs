//! The four mobile-user trajectories and their per-frame ground truth.
//!
//! Every path is traversed at constant speed. The U-shape and the
//! figure-of-eight lobe are exact chains of line segments and circular
//! arcs with tangent-continuous joints, parametrized by arc length; the
//! sine and hybrid shapes advance along analytic curves with sub-stepped
//! arc-length integration. The BS sits at the origin, 5 m above the lower
//! edge of the 80 m x 40 m ground area, so close turns around the BS stay
//! inside the area.

use num_complex::Complex64;

use crate::error::SimError;
use crate::Result;

/// Scene geometry and sampling cadence.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SceneConfig {
    /// Constant path speed of the MU in m/s.
    pub speed_mps: f64,
    /// Time between frames (one full sense-then-communicate cycle).
    pub frame_interval_s: f64,
    /// Run length in seconds; zero selects the trajectory's natural
    /// duration.
    pub duration_s: f64,
    /// Ground-area width (x) in meters, centered on the BS.
    pub x_extent_m: f64,
    /// Ground-area depth (y) in meters.
    pub y_extent_m: f64,
    /// Lower y edge of the area relative to the BS.
    pub y_min_m: f64,
    /// Radar reflection amplitude at 1 m range; falls off as `1/r^2`.
    pub reflectivity_ref: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            speed_mps: 15.0,
            frame_interval_s: 0.010,
            duration_s: 0.0,
            x_extent_m: 80.0,
            y_extent_m: 40.0,
            y_min_m: -5.0,
            reflectivity_ref: 1.0,
        }
    }
}

impl SceneConfig {
    fn validate(&self) -> Result<()> {
        if self.speed_mps <= 0.0 {
            return Err(SimError::Config("speed must be positive".into()));
        }
        if self.frame_interval_s <= 0.0 {
            return Err(SimError::Config("frame interval must be positive".into()));
        }
        if self.x_extent_m <= 0.0 || self.y_extent_m <= 0.0 {
            return Err(SimError::Config("area extents must be positive".into()));
        }
        Ok(())
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        let eps = 1e-9;
        let half_x = self.x_extent_m / 2.0;
        p[0] >= -half_x - eps
            && p[0] <= half_x + eps
            && p[1] >= self.y_min_m - eps
            && p[1] <= self.y_min_m + self.y_extent_m + eps
    }
}

/// The evaluated trajectories.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    UShaped,
    FigureOfEight,
    Sine,
    Hybrid,
}

impl TrajectoryKind {
    pub const ALL: [TrajectoryKind; 4] = [
        TrajectoryKind::UShaped,
        TrajectoryKind::FigureOfEight,
        TrajectoryKind::Sine,
        TrajectoryKind::Hybrid,
    ];

    /// Canonical snake_case name used in configs and reports.
    pub fn name(self) -> &'static str {
        match self {
            TrajectoryKind::UShaped => "u_shaped",
            TrajectoryKind::FigureOfEight => "figure_of_eight",
            TrajectoryKind::Sine => "sine",
            TrajectoryKind::Hybrid => "hybrid",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "u_shaped" => Ok(TrajectoryKind::UShaped),
            "figure_of_eight" => Ok(TrajectoryKind::FigureOfEight),
            "sine" => Ok(TrajectoryKind::Sine),
            "hybrid" => Ok(TrajectoryKind::Hybrid),
            other => Err(SimError::invalid(format!("unknown trajectory '{other}'"))),
        }
    }

    /// Natural run length of the shape at the default 15 m/s.
    pub fn default_duration_s(self) -> f64 {
        match self {
            TrajectoryKind::UShaped => 6.0,
            TrajectoryKind::FigureOfEight => 8.0,
            TrajectoryKind::Sine => 6.0,
            TrajectoryKind::Hybrid => 7.0,
        }
    }
}

/// Ground truth for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    /// Frame timestamp in seconds.
    pub time_s: f64,
    /// Position relative to the BS, meters.
    pub position: [f64; 2],
    /// Velocity vector, m/s.
    pub velocity: [f64; 2],
    /// Distance from the BS, meters.
    pub range_m: f64,
    /// Azimuth from array boresight (+y axis), radians; positive toward
    /// +x.
    pub azimuth_rad: f64,
    /// Radial speed, m/s, positive receding.
    pub radial_velocity_mps: f64,
    /// Round-trip reflection amplitude at this range.
    pub reflectivity: f64,
}

/// Plane-geometry observables of a position/velocity pair: range, azimuth
/// from boresight and radial velocity (positive receding). A target at the
/// origin reports azimuth 0 by convention.
pub fn ground_truth_observables(position: [f64; 2], velocity: [f64; 2]) -> (f64, f64, f64) {
    let range = position[0].hypot(position[1]);
    if range == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let azimuth = position[0].atan2(position[1]);
    let radial = (position[0] * velocity[0] + position[1] * velocity[1]) / range;
    (range, azimuth, radial)
}

// ---- Constant-speed path machinery ----

#[derive(Debug, Clone)]
enum Segment {
    Line {
        start: [f64; 2],
        dir: [f64; 2],
        len: f64,
    },
    /// Circular arc from `theta0`, sweeping `dtheta` (signed, radians).
    Arc {
        center: [f64; 2],
        radius: f64,
        theta0: f64,
        dtheta: f64,
    },
}

impl Segment {
    fn len(&self) -> f64 {
        match self {
            Segment::Line { len, .. } => *len,
            Segment::Arc { radius, dtheta, .. } => radius * dtheta.abs(),
        }
    }

    /// Position and unit tangent at arc length `s` into the segment.
    fn eval(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        match self {
            Segment::Line { start, dir, .. } => {
                ([start[0] + s * dir[0], start[1] + s * dir[1]], *dir)
            }
            Segment::Arc {
                center,
                radius,
                theta0,
                dtheta,
            } => {
                let sign = dtheta.signum();
                let theta = theta0 + sign * s / radius;
                let (sin_t, cos_t) = theta.sin_cos();
                let pos = [center[0] + radius * cos_t, center[1] + radius * sin_t];
                let tangent = [-sign * sin_t, sign * cos_t];
                (pos, tangent)
            }
        }
    }

    fn rotate(&self, phi: f64) -> Segment {
        let rot = |p: [f64; 2]| -> [f64; 2] {
            let (s, c) = phi.sin_cos();
            [p[0] * c - p[1] * s, p[0] * s + p[1] * c]
        };
        match self {
            Segment::Line { start, dir, len } => Segment::Line {
                start: rot(*start),
                dir: rot(*dir),
                len: *len,
            },
            Segment::Arc {
                center,
                radius,
                theta0,
                dtheta,
            } => Segment::Arc {
                center: rot(*center),
                radius: *radius,
                theta0: theta0 + phi,
                dtheta: *dtheta,
            },
        }
    }
}

#[derive(Debug, Clone)]
struct Path {
    segments: Vec<Segment>,
    total_len: f64,
}

impl Path {
    fn new(segments: Vec<Segment>) -> Path {
        let total_len = segments.iter().map(Segment::len).sum();
        Path {
            segments,
            total_len,
        }
    }

    fn rotate(self, phi: f64) -> Path {
        Path {
            segments: self.segments.iter().map(|s| s.rotate(phi)).collect(),
            total_len: self.total_len,
        }
    }

    fn eval(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        let mut remaining = s;
        for seg in &self.segments {
            let l = seg.len();
            if remaining <= l {
                return seg.eval(remaining);
            }
            remaining -= l;
        }
        let last = self.segments.last().expect("path has segments");
        last.eval(last.len())
    }
}

// ---- The four shapes ----

/// Rotation placing the U-shape inside the area (degrees, applied about
/// the BS).
const U_ROTATION_DEG: f64 = -50.0;
/// Starting range of the U-shape in meters.
const U_START_RANGE: f64 = 40.0;

/// U-shape: two straight legs tangent to a small circle around the BS,
/// joined by the half-circle between the antipodal tangency points. The
/// turn radius is solved so the full traversal takes exactly the natural
/// duration at the configured speed.
fn u_shaped_path(cfg: &SceneConfig) -> Result<Path> {
    let total = cfg.speed_mps * TrajectoryKind::UShaped.default_duration_s();
    let r0 = U_START_RANGE;
    // Solve 2 sqrt(r0^2 - rho^2) + pi rho = total for the turn radius.
    let f = |rho: f64| 2.0 * (r0 * r0 - rho * rho).sqrt() + std::f64::consts::PI * rho - total;
    if f(0.05) > 0.0 || f(r0 * 0.9) < 0.0 {
        return Err(SimError::Config(format!(
            "U-shape cannot cover {total} m from {r0} m start range"
        )));
    }
    let (mut lo, mut hi) = (0.05, r0 * 0.9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    let h = (r0 * r0 - rho * rho).sqrt();

    let segments = vec![
        Segment::Line {
            start: [-rho, h],
            dir: [0.0, -1.0],
            len: h,
        },
        Segment::Arc {
            center: [0.0, 0.0],
            radius: rho,
            theta0: std::f64::consts::PI,
            dtheta: std::f64::consts::PI,
        },
        Segment::Line {
            start: [rho, 0.0],
            dir: [0.0, 1.0],
            len: h,
        },
    ];
    Ok(Path::new(segments).rotate(U_ROTATION_DEG.to_radians()))
}

/// Math-frame rotation placing the figure-of-eight lobe's axis at +62
/// degrees azimuth.
const FIG8_ROTATION_DEG: f64 = -62.0;
/// Dwell-circle radius of the lobe in meters.
const FIG8_FAR_RADIUS: f64 = 39.0;
/// Closest approach to the BS in meters.
const FIG8_NEAR_RADIUS: f64 = 1.0;
/// Fillet radius joining the legs to the dwell circle.
const FIG8_FILLET_RADIUS: f64 = 5.0;

/// One lobe of the figure of eight: out along a line tangent to the 1 m
/// circle around the BS, a fillet onto the 39 m dwell circle, around the
/// apex, and the mirror image back. Starts and ends at exactly 1 m.
fn figure_of_eight_path(cfg: &SceneConfig) -> Result<Path> {
    let half = cfg.speed_mps * TrajectoryKind::FigureOfEight.default_duration_s() / 2.0;
    let big_r = FIG8_FAR_RADIUS;
    let near = FIG8_NEAR_RADIUS;
    let fr = FIG8_FILLET_RADIUS;

    // Tangent length from the near circle to the fillet circle and the
    // fixed fillet sweep; the tangency angle tau then follows in closed
    // form from the half-lobe length.
    let reach = big_r - fr;
    let offset = near + fr;
    if reach <= offset {
        return Err(SimError::Config("fillet too large for the lobe".into()));
    }
    let leg = (reach * reach - offset * offset).sqrt();
    let gamma = leg.atan2(offset);
    let fillet_sweep = std::f64::consts::PI - gamma;
    let tau =
        (leg + fr * fillet_sweep + big_r * (std::f64::consts::FRAC_PI_2 + gamma) - half) / big_r;
    let psi2 = tau - gamma; // math angle of the dwell-entry point
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&psi2) || tau >= std::f64::consts::PI {
        return Err(SimError::Config(format!(
            "figure-of-eight lobe is infeasible for half-length {half}"
        )));
    }

    let (sin_t, cos_t) = tau.sin_cos();
    let t0 = [near * cos_t, near * sin_t];
    let dir = [sin_t, -cos_t];
    let fillet_center = [offset * cos_t + leg * dir[0], offset * sin_t + leg * dir[1]];
    let alpha1 = tau - std::f64::consts::PI; // angle of (P1 - center) = -T0 direction

    let segments = vec![
        // Outbound leg from the 1 m tangency.
        Segment::Line {
            start: t0,
            dir,
            len: leg,
        },
        // Fillet onto the dwell circle.
        Segment::Arc {
            center: fillet_center,
            radius: fr,
            theta0: alpha1,
            dtheta: fillet_sweep,
        },
        // Dwell to the apex...
        Segment::Arc {
            center: [0.0, 0.0],
            radius: big_r,
            theta0: psi2,
            dtheta: std::f64::consts::FRAC_PI_2 - psi2,
        },
        // ...and the mirrored return: dwell, fillet, leg.
        Segment::Arc {
            center: [0.0, 0.0],
            radius: big_r,
            theta0: std::f64::consts::FRAC_PI_2,
            dtheta: std::f64::consts::FRAC_PI_2 - psi2,
        },
        Segment::Arc {
            center: [-fillet_center[0], fillet_center[1]],
            radius: fr,
            theta0: std::f64::consts::PI - (alpha1 + fillet_sweep),
            dtheta: fillet_sweep,
        },
        Segment::Line {
            start: [-(t0[0] + leg * dir[0]), t0[1] + leg * dir[1]],
            dir: [dir[0], -dir[1]],
            len: leg,
        },
    ];
    Ok(Path::new(segments).rotate(FIG8_ROTATION_DEG.to_radians()))
}

/// Analytic curve y(x) traversed at constant speed with sub-stepped
/// arc-length integration.
struct CurveTraversal<F: Fn(f64) -> (f64, f64)> {
    /// Returns (y, dy/dx) at x.
    curve: F,
    x: f64,
}

impl<F: Fn(f64) -> (f64, f64)> CurveTraversal<F> {
    fn advance(&mut self, ds: f64) -> ([f64; 2], [f64; 2]) {
        const SUBSTEPS: usize = 32;
        let step = ds / SUBSTEPS as f64;
        for _ in 0..SUBSTEPS {
            let (_, slope) = (self.curve)(self.x);
            self.x += step / (1.0 + slope * slope).sqrt();
        }
        let (y, slope) = (self.curve)(self.x);
        let norm = (1.0 + slope * slope).sqrt();
        ([self.x, y], [1.0 / norm, slope / norm])
    }

    fn state(&self) -> ([f64; 2], [f64; 2]) {
        let (y, slope) = (self.curve)(self.x);
        let norm = (1.0 + slope * slope).sqrt();
        ([self.x, y], [1.0 / norm, slope / norm])
    }
}

const SINE_X_START: f64 = -38.0;
const SINE_MID_Y: f64 = 10.0;
const SINE_AMPLITUDE: f64 = 6.0;
const SINE_WAVELENGTH: f64 = 40.0;

fn sine_curve(x: f64) -> (f64, f64) {
    let omega = 2.0 * std::f64::consts::PI / SINE_WAVELENGTH;
    let phase = omega * (x - SINE_X_START);
    (
        SINE_MID_Y + SINE_AMPLITUDE * phase.sin(),
        SINE_AMPLITUDE * omega * phase.cos(),
    )
}

const HYBRID_SINE_X_START: f64 = -25.0;
const HYBRID_SINE_X_END: f64 = 25.0;
const HYBRID_MID_Y: f64 = 10.0;
const HYBRID_AMPLITUDE: f64 = 4.0;
const HYBRID_WAVELENGTH: f64 = 25.0;
const HYBRID_LEG_LEN: f64 = 15.0;
const HYBRID_ARC_RADIUS: f64 = 10.0;

fn hybrid_curve(x: f64) -> (f64, f64) {
    let omega = 2.0 * std::f64::consts::PI / HYBRID_WAVELENGTH;
    let phase = omega * (x - HYBRID_SINE_X_START);
    (
        HYBRID_MID_Y + HYBRID_AMPLITUDE * phase.sin(),
        HYBRID_AMPLITUDE * omega * phase.cos(),
    )
}

/// Numeric arc length of the hybrid's sine section.
fn hybrid_sine_length() -> f64 {
    let n = 20_000;
    let dx = (HYBRID_SINE_X_END - HYBRID_SINE_X_START) / n as f64;
    let mut len = 0.0;
    for i in 0..n {
        let x = HYBRID_SINE_X_START + (i as f64 + 0.5) * dx;
        let (_, slope) = hybrid_curve(x);
        len += (1.0 + slope * slope).sqrt() * dx;
    }
    len
}

/// Generate equally spaced ground-truth states along the requested
/// trajectory. Fails if the samples leave the ground area or the duration
/// outruns the shape.
pub fn sample_trajectory(kind: TrajectoryKind, cfg: &SceneConfig) -> Result<Vec<TargetState>> {
    cfg.validate()?;
    let duration = if cfg.duration_s > 0.0 {
        cfg.duration_s
    } else {
        kind.default_duration_s()
    };
    if duration < cfg.frame_interval_s {
        return Err(SimError::Config(format!(
            "duration {duration} shorter than one frame interval"
        )));
    }
    let n_samples = (duration / cfg.frame_interval_s).round() as usize + 1;

    let states = match kind {
        TrajectoryKind::UShaped | TrajectoryKind::FigureOfEight => {
            let path = match kind {
                TrajectoryKind::UShaped => u_shaped_path(cfg)?,
                _ => figure_of_eight_path(cfg)?,
            };
            let max_t = path.total_len / cfg.speed_mps;
            if duration > max_t + 1e-9 {
                return Err(SimError::Config(format!(
                    "{} covers only {max_t:.3} s at {} m/s, asked for {duration} s",
                    kind.name(),
                    cfg.speed_mps
                )));
            }
            (0..n_samples)
                .map(|k| {
                    let t = k as f64 * cfg.frame_interval_s;
                    let (pos, tangent) = path.eval(cfg.speed_mps * t);
                    make_state(t, pos, tangent, cfg)
                })
                .collect::<Vec<_>>()
        }
        TrajectoryKind::Sine => {
            let mut walker = CurveTraversal {
                curve: sine_curve,
                x: SINE_X_START,
            };
            traverse_curve(&mut walker, n_samples, cfg)
        }
        TrajectoryKind::Hybrid => hybrid_states(n_samples, cfg)?,
    };

    for st in &states {
        if !cfg.contains(st.position) {
            return Err(SimError::Config(format!(
                "{} leaves the ground area at t = {:.3} s ({:.2}, {:.2})",
                kind.name(),
                st.time_s,
                st.position[0],
                st.position[1]
            )));
        }
    }
    Ok(states)
}

fn traverse_curve<F: Fn(f64) -> (f64, f64)>(
    walker: &mut CurveTraversal<F>,
    n_samples: usize,
    cfg: &SceneConfig,
) -> Vec<TargetState> {
    let ds = cfg.speed_mps * cfg.frame_interval_s;
    let mut out = Vec::with_capacity(n_samples);
    let (pos, tan) = walker.state();
    out.push(make_state(0.0, pos, tan, cfg));
    for k in 1..n_samples {
        let (pos, tan) = walker.advance(ds);
        out.push(make_state(k as f64 * cfg.frame_interval_s, pos, tan, cfg));
    }
    out
}

/// Hybrid: straight entry leg, two sine periods, and a duration-filling
/// return arc, joined tangent-to-tangent.
fn hybrid_states(n_samples: usize, cfg: &SceneConfig) -> Result<Vec<TargetState>> {
    let (entry_y, entry_slope) = hybrid_curve(HYBRID_SINE_X_START);
    let norm = (1.0 + entry_slope * entry_slope).sqrt();
    let dir = [1.0 / norm, entry_slope / norm];
    let leg_start = [
        HYBRID_SINE_X_START - HYBRID_LEG_LEN * dir[0],
        entry_y - HYBRID_LEG_LEN * dir[1],
    ];
    let sine_len = hybrid_sine_length();

    let duration = (n_samples - 1) as f64 * cfg.frame_interval_s;
    let total_needed = cfg.speed_mps * duration;
    let arc_len = total_needed - HYBRID_LEG_LEN - sine_len;
    if arc_len < 0.0 {
        return Err(SimError::Config(
            "hybrid duration shorter than leg + sine portion".into(),
        ));
    }
    let sweep = arc_len / HYBRID_ARC_RADIUS;
    if sweep > 230f64.to_radians() {
        return Err(SimError::Config(format!(
            "hybrid return arc sweep {:.0} deg exceeds the area",
            sweep.to_degrees()
        )));
    }

    // Exit of the sine section (slope equals the entry slope after two
    // full periods).
    let (exit_y, exit_slope) = hybrid_curve(HYBRID_SINE_X_END);
    let exit_norm = (1.0 + exit_slope * exit_slope).sqrt();
    let exit_dir = [1.0 / exit_norm, exit_slope / exit_norm];
    // Arc curving left: center on the left normal of the exit direction.
    let center = [
        HYBRID_SINE_X_END - HYBRID_ARC_RADIUS * exit_dir[1],
        exit_y + HYBRID_ARC_RADIUS * exit_dir[0],
    ];
    let theta0 = (exit_y - center[1]).atan2(HYBRID_SINE_X_END - center[0]);

    let ds = cfg.speed_mps * cfg.frame_interval_s;
    let mut walker = CurveTraversal {
        curve: hybrid_curve,
        x: HYBRID_SINE_X_START,
    };
    let arc = Segment::Arc {
        center,
        radius: HYBRID_ARC_RADIUS,
        theta0,
        dtheta: sweep,
    };

    let mut out = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = k as f64 * cfg.frame_interval_s;
        let s = cfg.speed_mps * t;
        let (pos, tan) = if s <= HYBRID_LEG_LEN {
            ([leg_start[0] + s * dir[0], leg_start[1] + s * dir[1]], dir)
        } else if k > 0 && walker.x < HYBRID_SINE_X_END {
            // Advance the sine walker by exactly one frame step; the
            // first sine frame absorbs the leg remainder.
            let prev_s = cfg.speed_mps * (t - cfg.frame_interval_s);
            let step = if prev_s < HYBRID_LEG_LEN {
                s - HYBRID_LEG_LEN
            } else {
                ds
            };
            let (pos, tan) = walker.advance(step);
            if walker.x >= HYBRID_SINE_X_END {
                // Crossed into the arc inside this frame: place on the arc.
                let overshoot = estimate_overshoot(walker.x, pos, tan);
                arc_state(&arc, overshoot)
            } else {
                (pos, tan)
            }
        } else {
            let s_on_arc = s - HYBRID_LEG_LEN - sine_len;
            arc_state(&arc, s_on_arc.max(0.0))
        };
        out.push(make_state(t, pos, tan, cfg));
    }
    Ok(out)
}

fn arc_state(arc: &Segment, s: f64) -> ([f64; 2], [f64; 2]) {
    arc.eval(s)
}

/// Path length past the sine exit for a walker that overstepped it.
fn estimate_overshoot(x: f64, _pos: [f64; 2], tan: [f64; 2]) -> f64 {
    (x - HYBRID_SINE_X_END) / tan[0].max(1e-9)
}

fn make_state(t: f64, position: [f64; 2], tangent: [f64; 2], cfg: &SceneConfig) -> TargetState {
    let velocity = [tangent[0] * cfg.speed_mps, tangent[1] * cfg.speed_mps];
    let (range_m, azimuth_rad, radial_velocity_mps) = ground_truth_observables(position, velocity);
    let reflectivity = if range_m > 0.0 {
        cfg.reflectivity_ref / (range_m * range_m)
    } else {
        cfg.reflectivity_ref
    };
    TargetState {
        time_s: t,
        position,
        velocity,
        range_m,
        azimuth_rad,
        radial_velocity_mps,
        reflectivity,
    }
}

impl TargetState {
    /// Two-way Doppler of this state at the given wavelength.
    pub fn doppler_hz(&self, wavelength_m: f64) -> f64 {
        2.0 * self.radial_velocity_mps / wavelength_m
    }

    /// Complex reflectivity as used by the radar synthesis (real
    /// amplitude, zero phase).
    pub fn reflectivity_complex(&self) -> Complex64 {
        Complex64::new(self.reflectivity, 0.0)
    }
}
