//! Sample all four mobile-user trajectories and print their range
//! profiles and waypoint statistics.
//!
//! Run with: `cargo run --release -p isac-sim --example trajectories`

use isac_sim::trajectory::{sample_trajectory, SceneConfig, TrajectoryKind};

fn main() {
    let cfg = SceneConfig::default();
    for kind in TrajectoryKind::ALL {
        let states = sample_trajectory(kind, &cfg).unwrap();
        let r_min = states.iter().map(|s| s.range_m).fold(f64::MAX, f64::min);
        let r_max = states.iter().map(|s| s.range_m).fold(0.0f64, f64::max);
        let duration = states.last().unwrap().time_s;
        println!(
            "{:<16} {:>4} frames over {duration:.1} s, range {r_min:.2}..{r_max:.2} m",
            kind.name(),
            states.len(),
        );
        // Coarse range-over-time sketch, one row per half second.
        for st in states.iter().step_by(50) {
            let bar = "#".repeat((st.range_m / 1.2) as usize);
            println!(
                "  t={:>5.2} s  r={:>6.2} m  az={:>6.1} deg  {bar}",
                st.time_s,
                st.range_m,
                st.azimuth_rad.to_degrees()
            );
        }
        println!();
    }
}
