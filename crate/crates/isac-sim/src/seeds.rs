//! Counter-based derivation of per-stream RNG seeds.
//!
//! Every random draw in the simulator comes from a substream seed derived
//! from the master seed and a list of integer tags (frame index, arm,
//! stage), so runs are bit-reproducible regardless of thread scheduling
//! and arms can share noise realizations by sharing tags.

/// Stage tag of the radar noise stream.
pub const STAGE_RADAR: u64 = 1;
/// Stage tag of the payload bit stream.
pub const STAGE_BITS: u64 = 2;
/// Stage tag of the downlink channel noise stream.
pub const STAGE_COMM: u64 = 3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a master seed with substream tags into an independent seed.
pub fn derive(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &t in tags {
        state = splitmix64(state ^ t.wrapping_mul(0xff51_afd7_ed55_8ccd));
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_tags_give_distinct_seeds() {
        let a = derive(1, &[0, 0, STAGE_RADAR]);
        let b = derive(1, &[0, 0, STAGE_COMM]);
        let c = derive(1, &[1, 0, STAGE_RADAR]);
        let d = derive(2, &[0, 0, STAGE_RADAR]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        // Stable across calls.
        assert_eq!(a, derive(1, &[0, 0, STAGE_RADAR]));
    }
}
