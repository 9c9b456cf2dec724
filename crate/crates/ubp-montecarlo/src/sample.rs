//! Counter-based randomness: every site's uniform draw is a pure function of
//! `(seed, trial, site index)`, so trials are reproducible in isolation and
//! independent of scheduling.

use ubp_engine::Lattice;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64 uniform bits for one `(seed, trial, index)` key.
pub fn draw(seed: u64, trial: u64, index: u64) -> u64 {
    let k = mix(seed.wrapping_add(GOLDEN));
    let k = mix(k ^ trial.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019));
    mix(k ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93).wrapping_add(GOLDEN))
}

/// A draw `d` is a success iff `d < threshold(p)`; the same draws at a larger
/// `p` succeed on a superset, which gives the monotone coupling.
pub fn threshold(p: f64) -> Option<u64> {
    if p >= 1.0 {
        None
    } else if p <= 0.0 {
        Some(0)
    } else {
        Some((p * 18_446_744_073_709_551_616.0) as u64)
    }
}

fn hit(t: Option<u64>, d: u64) -> bool {
    t.is_none_or(|t| d < t)
}

/// p-random subset of the n×n torus; site `(x, y)` uses index `y·n + x`.
pub fn sample_initial(n: usize, p: f64, seed: u64, trial: u64) -> Lattice {
    let mut lat = Lattice::torus(n);
    let t = threshold(p);
    if t == Some(0) {
        return lat;
    }
    for row in 0..n {
        for col in 0..n {
            if hit(t, draw(seed, trial, (row * n + col) as u64)) {
                lat.set_cell(col, row, true);
            }
        }
    }
    lat
}

/// Uniform index in `0..len` for bootstrap resampling.
pub fn draw_index(seed: u64, stream: u64, index: u64, len: usize) -> usize {
    ((draw(seed, stream, index) as u128 * len as u128) >> 64) as usize
}
