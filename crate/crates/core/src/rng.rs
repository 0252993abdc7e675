//! Random number plumbing.
//!
//! Dilution masks use a counter-based generator: the uniform attached to
//! entity `i` depends only on `(seed, stream, i)`, so masks drawn at two keep
//! probabilities with the same seed are nested. Simulations use a seeded
//! ChaCha8 stream per replicate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const STREAM_BOND: u64 = 0xB0;
pub const STREAM_SITE: u64 = 0x51;
pub const STREAM_ER: u64 = 0xE5;
pub const STREAM_SIM: u64 = 0xC9;
pub const STREAM_DFS: u64 = 0xDF;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64 random bits addressed by `(seed, stream, index)`.
#[inline]
pub fn hash3(seed: u64, stream: u64, index: u64) -> u64 {
    let a = mix64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let b = mix64(a ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03));
    mix64(b ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019))
}

/// Uniform in `[0, 1)` addressed by `(seed, stream, index)`.
#[inline]
pub fn uniform(seed: u64, stream: u64, index: u64) -> f64 {
    (hash3(seed, stream, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Generator for a named stream of a given seed.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Simulation generator for replicate seed `seed`.
pub fn sim_rng(seed: u64) -> SimRng {
    stream_rng(seed, STREAM_SIM)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_addressable() {
        assert_eq!(uniform(7, STREAM_BOND, 3), uniform(7, STREAM_BOND, 3));
        assert_ne!(uniform(7, STREAM_BOND, 3), uniform(7, STREAM_BOND, 4));
        assert_ne!(uniform(7, STREAM_BOND, 3), uniform(8, STREAM_BOND, 3));
        assert_ne!(uniform(7, STREAM_BOND, 3), uniform(7, STREAM_SITE, 3));
    }

    #[test]
    fn uniform_moments() {
        let n = 200_000u64;
        let (mut s, mut s2) = (0.0, 0.0);
        for i in 0..n {
            let u = uniform(42, STREAM_SITE, i);
            assert!((0.0..1.0).contains(&u));
            s += u;
            s2 += u * u;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - 0.5).abs() < 0.003, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 0.002, "var {var}");
    }
}
