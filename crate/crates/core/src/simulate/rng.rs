//! Per-run random streams and the normal variate generator.
//!
//! Run `i` of a simulation seeded with `s` draws from ChaCha8 keyed by
//! `seed_from_u64(s)` on stream `i`, so every run is reproducible on its own
//! and results do not depend on how runs are scheduled across workers.
//!
//! Normal variates use Marsaglia's polar method: draw `u, v` uniform on
//! `(-1, 1)` until `0 < s = u² + v² < 1`, then return the pair
//! `(u, v) * sqrt(-2 ln s / s)`. Each accepted draw yields the two
//! independent normals behind one bivariate pair.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type RunRng = ChaCha8Rng;

pub fn run_stream(seed: u64, run: u64) -> RunRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Two independent standard normals.
pub fn normal_pair<R: RngCore>(rng: &mut R) -> (f64, f64) {
    loop {
        let u = 2.0 * unit_f64(rng) - 1.0;
        let v = 2.0 * unit_f64(rng) - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let f = libm::sqrt(-2.0 * libm::log(s) / s);
            return (u * f, v * f);
        }
    }
}
