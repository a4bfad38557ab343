//! Shared fixtures for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Phase points `(x, v)` with `x` uniform in the disk of radius 0.95 and
/// `v` of uniform direction and speed `speed`.
pub fn disk_phase_points(n: usize, speed: f64, seed: u64) -> Vec<([f64; 2], [f64; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = 0.95 * rng.random::<f64>().sqrt();
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            let b = rng.random_range(0.0..std::f64::consts::TAU);
            ([r * a.cos(), r * a.sin()], [speed * b.cos(), speed * b.sin()])
        })
        .collect()
}
