//! Fourier-multiplier fractional Laplacian on a periodic one-dimensional grid.

use rustfft::{num_complex::Complex, FftPlanner};
use std::f64::consts::PI;

/// Angular wavenumbers of an `n`-point periodic grid of length `period`,
/// in FFT order.
pub fn wavenumbers(n: usize, period: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * m / period
        })
        .collect()
}

/// Applies the multiplier `m(|xi|)` to periodic samples.
pub fn apply_multiplier<M: Fn(f64) -> f64>(values: &[f64], period: f64, m: M) -> Vec<f64> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    for (b, xi) in buf.iter_mut().zip(wavenumbers(n, period)) {
        *b *= m(xi.abs());
    }
    inv.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// `(-Delta)^s` with symbol `|xi|^{2s}` on periodic samples.
pub fn spectral_frac_laplacian(values: &[f64], period: f64, s: f64) -> Vec<f64> {
    apply_multiplier(values, period, |xi| xi.powf(2.0 * s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_mode() {
        let n = 64;
        let period = 2.0 * PI;
        let xs: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
        let u: Vec<f64> = xs.iter().map(|x| (3.0 * x).cos()).collect();
        let out = spectral_frac_laplacian(&u, period, 0.3);
        for (o, x) in out.iter().zip(&xs) {
            assert!((o - 3f64.powf(0.6) * (3.0 * x).cos()).abs() < 1e-12);
        }
    }
}
