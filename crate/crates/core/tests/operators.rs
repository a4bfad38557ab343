//! Operator checks against independent oracles: an FFT multiplier on a large
//! periodic box, the mirror extension in the half-space, and integration by
//! parts in the disk and half-space.

use rustfft::{num_complex::Complex, FftPlanner};
use specdiff_core::operators::*;
use specdiff_core::DomainShape;
use std::f64::consts::PI;

/// `(-Delta)^s` of `exp(-x^2)` at the points `xs`, via a direct FFT on
/// `[-L/2, L/2)` with `n` samples and linear interpolation. Periodic images
/// add about `2 c zeta(1+2s) sqrt(pi) L^{-1-2s}`, hence the long box.
fn spectral_gaussian_1d(s: f64, xs: &[f64]) -> Vec<f64> {
    let period = 6400.0;
    let n = 1usize << 21;
    let h = period / n as f64;
    let mut buf: Vec<Complex<f64>> =
        (0..n).map(|i| Complex::new((-(-period / 2.0 + h * i as f64).powi(2)).exp(), 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        *b *= (2.0 * PI * m / period).abs().powf(2.0 * s);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    xs.iter()
        .map(|&x| {
            let t = (x + period / 2.0) / h;
            let i = t.floor() as usize;
            let f = t - i as f64;
            ((1.0 - f) * buf[i].re + f * buf[i + 1].re) / n as f64
        })
        .collect()
}

#[test]
fn gaussian_matches_spectral_oracle() {
    for &s in &[0.25, 0.5, 0.75] {
        let cfg = OperatorConfig { r_trunc: 200.0, n_radial: 512, ..OperatorConfig::new(1, s).unwrap() };
        let g = Gaussian::isotropic(vec![0.0], 1.0);
        let xs = [0.0, 0.5, 1.5];
        let oracle = spectral_gaussian_1d(s, &xs);
        for (x, o) in xs.iter().zip(&oracle) {
            let q = apply_frac_laplacian(&g, &[*x], &cfg).unwrap();
            assert!(((q - o) / o).abs() < 1e-3, "s={s} x={x}: {q} vs {o}");
        }
    }
}

#[test]
fn whole_space_reduction() {
    let cfg = OperatorConfig::new(2, 0.6).unwrap();
    let g = Gaussian { center: vec![0.2, -0.1], beta: vec![1.0, 2.0], amp: 1.0 };
    for x in [[0.0, 0.0], [0.5, 0.3], [-1.0, 2.0]] {
        let a = apply_frac_laplacian(&g, &x, &cfg).unwrap();
        let b = apply_specular_op(DomainShape::WholeSpace(2), &g, &x, &cfg).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn half_space_mirror_identity() {
    let s = 0.6;
    let cfg = OperatorConfig { r_trunc: 200.0, n_angular: 2048, n_radial: 512, ..OperatorConfig::new(2, s).unwrap() };
    let ridge = Gaussian::ridge(2, 1.0);
    let heights = [0.05, 0.4, 1.2];
    let oracle = spectral_gaussian_1d(s, &heights);
    for (h, o) in heights.iter().zip(&oracle) {
        let q = apply_specular_op(DomainShape::HalfSpace(2), &ridge, &[0.3, *h], &cfg).unwrap();
        assert!(((q - o) / o).abs() < 2e-3, "x_d={h}: {q} vs {o}");
    }
}

#[test]
fn integration_by_parts_in_the_disk() {
    for &s in &[0.3, 0.7] {
        let cfg = OperatorConfig { n_angular: 48, n_radial: 128, ..OperatorConfig::new(2, s).unwrap() };
        let dom = DomainShape::UnitBall(2);
        let rule = SpatialRule::disk(12, 24);
        let phi = RadialCosine { dim: 2, m: 1.0 };
        // (1 - |x|^2)^2 e^{x_1} has zero normal derivative on the circle
        let psi = FnField::new(2, |x: &[f64]| {
            let q = 1.0 - x[0] * x[0] - x[1] * x[1];
            q * q * x[0].exp()
        });
        let lhs = SpecularOperator::new(dom, cfg).unwrap().pair_with_operator(&phi, &psi, &rule).unwrap();
        let rhs = bilinear_form(dom, &phi, &psi, &cfg, &rule).unwrap();
        assert!((lhs - rhs).abs() <= 1e-2 * (lhs.abs() + 1.0), "s={s}: {lhs} vs {rhs}");
    }
}

#[test]
fn integration_by_parts_in_the_half_space() {
    for &s in &[0.3, 0.7] {
        let cfg = OperatorConfig { n_angular: 48, n_radial: 128, ..OperatorConfig::new(2, s).unwrap() };
        let dom = DomainShape::HalfSpace(2);
        let rule = SpatialRule::boxed(&[-4.0, 0.0], &[4.0, 4.0], 4, 6);
        let phi = Gaussian { center: vec![0.3, 0.0], beta: vec![2.0, 1.5], amp: 1.0 };
        let psi = Gaussian::isotropic(vec![0.0, 0.0], 1.0);
        let lhs = SpecularOperator::new(dom, cfg).unwrap().pair_with_operator(&phi, &psi, &rule).unwrap();
        let rhs = bilinear_form(dom, &phi, &psi, &cfg, &rule).unwrap();
        assert!((lhs - rhs).abs() <= 1e-2 * (lhs.abs() + 1.0), "s={s}: {lhs} vs {rhs}");
    }
}

#[test]
fn kernel_symmetry_and_bounds() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let (s, c) = (0.4, normalization_constant(2, 0.4).unwrap());
    for _ in 0..10_000 {
        let x = [rng.random_range(-2.0..2.0), rng.random_range(0.0..2.0)];
        let y = [rng.random_range(-2.0..2.0), rng.random_range(0.0..2.0)];
        let kxy = kernel_halfspace(&x, &y, s, c).unwrap();
        assert_eq!(kxy, kernel_halfspace(&y, &x, s, c).unwrap());
        let free = c * ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).powf(-(2.0 + 2.0 * s) / 2.0);
        assert!(free <= kxy && kxy <= 2.0 * free);
    }
}
