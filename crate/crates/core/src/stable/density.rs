//! Tabulated one-dimensional equilibrium density by Fourier inversion of
//! `exp(-|xi|^{2s}/(2s))`.

use crate::quad::{graded_edges, Rule};
use rayon::prelude::*;
use std::f64::consts::PI;

/// `F(v) = (1/pi) int_0^inf cos(xi v) exp(-xi^{2s}/(2s)) dxi`; the Cauchy
/// closed form is used at `s = 1/2`.
pub fn equilibrium_density_1d(s: f64, v: f64) -> f64 {
    if (s - 0.5).abs() < 1e-15 {
        return 1.0 / (PI * (1.0 + v * v));
    }
    let two_s = 2.0 * s;
    // beyond xi_max the integrand is below e^{-40}
    let xi_max = (two_s * 40.0).powf(1.0 / two_s);
    let rule = Rule::gauss_legendre(20);
    let head = xi_max.min(1.0);
    let mut edges = graded_edges(head, 40, 0.5);
    let width = 0.5f64.min(1.0 / v.abs().max(1.0));
    let n_tail = ((xi_max - head) / width).ceil() as usize;
    for i in 1..=n_tail {
        edges.push(head + (xi_max - head) * i as f64 / n_tail as f64);
    }
    rule.composite(&edges, |xi| (xi * v).cos() * (-xi.powf(two_s) / two_s).exp()) / PI
}

/// Values of `F` on a fixed velocity grid.
#[derive(Debug, Clone)]
pub struct EquilibriumTable {
    pub s: f64,
    pub v: Vec<f64>,
    pub f: Vec<f64>,
}

impl EquilibriumTable {
    pub fn new(s: f64, v: &[f64]) -> Self {
        let f = v.par_iter().map(|&vi| equilibrium_density_1d(s, vi)).collect();
        EquilibriumTable { s, v: v.to_vec(), f }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_closed_form_agrees_with_inversion_route() {
        // evaluate the general branch at s slightly off 1/2 and compare with
        // the Cauchy density; the difference is first order in the offset
        for &v in &[0.0, 0.7, 3.0, 12.0] {
            let a = equilibrium_density_1d(0.5 + 1e-9, v);
            let b = 1.0 / (PI * (1.0 + v * v));
            assert!((a - b).abs() < 1e-7, "v={v}: {a} vs {b}");
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for &s in &[0.6, 0.75] {
            // integrate on [-V, V] and add the asymptotic tail mass
            let rule = Rule::gauss_legendre(8);
            let vmax = 50.0f64;
            let edges: Vec<f64> = (0..=100).map(|i| vmax * i as f64 / 100.0).collect();
            let body = 2.0 * rule.composite(&edges, |v| equilibrium_density_1d(s, v));
            // F(v) ~ C v^{-1-2s} with C = Gamma(1+2s) sin(pi s) / (2s pi)
            let c = statrs::function::gamma::gamma(1.0 + 2.0 * s) * (PI * s).sin() / (2.0 * s * PI);
            let tail = 2.0 * c * vmax.powf(-2.0 * s) / (2.0 * s);
            assert!((body + tail - 1.0).abs() < 2e-3, "s={s}: {}", body + tail);
        }
    }
}
