//! The normalisation constant `c_{d,s}` of the singular-integral form of the
//! fractional Laplacian.

use crate::error::OperatorError;
use crate::quad::{graded_edges, uniform_edges, Rule};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// `c_{d,s} = (int (1 - cos z_1) |z|^{-d-2s} dz)^{-1}` by quadrature.
///
/// The integral factorises into `I(2s) * int_{S^{d-1}} |w_1|^{2s} dw` with
/// `I(a) = int_0^inf (1 - cos r) r^{-1-a} dr`.
pub fn normalization_constant(d: usize, s: f64) -> Result<f64, OperatorError> {
    if !(1..=3).contains(&d) {
        return Err(OperatorError::InvalidConfig(format!("dimension {d} not in 1..=3")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(OperatorError::InvalidConfig(format!("s = {s} not in (0, 1)")));
    }
    let coarse = radial_integral(2.0 * s, 120, 8) * sphere_moment(d, 2.0 * s, 8);
    let fine = radial_integral(2.0 * s, 240, 16) * sphere_moment(d, 2.0 * s, 16);
    let rel = ((fine - coarse) / fine).abs();
    if !(rel < 1e-9) || !fine.is_finite() {
        return Err(OperatorError::QuadratureNotConverged(format!(
            "c_(d={d},s={s}): two resolutions differ by {rel:e}"
        )));
    }
    Ok(1.0 / fine)
}

/// Independent closed form `4^s Gamma(d/2 + s) / (pi^{d/2} |Gamma(-s)|)`.
pub fn normalization_constant_closed_form(d: usize, s: f64) -> f64 {
    let h = d as f64 / 2.0;
    4f64.powf(s) * gamma(h + s) / (PI.powf(h) * gamma(-s).abs())
}

/// `I(a) = int_0^inf (1 - cos r) r^{-1-a} dr` for `0 < a < 2`, integrated over
/// `periods` full periods with panels of `order` nodes plus an asymptotic tail.
fn radial_integral(a: f64, periods: usize, order: usize) -> f64 {
    let rule = Rule::gauss_legendre(order);
    let f = |r: f64| {
        // 1 - cos r = 2 sin^2(r/2) avoids cancellation near 0
        let h = (0.5 * r).sin();
        2.0 * h * h * r.powf(-1.0 - a)
    };
    let two_pi = 2.0 * PI;
    let edges = graded_edges(two_pi, 40, 0.5);
    // first panel [0, e] from the series (1 - cos r) = r^2/2 - r^4/24 + ...
    let e = edges[1];
    let mut total = e.powf(2.0 - a) / (2.0 * (2.0 - a)) - e.powf(4.0 - a) / (24.0 * (4.0 - a));
    total += rule.composite(&edges[1..], f);
    for p in 1..periods {
        let lo = two_pi * p as f64;
        total += rule.composite(&uniform_edges(lo, lo + two_pi, 4), f);
    }
    let x = two_pi * periods as f64;
    // int_X^inf r^{-1-a} dr minus the cosine part, expanded by parts at X = 2 pi M
    let b = 1.0 + a;
    let cos_tail = b * x.powf(-b - 1.0) - b * (b + 1.0) * (b + 2.0) * x.powf(-b - 3.0);
    total + x.powf(-a) / a - cos_tail
}

/// `int_{S^{d-1}} |w_1|^p dw`.
fn sphere_moment(d: usize, p: f64, order: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => {
            // 4 int_0^{pi/2} cos^p(t) dt, graded towards the zero of cos
            let rule = Rule::gauss_legendre(order);
            let edges = graded_edges(PI / 2.0, 40, 0.5);
            4.0 * rule.composite(&edges, |u| u.sin().powf(p))
        }
        _ => 4.0 * PI / (p + 1.0),
    }
}
