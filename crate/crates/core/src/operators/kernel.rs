//! Half-space specular kernel: the free kernel plus its mirror image.

use crate::error::OperatorError;

/// `K(x, y) = c (|x - y|^{-d-2s} + |(x' - y', x_d + y_d)|^{-d-2s})`.
pub fn kernel_halfspace(x: &[f64], y: &[f64], s: f64, c_ds: f64) -> Result<f64, OperatorError> {
    let d = x.len();
    if y.len() != d {
        return Err(crate::error::GeometryError::DimensionMismatch { expected: d, got: y.len() }.into());
    }
    let mut direct = 0.0;
    let mut mirror = 0.0;
    for i in 0..d - 1 {
        let t = (x[i] - y[i]) * (x[i] - y[i]);
        direct += t;
        mirror += t;
    }
    direct += (x[d - 1] - y[d - 1]).powi(2);
    mirror += (x[d - 1] + y[d - 1]).powi(2);
    if direct == 0.0 {
        return Err(OperatorError::CoincidentPoints);
    }
    let p = -0.5 * (d as f64 + 2.0 * s);
    Ok(c_ds * (direct.powf(p) + mirror.powf(p)))
}
