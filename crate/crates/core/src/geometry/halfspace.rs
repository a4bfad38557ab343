//! Closed form in the half-space `{x_d > 0}`: at most one reflection.

use super::{norm, JacobianBundle, TrajectoryOutcome, REGION_TOL};
use crate::error::GeometryError;
use nalgebra::DMatrix;

/// `eta(x, v) = (x' + v', |x_d + v_d|)`; a trajectory ending exactly on the
/// wall is not counted as reflected.
pub fn eta_halfspace(x: &[f64], v: &[f64]) -> TrajectoryOutcome {
    let d = x.len();
    let nv = norm(v);
    let zd = x[d - 1] + v[d - 1];
    let k = u64::from(zd < 0.0);
    let mut endpoint: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + b).collect();
    endpoint[d - 1] = zd.abs();
    let mut final_dir: Vec<f64> = if nv > 0.0 { v.iter().map(|c| c / nv).collect() } else { vec![0.0; d] };
    let l_in = if v[d - 1] < 0.0 { x[d - 1] * nv / -v[d - 1] } else { f64::INFINITY };
    if k == 1 {
        final_dir[d - 1] = -final_dir[d - 1];
    }
    TrajectoryOutcome {
        endpoint,
        k,
        theta: 0.0,
        incidence: if nv > 0.0 { (v[d - 1].abs() / nv).min(1.0).acos() } else { 0.0 },
        chord: f64::INFINITY,
        l_in,
        l_end: if k == 1 { nv - l_in } else { nv },
        final_dir,
        plane_basis: None,
    }
}

/// `grad_v eta = grad_x eta = Id - 2 H(-(x_d + v_d)) E_dd`.
pub fn jacobian_halfspace(x: &[f64], v: &[f64]) -> Result<JacobianBundle, GeometryError> {
    let d = x.len();
    if v.len() != d {
        return Err(GeometryError::DimensionMismatch { expected: d, got: v.len() });
    }
    let zd = x[d - 1] + v[d - 1];
    if zd.abs() < REGION_TOL * norm(v).max(1.0) {
        return Err(GeometryError::OnRegionBoundary(zd.abs()));
    }
    let mut m = DMatrix::identity(d, d);
    if zd < 0.0 {
        m[(d - 1, d - 1)] = -1.0;
    }
    let det = m[(d - 1, d - 1)];
    Ok(JacobianBundle { grad_v: m.clone(), grad_x: m.clone(), det_v: det, mu: det - 1.0, rotation: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{trace_eta, DomainShape};
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let o = eta_halfspace(&[0.0, 1.0], &[0.0, -3.0]);
        assert_eq!((o.k, o.endpoint.clone()), (1, vec![0.0, 2.0]));
        let o = eta_halfspace(&[1.0, 1.0], &[1.0, 0.5]);
        assert_eq!((o.k, o.endpoint.clone()), (0, vec![2.0, 1.5]));
        let o = eta_halfspace(&[0.0, 0.5], &[0.0, -0.5]);
        assert_eq!((o.k, o.endpoint.clone()), (0, vec![0.0, 0.0]));
    }

    #[test]
    fn reflected_jacobian() {
        let j = jacobian_halfspace(&[0.0, 1.0], &[0.3, -3.0]).unwrap();
        assert_eq!(j.det_v, -1.0);
        assert_eq!(j.grad_v[(1, 1)], -1.0);
        assert_eq!(j.grad_v[(0, 0)], 1.0);
        let j = jacobian_halfspace(&[0.0, 1.0], &[0.3, 3.0]).unwrap();
        assert_eq!(j.grad_v, DMatrix::identity(2, 2));
        assert!(jacobian_halfspace(&[0.0, 1.0], &[0.3, -1.0]).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_stepper(x0 in -5.0..5.0f64, x1 in 0.0..3.0f64, x2 in 0.0..3.0f64,
                               v0 in -50.0..50.0f64, v1 in -50.0..50.0f64, v2 in -50.0..50.0f64) {
            let x = [x0, x1, x2];
            let v = [v0, v1, v2];
            let a = eta_halfspace(&x, &v);
            let b = trace_eta(DomainShape::HalfSpace(3), &x, &v).unwrap();
            prop_assert_eq!(a.k, b.k);
            for i in 0..3 {
                prop_assert!((a.endpoint[i] - b.endpoint[i]).abs() < 1e-12);
            }
            prop_assert!(a.endpoint[2] >= 0.0);
            let j = jacobian_halfspace(&x, &v);
            if let Ok(j) = j {
                prop_assert_eq!(j.det_v.abs(), 1.0);
            }
        }
    }
}
