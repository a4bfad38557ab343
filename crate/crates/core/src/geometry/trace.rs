//! Generic ray-tracing stepper: straight segments of total length `|v|` with
//! specular reflection at the boundary.

use super::{chord_quantities, dot, norm, plane_reduction, unit_or_zero, DomainShape, TrajectoryOutcome, MAX_REFLECTIONS};
use crate::error::GeometryError;

/// Vertices of a reflected path together with the length of the segment
/// ending at each vertex (zero for the start point).
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub vertices: Vec<Vec<f64>>,
    pub lengths: Vec<f64>,
}

impl Polyline {
    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }
}

pub fn trace_eta(domain: DomainShape, x: &[f64], v: &[f64]) -> Result<TrajectoryOutcome, GeometryError> {
    trace_impl(domain, x, v, None)
}

/// Like [`trace_eta`] but also returns every reflection vertex.
pub fn trace_polyline(domain: DomainShape, x: &[f64], v: &[f64]) -> Result<(TrajectoryOutcome, Polyline), GeometryError> {
    let mut poly = Polyline { vertices: vec![x.to_vec()], lengths: vec![0.0] };
    let out = trace_impl(domain, x, v, Some(&mut poly))?;
    Ok((out, poly))
}

fn trace_impl(
    domain: DomainShape,
    x: &[f64],
    v: &[f64],
    mut poly: Option<&mut Polyline>,
) -> Result<TrajectoryOutcome, GeometryError> {
    domain.check_start(x, v)?;
    let d = domain.dim();
    let nv = norm(v);
    let mut p = x.to_vec();
    let mut dir = unit_or_zero(v);
    let mut remaining = nv;
    let mut k: u64 = 0;
    let mut first_hit = f64::INFINITY;
    let mut last_len = nv;
    while remaining > 0.0 {
        let t = domain.exit_distance(&p, &dir);
        if t >= remaining {
            // a reflection exactly at the end of the path is not counted
            for (pi, di) in p.iter_mut().zip(&dir) {
                *pi += remaining * di;
            }
            last_len = remaining;
            if let Some(poly) = poly.as_deref_mut() {
                poly.vertices.push(p.clone());
                poly.lengths.push(remaining);
            }
            break;
        }
        if k == 0 {
            first_hit = t;
        }
        if k >= MAX_REFLECTIONS {
            return Err(GeometryError::TooManyReflections(MAX_REFLECTIONS));
        }
        for (pi, di) in p.iter_mut().zip(&dir) {
            *pi += t * di;
        }
        let n = match domain {
            DomainShape::HalfSpace(_) => {
                p[d - 1] = 0.0;
                let mut n = vec![0.0; d];
                n[d - 1] = -1.0;
                n
            }
            DomainShape::UnitBall(_) => {
                let r = norm(&p);
                for pi in p.iter_mut() {
                    *pi /= r;
                }
                p.clone()
            }
            DomainShape::WholeSpace(_) => unreachable!("no boundary to hit"),
        };
        let vn = dot(&dir, &n);
        for (di, ni) in dir.iter_mut().zip(&n) {
            *di -= 2.0 * vn * ni;
        }
        let dn = norm(&dir);
        for di in dir.iter_mut() {
            *di /= dn;
        }
        remaining -= t;
        k += 1;
        if let Some(poly) = poly.as_deref_mut() {
            poly.vertices.push(p.clone());
            poly.lengths.push(t);
        }
    }
    if nv == 0.0 {
        last_len = 0.0;
    }

    let mut out = TrajectoryOutcome {
        endpoint: p,
        k,
        theta: 0.0,
        incidence: 0.0,
        chord: f64::INFINITY,
        l_in: domain.exit_distance(x, &unit_or_zero(v)),
        l_end: last_len,
        final_dir: dir,
        plane_basis: None,
    };
    if k > 0 {
        out.l_in = first_hit;
    }
    match domain {
        DomainShape::HalfSpace(_) if nv > 0.0 => {
            out.incidence = (v[d - 1].abs() / nv).min(1.0).acos();
        }
        DomainShape::UnitBall(1) => {
            out.chord = 2.0;
            out.theta = if v[0] >= 0.0 { 0.0 } else { std::f64::consts::PI };
        }
        DomainShape::UnitBall(_) if nv > 0.0 => {
            let (x2, v2, basis) = plane_reduction(x, v);
            let c = chord_quantities(x2, [v2[0] / nv, v2[1] / nv]);
            out.theta = c.theta;
            out.incidence = c.incidence;
            out.chord = c.chord;
            if d > 2 {
                out.plane_basis = Some(basis);
            }
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::eta;
    use proptest::prelude::*;

    #[test]
    fn zero_velocity_is_identity() {
        let o = trace_eta(DomainShape::UnitBall(2), &[0.3, 0.1], &[0.0, 0.0]).unwrap();
        assert_eq!(o.endpoint, vec![0.3, 0.1]);
        assert_eq!(o.k, 0);
    }

    #[test]
    fn one_dimensional_ball() {
        let o = trace_eta(DomainShape::UnitBall(1), &[0.0], &[5.0]).unwrap();
        // 0 -> 1 -> -1 -> 0: lengths 1 + 2 + 2 = 5
        assert_eq!(o.k, 2);
        assert!((o.endpoint[0] - 1.0).abs() < 1e-15);
        let o = trace_eta(DomainShape::UnitBall(1), &[0.0], &[4.5]).unwrap();
        assert!((o.endpoint[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn three_d_axis_trajectory_matches_lift() {
        let x = [0.0, 0.0, 0.5];
        let v = [0.0, 0.0, 1.0];
        let direct = trace_eta(DomainShape::UnitBall(3), &x, &v).unwrap();
        let lifted = eta(DomainShape::UnitBall(3), &x, &v).unwrap();
        assert!((direct.endpoint[2] - 0.5).abs() < 1e-15);
        for i in 0..3 {
            assert!((direct.endpoint[i] - lifted.endpoint[i]).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn three_d_polyline_is_planar_and_isometric(
            x in prop::array::uniform3(-0.55..0.55f64),
            v in prop::array::uniform3(-6.0..6.0f64),
        ) {
            let dom = DomainShape::UnitBall(3);
            let (out, poly) = trace_polyline(dom, &x, &v).unwrap();
            let nv = norm(&v);
            prop_assert!((poly.total_length() - nv).abs() < 1e-10 * nv.max(1.0));
            prop_assert!((norm(&out.final_dir) - 1.0).abs() < 1e-12 || nv == 0.0);
            let (_, _, basis) = plane_reduction(&x, &v);
            for p in &poly.vertices {
                prop_assert!(basis.residual(p) < 1e-10);
                prop_assert!(norm(p) <= 1.0 + 1e-12);
            }
            let lifted = eta(dom, &x, &v).unwrap();
            for i in 0..3 {
                prop_assert!((lifted.endpoint[i] - out.endpoint[i]).abs() < 1e-10);
            }
        }
    }
}
