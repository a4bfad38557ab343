//! Specular billiard endpoint map `eta(x, v)` for the whole space, the
//! half-space `{x_d > 0}` and the unit ball, with analytic derivatives in
//! the planar disk.
//!
//! `eta(x, v)` is the end point of the straight path of length `|v|` that
//! starts at `x` in direction `v/|v|` and reflects specularly on the boundary.

mod disk;
mod halfspace;
mod plane;
mod trace;

pub use disk::{
    chord_quantities, eta_disk, jacobian_disk, mu_gradient, second_derivative_disk, ChordData,
    SecondDerivative,
};
pub use halfspace::{eta_halfspace, jacobian_halfspace};
pub use plane::{plane_reduction, PlaneBasis};
pub use trace::{trace_eta, trace_polyline, Polyline};

pub(crate) use disk::disk_closed_form;

use crate::error::GeometryError;
use nalgebra::DMatrix;

/// Chords shorter than this are treated as grazing and routed to the stepper.
pub const L_MIN: f64 = 1e-12;
/// Relative margin below which `(x, v)` counts as sitting on the boundary of
/// a constant-reflection-count region.
pub const REGION_TOL: f64 = 1e-8;
/// Upper bound on reflections for the ray-tracing stepper.
pub const MAX_REFLECTIONS: u64 = 50_000_000;

const CONTAIN_TOL: f64 = 1e-12;

/// The spatial domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainShape {
    WholeSpace(usize),
    /// `{x in R^d : x_d > 0}`.
    HalfSpace(usize),
    /// Open unit ball centred at the origin.
    UnitBall(usize),
}

impl DomainShape {
    pub fn dim(&self) -> usize {
        match *self {
            DomainShape::WholeSpace(d) | DomainShape::HalfSpace(d) | DomainShape::UnitBall(d) => d,
        }
    }

    /// Membership in the closure of the domain (with a 1e-12 slack).
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            DomainShape::WholeSpace(_) => true,
            DomainShape::HalfSpace(d) => x[d - 1] >= -CONTAIN_TOL,
            DomainShape::UnitBall(_) => dot(x, x) <= 1.0 + CONTAIN_TOL,
        }
    }

    /// Euclidean distance to the boundary (infinite for the whole space).
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        match *self {
            DomainShape::WholeSpace(_) => f64::INFINITY,
            DomainShape::HalfSpace(d) => x[d - 1].max(0.0),
            DomainShape::UnitBall(_) => (1.0 - norm(x)).max(0.0),
        }
    }

    /// Outward unit normal at (or nearest to) `x`; `None` without boundary.
    pub fn outward_normal(&self, x: &[f64]) -> Option<Vec<f64>> {
        match *self {
            DomainShape::WholeSpace(_) => None,
            DomainShape::HalfSpace(d) => {
                let mut n = vec![0.0; d];
                n[d - 1] = -1.0;
                Some(n)
            }
            DomainShape::UnitBall(_) => {
                let r = norm(x);
                if r == 0.0 {
                    None
                } else {
                    Some(x.iter().map(|xi| xi / r).collect())
                }
            }
        }
    }

    /// Distance travelled from `x` along the unit vector `dir` before the
    /// boundary is reached (`INFINITY` if never).
    pub fn exit_distance(&self, x: &[f64], dir: &[f64]) -> f64 {
        match *self {
            DomainShape::WholeSpace(_) => f64::INFINITY,
            DomainShape::HalfSpace(d) => {
                if dir[d - 1] < 0.0 {
                    x[d - 1].max(0.0) / -dir[d - 1]
                } else {
                    f64::INFINITY
                }
            }
            DomainShape::UnitBall(_) => {
                let b = dot(x, dir);
                let c = (1.0 - dot(x, x)).max(0.0);
                ball_exit(b, c)
            }
        }
    }

    /// Path lengths along the reflected ray from `x` in direction `dir` at
    /// which reflections happen, up to `r_max` (at most `max_count` of them).
    pub fn reflection_distances(&self, x: &[f64], dir: &[f64], r_max: f64, max_count: usize) -> Vec<f64> {
        match *self {
            DomainShape::WholeSpace(_) => Vec::new(),
            DomainShape::HalfSpace(_) => {
                let t = self.exit_distance(x, dir);
                if t < r_max {
                    vec![t]
                } else {
                    Vec::new()
                }
            }
            DomainShape::UnitBall(_) => {
                let b = dot(x, dir);
                let c = (1.0 - dot(x, x)).max(0.0);
                let first = ball_exit(b, c);
                let chord = 2.0 * (b * b + c).sqrt();
                let mut out = Vec::new();
                let mut t = first;
                while t < r_max && out.len() < max_count {
                    out.push(t);
                    if chord <= 0.0 {
                        break;
                    }
                    t += chord;
                }
                out
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            DomainShape::UnitBall(_) => 2.0,
            _ => f64::INFINITY,
        }
    }

    /// Lebesgue measure (infinite for unbounded domains).
    pub fn volume(&self) -> f64 {
        match *self {
            DomainShape::UnitBall(d) => {
                let h = d as f64 / 2.0;
                std::f64::consts::PI.powf(h) / statrs::function::gamma::gamma(h + 1.0)
            }
            _ => f64::INFINITY,
        }
    }

    /// Reject points outside the closed domain and outgoing boundary starts.
    pub fn check_start(&self, x: &[f64], v: &[f64]) -> Result<(), GeometryError> {
        let d = self.dim();
        if x.len() != d {
            return Err(GeometryError::DimensionMismatch { expected: d, got: x.len() });
        }
        if v.len() != d {
            return Err(GeometryError::DimensionMismatch { expected: d, got: v.len() });
        }
        if x.iter().chain(v).any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if !self.contains(x) {
            return Err(GeometryError::OutsideDomain);
        }
        if self.distance_to_boundary(x) <= CONTAIN_TOL {
            if let Some(n) = self.outward_normal(x) {
                if dot(&n, v) > 0.0 {
                    return Err(GeometryError::OutgoingAtBoundary);
                }
            }
        }
        Ok(())
    }
}

/// Forward distance to the unit sphere for `b = x.dir`, `c = 1 - |x|^2 >= 0`,
/// written to avoid cancellation in either sign of `b`.
#[inline]
pub(crate) fn ball_exit(b: f64, c: f64) -> f64 {
    let sq = (b * b + c).sqrt();
    if b <= 0.0 {
        sq - b
    } else if sq + b > 0.0 {
        c / (sq + b)
    } else {
        0.0
    }
}

/// Result of following a specular trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryOutcome {
    /// `eta(x, v)`.
    pub endpoint: Vec<f64>,
    /// Number of reflections.
    pub k: u64,
    /// Polar angle of the first reflection point (in the trajectory plane for d > 2).
    pub theta: f64,
    /// Signed incidence angle, `|A| < pi/2`; its sign is the orientation of the
    /// trajectory (counter-clockwise positive).
    pub incidence: f64,
    /// Chord length `L = 2 cos A` (infinite without a bounded domain).
    pub chord: f64,
    /// Distance from `x` to the first boundary hit along `v` (may exceed `|v|`).
    pub l_in: f64,
    /// Length of the last partial chord (`|v|` when `k = 0`).
    pub l_end: f64,
    /// Unit direction at the end point.
    pub final_dir: Vec<f64>,
    /// Orthonormal basis of the trajectory plane (ball only).
    pub plane_basis: Option<PlaneBasis>,
}

/// Derivatives of `eta` with respect to `v` and `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianBundle {
    pub grad_v: DMatrix<f64>,
    pub grad_x: DMatrix<f64>,
    pub det_v: f64,
    pub mu: f64,
    pub rotation: DMatrix<f64>,
}

impl JacobianBundle {
    pub(crate) fn identity(d: usize) -> Self {
        JacobianBundle {
            grad_v: DMatrix::identity(d, d),
            grad_x: DMatrix::identity(d, d),
            det_v: 1.0,
            mu: 0.0,
            rotation: DMatrix::identity(d, d),
        }
    }
}

/// The phase-space map `F(x, v) = (eta(x, v), -grad_v eta(x, v) v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReverseMap {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub k: u64,
    pub mu1: f64,
    pub mu2: f64,
}

impl ReverseMap {
    /// `mu1 * mu2` evaluated in integer arithmetic:
    /// `(1 - 2k^2)^2 - 4k^2 (k^2 - 1)`.
    pub fn eigen_product_exact(&self) -> i128 {
        eigen_product_exact(self.k)
    }
}

/// Non-trivial eigenvalues `1 - 2k(k +- sqrt(k^2 - 1))` of `grad F` after `k`
/// reflections (both equal 1 without reflection).
pub fn reverse_eigenvalues(k: u64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 1.0);
    }
    let kf = k as f64;
    let r = (kf * kf - 1.0).sqrt();
    (1.0 - 2.0 * kf * (kf + r), 1.0 - 2.0 * kf * (kf - r))
}

pub fn eigen_product_exact(k: u64) -> i128 {
    if k == 0 {
        return 1;
    }
    let k2 = (k as i128) * (k as i128);
    (1 - 2 * k2) * (1 - 2 * k2) - 4 * k2 * (k2 - 1)
}

/// `eta(x, v)` through the closed forms where available, the stepper otherwise.
pub fn eta(domain: DomainShape, x: &[f64], v: &[f64]) -> Result<TrajectoryOutcome, GeometryError> {
    match domain {
        DomainShape::WholeSpace(_) => {
            domain.check_start(x, v)?;
            let nv = norm(v);
            Ok(TrajectoryOutcome {
                endpoint: x.iter().zip(v).map(|(a, b)| a + b).collect(),
                k: 0,
                theta: 0.0,
                incidence: 0.0,
                chord: f64::INFINITY,
                l_in: f64::INFINITY,
                l_end: nv,
                final_dir: unit_or_zero(v),
                plane_basis: None,
            })
        }
        DomainShape::HalfSpace(_) => {
            domain.check_start(x, v)?;
            Ok(eta_halfspace(x, v))
        }
        DomainShape::UnitBall(2) => eta_disk(x, v),
        DomainShape::UnitBall(d) if d > 2 => {
            domain.check_start(x, v)?;
            let (x2, v2, basis) = plane_reduction(x, v);
            let mut out = eta_disk(&x2, &v2)?;
            out.endpoint = basis.lift(&out.endpoint);
            out.final_dir = basis.lift(&out.final_dir);
            out.plane_basis = Some(basis);
            Ok(out)
        }
        _ => trace_eta(domain, x, v),
    }
}

/// `F(x, v) = (eta, -grad_v eta . v)` with the closed-form eigenvalues.
pub fn reverse_map(domain: DomainShape, x: &[f64], v: &[f64]) -> Result<ReverseMap, GeometryError> {
    let (out, grad) = match domain {
        DomainShape::UnitBall(2) => (eta_disk(x, v)?, jacobian_disk(x, v)?.grad_v),
        DomainShape::HalfSpace(_) => {
            domain.check_start(x, v)?;
            (eta_halfspace(x, v), jacobian_halfspace(x, v)?.grad_v)
        }
        _ => {
            // -grad_v eta . v is the end velocity reversed, for any domain.
            let out = eta(domain, x, v)?;
            let nv = norm(v);
            let w: Vec<f64> = out.final_dir.iter().map(|c| -nv * c).collect();
            let (mu1, mu2) = reverse_eigenvalues(out.k);
            return Ok(ReverseMap { y: out.endpoint, w, k: out.k, mu1, mu2 });
        }
    };
    let d = v.len();
    let w: Vec<f64> = (0..d).map(|i| -(0..d).map(|j| grad[(i, j)] * v[j]).sum::<f64>()).collect();
    let (mu1, mu2) = reverse_eigenvalues(out.k);
    Ok(ReverseMap { y: out.endpoint, w, k: out.k, mu1, mu2 })
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn unit_or_zero(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    if n > 0.0 {
        v.iter().map(|c| c / n).collect()
    } else {
        vec![0.0; v.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normals_are_unit_and_outward() {
        let h = DomainShape::HalfSpace(3);
        assert_eq!(h.outward_normal(&[1.0, 2.0, 0.0]).unwrap(), vec![0.0, 0.0, -1.0]);
        let b = DomainShape::UnitBall(2);
        let n = b.outward_normal(&[0.6, 0.8]).unwrap();
        assert!((norm(&n) - 1.0).abs() < 1e-15);
        assert_eq!(n, vec![0.6, 0.8]);
    }

    #[test]
    fn whole_space_eta_is_translation() {
        let out = eta(DomainShape::WholeSpace(2), &[0.3, 0.3], &[1.0, -2.0]).unwrap();
        assert_eq!(out.k, 0);
        assert!((out.endpoint[0] - 1.3).abs() < 1e-15 && (out.endpoint[1] + 1.7).abs() < 1e-15);
    }

    #[test]
    fn exact_eigen_product_is_one() {
        for k in 0..1000 {
            assert_eq!(eigen_product_exact(k), 1);
        }
        let (a, b) = reverse_eigenvalues(2);
        let s3 = 3f64.sqrt();
        assert!((a - (-7.0 - 4.0 * s3)).abs() < 1e-12);
        assert!((b - (-7.0 + 4.0 * s3)).abs() < 1e-12);
    }

    #[test]
    fn outgoing_boundary_start_is_rejected() {
        let b = DomainShape::UnitBall(2);
        assert_eq!(b.check_start(&[1.0, 0.0], &[1.0, 0.0]), Err(GeometryError::OutgoingAtBoundary));
        assert!(b.check_start(&[1.0, 0.0], &[-1.0, 0.0]).is_ok());
        assert_eq!(b.check_start(&[1.5, 0.0], &[0.0, 0.0]), Err(GeometryError::OutsideDomain));
    }

    #[test]
    fn ball_volume() {
        assert!((DomainShape::UnitBall(2).volume() - std::f64::consts::PI).abs() < 1e-12);
        assert!((DomainShape::UnitBall(3).volume() - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
