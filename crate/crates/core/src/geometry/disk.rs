//! Closed forms for the unit disk: endpoint, chord data, first and second
//! derivatives of `eta` in `v`, and the first derivative in `x`.

use super::{ball_exit, trace_eta, DomainShape, JacobianBundle, TrajectoryOutcome, L_MIN, REGION_TOL};
use crate::error::GeometryError;
use nalgebra::{DMatrix, Matrix2, Vector2};
use std::f64::consts::PI;

/// `D2[i][j][l] = d^2 eta_i / (dv_j dv_l)`.
pub type SecondDerivative = [[[f64; 2]; 2]; 2];

/// Chord data of the straight line through `x` with unit direction `dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordData {
    /// Polar angle of the first boundary point hit.
    pub theta: f64,
    /// Signed incidence angle.
    pub incidence: f64,
    /// `L = 2 sqrt((x.dir)^2 + 1 - |x|^2)`.
    pub chord: f64,
    /// Distance from `x` to the first boundary point.
    pub l_in: f64,
}

impl ChordData {
    /// The chord length recomputed from the incidence angle, `2 cos A`.
    pub fn chord_from_angle(&self) -> f64 {
        2.0 * self.incidence.cos()
    }
}

pub fn chord_quantities(x: [f64; 2], dir: [f64; 2]) -> ChordData {
    let b = x[0] * dir[0] + x[1] * dir[1];
    let c = (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0);
    let cos_a = (b * b + c).sqrt();
    let sin_a = x[0] * dir[1] - x[1] * dir[0];
    let l_in = ball_exit(b, c);
    ChordData {
        theta: (x[1] + l_in * dir[1]).atan2(x[0] + l_in * dir[0]),
        incidence: sin_a.atan2(cos_a),
        chord: 2.0 * cos_a,
        l_in,
    }
}

/// Allocation-free disk trajectory, shared with the particle code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Disk2 {
    pub endpoint: [f64; 2],
    pub k: u64,
    pub theta: f64,
    pub a: f64,
    pub chord: f64,
    pub l_in: f64,
    pub l_end: f64,
    pub final_dir: [f64; 2],
    pub nv: f64,
    pub vb: [f64; 2],
    pub b: f64,
    pub cos_a: f64,
}

impl Disk2 {
    /// Distance of `|v|` to the nearest value where `k` jumps.
    fn region_margin(&self) -> f64 {
        if self.k == 0 {
            self.l_in - self.nv
        } else {
            self.l_end.min(self.chord - self.l_end)
        }
    }

    /// Rotation angle `k (pi - 2A)` reduced with exact parity handling.
    fn angle(&self) -> f64 {
        let parity = if self.k % 2 == 1 { PI } else { 0.0 };
        parity - 2.0 * (self.k as f64) * self.a
    }

    fn into_outcome(self) -> TrajectoryOutcome {
        TrajectoryOutcome {
            endpoint: self.endpoint.to_vec(),
            k: self.k,
            theta: self.theta,
            incidence: self.a,
            chord: self.chord,
            l_in: self.l_in,
            l_end: self.l_end,
            final_dir: self.final_dir.to_vec(),
            plane_basis: None,
        }
    }
}

/// Closed-form `eta` in the disk; `x` is assumed to lie in the closed disk.
///
/// A reflection that would occur exactly at arclength `|v|` is not counted.
pub(crate) fn disk_closed_form(x: [f64; 2], v: [f64; 2]) -> Result<Disk2, GeometryError> {
    let nv = v[0].hypot(v[1]);
    let vb = if nv > 0.0 { [v[0] / nv, v[1] / nv] } else { [0.0, 0.0] };
    let b = x[0] * vb[0] + x[1] * vb[1];
    let c = (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0);
    let cos_a = (b * b + c).sqrt();
    let sin_a = x[0] * vb[1] - x[1] * vb[0];
    let a = sin_a.atan2(cos_a);
    let chord = 2.0 * cos_a;
    let l_in = ball_exit(b, c);
    let theta = (x[1] + l_in * vb[1]).atan2(x[0] + l_in * vb[0]);
    let mut out = Disk2 {
        endpoint: [x[0] + v[0], x[1] + v[1]],
        k: 0,
        theta,
        a,
        chord,
        l_in,
        l_end: nv,
        final_dir: vb,
        nv,
        vb,
        b,
        cos_a,
    };
    if nv <= l_in {
        return Ok(out);
    }
    if chord < L_MIN {
        return Err(GeometryError::GrazingUnderflow(chord));
    }
    let k = ((nv - l_in) / chord).ceil().max(1.0);
    out.k = k as u64;
    out.l_end = (nv - l_in - (k - 1.0) * chord).clamp(0.0, chord);
    let (sn, cs) = out.angle().sin_cos();
    let m = nv - k * chord;
    let p = [x[0] + m * vb[0], x[1] + m * vb[1]];
    out.endpoint = [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]];
    out.final_dir = [cs * vb[0] - sn * vb[1], sn * vb[0] + cs * vb[1]];
    Ok(out)
}

fn as2(a: &[f64]) -> Result<[f64; 2], GeometryError> {
    if a.len() != 2 {
        return Err(GeometryError::DimensionMismatch { expected: 2, got: a.len() });
    }
    Ok([a[0], a[1]])
}

/// `eta(x, v)` in the unit disk; grazing chords fall back to the stepper.
pub fn eta_disk(x: &[f64], v: &[f64]) -> Result<TrajectoryOutcome, GeometryError> {
    let domain = DomainShape::UnitBall(2);
    domain.check_start(x, v)?;
    match disk_closed_form(as2(x)?, as2(v)?) {
        Ok(d) => Ok(d.into_outcome()),
        Err(GeometryError::GrazingUnderflow(_)) => trace_eta(domain, x, v),
        Err(e) => Err(e),
    }
}

/// First-order data used by both derivative routines.
struct Frame {
    d: Disk2,
    r: Matrix2<f64>,
    s: Matrix2<f64>,
    vb: Vector2<f64>,
    big_theta: Matrix2<f64>,
    mu: f64,
}

fn frame(x: &[f64], v: &[f64]) -> Result<Frame, GeometryError> {
    DomainShape::UnitBall(2).check_start(x, v)?;
    let d = disk_closed_form(as2(x)?, as2(v)?)?;
    let margin = d.region_margin();
    if margin < REGION_TOL * d.nv.max(1.0) {
        return Err(GeometryError::OnRegionBoundary(margin));
    }
    let (sn, cs) = d.angle().sin_cos();
    let r = Matrix2::new(cs, -sn, sn, cs);
    let s = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    let vb = Vector2::new(d.vb[0], d.vb[1]);
    let big_theta = (s * r * vb) * (s * vb).transpose();
    let kf = d.k as f64;
    let mu = if d.k == 0 {
        0.0
    } else {
        2.0 * kf / d.nv * (2.0 * d.l_in * d.l_end / d.chord - d.l_in - d.l_end)
    };
    Ok(Frame { d, r, s, vb, big_theta, mu })
}

fn to_dmatrix(m: &Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// `grad_v eta`, `grad_x eta`, `det grad_v eta = 1 + mu` and the rotation.
pub fn jacobian_disk(x: &[f64], v: &[f64]) -> Result<JacobianBundle, GeometryError> {
    let f = frame(x, v)?;
    if f.d.k == 0 {
        return Ok(JacobianBundle::identity(2));
    }
    let kf = f.d.k as f64;
    let gv = f.big_theta * f.mu + f.r;
    let gx = f.big_theta * (2.0 * kf * (2.0 * f.d.l_end / f.d.chord - 1.0)) + f.r;
    Ok(JacobianBundle {
        grad_v: to_dmatrix(&gv),
        grad_x: to_dmatrix(&gx),
        det_v: 1.0 + f.mu,
        mu: f.mu,
        rotation: to_dmatrix(&f.r),
    })
}

/// Gradients with respect to `v` of the scalar chord quantities.
struct ChordGradients {
    /// `d vb_i / d v_l`.
    p: Matrix2<f64>,
    a: Vector2<f64>,
    mu: Vector2<f64>,
}

fn chord_gradients(x: &[f64], f: &Frame) -> ChordGradients {
    let d = &f.d;
    let kf = d.k as f64;
    let nv = d.nv;
    let xv = Vector2::new(x[0], x[1]);
    let p = (Matrix2::identity() - f.vb * f.vb.transpose()) / nv;
    let db = p.transpose() * xv;
    let d_chord = db * (4.0 * d.b / d.chord);
    let d_lin = -db + d_chord * 0.5;
    let d_lend = f.vb - d_lin - d_chord * (kf - 1.0);
    let sin_a = d.a.sin();
    let d_sin = Vector2::new(x[0] * p[(1, 0)] - x[1] * p[(0, 0)], x[0] * p[(1, 1)] - x[1] * p[(0, 1)]);
    let d_cos = d_chord * 0.5;
    let da = d_sin * d.cos_a - d_cos * sin_a;
    let (li, le, l) = (d.l_in, d.l_end, d.chord);
    let dq = (d_lin * le + d_lend * li) * (2.0 / l) - d_chord * (2.0 * li * le / (l * l)) - d_lin - d_lend;
    let dmu = -f.vb * (f.mu / nv) + dq * (2.0 * kf / nv);
    ChordGradients { p, a: da, mu: dmu }
}

/// `grad_v mu_x(v)` (zero when `k = 0`).
pub fn mu_gradient(x: &[f64], v: &[f64]) -> Result<[f64; 2], GeometryError> {
    let f = frame(x, v)?;
    if f.d.k == 0 {
        return Ok([0.0, 0.0]);
    }
    let g = chord_gradients(x, &f);
    Ok([g.mu[0], g.mu[1]])
}

/// Second derivative `D^2_v eta` assembled from the gradients of `mu`,
/// `Theta` and the rotation angle.
pub fn second_derivative_disk(x: &[f64], v: &[f64]) -> Result<SecondDerivative, GeometryError> {
    let f = frame(x, v)?;
    let mut out = [[[0.0; 2]; 2]; 2];
    if f.d.k == 0 {
        return Ok(out);
    }
    let g = chord_gradients(x, &f);
    let kf = f.d.k as f64;
    let s = f.s;
    let sv = s * f.vb;
    for l in 0..2 {
        let dr = s * f.r * (-2.0 * kf * g.a[l]);
        let pl = g.p.column(l).into_owned();
        let d_theta = (s * dr * f.vb) * sv.transpose()
            + (s * f.r * pl) * sv.transpose()
            + (s * f.r * f.vb) * (s * pl).transpose();
        let m = f.big_theta * g.mu[l] + d_theta * f.mu + dr;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j][l] = m[(i, j)];
            }
        }
    }
    Ok(out)
}
