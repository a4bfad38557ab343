//! Singular-integral evaluation of the fractional Laplacian and of the
//! specular operator `c P.V. int (psi(x) - psi(eta(x, w))) |w|^{-d-2s} dw`,
//! together with the matching bilinear form.

use super::constant::normalization_constant;
use super::field::Field;
use crate::error::OperatorError;
use crate::geometry::{disk_closed_form, eta, DomainShape};
use crate::quad::{insert_breaks, log_edges, Rule};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Order of the Gauss rule used on every radial panel.
const RADIAL_ORDER: usize = 4;
/// Cap on reflection break points inserted along one ray.
const MAX_BREAKS: usize = 512;
/// Largest admissible `|grad psi . n|` on the boundary when `s >= 1/2`.
pub const NEUMANN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig {
    pub s: f64,
    /// Radius of the inner ball handled by Taylor expansion.
    pub delta: f64,
    /// Outer truncation radius of the `w` integral.
    pub r_trunc: f64,
    /// Radial nodes per direction before reflection break points are added.
    pub n_radial: usize,
    /// Directions per great circle.
    pub n_angular: usize,
    pub c_ds: f64,
}

impl OperatorConfig {
    /// Defaults: `delta = 1e-2`, `R = 40`, 256 radial and 64 angular nodes.
    pub fn new(d: usize, s: f64) -> Result<Self, OperatorError> {
        let cfg = OperatorConfig {
            s,
            delta: 1e-2,
            r_trunc: 40.0,
            n_radial: 256,
            n_angular: 64,
            c_ds: normalization_constant(d, s)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        let bad = |m: String| Err(OperatorError::InvalidConfig(m));
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s = {} not in (0, 1)", self.s));
        }
        if !(self.delta > 0.0 && self.delta < self.r_trunc && self.r_trunc.is_finite()) {
            return bad(format!("need 0 < delta < R_trunc, got {} and {}", self.delta, self.r_trunc));
        }
        if self.n_radial < RADIAL_ORDER || self.n_angular < 2 || self.n_angular % 2 == 1 {
            return bad("n_radial >= 4 and an even n_angular >= 2 are required".into());
        }
        if !(self.c_ds > 0.0) {
            return bad("c_ds must be positive".into());
        }
        Ok(())
    }
}

/// Directions and weights on `S^{d-1}`, closed under `w -> -w`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(d: usize, n_angular: usize) -> Self {
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        match d {
            1 => {
                dirs = vec![vec![1.0], vec![-1.0]];
                weights = vec![1.0, 1.0];
            }
            2 => {
                for j in 0..n_angular {
                    let t = 2.0 * PI * (j as f64 + 0.5) / n_angular as f64;
                    dirs.push(vec![t.cos(), t.sin()]);
                    weights.push(2.0 * PI / n_angular as f64);
                }
            }
            _ => {
                let gl = Rule::gauss_legendre((n_angular / 2).max(2));
                for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                    let rho = (1.0 - z * z).sqrt();
                    for j in 0..n_angular {
                        let t = 2.0 * PI * (j as f64 + 0.5) / n_angular as f64;
                        let mut v = vec![0.0; d];
                        v[0] = rho * t.cos();
                        v[1] = rho * t.sin();
                        v[2] = *z;
                        dirs.push(v);
                        weights.push(wz * 2.0 * PI / n_angular as f64);
                    }
                }
            }
        }
        SphereRule { dirs, weights }
    }

    /// Total measure `|S^{d-1}|` as integrated by the rule.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Points and weights for integrals over the spatial domain.
#[derive(Debug, Clone)]
pub struct SpatialRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Box covered by the rule when it is smaller than the domain.
    pub region: Option<(Vec<f64>, Vec<f64>)>,
}

fn in_box(region: &(Vec<f64>, Vec<f64>), y: &[f64]) -> bool {
    y.iter().zip(region.0.iter().zip(&region.1)).all(|(v, (a, b))| *v >= *a && *v <= *b)
}

impl SpatialRule {
    /// Polar Gauss rule on the unit disk.
    pub fn disk(n_r: usize, n_theta: usize) -> Self {
        let gl = Rule::gauss_legendre(n_r);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (r, wr) in gl.mapped(0.0, 1.0) {
            for j in 0..n_theta {
                let t = 2.0 * PI * (j as f64 + 0.5) / n_theta as f64;
                points.push(vec![r * t.cos(), r * t.sin()]);
                weights.push(wr * r * 2.0 * PI / n_theta as f64);
            }
        }
        SpatialRule { points, weights, region: None }
    }

    /// Tensor Gauss rule on the box `[lo, hi]` with `panels` panels of
    /// `order` nodes along every axis.
    pub fn boxed(lo: &[f64], hi: &[f64], panels: usize, order: usize) -> Self {
        let gl = Rule::gauss_legendre(order);
        let axes: Vec<Vec<(f64, f64)>> = lo
            .iter()
            .zip(hi)
            .map(|(&a, &b)| {
                (0..panels)
                    .flat_map(|p| {
                        let l = a + (b - a) * p as f64 / panels as f64;
                        let r = a + (b - a) * (p + 1) as f64 / panels as f64;
                        gl.mapped(l, r).collect::<Vec<_>>()
                    })
                    .collect()
            })
            .collect();
        let mut points = vec![Vec::new()];
        let mut weights = vec![1.0];
        for axis in &axes {
            let mut np = Vec::with_capacity(points.len() * axis.len());
            let mut nw = Vec::with_capacity(points.len() * axis.len());
            for (p, w) in points.iter().zip(&weights) {
                for &(x, wx) in axis {
                    let mut q = p.clone();
                    q.push(x);
                    np.push(q);
                    nw.push(w * wx);
                }
            }
            points = np;
            weights = nw;
        }
        SpatialRule { points, weights, region: Some((lo.to_vec(), hi.to_vec())) }
    }
}

/// The specular operator on a fixed domain with precomputed direction rule.
#[derive(Debug, Clone)]
pub struct SpecularOperator {
    pub domain: DomainShape,
    pub cfg: OperatorConfig,
    sphere: SphereRule,
    rule: Rule,
}

impl SpecularOperator {
    pub fn new(domain: DomainShape, cfg: OperatorConfig) -> Result<Self, OperatorError> {
        cfg.validate()?;
        let d = domain.dim();
        if !(1..=3).contains(&d) {
            return Err(OperatorError::InvalidConfig(format!("dimension {d} not in 1..=3")));
        }
        Ok(SpecularOperator { domain, cfg, sphere: SphereRule::new(d, cfg.n_angular), rule: Rule::gauss_legendre(RADIAL_ORDER) })
    }

    pub fn sphere(&self) -> &SphereRule {
        &self.sphere
    }

    fn unbounded(&self) -> bool {
        !matches!(self.domain, DomainShape::UnitBall(_))
    }

    /// Radius below which `eta(x, w) = x + w` and the Taylor expansion is used.
    pub fn inner_radius(&self, x: &[f64]) -> f64 {
        let dist = self.domain.distance_to_boundary(x);
        if dist > self.cfg.delta {
            self.cfg.delta
        } else {
            (0.5 * dist).max(1e-10)
        }
    }

    fn base_edges(&self, rho0: f64) -> Vec<f64> {
        log_edges(rho0, self.cfg.r_trunc, self.cfg.n_radial / RADIAL_ORDER)
    }

    fn edges_along(&self, base: &[f64], x: &[f64], dir: &[f64]) -> Vec<f64> {
        let breaks = self.domain.reflection_distances(x, dir, self.cfg.r_trunc, MAX_BREAKS);
        if breaks.is_empty() {
            base.to_vec()
        } else {
            insert_breaks(base, &breaks)
        }
    }

    /// Writes `eta(x, w)` into `out`.
    pub(crate) fn eta_into(&self, x: &[f64], w: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
        match self.domain {
            DomainShape::WholeSpace(_) => {
                for i in 0..x.len() {
                    out[i] = x[i] + w[i];
                }
            }
            DomainShape::HalfSpace(d) => {
                for i in 0..d {
                    out[i] = x[i] + w[i];
                }
                out[d - 1] = out[d - 1].abs();
            }
            DomainShape::UnitBall(2) => match disk_closed_form([x[0], x[1]], [w[0], w[1]]) {
                Ok(r) => out.copy_from_slice(&r.endpoint),
                Err(_) => out.copy_from_slice(&eta(self.domain, x, w)?.endpoint),
            },
            _ => out.copy_from_slice(&eta(self.domain, x, w)?.endpoint),
        }
        Ok(())
    }

    /// Radial integral `int_{rho0}^{R} r^{-1-2s} g(r) dr` along `dir`.
    fn radial<G: FnMut(f64) -> Result<f64, OperatorError>>(
        &self,
        edges: &[f64],
        mut g: G,
    ) -> Result<f64, OperatorError> {
        let p = -1.0 - 2.0 * self.cfg.s;
        let mut acc = 0.0;
        for e in edges.windows(2) {
            for (r, w) in self.rule.mapped(e[0], e[1]) {
                acc += w * r.powf(p) * g(r)?;
            }
        }
        Ok(acc)
    }

    fn taylor_factor(&self, rho0: f64) -> f64 {
        let s = self.cfg.s;
        let d = self.domain.dim() as f64;
        self.cfg.c_ds * self.sphere.area() * rho0.powf(2.0 - 2.0 * s) / ((2.0 - 2.0 * s) * d)
    }

    fn tail_factor(&self) -> f64 {
        if self.unbounded() {
            let s = self.cfg.s;
            self.cfg.c_ds * self.sphere.area() * self.cfg.r_trunc.powf(-2.0 * s) / (2.0 * s)
        } else {
            0.0
        }
    }

    /// `(-Delta)^s_SR psi (x)` without the Neumann compatibility check.
    pub fn apply_unchecked<T: Field + ?Sized>(&self, psi: &T, x: &[f64]) -> Result<f64, OperatorError> {
        let d = self.domain.dim();
        let rho0 = self.inner_radius(x);
        let base = self.base_edges(rho0);
        let psi_x = psi.value(x);
        let mut y = vec![0.0; d];
        let mut w = vec![0.0; d];
        let mut outer = 0.0;
        for (dir, wd) in self.sphere.dirs.iter().zip(&self.sphere.weights) {
            let edges = self.edges_along(&base, x, dir);
            outer += wd * self.radial(&edges, |r| {
                for i in 0..d {
                    w[i] = r * dir[i];
                }
                self.eta_into(x, &w, &mut y)?;
                Ok(psi_x - psi.value(&y))
            })?;
        }
        let inner = -0.5 * psi.laplacian(x) * self.taylor_factor(rho0);
        Ok(self.cfg.c_ds * outer + inner + (psi_x - psi.far_mean()) * self.tail_factor())
    }

    /// Whole-space fractional Laplacian by the symmetric second difference
    /// `psi(x) - (psi(x + w) + psi(x - w)) / 2`.
    pub fn frac_laplacian<T: Field + ?Sized>(&self, psi: &T, x: &[f64]) -> Result<f64, OperatorError> {
        let d = x.len();
        let rho0 = self.cfg.delta;
        let base = self.base_edges(rho0);
        let psi_x = psi.value(x);
        let mut yp = vec![0.0; d];
        let mut ym = vec![0.0; d];
        let mut outer = 0.0;
        for (dir, wd) in self.sphere.dirs.iter().zip(&self.sphere.weights) {
            outer += wd * self.radial(&base, |r| {
                for i in 0..d {
                    yp[i] = x[i] + r * dir[i];
                    ym[i] = x[i] - r * dir[i];
                }
                Ok(psi_x - 0.5 * (psi.value(&yp) + psi.value(&ym)))
            })?;
        }
        let inner = -0.5 * psi.laplacian(x) * self.taylor_factor(rho0);
        let s = self.cfg.s;
        let tail = self.cfg.c_ds * self.sphere.area() * self.cfg.r_trunc.powf(-2.0 * s) / (2.0 * s);
        Ok(self.cfg.c_ds * outer + inner + (psi_x - psi.far_mean()) * tail)
    }

    /// Integrand in `x` of the bilinear form,
    /// `c/2 int (phi(x) - phi(eta)) (psi(x) - psi(eta)) |w|^{-d-2s} dw`.
    pub fn energy_density<A: Field + ?Sized, B: Field + ?Sized>(
        &self,
        phi: &A,
        psi: &B,
        x: &[f64],
    ) -> Result<f64, OperatorError> {
        self.energy_density_in(phi, psi, x, None)
    }

    /// Energy density for an `x` integral restricted to `region`: pairs whose
    /// end point leaves the region stand in for their mirror pair (end point
    /// inside, start outside), which carries the same integrand, so they get
    /// weight one instead of one half.
    pub fn energy_density_in<A: Field + ?Sized, B: Field + ?Sized>(
        &self,
        phi: &A,
        psi: &B,
        x: &[f64],
        region: Option<&(Vec<f64>, Vec<f64>)>,
    ) -> Result<f64, OperatorError> {
        let d = self.domain.dim();
        let rho0 = self.inner_radius(x);
        let base = self.base_edges(rho0);
        let (phi_x, psi_x) = (phi.value(x), psi.value(x));
        let mut y = vec![0.0; d];
        let mut w = vec![0.0; d];
        let mut outer = 0.0;
        for (dir, wd) in self.sphere.dirs.iter().zip(&self.sphere.weights) {
            let edges = self.edges_along(&base, x, dir);
            outer += wd * self.radial(&edges, |r| {
                for i in 0..d {
                    w[i] = r * dir[i];
                }
                self.eta_into(x, &w, &mut y)?;
                let weight = match region {
                    Some(b) if !in_box(b, &y) => 2.0,
                    _ => 1.0,
                };
                Ok(weight * (phi_x - phi.value(&y)) * (psi_x - psi.value(&y)))
            })?;
        }
        let gp = phi.gradient(x);
        let gq = psi.gradient(x);
        let grad_dot: f64 = gp.iter().zip(&gq).map(|(a, b)| a * b).sum();
        let inner = 0.5 * grad_dot * self.taylor_factor(rho0);
        let tail = (phi_x - phi.far_mean()) * (psi_x - psi.far_mean()) * self.tail_factor();
        Ok(0.5 * self.cfg.c_ds * outer + inner + tail)
    }

    /// Largest `|grad psi . n|` over boundary sample points.
    pub fn neumann_defect<T: Field + ?Sized>(&self, psi: &T) -> f64 {
        let d = self.domain.dim();
        let samples: Vec<Vec<f64>> = match self.domain {
            DomainShape::WholeSpace(_) => return 0.0,
            DomainShape::UnitBall(_) => self.sphere.dirs.clone(),
            DomainShape::HalfSpace(_) => {
                let ticks: Vec<f64> = (-8..=8).map(|i| 0.5 * i as f64).collect();
                let mut pts = vec![vec![0.0; d]];
                for a in 0..d - 1 {
                    pts = pts
                        .iter()
                        .flat_map(|p| {
                            ticks.iter().map(move |&t| {
                                let mut q = p.clone();
                                q[a] = t;
                                q
                            })
                        })
                        .collect();
                }
                pts
            }
        };
        samples
            .iter()
            .map(|p| {
                let n = self.domain.outward_normal(p).expect("boundary normal");
                let g = psi.gradient(p);
                g.iter().zip(&n).map(|(a, b)| a * b).sum::<f64>().abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn check_neumann<T: Field + ?Sized>(&self, psi: &T) -> Result<(), OperatorError> {
        if self.cfg.s >= 0.5 {
            let defect = self.neumann_defect(psi);
            if defect > NEUMANN_TOL {
                return Err(OperatorError::NeumannViolation(defect));
            }
        }
        Ok(())
    }

    /// `(-Delta)^s_SR psi (x)` after the Neumann compatibility check.
    pub fn apply<T: Field + ?Sized>(&self, psi: &T, x: &[f64]) -> Result<f64, OperatorError> {
        self.check_neumann(psi)?;
        self.check_point(x)?;
        self.apply_unchecked(psi, x)
    }

    fn check_point(&self, x: &[f64]) -> Result<(), OperatorError> {
        if x.len() != self.domain.dim() {
            return Err(crate::error::GeometryError::DimensionMismatch { expected: self.domain.dim(), got: x.len() }.into());
        }
        if !self.domain.contains(x) {
            return Err(crate::error::GeometryError::OutsideDomain.into());
        }
        Ok(())
    }

    /// `sum_q W_q phi(x_q) (Op psi)(x_q)`.
    pub fn pair_with_operator<A: Field + ?Sized, B: Field + ?Sized>(
        &self,
        phi: &A,
        psi: &B,
        rule: &SpatialRule,
    ) -> Result<f64, OperatorError> {
        self.check_neumann(psi)?;
        let parts: Result<Vec<f64>, OperatorError> = rule
            .points
            .par_iter()
            .zip(&rule.weights)
            .map(|(x, w)| self.apply_unchecked(psi, x).map(|v| w * phi.value(x) * v))
            .collect();
        Ok(parts?.iter().sum())
    }

    /// Bilinear form `B(phi, psi)` integrated with `rule`.
    pub fn bilinear<A: Field + ?Sized, B: Field + ?Sized>(
        &self,
        phi: &A,
        psi: &B,
        rule: &SpatialRule,
    ) -> Result<f64, OperatorError> {
        self.check_neumann(phi)?;
        self.check_neumann(psi)?;
        let parts: Result<Vec<f64>, OperatorError> = rule
            .points
            .par_iter()
            .zip(&rule.weights)
            .map(|(x, w)| self.energy_density_in(phi, psi, x, rule.region.as_ref()).map(|e| w * e))
            .collect();
        Ok(parts?.iter().sum())
    }
}

/// `(-Delta)^s psi (x)` on `R^d`.
pub fn apply_frac_laplacian<T: Field + ?Sized>(psi: &T, x: &[f64], cfg: &OperatorConfig) -> Result<f64, OperatorError> {
    SpecularOperator::new(DomainShape::WholeSpace(x.len()), *cfg)?.frac_laplacian(psi, x)
}

/// `(-Delta)^s_SR psi (x)` on `domain`.
pub fn apply_specular_op<T: Field + ?Sized>(
    domain: DomainShape,
    psi: &T,
    x: &[f64],
    cfg: &OperatorConfig,
) -> Result<f64, OperatorError> {
    SpecularOperator::new(domain, *cfg)?.apply(psi, x)
}

pub fn bilinear_form<A: Field + ?Sized, B: Field + ?Sized>(
    domain: DomainShape,
    phi: &A,
    psi: &B,
    cfg: &OperatorConfig,
    rule: &SpatialRule,
) -> Result<f64, OperatorError> {
    SpecularOperator::new(domain, *cfg)?.bilinear(phi, psi, rule)
}

/// `[psi]^2 = B(psi, psi)`.
pub fn sr_seminorm<T: Field + ?Sized>(
    domain: DomainShape,
    psi: &T,
    cfg: &OperatorConfig,
    rule: &SpatialRule,
) -> Result<f64, OperatorError> {
    bilinear_form(domain, psi, psi, cfg, rule)
}
