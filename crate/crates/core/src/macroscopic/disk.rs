//! Specular diffusion in the unit disk, in symmetric (energy) form.
//!
//! With polar nodes `x_i`, volumes `W_i`, the direction and radial rule of
//! the operator quadrature `(w_q, omega_q)` and bilinear polar interpolation
//! `u(eta(x_i, w_q)) ~ P_iq u`,
//! `B(u, u) = sum_i W_i [ (c/2) sum_q omega_q |w_q|^{-2-2s} (u_i - P_iq u)^2
//!            + (1/2) tau_i |G_i u|^2 ]`,
//! where `G_i` is a discrete gradient and `tau_i` the Taylor factor of the
//! inner ball. `M` is the matrix of `B`, so `M 1 = 0` and `M = M^T` hold by
//! construction.

use super::{AssembledOperator, HeatProblem, NodeLayout};
use crate::error::MacroError;
use crate::geometry::DomainShape;
use crate::operators::SpecularOperator;
use crate::quad::{insert_breaks, log_edges, Rule};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::TAU;

const RADIAL_ORDER: usize = 4;
const MAX_BREAKS: usize = 512;

/// Interpolation weights at `x` (at most four nodes); radially constant
/// inside the first ring and outside the last.
pub(super) fn polar_stencil(n_r: usize, n_theta: usize, x: &[f64]) -> Vec<(usize, f64)> {
    let dr = 1.0 / n_r as f64;
    let r = x[0].hypot(x[1]);
    let t = (r / dr - 0.5).clamp(0.0, (n_r - 1) as f64);
    let j0 = (t.floor() as usize).min(n_r.saturating_sub(2));
    let fr = t - j0 as f64;
    let th = x[1].atan2(x[0]).rem_euclid(TAU);
    let tau = (th / TAU * n_theta as f64 - 0.5).rem_euclid(n_theta as f64);
    let k0 = (tau.floor() as usize) % n_theta;
    let fk = tau - tau.floor();
    let k1 = (k0 + 1) % n_theta;
    let mut out = Vec::with_capacity(4);
    for (j, wr) in [(j0, 1.0 - fr), (j0 + 1, fr)] {
        if wr == 0.0 || j >= n_r {
            continue;
        }
        for (k, wk) in [(k0, 1.0 - fk), (k1, fk)] {
            if wk != 0.0 {
                out.push((j * n_theta + k, wr * wk));
            }
        }
    }
    out
}

/// Central-difference gradient stencil at node `(j, k)`: rows for the
/// radial and the angular component.
fn gradient_stencil(n_r: usize, n_theta: usize, j: usize, k: usize) -> [Vec<(usize, f64)>; 2] {
    let dr = 1.0 / n_r as f64;
    let dth = TAU / n_theta as f64;
    let r = (j as f64 + 0.5) * dr;
    let idx = |j: usize, k: usize| j * n_theta + k;
    let radial = if j == 0 {
        // the point across the centre is ring 0 at theta + pi
        vec![(idx(1, k), 0.5 / dr), (idx(0, (k + n_theta / 2) % n_theta), -0.5 / dr)]
    } else if j == n_r - 1 {
        // mirrored ghost ring outside the wall
        vec![(idx(j, k), 0.5 / dr), (idx(j - 1, k), -0.5 / dr)]
    } else {
        vec![(idx(j + 1, k), 0.5 / dr), (idx(j - 1, k), -0.5 / dr)]
    };
    let angular = vec![
        (idx(j, (k + 1) % n_theta), 0.5 / (r * dth)),
        (idx(j, (k + n_theta - 1) % n_theta), -0.5 / (r * dth)),
    ];
    [radial, angular]
}

fn add_outer(m: &mut [f64], n: usize, terms: &[(usize, f64)], weight: f64) {
    for (a, va) in terms {
        for (b, vb) in terms {
            m[a * n + b] += weight * va * vb;
        }
    }
}

pub(super) fn assemble(problem: &HeatProblem) -> Result<AssembledOperator, MacroError> {
    if problem.grid_n % 2 != 0 {
        return Err(MacroError::InvalidProblem("disk grid_n must be even".into()));
    }
    let n_r = problem.grid_n / 2;
    let n_theta = 2 * problem.grid_n;
    let n = n_r * n_theta;
    let dr = 1.0 / n_r as f64;
    let dth = TAU / n_theta as f64;
    let cfg = problem.cfg;
    let domain = DomainShape::UnitBall(2);
    let sop = SpecularOperator::new(domain, cfg)?;
    let rule = Rule::gauss_legendre(RADIAL_ORDER);
    let s = cfg.s;
    let area = sop.sphere().area();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in 0..n_r {
        let r = (j as f64 + 0.5) * dr;
        for k in 0..n_theta {
            let th = (k as f64 + 0.5) * dth;
            nodes.push(vec![r * th.cos(), r * th.sin()]);
            weights.push(r * dr * dth);
        }
    }
    let dense = (0..n)
        .into_par_iter()
        .with_min_len(32)
        .try_fold(
            || vec![0.0; n * n],
            |mut acc, i| -> Result<Vec<f64>, MacroError> {
                let x = &nodes[i];
                let rho0 = sop.inner_radius(x);
                let base = log_edges(rho0, cfg.r_trunc, cfg.n_radial / RADIAL_ORDER);
                let mut y = [0.0; 2];
                let mut terms: Vec<(usize, f64)> = Vec::with_capacity(5);
                for (dir, wd) in sop.sphere().dirs.iter().zip(&sop.sphere().weights) {
                    let breaks = domain.reflection_distances(x, dir, cfg.r_trunc, MAX_BREAKS);
                    let edges = if breaks.is_empty() { base.clone() } else { insert_breaks(&base, &breaks) };
                    for e in edges.windows(2) {
                        for (r, wr) in rule.mapped(e[0], e[1]) {
                            sop.eta_into(x, &[r * dir[0], r * dir[1]], &mut y)?;
                            terms.clear();
                            terms.push((i, 1.0));
                            for (node, w) in polar_stencil(n_r, n_theta, &y) {
                                terms.push((node, -w));
                            }
                            let k = 0.5 * cfg.c_ds * wd * wr * r.powf(-1.0 - 2.0 * s);
                            add_outer(&mut acc, n, &terms, weights[i] * k);
                        }
                    }
                }
                let tau = cfg.c_ds * area * rho0.powf(2.0 - 2.0 * s) / ((2.0 - 2.0 * s) * 2.0);
                let (j, k) = (i / n_theta, i % n_theta);
                for g in gradient_stencil(n_r, n_theta, j, k) {
                    add_outer(&mut acc, n, &g, weights[i] * 0.5 * tau);
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0.0; n * n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    let mut stiffness = DMatrix::from_row_slice(n, n, &dense);
    // rounding in the accumulation order; the exact form is symmetric
    stiffness = (&stiffness + stiffness.transpose()).scale(0.5);
    if stiffness.iter().any(|v| !v.is_finite()) {
        return Err(MacroError::AssemblyFailed("non-finite disk stiffness entry".into()));
    }
    Ok(AssembledOperator { nodes, weights, stiffness, layout: NodeLayout::Polar { n_r, n_theta } })
}
