//! Fractional Laplacian with zero exterior values on the lattice `h Z^d`
//! restricted to the unit ball (d = 1, 2).
//!
//! With `u` constant on lattice cells,
//! `(-Delta)^s u(x_i) ~ c h^{-2s} [T u_i - sum_{k != 0} w_k u_{i+k} - (M / 2d) Delta_h u_i]`
//! where `w_k` is the integral of `|z|^{-d-2s}` over the unit cell centred at
//! `k`, `T` the same integral over the complement of the centre cell, and
//! `M = int_{cell 0} |z|^{2-d-2s}` carries the second-order Taylor term of
//! the centre cell. Exterior nodes hold zero.

use super::{AssembledOperator, NodeLayout};
use crate::error::MacroError;
use crate::operators::normalization_constant;
use crate::quad::Rule;
use nalgebra::DMatrix;
use std::f64::consts::FRAC_PI_4;

/// Cell integrals on the unit lattice.
#[derive(Debug, Clone)]
pub struct LatticeWeights {
    pub dim: usize,
    pub s: f64,
    /// `w[|k_1|][|k_2|]` (d = 2) or `w[0][|k|]` (d = 1), up to `kmax`.
    pub w: Vec<Vec<f64>>,
    pub total: f64,
    pub second_moment: f64,
}

impl LatticeWeights {
    pub fn get(&self, k: &[i64]) -> f64 {
        match self.dim {
            1 => self.w[0][k[0].unsigned_abs() as usize],
            _ => self.w[k[0].unsigned_abs() as usize][k[1].unsigned_abs() as usize],
        }
    }
}

fn cell_integral_2d(a: f64, b: f64, s: f64, split: usize, rule: &Rule) -> f64 {
    let p = -(2.0 + 2.0 * s) / 2.0;
    let h = 1.0 / split as f64;
    let mut acc = 0.0;
    for i in 0..split {
        for j in 0..split {
            let (x0, y0) = (a - 0.5 + h * i as f64, b - 0.5 + h * j as f64);
            for (x, wx) in rule.mapped(x0, x0 + h) {
                for (y, wy) in rule.mapped(y0, y0 + h) {
                    acc += wx * wy * (x * x + y * y).powf(p);
                }
            }
        }
    }
    acc
}

/// Weights for offsets up to `kmax` in each coordinate.
pub fn lattice_weights(dim: usize, s: f64, kmax: usize) -> LatticeWeights {
    match dim {
        1 => {
            // int_{k-1/2}^{k+1/2} |z|^{-1-2s} dz
            let prim = |z: f64| -z.powf(-2.0 * s) / (2.0 * s);
            let w = (0..=kmax)
                .map(|k| if k == 0 { 0.0 } else { prim(k as f64 + 0.5) - prim(k as f64 - 0.5) })
                .collect();
            LatticeWeights {
                dim,
                s,
                w: vec![w],
                total: 2.0 * 0.5f64.powf(-2.0 * s) / (2.0 * s),
                second_moment: 2.0 * 0.5f64.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s),
            }
        }
        _ => {
            let rule = Rule::gauss_legendre(8);
            let w: Vec<Vec<f64>> = (0..=kmax)
                .map(|a| {
                    (0..=kmax)
                        .map(|b| match a.max(b) {
                            0 => 0.0,
                            1 | 2 => cell_integral_2d(a as f64, b as f64, s, 4, &rule),
                            _ => cell_integral_2d(a as f64, b as f64, s, 1, &rule),
                        })
                        .collect()
                })
                .collect();
            // the centre square in polar form, r_sq(theta) = 1 / (2 cos theta)
            let ang = Rule::gauss_legendre(24);
            let total = 8.0 * ang.integrate(0.0, FRAC_PI_4, |t| (0.5 / t.cos()).powf(-2.0 * s) / (2.0 * s));
            let second_moment =
                8.0 * ang.integrate(0.0, FRAC_PI_4, |t| (0.5 / t.cos()).powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s));
            LatticeWeights { dim, s, w, total, second_moment }
        }
    }
}

pub(super) fn assemble(dim: usize, s: f64, grid_n: usize) -> Result<AssembledOperator, MacroError> {
    let h = 2.0 / grid_n as f64;
    let m = grid_n / 2 + 1;
    let side = 2 * m + 1;
    let cells = side.pow(dim as u32);
    let mut index = vec![None; cells];
    let mut coords: Vec<Vec<i64>> = Vec::new();
    for flat in 0..cells {
        let k: Vec<i64> = match dim {
            1 => vec![flat as i64 - m as i64],
            _ => vec![(flat / side) as i64 - m as i64, (flat % side) as i64 - m as i64],
        };
        let r2: f64 = k.iter().map(|c| (h * *c as f64).powi(2)).sum();
        if r2 < 1.0 - 1e-12 {
            index[flat] = Some(coords.len());
            coords.push(k);
        }
    }
    let n = coords.len();
    let lw = lattice_weights(dim, s, 2 * m);
    let c = normalization_constant(dim, s)?;
    let scale = c * h.powf(-2.0 * s);
    let vol = h.powi(dim as i32);
    let nb = lw.second_moment / (2.0 * dim as f64);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = lw.total + lw.second_moment;
        for j in 0..n {
            if i == j {
                continue;
            }
            let diff: Vec<i64> = coords[j].iter().zip(&coords[i]).map(|(p, q)| p - q).collect();
            let mut v = -lw.get(&diff);
            if diff.iter().map(|d| d.abs()).sum::<i64>() == 1 {
                v -= nb;
            }
            a[(i, j)] = v;
        }
    }
    let stiffness = a.scale(scale * vol);
    if stiffness.iter().any(|v| !v.is_finite()) {
        return Err(MacroError::AssemblyFailed("non-finite lattice weight".into()));
    }
    Ok(AssembledOperator {
        nodes: coords.iter().map(|k| k.iter().map(|c| h * *c as f64).collect()).collect(),
        weights: vec![vol; n],
        stiffness,
        layout: NodeLayout::Lattice { h, m, index },
    })
}

/// Multilinear interpolation on the lattice with zero exterior values.
pub(super) fn interpolate(h: f64, m: usize, index: &[Option<usize>], u: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    let side = 2 * m + 1;
    let mut base = [0i64; 2];
    let mut frac = [0.0; 2];
    for a in 0..d {
        let t = x[a] / h + m as f64;
        let i = t.floor();
        base[a] = i as i64;
        frac[a] = t - i;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << d) {
        let mut w = 1.0;
        let mut flat = 0i64;
        let mut inside = true;
        for a in 0..d {
            let bit = ((corner >> a) & 1) as i64;
            let i = base[a] + bit;
            inside &= (0..side as i64).contains(&i);
            w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            flat = flat * side as i64 + i;
        }
        if inside && w != 0.0 {
            if let Some(node) = index[flat as usize] {
                acc += w * u[node];
            }
        }
    }
    acc
}
