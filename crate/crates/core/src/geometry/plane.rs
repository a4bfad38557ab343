//! Reduction of a ball trajectory to the plane spanned by `x` and `v`.

use super::{dot, norm};

/// Orthonormal pair spanning the trajectory plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneBasis {
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
}

impl PlaneBasis {
    /// Maps planar coordinates back to `R^d`.
    pub fn lift(&self, p: &[f64]) -> Vec<f64> {
        self.e1.iter().zip(&self.e2).map(|(a, b)| p[0] * a + p[1] * b).collect()
    }

    pub fn project(&self, y: &[f64]) -> [f64; 2] {
        [dot(y, &self.e1), dot(y, &self.e2)]
    }

    /// Distance from `y` to the plane.
    pub fn residual(&self, y: &[f64]) -> f64 {
        let q = self.lift(&self.project(y));
        y.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

fn orthonormal_against(e1: &[f64], u: &[f64]) -> Option<Vec<f64>> {
    let p = dot(u, e1);
    let w: Vec<f64> = u.iter().zip(e1).map(|(a, b)| a - p * b).collect();
    let n = norm(&w);
    (n > 1e-12 * norm(u).max(1e-300)).then(|| w.iter().map(|c| c / n).collect())
}

/// Planar coordinates of `(x, v)` and the basis used. In `d = 2` the basis is
/// the standard one; when `x` and `v` are colinear any completion is used.
pub fn plane_reduction(x: &[f64], v: &[f64]) -> ([f64; 2], [f64; 2], PlaneBasis) {
    let d = x.len();
    let basis = if d == 2 {
        PlaneBasis { e1: vec![1.0, 0.0], e2: vec![0.0, 1.0] }
    } else {
        let (nx, nv) = (norm(x), norm(v));
        let (first, second) = if nx > 0.0 { (x, v) } else { (v, x) };
        let e1: Vec<f64> = if nx > 0.0 || nv > 0.0 {
            let n = norm(first);
            first.iter().map(|c| c / n).collect()
        } else {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        };
        let e2 = orthonormal_against(&e1, second).unwrap_or_else(|| {
            // colinear input: complete with the least aligned coordinate axis
            let i = (0..d).min_by(|&a, &b| e1[a].abs().total_cmp(&e1[b].abs())).unwrap();
            let mut u = vec![0.0; d];
            u[i] = 1.0;
            orthonormal_against(&e1, &u).expect("axis completion")
        });
        PlaneBasis { e1, e2 }
    };
    (basis.project(x), basis.project(v), basis)
}
