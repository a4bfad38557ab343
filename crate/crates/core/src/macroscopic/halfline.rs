//! Specular diffusion on the half-line through the even extension.
//!
//! Both routes work with cell-centred nodes `(i + 1/2) h` on `[0, X]`,
//! extended evenly about 0 and periodically with period `2X`. The
//! quadrature route writes
//! `(-Delta)^s u(x) = c int_0^inf (2u(x) - u(x+y) - u(x-y)) y^{-1-2s} dy`,
//! sets `D(y) = y^2 G(y)`, integrates the piecewise-linear interpolant of `G`
//! against `y^{1-2s}` exactly up to `Y`, and replaces `u` by its mean
//! beyond. The reference route applies the symbol `|xi|^{2s}` by FFT.

use super::{AssembledOperator, HeatProblem, HeatSolution, NodeLayout, TimeMethod};
use crate::error::MacroError;
use crate::operators::{apply_multiplier, normalization_constant, Field};
use nalgebra::DMatrix;

/// The quadrature extends to `Y = HALFLINE_TAIL_PERIODS * 2X`.
pub const HALFLINE_TAIL_PERIODS: usize = 4;

/// Node index of lattice position `m` (node at `(m + 1/2) h`) after the
/// even and periodic folding.
fn fold(m: i64, n: usize) -> usize {
    let p = 2 * n as i64;
    let r = m.rem_euclid(p) as usize;
    if r < n {
        r
    } else {
        2 * n - 1 - r
    }
}

fn grid(problem: &HeatProblem) -> (f64, usize) {
    let h = 1.0 / problem.grid_n as f64;
    (h, (problem.extent * problem.grid_n as f64).round() as usize)
}

pub(super) fn assemble(problem: &HeatProblem) -> Result<AssembledOperator, MacroError> {
    let s = problem.s;
    let (h, n) = grid(problem);
    let c = normalization_constant(1, s)?;
    let jmax = HALFLINE_TAIL_PERIODS * 2 * n;
    let y_max = jmax as f64 * h;
    let p = 1.0 - 2.0 * s;
    // a[j]: weight of G_j in int_0^Y G(y) y^p dy for piecewise-linear G
    let mut a = vec![0.0; jmax + 1];
    let m0 = |l: f64, r: f64| (r.powf(p + 1.0) - l.powf(p + 1.0)) / (p + 1.0);
    let m1 = |l: f64, r: f64| (r.powf(p + 2.0) - l.powf(p + 2.0)) / (p + 2.0);
    for j in 0..jmax {
        let (l, r) = (j as f64 * h, (j + 1) as f64 * h);
        let (i0, i1) = (m0(l, r), m1(l, r));
        a[j] += (r * i0 - i1) / h;
        a[j + 1] += (i1 - l * i0) / h;
    }
    let tail = 2.0 * y_max.powf(-2.0 * s) / (2.0 * s);
    let mut op = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let ii = i as i64;
        let mut row = vec![0.0; n];
        // G_0 = -u''(x_i), fourth-order stencil
        let st = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];
        for (off, w) in st {
            row[fold(ii + off, n)] -= a[0] * w / (12.0 * h * h);
        }
        for (j, aj) in a.iter().enumerate().skip(1) {
            let k = aj / (j as f64 * h).powi(2);
            row[i] += 2.0 * k;
            row[fold(ii + j as i64, n)] -= k;
            row[fold(ii - j as i64, n)] -= k;
        }
        row[i] += tail;
        for r in row.iter_mut() {
            *r -= tail / n as f64;
        }
        for (col, v) in row.into_iter().enumerate() {
            op[(i, col)] = c * v;
        }
    }
    // the folded sums are symmetric up to rounding; symmetrise exactly
    let stiffness = (&op + op.transpose()).scale(0.5 * h);
    Ok(AssembledOperator {
        nodes: (0..n).map(|i| vec![(i as f64 + 0.5) * h]).collect(),
        weights: vec![h; n],
        stiffness,
        layout: NodeLayout::HalfLine { h, n },
    })
}

/// Spectral solution on the mirror-extended periodic line, restricted to
/// the half-line nodes. Time stepping follows `problem.method`: implicit
/// Euler multiplies each mode by `(1 + dt |xi|^{2s})^{-1}` per step, the
/// exponential method by `exp(-dt |xi|^{2s})`.
pub fn halfspace_1d_reference(problem: &HeatProblem) -> Result<HeatSolution, MacroError> {
    problem.validate()?;
    if problem.domain.dim() != 1 || problem.bc != super::BcKind::Specular {
        return Err(MacroError::InvalidProblem("reference route needs the specular half-line".into()));
    }
    let (h, n) = grid(problem);
    let u0: Vec<f64> = (0..n).map(|i| problem.rho_in.value(&[(i as f64 + 0.5) * h])).collect();
    halfspace_1d_reference_from(problem, u0)
}

/// [`halfspace_1d_reference`] started from explicit node values.
pub fn halfspace_1d_reference_from(problem: &HeatProblem, u0: Vec<f64>) -> Result<HeatSolution, MacroError> {
    let (h, n) = grid(problem);
    if u0.len() != n {
        return Err(MacroError::InvalidProblem(format!("expected {n} initial values, got {}", u0.len())));
    }
    let period = 2.0 * n as f64 * h;
    let even: Vec<f64> = (0..2 * n).map(|m| u0[fold(m as i64, n)]).collect();
    let two_s = 2.0 * problem.s;
    let dt = problem.dt;
    let steps = problem.n_steps();
    let mut times = vec![0.0];
    let mut values = vec![u0];
    for k in 1..=steps {
        if k % problem.snapshot_every != 0 && k != steps {
            continue;
        }
        let t = k as f64 * dt;
        let ext = match problem.method {
            TimeMethod::ImplicitEuler => apply_multiplier(&even, period, |xi| (1.0 + dt * xi.powf(two_s)).powi(-(k as i32))),
            TimeMethod::Exponential => apply_multiplier(&even, period, |xi| (-t * xi.powf(two_s)).exp()),
        };
        times.push(t);
        values.push(ext[..n].to_vec());
    }
    Ok(HeatSolution { times, values })
}
