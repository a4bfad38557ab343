//! Deterministic solvers for the limiting fractional heat equations: the
//! Dirichlet-exterior problem, and the specular problem in the half-line
//! and in the disk.
//!
//! Every assembly produces node volumes `W` and a symmetric stiffness
//! matrix `M = W A`, where `A` approximates the operator on node values.
//! Time stepping uses the weak form `W du/dt = -M u`.

mod disk;
mod halfline;
mod lattice;

pub use halfline::{halfspace_1d_reference, halfspace_1d_reference_from, HALFLINE_TAIL_PERIODS};
pub use lattice::{lattice_weights, LatticeWeights};

use crate::error::MacroError;
use crate::geometry::DomainShape;
use crate::operators::{Field, GridFunction, OperatorConfig};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    /// Fractional Laplacian with zero exterior values.
    DirichletExterior,
    /// Specular diffusion operator.
    Specular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMethod {
    /// `(W + dt M) u^{n+1} = W u^n`.
    ImplicitEuler,
    /// `u^{n+1} = exp(-dt A) u^n` through a symmetric eigendecomposition.
    Exponential,
}

#[derive(Debug, Clone)]
pub struct HeatProblem {
    pub domain: DomainShape,
    pub bc: BcKind,
    pub s: f64,
    /// Initial data, sampled at the solver nodes by interpolation.
    pub rho_in: GridFunction,
    pub t_final: f64,
    pub dt: f64,
    /// Quadrature used by the disk specular assembly.
    pub cfg: OperatorConfig,
    /// Nodes per unit length on the half-line, nodes across the diameter
    /// for the ball lattice, and twice the ring count for the polar disk.
    pub grid_n: usize,
    /// Truncation length of the half-line (reflecting at both ends).
    pub extent: f64,
    pub method: TimeMethod,
    /// Keep every `snapshot_every`-th step (the final step is always kept).
    pub snapshot_every: usize,
}

impl HeatProblem {
    /// Problem with default discretisation: `dt = 1e-3`, `grid_n = 32`,
    /// half-line extent 32, implicit Euler, snapshots every step.
    pub fn new(domain: DomainShape, bc: BcKind, s: f64, rho_in: GridFunction, t_final: f64) -> Result<Self, MacroError> {
        let cfg = OperatorConfig { n_angular: 32, n_radial: 96, ..OperatorConfig::new(domain.dim().max(1), s)? };
        let p = HeatProblem {
            domain,
            bc,
            s,
            rho_in,
            t_final,
            dt: 1e-3,
            cfg,
            grid_n: 32,
            extent: 32.0,
            method: TimeMethod::ImplicitEuler,
            snapshot_every: 1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MacroError> {
        let bad = |m: String| Err(MacroError::InvalidProblem(m));
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s = {} must be in (0, 1)", self.s));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad("dt must be positive and T non-negative".into());
        }
        if self.grid_n < 16 {
            return bad(format!("grid_n = {} is below 16", self.grid_n));
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be positive".into());
        }
        if self.rho_in.dim() != self.domain.dim() {
            return bad("initial data dimension does not match the domain".into());
        }
        if self.rho_in.values.iter().any(|v| !(*v >= 0.0)) {
            return bad("initial data must be non-negative".into());
        }
        match (self.domain, self.bc) {
            (DomainShape::UnitBall(1 | 2), BcKind::DirichletExterior) => {}
            (DomainShape::HalfSpace(1), BcKind::Specular) => {
                if !(self.extent > 0.0) || (self.extent * self.grid_n as f64).round() < 4.0 {
                    return bad("half-line extent too small".into());
                }
            }
            (DomainShape::UnitBall(2), BcKind::Specular) => {
                self.cfg.validate()?;
            }
            (d, b) => return bad(format!("no solver for {b:?} on {d:?}")),
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Node arrangement, used for interpolation of node values.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeLayout {
    /// Nodes `h k` of the lattice inside the ball; `index` maps the box
    /// `[-m, m]^d` (row-major) to node numbers.
    Lattice { h: f64, m: usize, index: Vec<Option<usize>> },
    /// Cell-centred nodes `(i + 1/2) h`, `i < n`.
    HalfLine { h: f64, n: usize },
    /// Polar nodes `((j + 1/2) dr, (k + 1/2) dtheta)`, ring-major.
    Polar { n_r: usize, n_theta: usize },
}

/// Discretised operator.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    pub nodes: Vec<Vec<f64>>,
    /// Node volumes `W`.
    pub weights: Vec<f64>,
    /// Symmetric `M = W A`.
    pub stiffness: DMatrix<f64>,
    pub layout: NodeLayout,
}

impl AssembledOperator {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The operator on node values, `A = W^{-1} M`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut a = self.stiffness.clone();
        for (i, w) in self.weights.iter().enumerate() {
            a.row_mut(i).scale_mut(1.0 / w);
        }
        a
    }

    /// `||W A - (W A)^T|| / ||W A||` in the Frobenius norm.
    pub fn symmetry_residual(&self) -> f64 {
        (&self.stiffness - self.stiffness.transpose()).norm() / self.stiffness.norm()
    }

    pub fn mass(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// `sqrt(sum W u^2)`.
    pub fn l2(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.weights).map(|(a, w)| a * a * w).sum::<f64>().sqrt()
    }

    /// Samples `f` at the nodes.
    pub fn sample<T: Field + ?Sized>(&self, f: &T) -> Vec<f64> {
        self.nodes.iter().map(|x| f.value(x)).collect()
    }

    /// Interpolates node values at `x`; zero outside the domain.
    pub fn interpolate(&self, u: &[f64], x: &[f64]) -> f64 {
        match &self.layout {
            NodeLayout::HalfLine { h, n } => {
                if x[0] < 0.0 {
                    return 0.0;
                }
                let t = (x[0] / h - 0.5).clamp(0.0, (*n - 1) as f64);
                let i = (t.floor() as usize).min(n - 2);
                let f = t - i as f64;
                (1.0 - f) * u[i] + f * u[i + 1]
            }
            NodeLayout::Lattice { h, m, index } => lattice::interpolate(*h, *m, index, u, x),
            NodeLayout::Polar { n_r, n_theta } => {
                if x[0].hypot(x[1]) > 1.0 {
                    return 0.0;
                }
                disk::polar_stencil(*n_r, *n_theta, x).iter().map(|(i, w)| w * u[*i]).sum()
            }
        }
    }
}

/// Assembles the dense operator for `problem`.
pub fn assemble_operator(problem: &HeatProblem) -> Result<AssembledOperator, MacroError> {
    problem.validate()?;
    match (problem.domain, problem.bc) {
        (DomainShape::UnitBall(d), BcKind::DirichletExterior) => lattice::assemble(d, problem.s, problem.grid_n),
        (DomainShape::HalfSpace(1), BcKind::Specular) => halfline::assemble(problem),
        (DomainShape::UnitBall(2), BcKind::Specular) => disk::assemble(problem),
        _ => unreachable!("rejected by validate"),
    }
}

/// Snapshots of the node values.
#[derive(Debug, Clone)]
pub struct HeatSolution {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl HeatSolution {
    pub fn last(&self) -> &[f64] {
        self.values.last().expect("solution has at least the initial snapshot")
    }
}

/// Assembles and solves `problem`.
pub fn solve(problem: &HeatProblem) -> Result<(AssembledOperator, HeatSolution), MacroError> {
    let op = assemble_operator(problem)?;
    let sol = solve_with(&op, problem, op.sample(&problem.rho_in))?;
    Ok((op, sol))
}

/// Time-steps `u0` with a pre-assembled operator.
pub fn solve_with(op: &AssembledOperator, problem: &HeatProblem, u0: Vec<f64>) -> Result<HeatSolution, MacroError> {
    let n = op.len();
    if u0.len() != n {
        return Err(MacroError::InvalidProblem(format!("expected {n} initial values, got {}", u0.len())));
    }
    let steps = problem.n_steps();
    let mut times = vec![0.0];
    let mut values = vec![u0.clone()];
    let mut keep = |k: usize, u: &DVector<f64>| {
        if k % problem.snapshot_every == 0 || k == steps {
            times.push(k as f64 * problem.dt);
            values.push(u.as_slice().to_vec());
        }
    };
    let w = DVector::from_column_slice(&op.weights);
    let mut u = DVector::from_vec(u0);
    match problem.method {
        TimeMethod::ImplicitEuler => {
            let mut lhs = op.stiffness.scale(problem.dt);
            for i in 0..n {
                lhs[(i, i)] += w[i];
            }
            let chol = lhs
                .cholesky()
                .ok_or_else(|| MacroError::LinearSolveFailed("W + dt M is not positive definite".into()))?;
            for k in 1..=steps {
                let rhs = u.component_mul(&w);
                u = chol.solve(&rhs);
                keep(k, &u);
            }
        }
        TimeMethod::Exponential => {
            let sq = w.map(f64::sqrt);
            let mut sym = op.stiffness.clone();
            for i in 0..n {
                for j in 0..n {
                    sym[(i, j)] /= sq[i] * sq[j];
                }
            }
            let eig = sym.symmetric_eigen();
            if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
                return Err(MacroError::LinearSolveFailed("eigendecomposition failed".into()));
            }
            let decay = eig.eigenvalues.map(|l| (-problem.dt * l.max(0.0)).exp());
            let v = &eig.eigenvectors;
            let mut c = v.tr_mul(&u.component_mul(&sq));
            for k in 1..=steps {
                c.component_mul_assign(&decay);
                u = (v * &c).component_div(&sq);
                keep(k, &u);
            }
        }
    }
    Ok(HeatSolution { times, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Constant, FnField};

    fn grid(dim: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> GridFunction {
        let (lo, h, shape) = match dim {
            1 => (vec![-1.0], vec![1.0 / 256.0], vec![40 * 256 + 1]),
            _ => (vec![-1.0, -1.0], vec![1.0 / 64.0, 1.0 / 64.0], vec![129, 129]),
        };
        GridFunction::sample(&FnField::new(dim, f), lo, h, shape)
    }

    #[test]
    fn unsupported_combinations_are_rejected() {
        let g = grid(1, |_| 1.0);
        assert!(HeatProblem::new(DomainShape::HalfSpace(1), BcKind::DirichletExterior, 0.5, g, 0.1).is_err());
    }

    #[test]
    fn constants_are_steady_on_the_half_line() {
        let g = GridFunction::sample(&Constant { dim: 1, value: 2.5 }, vec![0.0], vec![1.0], vec![2]);
        let mut p = HeatProblem::new(DomainShape::HalfSpace(1), BcKind::Specular, 0.6, g, 0.05).unwrap();
        p.extent = 4.0;
        let (op, sol) = solve(&p).unwrap();
        for u in &sol.values {
            assert!(u.iter().all(|v| (v - 2.5).abs() < 1e-10));
        }
        assert!(op.symmetry_residual() < 1e-12);
    }

    #[test]
    fn dirichlet_mass_decays_and_methods_agree() {
        let g = grid(1, |x| (1.0 - x[0] * x[0]).max(0.0));
        let mut p = HeatProblem::new(DomainShape::UnitBall(1), BcKind::DirichletExterior, 0.4, g, 0.2).unwrap();
        p.dt = 1e-4;
        let (op, a) = solve(&p).unwrap();
        for pair in a.values.windows(2) {
            assert!(op.mass(&pair[1]) < op.mass(&pair[0]));
        }
        p.method = TimeMethod::Exponential;
        let (_, b) = solve(&p).unwrap();
        let diff: f64 = a.last().iter().zip(b.last()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 2e-3 * b.last().iter().cloned().fold(0.0, f64::max), "{diff}");
    }
}
