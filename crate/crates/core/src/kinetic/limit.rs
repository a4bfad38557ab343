//! Comparison of kinetic densities with the macroscopic limit along a
//! ladder of `eps`.

use super::density::{density, CellLayout, HistogramGrid};
use super::ensemble::{init_ensemble, step, BoundaryCondition, InitialLaw};
use crate::error::KineticError;
use crate::geometry::DomainShape;
use crate::macroscopic::{
    assemble_operator, halfspace_1d_reference_from, solve_with, AssembledOperator, BcKind, HeatProblem, NodeLayout,
    TimeMethod,
};
use crate::operators::GridFunction;
use crate::quad::Rule;

#[derive(Debug, Clone, PartialEq)]
pub struct LimitStudyConfig {
    pub domain: DomainShape,
    pub bc: BoundaryCondition,
    pub s: f64,
    pub rho_in: InitialLaw,
    pub eps_list: Vec<f64>,
    pub t_final: f64,
    /// Kinetic time step (macroscopic units).
    pub dt: f64,
    pub n: usize,
    pub grid: HistogramGrid,
    pub seed: u64,
    /// Macro solver resolution (`HeatProblem::grid_n`).
    pub macro_grid_n: usize,
    /// Macro time step.
    pub macro_dt: f64,
}

impl LimitStudyConfig {
    /// Specular half-line, `s = 0.75`, `rho_in` uniform on `[0, 1]`,
    /// histogram of 64 cells on `[0, 4]`.
    pub fn half_line_specular() -> Self {
        LimitStudyConfig {
            domain: DomainShape::HalfSpace(1),
            bc: BoundaryCondition::Specular,
            s: 0.75,
            rho_in: InitialLaw::UniformBox { lo: vec![0.0], hi: vec![1.0] },
            eps_list: vec![0.4, 0.2, 0.1, 0.05],
            t_final: 0.5,
            dt: 1e-3,
            n: 200_000,
            grid: HistogramGrid::Interval { lo: 0.0, hi: 4.0, n: 64 },
            seed: 20_240_601,
            macro_grid_n: 64,
            macro_dt: 1e-3,
        }
    }

    /// Absorbing unit disk, `s = 0.5`, `rho_in` uniform, 32 x 32 histogram.
    pub fn disk_absorbing() -> Self {
        LimitStudyConfig {
            domain: DomainShape::UnitBall(2),
            bc: BoundaryCondition::Absorb,
            s: 0.5,
            rho_in: InitialLaw::UniformBall { center: vec![0.0, 0.0], radius: 1.0 },
            grid: HistogramGrid::DiskCartesian { n: 32 },
            macro_grid_n: 64,
            ..Self::half_line_specular()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub eps: f64,
    /// `sqrt(sum (rho_eps - rho)^2 |cell|)`.
    pub l2_error: f64,
    /// Expected error of an exact sampler with the same `n` (Monte Carlo floor).
    pub mc_stderr: f64,
    /// Alive fraction at `T`.
    pub mass: f64,
}

impl InitialLaw {
    /// Density of the law at `x` (zero for a point mass).
    pub fn density(&self, x: &[f64]) -> f64 {
        match self {
            InitialLaw::UniformBox { lo, hi } => {
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(t, (a, b))| *t >= *a && *t <= *b);
                let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
                if inside { 1.0 / vol } else { 0.0 }
            }
            InitialLaw::UniformBall { center, radius } => {
                let d = center.len() as i32;
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
                let vol = match d {
                    1 => 2.0 * radius,
                    2 => std::f64::consts::PI * radius * radius,
                    _ => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
                };
                if r2 <= radius * radius { 1.0 / vol } else { 0.0 }
            }
            InitialLaw::Point(_) => 0.0,
        }
    }
}

/// Node values of the density of `law`: exact cell averages on the
/// half-line, point values elsewhere.
pub fn initial_node_values(op: &AssembledOperator, law: &InitialLaw) -> Vec<f64> {
    match (&op.layout, law) {
        (NodeLayout::HalfLine { h, .. }, InitialLaw::UniformBox { lo, hi }) => op
            .nodes
            .iter()
            .map(|x| {
                let (a, b) = (x[0] - 0.5 * h, x[0] + 0.5 * h);
                let overlap = (b.min(hi[0]) - a.max(lo[0])).max(0.0);
                overlap / h / (hi[0] - lo[0])
            })
            .collect(),
        _ => op.nodes.iter().map(|x| law.density(x)).collect(),
    }
}

/// Average of the interpolated node values over each histogram cell.
pub fn cell_averages(op: &AssembledOperator, u: &[f64], layout: &CellLayout, domain: DomainShape) -> Vec<f64> {
    let rule = Rule::gauss_legendre(4);
    layout
        .bounds
        .iter()
        .map(|(lo, hi)| {
            let mut acc = 0.0;
            let mut wsum = 0.0;
            match lo.len() {
                1 => {
                    for (x, w) in rule.mapped(lo[0], hi[0]) {
                        acc += w * op.interpolate(u, &[x]);
                        wsum += w;
                    }
                }
                _ => {
                    for (x, wx) in rule.mapped(lo[0], hi[0]) {
                        for (y, wy) in rule.mapped(lo[1], hi[1]) {
                            if domain.contains(&[x, y]) {
                                acc += wx * wy * op.interpolate(u, &[x, y]);
                                wsum += wx * wy;
                            }
                        }
                    }
                }
            }
            if wsum > 0.0 { acc / wsum } else { 0.0 }
        })
        .collect()
}

/// The macroscopic density at `T`, averaged over the histogram cells.
pub fn macro_reference(cfg: &LimitStudyConfig) -> Result<Vec<f64>, KineticError> {
    let bc = match cfg.bc {
        BoundaryCondition::Absorb => BcKind::DirichletExterior,
        BoundaryCondition::Specular => BcKind::Specular,
    };
    let dim = cfg.domain.dim();
    let placeholder = GridFunction { lo: vec![0.0; dim], h: vec![1.0; dim], shape: vec![1; dim], values: vec![0.0] };
    let mut problem = HeatProblem::new(cfg.domain, bc, cfg.s, placeholder, cfg.t_final)?;
    problem.grid_n = cfg.macro_grid_n;
    problem.dt = cfg.macro_dt;
    problem.snapshot_every = usize::MAX;
    let layout = cfg.grid.layout();
    let (op, u) = if let (DomainShape::HalfSpace(1), BcKind::Specular) = (cfg.domain, bc) {
        // spectral mirror route with exact time integration
        problem.method = TimeMethod::Exponential;
        problem.extent = 64.0;
        let op = half_line_nodes(&problem);
        let sol = halfspace_1d_reference_from(&problem, initial_node_values(&op, &cfg.rho_in))?;
        let u = sol.last().to_vec();
        (op, u)
    } else {
        let op = assemble_operator(&problem)?;
        let sol = solve_with(&op, &problem, initial_node_values(&op, &cfg.rho_in))?;
        let u = sol.last().to_vec();
        (op, u)
    };
    Ok(cell_averages(&op, &u, &layout, cfg.domain))
}

fn half_line_nodes(problem: &HeatProblem) -> AssembledOperator {
    let h = 1.0 / problem.grid_n as f64;
    let n = (problem.extent * problem.grid_n as f64).round() as usize;
    AssembledOperator {
        nodes: (0..n).map(|i| vec![(i as f64 + 0.5) * h]).collect(),
        weights: vec![h; n],
        stiffness: nalgebra::DMatrix::zeros(0, 0),
        layout: NodeLayout::HalfLine { h, n },
    }
}

/// Runs the kinetic model for every `eps` and reports the L² distance of
/// the histogram at `T` to the macroscopic density.
pub fn limit_study(cfg: &LimitStudyConfig) -> Result<Vec<LimitRow>, KineticError> {
    limit_study_with(cfg, |_, _| {})
}

/// [`limit_study`] with a progress callback `(eps, row)`.
pub fn limit_study_with<P: FnMut(f64, &LimitRow)>(cfg: &LimitStudyConfig, mut progress: P) -> Result<Vec<LimitRow>, KineticError> {
    if cfg.eps_list.is_empty() {
        return Err(KineticError::InvalidParams("eps_list is empty".into()));
    }
    if !(cfg.dt > 0.0) || !(cfg.t_final > 0.0) {
        return Err(KineticError::InvalidParams("dt and T must be positive".into()));
    }
    let reference = macro_reference(cfg)?;
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let mut rows = Vec::with_capacity(cfg.eps_list.len());
    for (k, &eps) in cfg.eps_list.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(k as u64);
        let mut ens = init_ensemble(cfg.n, &cfg.rho_in, cfg.domain, cfg.s, eps, seed)?;
        for _ in 0..steps {
            step(&mut ens, cfg.dt, cfg.domain, cfg.bc)?;
        }
        let dens = density(&ens, &cfg.grid)?;
        let row = LimitRow { eps, l2_error: dens.l2_distance(&reference), mc_stderr: dens.mc_floor(), mass: dens.mass };
        progress(eps, &row);
        rows.push(row);
    }
    Ok(rows)
}
