//! The weighted `L^2(F^{-1})` norm of the phase-space density, estimated
//! from the ensemble on cells that are equiprobable under `F` in velocity.

use super::density::HistogramGrid;
use super::ensemble::ParticleEnsemble;
use crate::error::KineticError;
use crate::geometry::norm;
use crate::rng::aux_stream;
use crate::stable::{draw_stable_into, EquilibriumSpec};
use rand::Rng;
use rand_distr::Poisson;
use std::collections::HashMap;

/// Reference sample size used to place the velocity cell edges.
pub const REFERENCE_SAMPLES: usize = 400_000;
pub const L2_BOOTSTRAP_ROUNDS: usize = 200;

/// Phase-space cell layout for [`weighted_l2`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub space: HistogramGrid,
    /// Number of equiprobable velocity shells (or quantile bins when d = 1).
    pub n_speed: usize,
    /// Number of equal angular sectors (d = 2 only).
    pub n_angle: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedL2 {
    /// Estimate of `int int f^2 / F dx dv`.
    pub value: f64,
    /// Bootstrap standard error.
    pub stderr: f64,
}

/// Velocity cell edges: quantiles of `v` (d = 1) or of `|v|` (d = 2).
fn velocity_edges(s: f64, dim: usize, n_speed: usize, seed: u64) -> Result<Vec<f64>, KineticError> {
    let params = EquilibriumSpec::new(s, dim)?.params();
    let mut rng = aux_stream(seed, 0x7765_6967_6874);
    let mut buf = [0.0f64; 3];
    let mut xs: Vec<f64> = (0..REFERENCE_SAMPLES)
        .map(|_| {
            draw_stable_into(&params, &mut rng, &mut buf[..dim]);
            if dim == 1 { buf[0] } else { norm(&buf[..dim]) }
        })
        .collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    Ok((1..n_speed).map(|k| xs[k * xs.len() / n_speed]).collect())
}

fn velocity_cell(v: &[f64], edges: &[f64], n_angle: usize) -> usize {
    let key = if v.len() == 1 { v[0] } else { norm(v) };
    let shell = edges.partition_point(|e| *e <= key);
    if v.len() == 1 {
        return shell;
    }
    let phi = v[1].atan2(v[0]) + std::f64::consts::PI;
    let sector = ((phi / std::f64::consts::TAU * n_angle as f64) as usize).min(n_angle - 1);
    shell * n_angle + sector
}

/// Estimates `int int f^2 / F dx dv` with `f` the empirical phase-space
/// density (normalised to the initial particle count). Each phase cell
/// `(i, j)` of spatial volume `|X_i|` and `F`-mass `q_j` contributes
/// `p_ij^2 / (|X_i| q_j)`; `p_ij^2` is estimated without bias by
/// `c (c - 1) / (N (N - 1))`. The error bar is a Poisson bootstrap.
pub fn weighted_l2(ens: &ParticleEnsemble, grid: &PhaseGrid) -> Result<WeightedL2, KineticError> {
    if ens.dim > 2 || grid.space.dim() != ens.dim {
        return Err(KineticError::InvalidParams("weighted_l2 supports d = 1, 2 with a matching grid".into()));
    }
    if grid.n_speed == 0 || (ens.dim == 2 && grid.n_angle == 0) {
        return Err(KineticError::InvalidParams("need at least one velocity cell".into()));
    }
    let n_angle = if ens.dim == 1 { 1 } else { grid.n_angle };
    let n_vel = grid.n_speed * n_angle;
    let q = 1.0 / n_vel as f64;
    let edges = velocity_edges(ens.s, ens.dim, grid.n_speed, ens.seed)?;
    let layout = grid.space.layout();
    let volumes = &layout.volumes;

    let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
    for p in ens.particles.iter().filter(|p| p.alive) {
        if let Some(ix) = layout.locate(&p.x[..ens.dim]) {
            *counts.entry((ix, velocity_cell(&p.v[..ens.dim], &edges, n_angle))).or_default() += 1;
        }
    }
    let n = ens.len() as f64;
    let estimate = |cells: &mut dyn Iterator<Item = (usize, f64)>, total: f64| -> f64 {
        cells.map(|(ix, c)| c * (c - 1.0) / (total * (total - 1.0)) / (volumes[ix] * q)).sum()
    };
    let value = estimate(&mut counts.iter().map(|((ix, _), c)| (*ix, *c as f64)), n);

    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_unstable_by_key(|(k, _)| *k);
    let mut rng = aux_stream(ens.seed ^ ens.step_index, 0x626f_6f74);
    let mut reps = Vec::with_capacity(L2_BOOTSTRAP_ROUNDS);
    for _ in 0..L2_BOOTSTRAP_ROUNDS {
        let resampled: Vec<(usize, f64)> = keys
            .iter()
            .map(|((ix, _), c)| (*ix, rng.sample(Poisson::new(*c as f64).expect("positive count"))))
            .collect();
        let dead = n - keys.iter().map(|(_, c)| *c as f64).sum::<f64>();
        let total = resampled.iter().map(|(_, c)| c).sum::<f64>() + dead;
        reps.push(estimate(&mut resampled.into_iter(), total));
    }
    let mean = reps.iter().sum::<f64>() / reps.len() as f64;
    let var = reps.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (reps.len() - 1) as f64;
    Ok(WeightedL2 { value, stderr: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainShape;
    use crate::kinetic::{init_ensemble, InitialLaw};

    #[test]
    fn well_prepared_data_gives_initial_l2_norm() {
        // rho_in = 2 on [0, 1/2] has int rho^2 = 2
        let law = InitialLaw::UniformBox { lo: vec![0.0], hi: vec![0.5] };
        let ens = init_ensemble(200_000, &law, DomainShape::HalfSpace(1), 0.75, 0.1, 4).unwrap();
        let grid = PhaseGrid { space: HistogramGrid::Interval { lo: 0.0, hi: 1.0, n: 8 }, n_speed: 16, n_angle: 1 };
        let r = weighted_l2(&ens, &grid).unwrap();
        assert!((r.value - 2.0).abs() < 4.0 * r.stderr + 1e-2, "{r:?}");
        assert!(r.stderr > 0.0 && r.stderr < 0.05);
    }

    #[test]
    fn disk_uniform_has_norm_one_over_pi() {
        let law = InitialLaw::UniformBall { center: vec![0.0, 0.0], radius: 1.0 };
        let ens = init_ensemble(200_000, &law, DomainShape::UnitBall(2), 0.5, 0.1, 5).unwrap();
        let grid = PhaseGrid { space: HistogramGrid::DiskCartesian { n: 6 }, n_speed: 6, n_angle: 6 };
        let r = weighted_l2(&ens, &grid).unwrap();
        let exact = 1.0 / std::f64::consts::PI;
        assert!((r.value - exact).abs() < 4.0 * r.stderr + 5e-3, "{r:?}");
    }
}
