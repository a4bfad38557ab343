//! Spatial histograms of the ensemble.

use super::ensemble::ParticleEnsemble;
use crate::error::KineticError;

/// Histogram layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HistogramGrid {
    /// `n` equal cells on `[lo, hi]` (one dimension).
    Interval { lo: f64, hi: f64, n: usize },
    /// `n x n` square cells on `[-1, 1]^2` intersected with the unit disk.
    /// Cells with no area inside the disk are dropped.
    DiskCartesian { n: usize },
}

/// Cell-averaged density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    /// Cell centres (for cut cells, the centre of the square).
    pub centers: Vec<Vec<f64>>,
    /// Bounds `(lo, hi)` of each cell's bounding box.
    pub bounds: Vec<(Vec<f64>, Vec<f64>)>,
    /// Cell volume inside the domain.
    pub volumes: Vec<f64>,
    /// `count / (N * volume)`.
    pub rho: Vec<f64>,
    /// Raw counts per cell.
    pub counts: Vec<u64>,
    /// Fraction of the ensemble still alive.
    pub mass: f64,
    /// Fraction of the ensemble alive but outside every cell.
    pub overflow: f64,
    pub n_total: usize,
}

impl DensityField {
    /// `sum rho * volume`, equal to `mass - overflow`.
    pub fn histogram_mass(&self) -> f64 {
        self.rho.iter().zip(&self.volumes).map(|(r, v)| r * v).sum()
    }

    /// `sqrt(sum rho / N)`: the expected L² error of a histogram of exact
    /// samples, i.e. the Monte Carlo floor of [`DensityField::l2_distance`].
    pub fn mc_floor(&self) -> f64 {
        (self.rho.iter().sum::<f64>() / self.n_total as f64).sqrt()
    }

    /// `sqrt(sum (rho - other)^2 * volume)` against per-cell reference values.
    pub fn l2_distance(&self, reference: &[f64]) -> f64 {
        self.rho
            .iter()
            .zip(reference)
            .zip(&self.volumes)
            .map(|((a, b), v)| (a - b).powi(2) * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// `int_a^b sqrt(1 - x^2) dx`.
fn semicircle_primitive(x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    0.5 * (x * (1.0 - x * x).sqrt() + x.asin())
}

/// Exact area of `[x0, x1] x [y0, y1]` inside the unit disk.
pub fn rect_disk_area(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (a, b) = (x0.max(-1.0), x1.min(1.0));
    if a >= b {
        return 0.0;
    }
    // 0 is where the circle touches y = +-1
    let mut breaks = vec![a, b];
    if a < 0.0 && b > 0.0 {
        breaks.push(0.0);
    }
    for y in [y0, y1] {
        if y.abs() < 1.0 {
            let r = (1.0 - y * y).sqrt();
            breaks.extend([-r, r].into_iter().filter(|t| *t > a && *t < b));
        }
    }
    breaks.sort_by(|p, q| p.total_cmp(q));
    let mut area = 0.0;
    for w in breaks.windows(2) {
        let (l, r) = (w[0], w[1]);
        if r <= l {
            continue;
        }
        let m = 0.5 * (l + r);
        let sm = (1.0 - m * m).sqrt();
        let top_is_circle = sm < y1;
        let bottom_is_circle = -sm > y0;
        if sm.min(y1) <= (-sm).max(y0) {
            continue;
        }
        let circ = semicircle_primitive(r) - semicircle_primitive(l);
        let width = r - l;
        area += match (top_is_circle, bottom_is_circle) {
            (true, true) => 2.0 * circ,
            (true, false) => circ - y0 * width,
            (false, true) => y1 * width + circ,
            (false, false) => (y1 - y0) * width,
        };
    }
    area
}

impl HistogramGrid {
    pub fn dim(&self) -> usize {
        match self {
            HistogramGrid::Interval { .. } => 1,
            HistogramGrid::DiskCartesian { .. } => 2,
        }
    }

    /// Cell geometry: centres, bounds, volumes and a map from the raw
    /// (unfiltered) index to the compact cell index.
    pub fn layout(&self) -> CellLayout {
        let (centers, bounds, volumes, map) = self.build();
        CellLayout { grid: *self, centers, bounds, volumes, map }
    }

    #[allow(clippy::type_complexity)]
    fn build(&self) -> (Vec<Vec<f64>>, Vec<(Vec<f64>, Vec<f64>)>, Vec<f64>, Vec<Option<usize>>) {
        match *self {
            HistogramGrid::Interval { lo, hi, n } => {
                let h = (hi - lo) / n as f64;
                let centers = (0..n).map(|i| vec![lo + h * (i as f64 + 0.5)]).collect();
                let bounds = (0..n).map(|i| (vec![lo + h * i as f64], vec![lo + h * (i + 1) as f64])).collect();
                (centers, bounds, vec![h; n], (0..n).map(Some).collect())
            }
            HistogramGrid::DiskCartesian { n } => {
                let h = 2.0 / n as f64;
                let mut centers = Vec::new();
                let mut bounds = Vec::new();
                let mut vols = Vec::new();
                let mut map = vec![None; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let (x0, y0) = (-1.0 + h * i as f64, -1.0 + h * j as f64);
                        let area = rect_disk_area(x0, x0 + h, y0, y0 + h);
                        if area > 0.0 {
                            map[i * n + j] = Some(vols.len());
                            centers.push(vec![x0 + 0.5 * h, y0 + 0.5 * h]);
                            bounds.push((vec![x0, y0], vec![x0 + h, y0 + h]));
                            vols.push(area);
                        }
                    }
                }
                (centers, bounds, vols, map)
            }
        }
    }

    /// Raw cell index of a point, if it falls in the grid.
    fn raw_index(&self, x: &[f64]) -> Option<usize> {
        let bin = |t: f64, lo: f64, hi: f64, n: usize| -> Option<usize> {
            if !(t >= lo && t <= hi) {
                return None;
            }
            Some((((t - lo) / (hi - lo) * n as f64) as usize).min(n - 1))
        };
        match *self {
            HistogramGrid::Interval { lo, hi, n } => bin(x[0], lo, hi, n),
            HistogramGrid::DiskCartesian { n } => Some(bin(x[0], -1.0, 1.0, n)? * n + bin(x[1], -1.0, 1.0, n)?),
        }
    }
}

/// Precomputed cells of a [`HistogramGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    pub grid: HistogramGrid,
    pub centers: Vec<Vec<f64>>,
    pub bounds: Vec<(Vec<f64>, Vec<f64>)>,
    pub volumes: Vec<f64>,
    map: Vec<Option<usize>>,
}

impl CellLayout {
    /// Compact cell index of a point.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        self.grid.raw_index(x).and_then(|r| self.map[r])
    }

    pub fn len(&self) -> usize {
        self.volumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volumes.is_empty()
    }
}

/// Histogram of the live particles. Counting is exact, so the result does
/// not depend on the number of worker threads.
pub fn density(ens: &ParticleEnsemble, grid: &HistogramGrid) -> Result<DensityField, KineticError> {
    if grid.dim() != ens.dim {
        return Err(KineticError::InvalidParams(format!(
            "histogram is {}-dimensional, ensemble is {}-dimensional",
            grid.dim(),
            ens.dim
        )));
    }
    let CellLayout { centers, bounds, volumes, map, .. } = grid.layout();
    let mut counts = vec![0u64; volumes.len()];
    let mut outside = 0u64;
    for x in ens.particles.iter().filter(|p| p.alive).map(|p| &p.x[..ens.dim]) {
        match grid.raw_index(x).and_then(|r| map[r]) {
            Some(c) => counts[c] += 1,
            None => outside += 1,
        }
    }
    let n = ens.len() as f64;
    let rho = counts.iter().zip(&volumes).map(|(c, v)| *c as f64 / (n * v)).collect();
    Ok(DensityField {
        centers,
        bounds,
        volumes,
        rho,
        counts,
        mass: ens.mass(),
        overflow: outside as f64 / n,
        n_total: ens.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disk_cells_tile_the_disk() {
        for n in [1, 2, 7, 32] {
            let g = HistogramGrid::DiskCartesian { n };
            let v = g.layout().volumes;
            assert!((v.iter().sum::<f64>() - PI).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn rect_area_against_monte_carlo_free_cases() {
        assert!((rect_disk_area(0.0, 1.0, 0.0, 1.0) - PI / 4.0).abs() < 1e-14);
        assert!((rect_disk_area(-0.1, 0.1, -0.1, 0.1) - 0.04).abs() < 1e-15);
        assert_eq!(rect_disk_area(0.8, 1.0, 0.8, 1.0), 0.0);
        // strip x in [0, 1], y in [0.5, 1]: int_0^{sqrt(3)/2} (sqrt(1-x^2) - 1/2) dx
        let r = 3f64.sqrt() / 2.0;
        let exact = semicircle_primitive(r) - semicircle_primitive(0.0) - 0.5 * r;
        assert!((rect_disk_area(0.0, 1.0, 0.5, 1.0) - exact).abs() < 1e-14);
    }
}
