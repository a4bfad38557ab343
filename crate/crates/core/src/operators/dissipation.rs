//! Velocity dissipation functional of the fractional Fokker–Planck operator
//! on a truncated one-dimensional velocity lattice.

use super::constant::normalization_constant;
use crate::error::OperatorError;
use crate::stable::EquilibriumTable;

/// Cell-centred velocity lattice on `[-vmax, vmax]` with the equilibrium
/// tabulated on it (normalised to unit lattice mass).
#[derive(Debug, Clone)]
pub struct DissipationLattice {
    pub s: f64,
    pub h: f64,
    pub v: Vec<f64>,
    /// Equilibrium values, normalised so that `sum F h = 1`.
    pub f_eq: Vec<f64>,
    pub c_ds: f64,
}

/// Both forms of the dissipation and the distance to local equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationReport {
    /// `(c/2) sum_{i != j} F_j (g_i - g_j)^2 |v_i - v_j|^{-1-2s} h^2` with
    /// `g = f / F`, plus the near-diagonal correction.
    pub d_entropy: f64,
    /// `sum_{i != j} (f_i - f_j)^2 / (F_i |v_i - v_j|^{1+2s}) h^2`.
    pub d_stated: f64,
    /// `sum |f - rho F|^2 / F h` with `rho = sum f h`.
    pub distance: f64,
    /// `sum f^2 / F h`, used to normalise.
    pub weighted_norm: f64,
}

impl DissipationReport {
    /// Empirical coercivity constant `d_entropy / distance`.
    pub fn theta_hat(&self) -> f64 {
        self.d_entropy / self.distance
    }

    /// `d_stated / d_entropy`.
    pub fn form_ratio(&self) -> f64 {
        self.d_stated / self.d_entropy
    }

    pub fn normalized(&self) -> f64 {
        self.d_entropy / self.weighted_norm
    }
}

impl DissipationLattice {
    pub fn new(s: f64, vmax: f64, n: usize) -> Result<Self, OperatorError> {
        if n < 8 || !(vmax > 0.0) {
            return Err(OperatorError::InvalidConfig("lattice needs n >= 8 and vmax > 0".into()));
        }
        let h = 2.0 * vmax / n as f64;
        let v: Vec<f64> = (0..n).map(|i| -vmax + h * (i as f64 + 0.5)).collect();
        let table = EquilibriumTable::new(s, &v);
        let mass: f64 = table.f.iter().sum::<f64>() * h;
        let f_eq = table.f.iter().map(|f| f / mass).collect();
        Ok(DissipationLattice { s, h, v, f_eq, c_ds: normalization_constant(1, s)? })
    }

    pub fn dissipation(&self, f: &[f64]) -> Result<DissipationReport, OperatorError> {
        let n = self.v.len();
        if f.len() != n {
            return Err(OperatorError::InvalidConfig(format!("expected {n} lattice values, got {}", f.len())));
        }
        if let Some((index, &value)) = f.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
            return Err(OperatorError::NegativeDensity { index, value });
        }
        let h = self.h;
        let p = 1.0 + 2.0 * self.s;
        let g: Vec<f64> = f.iter().zip(&self.f_eq).map(|(a, b)| a / b).collect();
        let mut d_entropy = 0.0;
        let mut d_stated = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let k = ((i as f64 - j as f64).abs() * h).powf(-p);
                d_entropy += self.f_eq[j] * (g[i] - g[j]).powi(2) * k;
                d_stated += (f[i] - f[j]).powi(2) * k / self.f_eq[i];
            }
        }
        d_entropy *= 0.5 * self.c_ds * h * h;
        d_stated *= h * h;
        // the excluded diagonal cells: int_cell int_cell g'^2 |v - w|^{1-2s}
        let cell = 2.0 * h.powf(3.0 - 2.0 * self.s) / ((2.0 - 2.0 * self.s) * (3.0 - 2.0 * self.s));
        for i in 0..n {
            let gp = match i {
                0 => (g[1] - g[0]) / h,
                _ if i == n - 1 => (g[n - 1] - g[n - 2]) / h,
                _ => (g[i + 1] - g[i - 1]) / (2.0 * h),
            };
            d_entropy += 0.5 * self.c_ds * self.f_eq[i] * gp * gp * cell;
        }
        let rho: f64 = f.iter().sum::<f64>() * h;
        let distance = f.iter().zip(&self.f_eq).map(|(a, b)| (a - rho * b).powi(2) / b).sum::<f64>() * h;
        let weighted_norm = f.iter().zip(&self.f_eq).map(|(a, b)| a * a / b).sum::<f64>() * h;
        Ok(DissipationReport { d_entropy, d_stated, distance, weighted_norm })
    }
}

/// Dissipation of `f` on a fresh lattice `[-vmax, vmax]` with `f.len()` cells.
pub fn dissipation(f: &[f64], s: f64, vmax: f64) -> Result<DissipationReport, OperatorError> {
    DissipationLattice::new(s, vmax, f.len())?.dissipation(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_is_in_the_kernel() {
        let lat = DissipationLattice::new(0.5, 20.0, 200).unwrap();
        let r = lat.dissipation(&lat.f_eq).unwrap();
        assert!(r.normalized() < 1e-12);
        let twice: Vec<f64> = lat.f_eq.iter().map(|x| 2.0 * x).collect();
        assert!(lat.dissipation(&twice).unwrap().normalized() < 1e-12);
    }

    #[test]
    fn perturbation_dissipates() {
        let lat = DissipationLattice::new(0.75, 20.0, 200).unwrap();
        let f: Vec<f64> = lat.v.iter().zip(&lat.f_eq).map(|(v, fe)| fe * (1.0 + 0.1 * v.sin())).collect();
        let r = lat.dissipation(&f).unwrap();
        assert!(r.d_entropy > 0.0 && r.distance > 0.0 && r.theta_hat() > 0.0);
    }

    #[test]
    fn negative_input_is_rejected() {
        let lat = DissipationLattice::new(0.5, 5.0, 16).unwrap();
        let mut f = lat.f_eq.clone();
        f[3] = -1e-3;
        assert!(matches!(lat.dissipation(&f), Err(OperatorError::NegativeDensity { index: 3, .. })));
    }
}
