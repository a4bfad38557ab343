//! Symmetric `2s`-stable sampling, the heavy-tailed equilibrium `F` and the
//! exact Ornstein–Uhlenbeck step driven by stable noise.

mod density;
mod tail;

pub use density::{equilibrium_density_1d, EquilibriumTable};
pub use tail::{tail_exponent, TailEstimate, HILL_FRACTION, BOOTSTRAP_ROUNDS};

use crate::error::StableError;
use rand::Rng;
use rand_distr::{Exp1, Open01, StandardNormal};
use std::f64::consts::PI;

/// Symmetric stable law with characteristic function `exp(-(scale |xi|)^{2s})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    pub s: f64,
    pub dim: usize,
    pub scale: f64,
}

impl StableParams {
    pub fn new(s: f64, dim: usize, scale: f64) -> Result<Self, StableError> {
        let p = StableParams { s, dim, scale };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), StableError> {
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(StableError::InvalidParams(format!("s = {} must lie in (0, 1)", self.s)));
        }
        if self.dim == 0 {
            return Err(StableError::InvalidParams("dimension must be at least 1".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(StableError::InvalidParams(format!("scale = {} must be positive", self.scale)));
        }
        Ok(())
    }

    /// Stability index `alpha = 2s`.
    pub fn alpha(&self) -> f64 {
        2.0 * self.s
    }

    /// Exact characteristic function at a frequency of norm `xi`.
    pub fn char_function(&self, xi: f64) -> f64 {
        (-(self.scale * xi.abs()).powf(self.alpha())).exp()
    }
}

/// The equilibrium law `F`, i.e. the stable law with exponent `|xi|^{2s}/(2s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSpec {
    pub s: f64,
    pub dim: usize,
}

impl EquilibriumSpec {
    pub fn new(s: f64, dim: usize) -> Result<Self, StableError> {
        StableParams::new(s, dim, 1.0)?;
        Ok(EquilibriumSpec { s, dim })
    }

    pub fn char_exponent(&self, xi: f64) -> f64 {
        xi.abs().powf(2.0 * self.s) / (2.0 * self.s)
    }

    pub fn char_function(&self, xi: f64) -> f64 {
        (-self.char_exponent(xi)).exp()
    }

    /// `(2s)^{-1/(2s)}`.
    pub fn sampling_scale(&self) -> f64 {
        (2.0 * self.s).powf(-1.0 / (2.0 * self.s))
    }

    pub fn params(&self) -> StableParams {
        StableParams { s: self.s, dim: self.dim, scale: self.sampling_scale() }
    }

    /// Density exponent of the tail, `d + 2s`.
    pub fn tail_exponent(&self) -> f64 {
        self.dim as f64 + 2.0 * self.s
    }
}

/// One-dimensional symmetric stable variate with `E exp(i xi X) = exp(-|xi|^alpha)`
/// (Chambers–Mallows–Stuck).
#[inline]
pub fn cms_symmetric<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = PI * (rng.sample::<f64, _>(Open01) - 0.5);
    let w: f64 = rng.sample(Exp1);
    if (alpha - 1.0).abs() < 1e-12 {
        return u.tan();
    }
    let head = (alpha * u).sin() / u.cos().powf(1.0 / alpha);
    head * (((1.0 - alpha) * u).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Positive stable variate with Laplace transform `exp(-lambda^s)` (Kanter).
#[inline]
pub fn positive_stable<R: Rng + ?Sized>(s: f64, rng: &mut R) -> f64 {
    let u: f64 = PI * rng.sample::<f64, _>(Open01);
    let w: f64 = rng.sample(Exp1);
    let a = (s * u).sin() / u.sin().powf(1.0 / s);
    a * (((1.0 - s) * u).sin() / w).powf((1.0 - s) / s)
}

/// Fills `out` with one stable vector. Dimension one uses CMS; higher
/// dimensions use the Gaussian subordination `sqrt(2S) G`.
#[inline]
pub fn draw_stable_into<R: Rng + ?Sized>(p: &StableParams, rng: &mut R, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = p.scale * cms_symmetric(p.alpha(), rng);
        return;
    }
    let r = p.scale * (2.0 * positive_stable(p.s, rng)).sqrt();
    for o in out.iter_mut() {
        let g: f64 = rng.sample(StandardNormal);
        *o = r * g;
    }
}

pub fn sample_stable<R: Rng + ?Sized>(p: &StableParams, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>, StableError> {
    p.validate()?;
    Ok((0..n)
        .map(|_| {
            let mut v = vec![0.0; p.dim];
            draw_stable_into(p, rng, &mut v);
            v
        })
        .collect())
}

pub fn sample_equilibrium<R: Rng + ?Sized>(spec: &EquilibriumSpec, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>, StableError> {
    sample_stable(&spec.params(), n, rng)
}

/// Noise amplitude of the exact OU step, `((1 - e^{-2s dt}) / (2s))^{1/(2s)}`.
#[inline]
pub fn ou_sigma(dt: f64, s: f64) -> f64 {
    (-(-2.0 * s * dt).exp_m1() / (2.0 * s)).powf(1.0 / (2.0 * s))
}

/// In-place exact step `v <- e^{-dt} v + sigma(dt) xi` with `xi` a unit stable draw.
#[inline]
pub fn ou_step_in_place<R: Rng + ?Sized>(v: &mut [f64], dt: f64, s: f64, rng: &mut R) {
    if dt == 0.0 {
        return;
    }
    let decay = (-dt).exp();
    let p = StableParams { s, dim: v.len(), scale: ou_sigma(dt, s) };
    let mut xi = [0.0f64; 8];
    if v.len() <= xi.len() {
        let xi = &mut xi[..v.len()];
        draw_stable_into(&p, rng, xi);
        for (vi, x) in v.iter_mut().zip(xi.iter()) {
            *vi = decay * *vi + x;
        }
    } else {
        let mut xi = vec![0.0; v.len()];
        draw_stable_into(&p, rng, &mut xi);
        for (vi, x) in v.iter_mut().zip(&xi) {
            *vi = decay * *vi + x;
        }
    }
}

pub fn ou_exact_step<R: Rng + ?Sized>(v: &[f64], dt: f64, s: f64, rng: &mut R) -> Vec<f64> {
    let mut out = v.to_vec();
    ou_step_in_place(&mut out, dt, s, rng);
    out
}

/// Empirical characteristic function `(1/n) sum cos(xi . V_j)`.
pub fn empirical_char(samples: &[Vec<f64>], xi: &[f64]) -> f64 {
    let n = samples.len() as f64;
    samples
        .iter()
        .map(|v| v.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>().cos())
        .sum::<f64>()
        / n
}
