//! Scalar fields the operators act on: analytic test functions, closures and
//! values on a rectangular lattice.

/// A twice differentiable scalar field on `R^d`.
pub trait Field: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Mean value far away, used by the analytic tail beyond the truncation
    /// radius on unbounded domains.
    fn far_mean(&self) -> f64 {
        0.0
    }

    /// Central differences with step `1e-6` unless overridden.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        let mut y = x.to_vec();
        (0..x.len())
            .map(|i| {
                y[i] = x[i] + h;
                let p = self.value(&y);
                y[i] = x[i] - h;
                let m = self.value(&y);
                y[i] = x[i];
                (p - m) / (2.0 * h)
            })
            .collect()
    }

    /// Central second differences with step `1e-4` unless overridden.
    fn laplacian(&self, x: &[f64]) -> f64 {
        let h = 1e-4;
        let c = self.value(x);
        let mut y = x.to_vec();
        let mut acc = 0.0;
        for i in 0..x.len() {
            y[i] = x[i] + h;
            let p = self.value(&y);
            y[i] = x[i] - h;
            let m = self.value(&y);
            y[i] = x[i];
            acc += (p - 2.0 * c + m) / (h * h);
        }
        acc
    }
}

impl<T: Field + ?Sized> Field for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn far_mean(&self) -> f64 {
        (**self).far_mean()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        (**self).laplacian(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant {
    pub dim: usize,
    pub value: f64,
}

impl Field for Constant {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _: &[f64]) -> f64 {
        self.value
    }
    fn far_mean(&self) -> f64 {
        self.value
    }
    fn gradient(&self, _: &[f64]) -> Vec<f64> {
        vec![0.0; self.dim]
    }
    fn laplacian(&self, _: &[f64]) -> f64 {
        0.0
    }
}

/// `amp * exp(-sum_i beta_i (x_i - c_i)^2)`; a zero `beta_i` makes the field
/// constant along axis `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub center: Vec<f64>,
    pub beta: Vec<f64>,
    pub amp: f64,
}

impl Gaussian {
    pub fn isotropic(center: Vec<f64>, beta: f64) -> Self {
        let d = center.len();
        Gaussian { center, beta: vec![beta; d], amp: 1.0 }
    }

    /// `exp(-beta x_d^2)`, a profile depending on the last coordinate only.
    pub fn ridge(dim: usize, beta: f64) -> Self {
        let mut b = vec![0.0; dim];
        b[dim - 1] = beta;
        Gaussian { center: vec![0.0; dim], beta: b, amp: 1.0 }
    }
}

impl Field for Gaussian {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let q: f64 = (0..x.len()).map(|i| self.beta[i] * (x[i] - self.center[i]).powi(2)).sum();
        self.amp * (-q).exp()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let v = self.value(x);
        (0..x.len()).map(|i| -2.0 * self.beta[i] * (x[i] - self.center[i]) * v).collect()
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        let v = self.value(x);
        (0..x.len())
            .map(|i| {
                let b = self.beta[i];
                4.0 * b * b * (x[i] - self.center[i]).powi(2) - 2.0 * b
            })
            .sum::<f64>()
            * v
    }
}

/// `cos(k . x)`, an eigenfunction of the whole-space operator with eigenvalue `|k|^{2s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineMode {
    pub k: Vec<f64>,
}

impl Field for CosineMode {
    fn dim(&self) -> usize {
        self.k.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().cos()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let sn = self.k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().sin();
        self.k.iter().map(|k| -k * sn).collect()
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        -self.k.iter().map(|k| k * k).sum::<f64>() * self.value(x)
    }
}

/// `cos(m pi |x|^2)`: radial, with vanishing normal derivative on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCosine {
    pub dim: usize,
    pub m: f64,
}

impl Field for RadialCosine {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        (self.m * std::f64::consts::PI * r2).cos()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let a = self.m * std::f64::consts::PI;
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let g = -2.0 * a * (a * r2).sin();
        x.iter().map(|c| g * c).collect()
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        let a = self.m * std::f64::consts::PI;
        let r2: f64 = x.iter().map(|c| c * c).sum();
        -2.0 * a * self.dim as f64 * (a * r2).sin() - 4.0 * a * a * r2 * (a * r2).cos()
    }
}

/// Wraps a closure; derivatives come from finite differences.
pub struct FnField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Node values on a rectangular lattice `lo + h * i`, `0 <= i < shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub lo: Vec<f64>,
    pub h: Vec<f64>,
    pub shape: Vec<usize>,
    /// Row-major values, last axis fastest.
    pub values: Vec<f64>,
}

impl GridFunction {
    /// Samples `field` at every lattice node.
    pub fn sample<T: Field>(field: &T, lo: Vec<f64>, h: Vec<f64>, shape: Vec<usize>) -> Self {
        let total: usize = shape.iter().product();
        let mut g = GridFunction { lo, h, shape, values: Vec::with_capacity(total) };
        for idx in 0..total {
            let x = g.node(idx);
            g.values.push(field.value(&x));
        }
        g
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the node with flat index `idx`.
    pub fn node(&self, mut idx: usize) -> Vec<f64> {
        let d = self.shape.len();
        let mut x = vec![0.0; d];
        for a in (0..d).rev() {
            let i = idx % self.shape[a];
            idx /= self.shape[a];
            x[a] = self.lo[a] + self.h[a] * i as f64;
        }
        x
    }
}

impl Field for GridFunction {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    /// Multilinear interpolation, constant extension outside the lattice.
    fn value(&self, x: &[f64]) -> f64 {
        let d = self.shape.len();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for a in 0..d {
            let n = self.shape[a];
            let t = ((x[a] - self.lo[a]) / self.h[a]).clamp(0.0, (n - 1) as f64);
            let i = (t.floor() as usize).min(n.saturating_sub(2));
            base[a] = i;
            frac[a] = if n > 1 { t - i as f64 } else { 0.0 };
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut flat = 0usize;
            for a in 0..d {
                let bit = (corner >> a) & 1;
                let i = (base[a] + bit).min(self.shape[a] - 1);
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                flat = flat * self.shape[a] + i;
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }
}
