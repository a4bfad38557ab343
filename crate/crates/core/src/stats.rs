//! Small statistical tests used by the diagnostics: Kolmogorov–Smirnov
//! distances and the Mann–Kendall trend test.

use statrs::function::erf::erfc;

/// One-sample KS distance `sup |F_n - F|`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Result of a Mann–Kendall trend test.
#[derive(Debug, Clone, Copy)]
pub struct MannKendall {
    pub s: i64,
    pub z: f64,
    /// One-sided p-value for an increasing trend.
    pub p_increasing: f64,
    /// One-sided p-value for a decreasing trend.
    pub p_decreasing: f64,
}

impl MannKendall {
    /// True when an increasing trend is significant at level `alpha`.
    pub fn increasing_at(&self, alpha: f64) -> bool {
        self.p_increasing < alpha
    }

    pub fn decreasing_at(&self, alpha: f64) -> bool {
        self.p_decreasing < alpha
    }
}

/// Mann–Kendall statistic with tie correction and continuity correction.
pub fn mann_kendall(series: &[f64]) -> MannKendall {
    let n = series.len();
    let mut s: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += match series[j].partial_cmp(&series[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut k = 0;
    while k < n {
        let mut m = k + 1;
        while m < n && sorted[m] == sorted[k] {
            m += 1;
        }
        let t = (m - k) as f64;
        tie_term += t * (t - 1.0) * (2.0 * t + 5.0);
        k = m;
    }
    let nf = n as f64;
    let var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_term) / 18.0;
    let z = if var <= 0.0 {
        0.0
    } else if s > 0 {
        (s as f64 - 1.0) / var.sqrt()
    } else if s < 0 {
        (s as f64 + 1.0) / var.sqrt()
    } else {
        0.0
    };
    let upper = 0.5 * erfc(z / std::f64::consts::SQRT_2);
    MannKendall {
        s,
        z,
        p_increasing: upper,
        p_decreasing: 1.0 - upper,
    }
}
