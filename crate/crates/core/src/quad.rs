//! Gauss–Legendre rules and composite panel helpers.

use gauss_quad::legendre::GaussLegendre;

/// A quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre rule with `n` nodes (`n >= 2`).
    pub fn gauss_legendre(n: usize) -> Self {
        let gl = GaussLegendre::new(n.max(2)).expect("degree >= 2");
        let mut pairs: Vec<(f64, f64)> = gl.iter().map(|(x, w)| (*x, *w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Rule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over consecutive panels given by `edges`.
    pub fn composite<F: FnMut(f64) -> f64>(&self, edges: &[f64], mut f: F) -> f64 {
        edges
            .windows(2)
            .map(|e| self.integrate(e[0], e[1], &mut f))
            .sum()
    }
}

/// `n + 1` edges on `[a, b]` spaced uniformly.
pub fn uniform_edges(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Edges on `[0, b]` refined geometrically towards 0: `[0, b q^m], ..., [b q, b]`.
pub fn graded_edges(b: f64, levels: usize, q: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=levels).map(|i| b * q.powi((levels - i) as i32)).collect();
    e.insert(0, 0.0);
    e
}

/// Edges uniform in `ln r` between `a > 0` and `b`.
pub fn log_edges(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    let mut e: Vec<f64> = (0..=n).map(|i| (la + (lb - la) * i as f64 / n as f64).exp()).collect();
    e[0] = a;
    e[n] = b;
    e
}

/// Merge sorted `extra` break points that fall strictly inside `edges`.
pub fn insert_breaks(edges: &[f64], extra: &[f64]) -> Vec<f64> {
    let lo = edges[0];
    let hi = edges[edges.len() - 1];
    let mut out: Vec<f64> = edges.to_vec();
    out.extend(extra.iter().copied().filter(|&b| b > lo && b < hi));
    out.sort_by(f64::total_cmp);
    // drop slivers that would only add rounding noise
    let tol = 1e-14 * hi.abs().max(1.0);
    out.dedup_by(|b, a| (*b - *a).abs() <= tol);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_is_exact_for_polynomials() {
        let r = Rule::gauss_legendre(4);
        let v = r.integrate(0.0, 2.0, |x| x.powi(7));
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn graded_edges_cover_interval() {
        let e = graded_edges(1.0, 10, 0.5);
        assert_eq!(e[0], 0.0);
        assert_eq!(*e.last().unwrap(), 1.0);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn breaks_are_merged_in_order() {
        let e = insert_breaks(&[0.0, 1.0, 2.0], &[0.5, 1.0, 3.0]);
        assert_eq!(e, vec![0.0, 0.5, 1.0, 2.0]);
    }
}
