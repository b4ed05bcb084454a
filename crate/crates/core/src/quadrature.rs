//! Composite Gauss–Legendre rules.

use std::num::NonZeroUsize;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        let degree = NonZeroUsize::new(order).expect("Gauss-Legendre order must be positive");
        let mut pairs = gauss_quad::legendre::GaussLegendre::new(degree).into_node_weight_pairs().into_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]` split into `panels` equal sub-intervals.
    pub fn integrate<T, F>(&self, a: f64, b: f64, panels: usize, mut f: F) -> T
    where
        T: Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
        F: FnMut(f64) -> T,
    {
        let mut acc = T::default();
        let h = (b - a) / panels as f64;
        for k in 0..panels {
            let lo = a + k as f64 * h;
            let half = 0.5 * h;
            let mid = lo + half;
            for (&z, &w) in self.nodes.iter().zip(&self.weights) {
                acc += f(mid + half * z) * (w * half);
            }
        }
        acc
    }
}
