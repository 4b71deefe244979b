//! Product quadrature on `S^{n−1}`: uniform angles on the circle and
//! Gauss–Jacobi nodes in the last coordinate for each higher sphere.

use nalgebra::{DMatrix, SymmetricEigen};

use super::poly::{gamma_half, sphere_area};
use crate::error::{Error, Result};

/// Largest node count a product rule may reach.
pub const MAX_NODES: usize = 4_000_000;

#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub n: usize,
    /// Polynomials of total degree up to this are integrated exactly.
    pub exactness: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Gauss rule for the weight `(1 − t²)^a` on `[−1, 1]` with `count` nodes,
/// by the Golub–Welsch eigenvalue method.
pub fn gauss_jacobi_symmetric(count: usize, two_a: u32) -> (Vec<f64>, Vec<f64>) {
    let a = two_a as f64 / 2.0;
    let mut j = DMatrix::<f64>::zeros(count, count);
    for k in 1..count {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0));
        j[(k, k - 1)] = beta.sqrt();
        j[(k - 1, k)] = beta.sqrt();
    }
    // μ₀ = ∫(1 − t²)^a dt = √π Γ(a + 1) / Γ(a + 3/2)
    let mu0 = std::f64::consts::PI.sqrt() * gamma_half(two_a + 2) / gamma_half(two_a + 3);
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> =
        (0..count).map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

impl SphereQuadrature {
    /// Product rule exact for polynomials of degree ≤ `exactness`.
    pub fn product(n: usize, exactness: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("sphere quadrature needs n ≥ 2, got {n}")));
        }
        let circle = exactness + 1;
        let gauss = exactness / 2 + 1;
        let count = (circle as f64) * (gauss as f64).powi(n as i32 - 2);
        if count > MAX_NODES as f64 {
            return Err(Error::Underresolved(format!(
                "product rule on S^{} of degree {exactness} needs {count:.0} nodes",
                n - 1
            )));
        }
        let mut nodes: Vec<Vec<f64>> = Vec::with_capacity(circle);
        let mut weights = Vec::with_capacity(circle);
        let h = std::f64::consts::TAU / circle as f64;
        for i in 0..circle {
            let phi = (i as f64 + 0.5) * h;
            nodes.push(vec![phi.cos(), phi.sin()]);
            weights.push(h);
        }
        // S^{d} from S^{d−1}: x = (√(1 − t²) y, t), weight (1 − t²)^{(d−2)/2}
        for d in 2..n {
            let (ts, ws) = gauss_jacobi_symmetric(gauss, (d - 2) as u32);
            let mut next_nodes = Vec::with_capacity(nodes.len() * gauss);
            let mut next_weights = Vec::with_capacity(nodes.len() * gauss);
            for (t, wt) in ts.iter().zip(&ws) {
                let r = (1.0 - t * t).sqrt();
                for (y, wy) in nodes.iter().zip(&weights) {
                    let mut x: Vec<f64> = y.iter().map(|c| c * r).collect();
                    x.push(*t);
                    next_nodes.push(x);
                    next_weights.push(wt * wy);
                }
            }
            nodes = next_nodes;
            weights = next_weights;
        }
        Ok(SphereQuadrature { n, exactness, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        pairwise_sum(&self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).collect::<Vec<_>>())
    }

    /// Relative error of the rule on the constant function 1.
    pub fn constant_error(&self) -> f64 {
        let total = pairwise_sum(&self.weights);
        (total / sphere_area(self.n) - 1.0).abs()
    }
}

/// Pairwise summation; the split points depend only on the length, so the
/// result is bit-stable for a given input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
