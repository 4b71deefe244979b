//! Smooth SO(m)-valued cocycles given by trigonometric polynomials in the
//! base coordinates.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{BasePoint, TorusPoint};
use crate::error::{Error, Result};
use crate::group::{standard_complex_structure, RotationMatrix, SkewMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleKind {
    /// Group-valued over a map.
    Discrete,
    /// Lie-algebra-valued generator over a flow.
    Continuous,
}

/// One term `C cos(2π k·ξ) + D sin(2π k·ξ)` of the generator, `ξ` the base
/// features.
#[derive(Debug, Clone)]
pub struct TrigTerm {
    pub frequency: Vec<i32>,
    pub cos_coeff: SkewMatrix,
    pub sin_coeff: SkewMatrix,
}

/// Skew-matrix field `S(ξ) = Σ terms`; the cocycle value is `exp S(ξ)` in
/// discrete time and `S(ξ)` itself (the generator) in continuous time.
#[derive(Debug, Clone)]
pub struct Cocycle {
    kind: CocycleKind,
    dim: usize,
    terms: Vec<TrigTerm>,
    smoothness_certificate: f64,
}

fn feature_dim(kind: CocycleKind) -> usize {
    match kind {
        CocycleKind::Discrete => 2,
        CocycleKind::Continuous => 3,
    }
}

impl Cocycle {
    pub fn new(kind: CocycleKind, dim: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("fiber dimension must be ≥ 1".into()));
        }
        let fd = feature_dim(kind);
        for t in &terms {
            if t.frequency.len() != fd {
                return Err(Error::InvalidInput(format!(
                    "frequency {:?} has {} components, expected {fd}",
                    t.frequency,
                    t.frequency.len()
                )));
            }
            if t.cos_coeff.dim() != dim || t.sin_coeff.dim() != dim {
                return Err(Error::InvalidInput("coefficient dimension mismatch".into()));
            }
        }
        let smoothness_certificate = lipschitz_bound(&terms);
        Ok(Cocycle { kind, dim, terms, smoothness_certificate })
    }

    pub fn trivial(kind: CocycleKind, dim: usize) -> Self {
        Cocycle { kind, dim, terms: Vec::new(), smoothness_certificate: 0.0 }
    }

    /// Position-independent value `exp(a)` (discrete) or generator `a`
    /// (continuous).
    pub fn constant(kind: CocycleKind, a: SkewMatrix) -> Self {
        let dim = a.dim();
        let zero = vec![0; feature_dim(kind)];
        let term = TrigTerm { frequency: zero, cos_coeff: a, sin_coeff: SkewMatrix::zeros(dim) };
        Cocycle { kind, dim, terms: vec![term], smoothness_certificate: 0.0 }
    }

    /// Seeded random trigonometric polynomial with `n_terms` terms,
    /// frequencies in `[−max_freq, max_freq]` per feature and Gaussian
    /// coefficients of scale `amplitude`.
    pub fn random_trigonometric(
        kind: CocycleKind,
        dim: usize,
        n_terms: usize,
        max_freq: i32,
        amplitude: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fd = feature_dim(kind);
        let terms = (0..n_terms)
            .map(|_| TrigTerm {
                frequency: (0..fd).map(|_| rng.random_range(-max_freq..=max_freq)).collect(),
                cos_coeff: SkewMatrix::random(dim, amplitude, &mut rng),
                sin_coeff: SkewMatrix::random(dim, amplitude, &mut rng),
            })
            .collect();
        Cocycle::new(kind, dim, terms)
    }

    pub fn kind(&self) -> CocycleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty()
    }

    /// Closed-form Lipschitz bound (Frobenius norm, flat metric on the
    /// features) of `S`, hence of `exp S`.
    pub fn smoothness_certificate(&self) -> f64 {
        self.smoothness_certificate
    }

    /// Generator `S(ξ)` at a base point.
    pub fn generator(&self, p: &BasePoint) -> SkewMatrix {
        self.generator_at(&p.features())
    }

    pub fn generator_at(&self, features: &[f64]) -> SkewMatrix {
        let mut s = DMatrix::<f64>::zeros(self.dim, self.dim);
        for t in &self.terms {
            let phase: f64 = TAU * t.frequency.iter().zip(features).map(|(k, x)| *k as f64 * x).sum::<f64>();
            let (sn, cs) = phase.sin_cos();
            s += t.cos_coeff.matrix() * cs;
            s += t.sin_coeff.matrix() * sn;
        }
        SkewMatrix::from_skew_part(&s)
    }

    /// Group value `exp S(x)` of a discrete cocycle on the torus.
    pub fn value(&self, x: &TorusPoint) -> RotationMatrix {
        if self.terms.is_empty() {
            return RotationMatrix::identity(self.dim);
        }
        self.generator_at(&[x.x(), x.y()]).exp()
    }

    /// Sampled Lipschitz quotient over `samples` random point pairs, for
    /// checking the certificate.
    pub fn sampled_lipschitz(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fd = feature_dim(self.kind);
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let a: Vec<f64> = (0..fd).map(|_| rng.random::<f64>()).collect();
            let b: Vec<f64> = a.iter().map(|x| x + rng.random_range(-1e-3..1e-3)).collect();
            let d = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            if d == 0.0 {
                continue;
            }
            let diff = self.generator_at(&a).matrix() - self.generator_at(&b).matrix();
            worst = worst.max(diff.norm() / d);
        }
        worst
    }

    /// Cocycle `gᵀ A(·) g`, the same extension seen through the fiber
    /// identification changed by `g`.
    pub fn conjugated(&self, g: &RotationMatrix) -> Cocycle {
        let conj = |s: &SkewMatrix| SkewMatrix::from_skew_part(&(g.matrix().transpose() * s.matrix() * g.matrix()));
        let terms = self
            .terms
            .iter()
            .map(|t| TrigTerm {
                frequency: t.frequency.clone(),
                cos_coeff: conj(&t.cos_coeff),
                sin_coeff: conj(&t.sin_coeff),
            })
            .collect();
        Cocycle { kind: self.kind, dim: self.dim, terms, smoothness_certificate: self.smoothness_certificate }
    }

    /// Replaces every coefficient by its projection `(S − J S J)/2` onto the
    /// commutant of the standard complex structure.
    fn complexified(self) -> Result<Self> {
        let j = standard_complex_structure(self.dim)?;
        let project = |s: &SkewMatrix| {
            let m = (s.matrix() - &j * s.matrix() * &j) * 0.5;
            SkewMatrix::from_skew_part(&m)
        };
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| TrigTerm {
                frequency: t.frequency.clone(),
                cos_coeff: project(&t.cos_coeff),
                sin_coeff: project(&t.sin_coeff),
            })
            .collect();
        Cocycle::new(self.kind, self.dim, terms)
    }
}

fn lipschitz_bound(terms: &[TrigTerm]) -> f64 {
    terms
        .iter()
        .map(|t| {
            let k = t.frequency.iter().map(|f| (*f as f64).powi(2)).sum::<f64>().sqrt();
            let c = t.cos_coeff.frobenius_norm();
            let s = t.sin_coeff.frobenius_norm();
            TAU * k * (c * c + s * s).sqrt()
        })
        .sum()
}

/// Cocycle with values in U(m/2) ⊂ SO(m): every value commutes with the
/// standard complex structure `J`, so `J` is invariant along every orbit.
pub fn kahler_like_cocycle(m: usize, kind: CocycleKind, seed: u64) -> Result<Cocycle> {
    if m % 2 != 0 || m == 0 {
        return Err(Error::InvalidInput(format!("kahler_like_cocycle needs even m, got {m}")));
    }
    Cocycle::random_trigonometric(kind, m, 4, 2, 0.6, seed)?.complexified()
}

/// `A^{(n)}(x) = A(f^{n−1}x) ⋯ A(x)` over a toral automorphism.
pub fn cocycle_product(c: &Cocycle, a: &crate::base::ToralAutomorphism, x: &TorusPoint, n: usize) -> RotationMatrix {
    let mut prod = RotationMatrix::identity(c.dim());
    let mut p = *x;
    for _ in 0..n {
        prod = c.value(&p).compose(&prod);
        p = crate::base::cat_step(&p, a);
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{cat_step, ToralAutomorphism};
    use crate::linalg;

    #[test]
    fn values_are_rotations() {
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 4, 3, 2, 0.5, 1).unwrap();
        let r = c.value(&TorusPoint::new(0.3, 0.8));
        assert!(RotationMatrix::new(r.into_matrix()).is_ok());
    }

    #[test]
    fn evaluation_is_deterministic_and_periodic() {
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 3, 2, 0.5, 5).unwrap();
        let a = c.generator_at(&[0.25, 0.5]);
        let b = c.generator_at(&[1.25, -0.5]);
        assert!((a.matrix() - b.matrix()).norm() < 1e-12);
        assert_eq!(c.value(&TorusPoint::new(0.1, 0.2)), c.value(&TorusPoint::new(0.1, 0.2)));
    }

    #[test]
    fn certificate_dominates_sampled_lipschitz() {
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 4, 2, 0.5, 9).unwrap();
        let cert = c.smoothness_certificate();
        assert!(cert.is_finite() && cert > 0.0);
        assert!(c.sampled_lipschitz(2000, 3) <= cert);
    }

    #[test]
    fn cocycle_identity() {
        let a = ToralAutomorphism::cat_map();
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 3, 2, 0.7, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = TorusPoint::new(rng.random(), rng.random());
            let n = rng.random_range(0..=20);
            let m = rng.random_range(0..=20);
            let mut fx = x;
            for _ in 0..m {
                fx = cat_step(&fx, &a);
            }
            let lhs = cocycle_product(&c, &a, &x, n + m);
            let rhs = cocycle_product(&c, &a, &fx, n).compose(&cocycle_product(&c, &a, &x, m));
            assert!(lhs.distance(&rhs) < 1e-10);
        }
    }

    #[test]
    fn kahler_values_commute_with_j() {
        let j = standard_complex_structure(6).unwrap();
        let c = kahler_like_cocycle(6, CocycleKind::Discrete, 3).unwrap();
        let r = c.value(&TorusPoint::new(0.41, 0.13));
        assert!(linalg::max_abs(&linalg::commutator(r.matrix(), &j)) < 1e-12);
        assert!(kahler_like_cocycle(5, CocycleKind::Discrete, 3).is_err());
    }

    #[test]
    fn su1_case_commutes_exactly() {
        let j = standard_complex_structure(2).unwrap();
        let c = kahler_like_cocycle(2, CocycleKind::Discrete, 8).unwrap();
        for i in 0..10 {
            let r = c.value(&TorusPoint::new(0.1 * i as f64, 0.37));
            assert!(linalg::max_abs(&linalg::commutator(r.matrix(), &j)) < 1e-15);
        }
    }

    #[test]
    fn bad_frequency_length_rejected() {
        let t = TrigTerm { frequency: vec![1], cos_coeff: SkewMatrix::zeros(3), sin_coeff: SkewMatrix::zeros(3) };
        assert!(Cocycle::new(CocycleKind::Discrete, 3, vec![t]).is_err());
    }
}
