//! Lie algebra of the identity component of the closed group generated by
//! a finite set of rotations.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{MatrixRecord, RotationMatrix, SkewMatrix};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Words are harvested up to this length.
    pub max_word_len: usize,
    /// Logarithms are taken only for words with `‖w − I‖_F` below this.
    pub log_radius: f64,
    /// Total number of words examined, over all lengths.
    pub max_words: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { max_word_len: 6, log_radius: 0.5, max_words: 400_000 }
    }
}

/// Relative size below which a new direction is taken as already spanned.
const SPAN_TOL: f64 = 1e-6;
/// Logarithms smaller than this are holonomy noise around the identity.
const LOG_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupEstimate {
    /// Frobenius-orthonormal basis of the estimated subalgebra of so(m).
    pub algebra_basis: Vec<SkewMatrix>,
    pub dimension: usize,
    pub generator_count: usize,
    pub words_examined: usize,
    pub logs_harvested: usize,
}

impl SubgroupEstimate {
    /// Subalgebra spanned (and bracket-closed) by the given elements.
    pub fn from_algebra(generators: &[SkewMatrix], generator_count: usize) -> Result<Self> {
        let m = generators.first().map(|g| g.dim()).ok_or_else(|| Error::InvalidInput("no generators".into()))?;
        let mut basis = Vec::new();
        for g in generators {
            if let Some(b) = linalg::orthonormal_residual(&basis, g.matrix(), SPAN_TOL) {
                basis.push(b);
            }
        }
        bracket_close(&mut basis, m);
        Ok(Self::from_basis(basis, generator_count, 0, generators.len()))
    }

    fn from_basis(basis: Vec<DMatrix<f64>>, generator_count: usize, words: usize, logs: usize) -> Self {
        let algebra_basis: Vec<SkewMatrix> = basis.iter().map(SkewMatrix::from_skew_part).collect();
        SubgroupEstimate {
            dimension: algebra_basis.len(),
            algebra_basis,
            generator_count,
            words_examined: words,
            logs_harvested: logs,
        }
    }

    /// Largest `|⟨b_i, b_j⟩ − δ_ij|` over the basis.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.algebra_basis.iter().enumerate() {
            for (j, b) in self.algebra_basis.iter().enumerate() {
                let ip = linalg::frobenius_inner(a.matrix(), b.matrix());
                worst = worst.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// Largest distance of a pairwise bracket from the span.
    pub fn closure_residual(&self) -> f64 {
        let basis: Vec<_> = self.algebra_basis.iter().map(|b| b.matrix().clone()).collect();
        let mut worst: f64 = 0.0;
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                worst = worst.max(linalg::span_residual(&basis, &linalg::commutator(a, b)));
            }
        }
        worst
    }

    /// Same algebra seen through the change of fiber identification `g`.
    pub fn conjugated(&self, g: &RotationMatrix) -> SubgroupEstimate {
        let basis = self.algebra_basis.iter().map(|b| g.matrix().transpose() * b.matrix() * g.matrix()).collect();
        Self::from_basis(basis, self.generator_count, self.words_examined, self.logs_harvested)
    }

    pub fn basis_records(&self) -> Vec<MatrixRecord> {
        self.algebra_basis.iter().map(|b| MatrixRecord::from(b.matrix())).collect()
    }
}

fn bracket_close(basis: &mut Vec<DMatrix<f64>>, m: usize) {
    let cap = m * (m - 1) / 2;
    loop {
        let mut added = false;
        let n = basis.len();
        'outer: for i in 0..n {
            for j in (i + 1)..n {
                if basis.len() >= cap {
                    break 'outer;
                }
                let br = linalg::commutator(&basis[i], &basis[j]);
                if br.norm() < LOG_FLOOR {
                    continue;
                }
                if let Some(b) = linalg::orthonormal_residual(basis, &br, SPAN_TOL) {
                    basis.push(b);
                    added = true;
                }
            }
        }
        if !added || basis.len() >= cap {
            return;
        }
    }
}

/// Harvests logarithms of short positive words in `rhos` that fall inside
/// the injectivity radius, then spans and bracket-closes them.
pub fn estimate_transitivity_group(rhos: &[RotationMatrix], cfg: &EstimatorConfig) -> Result<SubgroupEstimate> {
    let m = rhos.first().map(|r| r.dim()).ok_or_else(|| Error::InvalidInput("no loop values".into()))?;
    let cap = m * (m - 1) / 2;
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    let mut words = 0usize;
    let mut logs = 0usize;
    let harvest = |w: &DMatrix<f64>, basis: &mut Vec<DMatrix<f64>>| {
        let Some(l) = linalg::log_near_identity(w, cfg.log_radius) else {
            return false;
        };
        let l = linalg::skew_part(&l);
        if l.norm() >= LOG_FLOOR && basis.len() < cap {
            if let Some(b) = linalg::orthonormal_residual(basis, &l, SPAN_TOL) {
                basis.push(b);
            }
        }
        true
    };
    // iterative deepening keeps memory at one word per level
    'levels: for len in 1..=cfg.max_word_len {
        let mut stack: Vec<(usize, DMatrix<f64>)> = vec![(0, DMatrix::identity(m, m))];
        while let Some((depth, w)) = stack.pop() {
            if depth == len {
                words += 1;
                if harvest(&w, &mut basis) {
                    logs += 1;
                }
                if words >= cfg.max_words {
                    break 'levels;
                }
                continue;
            }
            for r in rhos.iter().rev() {
                stack.push((depth + 1, &w * r.matrix()));
            }
        }
        bracket_close(&mut basis, m);
        if basis.len() >= cap {
            break;
        }
    }
    if logs == 0 {
        return Err(Error::InsufficientData(format!(
            "no word of length ≤ {} within the injectivity radius {}",
            cfg.max_word_len, cfg.log_radius
        )));
    }
    bracket_close(&mut basis, m);
    Ok(SubgroupEstimate::from_basis(basis, rhos.len(), words, logs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ergodic,
    NotErgodic,
    Inconclusive,
}

/// Default minimum number of generators for a negative verdict.
pub const MIN_GENERATORS: usize = 4;

/// Ergodic iff the estimated algebra is all of so(m).
pub fn ergodicity_verdict(h: &SubgroupEstimate, m: usize, min_generators: usize) -> Verdict {
    if h.dimension == m * (m - 1) / 2 {
        Verdict::Ergodic
    } else if h.generator_count >= min_generators {
        Verdict::NotErgodic
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_inputs_give_dimension_zero() {
        let rhos = vec![RotationMatrix::identity(3); 4];
        let h = estimate_transitivity_group(&rhos, &EstimatorConfig::default()).unwrap();
        assert_eq!(h.dimension, 0);
    }

    #[test]
    fn single_axis_rotations_give_dimension_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let axis = SkewMatrix::random(3, 1.0, &mut rng);
        let axis = axis.scale(1.0 / axis.frobenius_norm());
        let rhos: Vec<_> = (0..5).map(|_| axis.scale(rng.random_range(-3.0..3.0)).exp()).collect();
        let h = estimate_transitivity_group(&rhos, &EstimatorConfig::default()).unwrap();
        assert_eq!(h.dimension, 1);
        // brute force: the one basis element is ± the axis
        let ip = linalg::frobenius_inner(h.algebra_basis[0].matrix(), axis.matrix()).abs();
        assert!((ip - 1.0).abs() < 1e-9);
        assert_eq!(ergodicity_verdict(&h, 3, MIN_GENERATORS), Verdict::NotErgodic);
    }

    #[test]
    fn generic_rotations_span_so3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rhos: Vec<_> = (0..6).map(|_| RotationMatrix::random_givens(3, &mut rng)).collect();
        let h = estimate_transitivity_group(&rhos, &EstimatorConfig::default()).unwrap();
        assert_eq!(h.dimension, 3);
        assert!(h.orthonormality_residual() < 1e-9);
        assert!(h.closure_residual() < 1e-6);
        assert_eq!(ergodicity_verdict(&h, 3, MIN_GENERATORS), Verdict::Ergodic);
    }

    #[test]
    fn far_rotations_without_short_returns_are_insufficient() {
        // a rotation by 2π/3 and its words stay at distance ≥ √3·|…| from I
        let r = SkewMatrix::elementary(3, 0, 1).scale(std::f64::consts::TAU / 3.0).exp();
        let cfg = EstimatorConfig { max_word_len: 2, ..Default::default() };
        assert!(matches!(estimate_transitivity_group(&[r], &cfg), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn verdict_table() {
        let fake = |dimension, generator_count| SubgroupEstimate {
            algebra_basis: Vec::new(),
            dimension,
            generator_count,
            words_examined: 0,
            logs_harvested: 0,
        };
        assert_eq!(ergodicity_verdict(&fake(3, 8), 3, MIN_GENERATORS), Verdict::Ergodic);
        assert_eq!(ergodicity_verdict(&fake(1, 50), 3, MIN_GENERATORS), Verdict::NotErgodic);
        assert_eq!(ergodicity_verdict(&fake(0, 1), 3, MIN_GENERATORS), Verdict::Inconclusive);
    }
}
