//! Explicit subalgebras of so(m) used as reference transitivity groups.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{standard_complex_structure, SkewMatrix};
use crate::linalg;

/// so(n₁) ⊕ so(n₂) ⊕ ⋯ embedded block-diagonally in so(Σ nᵢ).
pub fn so_blocks(sizes: &[usize]) -> Vec<SkewMatrix> {
    let m: usize = sizes.iter().sum();
    let mut out = Vec::new();
    let mut offset = 0;
    for &n in sizes {
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(SkewMatrix::elementary(m, offset + i, offset + j));
            }
        }
        offset += n;
    }
    out
}

/// Orthonormal basis of the elements of `candidates`' span.
fn orthonormalize(candidates: impl IntoIterator<Item = DMatrix<f64>>) -> Vec<SkewMatrix> {
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    for c in candidates {
        if let Some(b) = linalg::orthonormal_residual(&basis, &c, 1e-9) {
            basis.push(b);
        }
    }
    basis.iter().map(SkewMatrix::from_skew_part).collect()
}

/// u(m/2): skew matrices commuting with the standard complex structure.
pub fn unitary_algebra(m: usize) -> Result<Vec<SkewMatrix>> {
    let j = standard_complex_structure(m)?;
    Ok(orthonormalize(so_blocks(&[m]).into_iter().map(|e| (e.matrix() - &j * e.matrix() * &j) * 0.5)))
}

/// Terms `(i, j, k, sign)` of the associative 3-form
/// `φ = e123 + e145 + e167 + e246 − e257 − e347 − e356` (0-based).
pub const G2_FORM_TERMS: [(usize, usize, usize, f64); 7] =
    [(0, 1, 2, 1.0), (0, 3, 4, 1.0), (0, 5, 6, 1.0), (1, 3, 5, 1.0), (1, 4, 6, -1.0), (2, 3, 6, -1.0), (2, 4, 5, -1.0)];

/// Full antisymmetric tensor of φ on ℝ⁷, row-major.
pub fn g2_three_form() -> Vec<f64> {
    let m = 7;
    let mut t = vec![0.0; m * m * m];
    for (i, j, k, s) in G2_FORM_TERMS {
        for (p, sign) in [
            ([i, j, k], 1.0),
            ([j, k, i], 1.0),
            ([k, i, j], 1.0),
            ([j, i, k], -1.0),
            ([i, k, j], -1.0),
            ([k, j, i], -1.0),
        ] {
            t[(p[0] * m + p[1]) * m + p[2]] = s * sign;
        }
    }
    t
}

/// The 14-dimensional stabilizer of φ: the orthogonal complement in so(7)
/// of the 7 contractions `φ(e_k, ·, ·)`.
pub fn g2_algebra() -> Vec<SkewMatrix> {
    let phi = g2_three_form();
    let contractions: Vec<DMatrix<f64>> =
        (0..7).map(|k| DMatrix::from_fn(7, 7, |a, b| phi[(k * 7 + a) * 7 + b])).collect();
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    for c in &contractions {
        if let Some(b) = linalg::orthonormal_residual(&basis, c, 1e-9) {
            basis.push(b);
        }
    }
    let n_seed = basis.len();
    for e in so_blocks(&[7]) {
        if let Some(b) = linalg::orthonormal_residual(&basis, e.matrix(), 1e-9) {
            basis.push(b);
        }
    }
    basis[n_seed..].iter().map(SkewMatrix::from_skew_part).collect()
}

/// Named reference algebra for an m×m fiber.
pub fn reference_algebra(name: &str, m: usize) -> Result<Vec<SkewMatrix>> {
    match name {
        "so" => Ok(so_blocks(&[m])),
        "u" => unitary_algebra(m),
        "g2" if m == 7 => Ok(g2_algebra()),
        _ => Err(Error::InvalidInput(format!("no reference algebra {name:?} in dimension {m}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transitivity::algebra::SubgroupEstimate;

    #[test]
    fn dimensions() {
        assert_eq!(so_blocks(&[2, 3]).len(), 1 + 3);
        assert_eq!(unitary_algebra(6).unwrap().len(), 9);
        assert_eq!(g2_algebra().len(), 14);
        assert!(unitary_algebra(5).is_err());
    }

    #[test]
    fn g2_is_a_subalgebra_fixing_phi() {
        let g2 = g2_algebra();
        let h = SubgroupEstimate::from_algebra(&g2, 14).unwrap();
        assert_eq!(h.dimension, 14);
        assert!(h.closure_residual() < 1e-9);
    }

    #[test]
    fn unitary_algebra_is_closed() {
        let h = SubgroupEstimate::from_algebra(&unitary_algebra(4).unwrap(), 4).unwrap();
        assert_eq!(h.dimension, 4);
        assert!(h.closure_residual() < 1e-12);
    }
}
