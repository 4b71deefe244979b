//! Dense linear-algebra helpers shared by the group, tensor and harmonic code.

use nalgebra::{DMatrix, DVector};

pub fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

pub fn skew_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a - a.transpose()) * 0.5
}

/// Principal logarithm of a matrix close to the identity, by the Mercator
/// series of `log(I + X)`. Returns `None` when `‖X‖_F >= radius` or the
/// radius is not inside the unit ball of convergence.
pub fn log_near_identity(a: &DMatrix<f64>, radius: f64) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let x = a - DMatrix::<f64>::identity(n, n);
    let r = x.norm();
    if r >= radius || radius > 1.0 {
        return None;
    }
    let mut out = DMatrix::<f64>::zeros(n, n);
    let mut power = x.clone();
    let mut k = 1usize;
    loop {
        let term = &power / k as f64;
        let tn = term.norm();
        if k % 2 == 1 {
            out += &term;
        } else {
            out -= &term;
        }
        if tn < 1e-18 || k > 400 {
            break;
        }
        power = &power * &x;
        k += 1;
    }
    Some(out)
}

/// Orthogonal polar factor `U Vᵀ` of a nearly orthogonal matrix.
pub fn polar_factor(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    u * vt
}

/// Orthonormal basis (columns) of the null space of `a`, treating singular
/// values below `threshold` as zero.
pub fn null_space(a: &DMatrix<f64>, threshold: f64) -> Vec<DVector<f64>> {
    let cols = a.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if a.nrows() == 0 {
        return (0..cols)
            .map(|i| {
                let mut v = DVector::zeros(cols);
                v[i] = 1.0;
                v
            })
            .collect();
    }
    // Pad short-and-wide inputs so the SVD returns a full set of right
    // singular vectors.
    let work = if a.nrows() < cols {
        let mut padded = DMatrix::<f64>::zeros(cols, cols);
        padded.rows_mut(0, a.nrows()).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let vt = svd.v_t.expect("requested Vᵀ");
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < threshold {
            out.push(vt.row(i).transpose());
        }
    }
    out
}

/// Gram–Schmidt step against an orthonormal list: returns the normalized
/// residual of `candidate` when its relative size exceeds `rel_tol`.
pub fn orthonormal_residual(basis: &[DMatrix<f64>], candidate: &DMatrix<f64>, rel_tol: f64) -> Option<DMatrix<f64>> {
    let norm0 = candidate.norm();
    if norm0 == 0.0 {
        return None;
    }
    let mut r = candidate.clone();
    // Two passes keep the basis orthonormal to working precision.
    for _ in 0..2 {
        for b in basis {
            let c = frobenius_inner(&r, b);
            r -= b * c;
        }
    }
    let rn = r.norm();
    if rn / norm0 > rel_tol {
        Some(r / rn)
    } else {
        None
    }
}

/// Distance of `candidate` from the span of an orthonormal list.
pub fn span_residual(basis: &[DMatrix<f64>], candidate: &DMatrix<f64>) -> f64 {
    let mut r = candidate.clone();
    for b in basis {
        let c = frobenius_inner(&r, b);
        r -= b * c;
    }
    r.norm()
}
