//! Newtypes for SO(m) elements and so(m) elements.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance for the orthogonality and determinant checks on construction.
pub const ROTATION_TOL: f64 = 1e-10;
/// Tolerance for the skew-symmetry check on construction.
pub const SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix(DMatrix<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

impl RotationMatrix {
    pub fn identity(m: usize) -> Self {
        RotationMatrix(DMatrix::identity(m, m))
    }

    /// Checked constructor: `‖RᵀR − I‖∞ < 1e−10` and `det R = 1 ± 1e−10`.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidInput("rotation must be square".into()));
        }
        let r = RotationMatrix(entries);
        let res = r.orthogonality_residual();
        if res >= ROTATION_TOL {
            return Err(Error::InvalidInput(format!("orthogonality residual {res:.3e} exceeds {ROTATION_TOL:e}")));
        }
        let det = r.0.determinant();
        if (det - 1.0).abs() >= ROTATION_TOL {
            return Err(Error::InvalidInput(format!("determinant {det} is not +1")));
        }
        Ok(r)
    }

    /// Wraps a product of rotations without re-checking it.
    pub(crate) fn from_unchecked(entries: DMatrix<f64>) -> Self {
        RotationMatrix(entries)
    }

    pub fn from_rows(m: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != m * m {
            return Err(Error::InvalidInput(format!("expected {} entries, got {}", m * m, rows.len())));
        }
        Self::new(DMatrix::from_row_slice(m, m, rows))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn compose(&self, other: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> RotationMatrix {
        RotationMatrix(self.0.transpose())
    }

    /// `‖RᵀR − I‖∞` (max-entry norm).
    pub fn orthogonality_residual(&self) -> f64 {
        let m = self.dim();
        linalg::max_abs(&(self.0.transpose() * &self.0 - DMatrix::<f64>::identity(m, m)))
    }

    /// Replaces the matrix by its orthogonal polar factor. Right-equivariant:
    /// `(R g).reorthonormalized() = R.reorthonormalized() g` for orthogonal `g`.
    pub fn reorthonormalized(&self) -> RotationMatrix {
        RotationMatrix(linalg::polar_factor(&self.0))
    }

    pub fn distance(&self, other: &RotationMatrix) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub fn conjugate_by(&self, g: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(&g.0 * &self.0 * g.0.transpose())
    }

    /// Principal logarithm when `‖R − I‖_F < radius`.
    pub fn log(&self, radius: f64) -> Option<SkewMatrix> {
        linalg::log_near_identity(&self.0, radius).map(|l| SkewMatrix(linalg::skew_part(&l)))
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        let m = self.dim();
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Haar-distributed rotation built as a product of Givens rotations
    /// with uniform angles over every coordinate plane, applied in
    /// several sweeps; suitable for tests, not a certified Haar sampler.
    pub fn random_givens<R: Rng + ?Sized>(m: usize, rng: &mut R) -> RotationMatrix {
        let mut g = DMatrix::<f64>::identity(m, m);
        for _ in 0..3 {
            for i in 0..m {
                for j in (i + 1)..m {
                    let theta = rng.random_range(0.0..std::f64::consts::TAU);
                    let (s, c) = theta.sin_cos();
                    for row in 0..m {
                        let a = g[(row, i)];
                        let b = g[(row, j)];
                        g[(row, i)] = c * a - s * b;
                        g[(row, j)] = s * a + c * b;
                    }
                }
            }
        }
        RotationMatrix(g)
    }
}

impl SkewMatrix {
    pub fn zeros(m: usize) -> Self {
        SkewMatrix(DMatrix::zeros(m, m))
    }

    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidInput("skew matrix must be square".into()));
        }
        let res = linalg::max_abs(&(&entries + entries.transpose()));
        if res >= SKEW_TOL {
            return Err(Error::InvalidInput(format!("skew-symmetry residual {res:.3e} exceeds {SKEW_TOL:e}")));
        }
        Ok(SkewMatrix(entries))
    }

    /// Takes the skew part of an arbitrary square matrix.
    pub fn from_skew_part(entries: &DMatrix<f64>) -> Self {
        SkewMatrix(linalg::skew_part(entries))
    }

    /// `E_ij = e_i e_jᵀ − e_j e_iᵀ`.
    pub fn elementary(m: usize, i: usize, j: usize) -> Self {
        let mut e = DMatrix::zeros(m, m);
        e[(i, j)] = 1.0;
        e[(j, i)] = -1.0;
        SkewMatrix(e)
    }

    pub fn random<R: Rng + ?Sized>(m: usize, scale: f64, rng: &mut R) -> Self {
        let mut e = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in (i + 1)..m {
                let x: f64 = rng.sample(StandardNormal);
                e[(i, j)] = scale * x;
                e[(j, i)] = -scale * x;
            }
        }
        SkewMatrix(e)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn exp(&self) -> RotationMatrix {
        RotationMatrix(self.0.clone().exp())
    }

    pub fn bracket(&self, other: &SkewMatrix) -> SkewMatrix {
        SkewMatrix(linalg::commutator(&self.0, &other.0))
    }

    pub fn scale(&self, c: f64) -> SkewMatrix {
        SkewMatrix(&self.0 * c)
    }

    pub fn add(&self, other: &SkewMatrix) -> SkewMatrix {
        SkewMatrix(&self.0 + &other.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Serializable row-major form used in reports.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixRecord {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl From<&DMatrix<f64>> for MatrixRecord {
    fn from(m: &DMatrix<f64>) -> Self {
        MatrixRecord {
            dim: m.nrows(),
            rows: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect(),
        }
    }
}

/// Standard complex structure on ℝ^m (m even): blocks `[[0, −1], [1, 0]]`.
pub fn standard_complex_structure(m: usize) -> Result<DMatrix<f64>> {
    if m % 2 != 0 || m == 0 {
        return Err(Error::InvalidInput(format!("complex structure needs even m, got {m}")));
    }
    let mut j = DMatrix::zeros(m, m);
    for b in 0..m / 2 {
        j[(2 * b, 2 * b + 1)] = -1.0;
        j[(2 * b + 1, 2 * b)] = 1.0;
    }
    Ok(j)
}
