//! Tensors fixed by a subalgebra of so(m) in the standard representation,
//! Λ², Λ³ and the traceless symmetric square.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::algebra::SubgroupEstimate;
use crate::error::{Error, Result};
use crate::group::SkewMatrix;
use crate::linalg;

/// Singular values below this count as zero in the joint kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-8;
/// Largest m accepted for Λ³.
pub const MAX_LAMBDA3_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "lambda2")]
    Lambda2,
    #[serde(rename = "lambda3")]
    Lambda3,
    #[serde(rename = "sym2_0")]
    Sym2Traceless,
}

impl Representation {
    pub fn order(&self) -> usize {
        match self {
            Representation::Standard => 1,
            Representation::Lambda2 | Representation::Sym2Traceless => 2,
            Representation::Lambda3 => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Representation::Standard => "standard",
            Representation::Lambda2 => "Λ²",
            Representation::Lambda3 => "Λ³",
            Representation::Sym2Traceless => "Sym²₀",
        }
    }

    /// Canonical index tuples with the coordinate scale `⟨T, e_I⟩ = scale·T_I`
    /// of the orthonormal basis element attached to each.
    fn coordinates(&self, m: usize) -> Vec<(Vec<usize>, f64)> {
        match self {
            Representation::Standard => (0..m).map(|i| (vec![i], 1.0)).collect(),
            Representation::Lambda2 => pairs(m, false).into_iter().map(|p| (p, 2f64.sqrt())).collect(),
            Representation::Lambda3 => {
                let mut out = Vec::new();
                for i in 0..m {
                    for j in (i + 1)..m {
                        for k in (j + 1)..m {
                            out.push((vec![i, j, k], 6f64.sqrt()));
                        }
                    }
                }
                out
            }
            Representation::Sym2Traceless => pairs(m, true)
                .into_iter()
                .map(|p| {
                    let s = if p[0] == p[1] { 1.0 } else { 2f64.sqrt() };
                    (p, s)
                })
                .collect(),
        }
    }
}

fn pairs(m: usize, diagonal: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..m {
        let start = if diagonal { i } else { i + 1 };
        for j in start..m {
            out.push(vec![i, j]);
        }
    }
    out
}

fn permutations(idx: &[usize]) -> Vec<(Vec<usize>, f64)> {
    match idx.len() {
        1 => vec![(idx.to_vec(), 1.0)],
        2 => vec![(vec![idx[0], idx[1]], 1.0), (vec![idx[1], idx[0]], -1.0)],
        _ => {
            let (a, b, c) = (idx[0], idx[1], idx[2]);
            vec![
                (vec![a, b, c], 1.0),
                (vec![b, c, a], 1.0),
                (vec![c, a, b], 1.0),
                (vec![b, a, c], -1.0),
                (vec![a, c, b], -1.0),
                (vec![c, b, a], -1.0),
            ]
        }
    }
}

fn flat(idx: &[usize], m: usize) -> usize {
    idx.iter().fold(0, |acc, i| acc * m + i)
}

/// Full tensor of the orthonormal basis element at `idx`.
fn basis_tensor(rep: Representation, idx: &[usize], m: usize) -> Vec<f64> {
    let mut t = vec![0.0; m.pow(rep.order() as u32)];
    match rep {
        Representation::Sym2Traceless => {
            if idx[0] == idx[1] {
                t[flat(idx, m)] = 1.0;
            } else {
                let v = 1.0 / 2f64.sqrt();
                t[flat(&[idx[0], idx[1]], m)] = v;
                t[flat(&[idx[1], idx[0]], m)] = v;
            }
        }
        _ => {
            let perms = permutations(idx);
            let v = 1.0 / (perms.len() as f64).sqrt();
            for (p, sign) in perms {
                t[flat(&p, m)] = sign * v;
            }
        }
    }
    t
}

/// Orthonormal basis (as columns) of `{v ∈ span(k) : op v = 0}`.
fn restrict(k: &DMatrix<f64>, op: &DMatrix<f64>) -> DMatrix<f64> {
    let inner = linalg::null_space(&(op * k), KERNEL_THRESHOLD);
    let mut out = DMatrix::<f64>::zeros(k.nrows(), inner.len());
    for (j, v) in inner.iter().enumerate() {
        out.set_column(j, &(k * v));
    }
    out
}

/// Derivation action `Σ_slots X` of a skew matrix on a full tensor.
fn act(x: &DMatrix<f64>, t: &[f64], order: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    let mut idx = vec![0usize; order];
    for (pos, val) in t.iter().enumerate() {
        if *val == 0.0 {
            continue;
        }
        let mut rest = pos;
        for slot in (0..order).rev() {
            idx[slot] = rest % m;
            rest /= m;
        }
        for slot in 0..order {
            let i = idx[slot];
            let stride = m.pow((order - 1 - slot) as u32);
            let base = pos - i * stride;
            for d in 0..m {
                let xv = x[(d, i)];
                if xv != 0.0 {
                    out[base + d * stride] += xv * val;
                }
            }
        }
    }
    out
}

/// Group action `g ⊗ ⋯ ⊗ g` on a full tensor, by successive mode products.
fn act_group(g: &DMatrix<f64>, t: &[f64], order: usize, m: usize) -> Vec<f64> {
    let mut cur = t.to_vec();
    for slot in 0..order {
        let stride = m.pow((order - 1 - slot) as u32);
        let mut next = vec![0.0; cur.len()];
        for (pos, val) in cur.iter().enumerate() {
            if *val == 0.0 {
                continue;
            }
            let i = (pos / stride) % m;
            let base = pos - i * stride;
            for d in 0..m {
                next[base + d * stride] += g[(d, i)] * val;
            }
        }
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantTensor {
    pub representation: Representation,
    pub dim: usize,
    /// Full tensor, row-major, unit Frobenius norm.
    pub coefficients: Vec<f64>,
    /// `max_X ‖exp(X)·T − T‖` over the algebra basis.
    pub residual: f64,
}

impl InvariantTensor {
    /// Order-2 tensors as an m×m matrix.
    pub fn as_matrix(&self) -> Option<DMatrix<f64>> {
        (self.representation.order() == 2).then(|| DMatrix::from_row_slice(self.dim, self.dim, &self.coefficients))
    }
}

/// Orthonormal basis of the tensors in `rep` killed by every element of
/// `h`'s algebra.
pub fn fixed_tensors(h: &SubgroupEstimate, rep: Representation, m: usize) -> Result<Vec<InvariantTensor>> {
    fixed_tensors_of(&h.algebra_basis, rep, m)
}

pub fn fixed_tensors_of(algebra: &[SkewMatrix], rep: Representation, m: usize) -> Result<Vec<InvariantTensor>> {
    if rep == Representation::Lambda3 && m > MAX_LAMBDA3_DIM {
        return Err(Error::InvalidInput(format!("Λ³ limited to m ≤ {MAX_LAMBDA3_DIM}, got {m}")));
    }
    if algebra.iter().any(|x| x.dim() != m) {
        return Err(Error::InvalidInput("algebra dimension mismatch".into()));
    }
    let order = rep.order();
    let coords = rep.coordinates(m);
    let n = coords.len();
    let basis: Vec<Vec<f64>> = coords.iter().map(|(idx, _)| basis_tensor(rep, idx, m)).collect();
    let read =
        |t: &[f64]| -> DVector<f64> { DVector::from_iterator(n, coords.iter().map(|(idx, s)| s * t[flat(idx, m)])) };
    // Joint kernel built one operator at a time: each new operator is
    // restricted to the kernel of the previous ones.
    let mut kernel = DMatrix::<f64>::identity(n, n);
    if rep == Representation::Sym2Traceless {
        // trace functional: only diagonal basis elements contribute
        let trace = DMatrix::from_fn(1, n, |_, j| if coords[j].0[0] == coords[j].0[1] { 1.0 } else { 0.0 });
        kernel = restrict(&kernel, &trace);
    }
    for x in algebra {
        if kernel.ncols() == 0 {
            break;
        }
        let mut op = DMatrix::<f64>::zeros(n, n);
        for (j, b) in basis.iter().enumerate() {
            op.set_column(j, &read(&act(x.matrix(), b, order, m)));
        }
        kernel = restrict(&kernel, &op);
    }
    let kernel: Vec<DVector<f64>> = kernel.column_iter().map(|c| c.into_owned()).collect();
    let groups: Vec<DMatrix<f64>> = algebra.iter().map(|x| x.exp().into_matrix()).collect();
    Ok(kernel
        .into_iter()
        .map(|v| {
            let mut t = vec![0.0; m.pow(order as u32)];
            for (c, b) in v.iter().zip(&basis) {
                for (ti, bi) in t.iter_mut().zip(b) {
                    *ti += c * bi;
                }
            }
            let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
            t.iter_mut().for_each(|x| *x /= norm);
            let residual = groups
                .iter()
                .map(|g| {
                    let gt = act_group(g, &t, order, m);
                    gt.iter().zip(&t).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                })
                .fold(0.0, f64::max);
            InvariantTensor { representation: rep, dim: m, coefficients: t, residual }
        })
        .collect())
}
