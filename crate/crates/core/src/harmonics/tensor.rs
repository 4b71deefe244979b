//! Symmetric tensors stored by sorted multi-index, their trace-free parts
//! and the identification `K ↦ K(v, …, v)/k!` with functions on the sphere.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poly::{harmonic_projection, monomials_of_degree, Polynomial};
use crate::error::{Error, Result};

/// Contractions below this count as zero.
pub const TRACE_FREE_TOL: f64 = 1e-10;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `k!/α!`: number of index tuples with the given sorted multi-index.
pub fn multiplicity(idx: &[u16]) -> f64 {
    let mut denom = 1.0;
    let mut i = 0;
    while i < idx.len() {
        let e = idx[i..].iter().take_while(|x| **x == idx[i]).count();
        denom *= factorial(e);
        i += e;
    }
    factorial(idx.len()) / denom
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    pub n: usize,
    pub k: usize,
    #[serde(with = "entry_list")]
    entries: BTreeMap<Vec<u16>, f64>,
}

mod entry_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<u16>, f64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Vec<u16>, f64>, D::Error> {
        let v: Vec<(Vec<u16>, f64)> = Vec::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

impl SymTensor {
    pub fn zero(n: usize, k: usize) -> Self {
        SymTensor { n, k, entries: BTreeMap::new() }
    }

    /// The metric `δ` as a degree-2 tensor.
    pub fn identity(n: usize) -> Self {
        let mut t = Self::zero(n, 2);
        for i in 0..n {
            t.set(&[i, i], 1.0).expect("in range");
        }
        t
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut t = Self::zero(values.len(), 2);
        for (i, v) in values.iter().enumerate() {
            t.set(&[i, i], *v).expect("in range");
        }
        t
    }

    /// Sets the component at `idx` (any order) and all its permutations.
    /// Independent uniform entries in `[−1, 1)` for every sorted multi-index.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut t = Self::zero(n, k);
        for m in monomials_of_degree(n, k) {
            t.entries.insert(m, rng.random_range(-1.0..1.0));
        }
        t
    }

    pub fn set(&mut self, idx: &[usize], value: f64) -> Result<()> {
        if idx.len() != self.k || idx.iter().any(|i| *i >= self.n) {
            return Err(Error::InvalidInput(format!("index {idx:?} invalid for n={}, k={}", self.n, self.k)));
        }
        if !value.is_finite() {
            return Err(Error::InvalidInput("non-finite tensor entry".into()));
        }
        let mut key: Vec<u16> = idx.iter().map(|i| *i as u16).collect();
        key.sort_unstable();
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut key: Vec<u16> = idx.iter().map(|i| *i as u16).collect();
        key.sort_unstable();
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u16>, &f64)> {
        self.entries.iter()
    }

    /// Full Frobenius norm `(Σ over all index tuples K²)^{1/2}`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|(i, v)| multiplicity(i) * v * v).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &SymTensor) -> SymTensor {
        let mut out = self.clone();
        for (i, v) in &other.entries {
            let e = out.entries.entry(i.clone()).or_insert(0.0);
            *e -= v;
        }
        out.entries.retain(|_, v| *v != 0.0);
        out
    }

    /// `p(v) = K(v, …, v) = Σ_I (k!/α!) K_I v^α`.
    pub fn to_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::zero(self.n);
        for (i, v) in &self.entries {
            p.add_term(i.clone(), multiplicity(i) * v);
        }
        p
    }

    /// Inverse of [`to_polynomial`](Self::to_polynomial) for homogeneous
    /// polynomials of degree `k`.
    pub fn from_polynomial(p: &Polynomial, k: usize) -> Self {
        let mut t = Self::zero(p.n, k);
        for (i, c) in &p.terms {
            debug_assert_eq!(i.len(), k);
            if *c != 0.0 {
                t.entries.insert(i.clone(), c / multiplicity(i));
            }
        }
        t
    }

    /// Contraction of the first two slots, `Σ_a K_{a a i₃ … i_k}`.
    pub fn contraction(&self) -> Option<SymTensor> {
        if self.k < 2 {
            return None;
        }
        // Δ K(x, …, x) = k(k − 1) (tr K)(x, …, x)
        let lap = self.to_polynomial().laplacian();
        let kk = (self.k * (self.k - 1)) as f64;
        Some(SymTensor::from_polynomial(&lap.scale(1.0 / kk), self.k - 2))
    }

    /// Largest entry of the two-slot contraction (zero for k < 2).
    pub fn max_contraction(&self) -> f64 {
        self.contraction().map(|c| c.entries.values().fold(0.0_f64, |a, v| a.max(v.abs()))).unwrap_or(0.0)
    }
}

/// A symmetric tensor all of whose contractions vanish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymTensor", into = "SymTensor")]
pub struct TraceFreeSymTensor(SymTensor);

impl TryFrom<SymTensor> for TraceFreeSymTensor {
    type Error = Error;

    fn try_from(t: SymTensor) -> Result<Self> {
        let c = t.max_contraction();
        if c >= TRACE_FREE_TOL {
            return Err(Error::InvalidInput(format!("tensor has contraction {c:.3e}")));
        }
        Ok(TraceFreeSymTensor(t))
    }
}

impl From<TraceFreeSymTensor> for SymTensor {
    fn from(t: TraceFreeSymTensor) -> SymTensor {
        t.0
    }
}

impl TraceFreeSymTensor {
    pub fn tensor(&self) -> &SymTensor {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.k
    }

    pub fn dim(&self) -> usize {
        self.0.n
    }
}

/// Orthogonal projection onto trace-free tensors: the harmonic part of
/// `K(x, …, x)`, read back as a tensor.
pub fn trace_free_project(k_tensor: &SymTensor) -> TraceFreeSymTensor {
    let p = k_tensor.to_polynomial();
    let h = harmonic_projection(&p, k_tensor.k);
    let mut t = SymTensor::from_polynomial(&h, k_tensor.k);
    t.entries.retain(|_, v| v.abs() > 1e-300);
    TraceFreeSymTensor(t)
}

/// `π*(K)(v) = K(v, …, v)/k!` on the unit sphere.
pub fn pi_star(k_tensor: &TraceFreeSymTensor, v: &[f64]) -> Result<f64> {
    let t = &k_tensor.0;
    if v.len() != t.n {
        return Err(Error::InvalidInput(format!("vector of length {} for n = {}", v.len(), t.n)));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("|v| = {norm} is not 1")));
    }
    Ok(t.to_polynomial().eval(v) / factorial(t.k))
}

/// Rayleigh quotient `∫|∇_S p|² / ∫p²` of `p = π*(K)` with exact sphere
/// moments, using `|∇_S p|² = |∇p|² − k² p²` for homogeneous `p`.
pub fn vertical_laplacian_eigencheck(k_tensor: &TraceFreeSymTensor) -> Result<f64> {
    let t = &k_tensor.0;
    let p = t.to_polynomial().scale(1.0 / factorial(t.k));
    if p.is_zero() {
        return Err(Error::InvalidInput("zero tensor has no eigenvalue".into()));
    }
    let p2 = p.mul(&p);
    let mut grad2 = Polynomial::zero(t.n);
    for i in 0..t.n {
        let d = p.partial(i);
        if !d.is_zero() {
            grad2 = grad2.add(&d.mul(&d));
        }
    }
    let kk = (t.k * t.k) as f64;
    let num = grad2.sphere_integral() - kk * p2.sphere_integral();
    Ok(num / p2.sphere_integral())
}

/// `k(n + k − 2)`, the eigenvalue on degree-k spherical harmonics.
pub fn laplace_eigenvalue(n: usize, k: usize) -> f64 {
    (k * (n + k)) as f64 - 2.0 * k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(n: usize, k: usize, rng: &mut ChaCha8Rng) -> SymTensor {
        let mut t = SymTensor::zero(n, k);
        for m in super::super::poly::monomials_of_degree(n, k) {
            let idx: Vec<usize> = m.iter().map(|i| *i as usize).collect();
            t.set(&idx, rng.random_range(-1.0..1.0)).unwrap();
        }
        t
    }

    #[test]
    fn identity_projects_to_zero() {
        let t = trace_free_project(&SymTensor::identity(5));
        assert!(t.tensor().frobenius_norm() < 1e-14);
    }

    #[test]
    fn trace_free_input_is_unchanged() {
        let k = SymTensor::diagonal(&[1.0, -1.0, 0.0]);
        let t = trace_free_project(&k);
        assert!(t.tensor().sub(&k).frobenius_norm() < 1e-15);
    }

    #[test]
    fn subtracts_the_trace_multiple() {
        // K − (tr K / n) Id, contraction oracle
        let k = SymTensor::diagonal(&[2.0, 1.0, 1.0]);
        let t = trace_free_project(&k);
        let oracle = SymTensor::diagonal(&[2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]);
        assert!(t.tensor().sub(&oracle).frobenius_norm() < 1e-14);
        assert!(t.tensor().max_contraction() < 1e-15);
    }

    #[test]
    fn projection_is_idempotent_and_trace_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, k) in [(3, 3), (4, 4), (5, 6), (7, 3), (150, 2)] {
            let t = random_tensor(n, k, &mut rng);
            let p = trace_free_project(&t);
            assert!(p.tensor().max_contraction() < TRACE_FREE_TOL, "n={n} k={k}");
            let pp = trace_free_project(p.tensor());
            assert!(pp.tensor().sub(p.tensor()).frobenius_norm() < 1e-10);
            // orthogonal projection: the removed part is orthogonal to the image
            let removed = t.sub(p.tensor());
            let ip: f64 = p
                .tensor()
                .entries()
                .map(|(i, v)| multiplicity(i) * v * removed.get(&i.iter().map(|x| *x as usize).collect::<Vec<_>>()))
                .sum();
            assert!(ip.abs() < 1e-10);
        }
    }

    #[test]
    fn sparse_high_dimension() {
        let mut t = SymTensor::zero(150, 6);
        t.set(&[0, 0, 1, 1, 2, 3], 1.0).unwrap();
        let p = trace_free_project(&t);
        assert!(p.tensor().max_contraction() < TRACE_FREE_TOL);
    }

    #[test]
    fn pi_star_values() {
        let mut e1 = SymTensor::zero(3, 1);
        e1.set(&[0], 1.0).unwrap();
        let e1 = TraceFreeSymTensor::try_from(e1).unwrap();
        let v = [0.6, 0.0, 0.8];
        assert_eq!(pi_star(&e1, &v).unwrap(), 0.6);
        let k = TraceFreeSymTensor::try_from(SymTensor::diagonal(&[1.0, -1.0, 0.0])).unwrap();
        assert!((pi_star(&k, &[1.0, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        let z = TraceFreeSymTensor::try_from(SymTensor::zero(3, 4)).unwrap();
        assert_eq!(pi_star(&z, &v).unwrap(), 0.0);
        assert!(pi_star(&k, &[1.0, 1.0, 0.0]).is_err());
        assert!(TraceFreeSymTensor::try_from(SymTensor::identity(3)).is_err());
    }

    #[test]
    fn odd_degree_gives_odd_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = trace_free_project(&random_tensor(4, 3, &mut rng));
        let v = [0.5, -0.5, 0.5, 0.5];
        let w: Vec<f64> = v.iter().map(|x| -x).collect();
        assert_eq!(pi_star(&k, &v).unwrap(), -pi_star(&k, &w).unwrap());
    }

    #[test]
    fn eigenvalues_match_k_n_plus_k_minus_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, k, expected) in [(3, 1, 2.0), (3, 2, 6.0)] {
            let t = trace_free_project(&random_tensor(n, k, &mut rng));
            assert!((vertical_laplacian_eigencheck(&t).unwrap() - expected).abs() < 1e-6);
        }
        for n in 2..7 {
            for k in 0..5 {
                let t = trace_free_project(&random_tensor(n, k, &mut rng));
                let ev = vertical_laplacian_eigencheck(&t).unwrap();
                assert!((ev - laplace_eigenvalue(n, k)).abs() < 1e-6, "n={n} k={k}: {ev}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let k = SymTensor::diagonal(&[1.0, -1.0, 0.0]);
        let s = serde_json::to_string(&k).unwrap();
        assert!(s.contains("[[0,0],1.0]"));
        let back: SymTensor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
    }
}
