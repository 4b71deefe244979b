//! Decomposition of a function on `S^{n−1}` into spherical-harmonic degrees.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{harmonic_projection, monomials_of_degree, sphere_area, Polynomial};
use super::quadrature::{pairwise_sum, SphereQuadrature};
use crate::error::{Error, Result};

/// Relative energy below which a degree counts as absent.
pub const DEGREE_THRESHOLD: f64 = 1e-8;
/// Largest `n` for which the full harmonic basis is used.
pub const FULL_BASIS_MAX_N: usize = 4;

/// A real function on the unit sphere together with the rule used to
/// integrate it.
pub struct FiberFunction<'a> {
    pub n: usize,
    pub eval: Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>,
    pub quadrature: SphereQuadrature,
}

impl<'a> FiberFunction<'a> {
    /// Wraps `f` with a product rule exact up to degree `exactness`.
    pub fn new<F>(n: usize, exactness: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync + 'a,
    {
        Ok(FiberFunction { n, eval: Box::new(f), quadrature: SphereQuadrature::product(n, exactness)? })
    }

    fn values(&self) -> Vec<f64> {
        self.quadrature.nodes.par_iter().map(|x| (self.eval)(x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degree {
    Finite(usize),
    ExceedsKMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    /// Orthonormal basis of every harmonic space (n ≤ 4).
    FullBasis,
    /// Reproducing (Gegenbauer) kernel double sums.
    Zonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSpectrum {
    /// `‖f_k‖²` for `k = 0..=k_max`.
    pub energies: Vec<f64>,
    /// `‖f‖²` over the sphere.
    pub total: f64,
    pub parity: Parity,
    pub degree: Degree,
    pub method: SpectrumMethod,
}

impl DegreeSpectrum {
    fn classify(energies: Vec<f64>, total: f64, method: SpectrumMethod) -> Self {
        let thr = DEGREE_THRESHOLD * total.max(f64::MIN_POSITIVE);
        let odd_free = energies.iter().skip(1).step_by(2).all(|e| *e < thr);
        let even_free = energies.iter().step_by(2).all(|e| *e < thr);
        let parity = match (odd_free, even_free) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        };
        let captured: f64 = energies.iter().sum();
        let degree = if total - captured > thr {
            Degree::ExceedsKMax
        } else {
            Degree::Finite(energies.iter().rposition(|e| *e > thr).unwrap_or(0))
        };
        DegreeSpectrum { energies, total, parity, degree, method }
    }

    /// `k,energy` lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,energy\n");
        for (k, e) in self.energies.iter().enumerate() {
            s.push_str(&format!("{k},{e:.16e}\n"));
        }
        s
    }
}

/// Dimension of the degree-k harmonic space on `S^{n−1}`.
pub fn harmonic_dimension(n: usize, k: usize) -> usize {
    let binom = |a: usize, b: usize| -> usize {
        if b > a {
            return 0;
        }
        (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
    };
    let total = binom(n + k - 1, k);
    if k >= 2 {
        total - binom(n + k - 3, k - 2)
    } else {
        total
    }
}

/// Gegenbauer-type polynomial normalized to 1 at `t = 1`: Chebyshev for
/// `n = 2`, Legendre for `n = 3`, `C_k^{(n−2)/2}(t)/C_k^{(n−2)/2}(1)` beyond.
pub fn normalized_gegenbauer(n: usize, k: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if n == 2 {
        return (k as f64 * t.clamp(-1.0, 1.0).acos()).cos();
    }
    let lam = (n as f64 - 2.0) / 2.0;
    // C_{j+1} = (2(j+λ) t C_j − (j+2λ−1) C_{j−1}) / (j+1), tracked with C_j(1)
    let (mut c0, mut c1) = (1.0, 2.0 * lam * t);
    let (mut o0, mut o1) = (1.0, 2.0 * lam);
    for j in 1..k {
        let jf = j as f64;
        let c2 = (2.0 * (jf + lam) * t * c1 - (jf + 2.0 * lam - 1.0) * c0) / (jf + 1.0);
        let o2 = (2.0 * (jf + lam) * o1 - (jf + 2.0 * lam - 1.0) * o0) / (jf + 1.0);
        c0 = c1;
        c1 = c2;
        o0 = o1;
        o1 = o2;
        // keep magnitudes tame for large k
        let s = o1.abs().max(1.0);
        c0 /= s;
        c1 /= s;
        o0 /= s;
        o1 /= s;
    }
    c1 / o1
}

fn check_resolution(f: &FiberFunction, k_max: usize) -> Result<()> {
    let q = &f.quadrature;
    if q.n != f.n {
        return Err(Error::InvalidInput("quadrature dimension mismatch".into()));
    }
    let err = q.constant_error();
    if err > 1e-8 {
        return Err(Error::Underresolved(format!("constants integrate with relative error {err:.3e}")));
    }
    if q.exactness < 2 * k_max {
        return Err(Error::Underresolved(format!(
            "rule exact to degree {} cannot resolve k_max = {k_max}",
            q.exactness
        )));
    }
    Ok(())
}

/// Energies of `f` in each degree `0..=k_max`.
pub fn degree_spectrum(f: &FiberFunction, k_max: usize) -> Result<DegreeSpectrum> {
    if f.n <= FULL_BASIS_MAX_N {
        degree_spectrum_with(f, k_max, SpectrumMethod::FullBasis)
    } else {
        degree_spectrum_with(f, k_max, SpectrumMethod::Zonal)
    }
}

pub fn degree_spectrum_with(f: &FiberFunction, k_max: usize, method: SpectrumMethod) -> Result<DegreeSpectrum> {
    check_resolution(f, k_max)?;
    if method == SpectrumMethod::FullBasis && f.n > FULL_BASIS_MAX_N {
        return Err(Error::InvalidInput(format!("full harmonic basis limited to n ≤ {FULL_BASIS_MAX_N}")));
    }
    let q = &f.quadrature;
    let vals = f.values();
    let total = pairwise_sum(&vals.iter().zip(&q.weights).map(|(v, w)| w * v * v).collect::<Vec<_>>());
    let energies: Vec<f64> = match method {
        SpectrumMethod::FullBasis => (0..=k_max).map(|k| full_basis_energy(q, &vals, k)).collect::<Result<_>>()?,
        SpectrumMethod::Zonal => zonal_energies(q, &vals, k_max),
    };
    Ok(DegreeSpectrum::classify(energies, total, method))
}

fn full_basis_energy(q: &SphereQuadrature, vals: &[f64], k: usize) -> Result<f64> {
    let n = q.n;
    let spanning: Vec<Polynomial> = monomials_of_degree(n, k)
        .into_iter()
        .map(|m| {
            let mut p = Polynomial::zero(n);
            p.add_term(m, 1.0);
            harmonic_projection(&p, k)
        })
        .collect();
    // columns √w · h(x) span the degree-k space in the discrete L²
    let sw: Vec<f64> = q.weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(q.len(), spanning.len(), |i, j| sw[i] * spanning[j].eval(&q.nodes[i]));
    let svd = a.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let rank_cols: Vec<usize> =
        (0..svd.singular_values.len()).filter(|i| svd.singular_values[*i] > 1e-9 * smax).collect();
    let expected = harmonic_dimension(n, k);
    if rank_cols.len() != expected {
        return Err(Error::Underresolved(format!(
            "degree {k} harmonic basis has rank {} instead of {expected}",
            rank_cols.len()
        )));
    }
    let fw: Vec<f64> = vals.iter().zip(&sw).map(|(v, s)| v * s).collect();
    Ok(rank_cols
        .iter()
        .map(|&c| {
            let col = u.column(c);
            pairwise_sum(&col.iter().zip(&fw).map(|(a, b)| a * b).collect::<Vec<_>>()).powi(2)
        })
        .sum())
}

/// Normalized Gegenbauer values for every degree `0..=k_max` at `t`.
fn gegenbauer_ladder(n: usize, k_max: usize, t: f64, norms: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    if k_max == 0 {
        return;
    }
    if n == 2 {
        let t = t.clamp(-1.0, 1.0);
        out[1] = t;
        for k in 1..k_max {
            out[k + 1] = 2.0 * t * out[k] - out[k - 1];
        }
        return;
    }
    let lam = (n as f64 - 2.0) / 2.0;
    let (mut c0, mut c1) = (1.0, 2.0 * lam * t);
    out[1] = c1 / norms[1];
    for j in 1..k_max {
        let jf = j as f64;
        let c2 = (2.0 * (jf + lam) * t * c1 - (jf + 2.0 * lam - 1.0) * c0) / (jf + 1.0);
        c0 = c1;
        c1 = c2;
        out[j + 1] = c1 / norms[j + 1];
    }
}

/// All zonal energies in one symmetric pass over node pairs.
fn zonal_energies(q: &SphereQuadrature, vals: &[f64], k_max: usize) -> Vec<f64> {
    let n = q.n;
    let norms: Vec<f64> = if n == 2 {
        vec![1.0; k_max + 1]
    } else {
        let lam = (n as f64 - 2.0) / 2.0;
        let mut o = vec![1.0; k_max + 1];
        if k_max >= 1 {
            o[1] = 2.0 * lam;
        }
        for j in 1..k_max {
            let jf = j as f64;
            o[j + 1] = (2.0 * (jf + lam) * o[j] - (jf + 2.0 * lam - 1.0) * o[j - 1]) / (jf + 1.0);
        }
        o
    };
    let fw: Vec<f64> = vals.iter().zip(&q.weights).map(|(v, w)| v * w).collect();
    let rows: Vec<Vec<f64>> = (0..q.len())
        .into_par_iter()
        .map(|a| {
            let xa = &q.nodes[a];
            let mut acc = vec![0.0; k_max + 1];
            let mut ladder = vec![0.0; k_max + 1];
            for b in a..q.len() {
                let t: f64 = xa.iter().zip(&q.nodes[b]).map(|(u, v)| u * v).sum();
                gegenbauer_ladder(n, k_max, t, &norms, &mut ladder);
                let mult = if b == a { 1.0 } else { 2.0 } * fw[b];
                for (s, g) in acc.iter_mut().zip(&ladder) {
                    *s += mult * g;
                }
            }
            acc.iter().map(|s| fw[a] * s).collect()
        })
        .collect();
    (0..=k_max)
        .map(|k| {
            let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            harmonic_dimension(n, k) as f64 / sphere_area(n) * pairwise_sum(&col)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::tensor::{pi_star, trace_free_project, SymTensor};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(n: usize, k: usize, seed: u64) -> SymTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = SymTensor::zero(n, k);
        for m in monomials_of_degree(n, k) {
            let idx: Vec<usize> = m.iter().map(|i| *i as usize).collect();
            t.set(&idx, rng.random_range(-1.0..1.0)).unwrap();
        }
        t
    }

    #[test]
    fn dimensions() {
        assert_eq!(harmonic_dimension(3, 4), 9);
        assert_eq!(harmonic_dimension(4, 3), 16);
        assert_eq!(harmonic_dimension(2, 5), 2);
        assert_eq!(harmonic_dimension(5, 0), 1);
    }

    #[test]
    fn gegenbauer_reduces_to_legendre() {
        let t: f64 = 0.3;
        let p2 = (3.0 * t * t - 1.0) / 2.0;
        assert!((normalized_gegenbauer(3, 2, t) - p2).abs() < 1e-15);
        assert!((normalized_gegenbauer(7, 5, 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_has_degree_zero() {
        let f = FiberFunction::new(3, 8, |_| 1.0).unwrap();
        let s = degree_spectrum(&f, 4).unwrap();
        assert_eq!(s.degree, Degree::Finite(0));
        assert_eq!(s.parity, Parity::Even);
        assert!((s.energies[0] - 4.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn pi_star_of_degree_three_is_pure() {
        let k = trace_free_project(&random_tensor(3, 3, 1));
        let f = FiberFunction::new(3, 10, |v| pi_star(&k, v).unwrap()).unwrap();
        let s = degree_spectrum(&f, 5).unwrap();
        assert_eq!(s.degree, Degree::Finite(3));
        assert_eq!(s.parity, Parity::Odd);
        for (j, e) in s.energies.iter().enumerate() {
            if j != 3 {
                assert!(*e < 1e-10 * s.total, "k={j}: {e}");
            }
        }
    }

    #[test]
    fn mixed_parity_example() {
        let f = FiberFunction::new(3, 8, |v| v[0] + (v[0] * v[0] - v[1] * v[1])).unwrap();
        let s = degree_spectrum(&f, 4).unwrap();
        assert_eq!(s.parity, Parity::Mixed);
        assert_eq!(s.degree, Degree::Finite(2));
        // ‖v₁‖² = 4π/3, ‖v₁² − v₂²‖² = 16π/15
        let pi = std::f64::consts::PI;
        assert!((s.energies[1] - 4.0 * pi / 3.0).abs() < 1e-10);
        assert!((s.energies[2] - 16.0 * pi / 15.0).abs() < 1e-10);
        assert!(s.energies[0].abs() < 1e-12);
    }

    #[test]
    fn non_trace_free_tensors_drop_by_two() {
        // K of degree 4 on ℝ⁴ splits into degrees 4, 2, 0
        let t = random_tensor(4, 4, 9);
        let p = t.to_polynomial();
        let f = FiberFunction::new(4, 8, |v| p.eval(v)).unwrap();
        let s = degree_spectrum(&f, 4).unwrap();
        assert!(s.energies[1] < 1e-12 * s.total && s.energies[3] < 1e-12 * s.total);
        assert!(s.energies[0] > 1e-6 && s.energies[2] > 1e-6 && s.energies[4] > 1e-6);
        // Plancherel
        assert!((s.energies.iter().sum::<f64>() - s.total).abs() < 1e-6 * s.total.max(1.0));
    }

    #[test]
    fn both_paths_agree() {
        for n in [3, 4] {
            let t = random_tensor(n, 3, 4);
            let p = t.to_polynomial();
            let f = FiberFunction::new(n, 6, |v| p.eval(v) + v[0] * v[0]).unwrap();
            let a = degree_spectrum_with(&f, 3, SpectrumMethod::FullBasis).unwrap();
            let b = degree_spectrum_with(&f, 3, SpectrumMethod::Zonal).unwrap();
            for (x, y) in a.energies.iter().zip(&b.energies) {
                assert!((x - y).abs() < 1e-9 * a.total, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn zonal_path_in_dimension_five() {
        let k = trace_free_project(&random_tensor(5, 2, 3));
        let f = FiberFunction::new(5, 6, |v| pi_star(&k, v).unwrap()).unwrap();
        let s = degree_spectrum(&f, 3).unwrap();
        assert_eq!(s.method, SpectrumMethod::Zonal);
        assert_eq!(s.degree, Degree::Finite(2));
        assert_eq!(s.parity, Parity::Even);
        assert!((s.energies[2] - s.total).abs() < 1e-9 * s.total);
    }

    #[test]
    fn too_coarse_rule_is_reported() {
        let f = FiberFunction::new(3, 4, |v| v[0]).unwrap();
        assert!(matches!(degree_spectrum(&f, 3), Err(Error::Underresolved(_))));
    }

    #[test]
    fn energy_beyond_k_max_is_flagged() {
        let f = FiberFunction::new(3, 12, |v| v[0].powi(5)).unwrap();
        let s = degree_spectrum(&f, 3).unwrap();
        assert_eq!(s.degree, Degree::ExceedsKMax);
        // Bessel
        assert!(s.energies.iter().sum::<f64>() <= s.total + 1e-6);
    }
}
