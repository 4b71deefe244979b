//! Sparse real polynomials in `n` variables with monomials stored as sorted
//! multisets of variable indices (`x₀²x₂` is `[0, 0, 2]`).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub type Monomial = Vec<u16>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub n: usize,
    pub terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Vec::new(), c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn variable(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![i as u16], 1.0);
        p
    }

    /// `|x|² = Σ x_i²`.
    pub fn norm_squared(n: usize) -> Self {
        let mut p = Self::zero(n);
        for i in 0..n {
            p.add_term(vec![i as u16, i as u16], 1.0);
        }
        p
    }

    pub fn add_term(&mut self, mut mono: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        mono.sort_unstable();
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| *c == 0.0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.len()).max()
    }

    pub fn scale(&self, c: f64) -> Self {
        Polynomial { n: self.n, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        let mut out = Self::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut m = Vec::with_capacity(a.len() + b.len());
                m.extend_from_slice(a);
                m.extend_from_slice(b);
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let v = i as u16;
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.iter().filter(|x| **x == v).count();
            if e == 0 {
                continue;
            }
            let pos = m.iter().position(|x| *x == v).expect("present");
            let mut r = m.clone();
            r.remove(pos);
            out.add_term(r, c * e as f64);
        }
        out
    }

    /// Euclidean Laplacian `Σ ∂²/∂x_i²`.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut i = 0;
            while i < m.len() {
                let v = m[i];
                let e = m[i..].iter().take_while(|x| **x == v).count();
                if e >= 2 {
                    let mut r = m.clone();
                    r.drain(i..i + 2);
                    out.add_term(r, c * (e * (e - 1)) as f64);
                }
                i += e;
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.iter().map(|i| x[*i as usize]).product::<f64>()).sum()
    }

    /// Exact integral over the unit sphere `S^{n−1}` (surface measure).
    pub fn sphere_integral(&self) -> f64 {
        self.terms.iter().map(|(m, c)| c * monomial_sphere_integral(m, self.n)).sum()
    }
}

/// `Γ(h/2)` for a positive integer `h`.
pub fn gamma_half(h: u32) -> f64 {
    assert!(h > 0, "Γ(0) is a pole");
    let (mut g, mut x) = if h % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < h as f64 / 2.0 - 1e-9 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `|S^{n−1}| = 2π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n as u32)
}

/// `∫_{S^{n−1}} x^α = |S^{n−1}| Π(α_i − 1)!! / (n (n+2) ⋯ (n + |α| − 2))`
/// when every exponent is even, zero otherwise.
pub fn monomial_sphere_integral(m: &[u16], n: usize) -> f64 {
    let mut num = 1.0;
    let mut i = 0;
    while i < m.len() {
        let v = m[i];
        let e = m[i..].iter().take_while(|x| **x == v).count();
        if e % 2 == 1 {
            return 0.0;
        }
        let mut df = 1.0;
        let mut j = e as i64 - 1;
        while j > 1 {
            df *= j as f64;
            j -= 2;
        }
        num *= df;
        i += e;
    }
    let d = m.len();
    let mut den = 1.0;
    let mut j = n;
    while j < n + d {
        den *= j as f64;
        j += 2;
    }
    sphere_area(n) * num / den
}

/// All sorted multisets of size `k` over `0..n`.
pub fn monomials_of_degree(n: usize, k: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i as u16);
            rec(n, k, i, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Harmonic part of a homogeneous polynomial of degree `k`:
/// `H[p] = Σ_j c_j |x|^{2j} Δ^j p` with
/// `c_j = (−1)^j / (2^j j! Π_{i=1}^{j} (n + 2k − 2 − 2i))`.
pub fn harmonic_projection(p: &Polynomial, k: usize) -> Polynomial {
    let n = p.n;
    let r2 = Polynomial::norm_squared(n);
    let mut out = p.clone();
    let mut lap = p.clone();
    let mut rpow = Polynomial::constant(n, 1.0);
    let mut c = 1.0;
    for j in 1..=k / 2 {
        lap = lap.laplacian();
        if lap.is_zero() {
            break;
        }
        rpow = rpow.mul(&r2);
        let denom = (n + 2 * k) as f64 - 2.0 - 2.0 * j as f64;
        c *= -1.0 / (2.0 * j as f64 * denom);
        out = out.add(&rpow.mul(&lap).scale(c));
    }
    out
}
