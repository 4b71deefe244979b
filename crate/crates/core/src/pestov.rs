//! Coefficients of the twisted Pestov identity, the quadratic curvature
//! bound, the degree cascade it drives and the pinching thresholds that
//! follow from it.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{cases_for, InvariantBundle};

/// Bisection stops once the bracket is narrower than this.
pub const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PestovCoefficients {
    pub n: u32,
    pub k: u32,
    /// `(n+k−2)(n+2k−4)/(n+k−3)`.
    pub lambda_minus: Ratio<i64>,
    /// `k(n+2k)/(k+1)`.
    pub lambda_plus: Ratio<i64>,
}

impl PestovCoefficients {
    pub fn lambda_minus_f64(&self) -> f64 {
        self.lambda_minus.to_f64().expect("small rational")
    }

    pub fn lambda_plus_f64(&self) -> f64 {
        self.lambda_plus.to_f64().expect("small rational")
    }
}

pub fn pestov_coeffs(n: u32, k: u32) -> Result<PestovCoefficients> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("Pestov coefficients need n ≥ 3, got {n}")));
    }
    if n + k == 3 {
        return Err(Error::PestovPole);
    }
    let (n, k) = (n as i64, k as i64);
    let lambda_minus = Ratio::new((n + k - 2) * (n + 2 * k - 4), n + k - 3);
    let lambda_plus = Ratio::new(k * (n + 2 * k), k + 1);
    Ok(PestovCoefficients { n: n as u32, k: k as u32, lambda_minus, lambda_plus })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBoundParams {
    /// Pinching constant in `(0, 1]`.
    pub delta: f64,
    /// Curvature constant `q(E)` of the twisted bundle.
    pub q: f64,
}

impl CurvatureBoundParams {
    pub fn new(delta: f64, q: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidInput(format!("pinching must lie in (0, 1], got {delta}")));
        }
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::InvalidInput(format!("q(E) must be finite and nonnegative, got {q}")));
        }
        Ok(CurvatureBoundParams { delta, q })
    }
}

/// Upper bound `F(k, δ)` for the curvature form on unit sections of degree `k`.
pub trait CurvatureModel: Sync {
    fn bound(&self, k: u32, delta: f64) -> f64;
}

/// The quadratic bound `−δk² + kq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticBound {
    pub q: f64,
}

impl CurvatureModel for QuadraticBound {
    fn bound(&self, k: u32, delta: f64) -> f64 {
        let k = k as f64;
        k * (self.q - delta * k)
    }
}

impl<F: Fn(u32, f64) -> f64 + Sync> CurvatureModel for F {
    fn bound(&self, k: u32, delta: f64) -> f64 {
        self(k, delta)
    }
}

pub fn curvature_bound(k: u32, params: &CurvatureBoundParams) -> f64 {
    QuadraticBound { q: params.q }.bound(k, params.delta)
}

/// Smallest `k ≥ 1` with `−δk² + kq ≤ 0`; the bound stays nonpositive beyond it.
pub fn cutoff_degree(params: &CurvatureBoundParams) -> u32 {
    // sign of −δk² + kq for k ≥ 1 is the sign of q − δk
    let mut k = ((params.q / params.delta).ceil() as u32).max(1);
    while k > 1 && params.q - params.delta * (k - 1) as f64 <= 0.0 {
        k -= 1;
    }
    while params.q - params.delta * k as f64 > 0.0 {
        k += 1;
    }
    k
}

/// Smallest `k ≥ 1` from which `model` stays nonpositive up to `k_limit`.
pub fn cutoff_degree_for(model: &dyn CurvatureModel, delta: f64, k_limit: u32) -> Option<u32> {
    if model.bound(k_limit, delta) > 0.0 {
        return None;
    }
    let mut k = k_limit;
    while k > 1 && model.bound(k - 1, delta) <= 0.0 {
        k -= 1;
    }
    Some(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeParity {
    Odd,
    Even,
    Any,
}

/// Largest Fourier degree of the requested parity left open for a
/// flow-invariant section.
///
/// The cascade gives `f_k = 0` for `k ≥ k₀ + 2`. For odd sections the top
/// component is a twisted conformal Killing tensor, so an odd top degree
/// `k ≥ 3` with a negative bound is excluded as well; degree 1 always
/// survives.
pub fn max_invariant_degree(params: &CurvatureBoundParams, parity: DegreeParity) -> u32 {
    let cap = cutoff_degree(params) + 1;
    match parity {
        DegreeParity::Any => cap,
        DegreeParity::Even => cap - cap % 2,
        DegreeParity::Odd => {
            let mut k = if cap % 2 == 1 { cap } else { cap - 1 };
            while k >= 3 && curvature_bound(k, params) < 0.0 {
                k -= 2;
            }
            k
        }
    }
}

/// Outcome of running the vanishing argument on a finite run of
/// `a_k = ‖X₋ f_k‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Cascade {
    /// Every `a_k` with `k ≥ k₀` vanishes.
    Vanishes { from: usize },
    /// A hypothesis fails at this index.
    HypothesisFails { at: usize, reason: String },
}

/// Runs the monotone-chain argument: nonnegative `a`, `a_k ≤ a_{k+2}` for
/// `k ≥ k₀` and a vanishing tail (the last two entries are the limit of
/// each parity chain) force `a_k = 0` for `k ≥ k₀`.
pub fn cascade_vanishing(a: &[f64], k0: usize, tail_tol: f64) -> Cascade {
    if let Some(i) = a.iter().position(|x| !(*x >= 0.0)) {
        return Cascade::HypothesisFails { at: i, reason: "negative norm".into() };
    }
    for k in k0..a.len().saturating_sub(2) {
        if a[k] > a[k + 2] {
            return Cascade::HypothesisFails { at: k, reason: "chain decreases".into() };
        }
    }
    let n = a.len();
    for k in n.saturating_sub(2).max(k0)..n {
        if a[k] > tail_tol {
            return Cascade::HypothesisFails { at: k, reason: "tail does not vanish".into() };
        }
    }
    // a_k ≤ a_{k+2} ≤ … ≤ tail ≤ tail_tol, walked back from the end
    Cascade::Vanishes { from: k0 }
}

/// Smallest `δ ∈ (0, 1]` beyond which no odd degree `≥ target` survives
/// for the given `q`.
pub fn pinching_threshold(q: f64, target_degree: u32) -> Result<f64> {
    if q <= 0.0 {
        return Ok(0.0);
    }
    let excluded = |delta: f64| -> bool {
        let p = CurvatureBoundParams { delta, q };
        max_invariant_degree(&p, DegreeParity::Odd) < target_degree
    };
    if !excluded(1.0) {
        return Err(Error::InvalidInput(format!(
            "q(E) = {q} leaves odd degree {target_degree} open for every pinching ≤ 1"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if excluded(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `q(E)` whose threshold equals `anchor`.
pub fn calibrate_q(anchor: f64, target_degree: u32) -> Result<f64> {
    if !(anchor > 0.0 && anchor <= 1.0) {
        return Err(Error::InvalidInput(format!("anchor pinching must lie in (0, 1], got {anchor}")));
    }
    // the threshold is linear in q
    let unit = pinching_threshold(1.0 / target_degree as f64, target_degree)? * target_degree as f64;
    Ok(anchor / unit)
}

/// Per-case curvature constant: given directly or back-solved from an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QEntry {
    Direct { q: f64 },
    Calibrated { anchor: f64 },
}

impl QEntry {
    pub fn resolve(&self, target_degree: u32) -> Result<f64> {
        match *self {
            QEntry::Direct { q } => Ok(q),
            QEntry::Calibrated { anchor } => calibrate_q(anchor, target_degree),
        }
    }
}

pub type QTable = BTreeMap<InvariantBundle, QEntry>;

/// Anchors: `δ(7) = 0.497` for Λ² (also used for Λ³), `0.277` for the
/// normal case and `0.557` for Sym².
pub fn anchored_q_table() -> QTable {
    BTreeMap::from([
        (InvariantBundle::Normal, QEntry::Calibrated { anchor: 0.277 }),
        (InvariantBundle::Lambda2, QEntry::Calibrated { anchor: 0.497 }),
        (InvariantBundle::Lambda3, QEntry::Calibrated { anchor: 0.497 }),
        (InvariantBundle::Sym2, QEntry::Calibrated { anchor: 0.557 }),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: u32,
    /// Case attaining the maximum; absent when topology rules out every reduction.
    pub case: Option<InvariantBundle>,
    pub k_cutoff: u32,
    pub delta_threshold: f64,
    /// `(k, −δk² + kq)` at the threshold for `k = 0..=k_cutoff + 2`.
    pub curve: Vec<(u32, f64)>,
}

pub fn threshold_curve(ns: &[u32], q_table: &QTable, target_degree: u32) -> Result<Vec<ThresholdReport>> {
    let mut missing: Vec<&str> = Vec::new();
    for &n in ns {
        for c in cases_for(n as usize)? {
            if !q_table.contains_key(&c) && !missing.contains(&c.tag()) {
                missing.push(c.tag());
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingCase(missing.join(", ")));
    }
    let resolved: BTreeMap<InvariantBundle, f64> =
        q_table.iter().map(|(c, e)| Ok((*c, e.resolve(target_degree)?))).collect::<Result<_>>()?;
    ns.par_iter()
        .map(|&n| {
            let mut best: Option<(InvariantBundle, f64, f64)> = None;
            for c in cases_for(n as usize)? {
                let q = resolved[&c];
                let t = pinching_threshold(q, target_degree)?;
                if best.is_none_or(|(_, bt, _)| t > bt) {
                    best = Some((c, t, q));
                }
            }
            Ok(match best {
                None => ThresholdReport { n, case: None, k_cutoff: 0, delta_threshold: 0.0, curve: Vec::new() },
                Some((c, t, _)) if t == 0.0 => {
                    ThresholdReport { n, case: Some(c), k_cutoff: 1, delta_threshold: 0.0, curve: Vec::new() }
                }
                Some((c, t, q)) => {
                    let p = CurvatureBoundParams { delta: t, q };
                    let k_cutoff = cutoff_degree(&p);
                    let curve = (0..=k_cutoff + 2).map(|k| (k, curvature_bound(k, &p))).collect();
                    ThresholdReport { n, case: Some(c), k_cutoff, delta_threshold: t, curve }
                }
            })
        })
        .collect()
}

/// `n,case,k_cutoff,delta_threshold` lines.
pub fn curve_csv(reports: &[ThresholdReport]) -> String {
    let mut s = String::from("n,case,k_cutoff,delta_threshold\n");
    for r in reports {
        let case = r.case.map(|c| c.tag()).unwrap_or("none");
        s.push_str(&format!("{},{},{},{:.12}\n", r.n, case, r.k_cutoff, r.delta_threshold));
    }
    s
}
