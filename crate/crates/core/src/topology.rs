//! Vector fields on spheres and the subgroups of `SO(n−1)` to which the
//! structure group of `S^{n−1}` may reduce, with the tensor each one fixes.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transitivity::models::{g2_algebra, g2_three_form, so_blocks, unitary_algebra};
use crate::transitivity::tensors::{fixed_tensors_of, Representation, KERNEL_THRESHOLD};

/// Largest `n` whose rows are checked against explicit matrix models.
pub const CONSISTENCY_MAX_N: usize = 20;

/// Radon–Hurwitz number: `ρ(n) = 2^b + 8c` for `n = odd·2^{b+4c}`, `0 ≤ b ≤ 3`.
pub fn radon_hurwitz(n: u64) -> u64 {
    assert!(n >= 1, "ρ(n) needs n ≥ 1");
    let e = n.trailing_zeros() as u64;
    (1 << (e % 4)) + 8 * (e / 4)
}

/// Maximal number of pointwise independent vector fields on `S^{n−1}`.
pub fn sphere_vector_fields(n: u64) -> u64 {
    radon_hurwitz(n) - 1
}

/// The bundle carrying the flow-invariant section for a given reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantBundle {
    Normal,
    Lambda2,
    Lambda3,
    Sym2,
}

impl InvariantBundle {
    pub const ALL: [InvariantBundle; 4] =
        [InvariantBundle::Normal, InvariantBundle::Lambda2, InvariantBundle::Lambda3, InvariantBundle::Sym2];

    /// Case number 1–4.
    pub fn number(&self) -> u8 {
        match self {
            InvariantBundle::Normal => 1,
            InvariantBundle::Lambda2 => 2,
            InvariantBundle::Lambda3 => 3,
            InvariantBundle::Sym2 => 4,
        }
    }

    pub fn representation(&self) -> Representation {
        match self {
            InvariantBundle::Normal => Representation::Standard,
            InvariantBundle::Lambda2 => Representation::Lambda2,
            InvariantBundle::Lambda3 => Representation::Lambda3,
            InvariantBundle::Sym2 => Representation::Sym2Traceless,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            InvariantBundle::Normal => "normal",
            InvariantBundle::Lambda2 => "lambda2",
            InvariantBundle::Lambda3 => "lambda3",
            InvariantBundle::Sym2 => "sym2",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.tag() == s || c.number().to_string() == s)
    }
}

impl fmt::Display for InvariantBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Subgroup {
    Unitary3,
    G2,
    E7,
    /// `SO(p) × SO(q)` block-diagonal.
    Product {
        p: usize,
        q: usize,
    },
    /// `SO(m) ⊂ SO(m + 1)` fixing a unit vector.
    Stabilizer {
        m: usize,
    },
}

impl Subgroup {
    pub fn label(&self) -> String {
        match self {
            Subgroup::Unitary3 => "U(3)".into(),
            Subgroup::G2 => "G2".into(),
            Subgroup::E7 => "E7".into(),
            Subgroup::Product { p, q } => format!("SO({p})xSO({q})"),
            Subgroup::Stabilizer { m } => format!("SO({m})"),
        }
    }
}

/// Whether the reduction is known to occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    /// Not excluded by topology.
    Candidate,
    /// Existence is an open question.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionCandidate {
    pub n: usize,
    pub group: Subgroup,
    pub bundle: InvariantBundle,
    pub rep: Representation,
    pub existence: Existence,
}

impl ReductionCandidate {
    fn new(n: usize, group: Subgroup, bundle: InvariantBundle) -> Self {
        let existence = if group == Subgroup::E7 { Existence::Unknown } else { Existence::Candidate };
        ReductionCandidate { n, group, bundle, rep: bundle.representation(), existence }
    }
}

/// Subgroups `K ⊊ SO(n−1)` containing, up to conjugation, any reduced
/// structure group of `S^{n−1}`.
pub fn reduction_candidates(n: usize) -> Result<Vec<ReductionCandidate>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("reductions are tabulated for n ≥ 3, got {n}")));
    }
    use InvariantBundle::*;
    let row = |g, b| ReductionCandidate::new(n, g, b);
    let rows = match n {
        7 => vec![row(Subgroup::Unitary3, Lambda2)],
        _ if n % 2 == 1 => Vec::new(),
        8 => {
            let mut v = vec![row(Subgroup::G2, Lambda3)];
            v.extend((1..=3).map(|p| row(Subgroup::Product { p, q: 7 - p }, Sym2)));
            v
        }
        134 => vec![row(Subgroup::E7, Lambda3), row(Subgroup::Stabilizer { m: 132 }, Normal)],
        _ if n % 4 == 2 => vec![row(Subgroup::Stabilizer { m: n - 2 }, Normal)],
        _ => (1..=(n - 2) / 2).map(|p| row(Subgroup::Product { p, q: n - 1 - p }, Sym2)).collect(),
    };
    Ok(rows)
}

/// Cases occurring for `n`, without repetition.
pub fn cases_for(n: usize) -> Result<Vec<InvariantBundle>> {
    let mut cases: Vec<InvariantBundle> = reduction_candidates(n)?.into_iter().map(|r| r.bundle).collect();
    cases.sort();
    cases.dedup();
    Ok(cases)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    Fail { reason: String },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCheck {
    pub n: usize,
    pub group: String,
    pub rep: Representation,
    pub kernel_dim: Option<usize>,
    pub residual: Option<f64>,
    #[serde(flatten)]
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub rows: Vec<RowCheck>,
    /// Vector-field parity facts violated, by `n`.
    pub parity_failures: Vec<String>,
    pub passed: bool,
}

impl ConsistencyReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = self.parity_failures.clone();
        for r in &self.rows {
            if let RowStatus::Fail { reason } = &r.status {
                out.push(format!("n={} {}: {reason}", r.n, r.group));
            }
        }
        out
    }
}

fn check_parity(n: usize) -> Option<String> {
    let rows = reduction_candidates(n).ok()?;
    let fields = sphere_vector_fields(n as u64);
    let has = |b: InvariantBundle| rows.iter().any(|r| r.bundle == b);
    let bad = match n % 4 {
        _ if n == 7 => !has(InvariantBundle::Lambda2),
        1 | 3 => !rows.is_empty(),
        2 => fields != 1 || !has(InvariantBundle::Normal),
        _ => fields < 3 || !has(InvariantBundle::Sym2),
    };
    bad.then(|| format!("n={n}: table rows disagree with {fields} vector field(s) on S^{}", n - 1))
}

/// Algebra of an explicit matrix model for `group` inside so(m).
fn model_algebra(group: &Subgroup, m: usize) -> Option<Vec<crate::group::SkewMatrix>> {
    match group {
        Subgroup::Unitary3 => unitary_algebra(m).ok(),
        Subgroup::G2 => Some(g2_algebra()),
        Subgroup::E7 => None,
        Subgroup::Product { p, q } => Some(so_blocks(&[*p, *q])),
        Subgroup::Stabilizer { m: k } => Some(so_blocks(&[1, *k])),
    }
}

fn expected_tensor(group: &Subgroup, m: usize) -> Option<Vec<f64>> {
    match group {
        Subgroup::Unitary3 => {
            let j = crate::group::standard_complex_structure(m).ok()?;
            Some(j.transpose().iter().copied().collect())
        }
        Subgroup::G2 => Some(g2_three_form()),
        Subgroup::Stabilizer { .. } => {
            let mut e = vec![0.0; m];
            e[0] = 1.0;
            Some(e)
        }
        Subgroup::Product { p, .. } => {
            // trace-free part of the projection onto the first p coordinates
            let frac = *p as f64 / m as f64;
            let mut t = vec![0.0; m * m];
            for i in 0..m {
                t[i * m + i] = if i < *p { 1.0 - frac } else { -frac };
            }
            Some(t)
        }
        Subgroup::E7 => None,
    }
}

fn check_row(row: &ReductionCandidate) -> RowCheck {
    let m = row.n - 1;
    let mut out = RowCheck {
        n: row.n,
        group: row.group.label(),
        rep: row.rep,
        kernel_dim: None,
        residual: None,
        status: RowStatus::Pass,
    };
    let Some(algebra) = model_algebra(&row.group, m) else {
        out.status = RowStatus::Skipped { reason: "no matrix model shipped".into() };
        return out;
    };
    let fixed = match fixed_tensors_of(&algebra, row.rep, m) {
        Ok(f) => f,
        Err(e) => {
            out.status = RowStatus::Fail { reason: e.to_string() };
            return out;
        }
    };
    out.kernel_dim = Some(fixed.len());
    out.residual = fixed.iter().map(|t| t.residual).reduce(f64::max);
    if fixed.len() != 1 {
        out.status = RowStatus::Fail { reason: format!("kernel dimension {} instead of 1", fixed.len()) };
        return out;
    }
    let t = &fixed[0];
    if t.residual >= KERNEL_THRESHOLD {
        out.status = RowStatus::Fail { reason: format!("residual {:.3e}", t.residual) };
        return out;
    }
    if let Some(expected) = expected_tensor(&row.group, m) {
        let norm = expected.iter().map(|x| x * x).sum::<f64>().sqrt();
        let overlap: f64 = t.coefficients.iter().zip(&expected).map(|(a, b)| a * b).sum::<f64>() / norm;
        if (overlap.abs() - 1.0).abs() > KERNEL_THRESHOLD {
            out.status =
                RowStatus::Fail { reason: format!("recovered tensor has overlap {overlap:.6} with the model") };
        }
    }
    out
}

/// Cross-checks the table against vector-field counts for `3 ≤ n ≤ parity_max`
/// and against the tensors fixed by explicit models for `n ≤ CONSISTENCY_MAX_N`.
pub fn consistency_check_up_to(parity_max: usize) -> ConsistencyReport {
    let parity_failures: Vec<String> = (3..=parity_max).filter_map(check_parity).collect();
    let mut candidates: Vec<ReductionCandidate> =
        (3..=CONSISTENCY_MAX_N).flat_map(|n| reduction_candidates(n).unwrap_or_default()).collect();
    // the E₇ row is table data only
    candidates.extend(reduction_candidates(134).unwrap_or_default().into_iter().filter(|r| r.group == Subgroup::E7));
    let rows: Vec<RowCheck> = candidates.par_iter().map(check_row).collect();
    let passed = parity_failures.is_empty() && rows.iter().all(|r| !matches!(r.status, RowStatus::Fail { .. }));
    ConsistencyReport { rows, parity_failures, passed }
}

pub fn consistency_check() -> ConsistencyReport {
    consistency_check_up_to(1000)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radon_hurwitz_values() {
        assert_eq!(radon_hurwitz(1), 1);
        assert_eq!(radon_hurwitz(2), 2);
        assert_eq!(radon_hurwitz(4), 4);
        assert_eq!(radon_hurwitz(8), 8);
        assert_eq!(radon_hurwitz(16), 9);
        assert_eq!(radon_hurwitz(32), 10);
        assert_eq!(radon_hurwitz(48), 9);
        assert_eq!(sphere_vector_fields(2), 1);
        assert_eq!(sphere_vector_fields(1), 0);
    }

    #[test]
    fn radon_hurwitz_against_published_table() {
        // ρ(n) for n = 1..=32
        let table = [1, 2, 1, 4, 1, 2, 1, 8, 1, 2, 1, 4, 1, 2, 1, 9, 1, 2, 1, 4, 1, 2, 1, 8, 1, 2, 1, 4, 1, 2, 1, 10];
        for (i, r) in table.iter().enumerate() {
            assert_eq!(radon_hurwitz(i as u64 + 1), *r, "n={}", i + 1);
        }
    }

    #[test]
    fn parity_facts_up_to_ten_thousand() {
        for n in 1..=10_000u64 {
            match n % 4 {
                2 => assert_eq!(sphere_vector_fields(n), 1),
                0 => assert!(sphere_vector_fields(n) >= 3),
                _ => assert_eq!(sphere_vector_fields(n), 0),
            }
        }
    }

    #[test]
    fn table_rows() {
        assert!(reduction_candidates(11).unwrap().is_empty());
        let seven = reduction_candidates(7).unwrap();
        assert_eq!(seven.len(), 1);
        assert_eq!((seven[0].group, seven[0].bundle), (Subgroup::Unitary3, InvariantBundle::Lambda2));
        let eight = reduction_candidates(8).unwrap();
        assert_eq!(eight[0].group, Subgroup::G2);
        assert_eq!(eight[0].rep, Representation::Lambda3);
        assert_eq!(eight.len(), 4);
        let e7 = reduction_candidates(134).unwrap();
        assert_eq!(e7[0].existence, Existence::Unknown);
        assert_eq!(e7[1].group, Subgroup::Stabilizer { m: 132 });
        assert_eq!(reduction_candidates(10).unwrap()[0].group, Subgroup::Stabilizer { m: 8 });
        let twelve = reduction_candidates(12).unwrap();
        assert_eq!(twelve.len(), 5);
        assert!(twelve.iter().all(|r| r.bundle == InvariantBundle::Sym2));
        assert!(reduction_candidates(2).is_err());
    }

    #[test]
    fn nonempty_exactly_for_even_n_or_seven() {
        for n in 3..=10_000 {
            let empty = reduction_candidates(n).unwrap().is_empty();
            assert_eq!(!empty, n % 2 == 0 || n == 7, "n={n}");
        }
    }

    #[test]
    fn consistency_passes() {
        let report = consistency_check_up_to(200);
        assert!(report.passed, "{:?}", report.failures());
        let u3 = report.rows.iter().find(|r| r.group == "U(3)").unwrap();
        assert_eq!(u3.kernel_dim, Some(1));
        let e7 = report.rows.iter().find(|r| r.group == "E7").unwrap();
        assert!(matches!(e7.status, RowStatus::Skipped { .. }));
    }

    #[test]
    fn case_tags_round_trip() {
        for c in InvariantBundle::ALL {
            assert_eq!(InvariantBundle::from_tag(c.tag()), Some(c));
            assert_eq!(InvariantBundle::from_tag(&c.number().to_string()), Some(c));
        }
    }
}
