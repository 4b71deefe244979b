//! Birkhoff averages of fiber matrix coefficients along extension orbits.

use serde::{Deserialize, Serialize};

use super::step::ExtendedState;
use crate::error::{Error, Result};
use crate::group::standard_complex_structure;
use crate::linalg;

/// Shortest orbit accepted by [`fiber_equidistribution`].
pub const MIN_ORBIT_LEN: usize = 1000;
const BATCHES: usize = 32;

/// Matrix-coefficient test functions on the fiber. Each has zero mean for
/// Haar measure on SO(m) (for `ComplexStructureAlignment`, when m ≥ 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Observable {
    /// Entry `R_ij` of the standard representation.
    Entry { row: usize, col: usize },
    /// Character `tr R` of the standard representation.
    Trace,
    /// `⟨R J Rᵀ, J⟩ / m`: equal to 1 when the fiber commutes with `J`.
    ComplexStructureAlignment,
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::Entry { row, col } => format!("entry_{row}_{col}"),
            Observable::Trace => "trace".into(),
            Observable::ComplexStructureAlignment => "j_alignment".into(),
        }
    }

    fn evaluator(&self, m: usize) -> Result<Box<dyn Fn(&ExtendedState) -> f64>> {
        Ok(match *self {
            Observable::Entry { row, col } => {
                if row >= m || col >= m {
                    return Err(Error::InvalidInput(format!("entry ({row}, {col}) outside {m}×{m}")));
                }
                Box::new(move |s| s.fiber.matrix()[(row, col)])
            }
            Observable::Trace => Box::new(|s| s.fiber.matrix().trace()),
            Observable::ComplexStructureAlignment => {
                let j = standard_complex_structure(m)?;
                Box::new(move |s| {
                    let r = s.fiber.matrix();
                    linalg::frobenius_inner(&(r * &j * r.transpose()), &j) / m as f64
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionEntry {
    pub observable: Observable,
    pub average: f64,
    /// Batch-means standard error of the average.
    pub standard_error: f64,
    pub samples: usize,
}

/// Birkhoff averages of `tests` along `orbit`, each with a batch-means
/// standard error over 32 consecutive batches.
pub fn fiber_equidistribution<I>(orbit: I, tests: &[Observable]) -> Result<Vec<EquidistributionEntry>>
where
    I: IntoIterator<Item = ExtendedState>,
{
    if tests.is_empty() {
        return Err(Error::InvalidInput("no test functions given".into()));
    }
    let mut orbit = orbit.into_iter().peekable();
    let m = match orbit.peek() {
        Some(s) => s.fiber.dim(),
        None => return Err(Error::InsufficientData("empty orbit".into())),
    };
    let evals = tests.iter().map(|t| t.evaluator(m)).collect::<Result<Vec<_>>>()?;
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); tests.len()];
    for s in orbit {
        for (f, col) in evals.iter().zip(series.iter_mut()) {
            col.push(f(&s));
        }
    }
    let n = series[0].len();
    if n < MIN_ORBIT_LEN {
        return Err(Error::InsufficientData(format!("orbit of length {n} < {MIN_ORBIT_LEN}")));
    }
    Ok(tests
        .iter()
        .zip(&series)
        .map(|(t, xs)| {
            let (average, standard_error) = batch_means(xs, BATCHES);
            EquidistributionEntry { observable: *t, average, standard_error, samples: xs.len() }
        })
        .collect())
}

/// Mean and batch-means standard error; trailing samples that do not fill a
/// batch count towards the mean only.
pub fn batch_means(xs: &[f64], batches: usize) -> (f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let size = xs.len() / batches;
    if size == 0 || batches < 2 {
        return (mean, f64::NAN);
    }
    let means: Vec<f64> = xs.chunks_exact(size).take(batches).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    // shifted by the first batch so that constant series give exactly zero
    let d: Vec<f64> = means.iter().map(|x| x - means[0]).collect();
    let dbar = d.iter().sum::<f64>() / batches as f64;
    let var = d.iter().map(|x| (x - dbar).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}
