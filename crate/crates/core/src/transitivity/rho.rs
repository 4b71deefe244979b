//! Brin's representation of homoclinic loops at the fixed point 0.
//!
//! A homoclinic point `p` closes a loop 0 → p along `W^u(0)` and p → 0
//! along `W^s(0)`; its value is `ρ(p) = H^s(p→0) H^u(0→p)`. Cutting the
//! excursion at `f^{−a}p` and `f^{b}p` moves both holonomies close to the
//! fixed point:
//! `ρ(p) = A(0)^{−b} H^s(f^b p→0) A^{(a+b)}(f^{−a}p) H^u(0→f^{−a}p) A(0)^{−a}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::holonomy::{stable_limit, unstable_limit, HolonomyConfig};
use crate::base::{HomoclinicPoint, ToralAutomorphism, TorusPoint};
use crate::error::{Error, Result};
use crate::extension::Cocycle;
use crate::group::RotationMatrix;

/// Where the homoclinic excursion is split: `backward = a`, `forward = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionCut {
    pub backward: usize,
    pub forward: usize,
}

impl Default for TransitionCut {
    fn default() -> Self {
        TransitionCut { backward: 0, forward: 0 }
    }
}

/// Loop value of one homoclinic point.
pub fn brin_rho(
    a: &ToralAutomorphism,
    c: &Cocycle,
    p: &HomoclinicPoint,
    cut: TransitionCut,
    cfg: &HolonomyConfig,
) -> Result<RotationMatrix> {
    let (back, fwd) = (cut.backward as i64, cut.forward as i64);
    let origin = TorusPoint::origin();
    // H^u(0 → f^{−a}p) along the exact backward orbit
    let hu = unstable_limit(c, (1..).map(|k: i64| (origin, p.orbit_point(a, -back - k))), cfg)?;
    // H^s(f^b p → 0) along the exact forward orbit
    let hs = stable_limit(c, (0..).map(|k: i64| (p.orbit_point(a, fwd + k), origin)), cfg)?;
    let mut transition = RotationMatrix::identity(c.dim());
    for j in -back..fwd {
        transition = c.value(&p.orbit_point(a, j)).compose(&transition);
    }
    let a0_inv = c.value(&origin).inverse();
    let mut rho = hs.value.compose(&transition).compose(&hu.value);
    for _ in 0..fwd {
        rho = a0_inv.compose(&rho);
    }
    for _ in 0..back {
        rho = rho.compose(&a0_inv);
    }
    Ok(rho.reorthonormalized())
}

/// `ρ` at every point, computed in parallel; output order follows input.
pub fn brin_rhos(
    a: &ToralAutomorphism,
    c: &Cocycle,
    points: &[HomoclinicPoint],
    cut: TransitionCut,
    cfg: &HolonomyConfig,
) -> Result<Vec<RotationMatrix>> {
    points.par_iter().map(|p| brin_rho(a, c, p, cut, cfg)).collect()
}

/// Ordered product of loop values, `letters = [(index, power), …]` read
/// left to right as the word `γ_{i₁}^{k₁} ⋯ γ_{i_p}^{k_p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrinWord {
    pub letters: Vec<(usize, u32)>,
    pub value: RotationMatrix,
}

impl BrinWord {
    pub fn new(letters: Vec<(usize, u32)>, rhos: &[RotationMatrix]) -> Result<Self> {
        let m = rhos.first().map(|r| r.dim()).ok_or_else(|| Error::InvalidInput("no loop values".into()))?;
        let mut value = RotationMatrix::identity(m);
        for &(i, k) in &letters {
            let g = rhos.get(i).ok_or_else(|| Error::InvalidInput(format!("letter {i} out of range")))?;
            for _ in 0..k {
                value = value.compose(g);
            }
        }
        Ok(BrinWord { letters, value })
    }
}
