//! Stable and unstable holonomies of a cocycle over a toral automorphism.
//!
//! For `y` on the stable leaf of `x`, `H^s(x→y) = lim A^{(n)}(y)⁻¹ A^{(n)}(x)`;
//! for `y` on the unstable leaf, `H^u(x→y) = lim A^{(n)}(f^{−n}y) A^{(n)}(f^{−n}x)⁻¹`.
//! Both carry the fiber over `x` to the fiber over `y` and satisfy
//! `H(fx→fy) = A(y) H(x→y) A(x)⁻¹`.

use serde::{Deserialize, Serialize};

use crate::base::{cat_step, cat_step_inverse, ToralAutomorphism, TorusPoint};
use crate::error::{Error, Result};
use crate::extension::{Cocycle, CocycleKind};
use crate::group::RotationMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolonomyConfig {
    /// Truncate once two consecutive partial products differ by less.
    pub tol: f64,
    pub depth_cap: usize,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        HolonomyConfig { tol: 1e-12, depth_cap: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyResult {
    pub value: RotationMatrix,
    pub truncation_depth: usize,
    /// Distance between the last two partial products.
    pub cauchy_residual: f64,
    /// Distance between consecutive partial products, by depth.
    pub residual_trace: Vec<f64>,
}

impl HolonomyResult {
    /// Least-squares fit `residual(d) ≈ C θ^d` over the nonzero part of the
    /// trace above round-off; `None` when fewer than three points remain.
    pub fn decay_fit(&self) -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = self
            .residual_trace
            .iter()
            .enumerate()
            .filter(|(_, r)| **r > 1e-14)
            .map(|(d, r)| ((d + 1) as f64, r.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        Some(((my - slope * mx).exp(), slope.exp()))
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Stable,
    Unstable,
}

/// Runs the partial products over `pairs`, which yields `(f^k x, f^k y)`
/// for `k = 0, 1, …` (stable) or `(f^{−k} x, f^{−k} y)` for `k = 1, 2, …`
/// (unstable).
fn limit<I>(c: &Cocycle, pairs: I, dir: Direction, cfg: &HolonomyConfig) -> Result<HolonomyResult>
where
    I: IntoIterator<Item = (TorusPoint, TorusPoint)>,
{
    if c.kind() != CocycleKind::Discrete {
        return Err(Error::KindMismatch("holonomies need a discrete cocycle".into()));
    }
    let m = c.dim();
    if c.is_trivial() {
        return Ok(HolonomyResult {
            value: RotationMatrix::identity(m),
            truncation_depth: 0,
            cauchy_residual: 0.0,
            residual_trace: Vec::new(),
        });
    }
    let mut px = RotationMatrix::identity(m);
    let mut py = RotationMatrix::identity(m);
    let mut h = RotationMatrix::identity(m);
    let mut trace = Vec::new();
    let mut below = 0;
    for (depth, (x, y)) in pairs.into_iter().take(cfg.depth_cap).enumerate() {
        let (ax, ay) = (c.value(&x), c.value(&y));
        let next = match dir {
            Direction::Stable => {
                px = ax.compose(&px);
                py = ay.compose(&py);
                py.inverse().compose(&px)
            }
            Direction::Unstable => {
                px = px.compose(&ax);
                py = py.compose(&ay);
                py.compose(&px.inverse())
            }
        };
        let r = next.distance(&h);
        trace.push(r);
        h = next;
        below = if r < cfg.tol { below + 1 } else { 0 };
        if below >= 2 {
            return Ok(HolonomyResult {
                value: h.reorthonormalized(),
                truncation_depth: depth + 1,
                cauchy_residual: r,
                residual_trace: trace,
            });
        }
    }
    let tail = trace.iter().rev().take(8).rev().copied().collect();
    Err(Error::HolonomyDiverged { depth: cfg.depth_cap, trace: tail })
}

fn check_approach(a: &ToralAutomorphism, sigma: f64) -> Result<()> {
    let sep = sigma.abs() * a.unstable_eigenvalue().powi(-30);
    if sep < 1e-6 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("leaf separation {sep:.3e} after 30 steps")))
    }
}

/// `H^s(x → x + σ s)` for the unit stable direction `s`.
pub fn stable_holonomy(
    a: &ToralAutomorphism,
    c: &Cocycle,
    x: &TorusPoint,
    sigma: f64,
    cfg: &HolonomyConfig,
) -> Result<HolonomyResult> {
    check_approach(a, sigma)?;
    let s = a.stable_dir();
    let inv = 1.0 / a.unstable_eigenvalue();
    let pairs = std::iter::successors(Some((*x, sigma)), |(p, sg)| Some((cat_step(p, a), sg * inv)))
        .map(|(p, sg)| (p, p.translate([sg * s[0], sg * s[1]])));
    limit(c, pairs, Direction::Stable, cfg)
}

/// `H^u(x → x + σ u)` for the unit unstable direction `u`.
pub fn unstable_holonomy(
    a: &ToralAutomorphism,
    c: &Cocycle,
    x: &TorusPoint,
    sigma: f64,
    cfg: &HolonomyConfig,
) -> Result<HolonomyResult> {
    check_approach(a, sigma)?;
    let u = a.unstable_dir();
    let inv = 1.0 / a.unstable_eigenvalue();
    let pairs = std::iter::successors(Some((*x, sigma)), |(p, sg)| Some((cat_step_inverse(p, a), sg * inv)))
        .skip(1)
        .map(|(p, sg)| (p, p.translate([sg * u[0], sg * u[1]])));
    limit(c, pairs, Direction::Unstable, cfg)
}

fn leaf_offset(d: [f64; 2], dir: [f64; 2]) -> Result<f64> {
    let sigma = d[0] * dir[0] + d[1] * dir[1];
    let off = (d[0] - sigma * dir[0]).hypot(d[1] - sigma * dir[1]);
    if off > 1e-9 {
        return Err(Error::InvalidInput(format!("points are {off:.3e} off a common local leaf")));
    }
    Ok(sigma)
}

/// Stable holonomy between two points on a common local stable leaf (the
/// shortest displacement must be parallel to the stable direction).
pub fn stable_holonomy_between(
    a: &ToralAutomorphism,
    c: &Cocycle,
    x: &TorusPoint,
    y: &TorusPoint,
    cfg: &HolonomyConfig,
) -> Result<HolonomyResult> {
    let sigma = leaf_offset(x.displacement_to(y), a.stable_dir())?;
    stable_holonomy(a, c, x, sigma, cfg)
}

/// Unstable counterpart of [`stable_holonomy_between`].
pub fn unstable_holonomy_between(
    a: &ToralAutomorphism,
    c: &Cocycle,
    x: &TorusPoint,
    y: &TorusPoint,
    cfg: &HolonomyConfig,
) -> Result<HolonomyResult> {
    let sigma = leaf_offset(x.displacement_to(y), a.unstable_dir())?;
    unstable_holonomy(a, c, x, sigma, cfg)
}

/// Stable limit along exact orbit pairs supplied by the caller.
pub(crate) fn stable_limit<I>(c: &Cocycle, pairs: I, cfg: &HolonomyConfig) -> Result<HolonomyResult>
where
    I: IntoIterator<Item = (TorusPoint, TorusPoint)>,
{
    limit(c, pairs, Direction::Stable, cfg)
}

/// Unstable limit along exact backward orbit pairs, starting at `k = 1`.
pub(crate) fn unstable_limit<I>(c: &Cocycle, pairs: I, cfg: &HolonomyConfig) -> Result<HolonomyResult>
where
    I: IntoIterator<Item = (TorusPoint, TorusPoint)>,
{
    limit(c, pairs, Direction::Unstable, cfg)
}
