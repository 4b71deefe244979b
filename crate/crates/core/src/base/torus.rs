//! Hyperbolic toral automorphisms of 𝕋² = ℝ²/ℤ².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when de-duplicating homoclinic points.
pub const HOMOCLINIC_DEDUP_TOL: f64 = 1e-10;

/// Point of 𝕋², both coordinates in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    x: f64,
    y: f64,
}

fn wrap_unit(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    // rem_euclid rounds tiny negatives up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        TorusPoint { x: wrap_unit(x), y: wrap_unit(y) }
    }

    pub fn origin() -> Self {
        TorusPoint { x: 0.0, y: 0.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn coords(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn translate(&self, d: [f64; 2]) -> Self {
        TorusPoint::new(self.x + d[0], self.y + d[1])
    }

    /// Shortest lift of `other − self`.
    pub fn displacement_to(&self, other: &TorusPoint) -> [f64; 2] {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        [dx - dx.round(), dy - dy.round()]
    }

    /// Flat distance on the torus.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        let d = self.displacement_to(other);
        d[0].hypot(d[1])
    }
}

/// Hyperbolic element of SL(2, ℤ) with its eigen-data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToralAutomorphism {
    matrix: [[i64; 2]; 2],
    unstable_eigenvalue: f64,
    unstable_dir: [f64; 2],
    stable_dir: [f64; 2],
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

impl ToralAutomorphism {
    /// Rejects matrices with `det ≠ 1` or `trace ≤ 2`.
    pub fn new(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::NotHyperbolic(format!("determinant {det} ≠ 1")));
        }
        let tr = a + d;
        if tr <= 2 {
            return Err(Error::NotHyperbolic(format!("trace {tr} ≤ 2")));
        }
        let trf = tr as f64;
        let disc = (trf * trf - 4.0).sqrt();
        let lu = (trf + disc) / 2.0;
        // 1/λ avoids the cancellation in (tr − disc)/2
        let ls = 1.0 / lu;
        let (af, bf, cf, df) = (a as f64, b as f64, c as f64, d as f64);
        let eig = |l: f64| -> [f64; 2] {
            // pick the better-conditioned of the two row equations
            let v1 = [bf, l - af];
            let v2 = [l - df, cf];
            if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) {
                normalize(v1)
            } else {
                normalize(v2)
            }
        };
        let unstable_dir = eig(lu);
        let stable_dir = eig(ls);
        Ok(ToralAutomorphism { matrix, unstable_eigenvalue: lu, unstable_dir, stable_dir })
    }

    /// The default `[[2, 1], [1, 1]]`.
    pub fn cat_map() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn unstable_eigenvalue(&self) -> f64 {
        self.unstable_eigenvalue
    }

    pub fn stable_eigenvalue(&self) -> f64 {
        1.0 / self.unstable_eigenvalue
    }

    pub fn unstable_dir(&self) -> [f64; 2] {
        self.unstable_dir
    }

    pub fn stable_dir(&self) -> [f64; 2] {
        self.stable_dir
    }

    pub fn apply_linear(&self, v: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.matrix;
        [a as f64 * v[0] + b as f64 * v[1], c as f64 * v[0] + d as f64 * v[1]]
    }

    pub fn apply_inverse_linear(&self, v: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.matrix;
        [d as f64 * v[0] - b as f64 * v[1], -(c as f64) * v[0] + a as f64 * v[1]]
    }

    /// `max(‖A u − λ u‖, ‖A s − λ⁻¹ s‖)`.
    pub fn eigen_residual(&self) -> f64 {
        let au = self.apply_linear(self.unstable_dir);
        let as_ = self.apply_linear(self.stable_dir);
        let lu = self.unstable_eigenvalue;
        let ls = self.stable_eigenvalue();
        let ru = (au[0] - lu * self.unstable_dir[0]).hypot(au[1] - lu * self.unstable_dir[1]);
        let rs = (as_[0] - ls * self.stable_dir[0]).hypot(as_[1] - ls * self.stable_dir[1]);
        ru.max(rs)
    }

    /// `log λ_u`, the uniform expansion rate.
    pub fn lyapunov_exponent(&self) -> f64 {
        self.unstable_eigenvalue.ln()
    }
}

/// `(A·p) mod 1`.
pub fn cat_step(p: &TorusPoint, a: &ToralAutomorphism) -> TorusPoint {
    let [[a11, a12], [a21, a22]] = a.matrix;
    // Reduce integer multiples first so the float sum stays in [−|a|, |a|).
    let x = (a11 as f64 * p.x).rem_euclid(1.0) + (a12 as f64 * p.y).rem_euclid(1.0);
    let y = (a21 as f64 * p.x).rem_euclid(1.0) + (a22 as f64 * p.y).rem_euclid(1.0);
    TorusPoint::new(x, y)
}

/// `(A⁻¹·p) mod 1`.
pub fn cat_step_inverse(p: &TorusPoint, a: &ToralAutomorphism) -> TorusPoint {
    let [[a11, a12], [a21, a22]] = a.matrix;
    let x = (a22 as f64 * p.x).rem_euclid(1.0) + (-(a12 as f64) * p.y).rem_euclid(1.0);
    let y = (-(a21 as f64) * p.x).rem_euclid(1.0) + (a11 as f64 * p.y).rem_euclid(1.0);
    TorusPoint::new(x, y)
}

/// A transverse intersection of `W^u(0)` and `W^s(0)`.
///
/// The lift `t·u` lies on the unstable line through the origin and
/// `m + r·s` on the stable line through the lattice point `m`; both project
/// to `point`. Orbit points are available in closed form:
/// `f^j(p) = t·λ^j·u` for `j ≤ 0` and `f^j(p) = r·λ^{−j}·s` for `j ≥ 0`
/// (mod ℤ²), which keeps long homoclinic excursions free of the chaotic
/// amplification of round-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicPoint {
    pub lattice: [i64; 2],
    pub unstable_coord: f64,
    pub stable_coord: f64,
    pub point: TorusPoint,
}

impl HomoclinicPoint {
    /// Exact point `f^j(p)` on the torus.
    pub fn orbit_point(&self, a: &ToralAutomorphism, j: i64) -> TorusPoint {
        let lam = a.unstable_eigenvalue();
        if j <= 0 {
            let c = self.unstable_coord * lam.powi(j as i32);
            let u = a.unstable_dir();
            TorusPoint::new(c * u[0], c * u[1])
        } else {
            let c = self.stable_coord * lam.powi(-(j as i32));
            let s = a.stable_dir();
            TorusPoint::new(c * s[0], c * s[1])
        }
    }

    /// Unstable-leaf coordinate of `f^j(p)` relative to the fixed point 0
    /// (valid for `j ≤ 0`).
    pub fn unstable_coord_at(&self, a: &ToralAutomorphism, j: i64) -> f64 {
        self.unstable_coord * a.unstable_eigenvalue().powi(j as i32)
    }

    /// Stable-leaf coordinate of `f^j(p)` relative to 0 (valid for `j ≥ 0`).
    pub fn stable_coord_at(&self, a: &ToralAutomorphism, j: i64) -> f64 {
        self.stable_coord * a.unstable_eigenvalue().powi(-(j as i32))
    }
}

/// All homoclinic points of the fixed point 0 obtained from lattice vectors
/// `m ≠ 0` with `|m|∞ ≤ box_radius`, by solving `t·u − r·s = m`.
pub fn homoclinic_points(a: &ToralAutomorphism, box_radius: i64) -> Result<Vec<HomoclinicPoint>> {
    if box_radius < 1 {
        return Err(Error::InvalidInput(format!("box_radius must be ≥ 1, got {box_radius}")));
    }
    let u = a.unstable_dir();
    let s = a.stable_dir();
    // columns (u, −s); Cramer's rule keeps the m ↦ −m symmetry exact
    let det = u[0] * (-s[1]) - (-s[0]) * u[1];
    if det.abs() < 1e-14 {
        return Err(Error::Internal("eigen-directions are parallel".into()));
    }
    let mut out: Vec<HomoclinicPoint> = Vec::new();
    for m0 in -box_radius..=box_radius {
        for m1 in -box_radius..=box_radius {
            if m0 == 0 && m1 == 0 {
                continue;
            }
            let (mf0, mf1) = (m0 as f64, m1 as f64);
            let t = (mf0 * (-s[1]) - (-s[0]) * mf1) / det;
            let r = (u[0] * mf1 - mf0 * u[1]) / det;
            let point = TorusPoint::new(t * u[0], t * u[1]);
            let dup = out.iter().any(|h| h.point.distance(&point) < HOMOCLINIC_DEDUP_TOL);
            if !dup {
                out.push(HomoclinicPoint { lattice: [m0, m1], unstable_coord: t, stable_coord: r, point });
            }
        }
    }
    Ok(out)
}
