//! Poincaré disk model of the hyperbolic plane (curvature −1) and its
//! geodesic flow, computed in closed form through the isometry group.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    z: Complex64,
}

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::OutsideDisk(r));
        }
        Ok(DiskPoint { z })
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn origin() -> Self {
        DiskPoint { z: Complex64::new(0.0, 0.0) }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Conformal factor `2 / (1 − |z|²)` of the metric.
    pub fn conformal_factor(&self) -> f64 {
        2.0 / (1.0 - self.z.norm_sqr())
    }

    pub fn distance(&self, other: &DiskPoint) -> f64 {
        hyperbolic_distance(self.z, other.z)
    }
}

/// `d(z, w) = arcosh(1 + 2|z − w|² / ((1 − |z|²)(1 − |w|²)))`.
pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
    let num = 2.0 * (z - w).norm_sqr();
    let den = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr());
    // arcosh(1 + x) = log1p(x + sqrt(x(x + 2))) keeps small distances accurate
    let x = num / den;
    (x + (x * (x + 2.0)).sqrt()).ln_1p()
}

fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Unit tangent vector: base point plus Euclidean direction angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTangent {
    base: DiskPoint,
    angle: f64,
}

impl UnitTangent {
    pub fn new(base: DiskPoint, angle: f64) -> Self {
        UnitTangent { base, angle: normalize_angle(angle) }
    }

    pub fn base(&self) -> DiskPoint {
        self.base
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Distance in the Sasaki-type product of base distance and angle gap;
    /// adequate for comparing nearby states.
    pub fn separation(&self, other: &UnitTangent) -> f64 {
        let d = self.base.distance(&other.base);
        let da = (self.angle - other.angle).rem_euclid(TAU);
        d.max(da.min(TAU - da))
    }
}

/// Orientation-preserving isometry `w ↦ (a w + b) / (b̄ w + ā)` with
/// `|a|² − |b|² = 1` (an element of SU(1, 1)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusIsometry {
    a: Complex64,
    b: Complex64,
}

impl MobiusIsometry {
    pub fn identity() -> Self {
        MobiusIsometry { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Rescales `(a, b)` to unit determinant; rejects non-disk-preserving data.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) {
            return Err(Error::InvalidInput(format!("|a|² − |b|² = {det} is not positive")));
        }
        let s = det.sqrt();
        Ok(MobiusIsometry { a: a / s, b: b / s })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Rotation about the origin by `phi`.
    pub fn rotation(phi: f64) -> Self {
        MobiusIsometry { a: Complex64::from_polar(1.0, phi / 2.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Hyperbolic translation by distance `len` along the real axis.
    pub fn translation_real(len: f64) -> Self {
        MobiusIsometry { a: Complex64::new((len / 2.0).cosh(), 0.0), b: Complex64::new((len / 2.0).sinh(), 0.0) }
    }

    /// The isometry `w ↦ (w + z) / (1 + z̄ w)` carrying 0 to `z` with positive
    /// real derivative at 0.
    pub fn carrying_origin_to(z: Complex64) -> Self {
        let s = (1.0 - z.norm_sqr()).sqrt();
        MobiusIsometry { a: Complex64::new(1.0 / s, 0.0), b: z / s }
    }

    /// Parabolic isometry fixing the boundary point `−1`; moves the origin
    /// along the horocycle based at `−1`.
    pub fn parabolic_at_minus_one(s: f64) -> Self {
        MobiusIsometry { a: Complex64::new(1.0, s), b: Complex64::new(0.0, s) }
    }

    pub fn determinant(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        (self.a * w + self.b) / (self.b.conj() * w + self.a.conj())
    }

    /// Complex derivative at `w`.
    pub fn derivative(&self, w: Complex64) -> Complex64 {
        let d = self.b.conj() * w + self.a.conj();
        Complex64::new(1.0, 0.0) / (d * d)
    }

    pub fn apply_point(&self, p: &DiskPoint) -> DiskPoint {
        let z = self.apply(p.z);
        // isometries preserve the disk; clamp round-off at the very edge
        DiskPoint { z }
    }

    pub fn apply_tangent(&self, v: &UnitTangent) -> UnitTangent {
        let z = v.base.z;
        let dz = self.derivative(z);
        UnitTangent::new(DiskPoint { z: self.apply(z) }, v.angle + dz.arg())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusIsometry) -> MobiusIsometry {
        // matrices [[a, b], [b̄, ā]]
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        MobiusIsometry { a, b }
    }

    pub fn inverse(&self) -> MobiusIsometry {
        MobiusIsometry { a: self.a.conj(), b: -self.b }
    }

    /// Distance to `other` as elements of PSU(1, 1) (sign ambiguity removed).
    pub fn projective_distance(&self, other: &MobiusIsometry) -> f64 {
        let d1 = (self.a - other.a).norm() + (self.b - other.b).norm();
        let d2 = (self.a + other.a).norm() + (self.b + other.b).norm();
        d1.min(d2)
    }

    /// Max deviation of `|g(e^{iθ})|` from 1 over `samples` boundary points.
    pub fn boundary_residual(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| {
                let w = Complex64::from_polar(1.0, TAU * i as f64 / samples as f64);
                (self.apply(w).norm() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Time-`t` geodesic flow: the geodesic through `z` in direction `θ` is the
/// image of the diameter `s ↦ e^{iθ} tanh(s/2)` under `w ↦ (w + z)/(1 + z̄w)`.
pub fn geodesic_flow(state: &UnitTangent, t: f64) -> UnitTangent {
    let g = MobiusIsometry::carrying_origin_to(state.base.z);
    let w = Complex64::from_polar((t / 2.0).tanh(), state.angle);
    let at_origin = UnitTangent { base: DiskPoint { z: w }, angle: state.angle };
    g.apply_tangent(&at_origin)
}
