//! Levi-Civita parallel transport in the Poincaré disk.
//!
//! A tangent vector is stored by its Euclidean components `V ∈ ℂ`. Along a
//! curve `z(s)` the transport equation of the metric `4|dz|²/(1 − |z|²)²` is
//! `V' = −2 z̄ z' V / (1 − |z|²)`, a scalar linear equation. Consecutive
//! samples are joined by geodesic arcs; the real part of the exponent
//! integrates to `ln((1 − |z₁|²)/(1 − |z₀|²))` in closed form and the
//! rotation part is integrated by Gauss–Legendre quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::base::{DiskPoint, MobiusIsometry};
use crate::error::{Error, Result};

/// Largest hyperbolic length allowed between consecutive samples.
pub const MAX_SAMPLE_STEP: f64 = 1e-2;

const GAUSS_NODES: [(f64, f64); 3] =
    [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)];

/// Unit-speed geodesic arc from `p` to `q`.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicArc {
    frame: MobiusIsometry,
    heading: Complex64,
    length: f64,
}

impl GeodesicArc {
    pub fn new(p: &DiskPoint, q: &DiskPoint) -> Self {
        let frame = MobiusIsometry::carrying_origin_to(p.z());
        let w = frame.inverse().apply(q.z());
        let heading = if w.norm() > 0.0 { w / w.norm() } else { Complex64::new(1.0, 0.0) };
        GeodesicArc { frame, heading, length: p.distance(q) }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Point at arc length `s`.
    pub fn point(&self, s: f64) -> Complex64 {
        self.frame.apply(self.heading * (s / 2.0).tanh())
    }

    /// Euclidean velocity at arc length `s`.
    pub fn velocity(&self, s: f64) -> Complex64 {
        let u = self.heading * (s / 2.0).tanh();
        let sech = 1.0 / (s / 2.0).cosh();
        self.frame.derivative(u) * self.heading * (0.5 * sech * sech)
    }
}

/// Samples of the geodesic from `p` to `q` with hyperbolic spacing at most
/// `max_step`, both end points included.
pub fn geodesic_path(p: &DiskPoint, q: &DiskPoint, max_step: f64) -> Vec<DiskPoint> {
    let arc = GeodesicArc::new(p, q);
    let n = (arc.length() / max_step).ceil().max(1.0) as usize;
    let mut out: Vec<DiskPoint> =
        (0..n).map(|i| DiskPoint::new(arc.point(arc.length() * i as f64 / n as f64)).expect("inside disk")).collect();
    out.push(*q);
    out
}

/// Closed polygonal loop of geodesic sides through `corners`, returning to
/// the first corner.
pub fn geodesic_loop(corners: &[DiskPoint], max_step: f64) -> Vec<DiskPoint> {
    let mut out = vec![corners[0]];
    for i in 0..corners.len() {
        let seg = geodesic_path(&corners[i], &corners[(i + 1) % corners.len()], max_step);
        out.extend_from_slice(&seg[1..]);
    }
    out
}

/// Hyperbolic length of the tangent vector `v` at `p`.
pub fn hyperbolic_norm(p: &DiskPoint, v: Complex64) -> f64 {
    p.conformal_factor() * v.norm()
}

/// Transports `v0` (Euclidean components at `curve[0]`) along the sampled
/// curve and returns its components at the last sample.
pub fn parallel_transport_disk(curve: &[DiskPoint], v0: Complex64) -> Result<Complex64> {
    if curve.is_empty() {
        return Err(Error::InvalidInput("empty curve".into()));
    }
    let mut v = v0;
    for pair in curve.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        for z in [p.z(), q.z()] {
            if !(z.norm() < 1.0) {
                return Err(Error::OutsideDisk(z.norm()));
            }
        }
        let arc = GeodesicArc::new(&p, &q);
        if arc.length() > MAX_SAMPLE_STEP * (1.0 + 1e-9) {
            return Err(Error::InvalidInput(format!(
                "curve samples too sparse: step {:.3e} > {MAX_SAMPLE_STEP:e}",
                arc.length()
            )));
        }
        let stretch = ((1.0 - q.z().norm_sqr()) / (1.0 - p.z().norm_sqr())).ln();
        let half = arc.length() / 2.0;
        let turn: f64 = GAUSS_NODES
            .iter()
            .map(|(x, w)| {
                let s = half * (1.0 + x);
                let z = arc.point(s);
                let a = -2.0 * z.conj() * arc.velocity(s) / (1.0 - z.norm_sqr());
                w * a.im
            })
            .sum::<f64>()
            * half;
        v *= Complex64::new(stretch, turn).exp();
    }
    Ok(v)
}

/// Rotation angle in `(−π, π]` of parallel transport around a closed curve.
pub fn holonomy_angle(closed: &[DiskPoint]) -> Result<f64> {
    let v = parallel_transport_disk(closed, Complex64::new(1.0, 0.0))?;
    Ok(v.arg())
}

/// Interior angles of the geodesic triangle `abc` at `a`, `b`, `c`.
pub fn triangle_angles(a: &DiskPoint, b: &DiskPoint, c: &DiskPoint) -> [f64; 3] {
    let at = |p: &DiskPoint, q: &DiskPoint, r: &DiskPoint| {
        let g = MobiusIsometry::carrying_origin_to(p.z()).inverse();
        let d = (g.apply(q.z()) / g.apply(r.z())).arg().abs();
        d.min(2.0 * PI - d)
    };
    [at(a, b, c), at(b, c, a), at(c, a, b)]
}

/// Area `π − (α + β + γ)` of a geodesic triangle.
pub fn triangle_area(a: &DiskPoint, b: &DiskPoint, c: &DiskPoint) -> f64 {
    PI - triangle_angles(a, b, c).iter().sum::<f64>()
}

/// Sign of the geodesic triangle `abc`: positive for counter-clockwise
/// vertices. Read off at `a` after moving it to the origin, where the two
/// sides through it are diameters.
pub fn orientation(a: &DiskPoint, b: &DiskPoint, c: &DiskPoint) -> f64 {
    let g = MobiusIsometry::carrying_origin_to(a.z()).inverse();
    (g.apply(b.z()).conj() * g.apply(c.z())).im.signum()
}
