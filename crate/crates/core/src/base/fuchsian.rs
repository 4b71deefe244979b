//! Regular hyperbolic octagon with opposite-side pairings: a fundamental
//! domain for a genus-2 surface group acting on the disk.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;

use super::disk::{MobiusIsometry, UnitTangent};
use crate::error::{Error, Result};

/// Iteration cap of the greedy reduction.
pub const REDUCTION_CAP: usize = 64;

#[derive(Debug, Clone)]
pub struct FuchsianDomain {
    /// `generators[k]` maps side `(k + 4) mod 8` onto side `k`; side `k` is
    /// centred at angle `k·π/4`.
    generators: Vec<MobiusIsometry>,
    /// `pairing_table[k] = (k + 4) mod 8`.
    pairing_table: Vec<usize>,
    /// Images of the centre under the generators; the octagon is their
    /// Dirichlet domain.
    centres: Vec<Complex64>,
    vertices: Vec<Complex64>,
}

impl FuchsianDomain {
    /// Regular octagon with interior angles π/4.
    pub fn regular_octagon() -> Self {
        // inradius d: cosh d = cot(π/8); side pairings translate by 2d
        let inradius = (1.0 / FRAC_PI_8.tan()).acosh();
        let t = MobiusIsometry::translation_real(2.0 * inradius);
        let generators: Vec<_> = (0..8)
            .map(|k| {
                let phi = k as f64 * FRAC_PI_4;
                MobiusIsometry::rotation(phi).compose(&t).compose(&MobiusIsometry::rotation(-phi))
            })
            .collect();
        let pairing_table = (0..8).map(|k| (k + 4) % 8).collect();
        let centres = generators.iter().map(|g| g.apply(Complex64::new(0.0, 0.0))).collect();
        // circumradius R: cosh R = cot(π/8)²
        let circ = (1.0 / FRAC_PI_8.tan()).powi(2).acosh();
        let rv = (circ / 2.0).tanh();
        let vertices = (0..8).map(|k| Complex64::from_polar(rv, k as f64 * FRAC_PI_4 + FRAC_PI_8)).collect();
        FuchsianDomain { generators, pairing_table, centres, vertices }
    }

    pub fn generators(&self) -> &[MobiusIsometry] {
        &self.generators
    }

    pub fn pairing_table(&self) -> &[usize] {
        &self.pairing_table
    }

    /// Vertices, vertex `k` at angle `k·π/4 + π/8`; side `k` joins vertices
    /// `k − 1` and `k`.
    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    /// End points of side `k`.
    pub fn side(&self, k: usize) -> (Complex64, Complex64) {
        (self.vertices[(k + 7) % 8], self.vertices[k])
    }

    /// Signed violation of the Dirichlet inequality for side `k`; positive
    /// when `z` is strictly closer to the neighbouring centre.
    fn violation(&self, z: Complex64, k: usize) -> f64 {
        let c = self.centres[k];
        // d(z, 0) ≤ d(z, c) ⇔ |z|²(1 − |c|²) ≤ |z − c|²
        z.norm_sqr() * (1.0 - c.norm_sqr()) - (z - c).norm_sqr()
    }

    /// Whether `z` lies in the closed octagon up to `tol`.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        (0..8).all(|k| self.violation(z, k) <= tol)
    }

    /// Max deviation of the side pairings from mapping side `k+4` onto side
    /// `k` (with reversed vertex order).
    pub fn pairing_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (k, g) in self.generators.iter().enumerate() {
            let (p0, p1) = self.side(self.pairing_table[k]);
            let (q0, q1) = self.side(k);
            let i0 = g.apply(p0);
            let i1 = g.apply(p1);
            worst = worst.max((i0 - q1).norm().min((i0 - q0).norm()));
            worst = worst.max((i1 - q0).norm().min((i1 - q1).norm()));
        }
        worst
    }

    /// Residual of the surface-group relation
    /// `g₀ g₁⁻¹ g₂ g₃⁻¹ g₀⁻¹ g₁ g₂⁻¹ g₃ = 1` (projectively).
    pub fn relation_residual(&self) -> f64 {
        let g = &self.generators;
        let word = [g[0], g[1].inverse(), g[2], g[3].inverse(), g[0].inverse(), g[1], g[2].inverse(), g[3]];
        let prod = word.iter().fold(MobiusIsometry::identity(), |acc, w| acc.compose(w));
        prod.projective_distance(&MobiusIsometry::identity())
    }
}

/// Moves `state` into the octagon by greedy nearest-side pairing. Returns
/// the representative and the element `γ` with `γ(representative) = state`.
pub fn reduce_to_domain(state: &UnitTangent, dom: &FuchsianDomain) -> Result<(UnitTangent, MobiusIsometry)> {
    let mut current = *state;
    // h maps the input to the current representative
    let mut h = MobiusIsometry::identity();
    for _ in 0..REDUCTION_CAP {
        let z = current.base().z();
        let (k, v) =
            (0..8).map(|k| (k, dom.violation(z, k))).fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        if v <= 0.0 {
            return Ok((current, h.inverse()));
        }
        let step = dom.generators[k].inverse();
        current = step.apply_tangent(&current);
        h = step.compose(&h);
        if !(current.base().z().norm() < 1.0) {
            return Err(Error::OutsideDisk(current.base().z().norm()));
        }
    }
    Err(Error::ReductionDiverged(REDUCTION_CAP))
}

/// Flow for time `t` and reduce, in steps no longer than `max_dt`.
pub fn flow_on_surface(state: &UnitTangent, t: f64, max_dt: f64, dom: &FuchsianDomain) -> Result<UnitTangent> {
    let n = (t.abs() / max_dt).ceil().max(1.0) as usize;
    let dt = t / n as f64;
    let mut s = *state;
    for _ in 0..n {
        s = reduce_to_domain(&super::disk::geodesic_flow(&s, dt), dom)?.0;
    }
    Ok(s)
}

/// Area of the octagon: (8 − 2)π − 8·π/4 = 4π.
pub fn octagon_area() -> f64 {
    4.0 * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::disk::{geodesic_flow, DiskPoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn random_inside(dom: &FuchsianDomain, rng: &mut ChaCha8Rng, shrink: f64) -> UnitTangent {
        loop {
            let r = 0.75 * rng.random::<f64>().sqrt();
            let z = Complex64::from_polar(r, rng.random_range(0.0..TAU));
            // keep a margin from the sides so the representative is unique
            if (0..8).all(|k| dom.violation(z, k) < -shrink) {
                return UnitTangent::new(DiskPoint::new(z).unwrap(), rng.random_range(0.0..TAU));
            }
        }
    }

    #[test]
    fn generators_pair_sides() {
        let dom = FuchsianDomain::regular_octagon();
        assert!(dom.pairing_residual() < 1e-9, "{}", dom.pairing_residual());
        for g in dom.generators() {
            assert!((g.determinant() - 1.0).abs() < 1e-12);
            assert!(g.boundary_residual(32) < 1e-10);
        }
    }

    #[test]
    fn group_relation_holds() {
        let dom = FuchsianDomain::regular_octagon();
        assert!(dom.relation_residual() < 1e-6, "{}", dom.relation_residual());
    }

    #[test]
    fn inverse_generators_are_opposite() {
        let dom = FuchsianDomain::regular_octagon();
        for k in 0..4 {
            let d = dom.generators()[k].inverse().projective_distance(&dom.generators()[k + 4]);
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn inside_state_is_left_alone() {
        let dom = FuchsianDomain::regular_octagon();
        let s = UnitTangent::new(DiskPoint::from_re_im(0.1, -0.2).unwrap(), 1.0);
        let (r, g) = reduce_to_domain(&s, &dom).unwrap();
        assert_eq!(r, s);
        assert!(g.projective_distance(&MobiusIsometry::identity()) == 0.0);
    }

    #[test]
    fn reduction_round_trips_random_words() {
        let dom = FuchsianDomain::regular_octagon();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let s = random_inside(&dom, &mut rng, 1e-6);
            let len = rng.random_range(1..=3);
            let mut word = MobiusIsometry::identity();
            for _ in 0..len {
                word = word.compose(&dom.generators()[rng.random_range(0..8)]);
            }
            let moved = word.apply_tangent(&s);
            let (rep, g) = reduce_to_domain(&moved, &dom).unwrap();
            assert!(dom.contains(rep.base().z(), 1e-9));
            assert!(g.apply_tangent(&rep).separation(&moved) < 1e-9);
            assert!(rep.separation(&s) < 1e-8, "{:?} vs {:?}", rep, s);
        }
    }

    #[test]
    fn flowed_orbit_stays_inside() {
        let dom = FuchsianDomain::regular_octagon();
        let mut s = UnitTangent::new(DiskPoint::from_re_im(0.05, 0.02).unwrap(), 0.3);
        for _ in 0..1000 {
            let next = geodesic_flow(&s, 0.37);
            let (rep, g) = reduce_to_domain(&next, &dom).unwrap();
            assert!(dom.contains(rep.base().z(), 1e-9));
            assert!(g.apply_tangent(&rep).separation(&next) < 1e-9);
            s = rep;
        }
    }

    #[test]
    fn octagon_vertices_have_quarter_right_angles() {
        // Gauss–Bonnet for the polygon: area 4π = 6π − Σ angles
        let dom = FuchsianDomain::regular_octagon();
        let v = dom.vertices()[0];
        let g = MobiusIsometry::carrying_origin_to(v).inverse();
        let a = g.apply(dom.vertices()[7]);
        let b = g.apply(dom.vertices()[1]);
        let ang = (a.arg() - b.arg()).abs();
        let ang = ang.min(TAU - ang);
        assert!((ang - FRAC_PI_4).abs() < 1e-12);
        assert!((6.0 * PI - 8.0 * ang - octagon_area()).abs() < 1e-10);
    }
}
