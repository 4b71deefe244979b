use std::io::Write;

use nalgebra::DMatrix;

use super::cocycle::{Cocycle, CocycleKind};
use crate::base::{
    cat_step, geodesic_flow, reduce_to_domain, BasePoint, FuchsianDomain, ToralAutomorphism, TorusPoint, UnitTangent,
};
use crate::error::{Error, Result};
use crate::group::RotationMatrix;

/// Base dynamics underlying an extension.
#[derive(Debug, Clone)]
pub enum BaseDynamics {
    Toral(ToralAutomorphism),
    /// Geodesic flow of the disk; with a domain, orbit drivers fold the
    /// base back into it between steps.
    Geodesic(Option<FuchsianDomain>),
}

impl BaseDynamics {
    pub fn kind(&self) -> CocycleKind {
        match self {
            BaseDynamics::Toral(_) => CocycleKind::Discrete,
            BaseDynamics::Geodesic(_) => CocycleKind::Continuous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionConfig {
    /// Polar re-orthonormalization after this many fiber multiplications.
    pub renormalize_every: usize,
    /// Largest integration step for continuous-time fibers.
    pub max_dt: f64,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        ExtensionConfig { renormalize_every: 64, max_dt: 1e-2 }
    }
}

/// How far to advance: `n` iterates of a map, or time `t` of a flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Advance {
    Steps(usize),
    Time(f64),
}

/// Point of the principal extension: base state plus fiber element.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    pub base: BasePoint,
    pub fiber: RotationMatrix,
    since_renorm: usize,
}

impl ExtendedState {
    pub fn new(base: BasePoint, fiber: RotationMatrix) -> Self {
        ExtendedState { base, fiber, since_renorm: 0 }
    }

    pub fn on_torus(p: TorusPoint, m: usize) -> Self {
        Self::new(BasePoint::Torus(p), RotationMatrix::identity(m))
    }

    pub fn on_tangent(v: UnitTangent, m: usize) -> Self {
        Self::new(BasePoint::Tangent(v), RotationMatrix::identity(m))
    }

    /// Right action of the structure group, `(x, R) · g = (x, R g)`.
    pub fn right_act(&self, g: &RotationMatrix) -> Self {
        ExtendedState { base: self.base, fiber: self.fiber.compose(g), since_renorm: self.since_renorm }
    }

    fn account(mut self, multiplications: usize, cfg: &ExtensionConfig) -> Self {
        self.since_renorm += multiplications;
        if cfg.renormalize_every > 0 && self.since_renorm >= cfg.renormalize_every {
            self.fiber = self.fiber.reorthonormalized();
            self.since_renorm = 0;
        }
        self
    }
}

/// Advances base and fiber together. The fiber is left-multiplied by the
/// cocycle (maps) or transported by `R' = a(φ_t x) R` with classical RK4
/// sub-steps (flows); in both cases the base coordinate of the output is
/// exactly the base dynamics applied to the input base.
pub fn step_extension(
    s: &ExtendedState,
    c: &Cocycle,
    dynamics: &BaseDynamics,
    advance: Advance,
    cfg: &ExtensionConfig,
) -> Result<ExtendedState> {
    if c.kind() != dynamics.kind() {
        return Err(Error::KindMismatch(format!("cocycle is {:?}, base dynamics is {:?}", c.kind(), dynamics.kind())));
    }
    if c.dim() != s.fiber.dim() {
        return Err(Error::InvalidInput(format!("fiber dimension {} vs cocycle dimension {}", s.fiber.dim(), c.dim())));
    }
    match (dynamics, advance, s.base) {
        (BaseDynamics::Toral(a), Advance::Steps(n), BasePoint::Torus(p)) => {
            let mut out = s.clone();
            let mut x = p;
            for _ in 0..n {
                if !c.is_trivial() {
                    out.fiber = c.value(&x).compose(&out.fiber);
                    out = out.account(1, cfg);
                }
                x = cat_step(&x, a);
            }
            out.base = BasePoint::Torus(x);
            Ok(out)
        }
        (BaseDynamics::Geodesic(_), Advance::Time(t), BasePoint::Tangent(v)) => Ok(flow_fiber(s, c, &v, t, cfg)),
        (_, adv, base) => {
            Err(Error::KindMismatch(format!("cannot advance {base:?} by {adv:?} under {:?}", dynamics.kind())))
        }
    }
}

fn flow_fiber(s: &ExtendedState, c: &Cocycle, v: &UnitTangent, t: f64, cfg: &ExtensionConfig) -> ExtendedState {
    let end_base = BasePoint::Tangent(geodesic_flow(v, t));
    if c.is_trivial() || t == 0.0 {
        return ExtendedState { base: end_base, fiber: s.fiber.clone(), since_renorm: s.since_renorm };
    }
    let n = (t.abs() / cfg.max_dt).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let gen = |tau: f64| -> DMatrix<f64> { c.generator(&BasePoint::Tangent(geodesic_flow(v, tau))).matrix().clone() };
    let mut out = s.clone();
    let mut r = out.fiber.matrix().clone();
    let mut a0 = gen(0.0);
    for i in 0..n {
        let t0 = i as f64 * h;
        let a_mid = gen(t0 + h / 2.0);
        let a1 = gen(t0 + h);
        let k1 = &a0 * &r;
        let k2 = &a_mid * (&r + &k1 * (h / 2.0));
        let k3 = &a_mid * (&r + &k2 * (h / 2.0));
        let k4 = &a1 * (&r + &k3 * h);
        r += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        a0 = a1;
        out.fiber = RotationMatrix::from_unchecked(r.clone());
        out = out.account(1, cfg);
        r = out.fiber.matrix().clone();
    }
    // the group projection closes every continuous step
    out.fiber = out.fiber.reorthonormalized();
    out.since_renorm = 0;
    out.base = end_base;
    out
}

/// Lazily generated orbit `s, F(s), F²(s), …` with unit steps (`Steps(1)`
/// for maps, `Time(dt)` for flows). For the geodesic flow with a domain,
/// the base is reduced into the domain after every step.
pub struct Orbit<'a> {
    state: ExtendedState,
    cocycle: &'a Cocycle,
    dynamics: &'a BaseDynamics,
    advance: Advance,
    cfg: ExtensionConfig,
    remaining: usize,
    failed: Option<Error>,
}

impl<'a> Orbit<'a> {
    pub fn new(
        start: ExtendedState,
        cocycle: &'a Cocycle,
        dynamics: &'a BaseDynamics,
        advance: Advance,
        cfg: ExtensionConfig,
        len: usize,
    ) -> Self {
        Orbit { state: start, cocycle, dynamics, advance, cfg, remaining: len, failed: None }
    }

    /// Error that stopped the orbit early, if any.
    pub fn error(&self) -> Option<&Error> {
        self.failed.as_ref()
    }
}

impl Iterator for Orbit<'_> {
    type Item = ExtendedState;

    fn next(&mut self) -> Option<ExtendedState> {
        if self.remaining == 0 || self.failed.is_some() {
            return None;
        }
        self.remaining -= 1;
        let current = self.state.clone();
        match step_extension(&current, self.cocycle, self.dynamics, self.advance, &self.cfg) {
            Ok(mut next) => {
                if let (BaseDynamics::Geodesic(Some(dom)), BasePoint::Tangent(v)) = (self.dynamics, next.base) {
                    match reduce_to_domain(&v, dom) {
                        Ok((rep, _)) => next.base = BasePoint::Tangent(rep),
                        Err(e) => {
                            self.failed = Some(e);
                            self.remaining = 0;
                        }
                    }
                }
                self.state = next;
            }
            Err(e) => {
                self.failed = Some(e);
                self.remaining = 0;
            }
        }
        Some(current)
    }
}

/// Writes an orbit as CSV rows `step, base coordinates…, fiber entries…`
/// (row-major, 17 significant digits), after the given `#` comment lines.
pub fn write_orbit_csv<W, I>(mut out: W, comments: &[String], orbit: I) -> std::io::Result<usize>
where
    W: Write,
    I: IntoIterator<Item = ExtendedState>,
{
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut rows = 0;
    for (i, s) in orbit.into_iter().enumerate() {
        if i == 0 {
            let m = s.fiber.dim();
            let mut head = vec!["step".to_string()];
            head.extend(match s.base {
                BasePoint::Torus(_) => vec!["x".to_string(), "y".to_string()],
                BasePoint::Tangent(_) => vec!["re_z".into(), "im_z".into(), "angle".into()],
            });
            head.extend((0..m * m).map(|k| format!("r{}{}", k / m, k % m)));
            writeln!(out, "{}", head.join(","))?;
        }
        let mut fields = vec![i.to_string()];
        let base: Vec<f64> = match s.base {
            BasePoint::Torus(p) => vec![p.x(), p.y()],
            BasePoint::Tangent(v) => vec![v.base().z().re, v.base().z().im, v.angle()],
        };
        fields.extend(base.iter().chain(s.fiber.to_row_major().iter()).map(|x| format!("{x:.16e}")));
        writeln!(out, "{}", fields.join(","))?;
        rows += 1;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::DiskPoint;
    use crate::group::SkewMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cat() -> BaseDynamics {
        BaseDynamics::Toral(ToralAutomorphism::cat_map())
    }

    #[test]
    fn trivial_cocycle_freezes_fiber() {
        let c = Cocycle::trivial(CocycleKind::Discrete, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = RotationMatrix::random_givens(3, &mut rng);
        let s = ExtendedState::new(BasePoint::Torus(TorusPoint::new(0.2, 0.9)), g.clone());
        let out = step_extension(&s, &c, &cat(), Advance::Steps(10_000), &ExtensionConfig::default()).unwrap();
        assert_eq!(out.fiber, g);
    }

    #[test]
    fn projection_property_is_exact() {
        let dynamics = cat();
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 3, 2, 0.5, 3).unwrap();
        let p = TorusPoint::new(0.31, 0.47);
        let out = step_extension(
            &ExtendedState::on_torus(p, 3),
            &c,
            &dynamics,
            Advance::Steps(7),
            &ExtensionConfig::default(),
        )
        .unwrap();
        let mut q = p;
        for _ in 0..7 {
            q = cat_step(&q, &ToralAutomorphism::cat_map());
        }
        assert_eq!(out.base, BasePoint::Torus(q));

        let v = UnitTangent::new(DiskPoint::from_re_im(0.2, 0.1).unwrap(), 0.4);
        let cc = Cocycle::random_trigonometric(CocycleKind::Continuous, 3, 2, 1, 0.5, 3).unwrap();
        let out = step_extension(
            &ExtendedState::on_tangent(v, 3),
            &cc,
            &BaseDynamics::Geodesic(None),
            Advance::Time(0.7),
            &ExtensionConfig::default(),
        )
        .unwrap();
        assert_eq!(out.base, BasePoint::Tangent(geodesic_flow(&v, 0.7)));
    }

    #[test]
    fn right_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 3, 2, 0.8, 6).unwrap();
        let cfg = ExtensionConfig::default();
        for _ in 0..20 {
            let g = RotationMatrix::random_givens(3, &mut rng);
            let s = ExtendedState::on_torus(TorusPoint::new(rng.random(), rng.random()), 3);
            let n = rng.random_range(1..100);
            let a = step_extension(&s.right_act(&g), &c, &cat(), Advance::Steps(n), &cfg).unwrap();
            let b = step_extension(&s, &c, &cat(), Advance::Steps(n), &cfg).unwrap().right_act(&g);
            assert!(a.fiber.distance(&b.fiber) < 1e-10);
        }
        let cc = Cocycle::random_trigonometric(CocycleKind::Continuous, 3, 2, 1, 0.5, 7).unwrap();
        let v = UnitTangent::new(DiskPoint::from_re_im(-0.1, 0.3).unwrap(), 2.0);
        let g = RotationMatrix::random_givens(3, &mut rng);
        let s = ExtendedState::on_tangent(v, 3);
        let dyn_ = BaseDynamics::Geodesic(None);
        let a = step_extension(&s.right_act(&g), &cc, &dyn_, Advance::Time(1.3), &cfg).unwrap();
        let b = step_extension(&s, &cc, &dyn_, Advance::Time(1.3), &cfg).unwrap().right_act(&g);
        assert!(a.fiber.distance(&b.fiber) < 1e-10);
    }

    #[test]
    fn constant_generator_matches_matrix_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = SkewMatrix::random(4, 0.8, &mut rng);
        let c = Cocycle::constant(CocycleKind::Continuous, a.clone());
        let v = UnitTangent::new(DiskPoint::origin(), 0.0);
        for t in [0.05, 1.0, 3.7] {
            let out = step_extension(
                &ExtendedState::on_tangent(v, 4),
                &c,
                &BaseDynamics::Geodesic(None),
                Advance::Time(t),
                &ExtensionConfig::default(),
            )
            .unwrap();
            let oracle = (a.matrix() * t).exp();
            assert!((out.fiber.matrix() - oracle).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn csv_round_trips_at_full_precision() {
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 3, 2, 0.5, 1).unwrap();
        let dyn_ = cat();
        let s = ExtendedState::on_torus(TorusPoint::new(0.1, 0.2), 3);
        let states: Vec<_> = Orbit::new(s, &c, &dyn_, Advance::Steps(1), ExtensionConfig::default(), 5).collect();
        let mut buf = Vec::new();
        let rows = write_orbit_csv(&mut buf, &["seed 1".into()], states.clone()).unwrap();
        assert_eq!(rows, 5);
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# seed 1"));
        assert!(lines.next().unwrap().starts_with("step,x,y,r00"));
        for (line, st) in lines.zip(&states) {
            let vals: Vec<f64> = line.split(',').skip(3).map(|v| v.parse().unwrap()).collect();
            assert_eq!(vals, st.fiber.to_row_major());
        }
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let c = Cocycle::trivial(CocycleKind::Continuous, 3);
        let s = ExtendedState::on_torus(TorusPoint::origin(), 3);
        let r = step_extension(&s, &c, &cat(), Advance::Steps(1), &ExtensionConfig::default());
        assert!(matches!(r, Err(Error::KindMismatch(_))));
    }

    #[test]
    fn fiber_stays_orthogonal_over_a_million_steps() {
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 3, 2, 0.9, 21).unwrap();
        let cfg = ExtensionConfig::default();
        let s = ExtendedState::on_torus(TorusPoint::new(0.123, 0.456), 3);
        let mut worst = 0.0_f64;
        for st in Orbit::new(s, &c, &cat(), Advance::Steps(1), cfg, 1_000_000) {
            worst = worst.max(st.fiber.orthogonality_residual());
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn orbit_on_surface_stays_in_domain() {
        let dom = FuchsianDomain::regular_octagon();
        let dyn_ = BaseDynamics::Geodesic(Some(dom.clone()));
        let c = Cocycle::random_trigonometric(CocycleKind::Continuous, 3, 2, 1, 0.5, 3).unwrap();
        let v = UnitTangent::new(DiskPoint::from_re_im(0.1, 0.0).unwrap(), 0.3);
        let mut orbit =
            Orbit::new(ExtendedState::on_tangent(v, 3), &c, &dyn_, Advance::Time(0.1), ExtensionConfig::default(), 500);
        for st in orbit.by_ref() {
            if let BasePoint::Tangent(v) = st.base {
                assert!(dom.contains(v.base().z(), 1e-9));
            }
        }
        assert!(orbit.error().is_none());
    }
}
