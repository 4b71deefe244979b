use frameflow::base::{homoclinic_points, ToralAutomorphism};
use frameflow::extension::{kahler_like_cocycle, Cocycle, CocycleKind};
use frameflow::group::{standard_complex_structure, RotationMatrix};
use frameflow::linalg;
use frameflow::transitivity::*;
use rand::SeedableRng;

fn pipeline(c: &Cocycle) -> (Vec<RotationMatrix>, SubgroupEstimate) {
    let a = ToralAutomorphism::cat_map();
    let pts = homoclinic_points(&a, 1).unwrap();
    let rhos = brin_rhos(&a, c, &pts, TransitionCut::default(), &HolonomyConfig::default()).unwrap();
    let h = estimate_transitivity_group(&rhos, &EstimatorConfig::default()).unwrap();
    (rhos, h)
}

#[test]
fn generic_so3_cocycle_is_ergodic() {
    for seed in [1, 2, 42] {
        let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 3, 3, 2, 0.7, seed).unwrap();
        let (_, h) = pipeline(&c);
        assert_eq!(h.dimension, 3, "seed {seed}");
        assert!(h.orthonormality_residual() < 1e-9);
        assert!(h.closure_residual() < 1e-6);
        assert_eq!(ergodicity_verdict(&h, 3, MIN_GENERATORS), Verdict::Ergodic);
        assert!(fixed_tensors(&h, Representation::Standard, 3).unwrap().is_empty());
    }
}

#[test]
fn kahler_cocycle_is_obstructed_by_its_two_form() {
    let c = kahler_like_cocycle(4, CocycleKind::Discrete, 11).unwrap();
    let (_, h) = pipeline(&c);
    assert!(h.dimension < 6 && h.dimension > 0);
    assert_eq!(ergodicity_verdict(&h, 4, MIN_GENERATORS), Verdict::NotErgodic);
    let forms = fixed_tensors(&h, Representation::Lambda2, 4).unwrap();
    let j = standard_complex_structure(4).unwrap();
    let best =
        forms.iter().map(|t| linalg::frobenius_inner(&t.as_matrix().unwrap(), &j).abs() / j.norm()).fold(0.0, f64::max);
    assert!((best - 1.0).abs() < 1e-8, "{best}");
    assert!(forms.iter().all(|t| t.residual < 1e-8));
}

#[test]
fn changing_the_fiber_identification_changes_nothing_observable() {
    let c = Cocycle::random_trigonometric(CocycleKind::Discrete, 4, 3, 2, 0.4, 9).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let g = RotationMatrix::random_givens(4, &mut rng);
    let (_, h) = pipeline(&c);
    let (_, hg) = pipeline(&c.conjugated(&g));
    assert_eq!(h.dimension, hg.dimension);
    assert_eq!(ergodicity_verdict(&h, 4, MIN_GENERATORS), ergodicity_verdict(&hg, 4, MIN_GENERATORS));
    for rep in [Representation::Standard, Representation::Lambda2, Representation::Sym2Traceless] {
        let t = fixed_tensors(&h, rep, 4).unwrap();
        let tg = fixed_tensors(&hg, rep, 4).unwrap();
        assert_eq!(t.len(), tg.len());
        for (x, y) in t.iter().zip(&tg) {
            assert!((x.residual - y.residual).abs() < 1e-9);
        }
    }
}
