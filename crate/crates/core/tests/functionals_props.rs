mod common;

use proptest::prelude::*;

use common::{c, complex, point, C};
use polydisc::functionals::{classify, m0_exhaustive_defect, moment_transform, Classification, ClassifyOptions, MomentFunctional};
use polydisc::Truncation;

fn weight() -> impl Strategy<Value = C> {
    complex(2.0).prop_filter("away from zero", |a| a.norm() > 0.2)
}

fn recovered(m: &MomentFunctional<f64>) -> Option<(C, Vec<C>)> {
    match classify(m, &ClassifyOptions::default()).unwrap() {
        Classification::PointEvaluation { a, b, .. } => Some((a, b)),
        _ => None,
    }
}

fn err(x: &(C, Vec<C>), a: C, b: &[C]) -> f64 {
    x.1.iter().zip(b).map(|(p, q)| (p - q).norm()).fold((x.0 - a).norm(), f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn point_evaluations_round_trip(a in weight(), b in (1usize..=2).prop_flat_map(|n| point(n, 0.95))) {
        let m = MomentFunctional::point_evaluation(Truncation::new(b.len(), 4).unwrap(), a, &b).unwrap();
        let r = recovered(&m);
        prop_assert!(r.is_some());
        prop_assert!(err(&r.unwrap(), a, &b) < 1e-12);
    }

    #[test]
    fn classification_scales_the_weight_only(a in weight(), k in weight(), b in (1usize..=2).prop_flat_map(|n| point(n, 0.9))) {
        let m = MomentFunctional::point_evaluation(Truncation::new(b.len(), 4).unwrap(), a, &b).unwrap();
        let r = recovered(&m.scale(k)).unwrap();
        prop_assert!(err(&r, a * k, &b) < 1e-12);
    }

    #[test]
    fn transform_of_point_evaluation_is_exponential(
        a in weight(),
        (b, w) in (1usize..=2).prop_flat_map(|n| (point(n, 0.9), prop::collection::vec(complex(1.5), n))),
    ) {
        let m = MomentFunctional::point_evaluation(Truncation::new(b.len(), 24).unwrap(), a, &b).unwrap();
        let t = moment_transform(&m, &w, 24).unwrap();
        let exact = a * b.iter().zip(&w).map(|(x, y)| x * y).sum::<C>().exp();
        prop_assert!((t.value - exact).norm() <= t.tail_bound.unwrap() + t.roundoff + 1e-14);
    }

    #[test]
    fn mixtures_of_two_points_are_not_multiplicative(
        s in 0.2f64..0.8,
        (p, q) in (1usize..=2).prop_flat_map(|n| (point(n, 0.9), point(n, 0.9))),
    ) {
        prop_assume!(p.iter().zip(&q).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) > 0.05);
        let t = Truncation::new(p.len(), 4).unwrap();
        let m = MomentFunctional::combination(t, &[(c(s, 0.0), p), (c(1.0 - s, 0.0), q)]).unwrap();
        prop_assert!(m0_exhaustive_defect(&m) > 1e-12);
        prop_assert!(recovered(&m).is_none());
    }

    #[test]
    fn normalized_point_evaluations_are_multiplicative(b in (1usize..=3).prop_flat_map(|n| point(n, 0.95))) {
        let m = MomentFunctional::point_evaluation(Truncation::new(b.len(), 4).unwrap(), c(1.0, 0.0), &b).unwrap();
        prop_assert!(m0_exhaustive_defect(&m) <= 1e-12);
    }
}
