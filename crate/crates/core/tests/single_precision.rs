use num_complex::Complex;

use polydisc::cyclicity::cyclicity_curve;
use polydisc::functionals::{classify, Classification, ClassifyOptions, MomentFunctional};
use polydisc::quadrature::QuadratureRule;
use polydisc::{MultiIndex, Series32, SpaceSpec, Truncation};

#[test]
fn norms_and_means_in_f32() {
    let t = Truncation::new(2, 2).unwrap();
    let f = Series32::monomial(t, &MultiIndex::new(vec![1, 1]).unwrap(), Complex::new(1.0, 0.0)).unwrap();
    let da = SpaceSpec::DruryArveson { n: 2 }.norm(&f).unwrap();
    assert!((da - 0.5f32.sqrt()).abs() < 1e-6);
    let m = QuadratureRule::<f32>::for_cap(2, 2, 0.5).unwrap().p_mean(&f, 2.0).unwrap();
    assert!((m - 0.25).abs() < 1e-6);
}

#[test]
fn cyclicity_curve_in_f32() {
    let f = Series32::from_dense(Truncation::new(1, 1).unwrap(), vec![Complex::new(-0.5, 0.0), Complex::new(1.0, 0.0)]).unwrap();
    let d = cyclicity_curve(&f, &SpaceSpec::HardyH2 { n: 1 }, 8).unwrap();
    assert!((d.distances[8].powi(2) - 0.75).abs() < 1e-3);
}

#[test]
fn point_evaluation_classified_in_f32() {
    let b = [Complex::new(0.3f32, 0.1), Complex::new(-0.2, 0.4)];
    let m = MomentFunctional::point_evaluation(Truncation::new(2, 3).unwrap(), Complex::new(1.5, 0.0), &b).unwrap();
    match classify(&m, &ClassifyOptions::default()).unwrap() {
        Classification::PointEvaluation { a, b: rb, .. } => {
            assert!((a - Complex::new(1.5, 0.0)).norm() < 1e-4);
            assert!(rb.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-4));
        }
        other => panic!("{other:?}"),
    }
}
