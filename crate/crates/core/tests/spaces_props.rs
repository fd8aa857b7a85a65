mod common;

use proptest::prelude::*;

use common::{c, point, series};
use polydisc::quadrature::QuadratureRule;
use polydisc::{MultiIndex, Series64, SpaceSpec, Truncation};

fn spaces(n: usize) -> [SpaceSpec; 3] {
    [SpaceSpec::HardyH2 { n }, SpaceSpec::DirichletAlpha { n, alpha: 1.5 }, SpaceSpec::DruryArveson { n }]
}

proptest! {
    #[test]
    fn dirichlet_zero_is_hardy(f in (1usize..=3).prop_flat_map(|n| series(n, 5, 5, 1.0))) {
        let n = f.n();
        let h = SpaceSpec::HardyH2 { n }.norm(&f).unwrap();
        let d = SpaceSpec::DirichletAlpha { n, alpha: 0.0 }.norm(&f).unwrap();
        prop_assert!((h - d).abs() <= 1e-14 * h.max(1.0));
    }

    #[test]
    fn p_means_grow_with_radius(f in (1usize..=2).prop_flat_map(|n| series(n, 4, 4, 1.0)), p in prop::sample::select(vec![1.0, 2.0, 4.0])) {
        let means: Vec<f64> = [0.5, 0.9, 0.99]
            .iter()
            .map(|&r| QuadratureRule::<f64>::for_cap(f.n(), 4, r).unwrap().p_mean(&f, p).unwrap())
            .collect();
        prop_assert!(means.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    }

    #[test]
    fn monomial_gram_is_diagonal_with_weights(n in 1usize..=3, cap in 0usize..=4, which in 0usize..3) {
        let space = spaces(n)[which];
        let t = Truncation::new(n, cap).unwrap();
        let basis: Vec<Series64> = t.basis().iter().map(|a| Series64::monomial(t, a, c(1.0, 0.0)).unwrap()).collect();
        let g = space.gram(&basis).unwrap();
        for (j, aj) in t.basis().iter().enumerate() {
            for k in 0..basis.len() {
                let expect = if j == k { space.weight::<f64>(aj) } else { 0.0 };
                prop_assert!((g.entries[(j, k)] - c(expect, 0.0)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn kernel_columns_increase_toward_closed_form(b in (1usize..=2).prop_flat_map(|n| point(n, 0.9))) {
        let n = b.len();
        let limit: f64 = b.iter().map(|x| 1.0 / (1.0 - x.norm_sqr())).product();
        let mut prev = 0.0;
        for cap in [2usize, 4, 8, 16] {
            let t = Truncation::new(n, cap).unwrap();
            let coeffs: Vec<_> = t.basis().iter().map(|a| {
                a.entries().iter().zip(&b).map(|(&e, x)| x.conj().powu(e)).product()
            }).collect();
            let v = SpaceSpec::HardyH2 { n }.norm(&Series64::from_dense(t, coeffs).unwrap()).unwrap().powi(2);
            prop_assert!(v >= prev && v <= limit * (1.0 + 1e-12));
            prev = v;
        }
    }
}

#[test]
fn constant_one_has_unit_norm_everywhere() {
    for space in spaces(2) {
        let one = Series64::one(Truncation::new(2, 3).unwrap());
        assert_eq!(space.norm(&one).unwrap(), 1.0);
    }
    let z = MultiIndex::new(vec![2, 1]).unwrap();
    assert!((SpaceSpec::DruryArveson { n: 2 }.weight::<f64>(&z) - 1.0 / 3.0).abs() < 1e-16);
}
