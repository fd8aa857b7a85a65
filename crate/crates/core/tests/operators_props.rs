mod common;

use proptest::prelude::*;

use common::{c, complex, series};
use polydisc::operators::{exp_probe, multiplier_matrix, recover_wco, verify_wco, wco_matrix, Overflow, ProbeGrid, Side, WcoSpec};
use polydisc::quadrature::QuadratureRule;
use polydisc::{Series64, SpaceSpec, Truncation};

const CAP: usize = 4;

/// Weight with `|a(0)| ≥ 0.7` and symbol components of coefficient sum
/// below one, so `b` maps the closed polydisc into the open one.
fn wco_spec(m: usize, n: usize) -> impl Strategy<Value = WcoSpec<f64>> {
    let a = (series(m, 2, CAP, 0.1), complex(0.3));
    let b = prop::collection::vec((series(m, 2, CAP, 1.0), 0.1f64..0.9), n);
    (a, b).prop_map(|((mut a, shift), bs)| {
        a.coeffs_mut()[0] = c(1.0, 0.0) + shift;
        let b = bs
            .into_iter()
            .map(|(s, r)| {
                let l1: f64 = s.coeffs().iter().map(|v| v.norm()).sum();
                s.scale_real(r / l1.max(1e-300))
            })
            .collect();
        WcoSpec::new(a, b).unwrap()
    })
}

fn shapes() -> impl Strategy<Value = WcoSpec<f64>> {
    (1usize..=2, 1usize..=3).prop_flat_map(|(m, n)| wco_spec(m, n))
}

fn build_at(spec: &WcoSpec<f64>, cap: usize) -> polydisc::operators::OperatorMatrix<f64> {
    let n = spec.b.len();
    let spec = WcoSpec::new(spec.a.with_cap(cap), spec.b.iter().map(|b| b.with_cap(cap)).collect()).unwrap();
    let domain = Side::new(Truncation::new(n, cap).unwrap(), SpaceSpec::HardyH2 { n }).unwrap();
    wco_matrix(&spec, domain, SpaceSpec::HardyH2 { n: spec.a.n() }, Overflow::Flag).unwrap()
}

fn build(spec: &WcoSpec<f64>) -> polydisc::operators::OperatorMatrix<f64> {
    build_at(spec, CAP)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recovery_inverts_construction(spec in shapes()) {
        let rec = recover_wco(&build(&spec)).unwrap();
        let err = rec.b.iter().zip(&spec.b).map(|(x, y)| x.max_abs_diff(y)).fold(rec.a.max_abs_diff(&spec.a), f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn constructed_operators_verify(spec in shapes()) {
        let op = build(&spec);
        let v = verify_wco(&op, &recover_wco(&op).unwrap()).unwrap();
        prop_assert!(v.max_defect <= 1e-11);
    }

    #[test]
    fn structure_implies_non_vanishing_probes(spec in shapes(), w in prop::collection::vec(complex(0.4), 3)) {
        let op = build_at(&spec, 14);
        let rec = recover_wco(&op).unwrap();
        let v = verify_wco(&op, &rec).unwrap();
        let rule = QuadratureRule::<f64>::new(spec.a.n(), 16, 0.95).unwrap();
        let (inside, _) = rec.symbol_inside(&rule);
        prop_assume!(v.max_defect <= 1e-11 && inside && rec.weight_min_modulus(&rule) > 1e-6);
        let w = w[..spec.b.len()].to_vec();
        let probes = exp_probe(&op, &[w, vec![c(0.0, 0.0); spec.b.len()]], &ProbeGrid::default()).unwrap();
        prop_assert!(probes.witness.is_none());
    }

    #[test]
    fn multipliers_compose_multiplicatively(
        (phi, psi) in (1usize..=2).prop_flat_map(|n| (series(n, 2, 2, 1.0), series(n, 2, 2, 1.0)))
    ) {
        let n = phi.n();
        let cap = 6;
        let side = Side::new(Truncation::new(n, cap).unwrap(), SpaceSpec::HardyH2 { n }).unwrap();
        let (phi, psi) = (phi.with_cap(cap), psi.with_cap(cap));
        let mp = multiplier_matrix(&phi, side, Overflow::Flag).unwrap();
        let mq = multiplier_matrix(&psi, side, Overflow::Flag).unwrap();
        let mpq = multiplier_matrix(&phi.mul(&psi).unwrap(), side, Overflow::Flag).unwrap();
        let prod = mp.compose(&mq).unwrap();
        let fit = cap - phi.degree().unwrap_or(0) - psi.degree().unwrap_or(0);
        for (j, alpha) in side.trunc.basis().iter().enumerate() {
            if alpha.degree() <= fit {
                prop_assert!(prod.column(j).max_abs_diff(&mpq.column(j)) <= 1e-13);
            }
        }
    }
}

#[test]
fn weighted_identity_is_multiplication() {
    let t = Truncation::new(1, CAP).unwrap();
    let a = Series64::from_dense(t, vec![c(2.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    let spec = WcoSpec::new(a.clone(), vec![Series64::variable(t, 0).unwrap()]).unwrap();
    let side = Side::new(t, SpaceSpec::HardyH2 { n: 1 }).unwrap();
    let op = build(&spec);
    let mult = multiplier_matrix(&a, side, Overflow::Flag).unwrap();
    for j in 0..t.size() {
        assert!(op.column(j).max_abs_diff(&mult.column(j)) < 1e-15);
    }
}
