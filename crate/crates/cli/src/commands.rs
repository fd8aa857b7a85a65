use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use polydisc::cyclicity::{cyclicity_curve, outer_test, OuterOptions, CYCLIC_FLOOR, PLATEAU_DROP};
use polydisc::entire::{check_growth, recover_exponent, FactorOptions, GrowthAssumption};
use polydisc::functionals::{classify, gkz_equivalence_suite, m0_exhaustive_defect, ClassifyOptions, GkzOptions};
use polydisc::io::MomentsJson;
use polydisc::operators::{cyclicity_preservation_suite, default_family, exp_probe, recover_wco, verify_wco, ProbeGrid};
use polydisc::quadrature::QuadratureRule;
use polydisc::scalar::cplx;
use polydisc::spaces::format_complex;
use polydisc::{Error, Result, Series64, SpaceSpec};

use crate::inputs;
use crate::{Format, GlobalOpts};

pub enum Output {
    Json { result: Value, tolerances: BTreeMap<&'static str, f64> },
    Text(String),
}

/// Columns with defect at or below this count as weighted composition.
const WCO_TOL: f64 = 1e-9;

fn space_for(opts: &GlobalOpts, n: usize) -> Result<SpaceSpec> {
    match opts.space()? {
        Some(s) if s.n() != n => Err(Error::DimensionMismatch(format!("input over n = {n} for space {s}"))),
        Some(s) => Ok(s),
        None => Ok(SpaceSpec::HardyH2 { n }),
    }
}

fn space_n(opts: &GlobalOpts) -> Result<Option<usize>> {
    Ok(opts.space()?.map(|s| s.n()))
}

fn to_value<S: Serialize>(v: &S) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Shortest round-trip form, switching to exponent notation for tiny or huge values.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn json_only(opts: &GlobalOpts, command: &str) -> Result<()> {
    if opts.format == Some(Format::Csv) {
        return Err(Error::InvalidArgument(format!("{command} has no CSV form")));
    }
    Ok(())
}

pub fn norm(opts: &GlobalOpts, input: &str, p: &[f64]) -> Result<Output> {
    let f = inputs::series_or_exp(input, space_n(opts)?, opts.cap)?;
    let space = space_for(opts, f.n())?;
    let value = space.norm(&f)?;
    let mut means = Vec::new();
    for &r in opts.radii.as_deref().unwrap_or(&[]) {
        let rule = match opts.nodes {
            Some(k) => QuadratureRule::new(f.n(), k, r)?,
            None => QuadratureRule::for_cap(f.n(), f.cap(), r)?,
        };
        for &pp in p {
            means.push(json!({ "r": r, "p": pp, "nodes_per_circle": rule.points_per_circle, "value": rule.p_mean(&f, pp)? }));
        }
    }
    if opts.format == Some(Format::Csv) {
        let mut out = format!("quantity,value\nnorm,{}\nnorm_squared,{}\n", num(value), num(value * value));
        for m in &means {
            out.push_str(&format!("p_mean(r={};p={}),{}\n", m["r"], m["p"], m["value"]));
        }
        return Ok(Output::Text(out));
    }
    Ok(Output::Json {
        result: json!({
            "space": space.to_string(),
            "series": to_value(&f),
            "norm": value,
            "norm_squared": value * value,
            "p_means": means,
        }),
        tolerances: BTreeMap::new(),
    })
}

pub fn gram(opts: &GlobalOpts, input: &str) -> Result<Output> {
    let f = inputs::series_or_exp(input, space_n(opts)?, opts.cap)?;
    let space = space_for(opts, f.n())?;
    let degree = opts.degree_max.unwrap_or(4);
    let work = f.trunc().with_cap(degree + f.degree().unwrap_or(0));
    let lifted = f.with_cap(work.degree_cap);
    let basis_idx = work.with_cap(degree).basis();
    let basis: Vec<Series64> = basis_idx.iter().map(|a| lifted.mul_monomial(a)).collect();
    let labels: Vec<String> = basis_idx.iter().map(|a| if a.is_zero() { "f".into() } else { format!("{}*f", a.label()) }).collect();
    let g = space.gram(&basis)?;
    if opts.format != Some(Format::Json) {
        return Ok(Output::Text(g.to_csv(&labels)));
    }
    let rows: Vec<Vec<String>> = (0..g.size()).map(|i| (0..g.size()).map(|j| format_complex(g.entries[(i, j)])).collect()).collect();
    Ok(Output::Json {
        result: json!({ "space": space.to_string(), "labels": labels, "entries": rows, "hermitian": g.is_hermitian(1e-12) }),
        tolerances: BTreeMap::from([("hermitian_tol", 1e-12)]),
    })
}

pub fn cyclicity(opts: &GlobalOpts, input: &str) -> Result<Output> {
    let f = inputs::series_or_exp(input, space_n(opts)?, opts.cap)?;
    let space = space_for(opts, f.n())?;
    let curve = cyclicity_curve(&f, &space, opts.degree_max.unwrap_or(12))?;
    if opts.format != Some(Format::Json) {
        let mut out = String::from("N,d_N,cond\n");
        for ((n, d), c) in curve.degrees.iter().zip(&curve.distances).zip(&curve.conditions) {
            out.push_str(&format!("{n},{},{}\n", num(*d), num(*c)));
        }
        out.push_str(&format!("# verdict={} monotone={}\n", to_value(&curve.verdict).as_str().unwrap_or_default(), curve.monotone));
        return Ok(Output::Text(out));
    }
    Ok(Output::Json {
        result: to_value(&curve),
        tolerances: BTreeMap::from([("cyclic_floor", CYCLIC_FLOOR), ("plateau_drop", PLATEAU_DROP)]),
    })
}

pub fn outer(opts: &GlobalOpts, input: &str) -> Result<Output> {
    let f = inputs::function(input, space_n(opts)?)?;
    let mut o = OuterOptions::default();
    if let Some(r) = &opts.radii {
        if r.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(Error::InvalidArgument("outer radii must lie in (0, 1]".into()));
        }
        o.radii = r.iter().copied().filter(|&x| x < 1.0).collect();
    }
    if let Some(k) = opts.nodes {
        o.outer_nodes = k;
    }
    if let Some(t) = opts.tol_outer {
        o.tol_outer = t;
    }
    let report = outer_test(f.evaluator(), &o)?;
    let tolerances = BTreeMap::from([
        ("tol_outer", o.tol_outer),
        ("log_floor", o.log_floor),
        ("inner_tol", o.inner_tol),
        ("max_clipped_fraction", o.max_clipped_fraction),
    ]);
    if opts.format == Some(Format::Csv) {
        let mut out = String::from("r,mean_log_abs\n");
        for (r, v) in report.radii.iter().zip(&report.rhs) {
            out.push_str(&format!("{},{}\n", num(*r), num(*v)));
        }
        out.push_str(&format!("# lhs={} defect={} verdict={}\n", num(report.lhs), num(report.defect), to_value(&report.verdict).as_str().unwrap_or_default()));
        return Ok(Output::Text(out));
    }
    Ok(Output::Json {
        result: json!({ "function": f.describe(), "outer_nodes": o.outer_nodes, "report": to_value(&report) }),
        tolerances,
    })
}

pub fn classify_cmd(opts: &GlobalOpts, input: &str) -> Result<Output> {
    json_only(opts, "classify")?;
    let m = inputs::moments(input, opts.cap.unwrap_or(8))?;
    let copts = ClassifyOptions::default();
    let classification = classify(&m, &copts)?;
    let gopts = GkzOptions { seed: opts.seed, ..Default::default() };
    let lambda0 = m.lambda0();
    let normalized = (lambda0.norm() != 0.0).then(|| m.scale(cplx::<f64>(1.0, 0.0) / lambda0));
    let (gkz, gkz_note) = match &normalized {
        None => (Value::Null, Some("lambda(1) = 0: the suite needs a normalizable functional".to_string())),
        Some(_) if m.trunc().degree_cap < 2 => (Value::Null, Some("the suite needs cap >= 2".to_string())),
        Some(nm) => (to_value(&gkz_equivalence_suite(nm, &gopts)?), None),
    };
    let m0 = m0_exhaustive_defect(normalized.as_ref().unwrap_or(&m));
    Ok(Output::Json {
        result: json!({
            "moments": to_value(&MomentsJson::from_functional(&m)),
            "classification": to_value(&classification),
            "normalized": normalized.is_some(),
            "m0_exhaustive_defect": m0,
            "gkz": gkz,
            "gkz_note": gkz_note,
        }),
        tolerances: BTreeMap::from([
            ("fit_tol", copts.fit_tol),
            ("normalization_tol", gopts.normalization_tol),
            ("defect_tol", gopts.defect_tol),
        ]),
    })
}

fn error_value(e: &Error) -> Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
}

pub fn wco(opts: &GlobalOpts, input: &str) -> Result<Output> {
    json_only(opts, "wco")?;
    let op = inputs::operator(input, opts.space()?, opts.cap.unwrap_or(24))?;
    let n_max = opts.degree_max.unwrap_or(12);
    let (recovery, verification, is_wco) = match recover_wco(&op) {
        Ok(spec) => {
            let v = verify_wco(&op, &spec)?;
            let ok = v.max_defect <= WCO_TOL;
            (to_value(&spec), to_value(&v), Some(ok))
        }
        Err(e) => (error_value(&e), Value::Null, None),
    };
    let n = op.domain.trunc.n;
    let mut samples: Vec<(String, Vec<polydisc::Cplx<f64>>)> = vec![("0".into(), vec![cplx(0.0, 0.0); n])];
    for i in 0..n {
        for (label, c) in [("1", cplx(1.0, 0.0)), ("-1", cplx(-1.0, 0.0)), ("i", cplx(0.0, 1.0))] {
            let mut w = vec![cplx(0.0, 0.0); n];
            w[i] = c;
            samples.push((format!("{label}*e{}", i + 1), w));
        }
    }
    let grid = ProbeGrid::default();
    let probes: Vec<Value> = samples
        .iter()
        .map(|(label, w)| match exp_probe(&op, std::slice::from_ref(w), &grid) {
            Ok(r) => json!({ "w": label, "probe": to_value(&r.probes[0]) }),
            Err(e) => json!({ "w": label, "skipped": error_value(&e)["error"] }),
        })
        .collect();
    let preservation = match cyclicity_preservation_suite(&op, &default_family(op.domain), n_max) {
        Ok(r) => to_value(&r),
        Err(e) => error_value(&e),
    };
    Ok(Output::Json {
        result: json!({
            "domain": { "n": n, "degree_cap": op.domain.trunc.degree_cap, "space": op.domain.space.to_string() },
            "codomain": { "n": op.codomain.trunc.n, "degree_cap": op.codomain.trunc.degree_cap, "space": op.codomain.space.to_string() },
            "truncated_columns": op.truncated.iter().filter(|&&t| t).count(),
            "operator_norm": op.operator_norm(),
            "recovery": recovery,
            "verification": verification,
            "is_wco": is_wco,
            "exp_probes": probes,
            "preservation": preservation,
        }),
        tolerances: BTreeMap::from([("wco_defect_tol", WCO_TOL), ("exp_tail_tol", 1e-10), ("probe_floor_rel", 1e-12)]),
    })
}

pub struct FactorArgs {
    pub m: Option<usize>,
    pub growth_a: Option<f64>,
    pub growth_b: Option<f64>,
}

pub fn factor(opts: &GlobalOpts, input: &str, args: &FactorArgs) -> Result<Output> {
    json_only(opts, "factor")?;
    let f = inputs::function(input, space_n(opts)?)?;
    let m = match (args.m, &f) {
        (Some(m), _) => m,
        (None, inputs::Function::Exp(e)) => e.p.degree().unwrap_or(0),
        (None, _) => return Err(Error::InvalidArgument("--m is required unless the input is exp:<expr>".into())),
    };
    let growth = match (args.growth_a, args.growth_b) {
        (Some(a), Some(b)) => Some(GrowthAssumption { a, b }),
        (None, None) => None,
        _ => return Err(Error::InvalidArgument("--growth-a and --growth-b go together".into())),
    };
    let fopts = FactorOptions { fit_degree: opts.degree_max, seed: opts.seed, growth, ..Default::default() };
    let report = recover_exponent(f.evaluator(), m, &fopts)?;
    let certificate = match growth {
        Some(g) => {
            let radii = opts.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
            to_value(&check_growth(f.evaluator(), g.a, g.b, m, &radii, opts.nodes.unwrap_or(64))?)
        }
        None => Value::Null,
    };
    Ok(Output::Json {
        result: json!({ "function": f.describe(), "exponent": to_value(&report), "growth_certificate": certificate }),
        tolerances: BTreeMap::from([("fit_tol", fopts.fit_tol), ("tail_tol", fopts.tail_tol)]),
    })
}
