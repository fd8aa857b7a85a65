//! Decoding of command inputs: `@file` JSON, expressions and built-in names.

use std::fs;
use std::path::Path;

use polydisc::evaluator::{Evaluator, ExpPolynomial, NamedEvaluator};
use polydisc::expr::Expr;
use polydisc::functionals::{symmetric_average, MomentFunctional};
use polydisc::io::{moments_from_json, operator_from_json, series_from_json, series_list_from_json};
use polydisc::operators::{average_operator, rudin_operator, shift_matrix, wco_matrix, OperatorMatrix, Overflow, Side, WcoSpec};
use polydisc::{Cplx, Error, Result, Series64, SpaceSpec, Truncation};

pub fn read_file(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))
}

/// A complex literal such as `0.5`, `-1+2i`, `i`.
pub fn parse_complex(src: &str) -> Result<Cplx<f64>> {
    let e = Expr::parse(src)?;
    if e.n_vars() > 0 || e.degree_bound() > 0 {
        return Err(Error::Parse(format!("'{src}' is not a constant")));
    }
    Ok(e.to_series::<f64>(Truncation::new(1, 0)?)?.constant_term())
}

pub fn parse_point(src: &str) -> Result<Vec<Cplx<f64>>> {
    src.split(',').map(parse_complex).collect()
}

/// `@file` series JSON or a polynomial expression, over `n` variables when
/// given, lifted to `cap` when given.
pub fn series(src: &str, n: Option<usize>, cap: Option<usize>) -> Result<Series64> {
    let s = if let Some(path) = src.strip_prefix('@') {
        series_from_json(&read_file(path)?)?
    } else {
        polydisc::expr::parse_series(src, n, cap)?
    };
    if let Some(n) = n {
        if s.n() != n {
            return Err(Error::DimensionMismatch(format!("input over n = {} for a space over n = {n}", s.n())));
        }
    }
    match cap {
        Some(c) if c < s.degree().unwrap_or(0) => Err(Error::DegreeOverflow { degree: s.degree().unwrap_or(0), cap: c }),
        Some(c) => Ok(s.with_cap(c)),
        None => Ok(s),
    }
}

/// Like [`series`], but `exp:<expr>` gives the exponential truncated at
/// `cap` (default 16), with the constant term factored out as `e^{p(0)}`.
pub fn series_or_exp(src: &str, n: Option<usize>, cap: Option<usize>) -> Result<Series64> {
    if let Some(body) = src.strip_prefix("exp:") {
        let e = Expr::parse(body)?;
        let n = n.unwrap_or_else(|| e.n_vars().max(1));
        let t = Truncation::new(n, cap.unwrap_or(16))?;
        let mut p = e.to_series_truncated::<f64>(t)?;
        let c0 = p.constant_term();
        p.coeffs_mut()[0] = Cplx::new(0.0, 0.0);
        return Ok(p.exp()?.scale(c0.exp()));
    }
    series(src, n, cap)
}

pub enum Function {
    Named(NamedEvaluator),
    Exp(ExpPolynomial<f64>),
    Series(Series64),
}

impl Function {
    pub fn evaluator(&self) -> &dyn Evaluator<f64> {
        match self {
            Function::Named(k) => k.as_evaluator(),
            Function::Exp(e) => e,
            Function::Series(s) => s,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Function::Named(k) => format!("{k:?}"),
            Function::Exp(e) => format!("exp of a degree-{} polynomial", e.p.degree().unwrap_or(0)),
            Function::Series(s) => format!("series of degree {}", s.degree().unwrap_or(0)),
        }
    }
}

/// Built-in closed form, `exp:<expr>` (evaluated exactly) or a series.
pub fn function(src: &str, n: Option<usize>) -> Result<Function> {
    if let Some(k) = NamedEvaluator::lookup(src) {
        return Ok(Function::Named(k));
    }
    if let Some(body) = src.strip_prefix("exp:") {
        let p = polydisc::expr::parse_series(body, n, None)?;
        return Ok(Function::Exp(ExpPolynomial { p }));
    }
    Ok(Function::Series(series(src, n, None)?))
}

/// `@file`, `point:<b1>,…[:a=<c>]` or `cosh[:c=<v>]`.
pub fn moments(src: &str, cap: usize) -> Result<MomentFunctional<f64>> {
    if let Some(path) = src.strip_prefix('@') {
        return moments_from_json(&read_file(path)?);
    }
    let mut parts = src.split(':');
    let head = parts.next().unwrap_or_default();
    match head {
        "point" => {
            let b = parse_point(parts.next().ok_or_else(|| Error::Parse("point: needs coordinates".into()))?)?;
            let mut a = Cplx::new(1.0, 0.0);
            for p in parts {
                match p.split_once('=') {
                    Some(("a", v)) => a = parse_complex(v)?,
                    _ => return Err(Error::Parse(format!("unknown point field '{p}'"))),
                }
            }
            MomentFunctional::point_evaluation(Truncation::new(b.len(), cap)?, a, &b)
        }
        "cosh" => {
            let mut c = 0.5;
            for p in parts {
                match p.split_once('=') {
                    Some(("c", v)) => c = v.parse().map_err(|_| Error::Parse(format!("bad c '{v}'")))?,
                    _ => return Err(Error::Parse(format!("unknown cosh field '{p}'"))),
                }
            }
            symmetric_average(cap, c)
        }
        other => Err(Error::Parse(format!("unknown moment source '{other}'"))),
    }
}

enum Parts {
    Files(Vec<Series64>),
    Exprs(Vec<Expr>),
}

fn parts(src: &str) -> Result<Parts> {
    let path = src.strip_prefix('@').unwrap_or(src);
    if src.starts_with('@') || Path::new(path).is_file() {
        return Ok(Parts::Files(series_list_from_json(&read_file(path)?)?));
    }
    Ok(Parts::Exprs(src.split(',').map(Expr::parse).collect::<Result<_>>()?))
}

impl Parts {
    fn n(&self) -> Option<usize> {
        match self {
            Parts::Files(v) => v.first().map(|s| s.n()),
            Parts::Exprs(v) => v.iter().map(Expr::n_vars).max().filter(|&n| n > 0),
        }
    }

    fn resolve(self, trunc: Truncation) -> Result<Vec<Series64>> {
        match self {
            Parts::Files(v) => v
                .into_iter()
                .map(|s| {
                    trunc.check_same(&s.trunc().with_cap(trunc.degree_cap))?;
                    let d = s.degree().unwrap_or(0);
                    if d > trunc.degree_cap {
                        return Err(Error::DegreeOverflow { degree: d, cap: trunc.degree_cap });
                    }
                    Ok(s.with_cap(trunc.degree_cap))
                })
                .collect(),
            Parts::Exprs(v) => v.iter().map(|e| e.to_series(trunc)).collect(),
        }
    }
}

/// `@file`, `shift:i=<k>`, `rudin`, `average` or `wco:<a>:<b>`, where `a`
/// and `b` are JSON files or expressions (`b` components comma-separated).
pub fn operator(src: &str, space: Option<SpaceSpec>, cap: usize) -> Result<OperatorMatrix<f64>> {
    if let Some(path) = src.strip_prefix('@') {
        return operator_from_json(&read_file(path)?);
    }
    let space_or = |n: usize| space.map(|s| s.with_n(n)).unwrap_or(SpaceSpec::HardyH2 { n });
    let mut fields = src.splitn(3, ':');
    match fields.next().unwrap_or_default() {
        "rudin" => rudin_operator(cap),
        "average" => average_operator(cap, space_or(1)),
        "shift" => {
            let i = match fields.next().and_then(|p| p.strip_prefix("i=")) {
                Some(v) => v.parse::<usize>().map_err(|_| Error::Parse(format!("bad shift index '{v}'")))?,
                None => 1,
            };
            let sp = space.unwrap_or(SpaceSpec::HardyH2 { n: i.max(1) });
            if i == 0 || i > sp.n() {
                return Err(Error::InvalidArgument(format!("shift index {i} outside 1..={}", sp.n())));
            }
            shift_matrix(i - 1, Side::new(Truncation::new(sp.n(), cap)?, sp)?, Overflow::Flag)
        }
        "wco" => {
            let a_src = fields.next().ok_or_else(|| Error::Parse("wco: needs a weight".into()))?;
            let b_src = fields.next().ok_or_else(|| Error::Parse("wco: needs a symbol".into()))?;
            let (a_parts, b_parts) = (parts(a_src)?, parts(b_src)?);
            let cod_n = a_parts.n().into_iter().chain(b_parts.n()).max().unwrap_or(1);
            let cod = Truncation::new(cod_n, cap)?;
            let a_list = a_parts.resolve(cod)?;
            if a_list.len() != 1 {
                return Err(Error::Parse("wco weight must be a single series".into()));
            }
            let a = a_list.into_iter().next().expect("one weight");
            let b = b_parts.resolve(cod)?;
            let domain = Side::new(Truncation::new(b.len(), cap)?, space_or(b.len()))?;
            wco_matrix(&WcoSpec::new(a, b)?, domain, space_or(cod_n), Overflow::Flag)
        }
        other => Err(Error::Parse(format!("unknown operator source '{other}'"))),
    }
}
