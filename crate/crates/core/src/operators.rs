//! Finite matrices of shifts, multipliers and weighted composition
//! operators `T f = a · (f ∘ b)` on truncated monomial bases.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclicity::{cyclicity_curve, exp_tail_norm, CyclicityVerdict, EXP_TAIL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, CMatrix};
use crate::multiindex::{MultiIndex, Truncation};
use crate::quadrature::QuadratureRule;
use crate::scalar::{Cplx, Real};
use crate::series::TruncatedSeries;
use crate::spaces::SpaceSpec;

/// What to do with columns whose exact image leaves the codomain truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overflow {
    Flag,
    Error,
}

/// Truncation and space on one side of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Side {
    pub trunc: Truncation,
    pub space: SpaceSpec,
}

impl Side {
    pub fn new(trunc: Truncation, space: SpaceSpec) -> Result<Side> {
        if trunc.n != space.n() {
            return Err(Error::DimensionMismatch(format!("truncation over n = {} with a space over n = {}", trunc.n, space.n())));
        }
        Ok(Side { trunc, space })
    }
}

/// Column `j` holds the codomain coefficients of the image of the `j`-th
/// domain monomial.
#[derive(Clone, Debug)]
pub struct OperatorMatrix<T: Real> {
    pub domain: Side,
    pub codomain: Side,
    pub entries: CMatrix<T>,
    /// Column `j` dropped terms above the codomain cap.
    pub truncated: Vec<bool>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn from_columns(domain: Side, codomain: Side, columns: &[TruncatedSeries<T>], truncated: Vec<bool>) -> Result<Self> {
        if columns.len() != domain.trunc.size() || truncated.len() != columns.len() {
            return Err(Error::DimensionMismatch(format!("{} columns for a domain basis of size {}", columns.len(), domain.trunc.size())));
        }
        for c in columns {
            codomain.trunc.check_same(&c.trunc())?;
        }
        let entries = CMatrix::from_fn(codomain.trunc.size(), columns.len(), |i, j| columns[j].coeffs()[i]);
        Ok(OperatorMatrix { domain, codomain, entries, truncated })
    }

    pub fn column(&self, j: usize) -> TruncatedSeries<T> {
        let coeffs = (0..self.entries.rows()).map(|i| self.entries[(i, j)]).collect();
        TruncatedSeries::from_dense(self.codomain.trunc, coeffs).expect("column length matches codomain")
    }

    pub fn column_of(&self, alpha: &MultiIndex) -> Option<TruncatedSeries<T>> {
        self.domain.trunc.rank(alpha.entries()).map(|j| self.column(j))
    }

    /// Image of a domain-side series (lifted or cut to the domain cap).
    pub fn apply(&self, f: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
        if f.n() != self.domain.trunc.n {
            return Err(Error::DimensionMismatch(format!("series over n = {} for an operator on n = {}", f.n(), self.domain.trunc.n)));
        }
        if let Some(d) = f.degree() {
            if d > self.domain.trunc.degree_cap {
                return Err(Error::DegreeOverflow { degree: d, cap: self.domain.trunc.degree_cap });
            }
        }
        let x = f.with_cap(self.domain.trunc.degree_cap);
        TruncatedSeries::from_dense(self.codomain.trunc, self.entries.matvec(x.coeffs()))
    }

    /// `self ∘ inner`; `inner` must map into this operator's domain.
    pub fn compose(&self, inner: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
        self.domain.trunc.check_same(&inner.codomain.trunc)?;
        let columns: Vec<TruncatedSeries<T>> =
            (0..inner.entries.cols()).map(|j| self.apply(&inner.column(j))).collect::<Result<_>>()?;
        let truncated = (0..columns.len())
            .map(|j| inner.truncated[j] || (0..inner.entries.rows()).any(|i| !inner.entries[(i, j)].is_zero() && self.truncated[i]))
            .collect();
        OperatorMatrix::from_columns(inner.domain, self.codomain, &columns, truncated)
    }

    /// Norm between the weighted spaces: `‖W_cod^{1/2} A W_dom^{−1/2}‖₂`.
    pub fn operator_norm(&self) -> T {
        let wd = self.domain.space.weights::<T>(self.domain.trunc);
        let wc = self.codomain.space.weights::<T>(self.codomain.trunc);
        let scaled = CMatrix::from_fn(self.entries.rows(), self.entries.cols(), |i, j| {
            self.entries[(i, j)] * (wc[i].sqrt() / wd[j].sqrt())
        });
        spectral_norm(&scaled)
    }
}

fn apply_policy(policy: Overflow, overflow: bool, what: impl FnOnce() -> (usize, usize)) -> Result<bool> {
    if overflow && policy == Overflow::Error {
        let (degree, cap) = what();
        return Err(Error::DegreeOverflow { degree, cap });
    }
    Ok(overflow)
}

/// `Sᵢ f = zᵢ f` (0-based `i`) on one truncation.
pub fn shift_matrix<T: Real>(i: usize, side: Side, policy: Overflow) -> Result<OperatorMatrix<T>> {
    let trunc = side.trunc;
    if i >= trunc.n {
        return Err(Error::DimensionMismatch(format!("shift in variable {} of {}", i + 1, trunc.n)));
    }
    let z = TruncatedSeries::variable(trunc.with_cap(trunc.degree_cap.max(1)), i)?;
    multiplier_matrix(&z.with_cap(trunc.degree_cap.max(1)), side, policy)
}

/// `M_φ f = φ f`, products formed exactly before truncation to the cap.
pub fn multiplier_matrix<T: Real>(phi: &TruncatedSeries<T>, side: Side, policy: Overflow) -> Result<OperatorMatrix<T>> {
    let trunc = side.trunc;
    if phi.n() != trunc.n {
        return Err(Error::DimensionMismatch(format!("multiplier over n = {} on n = {}", phi.n(), trunc.n)));
    }
    let dphi = phi.degree().unwrap_or(0);
    let work = trunc.with_cap(trunc.degree_cap + dphi);
    let phi_w = phi.with_cap(work.degree_cap);
    let mut columns = Vec::with_capacity(trunc.size());
    let mut truncated = Vec::with_capacity(trunc.size());
    for alpha in trunc.basis().iter() {
        let exact = phi_w.mul_monomial(alpha);
        let dropped = exact.coeffs()[trunc.size()..].iter().any(|c| !c.is_zero());
        truncated.push(apply_policy(policy, dropped, || (exact.degree().unwrap_or(0), trunc.degree_cap))?);
        columns.push(exact.with_cap(trunc.degree_cap));
    }
    OperatorMatrix::from_columns(side, side, &columns, truncated)
}

/// Weight `a` and symbol `b = (b₁, …, bₙ)`, all over `m` variables.
#[derive(Clone, Debug, Serialize)]
pub struct WcoSpec<T: Real> {
    pub a: TruncatedSeries<T>,
    pub b: Vec<TruncatedSeries<T>>,
}

impl<T: Real> WcoSpec<T> {
    pub fn new(a: TruncatedSeries<T>, b: Vec<TruncatedSeries<T>>) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidArgument("weight a must not vanish identically".into()));
        }
        if b.is_empty() {
            return Err(Error::InvalidArgument("symbol needs at least one component".into()));
        }
        for bi in &b {
            a.trunc().check_same(&bi.trunc())?;
        }
        Ok(WcoSpec { a, b })
    }

    /// `max |bᵢ|` over the nodes of `rule` and whether it stays below 1.
    pub fn symbol_inside(&self, rule: &QuadratureRule<T>) -> (bool, T) {
        let sup = self.b.iter().map(|bi| rule.sup_modulus(bi).value).fold(T::zero(), T::max);
        (sup < T::one(), sup)
    }

    /// `min |a|` over the nodes of `rule`.
    pub fn weight_min_modulus(&self, rule: &QuadratureRule<T>) -> T {
        rule.min_modulus(&self.a)
    }
}

/// Columns `a · b^α` in the truncated algebra of the codomain.
pub fn wco_matrix<T: Real>(spec: &WcoSpec<T>, domain: Side, codomain_space: SpaceSpec, policy: Overflow) -> Result<OperatorMatrix<T>> {
    let cod_trunc = spec.a.trunc();
    let codomain = Side::new(cod_trunc, codomain_space)?;
    if spec.b.len() != domain.trunc.n {
        return Err(Error::DimensionMismatch(format!("symbol with {} components for a domain over n = {}", spec.b.len(), domain.trunc.n)));
    }
    let basis = domain.trunc.basis();
    let deg_a = spec.a.degree().unwrap_or(0);
    let deg_b: Vec<usize> = spec.b.iter().map(|bi| bi.degree().unwrap_or(0)).collect();
    let mut columns: Vec<TruncatedSeries<T>> = Vec::with_capacity(basis.len());
    let mut truncated = Vec::with_capacity(basis.len());
    for alpha in basis.iter() {
        let col = match alpha.entries().iter().position(|&e| e > 0) {
            None => spec.a.clone(),
            Some(i) => {
                let mut prev = alpha.entries().to_vec();
                prev[i] -= 1;
                let k = domain.trunc.rank(&prev).expect("lower degree index");
                columns[k].mul(&spec.b[i])?
            }
        };
        let bound = deg_a + alpha.entries().iter().zip(&deg_b).map(|(&e, &d)| e as usize * d).sum::<usize>();
        truncated.push(apply_policy(policy, bound > cod_trunc.degree_cap, || (bound, cod_trunc.degree_cap))?);
        columns.push(col);
    }
    OperatorMatrix::from_columns(domain, codomain, &columns, truncated)
}

/// `a = T(1)`, `bᵢ = T(zᵢ) / T(1)` in the truncated algebra.
pub fn recover_wco<T: Real>(op: &OperatorMatrix<T>) -> Result<WcoSpec<T>> {
    let a = op.column(0);
    if a.is_zero() {
        return Err(Error::InvalidArgument("T(1) vanishes identically".into()));
    }
    if a.constant_term().is_zero() {
        return Err(Error::WeightVanishesAtOrigin);
    }
    let n = op.domain.trunc.n;
    if op.domain.trunc.degree_cap == 0 {
        return Err(Error::InsufficientCap { cap: 0, reason: "images of the coordinates are needed".into() });
    }
    let inv = a.reciprocal()?;
    let b = (0..n)
        .map(|i| op.column_of(&MultiIndex::unit(n, i)).expect("degree one column").mul(&inv))
        .collect::<Result<Vec<_>>>()?;
    WcoSpec::new(a, b)
}

#[derive(Clone, Debug, Serialize)]
pub struct WcoVerification<T: Real> {
    /// `max_α ‖T(z^α) − a b^α‖` in the codomain norm.
    pub max_defect: T,
    pub worst: MultiIndex,
    pub column_defects: Vec<T>,
}

pub fn verify_wco<T: Real>(op: &OperatorMatrix<T>, spec: &WcoSpec<T>) -> Result<WcoVerification<T>> {
    op.codomain.trunc.check_same(&spec.a.trunc())?;
    let model = wco_matrix(spec, op.domain, op.codomain.space, Overflow::Flag)?;
    let basis = op.domain.trunc.basis();
    let column_defects: Vec<T> = (0..basis.len())
        .map(|j| op.codomain.space.norm(&op.column(j).sub(&model.column(j))?))
        .collect::<Result<_>>()?;
    let (worst, max_defect) = column_defects
        .iter()
        .enumerate()
        .fold((0, T::zero()), |acc, (j, &d)| if d > acc.1 { (j, d) } else { acc });
    Ok(WcoVerification { max_defect, worst: basis[worst].clone(), column_defects })
}

/// `f ↦ (f(z/2) + f(−z/2)) / 2` on one variable.
pub fn average_operator<T: Real>(cap: usize, space: SpaceSpec) -> Result<OperatorMatrix<T>> {
    let side = Side::new(Truncation::new(1, cap)?, space)?;
    let columns: Vec<TruncatedSeries<T>> = (0..=cap)
        .map(|k| {
            let c = if k % 2 == 0 { T::lit(0.5).powi(k as i32) } else { T::zero() };
            TruncatedSeries::monomial(side.trunc, &MultiIndex::new(vec![k as u32]).expect("nonempty"), Complex::new(c, T::zero()))
        })
        .collect::<Result<_>>()?;
    OperatorMatrix::from_columns(side, side, &columns, vec![false; cap + 1])
}

/// Symbol `b = ((1 + z)/2, (1 + z)/2)` with unit weight, bidisc to disc.
pub fn rudin_spec<T: Real>(cap: usize) -> Result<WcoSpec<T>> {
    let t = Truncation::new(1, cap)?;
    let half = Complex::new(T::lit(0.5), T::zero());
    let mut b = TruncatedSeries::constant(t, half);
    if cap >= 1 {
        b.coeffs_mut()[1] = half;
    }
    WcoSpec::new(TruncatedSeries::one(t), vec![b.clone(), b])
}

pub fn rudin_operator<T: Real>(cap: usize) -> Result<OperatorMatrix<T>> {
    let domain = Side::new(Truncation::new(2, cap)?, SpaceSpec::HardyH2 { n: 2 })?;
    wco_matrix(&rudin_spec(cap)?, domain, SpaceSpec::HardyH2 { n: 1 }, Overflow::Flag)
}

/// Node set for probes: the origin plus the polytori `r𝕋ᵐ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeGrid {
    pub radii: Vec<f64>,
    pub points_per_circle: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        ProbeGrid { radii: vec![0.25, 0.5, 0.75, 0.95], points_per_circle: 16 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpProbe<T: Real> {
    pub w: Vec<Cplx<T>>,
    pub min_modulus: T,
    pub at: Vec<Cplx<T>>,
    pub floor: T,
    pub vanishes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpProbeReport<T: Real> {
    pub probes: Vec<ExpProbe<T>>,
    /// Index of the first probe whose image vanishes at a node.
    pub witness: Option<usize>,
}

/// Minimum modulus of `T(e^{w·z})` over the grid for each `w`; a value
/// below `1e−12 · max(1, ‖T e^{w·z}‖)` marks the operator as not of
/// weighted composition type.
pub fn exp_probe<T: Real>(op: &OperatorMatrix<T>, w_samples: &[Vec<Cplx<T>>], grid: &ProbeGrid) -> Result<ExpProbeReport<T>> {
    let n = op.domain.trunc.n;
    let m = op.codomain.trunc.n;
    let mut nodes: Vec<Vec<Cplx<T>>> = vec![vec![Complex::zero(); m]];
    for &r in &grid.radii {
        let rule = QuadratureRule::new(m, grid.points_per_circle, T::lit(r))?;
        let circle = rule.circle();
        let mut buf = vec![Complex::zero(); m];
        for idx in 0..rule.node_count() {
            rule.node(&circle, idx, &mut buf);
            nodes.push(buf.clone());
        }
    }
    let mut probes = Vec::with_capacity(w_samples.len());
    for w in w_samples {
        if w.len() != n {
            return Err(Error::DimensionMismatch(format!("probe point with {} coordinates for n = {}", w.len(), n)));
        }
        let tail = exp_tail_norm(w, &op.domain.space, op.domain.trunc.degree_cap)?;
        if tail >= T::lit(EXP_TAIL_TOL) {
            return Err(Error::InsufficientCap {
                cap: op.domain.trunc.degree_cap,
                reason: format!("exponential tail norm {tail:e} at the domain cap"),
            });
        }
        let e = TruncatedSeries::exp_linear(op.domain.trunc, w)?;
        let image = op.apply(&e)?;
        let floor = T::lit(1e-12) * op.codomain.space.norm(&image)?.max(T::one());
        let moduli: Vec<T> = nodes.par_iter().map(|z| image.eval(z).norm()).collect();
        let (k, min_modulus) = moduli
            .iter()
            .enumerate()
            .fold((0, T::infinity()), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
        probes.push(ExpProbe { w: w.clone(), min_modulus, at: nodes[k].clone(), floor, vanishes: min_modulus < floor });
    }
    let witness = probes.iter().position(|p| p.vanishes);
    Ok(ExpProbeReport { probes, witness })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionBoundReport<T: Real> {
    pub p: T,
    pub b0_modulus: T,
    /// `((1 + |b(0)|) / (1 − |b(0)|))^{1/p}`.
    pub bound: T,
    pub max_ratio: T,
    pub samples: usize,
    /// Samples whose ratio exceeds `bound · (1 + tol)`.
    pub violations: usize,
    pub tol: T,
}

#[derive(Clone, Debug)]
pub struct CompositionBoundOptions {
    pub radii: Vec<f64>,
    pub points_per_circle: usize,
    pub tol: f64,
}

impl Default for CompositionBoundOptions {
    fn default() -> Self {
        CompositionBoundOptions { radii: vec![0.5, 0.9, 0.99, 1.0], points_per_circle: 128, tol: 1e-3 }
    }
}

/// `H^p` norm surrogate: largest discrete `p`-mean over the radii.
fn hp_norm<T: Real>(f: &TruncatedSeries<T>, p: T, opts: &CompositionBoundOptions) -> Result<T> {
    let mut best = T::zero();
    for &r in &opts.radii {
        let rule = QuadratureRule::new(f.n(), opts.points_per_circle, T::lit(r))?;
        best = best.max(rule.p_mean(f, p)?);
    }
    Ok(best)
}

/// Ratios `‖f ∘ b‖_p / ‖f‖_p` for one-variable `f` against the bound.
pub fn composition_bound_check<T: Real>(
    b: &TruncatedSeries<T>,
    p: T,
    f_samples: &[TruncatedSeries<T>],
    opts: &CompositionBoundOptions,
) -> Result<CompositionBoundReport<T>> {
    let b0 = b.constant_term().norm();
    if b0 >= T::one() {
        return Err(Error::SymbolOutsideDisc(b0.to_f64_lossy()));
    }
    if p < T::one() {
        return Err(Error::InvalidArgument(format!("p = {p} must be at least 1")));
    }
    let bound = ((T::one() + b0) / (T::one() - b0)).powf(T::one() / p);
    let deg_b = b.degree().unwrap_or(0).max(1);
    let ratios: Vec<T> = f_samples
        .par_iter()
        .map(|f| {
            if f.n() != 1 {
                return Err(Error::DimensionMismatch(format!("sample over n = {}; the source must be one variable", f.n())));
            }
            let deg_f = f.degree().unwrap_or(0);
            let cap = deg_f * deg_b;
            let inner = b.with_cap(cap.max(b.cap()));
            let fb = f.compose(&[inner])?;
            let denom = hp_norm(f, p, opts)?;
            if denom == T::zero() {
                return Ok(T::zero());
            }
            Ok(hp_norm(&fb, p, opts)? / denom)
        })
        .collect::<Result<_>>()?;
    let tol = T::lit(opts.tol);
    let max_ratio = ratios.iter().copied().fold(T::zero(), T::max);
    let violations = ratios.iter().filter(|&&r| r > bound * (T::one() + tol)).count();
    Ok(CompositionBoundReport { p, b0_modulus: b0, bound, max_ratio, samples: ratios.len(), violations, tol })
}

/// `count` one-variable polynomials of degree `≤ degree` with coefficients
/// uniform in the unit square.
pub fn random_polynomials<T: Real>(count: usize, degree: usize, seed: u64) -> Vec<TruncatedSeries<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = Truncation::new(1, degree).expect("one variable");
    (0..count)
        .map(|_| {
            let coeffs = (0..=degree)
                .map(|_| Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0))))
                .collect();
            TruncatedSeries::from_dense(t, coeffs).expect("dense length")
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PreservationCase<T: Real> {
    pub label: String,
    pub input_verdict: CyclicityVerdict,
    pub output_verdict: CyclicityVerdict,
    pub input_distance: T,
    pub output_distance: T,
    /// Cyclic-consistent input with a non-cyclic-consistent image.
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport<T: Real> {
    pub cases: Vec<PreservationCase<T>>,
    pub violations: Vec<String>,
    /// `max` column defect of the recovered weighted composition structure,
    /// or `None` when `T(1)` vanishes at the origin.
    pub wco_defect: Option<T>,
    /// Cyclicity verdict for `a = T(1)`.
    pub weight_verdict: Option<CyclicityVerdict>,
    /// Codomain outside the Hardy scale.
    pub outside_scope: bool,
}

/// Default family: `zᵢ − β` for `β ∈ {1, 2, 1 + i}`, `e^{±zᵢ}`, `e^{4zᵢ}`
/// where the cap allows, and the non-cyclic `z₁ − 1/2`.
pub fn default_family<T: Real>(domain: Side) -> Vec<(String, TruncatedSeries<T>)> {
    let t = domain.trunc;
    let n = t.n;
    let mut out = Vec::new();
    if t.degree_cap == 0 {
        return out;
    }
    let one = TruncatedSeries::one(t);
    for i in 0..n {
        let z = TruncatedSeries::variable(t, i).expect("variable index");
        for (name, beta) in [("1", Complex::new(T::one(), T::zero())), ("2", Complex::new(T::lit(2.0), T::zero())), ("1+i", Complex::new(T::one(), T::one()))] {
            out.push((format!("z{} - {}", i + 1, name), z.sub(&one.scale(beta)).expect("same truncation")));
        }
        for c in [1.0, -1.0, 4.0] {
            let mut w = vec![Complex::zero(); n];
            w[i] = Complex::new(T::lit(c), T::zero());
            if exp_tail_norm(&w, &domain.space, t.degree_cap).map(|x| x < T::lit(EXP_TAIL_TOL)).unwrap_or(false) {
                out.push((format!("exp({}*z{})", c, i + 1), TruncatedSeries::exp_linear(t, &w).expect("matching n")));
            }
        }
    }
    let z1 = TruncatedSeries::variable(t, 0).expect("first variable");
    out.push(("z1 - 0.5".to_string(), z1.sub(&one.scale(Complex::new(T::lit(0.5), T::zero()))).expect("same truncation")));
    out
}

/// Runs cyclicity curves on `f` and `T f` for each family member.
pub fn cyclicity_preservation_suite<T: Real>(
    op: &OperatorMatrix<T>,
    family: &[(String, TruncatedSeries<T>)],
    n_max: usize,
) -> Result<PreservationReport<T>> {
    let cases: Vec<PreservationCase<T>> = family
        .par_iter()
        .map(|(label, f)| {
            let image = op.apply(f)?;
            let cin = cyclicity_curve(f, &op.domain.space, n_max)?;
            let (output_verdict, output_distance) = if image.is_zero() {
                (CyclicityVerdict::NonCyclicConsistent, T::one())
            } else {
                let cout = cyclicity_curve(&image, &op.codomain.space, n_max)?;
                (cout.verdict, *cout.distances.last().expect("nonempty curve"))
            };
            let violation = cin.verdict == CyclicityVerdict::CyclicConsistent && output_verdict == CyclicityVerdict::NonCyclicConsistent;
            Ok(PreservationCase {
                label: label.clone(),
                input_verdict: cin.verdict,
                output_verdict,
                input_distance: *cin.distances.last().expect("nonempty curve"),
                output_distance,
                violation,
            })
        })
        .collect::<Result<_>>()?;
    let violations = cases.iter().filter(|c| c.violation).map(|c| c.label.clone()).collect();
    let (wco_defect, weight_verdict) = match recover_wco(op) {
        Ok(spec) => {
            let v = verify_wco(op, &spec)?;
            let a_curve = cyclicity_curve(&spec.a, &op.codomain.space, n_max)?;
            (Some(v.max_defect), Some(a_curve.verdict))
        }
        Err(_) => (None, None),
    };
    Ok(PreservationReport { cases, violations, wco_defect, weight_verdict, outside_scope: !op.codomain.space.is_hardy() })
}
