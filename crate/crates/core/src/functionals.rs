//! Linear functionals on polynomials given by their moments
//! `λ_α = Λ(z^α)`, the exponential transform `F(w) = Σ λ_α w^α / α!`,
//! point-evaluation classification and multiplicativity checks.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, CMatrix};
use crate::multiindex::{MultiIndex, Truncation};
use crate::scalar::{real, Cplx, Real};
use crate::series::TruncatedSeries;
use crate::spaces::SpaceSpec;

/// Certified moment growth `|λ_α| ≤ C · ρ^α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthBound<T: Real> {
    pub c: T,
    pub rho: Vec<T>,
}

impl<T: Real> GrowthBound<T> {
    pub fn bound(&self, alpha: &MultiIndex) -> T {
        alpha
            .entries()
            .iter()
            .zip(&self.rho)
            .fold(self.c, |acc, (&e, &r)| acc * r.powi(e as i32))
    }
}

/// Moments of a linear functional on polynomials of degree `≤ cap`.
#[derive(Clone, Debug)]
pub struct MomentFunctional<T: Real> {
    trunc: Truncation,
    moments: Vec<Cplx<T>>,
    growth: Option<GrowthBound<T>>,
    basis: Arc<[MultiIndex]>,
}

impl<T: Real> MomentFunctional<T> {
    /// `moments` is dense in graded-lex order. A supplied growth bound must
    /// hold for every moment up to a `1e−9` relative slack.
    pub fn new(trunc: Truncation, moments: Vec<Cplx<T>>, growth: Option<GrowthBound<T>>) -> Result<Self> {
        if moments.len() != trunc.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} moments for a basis of size {}",
                moments.len(),
                trunc.size()
            )));
        }
        if let Some(g) = &growth {
            if g.rho.len() != trunc.n {
                return Err(Error::DimensionMismatch(format!("growth rho has {} entries for n = {}", g.rho.len(), trunc.n)));
            }
            let slack = T::lit(1e-9);
            for (alpha, m) in trunc.basis().iter().zip(&moments) {
                let b = g.bound(alpha);
                if m.norm() > b + slack * b.max(T::one()) {
                    return Err(Error::InvalidArgument(format!(
                        "moment at {alpha} has modulus {} above growth bound {b}",
                        m.norm()
                    )));
                }
            }
        }
        Ok(MomentFunctional { trunc, moments, growth, basis: trunc.basis() })
    }

    /// `Λ(f) = a · f(b)`, so `λ_α = a · b^α`.
    pub fn point_evaluation(trunc: Truncation, a: Cplx<T>, b: &[Cplx<T>]) -> Result<Self> {
        Self::combination(trunc, &[(a, b.to_vec())])
    }

    /// `Λ(f) = Σ_k c_k f(b_k)`.
    pub fn combination(trunc: Truncation, terms: &[(Cplx<T>, Vec<Cplx<T>>)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty combination of point evaluations".into()));
        }
        let mut moments = vec![Complex::zero(); trunc.size()];
        let mut c = T::zero();
        let mut rho = vec![T::zero(); trunc.n];
        for (coef, b) in terms {
            if b.len() != trunc.n {
                return Err(Error::DimensionMismatch(format!("point with {} coordinates for n = {}", b.len(), trunc.n)));
            }
            for (slot, alpha) in moments.iter_mut().zip(trunc.basis().iter()) {
                *slot = *slot + *coef * power(b, alpha);
            }
            c = c + coef.norm();
            for (r, bi) in rho.iter_mut().zip(b) {
                *r = r.max(bi.norm());
            }
        }
        Ok(MomentFunctional { trunc, moments, growth: Some(GrowthBound { c, rho }), basis: trunc.basis() })
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn n(&self) -> usize {
        self.trunc.n
    }

    pub fn moments(&self) -> &[Cplx<T>] {
        &self.moments
    }

    pub fn growth(&self) -> Option<&GrowthBound<T>> {
        self.growth.as_ref()
    }

    pub fn moment(&self, alpha: &MultiIndex) -> Option<Cplx<T>> {
        self.trunc.rank(alpha.entries()).map(|k| self.moments[k])
    }

    pub fn lambda0(&self) -> Cplx<T> {
        self.moments[0]
    }

    /// `c · Λ`.
    pub fn scale(&self, c: Cplx<T>) -> Self {
        MomentFunctional {
            trunc: self.trunc,
            moments: self.moments.iter().map(|&m| m * c).collect(),
            growth: self.growth.as_ref().map(|g| GrowthBound { c: g.c * c.norm(), rho: g.rho.clone() }),
            basis: self.basis.clone(),
        }
    }

    /// `Λ(p) = Σ p̂(α) λ_α`. Coefficients of `p` above the moment cap must
    /// vanish.
    pub fn apply(&self, p: &TruncatedSeries<T>) -> Result<Cplx<T>> {
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch(format!("series over n = {} for functional over n = {}", p.n(), self.n())));
        }
        if let Some(d) = p.degree() {
            if d > self.trunc.degree_cap {
                return Err(Error::DegreeOverflow { degree: d, cap: self.trunc.degree_cap });
            }
        }
        let len = p.coeffs().len().min(self.moments.len());
        Ok(p.coeffs()[..len]
            .iter()
            .zip(&self.moments[..len])
            .fold(Complex::zero(), |acc, (&c, &m)| acc + c * m))
    }

    /// `(Σ_{|α|≤K} λ_α w^α/α!, Σ_{|α|≤K} |λ_α w^α/α!|)`.
    fn transform_sums(&self, w: &[Cplx<T>], k: usize) -> (Cplx<T>, T) {
        let table = scaled_powers(w, k);
        let end = self.trunc.offset(k + 1);
        let basis = &self.basis;
        let mut value = Complex::zero();
        let mut abs = T::zero();
        for (alpha, m) in basis[..end].iter().zip(&self.moments[..end]) {
            let t = alpha
                .entries()
                .iter()
                .enumerate()
                .fold(*m, |acc, (i, &e)| acc * table[i][e as usize]);
            value = value + t;
            abs = abs + t.norm();
        }
        (value, abs)
    }

    /// Gradient of the degree-`K` partial sum of `F` at `w`.
    fn transform_gradient(&self, w: &[Cplx<T>], k: usize) -> Vec<Cplx<T>> {
        let n = self.n();
        if k == 0 {
            return vec![Complex::zero(); n];
        }
        let table = scaled_powers(w, k);
        let end = self.trunc.offset(k);
        let basis = &self.basis;
        let mut grad = vec![Complex::zero(); n];
        let mut shifted = vec![0u32; n];
        for alpha in basis[..end].iter() {
            let base = alpha
                .entries()
                .iter()
                .enumerate()
                .fold(Complex::new(T::one(), T::zero()), |acc, (i, &e)| acc * table[i][e as usize]);
            shifted.copy_from_slice(alpha.entries());
            for (i, g) in grad.iter_mut().enumerate() {
                shifted[i] += 1;
                let idx = self.trunc.rank(&shifted).expect("degree below cap");
                shifted[i] -= 1;
                *g = *g + self.moments[idx] * base;
            }
        }
        grad
    }
}

fn power<T: Real>(b: &[Cplx<T>], alpha: &MultiIndex) -> Cplx<T> {
    alpha
        .entries()
        .iter()
        .zip(b)
        .fold(Complex::new(T::one(), T::zero()), |acc, (&e, &bi)| acc * bi.powu(e))
}

/// `table[i][k] = w_i^k / k!`.
fn scaled_powers<T: Real>(w: &[Cplx<T>], k: usize) -> Vec<Vec<Cplx<T>>> {
    w.iter()
        .map(|&wi| {
            let mut row = Vec::with_capacity(k + 1);
            let mut cur = Complex::new(T::one(), T::zero());
            row.push(cur);
            for j in 1..=k {
                cur = cur * wi / T::from_usize_lossy(j);
                row.push(cur);
            }
            row
        })
        .collect()
}

/// `Σ_{d>K} s^d / d!` summed directly to avoid cancellation.
fn exp_tail<T: Real>(s: T, k: usize) -> T {
    if s == T::zero() {
        return T::zero();
    }
    let mut term = (1..=k + 1).fold(T::one(), |acc, j| acc * s / T::from_usize_lossy(j));
    let mut total = T::zero();
    let mut d = k + 1;
    loop {
        total = total + term;
        d += 1;
        term = term * s / T::from_usize_lossy(d);
        if (T::from_usize_lossy(d) > s && term <= T::epsilon() * total) || d > k + 100_000 || !total.is_finite() {
            break;
        }
    }
    total
}

/// Partial sum of `F(w)` and, when growth is certified, a bound on the
/// omitted tail.
#[derive(Clone, Debug, Serialize)]
pub struct TransformValue<T: Real> {
    pub value: Cplx<T>,
    pub tail_bound: Option<T>,
    /// `64 ε Σ |terms|`: floating point error allowance of the partial sum.
    pub roundoff: T,
}

/// `Σ_{|α|≤K} λ_α w^α / α!` with tail bound `C Σ_{d>K} s^d/d!`,
/// `s = Σ ρᵢ|wᵢ|`.
pub fn moment_transform<T: Real>(functional: &MomentFunctional<T>, w: &[Cplx<T>], k: usize) -> Result<TransformValue<T>> {
    if w.len() != functional.n() {
        return Err(Error::DimensionMismatch(format!("point with {} coordinates for n = {}", w.len(), functional.n())));
    }
    if k > functional.trunc.degree_cap {
        return Err(Error::DegreeOverflow { degree: k, cap: functional.trunc.degree_cap });
    }
    let (value, abs) = functional.transform_sums(w, k);
    let tail_bound = functional.growth.as_ref().map(|g| {
        let s = g.rho.iter().zip(w).fold(T::zero(), |acc, (&r, wi)| acc + r * wi.norm());
        g.c * exp_tail(s, k)
    });
    Ok(TransformValue { value, tail_bound, roundoff: T::lit(64.0) * T::epsilon() * abs })
}

/// A polynomial from the family `zᵢ − β`, `|β| ≥ 1`, vanishing at a point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeFactor<T: Real> {
    /// Zero-based variable index.
    pub index: usize,
    pub beta: Cplx<T>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport<T: Real> {
    pub inside: bool,
    pub violated: Option<EnvelopeFactor<T>>,
}

/// `b` lies in the open polydisc iff no `zᵢ − β` with `|β| ≥ 1` vanishes
/// there; otherwise the first offending factor `zᵢ − bᵢ` is returned.
pub fn envelope_check<T: Real>(b: &[Cplx<T>]) -> EnvelopeReport<T> {
    for (i, &bi) in b.iter().enumerate() {
        if bi.norm() >= T::one() {
            let label = format!("z{} - ({})", i + 1, crate::spaces::format_complex(bi));
            return EnvelopeReport { inside: false, violated: Some(EnvelopeFactor { index: i, beta: bi, label }) };
        }
    }
    EnvelopeReport { inside: true, violated: None }
}

/// Search grid for zeros of `F`: polytori `r𝕋ⁿ` for each radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyGrid {
    pub radii: Vec<f64>,
    pub points_per_circle: usize,
}

impl Default for ClassifyGrid {
    fn default() -> Self {
        ClassifyGrid { radii: vec![1.0, 2.0, 4.0], points_per_circle: 64 }
    }
}

impl ClassifyGrid {
    fn point_count(&self, n: usize) -> usize {
        1 + self.radii.len() * self.points_per_circle.pow(n as u32)
    }

    /// Grid point with flat index `idx`; index 0 is the origin.
    fn point<T: Real>(&self, n: usize, idx: usize) -> Vec<Cplx<T>> {
        if idx == 0 {
            return vec![Complex::zero(); n];
        }
        let per = self.points_per_circle.pow(n as u32);
        let r = T::lit(self.radii[(idx - 1) / per]);
        let mut rest = (idx - 1) % per;
        let mut out = vec![Complex::zero(); n];
        for slot in out.iter_mut().rev() {
            let j = rest % self.points_per_circle;
            rest /= self.points_per_circle;
            let theta = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(self.points_per_circle);
            *slot = Complex::from_polar(r, theta);
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Classification<T: Real> {
    PointEvaluation {
        a: Cplx<T>,
        b: Vec<Cplx<T>>,
        /// Largest `|λ_α − a b^α| / max(1, |a b^α|)` over stored moments.
        fit_defect: T,
        domain: EnvelopeReport<T>,
    },
    VanishingWitness {
        w: Vec<Cplx<T>>,
        /// `|F_K(w)|` for the partial sum at the cap.
        modulus: T,
        /// `F` has a zero within this distance of `w` along the gradient line.
        radius: T,
        /// Largest tail plus roundoff allowance on the enclosing circle.
        allowance: T,
        /// True when the allowance rests on a certified growth bound.
        certified: bool,
    },
    Inconclusive {
        min_modulus: T,
        at: Vec<Cplx<T>>,
        grid: ClassifyGrid,
    },
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub grid: ClassifyGrid,
    /// Relative tolerance for the point-evaluation fit.
    pub fit_tol: f64,
    /// Number of best grid points refined by Newton's method.
    pub seeds: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { grid: ClassifyGrid::default(), fit_tol: 1e-10, seeds: 16 }
    }
}

/// Fitted `a = λ₀`, `bᵢ = λ_{eᵢ} / λ₀` and the relative fit defect.
fn point_fit<T: Real>(functional: &MomentFunctional<T>) -> Option<(Cplx<T>, Vec<Cplx<T>>, T)> {
    let trunc = functional.trunc;
    let a = functional.lambda0();
    if a.is_zero() || trunc.degree_cap == 0 {
        return None;
    }
    let b: Vec<Cplx<T>> = (0..trunc.n)
        .map(|i| functional.moment(&MultiIndex::unit(trunc.n, i)).expect("cap >= 1") / a)
        .collect();
    let defect = trunc
        .basis()
        .iter()
        .zip(&functional.moments)
        .map(|(alpha, &m)| {
            let model = a * power(&b, alpha);
            (m - model).norm() / model.norm().max(T::one())
        })
        .fold(T::zero(), T::max);
    Some((a, b, defect))
}

/// Approximate zero of `F` enclosed by a circle on which the partial sum
/// dominates the tail.
#[derive(Clone, Debug)]
struct Witness<T: Real> {
    w: Vec<Cplx<T>>,
    modulus: T,
    radius: T,
    allowance: T,
    certified: bool,
}

/// Outcome of the zero search for `F`.
#[derive(Clone, Debug)]
struct ZeroSearch<T: Real> {
    best_w: Vec<Cplx<T>>,
    best_modulus: T,
    witness: Option<Witness<T>>,
}

/// Tail plus roundoff allowance for the partial sum at `w`. Without a growth
/// bound the top homogeneous block stands in for the tail.
fn allowance<T: Real>(functional: &MomentFunctional<T>, w: &[Cplx<T>], k: usize) -> (Cplx<T>, T, bool) {
    let tv = moment_transform(functional, w, k).expect("validated arguments");
    match tv.tail_bound {
        Some(t) => (tv.value, t + tv.roundoff, true),
        None => {
            let below = if k == 0 { Complex::zero() } else { functional.transform_sums(w, k - 1).0 };
            (tv.value, (tv.value - below).norm() + tv.roundoff, false)
        }
    }
}

/// Rouché test on circles `w + ρ e^{iθ} u`, `u` the unit conjugate gradient:
/// if `|F_K|` exceeds the tail allowance at every sampled point of the
/// circle, `F` vanishes inside the disc on that complex line.
fn rouche_enclosure<T: Real>(functional: &MomentFunctional<T>, w: &[Cplx<T>], k: usize) -> Option<Witness<T>> {
    const SAMPLES: usize = 64;
    let g = functional.transform_gradient(w, k);
    let gn = g.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    if gn == T::zero() {
        return None;
    }
    let u: Vec<Cplx<T>> = g.iter().map(|c| c.conj() / gn).collect();
    let scale = w.iter().map(|c| c.norm()).fold(T::one(), T::max);
    let (f0, _, certified) = allowance(functional, w, k);
    for rel in [1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1] {
        let rho = T::lit(rel) * scale;
        let mut min_f = T::infinity();
        let mut max_allow = T::zero();
        for j in 0..SAMPLES {
            let theta = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(SAMPLES);
            let t = Complex::from_polar(rho, theta);
            let p: Vec<Cplx<T>> = w.iter().zip(&u).map(|(&wi, &ui)| wi + ui * t).collect();
            let (v, a, _) = allowance(functional, &p, k);
            min_f = min_f.min(v.norm());
            max_allow = max_allow.max(a);
        }
        if min_f > max_allow {
            // the partial sum itself must vanish inside for the circle to enclose a zero
            if f0.norm() < min_f {
                return Some(Witness { w: w.to_vec(), modulus: f0.norm(), radius: rho, allowance: max_allow, certified });
            }
            return None;
        }
    }
    None
}

fn newton_refine<T: Real>(functional: &MomentFunctional<T>, start: &[Cplx<T>], k: usize, limit: T) -> (Vec<Cplx<T>>, T) {
    let mut w = start.to_vec();
    let mut f = functional.transform_sums(&w, k).0;
    for _ in 0..60 {
        let g = functional.transform_gradient(&w, k);
        let gn: T = g.iter().map(|c| c.norm_sqr()).sum();
        if gn == T::zero() || f.norm() == T::zero() {
            break;
        }
        // minimum-norm solution of g·δ = −f
        let step: Vec<Cplx<T>> = g.iter().map(|gi| -f * gi.conj() / gn).collect();
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..20 {
            let trial: Vec<Cplx<T>> = w.iter().zip(&step).map(|(&wi, &si)| wi + si * t).collect();
            if trial.iter().any(|c| c.norm() > limit) {
                t = t * T::lit(0.5);
                continue;
            }
            let ft = functional.transform_sums(&trial, k).0;
            if ft.norm() < f.norm() {
                let small_step = step.iter().map(|s| s.norm()).fold(T::zero(), T::max) * t
                    <= T::lit(1e-15) * w.iter().map(|c| c.norm()).fold(T::one(), T::max);
                w = trial;
                f = ft;
                accepted = !small_step;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    (w, f.norm())
}

fn search_zeros<T: Real>(functional: &MomentFunctional<T>, opts: &ClassifyOptions) -> ZeroSearch<T> {
    let n = functional.n();
    let k = functional.trunc.degree_cap;
    let grid = &opts.grid;
    let count = grid.point_count(n);
    let moduli: Vec<T> = (0..count)
        .into_par_iter()
        .map(|idx| functional.transform_sums(&grid.point::<T>(n, idx), k).0.norm())
        .collect();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&x, &y| moduli[x].partial_cmp(&moduli[y]).unwrap_or(std::cmp::Ordering::Equal).then(x.cmp(&y)));
    let rmax = grid.radii.iter().copied().fold(1.0f64, f64::max);
    let limit = T::lit(2.0 * rmax);
    let seeds: Vec<usize> = order.iter().copied().take(opts.seeds.max(1)).collect();
    let refined: Vec<(Vec<Cplx<T>>, T)> = seeds
        .par_iter()
        .map(|&idx| newton_refine(functional, &grid.point::<T>(n, idx), k, limit))
        .collect();
    let mut best_w = grid.point::<T>(n, order[0]);
    let mut best_modulus = moduli[order[0]];
    let mut witness = None;
    for (w, m) in refined {
        if m < best_modulus {
            best_modulus = m;
            best_w = w.clone();
        }
        if witness.is_none() {
            witness = rouche_enclosure(functional, &w, k);
        }
    }
    ZeroSearch { best_w, best_modulus, witness }
}

/// Classifies `Λ` as a scaled point evaluation, exhibits an approximate
/// zero of `F`, or reports the smallest `|F|` found.
pub fn classify<T: Real>(functional: &MomentFunctional<T>, opts: &ClassifyOptions) -> Result<Classification<T>> {
    let n = functional.n();
    if functional.lambda0().is_zero() {
        return Ok(Classification::VanishingWitness {
            w: vec![Complex::zero(); n],
            modulus: T::zero(),
            radius: T::zero(),
            allowance: T::zero(),
            certified: true,
        });
    }
    if functional.trunc.degree_cap == 0 {
        return Err(Error::InsufficientCap { cap: 0, reason: "first moments are needed to determine b".into() });
    }
    if let Some((a, b, fit_defect)) = point_fit(functional) {
        if fit_defect <= T::lit(opts.fit_tol) {
            let domain = envelope_check(&b);
            return Ok(Classification::PointEvaluation { a, b, fit_defect, domain });
        }
    }
    let search = search_zeros(functional, opts);
    Ok(match search.witness {
        Some(Witness { w, modulus, radius, allowance, certified }) => {
            Classification::VanishingWitness { w, modulus, radius, allowance, certified }
        }
        None => Classification::Inconclusive { min_modulus: search.best_modulus, at: search.best_w, grid: opts.grid.clone() },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicativityMode {
    /// Polynomial pairs whose product fits in the truncation.
    M0,
    /// Polynomial multiplier times a truncated series.
    M1,
    /// Pairs of truncated series.
    M2,
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectReport<T: Real> {
    pub mode: MultiplicativityMode,
    /// `max |Λ(fg) − Λ(f)Λ(g)|` over the samples.
    pub defect: T,
    /// Index of the sample attaining the maximum.
    pub worst: usize,
    /// Some product was truncated, so the defect is approximate.
    pub truncated: bool,
}

/// `max |Λ(fg) − Λ(f)Λ(g)|` over sample pairs. In `M0` every pair must
/// satisfy `deg f + deg g ≤ cap`.
pub fn multiplicativity_defect<T: Real>(
    functional: &MomentFunctional<T>,
    mode: MultiplicativityMode,
    samples: &[(TruncatedSeries<T>, TruncatedSeries<T>)],
) -> Result<DefectReport<T>> {
    let trunc = functional.trunc;
    let mut defect = T::zero();
    let mut worst = 0;
    let mut truncated = false;
    for (idx, (f, g)) in samples.iter().enumerate() {
        let df = f.degree().unwrap_or(0);
        let dg = g.degree().unwrap_or(0);
        if df + dg > trunc.degree_cap {
            if mode == MultiplicativityMode::M0 {
                return Err(Error::DegreeOverflow { degree: df + dg, cap: trunc.degree_cap });
            }
            truncated = true;
        }
        let f = lift(f, trunc)?;
        let g = lift(g, trunc)?;
        let fg = f.mul(&g)?;
        let d = (functional.apply(&fg)? - functional.apply(&f)? * functional.apply(&g)?).norm();
        if d > defect {
            defect = d;
            worst = idx;
        }
    }
    Ok(DefectReport { mode, defect, worst, truncated })
}

fn lift<T: Real>(f: &TruncatedSeries<T>, trunc: Truncation) -> Result<TruncatedSeries<T>> {
    if f.n() != trunc.n {
        return Err(Error::DimensionMismatch(format!("series over n = {} for functional over n = {}", f.n(), trunc.n)));
    }
    if let Some(d) = f.degree() {
        if d > trunc.degree_cap {
            return Err(Error::DegreeOverflow { degree: d, cap: trunc.degree_cap });
        }
    }
    Ok(f.with_cap(trunc.degree_cap))
}

/// Exact `M0` defect over every monomial pair: `max |λ_{α+β} − λ_α λ_β|`
/// for `|α| + |β| ≤ cap`.
pub fn m0_exhaustive_defect<T: Real>(functional: &MomentFunctional<T>) -> T {
    let trunc = functional.trunc;
    let basis = trunc.basis();
    let m = &functional.moments;
    let mut worst = T::zero();
    for (i, a) in basis.iter().enumerate() {
        let room = trunc.degree_cap - a.degree();
        let end = trunc.offset(room + 1);
        for (j, b) in basis[..end].iter().enumerate() {
            let k = trunc.rank_of_sum(a.entries(), b.entries()).expect("within cap");
            worst = worst.max((m[k] - m[i] * m[j]).norm());
        }
    }
    worst
}

/// Every monomial pair `(z^α, z^β)` with `|α| + |β| ≤ cap`.
pub fn exhaustive_monomial_pairs<T: Real>(trunc: Truncation) -> Vec<(TruncatedSeries<T>, TruncatedSeries<T>)> {
    let basis = trunc.basis();
    let one = Complex::new(T::one(), T::zero());
    let mut out = Vec::new();
    for a in basis.iter() {
        let end = trunc.offset(trunc.degree_cap - a.degree() + 1);
        for b in basis[..end].iter() {
            out.push((
                TruncatedSeries::monomial(trunc, a, one).expect("in basis"),
                TruncatedSeries::monomial(trunc, b, one).expect("in basis"),
            ));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionVerdict<T: Real> {
    pub name: &'static str,
    pub pass: bool,
    pub value: T,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GkzReport<T: Real> {
    pub conditions: Vec<ConditionVerdict<T>>,
    /// All four verdicts agree.
    pub consistent: bool,
    pub domain: Option<EnvelopeReport<T>>,
}

#[derive(Clone, Debug)]
pub struct GkzOptions {
    pub classify: ClassifyOptions,
    pub normalization_tol: f64,
    /// Relative tolerance for the sampled multiplicativity defects.
    pub defect_tol: f64,
    pub random_samples: usize,
    pub seed: u64,
}

impl Default for GkzOptions {
    fn default() -> Self {
        GkzOptions { classify: ClassifyOptions::default(), normalization_tol: 1e-12, defect_tol: 1e-9, random_samples: 24, seed: 7 }
    }
}

fn random_poly<T: Real>(rng: &mut ChaCha8Rng, trunc: Truncation, degree: usize) -> TruncatedSeries<T> {
    let mut s = TruncatedSeries::zero(trunc);
    let end = trunc.offset(degree + 1);
    for c in s.coeffs_mut()[..end].iter_mut() {
        *c = Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)));
    }
    s
}

fn random_point<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Cplx<T>> {
    (0..n)
        .map(|_| {
            let r = rng.gen_range(0.0..1.0f64) / (n as f64).sqrt();
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex::from_polar(T::lit(r), T::lit(t))
        })
        .collect()
}

/// Samples for the `M2` check: pairs whose degrees sum to at most the cap so
/// that the truncated product is exact.
fn m2_samples<T: Real>(trunc: Truncation, opts: &GkzOptions) -> Vec<(TruncatedSeries<T>, TruncatedSeries<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let half = trunc.degree_cap / 2;
    let mut out = Vec::new();
    for i in 0..trunc.n {
        let z = TruncatedSeries::variable(trunc, i).expect("cap >= 1");
        out.push((z.clone(), z));
    }
    for _ in 0..opts.random_samples {
        out.push((random_poly(&mut rng, trunc, half), random_poly(&mut rng, trunc, trunc.degree_cap - half)));
    }
    for _ in 0..4 {
        let w = random_point::<T>(&mut rng, trunc.n);
        let neg: Vec<Cplx<T>> = w.iter().map(|&c| -c).collect();
        let e = TruncatedSeries::exp_linear(trunc, &w).expect("matching n").with_cap(half).with_cap(trunc.degree_cap);
        let f = TruncatedSeries::exp_linear(trunc, &neg)
            .expect("matching n")
            .with_cap(trunc.degree_cap - half)
            .with_cap(trunc.degree_cap);
        out.push((e, f));
    }
    out
}

/// Samples for the `M1` check: polynomial multipliers of degree `≤ 1` times
/// series of degree `≤ cap − 1`.
fn m1_samples<T: Real>(trunc: Truncation, opts: &GkzOptions) -> Vec<(TruncatedSeries<T>, TruncatedSeries<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut out = Vec::new();
    let one = TruncatedSeries::one(trunc);
    for i in 0..trunc.n {
        let z = TruncatedSeries::variable(trunc, i).expect("cap >= 1");
        let shifted = z.add(&one).expect("same truncation");
        for _ in 0..(opts.random_samples / (2 * trunc.n)).max(1) {
            out.push((z.clone(), random_poly(&mut rng, trunc, trunc.degree_cap - 1)));
            out.push((shifted.clone(), random_poly(&mut rng, trunc, trunc.degree_cap - 1)));
        }
    }
    out
}

fn defect_scale<T: Real>(functional: &MomentFunctional<T>, samples: &[(TruncatedSeries<T>, TruncatedSeries<T>)]) -> Result<T> {
    let mut s = T::one();
    for (f, g) in samples {
        let f = lift(f, functional.trunc)?;
        let g = lift(g, functional.trunc)?;
        s = s.max((functional.apply(&f)? * functional.apply(&g)?).norm());
        s = s.max(functional.apply(&f.mul(&g)?)?.norm());
    }
    Ok(s)
}

/// Evaluates the four equivalent characterizations of a normalized point
/// evaluation: (i) `F` has no zero on the grid, (ii) the moments are
/// `b^α`, (iii) multiplicativity on sampled series pairs, (iv)
/// multiplicativity against polynomial multipliers.
pub fn gkz_equivalence_suite<T: Real>(functional: &MomentFunctional<T>, opts: &GkzOptions) -> Result<GkzReport<T>> {
    let l0 = functional.lambda0();
    if (l0 - Complex::new(T::one(), T::zero())).norm() > T::lit(opts.normalization_tol) {
        return Err(Error::Unnormalized { re: l0.re.to_f64_lossy(), im: l0.im.to_f64_lossy() });
    }
    let trunc = functional.trunc;
    if trunc.degree_cap < 2 {
        return Err(Error::InsufficientCap { cap: trunc.degree_cap, reason: "multiplicativity samples need cap >= 2".into() });
    }
    let mut conditions = Vec::with_capacity(4);

    let search = search_zeros(functional, &opts.classify);
    let (pass_i, note_i) = match &search.witness {
        Some(wit) => (
            false,
            format!("|F| = {:e} at {:?} (certified: {})", wit.modulus.to_f64_lossy(), wit.w, wit.certified),
        ),
        None => (true, format!("min |F| on grid {:e}", search.best_modulus.to_f64_lossy())),
    };
    conditions.push(ConditionVerdict {
        name: "nonvanishing_transform",
        pass: pass_i,
        value: search.witness.as_ref().map(|x| x.modulus).unwrap_or(search.best_modulus),
        note: note_i,
    });

    let fit = point_fit(functional);
    let (pass_ii, value_ii, domain) = match &fit {
        Some((_, b, d)) => (*d <= T::lit(opts.classify.fit_tol), *d, Some(envelope_check(b))),
        None => (false, T::infinity(), None),
    };
    let note_ii = match &domain {
        Some(EnvelopeReport { violated: Some(f), .. }) if pass_ii => format!("fits with b outside the open polydisc: {}", f.label),
        _ => String::new(),
    };
    conditions.push(ConditionVerdict { name: "point_evaluation_fit", pass: pass_ii, value: value_ii, note: note_ii });

    for (name, mode, samples) in [
        ("m2_truncated_products", MultiplicativityMode::M2, m2_samples::<T>(trunc, opts)),
        ("m1_polynomial_multipliers", MultiplicativityMode::M1, m1_samples::<T>(trunc, opts)),
    ] {
        let report = multiplicativity_defect(functional, mode, &samples)?;
        let scale = defect_scale(functional, &samples)?;
        let rel = report.defect / scale;
        conditions.push(ConditionVerdict {
            name,
            pass: rel <= T::lit(opts.defect_tol),
            value: report.defect,
            note: format!("relative defect {:e} over {} samples", rel.to_f64_lossy(), samples.len()),
        });
    }
    let consistent = conditions.iter().all(|c| c.pass == conditions[0].pass);
    Ok(GkzReport { conditions, consistent, domain })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainVerdict {
    Inside,
    Outside,
    Undetermined,
}

/// Growth of the truncated evaluation functional norms at a point.
#[derive(Clone, Debug, Serialize)]
pub struct DomainProbe<T: Real> {
    /// `√(Σ_{|α|≤N} |b^α|² / weight(α))` for `N = 0..=cap`.
    pub norms: Vec<T>,
    /// Fitted geometric ratio of the degree blocks.
    pub ratio: T,
    /// Fitted polynomial exponent of the degree blocks.
    pub exponent: T,
    pub verdict: DomainVerdict,
}

/// Decides whether point evaluation at `b` extends boundedly, from the
/// blocks `t_d = Σ_{|α|=d} |b^α|²/weight(α)` fitted as
/// `log t_d ≈ c + s log(d+1) + d log q` over the upper half of degrees.
pub fn domain_membership<T: Real>(space: &SpaceSpec, b: &[Cplx<T>], cap: usize) -> Result<DomainProbe<T>> {
    if b.len() != space.n() {
        return Err(Error::DimensionMismatch(format!("point with {} coordinates for n = {}", b.len(), space.n())));
    }
    if cap < 8 {
        return Err(Error::InsufficientCap { cap, reason: "domain probe fits need cap >= 8".into() });
    }
    let trunc = Truncation::new(space.n(), cap)?;
    let mut blocks = vec![T::zero(); cap + 1];
    for alpha in trunc.basis().iter() {
        let w: T = space.weight(alpha);
        blocks[alpha.degree()] = blocks[alpha.degree()] + power(b, alpha).norm_sqr() / w;
    }
    let mut norms = Vec::with_capacity(cap + 1);
    let mut acc = T::zero();
    for &t in &blocks {
        acc = acc + t;
        norms.push(acc.sqrt());
    }
    let lo = cap / 2;
    let tail: Vec<(usize, T)> = (lo..=cap).map(|d| (d, blocks[d])).filter(|(_, t)| *t > T::zero()).collect();
    if tail.len() < 4 {
        // blocks vanish identically: only finitely many nonzero terms
        return Ok(DomainProbe { norms, ratio: T::zero(), exponent: T::zero(), verdict: DomainVerdict::Inside });
    }
    let a = CMatrix::from_fn(tail.len(), 3, |i, j| {
        let d = T::from_usize_lossy(tail[i].0);
        real(match j {
            0 => T::one(),
            1 => (d + T::one()).ln(),
            _ => d,
        })
    });
    let rhs: Vec<Cplx<T>> = tail.iter().map(|(_, t)| real(t.ln())).collect();
    let coef = lstsq(&a, &rhs, T::lit(1e-12))?;
    let exponent = coef[1].re;
    let log_q = coef[2].re;
    let ratio = log_q.exp();
    let margin = T::lit(1e-3);
    let verdict = if log_q > margin {
        DomainVerdict::Outside
    } else if log_q < -margin {
        DomainVerdict::Inside
    } else if exponent < T::lit(-1.05) {
        DomainVerdict::Inside
    } else if exponent > T::lit(-0.95) {
        DomainVerdict::Outside
    } else {
        DomainVerdict::Undetermined
    };
    Ok(DomainProbe { norms, ratio, exponent, verdict })
}

/// `Λ(f) = (f(c) + f(−c)) / 2` in one variable.
pub fn symmetric_average<T: Real>(cap: usize, c: T) -> Result<MomentFunctional<T>> {
    let half = Complex::new(T::lit(0.5), T::zero());
    MomentFunctional::combination(Truncation::new(1, cap)?, &[(half, vec![real(c)]), (half, vec![real(-c)])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cplx, factorial};
    use approx::assert_abs_diff_eq;

    fn t(n: usize, cap: usize) -> Truncation {
        Truncation::new(n, cap).unwrap()
    }

    #[test]
    fn geometric_moments_transform() {
        let b = [cplx(0.5, 0.0), cplx(1.0 / 3.0, 0.0)];
        let l = MomentFunctional::<f64>::point_evaluation(t(2, 30), cplx(1.0, 0.0), &b).unwrap();
        let tv = moment_transform(&l, &[cplx(1.0, 0.0), cplx(1.0, 0.0)], 30).unwrap();
        let expect = (0.5f64 + 1.0 / 3.0).exp();
        let tail = tv.tail_bound.unwrap();
        assert!((tv.value.re - expect).abs() <= tail + tv.roundoff + 1e-15);
        assert!(tail < 1e-30);
    }

    #[test]
    fn delta_moments_transform_is_one() {
        let mut m = vec![cplx(0.0, 0.0); t(2, 6).size()];
        m[0] = cplx(1.0, 0.0);
        let l = MomentFunctional::<f64>::new(t(2, 6), m, Some(GrowthBound { c: 1.0, rho: vec![0.0, 0.0] })).unwrap();
        for w in [[cplx(3.0, 1.0), cplx(-2.0, 0.5)], [cplx(0.0, 0.0), cplx(9.0, 0.0)]] {
            let tv = moment_transform(&l, &w, 6).unwrap();
            assert_eq!(tv.value, cplx(1.0, 0.0));
            assert_eq!(tv.tail_bound, Some(0.0));
        }
    }

    #[test]
    fn growth_bound_is_enforced() {
        let m = vec![cplx(1.0, 0.0), cplx(2.0, 0.0)];
        assert!(MomentFunctional::<f64>::new(t(1, 1), m.clone(), Some(GrowthBound { c: 1.0, rho: vec![1.0] })).is_err());
        assert!(MomentFunctional::<f64>::new(t(1, 1), m, Some(GrowthBound { c: 1.0, rho: vec![2.0] })).is_ok());
    }

    #[test]
    fn apply_is_linear() {
        let l = MomentFunctional::<f64>::point_evaluation(t(2, 3), cplx(2.0, -1.0), &[cplx(0.3, 0.1), cplx(-0.2, 0.4)]).unwrap();
        let p = TruncatedSeries::from_terms(t(2, 3), [(MultiIndex::new(vec![1, 2]).unwrap(), cplx(1.5, 0.0))]).unwrap();
        let q = TruncatedSeries::from_terms(t(2, 3), [(MultiIndex::new(vec![0, 1]).unwrap(), cplx(0.0, 2.0))]).unwrap();
        let c = cplx(0.7, -0.3);
        let lhs = l.apply(&p.scale(c).add(&q).unwrap()).unwrap();
        let rhs = l.apply(&p).unwrap() * c + l.apply(&q).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn apply_rejects_overflow() {
        let l = MomentFunctional::<f64>::point_evaluation(t(1, 2), cplx(1.0, 0.0), &[cplx(0.5, 0.0)]).unwrap();
        let p = TruncatedSeries::from_terms(t(1, 4), [(MultiIndex::new(vec![3]).unwrap(), cplx(1.0, 0.0))]).unwrap();
        assert!(matches!(l.apply(&p), Err(Error::DegreeOverflow { degree: 3, cap: 2 })));
    }

    #[test]
    fn classify_point_evaluation() {
        let l = MomentFunctional::<f64>::point_evaluation(t(2, 8), cplx(3.0, 0.0), &[cplx(0.2, 0.0), cplx(0.4, 0.0)]).unwrap();
        match classify(&l, &ClassifyOptions::default()).unwrap() {
            Classification::PointEvaluation { a, b, domain, .. } => {
                assert_abs_diff_eq!(a.re, 3.0, epsilon = 1e-15);
                assert_abs_diff_eq!(b[0].re, 0.2, epsilon = 1e-15);
                assert_abs_diff_eq!(b[1].re, 0.4, epsilon = 1e-15);
                assert!(domain.inside);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classify_scaling() {
        let l = MomentFunctional::<f64>::point_evaluation(t(1, 6), cplx(1.0, 1.0), &[cplx(0.1, -0.6)]).unwrap();
        let c = cplx(-2.0, 0.5);
        let Classification::PointEvaluation { a, b, .. } = classify(&l.scale(c), &ClassifyOptions::default()).unwrap() else {
            panic!()
        };
        assert!((a - cplx::<f64>(1.0, 1.0) * c).norm() < 1e-14);
        assert!((b[0] - cplx(0.1, -0.6)).norm() < 1e-14);
    }

    #[test]
    fn classify_symmetric_average_finds_cosh_zero() {
        let l = symmetric_average::<f64>(40, 0.5).unwrap().scale(cplx(2.0, 0.0));
        let opts = ClassifyOptions { grid: ClassifyGrid { radii: vec![1.0, 2.0, 4.0], points_per_circle: 64 }, ..Default::default() };
        match classify(&l, &opts).unwrap() {
            Classification::VanishingWitness { w, modulus, certified, .. } => {
                assert!(certified);
                assert!((w[0].norm() - std::f64::consts::PI).abs() < 1e-8, "{w:?}");
                assert!(w[0].re.abs() < 1e-8);
                assert!(modulus < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classify_boundary_point_flags_domain() {
        let l = MomentFunctional::<f64>::new(t(1, 12), vec![cplx(1.0, 0.0); 13], None).unwrap();
        match classify(&l, &ClassifyOptions::default()).unwrap() {
            Classification::PointEvaluation { a, b, domain, .. } => {
                assert_eq!(a, cplx(1.0, 0.0));
                assert_eq!(b, vec![cplx(1.0, 0.0)]);
                assert!(!domain.inside);
                let f = domain.violated.unwrap();
                assert_eq!((f.index, f.beta), (0, cplx(1.0, 0.0)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_lambda0_is_witness_at_origin() {
        let l = MomentFunctional::<f64>::new(t(1, 2), vec![cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)], None).unwrap();
        let Classification::VanishingWitness { w, modulus, .. } = classify(&l, &ClassifyOptions::default()).unwrap() else {
            panic!()
        };
        assert_eq!(w, vec![cplx(0.0, 0.0)]);
        assert_eq!(modulus, 0.0);
    }

    #[test]
    fn envelope_examples() {
        assert!(envelope_check::<f64>(&[cplx(0.3, 0.0), cplx(0.0, -0.7)]).inside);
        let r = envelope_check::<f64>(&[cplx(1.0, 0.0), cplx(0.0, 0.0)]);
        assert!(!r.inside);
        assert_eq!(r.violated.as_ref().unwrap().index, 0);
        let r = envelope_check::<f64>(&[cplx(0.5, 0.0), cplx(1.2, 0.0)]);
        let f = r.violated.unwrap();
        assert_eq!(f.index, 1);
        assert!(f.beta.norm() >= 1.0);
    }

    #[test]
    fn multiplicativity_examples() {
        let b = [cplx(0.3, 0.2), cplx(-0.5, 0.1)];
        let l = MomentFunctional::<f64>::point_evaluation(t(2, 6), cplx(1.0, 0.0), &b).unwrap();
        let pairs = exhaustive_monomial_pairs::<f64>(t(2, 6));
        let r = multiplicativity_defect(&l, MultiplicativityMode::M0, &pairs).unwrap();
        assert!(r.defect < 1e-12 && !r.truncated);
        assert!(m0_exhaustive_defect(&l) < 1e-12);

        let avg = symmetric_average::<f64>(4, 0.5).unwrap().scale(cplx(2.0, 0.0));
        let z = TruncatedSeries::variable(t(1, 4), 0).unwrap();
        let r = multiplicativity_defect(&avg, MultiplicativityMode::M0, &[(z.clone(), z)]).unwrap();
        assert_abs_diff_eq!(r.defect, 0.5, epsilon = 1e-15);

        let two = l.scale(cplx(2.0, 0.0));
        let one = TruncatedSeries::one(t(2, 6));
        let r = multiplicativity_defect(&two, MultiplicativityMode::M0, &[(one.clone(), one)]).unwrap();
        assert_abs_diff_eq!(r.defect, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn m0_rejects_overflowing_pairs() {
        let l = MomentFunctional::<f64>::point_evaluation(t(1, 3), cplx(1.0, 0.0), &[cplx(0.5, 0.0)]).unwrap();
        let z2 = TruncatedSeries::from_terms(t(1, 3), [(MultiIndex::new(vec![2]).unwrap(), cplx(1.0, 0.0))]).unwrap();
        assert!(multiplicativity_defect(&l, MultiplicativityMode::M0, &[(z2.clone(), z2.clone())]).is_err());
        let r = multiplicativity_defect(&l, MultiplicativityMode::M2, &[(z2.clone(), z2)]).unwrap();
        assert!(r.truncated);
    }

    #[test]
    fn gkz_point_evaluation_passes() {
        let l = MomentFunctional::<f64>::point_evaluation(t(1, 20), cplx(1.0, 0.0), &[cplx(0.4, 0.0)]).unwrap();
        let r = gkz_equivalence_suite(&l, &GkzOptions::default()).unwrap();
        assert!(r.conditions.iter().all(|c| c.pass), "{r:?}");
        assert!(r.consistent);
    }

    #[test]
    fn gkz_average_fails_everywhere() {
        let l = symmetric_average::<f64>(30, 0.5).unwrap();
        let r = gkz_equivalence_suite(&l, &GkzOptions::default()).unwrap();
        assert!(r.conditions.iter().all(|c| !c.pass), "{r:?}");
        assert!(r.consistent);
    }

    #[test]
    fn gkz_boundary_point_passes_with_flag() {
        let l = MomentFunctional::<f64>::point_evaluation(t(1, 20), cplx(1.0, 0.0), &[cplx(1.0, 0.0)]).unwrap();
        let r = gkz_equivalence_suite(&l, &GkzOptions::default()).unwrap();
        assert!(r.conditions.iter().all(|c| c.pass), "{r:?}");
        assert!(!r.domain.unwrap().inside);
    }

    #[test]
    fn gkz_requires_normalization() {
        let l = MomentFunctional::<f64>::point_evaluation(t(1, 4), cplx(2.0, 0.0), &[cplx(0.4, 0.0)]).unwrap();
        assert!(matches!(gkz_equivalence_suite(&l, &GkzOptions::default()), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn domain_probe_verdicts() {
        let h2 = SpaceSpec::HardyH2 { n: 1 };
        let cplx = cplx::<f64>;
        assert_eq!(domain_membership(&h2, &[cplx(0.9, 0.0)], 60).unwrap().verdict, DomainVerdict::Inside);
        assert_eq!(domain_membership(&h2, &[cplx(1.0, 0.0)], 60).unwrap().verdict, DomainVerdict::Outside);
        let d2 = SpaceSpec::DirichletAlpha { n: 1, alpha: 2.0 };
        assert_eq!(domain_membership(&d2, &[cplx(0.0, 1.0)], 60).unwrap().verdict, DomainVerdict::Inside);
        let d_half = SpaceSpec::DirichletAlpha { n: 1, alpha: 0.5 };
        assert_eq!(domain_membership(&d_half, &[cplx(1.0, 0.0)], 60).unwrap().verdict, DomainVerdict::Outside);
        let h2_2 = SpaceSpec::HardyH2 { n: 2 };
        assert_eq!(domain_membership(&h2_2, &[cplx(0.5, 0.0), cplx(1.1, 0.0)], 40).unwrap().verdict, DomainVerdict::Outside);
        let da = SpaceSpec::DruryArveson { n: 2 };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(domain_membership(&da, &[cplx(s, 0.0), cplx(s, 0.0)], 40).unwrap().verdict, DomainVerdict::Outside);
        assert_eq!(domain_membership(&da, &[cplx(0.6, 0.0), cplx(0.6, 0.0)], 40).unwrap().verdict, DomainVerdict::Inside);
    }

    #[test]
    fn exp_tail_matches_direct_sum() {
        let direct: f64 = (6..60).map(|d| 1.5f64.powi(d) / factorial::<f64>(d as u32)).sum();
        assert!((exp_tail(1.5f64, 5) - direct).abs() < 1e-15);
        assert_eq!(exp_tail(0.0f64, 3), 0.0);
    }
}
