//! Recovery of the exponent `p` of a zero-free entire function `F = e^p`
//! from branch-continued logarithms along rays, with a certificate that
//! the homogeneous components above the growth order vanish.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::linalg::{lstsq, CMatrix};
use crate::multiindex::Truncation;
use crate::quadrature::QuadratureRule;
use crate::scalar::{Cplx, Real};
use crate::series::TruncatedSeries;

/// Continuous logarithm `G(λ z)` sampled along `λ ∈ [0, 1]`.
#[derive(Clone, Debug, Serialize)]
pub struct LogBranch<T: Real> {
    pub direction: Vec<Cplx<T>>,
    pub lambdas: Vec<T>,
    pub values: Vec<Cplx<T>>,
}

impl<T: Real> LogBranch<T> {
    pub fn steps(&self) -> usize {
        self.lambdas.len().saturating_sub(1)
    }

    pub fn endpoint(&self) -> Cplx<T> {
        *self.values.last().expect("branch has the anchor value")
    }
}

/// Sub-steps per unit of the ray parameter, at least.
pub const MIN_SUBSTEPS: usize = 64;

/// Smallest `|F|` accepted along a ray.
pub const NONVANISHING_FLOOR: f64 = 1e-300;

fn point<T: Real>(z: &[Cplx<T>], lambda: T) -> Vec<Cplx<T>> {
    z.iter().map(|&c| c * lambda).collect()
}

fn checked_eval<T: Real>(f: &dyn Evaluator<T>, z: &[Cplx<T>], lambda: T) -> Result<Cplx<T>> {
    let v = f.eval(&point(z, lambda));
    if !(v.norm() > T::lit(NONVANISHING_FLOOR)) || !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonVanishingViolation { lambda: lambda.to_f64_lossy(), modulus: v.norm().to_f64_lossy() });
    }
    Ok(v)
}

/// `G(λ_{j+1}) = G(λ_j) + Log(F(λ_{j+1} z) / F(λ_j z))` on `steps` uniform
/// steps, anchored at the principal `Log F(0)`. An increment of modulus
/// `≥ π` is rejected.
pub fn log_along_ray<T: Real>(f: &dyn Evaluator<T>, z: &[Cplx<T>], steps: usize) -> Result<LogBranch<T>> {
    if z.len() != f.n() {
        return Err(Error::DimensionMismatch(format!("direction with {} coordinates for n = {}", z.len(), f.n())));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is needed".into()));
    }
    let mut prev = checked_eval(f, z, T::zero())?;
    let mut g = prev.ln();
    let mut lambdas = vec![T::zero()];
    let mut values = vec![g];
    let total = T::from_usize_lossy(steps);
    for j in 1..=steps {
        let lambda = T::from_usize_lossy(j) / total;
        let v = checked_eval(f, z, lambda)?;
        let inc = (v / prev).ln();
        if inc.norm() >= T::PI() {
            return Err(Error::StepTooCoarse {
                from: lambdas[j - 1].to_f64_lossy(),
                to: lambda.to_f64_lossy(),
                jump: inc.norm().to_f64_lossy(),
            });
        }
        g = g + inc;
        prev = v;
        lambdas.push(lambda);
        values.push(g);
    }
    Ok(LogBranch { direction: z.to_vec(), lambdas, values })
}

/// Continuous logarithm at the requested `λ` values (ascending, in
/// `[0, 1]`). Sub-steps are at most `1/MIN_SUBSTEPS` long and are halved
/// until the increment and its two half-step increments all agree with
/// modulus `< π/4`.
pub fn log_along_ray_adaptive<T: Real>(f: &dyn Evaluator<T>, z: &[Cplx<T>], lambdas: &[T]) -> Result<LogBranch<T>> {
    if z.len() != f.n() {
        return Err(Error::DimensionMismatch(format!("direction with {} coordinates for n = {}", z.len(), f.n())));
    }
    let limit = T::FRAC_PI_4();
    let max_step = T::lit(1.0 / MIN_SUBSTEPS as f64);
    let mut at = T::zero();
    let mut prev = checked_eval(f, z, at)?;
    let mut g = prev.ln();
    let mut values = Vec::with_capacity(lambdas.len());
    for &target in lambdas {
        if target < at {
            return Err(Error::InvalidArgument("ray parameters must be ascending".into()));
        }
        while at < target {
            let mut step = (target - at).min(max_step);
            let mut halvings = 0;
            loop {
                let next = if step == target - at { target } else { at + step };
                let v = checked_eval(f, z, next)?;
                let inc = (v / prev).ln();
                let mid = checked_eval(f, z, (at + next) * T::lit(0.5))?;
                let split = (mid / prev).ln() + (v / mid).ln();
                if inc.norm() < limit && (split - inc).norm() < limit {
                    g = g + inc;
                    prev = v;
                    at = next;
                    break;
                }
                halvings += 1;
                if halvings > 48 {
                    return Err(Error::StepTooCoarse { from: at.to_f64_lossy(), to: next.to_f64_lossy(), jump: inc.norm().to_f64_lossy() });
                }
                step = step * T::lit(0.5);
            }
        }
        values.push(g);
    }
    Ok(LogBranch { direction: z.to_vec(), lambdas: lambdas.to_vec(), values })
}

/// Assumed bound `|F(z)| ≤ A e^{B r^m}` on `(r𝔻)ⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthAssumption {
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug)]
pub struct FactorOptions {
    /// Fit degree `M`; defaults to `m + 2`.
    pub fit_degree: Option<usize>,
    /// Radius of the outermost ray sample.
    pub radius: f64,
    /// Random unit directions; defaults to `2 · C(M + n, n)`.
    pub random_rays: Option<usize>,
    pub seed: u64,
    /// Largest accepted `max |G_sample − p(sample)|` relative to `max(1, max |G|)`.
    pub fit_tol: f64,
    /// Largest accepted homogeneous coefficient above degree `m`.
    pub tail_tol: f64,
    /// Held-out points for the `e^p = F` check.
    pub held_out: usize,
    pub growth: Option<GrowthAssumption>,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            fit_degree: None,
            radius: 2.0,
            random_rays: None,
            seed: 11,
            fit_tol: 1e-9,
            tail_tol: 1e-8,
            held_out: 16,
            growth: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeVerdict {
    /// Every homogeneous part above `m` is below the tail tolerance.
    Certified,
    /// Some homogeneous part above `m` is not negligible.
    Refuted,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchwarzCheck<T: Real> {
    /// `C = max(ln A, B) + 1`.
    pub c: T,
    /// `max |p(z)| / (2C(1 + 2^m ‖z‖_∞^m) + 3|p(0)|)` over the samples.
    pub max_ratio: T,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentReport<T: Real> {
    pub m: usize,
    pub fit_degree: usize,
    /// Fitted exponent truncated at the fit degree.
    pub p: TruncatedSeries<T>,
    pub residual: T,
    /// `(k, max |coefficient| of the degree-k part)` for `m < k ≤ M`.
    pub tail: Vec<(usize, T)>,
    pub verdict: DegreeVerdict,
    pub samples: usize,
    pub rays: usize,
    /// `max |e^{p(z)} − F(z)| / |F(z)|` at points not used in the fit.
    pub held_out_rel_error: T,
    pub schwarz: Option<SchwarzCheck<T>>,
}

fn unit_direction<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Cplx<T>> {
    loop {
        let v: Vec<Cplx<f64>> = (0..n).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.iter().map(|c| Complex::new(T::lit(c.re / norm), T::lit(c.im / norm))).collect();
        }
    }
}

/// Default ray set: coordinate axes, the normalized diagonal and `count`
/// seeded random unit directions.
pub fn default_rays<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<Cplx<T>>> {
    let mut rays = Vec::with_capacity(n + 1 + count);
    for i in 0..n {
        let mut e = vec![Complex::zero(); n];
        e[i] = Complex::new(T::one(), T::zero());
        rays.push(e);
    }
    if n > 1 {
        let s = T::one() / T::from_usize_lossy(n).sqrt();
        rays.push(vec![Complex::new(s, T::zero()); n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        rays.push(unit_direction(&mut rng, n));
    }
    rays
}

fn monomial_row<T: Real>(trunc: Truncation, z: &[Cplx<T>]) -> Vec<Cplx<T>> {
    trunc
        .basis()
        .iter()
        .map(|a| a.entries().iter().zip(z).fold(Complex::new(T::one(), T::zero()), |acc, (&e, &zi)| acc * zi.powu(e)))
        .collect()
}

/// Fits `p` of degree `≤ M` to continuous logarithms of `F` sampled on rays
/// out to `radius`, and reports the homogeneous parts above `m`.
pub fn recover_exponent<T: Real>(f: &dyn Evaluator<T>, m: usize, opts: &FactorOptions) -> Result<ExponentReport<T>> {
    let n = f.n();
    let fit_degree = opts.fit_degree.unwrap_or(m + 2);
    if fit_degree < m {
        return Err(Error::InvalidArgument(format!("fit degree {fit_degree} below the growth order {m}")));
    }
    let trunc = Truncation::new(n, fit_degree)?;
    let cols = trunc.size();
    let rays = default_rays::<T>(n, opts.random_rays.unwrap_or(2 * cols), opts.seed);
    let per_ray = fit_degree + 1;
    let radius = T::lit(opts.radius);
    let lambdas: Vec<T> = (1..=per_ray).map(|j| T::from_usize_lossy(j) / T::from_usize_lossy(per_ray)).collect();
    let branches: Vec<LogBranch<T>> = rays
        .par_iter()
        .map(|u| {
            let z: Vec<Cplx<T>> = u.iter().map(|&c| c * radius).collect();
            log_along_ray_adaptive(f, &z, &lambdas)
        })
        .collect::<Result<_>>()?;
    let g0 = checked_eval(f, &vec![Complex::zero(); n], T::zero())?.ln();
    let mut points: Vec<Vec<Cplx<T>>> = vec![vec![Complex::zero(); n]];
    let mut targets = vec![g0];
    for b in &branches {
        for (&lam, &g) in b.lambdas.iter().zip(&b.values) {
            points.push(point(&b.direction, lam));
            targets.push(g);
        }
    }
    if points.len() < cols {
        return Err(Error::RankDeficient { rows: points.len(), cols });
    }
    let raw = CMatrix::from_fn(points.len(), cols, |_, _| Complex::zero());
    let mut design = raw;
    for (i, z) in points.iter().enumerate() {
        for (j, v) in monomial_row(trunc, z).into_iter().enumerate() {
            design[(i, j)] = v;
        }
    }
    // column equilibration
    let scales: Vec<T> = (0..cols)
        .map(|j| {
            let s = (0..points.len()).map(|i| design[(i, j)].norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
            if s > T::zero() {
                s
            } else {
                T::one()
            }
        })
        .collect();
    for i in 0..points.len() {
        for (j, &s) in scales.iter().enumerate() {
            design[(i, j)] = design[(i, j)] / s;
        }
    }
    let x = lstsq(&design, &targets, T::lit(1e-13))?;
    let coeffs: Vec<Cplx<T>> = x.iter().zip(&scales).map(|(&c, &s)| c / s).collect();
    let p = TruncatedSeries::from_dense(trunc, coeffs)?;
    let scale = targets.iter().map(|g| g.norm()).fold(T::one(), T::max);
    let residual = points
        .iter()
        .zip(&targets)
        .map(|(z, g)| (p.eval(z) - *g).norm())
        .fold(T::zero(), T::max);
    if residual > T::lit(opts.fit_tol) * scale {
        return Err(Error::FitFailed { residual: residual.to_f64_lossy(), tolerance: (T::lit(opts.fit_tol) * scale).to_f64_lossy() });
    }
    let tail: Vec<(usize, T)> = (m + 1..=fit_degree)
        .map(|k| {
            let (lo, hi) = (trunc.offset(k), trunc.offset(k + 1));
            (k, p.coeffs()[lo..hi].iter().map(|c| c.norm()).fold(T::zero(), T::max))
        })
        .collect();
    let verdict = if tail.iter().all(|&(_, v)| v <= T::lit(opts.tail_tol)) {
        DegreeVerdict::Certified
    } else {
        DegreeVerdict::Refuted
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5851_f42d_4c95_7f2d);
    let mut held_out_rel_error = T::zero();
    let mut held_points = Vec::with_capacity(opts.held_out);
    for _ in 0..opts.held_out {
        let u = unit_direction::<T>(&mut rng, n);
        let r = T::lit(rng.gen_range(0.1..opts.radius));
        let z: Vec<Cplx<T>> = u.iter().map(|&c| c * r).collect();
        let fz = f.eval(&z);
        if fz.norm() > T::zero() {
            held_out_rel_error = held_out_rel_error.max((p.eval(&z).exp() - fz).norm() / fz.norm());
        }
        held_points.push(z);
    }
    let schwarz = opts.growth.map(|g| {
        let c = T::lit(g.a.ln().max(g.b) + 1.0);
        let p0 = p.constant_term().norm();
        let max_ratio = points
            .iter()
            .chain(&held_points)
            .map(|z| {
                let r = z.iter().map(|c| c.norm()).fold(T::zero(), T::max);
                let bound = T::lit(2.0) * c * (T::one() + T::lit(2.0).powi(m as i32) * r.powi(m as i32)) + T::lit(3.0) * p0;
                p.eval(z).norm() / bound
            })
            .fold(T::zero(), T::max);
        SchwarzCheck { c, max_ratio, pass: max_ratio <= T::one() }
    });
    Ok(ExponentReport {
        m,
        fit_degree,
        p,
        residual,
        tail,
        verdict,
        samples: points.len(),
        rays: rays.len(),
        held_out_rel_error,
        schwarz,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthCertificate<T: Real> {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    pub radii: Vec<f64>,
    /// `log max |F|` over the torus grid of each radius.
    pub log_max: Vec<T>,
    /// `ln A + B r^m` per radius.
    pub log_bound: Vec<T>,
    pub pass: Vec<bool>,
    pub all_pass: bool,
}

/// Compares `log max |F|` on `r𝕋ⁿ` grids (where the maximum over the
/// polydisc is attained) with `ln A + B r^m`.
pub fn check_growth<T: Real>(f: &dyn Evaluator<T>, a: f64, b: f64, m: usize, radii: &[f64], points_per_circle: usize) -> Result<GrowthCertificate<T>> {
    if !(a > 0.0) || b < 0.0 {
        return Err(Error::InvalidArgument(format!("growth constants must satisfy A > 0, B >= 0 (got A = {a}, B = {b})")));
    }
    let n = f.n();
    let mut log_max = Vec::with_capacity(radii.len());
    let mut log_bound = Vec::with_capacity(radii.len());
    let mut pass = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("radius {r} must be positive and finite")));
        }
        // nodes on the unit torus scaled by r: radii above 1 are allowed here
        let rule = QuadratureRule::<T>::new(n, points_per_circle, T::one())?;
        let rr = T::lit(r);
        let values = rule.sample(|z| {
            let scaled: Vec<Cplx<T>> = z.iter().map(|&c| c * rr).collect();
            f.log_abs(&scaled)
        });
        let lm = values.into_iter().fold(T::neg_infinity(), T::max);
        let bound = T::lit(a.ln() + b * r.powi(m as i32));
        let slack = T::lit(1e-9) * bound.abs().max(T::one());
        log_max.push(lm);
        log_bound.push(bound);
        pass.push(lm <= bound + slack);
    }
    let all_pass = pass.iter().all(|&p| p);
    Ok(GrowthCertificate { a, b, m, radii: radii.to_vec(), log_max, log_bound, pass, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{ExpPolynomial, FnEvaluator};
    use crate::multiindex::MultiIndex;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    fn exp_poly(n: usize, cap: usize, terms: &[(Vec<u32>, Cplx<f64>)]) -> ExpPolynomial<f64> {
        let t = Truncation::new(n, cap).unwrap();
        let p = TruncatedSeries::from_terms(t, terms.iter().map(|(a, v)| (MultiIndex::new(a.clone()).unwrap(), *v))).unwrap();
        ExpPolynomial { p }
    }

    #[test]
    fn ray_log_of_exp() {
        let f = exp_poly(1, 1, &[(vec![1], c(1.0, 0.0))]);
        let b = log_along_ray(&f, &[c(1.0, 0.0)], 50).unwrap();
        for (l, g) in b.lambdas.iter().zip(&b.values) {
            assert!((g - c(*l, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn anchor_is_principal() {
        let f = exp_poly(1, 1, &[(vec![0], c(0.0, std::f64::consts::TAU)), (vec![1], c(1.0, 0.0))]);
        let b = log_along_ray(&f, &[c(1.0, 0.0)], 50).unwrap();
        assert!(b.values[0].norm() < 1e-12);
        assert!((b.endpoint() - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn step_guard() {
        let f = exp_poly(1, 2, &[(vec![2], c(1.0, 0.0))]);
        let b = log_along_ray(&f, &[c(3.0, 0.0)], 10).unwrap();
        assert!((b.endpoint() - c(9.0, 0.0)).norm() < 1e-10);
        assert!(matches!(log_along_ray(&f, &[c(3.0, 0.0)], 2), Err(Error::StepTooCoarse { .. })));
    }

    #[test]
    fn zero_on_ray_is_reported() {
        let f = FnEvaluator { n: 1, f: |z: &[Cplx<f64>]| z[0] - c(0.5, 0.0) };
        assert!(matches!(log_along_ray(&f, &[c(1.0, 0.0)], 4), Err(Error::NonVanishingViolation { .. })));
    }

    #[test]
    fn branch_consistency_between_step_counts() {
        let f = exp_poly(2, 3, &[(vec![1, 1], c(0.0, 2.0)), (vec![3, 0], c(0.7, 0.0))]);
        let z = [c(1.2, 0.3), c(-0.4, 0.9)];
        let a = log_along_ray(&f, &z, 100).unwrap().endpoint();
        let b = log_along_ray(&f, &z, 1000).unwrap().endpoint();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn recovers_one_variable_quadratic() {
        let f = exp_poly(1, 2, &[(vec![0], c(1.0, 0.0)), (vec![1], c(2.0, 0.0)), (vec![2], c(3.0, 0.0))]);
        let r = recover_exponent(&f, 2, &FactorOptions::default()).unwrap();
        let expect = [1.0, 2.0, 3.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((r.p.coeffs()[k] - c(*e, 0.0)).norm() < 1e-8, "{:?}", r.p);
        }
        assert_eq!(r.verdict, DegreeVerdict::Certified);
        assert!(r.held_out_rel_error < 1e-7);
    }

    #[test]
    fn recovers_mixed_monomial() {
        let f = exp_poly(2, 2, &[(vec![1, 1], c(1.0, 0.0))]);
        let r = recover_exponent(&f, 2, &FactorOptions::default()).unwrap();
        let target = TruncatedSeries::from_terms(r.p.trunc(), [(MultiIndex::new(vec![1, 1]).unwrap(), c(1.0, 0.0))]).unwrap();
        assert!(r.p.max_abs_diff(&target) < 1e-8);
        assert_eq!(r.verdict, DegreeVerdict::Certified);
    }

    #[test]
    fn cubic_refutes_quadratic_growth() {
        let f = exp_poly(1, 3, &[(vec![3], c(1.0, 0.0))]);
        let r = recover_exponent(&f, 2, &FactorOptions::default()).unwrap();
        assert_eq!(r.verdict, DegreeVerdict::Refuted);
        let g3 = r.tail.iter().find(|t| t.0 == 3).unwrap().1;
        assert!((g3 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn schwarz_validator_accepts_true_bound() {
        let f = exp_poly(1, 1, &[(vec![1], c(1.0, 0.0))]);
        let opts = FactorOptions { growth: Some(GrowthAssumption { a: 1.0, b: 1.0 }), ..Default::default() };
        let r = recover_exponent(&f, 1, &opts).unwrap();
        assert!(r.schwarz.unwrap().pass);
    }

    #[test]
    fn growth_examples() {
        let e = exp_poly(1, 1, &[(vec![1], c(1.0, 0.0))]);
        assert!(check_growth(&e, 1.0, 1.0, 1, &[1.0, 2.0, 4.0], 64).unwrap().all_pass);
        let q = exp_poly(1, 2, &[(vec![2], c(1.0, 0.0))]);
        let cert = check_growth(&q, 1.0, 1.0, 1, &[1.0, 2.0, 4.0], 64).unwrap();
        assert!(!cert.pass[2]);
        let five = FnEvaluator { n: 2, f: |_: &[Cplx<f64>]| c(5.0, 0.0) };
        assert!(check_growth(&five, 5.0, 0.0, 0, &[1.0, 10.0], 8).unwrap().all_pass);
    }
}
