//! Optimal polynomial approximants of `1` in `f·𝒫_N`, cyclicity curves and
//! the outer-function test `log|f(0)| = ∫_{𝕋ⁿ} log|f|`.

use std::cell::Cell;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{solve_hpd, vec_norm, CMatrix};
use crate::multiindex::Truncation;
use crate::quadrature::{adaptive_gk, default_radii};
use crate::scalar::{pairwise_sum, Cplx, Real};
use crate::series::TruncatedSeries;
use crate::evaluator::Evaluator;
use crate::spaces::{gram_from_coeffs, weighted_norm, SpaceSpec};

/// One solve of `min_{deg p ≤ N} ‖p f − 1‖`.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximantStep<T: Real> {
    pub degree: usize,
    pub distance: T,
    /// Minimizer over the truncation `(n, N)`.
    pub optimal_p: TruncatedSeries<T>,
    pub condition: T,
    pub jitter: T,
    /// `‖M c − v‖ / ‖v‖` for the normal equations.
    pub residual: T,
}

/// `d_N = min_{deg p ≤ N} ‖p f − 1‖` under `space`. Products are formed at
/// working cap `N + deg f`, so no term of `p f` is discarded.
pub fn approximant_distance<T: Real>(f: &TruncatedSeries<T>, space: &SpaceSpec, degree: usize) -> Result<ApproximantStep<T>> {
    if f.n() != space.n() {
        return Err(Error::DimensionMismatch(format!("series over n = {} in a space over n = {}", f.n(), space.n())));
    }
    let deg_f = f.degree().ok_or_else(|| Error::InvalidArgument("f must be nonzero".into()))?;
    let n = f.n();
    let work = Truncation::new(n, degree + deg_f)?;
    let lifted = f.with_cap(work.degree_cap);
    let multipliers = Truncation::new(n, degree)?;
    let products: Vec<TruncatedSeries<T>> = multipliers.basis().iter().map(|a| lifted.mul_monomial(a)).collect();
    let weights = space.weights::<T>(work);
    let gram = gram_from_coeffs(&weights, &products.iter().map(|b| b.coeffs()).collect::<Vec<_>>());
    // normal equations Σ_k c_k ⟨b_k, b_j⟩ = ⟨1, b_j⟩
    let m = products.len();
    let system = CMatrix::from_fn(m, m, |j, k| gram[(j, k)].conj());
    let w0 = weights[0];
    let rhs: Vec<Cplx<T>> = products.iter().map(|b| b.coeffs()[0].conj() * w0).collect();
    let sol = solve_hpd(&system, &rhs)?;
    let mc = system.matvec(&sol.x);
    let diff: Vec<Cplx<T>> = mc.iter().zip(&rhs).map(|(a, b)| *a - *b).collect();
    let rhs_norm = vec_norm(&rhs);
    let residual = if rhs_norm > T::zero() { vec_norm(&diff) / rhs_norm } else { vec_norm(&diff) };
    let projection = sol.x.iter().zip(&rhs).fold(Complex::zero(), |acc: Cplx<T>, (c, v)| acc + *c * v.conj());
    let d2 = (w0 - projection.re).max(T::zero());
    Ok(ApproximantStep {
        degree,
        distance: d2.sqrt(),
        optimal_p: TruncatedSeries::from_dense(multipliers, sol.x)?,
        condition: sol.condition,
        jitter: sol.jitter,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclicityVerdict {
    CyclicConsistent,
    NonCyclicConsistent,
    Undetermined,
}

/// Distances `d_0, …, d_{N_max}` with a plateau heuristic.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximantResult<T: Real> {
    pub f: TruncatedSeries<T>,
    pub space: SpaceSpec,
    pub degrees: Vec<usize>,
    pub distances: Vec<T>,
    pub conditions: Vec<T>,
    pub optimal_p: TruncatedSeries<T>,
    /// `d_N ≤ d_{N−1} + 1e−12` held at every step.
    pub monotone: bool,
    /// Least-squares slope of `log d_N` against `log(N + 1)` over the upper
    /// half of the curve; `None` when some distance vanishes.
    pub log_log_slope: Option<T>,
    pub verdict: CyclicityVerdict,
}

/// Distance below which `1` counts as reached.
pub const CYCLIC_FLOOR: f64 = 1e-6;
/// Relative drop over the last three degrees below which a curve is a plateau.
pub const PLATEAU_DROP: f64 = 1e-2;

pub fn cyclicity_curve<T: Real>(f: &TruncatedSeries<T>, space: &SpaceSpec, n_max: usize) -> Result<ApproximantResult<T>> {
    let steps: Vec<ApproximantStep<T>> = (0..=n_max)
        .into_par_iter()
        .map(|d| approximant_distance(f, space, d))
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<T> = steps.iter().map(|s| s.distance).collect();
    let conditions: Vec<T> = steps.iter().map(|s| s.condition).collect();
    let slack = T::lit(1e-12);
    let monotone = distances.windows(2).all(|w| w[1] <= w[0] + slack);
    let last = *distances.last().expect("at least one degree");
    let verdict = if last < T::lit(CYCLIC_FLOOR) {
        CyclicityVerdict::CyclicConsistent
    } else if n_max < 3 {
        CyclicityVerdict::Undetermined
    } else {
        let before = distances[n_max - 3];
        if (before - last) / before < T::lit(PLATEAU_DROP) {
            CyclicityVerdict::NonCyclicConsistent
        } else {
            CyclicityVerdict::CyclicConsistent
        }
    };
    let log_log_slope = log_log_slope(&distances);
    Ok(ApproximantResult {
        f: f.clone(),
        space: *space,
        degrees: (0..=n_max).collect(),
        distances,
        conditions,
        optimal_p: steps.into_iter().last().expect("at least one degree").optimal_p,
        monotone,
        log_log_slope,
        verdict,
    })
}

fn log_log_slope<T: Real>(d: &[T]) -> Option<T> {
    let lo = d.len() / 2;
    let pts: Vec<(T, T)> = d[lo..]
        .iter()
        .enumerate()
        .map(|(i, &v)| (T::from_usize_lossy(lo + i + 1).ln(), v.ln()))
        .collect();
    if pts.len() < 2 || pts.iter().any(|p| !p.1.is_finite()) {
        return None;
    }
    let k = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / k;
    let my = pts.iter().map(|p| p.1).sum::<T>() / k;
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// `‖Σ_{|α|>K} w^α/α! z^α‖` in `space`, summed degree block by block.
pub fn exp_tail_norm<T: Real>(w: &[Cplx<T>], space: &SpaceSpec, k: usize) -> Result<T> {
    const EXTRA: usize = 60;
    let trunc = Truncation::new(w.len(), k + EXTRA)?;
    let e = TruncatedSeries::exp_linear(trunc, w)?;
    let weights = space.with_n(w.len()).weights::<T>(trunc);
    let start = trunc.offset(k + 1);
    Ok(weighted_norm(&weights[start..], &e.coeffs()[start..]))
}

/// Cyclicity of a truncated exponential and agreement of its optimal
/// approximant with the truncation of `e^{−w·z}`.
#[derive(Clone, Debug, Serialize)]
pub struct ExpCyclicity<T: Real> {
    pub cap: usize,
    pub tail_norm: T,
    pub curve: ApproximantResult<T>,
    /// `|⟨p, q⟩| / (‖p‖ ‖q‖)` for the optimal `p` and `q = e^{−w·z}` at degree `N_max`.
    pub cosine_similarity: T,
    /// `‖q e^{w·z} − 1‖`, an upper bound for `d_{N_max}`.
    pub truncation_bound: T,
}

/// Required tail norm of the truncated exponential.
pub const EXP_TAIL_TOL: f64 = 1e-10;

/// Runs the curve for `e^{w·z}` truncated at `cap`, or at the smallest cap
/// whose omitted tail is below `1e−10` when `cap` is `None`.
pub fn exp_is_cyclic_check<T: Real>(w: &[Cplx<T>], space: &SpaceSpec, n_max: usize, cap: Option<usize>) -> Result<ExpCyclicity<T>> {
    if w.len() != space.n() {
        return Err(Error::DimensionMismatch(format!("point with {} coordinates in a space over n = {}", w.len(), space.n())));
    }
    let tol = T::lit(EXP_TAIL_TOL);
    let cap = match cap {
        Some(c) => {
            let tail = exp_tail_norm(w, space, c)?;
            if tail >= tol {
                return Err(Error::InsufficientCap { cap: c, reason: format!("exponential tail norm {tail:e} is not below {tol:e}") });
            }
            c
        }
        None => (0..=200)
            .find(|&c| exp_tail_norm(w, space, c).map(|t| t < tol).unwrap_or(false))
            .ok_or_else(|| Error::InsufficientCap { cap: 200, reason: "exponential tail does not fall below tolerance".into() })?,
    };
    let tail_norm = exp_tail_norm(w, space, cap)?;
    let trunc = Truncation::new(w.len(), cap)?;
    let f = TruncatedSeries::exp_linear(trunc, w)?;
    let curve = cyclicity_curve(&f, space, n_max)?;
    let neg: Vec<Cplx<T>> = w.iter().map(|&c| -c).collect();
    let q = TruncatedSeries::exp_linear(Truncation::new(w.len(), n_max)?, &neg)?;
    let p = &curve.optimal_p;
    let ip = space.inner(p, &q)?;
    let denom = space.norm(p)? * space.norm(&q)?;
    let cosine_similarity = if denom > T::zero() { ip.norm() / denom } else { T::zero() };
    let work = cap + n_max;
    let prod = q.with_cap(work).mul(&f.with_cap(work))?;
    let residual = prod.sub(&TruncatedSeries::one(prod.trunc()))?;
    let truncation_bound = space.norm(&residual)?;
    Ok(ExpCyclicity { cap, tail_norm, curve, cosine_similarity, truncation_bound })
}

#[derive(Clone, Debug)]
pub struct OuterOptions {
    /// Interior radii; the boundary `r = 1` is always appended.
    pub radii: Vec<f64>,
    /// Uniform nodes per circle for all variables but the last.
    pub outer_nodes: usize,
    /// Absolute tolerance of the adaptive rule in the last variable.
    pub inner_tol: f64,
    pub max_segments: usize,
    pub tol_outer: f64,
    pub log_floor: f64,
    /// Largest tolerated fraction of clipped integrand samples.
    pub max_clipped_fraction: f64,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions {
            radii: default_radii(10),
            outer_nodes: 256,
            inner_tol: 1e-11,
            max_segments: 4000,
            tol_outer: 1e-3,
            log_floor: 1e-14,
            max_clipped_fraction: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterVerdict {
    Outer,
    NotOuter,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct OuterReport<T: Real> {
    pub radii: Vec<T>,
    pub lhs: T,
    pub rhs: Vec<T>,
    /// Boundary mean, the `r = 1` entry of `rhs`.
    pub rhs_limit: T,
    pub defect: T,
    pub verdict: OuterVerdict,
    pub clipped_fraction: T,
    /// `rhs` decreased somewhere by more than `1e−9`.
    pub monotonicity_violation: bool,
    /// `defect > tol_outer`, impossible for analytic `f`.
    pub positive_defect: bool,
    /// Boundary mean recomputed at half resolution.
    pub rhs_check: T,
    pub diagnostics: Vec<String>,
}

struct TorusMean<T> {
    mean: T,
    clipped: usize,
    samples: usize,
    converged: bool,
}

/// Mean of `log|f|` over `r𝕋ⁿ`: uniform shifted trapezoid in the leading
/// variables, adaptive Gauss–Kronrod in the last one.
fn torus_log_mean<T: Real>(f: &dyn Evaluator<T>, r: T, outer_nodes: usize, inner_tol: T, opts: &OuterOptions) -> TorusMean<T> {
    let n = f.n();
    let tiny = T::lit(opts.log_floor);
    let outer = n - 1;
    let count = outer_nodes.pow(outer as u32);
    let k = T::from_usize_lossy(outer_nodes);
    let half = T::lit(0.5);
    let parts: Vec<(T, usize, usize, bool)> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut z = vec![Complex::zero(); n];
            let mut rest = idx;
            for slot in z[..outer].iter_mut().rev() {
                let j = rest % outer_nodes;
                rest /= outer_nodes;
                let theta = T::TAU() * (T::from_usize_lossy(j) + half) / k;
                *slot = Complex::from_polar(r, theta);
            }
            let clipped = Cell::new(0usize);
            let samples = Cell::new(0usize);
            let g = |t: T| {
                let mut zz = z.clone();
                zz[outer] = Complex::from_polar(r, t);
                samples.set(samples.get() + 1);
                let (v, was_clipped) = f.log_abs_clipped(&zz, tiny);
                if was_clipped {
                    clipped.set(clipped.get() + 1);
                }
                v
            };
            let res = adaptive_gk(g, T::zero(), T::TAU(), inner_tol, T::zero(), opts.max_segments);
            (res.value / T::TAU(), clipped.get(), samples.get(), res.converged)
        })
        .collect();
    let values: Vec<T> = parts.iter().map(|p| p.0).collect();
    TorusMean {
        mean: pairwise_sum(&values) / T::from_usize_lossy(count),
        clipped: parts.iter().map(|p| p.1).sum(),
        samples: parts.iter().map(|p| p.2).sum(),
        converged: parts.iter().all(|p| p.3),
    }
}

/// Compares `log|f(0)|` with torus means of `log|f|` over the radius
/// schedule and the boundary torus.
pub fn outer_test<T: Real>(f: &dyn Evaluator<T>, opts: &OuterOptions) -> Result<OuterReport<T>> {
    let n = f.n();
    if n == 0 {
        return Err(Error::InvalidArgument("evaluator over zero variables".into()));
    }
    if opts.outer_nodes == 0 {
        return Err(Error::InvalidArgument("outer node count must be positive".into()));
    }
    let lhs = f.log_abs(&vec![Complex::zero(); n]);
    if !lhs.is_finite() {
        return Err(Error::ZeroAtOrigin);
    }
    let mut radii: Vec<T> = opts.radii.iter().filter(|&&r| r > 0.0 && r < 1.0).map(|&r| T::lit(r)).collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    radii.push(T::one());
    let tol = T::lit(opts.inner_tol);
    let means: Vec<TorusMean<T>> = radii.iter().map(|&r| torus_log_mean(f, r, opts.outer_nodes, tol, opts)).collect();
    let rhs: Vec<T> = means.iter().map(|m| m.mean).collect();
    let boundary = means.last().expect("boundary radius");
    let rhs_limit = boundary.mean;
    let clipped_fraction = T::from_usize_lossy(boundary.clipped) / T::from_usize_lossy(boundary.samples.max(1));
    let check = torus_log_mean(f, T::one(), (opts.outer_nodes / 2).max(1), tol * T::lit(10.0), opts);
    let rhs_check = check.mean;
    let defect = lhs - rhs_limit;
    let tol_outer = T::lit(opts.tol_outer);
    let monotonicity_violation = rhs.windows(2).any(|w| w[1] < w[0] - T::lit(1e-9));
    let positive_defect = defect > tol_outer;
    let mut diagnostics = Vec::new();
    if monotonicity_violation {
        diagnostics.push("torus means decrease with the radius beyond 1e-9".to_string());
    }
    if !means.iter().all(|m| m.converged) {
        diagnostics.push("adaptive rule hit its segment limit".to_string());
    }
    for (r, m) in radii.iter().zip(&means) {
        if m.clipped > 0 {
            diagnostics.push(format!("r = {}: {} of {} samples clipped at the log floor", r, m.clipped, m.samples));
        }
    }
    let stable = (rhs_check - rhs_limit).abs() <= tol_outer;
    let verdict = if clipped_fraction > T::lit(opts.max_clipped_fraction) {
        diagnostics.push("clipped fraction exceeds the allowed share".to_string());
        OuterVerdict::Inconclusive
    } else if defect.abs() <= tol_outer {
        OuterVerdict::Outer
    } else if defect < -tol_outer && stable {
        OuterVerdict::NotOuter
    } else {
        if positive_defect {
            diagnostics.push("log|f(0)| exceeds the boundary mean".to_string());
        }
        if !stable {
            diagnostics.push("boundary mean changes under refinement".to_string());
        }
        OuterVerdict::Inconclusive
    };
    Ok(OuterReport {
        radii,
        lhs,
        rhs,
        rhs_limit,
        defect,
        verdict,
        clipped_fraction,
        monotonicity_violation,
        positive_defect,
        rhs_check,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{RudinImage1d, RudinOuter2d};
    use crate::multiindex::MultiIndex;

    fn cplx(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    fn poly1(coeffs: &[f64]) -> TruncatedSeries<f64> {
        let t = Truncation::new(1, coeffs.len() - 1).unwrap();
        TruncatedSeries::from_dense(t, coeffs.iter().map(|&c| cplx(c, 0.0)).collect()).unwrap()
    }

    fn h2(n: usize) -> SpaceSpec {
        SpaceSpec::HardyH2 { n }
    }

    #[test]
    fn constant_function_reaches_one() {
        for space in [h2(2), SpaceSpec::DirichletAlpha { n: 2, alpha: 1.0 }, SpaceSpec::DruryArveson { n: 2 }] {
            let f = TruncatedSeries::<f64>::one(Truncation::new(2, 0).unwrap());
            let s = approximant_distance(&f, &space, 3).unwrap();
            assert!(s.distance < 1e-14);
            assert!((s.optimal_p.constant_term() - cplx(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn z_stays_at_distance_one() {
        let f = poly1(&[0.0, 1.0]);
        for n in 0..6 {
            assert!((approximant_distance(&f, &h2(1), n).unwrap().distance - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn z_minus_half_plateau() {
        let f = poly1(&[-0.5, 1.0]);
        let d = approximant_distance(&f, &h2(1), 12).unwrap().distance;
        assert!((d * d - 0.75).abs() < 1e-3);
        let c = cyclicity_curve(&f, &h2(1), 12).unwrap();
        assert_eq!(c.verdict, CyclicityVerdict::NonCyclicConsistent);
        assert!(c.monotone);
    }

    #[test]
    fn one_minus_z_closed_form() {
        let f = poly1(&[1.0, -1.0]);
        let c = cyclicity_curve(&f, &h2(1), 10).unwrap();
        for (n, d) in c.distances.iter().enumerate() {
            assert!((d * d - 1.0 / (n as f64 + 2.0)).abs() < 1e-12, "N = {n}");
        }
        assert_eq!(c.verdict, CyclicityVerdict::CyclicConsistent);
    }

    #[test]
    fn z1_minus_two_is_cyclic() {
        let t = Truncation::new(2, 1).unwrap();
        let f = TruncatedSeries::from_terms(
            t,
            [(MultiIndex::zero(2), cplx(-2.0, 0.0)), (MultiIndex::unit(2, 0), cplx(1.0, 0.0))],
        )
        .unwrap();
        let c = cyclicity_curve(&f, &h2(2), 8).unwrap();
        assert!(c.monotone);
        assert!(c.distances[8] < 1e-2);
        assert_eq!(c.verdict, CyclicityVerdict::CyclicConsistent);
    }

    #[test]
    fn scalar_multiple_leaves_distance() {
        let f = poly1(&[0.3, -1.0, 0.25]);
        let c = cplx(-1.5, 2.0);
        let a = approximant_distance(&f, &h2(1), 6).unwrap();
        let b = approximant_distance(&f.scale(c), &h2(1), 6).unwrap();
        assert!((a.distance - b.distance).abs() < 1e-12);
        assert!(a.optimal_p.max_abs_diff(&b.optimal_p.scale(c)) < 1e-12);
    }

    #[test]
    fn normal_equation_residual_small() {
        let f = poly1(&[1.0, 0.4, -0.3]);
        let s = approximant_distance(&f, &SpaceSpec::DirichletAlpha { n: 1, alpha: 1.0 }, 8).unwrap();
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn exp_zero_is_one() {
        let r = exp_is_cyclic_check::<f64>(&[cplx(0.0, 0.0)], &h2(1), 4, None).unwrap();
        assert!(r.curve.distances.iter().all(|&d| d < 1e-14));
    }

    #[test]
    fn exp_check_rejects_small_cap() {
        assert!(matches!(
            exp_is_cyclic_check::<f64>(&[cplx(1.0, 0.0)], &h2(1), 4, Some(5)),
            Err(Error::InsufficientCap { .. })
        ));
    }

    #[test]
    fn exp_truncation_bounds_distance() {
        let r = exp_is_cyclic_check::<f64>(&[cplx(1.0, 0.0)], &h2(1), 8, None).unwrap();
        assert!(r.tail_norm < 1e-10);
        assert!(r.curve.distances[8] <= r.truncation_bound + 1e-12);
        assert!(r.cosine_similarity > 0.99);
    }

    #[test]
    fn outer_constant() {
        let f = TruncatedSeries::constant(Truncation::new(2, 0).unwrap(), cplx(2.0, -1.0));
        let opts = OuterOptions { outer_nodes: 8, ..Default::default() };
        let r = outer_test(&f, &opts).unwrap();
        assert!(r.defect.abs() < 1e-12);
        assert_eq!(r.verdict, OuterVerdict::Outer);
    }

    #[test]
    fn outer_rejects_zero_at_origin() {
        let f = poly1(&[0.0, 1.0]);
        assert!(matches!(outer_test(&f, &OuterOptions::default()), Err(Error::ZeroAtOrigin)));
    }

    #[test]
    fn rudin_image_is_not_outer() {
        let r = outer_test::<f64>(&RudinImage1d, &OuterOptions::default()).unwrap();
        assert!((r.lhs + 3.0).abs() < 1e-12);
        assert!((r.rhs_limit + 1.0).abs() < 1e-6, "{:?}", r);
        assert!((r.defect + 2.0).abs() < 1e-3);
        assert_eq!(r.verdict, OuterVerdict::NotOuter);
        assert!(!r.monotonicity_violation);
    }

    #[test]
    fn rudin_outer_is_outer() {
        let r = outer_test::<f64>(&RudinOuter2d, &OuterOptions::default()).unwrap();
        assert!((r.lhs + 1.0).abs() < 1e-12);
        assert!(r.defect.abs() < 1e-3, "{:?}", r);
        assert_eq!(r.verdict, OuterVerdict::Outer);
    }

    #[test]
    fn boundary_zero_polynomial_is_outer() {
        // 1 − z has a zero on the circle yet is outer
        let f = poly1(&[1.0, -1.0]);
        let r = outer_test(&f, &OuterOptions::default()).unwrap();
        assert_eq!(r.verdict, OuterVerdict::Outer, "{:?}", r);
    }

    #[test]
    fn interior_zero_is_not_outer() {
        // z − 1/2: log|f(0)| = log(1/2) < 0 = boundary mean
        let f = poly1(&[-0.5, 1.0]);
        let r = outer_test(&f, &OuterOptions::default()).unwrap();
        assert!((r.defect - 0.5f64.ln()).abs() < 1e-6);
        assert_eq!(r.verdict, OuterVerdict::NotOuter);
    }
}
