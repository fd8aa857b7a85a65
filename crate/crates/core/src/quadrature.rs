//! Torus quadrature: uniform tensor trapezoid rules on `r𝕋ⁿ`, `p`-means,
//! and an adaptive Gauss–Kronrod rule for periodic integrands with
//! integrable singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Cplx, Real};
use crate::series::TruncatedSeries;

/// Tensor trapezoid rule with nodes `r·e^{2πi(j + s)/K}` per variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureRule<T: Real> {
    pub n: usize,
    pub points_per_circle: usize,
    pub radius: T,
    /// Node shift `s` as a fraction of the angular step (0 by default).
    pub shift: T,
}

impl<T: Real> QuadratureRule<T> {
    pub fn new(n: usize, points_per_circle: usize, radius: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs n >= 1".into()));
        }
        if !points_per_circle.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "points per circle must be a power of two, got {points_per_circle}"
            )));
        }
        if !(radius > T::zero() && radius <= T::one()) {
            return Err(Error::InvalidArgument(format!("radius {radius} outside (0, 1]")));
        }
        Ok(QuadratureRule { n, points_per_circle, radius, shift: T::zero() })
    }

    /// Rule that is exact on trig polynomials of per-variable degree
    /// `≤ 2·cap`: the smallest power of two `K > 2·cap`.
    pub fn for_cap(n: usize, cap: usize, radius: T) -> Result<Self> {
        let k = (2 * cap + 1).next_power_of_two().max(4);
        Self::new(n, k, radius)
    }

    pub fn with_shift(mut self, shift: T) -> Self {
        self.shift = shift;
        self
    }

    pub fn with_radius(self, radius: T) -> Result<Self> {
        Ok(Self::new(self.n, self.points_per_circle, radius)?.with_shift(self.shift))
    }

    pub fn node_count(&self) -> usize {
        self.points_per_circle.pow(self.n as u32)
    }

    /// The `K` points on one circle.
    pub fn circle(&self) -> Vec<Cplx<T>> {
        let k = T::from_usize_lossy(self.points_per_circle);
        (0..self.points_per_circle)
            .map(|j| {
                let theta = T::TAU() * (T::from_usize_lossy(j) + self.shift) / k;
                Complex::from_polar(self.radius, theta)
            })
            .collect()
    }

    /// Node with flat tensor index `idx` (first variable varies slowest).
    pub fn node(&self, circle: &[Cplx<T>], mut idx: usize, out: &mut [Cplx<T>]) {
        for slot in out.iter_mut().rev() {
            *slot = circle[idx % self.points_per_circle];
            idx /= self.points_per_circle;
        }
    }

    /// Values of `g` at every node, in tensor order.
    pub fn sample<V: Send>(&self, g: impl Fn(&[Cplx<T>]) -> V + Sync) -> Vec<V> {
        let circle = self.circle();
        (0..self.node_count())
            .into_par_iter()
            .map_init(
                || vec![Complex::new(T::zero(), T::zero()); self.n],
                |buf, idx| {
                    self.node(&circle, idx, buf);
                    g(buf)
                },
            )
            .collect()
    }

    /// `K^{-n} Σ_nodes g(node)` with pairwise summation.
    pub fn mean(&self, g: impl Fn(&[Cplx<T>]) -> T + Sync) -> T {
        let values = self.sample(g);
        pairwise_sum(&values) / T::from_usize_lossy(values.len())
    }

    /// Discrete `M_p(r, f) = (K^{-n} Σ |f(node)|^p)^{1/p}`.
    pub fn p_mean(&self, f: &TruncatedSeries<T>, p: T) -> Result<T> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch(format!("rule over n = {} for series over n = {}", self.n, f.n())));
        }
        if !(p > T::zero()) {
            return Err(Error::InvalidArgument(format!("p = {p} must be positive")));
        }
        let two = T::lit(2.0);
        let m = self.mean(|z| {
            let v = f.eval(z).norm_sqr();
            if p == two {
                v
            } else {
                v.powf(p / two)
            }
        });
        Ok(m.powf(T::one() / p))
    }

    /// `max |f|` over the nodes: a lower bound for the sup norm on the
    /// closed polydisc of this radius.
    pub fn sup_modulus(&self, f: &TruncatedSeries<T>) -> SupEstimate<T> {
        let values = self.sample(|z| f.eval(z).norm());
        SupEstimate { value: values.into_iter().fold(T::zero(), T::max), lower_bound: true }
    }

    /// `min |f|` over the nodes.
    pub fn min_modulus(&self, f: &TruncatedSeries<T>) -> T {
        self.sample(|z| f.eval(z).norm()).into_iter().fold(T::infinity(), T::min)
    }
}

/// Surrogate for `‖f‖_∞` from finitely many nodes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupEstimate<T: Real> {
    pub value: T,
    pub lower_bound: bool,
}

/// `p`-means over a radius schedule.
#[derive(Clone, Debug, Serialize)]
pub struct PMeanSchedule<T: Real> {
    pub p: T,
    pub radii: Vec<T>,
    pub values: Vec<T>,
    /// Value at the largest radius; stands in for the supremum over `r`.
    pub sup_estimate: T,
    /// Values are nondecreasing in `r` (up to `1e−12` relative slack).
    pub monotone: bool,
}

/// `M_p(r, f)` for each radius (sorted ascending) with `K` nodes per circle.
pub fn p_mean_schedule<T: Real>(f: &TruncatedSeries<T>, p: T, radii: &[T], points_per_circle: usize) -> Result<PMeanSchedule<T>> {
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    if radii.is_empty() {
        return Err(Error::InvalidArgument("empty radius schedule".into()));
    }
    let values = radii
        .iter()
        .map(|&r| QuadratureRule::new(f.n(), points_per_circle, r)?.p_mean(f, p))
        .collect::<Result<Vec<T>>>()?;
    let slack = T::lit(1e-12);
    let monotone = values.windows(2).all(|w| w[1] >= w[0] - slack * w[0].abs().max(T::one()));
    Ok(PMeanSchedule { p, sup_estimate: *values.last().unwrap(), radii, values, monotone })
}

/// Default radius schedule `r_k = 1 − 2^{−k}`, `k = 1..=count`.
pub fn default_radii<T: Real>(count: usize) -> Vec<T> {
    (1..=count).map(|k| T::one() - T::lit(2f64.powi(-(k as i32)))).collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    seq: usize,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn gk15<T: Real>(g: &impl Fn(T) -> T, a: T, b: T, seq: usize) -> Segment<T> {
    let half = (b - a) * T::lit(0.5);
    let center = (a + b) * T::lit(0.5);
    let fc = g(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = g(center - dx) + g(center + dx);
        kron = kron + s * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * T::lit(WG[j / 2]);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, error, seq }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AdaptiveIntegral<T: Real> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Globally adaptive 15-point Gauss–Kronrod integration of `g` on `[a, b]`:
/// bisects the segment with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)` or `max_segments`.
pub fn adaptive_gk<T: Real>(g: impl Fn(T) -> T, a: T, b: T, abs_tol: T, rel_tol: T, max_segments: usize) -> AdaptiveIntegral<T> {
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let first = gk15(&g, a, b, seq);
    let mut evaluations = 15;
    let mut total_err = first.error;
    let mut total_val = first.value;
    heap.push(first);
    let mut converged = false;
    while heap.len() < max_segments {
        if total_err <= abs_tol.max(rel_tol * total_val.abs()) {
            converged = true;
            break;
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            break;
        }
        seq += 1;
        let left = gk15(&g, worst.a, mid, seq);
        seq += 1;
        let right = gk15(&g, mid, worst.b, seq);
        evaluations += 30;
        total_err = total_err - worst.error + left.error + right.error;
        total_val = total_val - worst.value + left.value + right.value;
        heap.push(left);
        heap.push(right);
    }
    if !converged && total_err <= abs_tol.max(rel_tol * total_val.abs()) {
        converged = true;
    }
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let vals: Vec<T> = segs.iter().map(|s| s.value).collect();
    let errs: Vec<T> = segs.iter().map(|s| s.error).collect();
    AdaptiveIntegral { value: pairwise_sum(&vals), error_estimate: pairwise_sum(&errs), evaluations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::Truncation;
    use crate::scalar::cplx;

    fn one_plus_z(cap: usize) -> TruncatedSeries<f64> {
        let mut c = vec![cplx(0.0, 0.0); cap + 1];
        c[0] = cplx(1.0, 0.0);
        c[1] = cplx(1.0, 0.0);
        TruncatedSeries::from_dense(Truncation::new(1, cap).unwrap(), c).unwrap()
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(QuadratureRule::<f64>::new(1, 12, 0.5).is_err());
        assert!(QuadratureRule::<f64>::new(1, 16, 1.5).is_err());
        assert!(QuadratureRule::<f64>::new(0, 16, 0.5).is_err());
    }

    #[test]
    fn constant_p_mean() {
        let c = TruncatedSeries::<f64>::constant(Truncation::new(2, 2).unwrap(), cplx(-3.0, 4.0));
        for p in [0.5, 1.0, 2.0, 4.0] {
            for r in [0.3, 0.9] {
                let rule = QuadratureRule::new(2, 8, r).unwrap();
                assert!((rule.p_mean(&c, p).unwrap() - 5.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn two_mean_near_boundary() {
        let f = one_plus_z(2);
        let rule = QuadratureRule::for_cap(1, 2, 0.999).unwrap();
        let m = rule.p_mean(&f, 2.0).unwrap();
        assert!((m - 2f64.sqrt()).abs() < 3e-3);
    }

    #[test]
    fn four_mean_of_one_plus_z() {
        // ∫|1+e^{iθ}|⁴ dθ/2π = 1 + 4 + 1 = 6 (binomial expansion)
        let f = one_plus_z(2);
        let rule = QuadratureRule::new(1, 16, 1.0).unwrap();
        assert!((rule.p_mean(&f, 4.0).unwrap() - 6f64.powf(0.25)).abs() < 1e-13);
        let near = rule.with_radius(0.999).unwrap().p_mean(&f, 4.0).unwrap();
        assert!((near - 6f64.powf(0.25)).abs() < 1e-3);
    }

    #[test]
    fn schedule_reports_monotone() {
        let f = one_plus_z(3);
        let s = p_mean_schedule(&f, 3.0, &[0.5, 0.9, 0.99], 16).unwrap();
        assert!(s.monotone);
        assert_eq!(s.sup_estimate, s.values[2]);
    }

    #[test]
    fn gauss_kronrod_handles_log_singularity() {
        // ∫₀^{2π} log|1 − e^{iθ}| dθ = 0
        let r = adaptive_gk(|t: f64| (2.0 * (0.5 * t).sin().abs()).ln(), 0.0, std::f64::consts::TAU, 1e-11, 0.0, 4000);
        assert!(r.value.abs() < 1e-9, "{:?}", r);
        let s = adaptive_gk(|t: f64| t.sin().powi(2), 0.0, std::f64::consts::PI, 1e-13, 0.0, 100);
        assert!((s.value - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
        assert!(s.converged);
    }

    #[test]
    fn default_schedule() {
        let r: Vec<f64> = default_radii(3);
        assert_eq!(r, vec![0.5, 0.75, 0.875]);
    }
}
