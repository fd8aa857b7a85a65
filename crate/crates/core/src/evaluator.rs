//! Pointwise evaluators: truncated series, exponentials of polynomials,
//! closed-form built-ins and restrictions to complex lines.


use crate::scalar::{Cplx, Real};
use crate::series::TruncatedSeries;

/// Function evaluable on the closed polydisc minus a null set.
pub trait Evaluator<T: Real>: Sync {
    fn n(&self) -> usize;
    fn eval(&self, z: &[Cplx<T>]) -> Cplx<T>;
    /// `log|f(z)|`; closed forms override this to avoid underflow.
    fn log_abs(&self, z: &[Cplx<T>]) -> T {
        self.eval(z).norm().ln()
    }

    /// `log|f(z)|` clipped below at `log(floor)`, with a clipping flag.
    /// Closed forms clip only non-finite values.
    fn log_abs_clipped(&self, z: &[Cplx<T>], floor: T) -> (T, bool) {
        let v = self.eval(z).norm();
        if v.is_finite() && v >= floor {
            (v.ln(), false)
        } else {
            (floor.ln(), true)
        }
    }
}

fn clip_exact<T: Real>(v: T, floor: T) -> (T, bool) {
    if v.is_finite() {
        (v, false)
    } else {
        (floor.ln(), true)
    }
}

impl<T: Real> Evaluator<T> for TruncatedSeries<T> {
    fn n(&self) -> usize {
        TruncatedSeries::n(self)
    }

    fn eval(&self, z: &[Cplx<T>]) -> Cplx<T> {
        TruncatedSeries::eval(self, z)
    }
}

/// `exp((z₁ + z₂ + 2) / (z₁ + z₂ − 2))` on the bidisc.
#[derive(Clone, Copy, Debug, Default)]
pub struct RudinOuter2d;

/// `exp((z + 3) / (z − 1))` on the disc.
#[derive(Clone, Copy, Debug, Default)]
pub struct RudinImage1d;

impl<T: Real> Evaluator<T> for RudinOuter2d {
    fn n(&self) -> usize {
        2
    }

    fn eval(&self, z: &[Cplx<T>]) -> Cplx<T> {
        let two = T::lit(2.0);
        let s = z[0] + z[1];
        ((s + two) / (s - two)).exp()
    }

    fn log_abs(&self, z: &[Cplx<T>]) -> T {
        let two = T::lit(2.0);
        let s = z[0] + z[1];
        ((s + two) / (s - two)).re
    }

    fn log_abs_clipped(&self, z: &[Cplx<T>], floor: T) -> (T, bool) {
        clip_exact(self.log_abs(z), floor)
    }
}

impl<T: Real> Evaluator<T> for RudinImage1d {
    fn n(&self) -> usize {
        1
    }

    fn eval(&self, z: &[Cplx<T>]) -> Cplx<T> {
        ((z[0] + T::lit(3.0)) / (z[0] - T::one())).exp()
    }

    fn log_abs(&self, z: &[Cplx<T>]) -> T {
        ((z[0] + T::lit(3.0)) / (z[0] - T::one())).re
    }

    fn log_abs_clipped(&self, z: &[Cplx<T>], floor: T) -> (T, bool) {
        clip_exact(self.log_abs(z), floor)
    }
}

/// Closed-form built-ins by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedEvaluator {
    RudinOuter2d,
    RudinImage1d,
}

impl NamedEvaluator {
    pub fn lookup(name: &str) -> Option<NamedEvaluator> {
        match name {
            "rudin-outer-2d" => Some(NamedEvaluator::RudinOuter2d),
            "rudin-image-1d" => Some(NamedEvaluator::RudinImage1d),
            _ => None,
        }
    }

    pub fn as_evaluator<T: Real>(&self) -> &'static dyn Evaluator<T> {
        match self {
            NamedEvaluator::RudinOuter2d => &RudinOuter2d,
            NamedEvaluator::RudinImage1d => &RudinImage1d,
        }
    }
}

/// `exp(p(z))` for a polynomial `p`.
#[derive(Clone, Debug)]
pub struct ExpPolynomial<T: Real> {
    pub p: TruncatedSeries<T>,
}

impl<T: Real> Evaluator<T> for ExpPolynomial<T> {
    fn n(&self) -> usize {
        self.p.n()
    }

    fn eval(&self, z: &[Cplx<T>]) -> Cplx<T> {
        self.p.eval(z).exp()
    }

    fn log_abs(&self, z: &[Cplx<T>]) -> T {
        self.p.eval(z).re
    }

    fn log_abs_clipped(&self, z: &[Cplx<T>], floor: T) -> (T, bool) {
        clip_exact(self.log_abs(z), floor)
    }
}

/// Closure-backed evaluator.
pub struct FnEvaluator<F> {
    pub n: usize,
    pub f: F,
}

impl<T: Real, F: Fn(&[Cplx<T>]) -> Cplx<T> + Sync> Evaluator<T> for FnEvaluator<F> {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &[Cplx<T>]) -> Cplx<T> {
        (self.f)(z)
    }
}

/// `λ ↦ F(λ z)` as a one-variable evaluator.
pub struct RayRestriction<'a, T: Real> {
    pub f: &'a dyn Evaluator<T>,
    pub direction: Vec<Cplx<T>>,
}

impl<T: Real> Evaluator<T> for RayRestriction<'_, T> {
    fn n(&self) -> usize {
        1
    }

    fn eval(&self, z: &[Cplx<T>]) -> Cplx<T> {
        let p: Vec<Cplx<T>> = self.direction.iter().map(|&d| d * z[0]).collect();
        self.f.eval(&p)
    }
}
