//! Dense truncated multivariate power series with complex coefficients.

use std::fmt;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::{MultiIndex, Truncation};
use crate::scalar::{Cplx, Real};

/// `Σ_{|α| ≤ N} f̂(α) z^α`, stored densely in graded-lex order.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<T: Real> {
    trunc: Truncation,
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> TruncatedSeries<T> {
    pub fn zero(trunc: Truncation) -> Self {
        TruncatedSeries { trunc, coeffs: vec![Complex::zero(); trunc.size()] }
    }

    pub fn constant(trunc: Truncation, c: Cplx<T>) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    pub fn one(trunc: Truncation) -> Self {
        Self::constant(trunc, Complex::one())
    }

    /// `c · z^α`; the zero series when `|α|` exceeds the cap.
    pub fn monomial(trunc: Truncation, alpha: &MultiIndex, c: Cplx<T>) -> Result<Self> {
        check_n(&trunc, alpha)?;
        let mut s = Self::zero(trunc);
        if let Some(k) = trunc.rank(alpha.entries()) {
            s.coeffs[k] = c;
        }
        Ok(s)
    }

    /// The coordinate function `z_i` (0-based `i`).
    pub fn variable(trunc: Truncation, i: usize) -> Result<Self> {
        if i >= trunc.n {
            return Err(Error::DimensionMismatch(format!("variable {} of {}", i + 1, trunc.n)));
        }
        Self::monomial(trunc, &MultiIndex::unit(trunc.n, i), Complex::one())
    }

    /// `w·z = Σ wᵢ zᵢ`.
    pub fn linear(trunc: Truncation, w: &[Cplx<T>]) -> Result<Self> {
        if w.len() != trunc.n {
            return Err(Error::DimensionMismatch(format!("point of length {} for n = {}", w.len(), trunc.n)));
        }
        let mut s = Self::zero(trunc);
        if trunc.degree_cap >= 1 {
            for (i, &wi) in w.iter().enumerate() {
                let k = trunc.rank(MultiIndex::unit(trunc.n, i).entries()).unwrap();
                s.coeffs[k] = wi;
            }
        }
        Ok(s)
    }

    /// Truncation of `e^{w·z}`: coefficients `w^α / α!`.
    pub fn exp_linear(trunc: Truncation, w: &[Cplx<T>]) -> Result<Self> {
        if w.len() != trunc.n {
            return Err(Error::DimensionMismatch(format!("point of length {} for n = {}", w.len(), trunc.n)));
        }
        let basis = trunc.basis();
        let coeffs = basis
            .iter()
            .map(|a| {
                let mut c: Cplx<T> = Complex::one();
                for (i, &e) in a.entries().iter().enumerate() {
                    for j in 1..=e {
                        c = c * w[i] / T::from_u32(j).unwrap();
                    }
                }
                c
            })
            .collect();
        Ok(TruncatedSeries { trunc, coeffs })
    }

    /// Builds a series from explicit terms; rejects indices above the cap.
    pub fn from_terms<I>(trunc: Truncation, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Cplx<T>)>,
    {
        let mut s = Self::zero(trunc);
        for (alpha, c) in terms {
            check_n(&trunc, &alpha)?;
            let k = trunc
                .rank(alpha.entries())
                .ok_or(Error::DegreeOverflow { degree: alpha.degree(), cap: trunc.degree_cap })?;
            s.coeffs[k] = s.coeffs[k] + c;
        }
        Ok(s)
    }

    /// Wraps a coefficient vector laid out in the graded-lex basis order.
    pub fn from_dense(trunc: Truncation, coeffs: Vec<Cplx<T>>) -> Result<Self> {
        if coeffs.len() != trunc.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for basis of size {}",
                coeffs.len(),
                trunc.size()
            )));
        }
        Ok(TruncatedSeries { trunc, coeffs })
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn n(&self) -> usize {
        self.trunc.n
    }

    pub fn cap(&self) -> usize {
        self.trunc.degree_cap
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cplx<T>> {
        self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Cplx<T> {
        if alpha.n() != self.n() {
            return Complex::zero();
        }
        self.trunc.rank(alpha.entries()).map_or(Complex::zero(), |k| self.coeffs[k])
    }

    pub fn constant_term(&self) -> Cplx<T> {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Highest total degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        let last = self.coeffs.iter().rposition(|c| !c.is_zero())?;
        Some(self.trunc.basis()[last].degree())
    }

    /// Nonzero terms as owned pairs.
    pub fn term_list(&self) -> Vec<(MultiIndex, Cplx<T>)> {
        let basis = self.trunc.basis();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, &c)| (basis[k].clone(), c))
            .collect()
    }

    /// Re-expresses the series at another cap, discarding degrees above it.
    pub fn with_cap(&self, degree_cap: usize) -> Self {
        if degree_cap == self.cap() {
            return self.clone();
        }
        let target = self.trunc.with_cap(degree_cap);
        let mut out = Self::zero(target);
        let keep = target.size().min(self.coeffs.len());
        out.coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        out
    }

    /// Degree-`k` homogeneous component.
    pub fn homogeneous_part(&self, k: usize) -> Self {
        let mut out = Self::zero(self.trunc);
        if k <= self.cap() {
            let (lo, hi) = (self.trunc.offset(k), self.trunc.offset(k + 1));
            out.coeffs[lo..hi].copy_from_slice(&self.coeffs[lo..hi]);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.trunc.check_same(&other.trunc)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.trunc.check_same(&other.trunc)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Cplx<T>, Cplx<T>) -> Cplx<T>) -> Self {
        TruncatedSeries {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: Cplx<T>) -> Self {
        TruncatedSeries { trunc: self.trunc, coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    pub fn scale_real(&self, c: T) -> Self {
        TruncatedSeries { trunc: self.trunc, coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    /// Truncated Cauchy product. Contributions to each output coefficient
    /// are accumulated in graded-lex order of the left factor's index.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.trunc.check_same(&other.trunc)?;
        let t = self.trunc;
        let cap = t.degree_cap;
        let mut out = vec![Complex::zero(); self.coeffs.len()];
        if t.n == 1 {
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, &b) in other.coeffs[..=cap - i].iter().enumerate() {
                    out[i + j] = out[i + j] + a * b;
                }
            }
            return Ok(TruncatedSeries { trunc: t, coeffs: out });
        }
        let basis = t.basis();
        for d in 0..=cap {
            let limit = t.offset(cap - d + 1);
            for i in t.offset(d)..t.offset(d + 1) {
                let a = self.coeffs[i];
                if a.is_zero() {
                    continue;
                }
                let beta = basis[i].entries();
                for j in 0..limit {
                    let b = other.coeffs[j];
                    if b.is_zero() {
                        continue;
                    }
                    let k = t.rank_of_sum(beta, basis[j].entries()).expect("degree within cap");
                    out[k] = out[k] + a * b;
                }
            }
        }
        Ok(TruncatedSeries { trunc: t, coeffs: out })
    }

    /// Product with a monomial `c z^α` (a shift), truncating at the cap.
    pub fn mul_monomial(&self, alpha: &MultiIndex) -> Self {
        let t = self.trunc;
        let basis = t.basis();
        let mut out = vec![Complex::zero(); self.coeffs.len()];
        for (j, &b) in self.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            if let Some(k) = t.rank_of_sum(alpha.entries(), basis[j].entries()) {
                out[k] = b;
            }
        }
        TruncatedSeries { trunc: t, coeffs: out }
    }

    /// `Σ_{k ≤ N} f^k / k!` for a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstant);
        }
        let mut acc = Self::one(self.trunc);
        let mut power = Self::one(self.trunc);
        for k in 1..=self.cap() {
            power = power.mul(self)?.scale_real(T::one() / T::from_usize_lossy(k));
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc)
    }

    /// Reciprocal in the truncated algebra; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.constant_term();
        if a0.is_zero() {
            return Err(Error::WeightVanishesAtOrigin);
        }
        let inv0 = a0.inv();
        // 1/a = (1/a₀) Σ (−u)^k with u = (a − a₀)/a₀
        let mut u = self.scale(-inv0);
        u.coeffs[0] = Complex::zero();
        let mut acc = Self::one(self.trunc);
        let mut power = Self::one(self.trunc);
        for _ in 1..=self.cap() {
            power = power.mul(&u)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(inv0))
    }

    /// `f(b₁, …, bₙ)` in the truncated algebra of the `bᵢ` (nested Horner).
    pub fn compose(&self, b: &[TruncatedSeries<T>]) -> Result<Self> {
        if b.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "composition needs {} inner series, got {}",
                self.n(),
                b.len()
            )));
        }
        let target = b[0].trunc;
        for bi in b {
            target.check_same(&bi.trunc)?;
        }
        Ok(compose_terms(self.trunc, &self.coeffs, b, target))
    }

    /// `Σ_α f̂(α) z^α` at a point of `ℂⁿ`.
    pub fn eval(&self, z: &[Cplx<T>]) -> Cplx<T> {
        assert_eq!(z.len(), self.n(), "evaluation point dimension");
        if self.n() == 1 {
            return self.coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z[0] + c);
        }
        let basis = self.trunc.basis();
        let cap = self.cap();
        // powers[i][k] = z_i^k
        let powers: Vec<Vec<Cplx<T>>> = z
            .iter()
            .map(|&zi| {
                let mut v = Vec::with_capacity(cap + 1);
                let mut p = Complex::one();
                for _ in 0..=cap {
                    v.push(p);
                    p = p * zi;
                }
                v
            })
            .collect();
        let mut acc = Complex::zero();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut m = c;
            for (i, &e) in basis[k].entries().iter().enumerate() {
                m = m * powers[i][e as usize];
            }
            acc = acc + m;
        }
        acc
    }

    /// Largest coefficientwise modulus difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_l2(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> TruncatedSeries<U> {
        TruncatedSeries {
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy())))
                .collect(),
        }
    }
}

fn check_n(trunc: &Truncation, alpha: &MultiIndex) -> Result<()> {
    if alpha.n() != trunc.n {
        return Err(Error::DimensionMismatch(format!("index of length {} for n = {}", alpha.n(), trunc.n)));
    }
    Ok(())
}

fn compose_terms<T: Real>(
    src: Truncation,
    coeffs: &[Cplx<T>],
    b: &[TruncatedSeries<T>],
    target: Truncation,
) -> TruncatedSeries<T> {
    let top = match coeffs.iter().rposition(|c| !c.is_zero()) {
        None => return TruncatedSeries::zero(target),
        Some(k) => src.basis()[k].degree(),
    };
    if src.n == 1 {
        let mut acc = TruncatedSeries::constant(target, coeffs[top]);
        for k in (0..top).rev() {
            acc = acc.mul(&b[0]).expect("shared truncation");
            acc.coeffs[0] = acc.coeffs[0] + coeffs[k];
        }
        return acc;
    }
    // f = Σ_k z₁^k g_k(z₂, …, zₙ)
    let rest = Truncation { n: src.n - 1, degree_cap: src.degree_cap };
    let mut slices: Vec<Vec<Cplx<T>>> = vec![vec![Complex::zero(); rest.size()]; top + 1];
    let basis = src.basis();
    for (k, &c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = basis[k].entries();
        let pos = rest.rank(&e[1..]).expect("sub-index within cap");
        slices[e[0] as usize][pos] = c;
    }
    let inner = &b[1..];
    let mut acc = compose_terms(rest, &slices[top], inner, target);
    for k in (0..top).rev() {
        acc = acc.mul(&b[0]).expect("shared truncation");
        let gk = compose_terms(rest, &slices[k], inner, target);
        acc = acc.add(&gk).expect("shared truncation");
    }
    acc
}

impl<T: Real> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        self.scale_real(-T::one())
    }
}

impl<T: Real> fmt::Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries(n={}, cap={}, {})", self.n(), self.cap(), self)
    }
}

fn fmt_coeff<T: Real>(c: Cplx<T>) -> String {
    if c.im.is_zero() {
        format!("{}", c.re)
    } else if c.re.is_zero() {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im.to_f64_lossy())
    }
}

impl<T: Real> fmt::Display for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.term_list();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = terms
            .iter()
            .map(|(a, c)| {
                if a.is_zero() {
                    fmt_coeff(*c)
                } else if *c == Complex::one() {
                    a.label()
                } else {
                    format!("{}*{}", fmt_coeff(*c), a.label())
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn t(n: usize, cap: usize) -> Truncation {
        Truncation::new(n, cap).unwrap()
    }

    fn poly1(cap: usize, c: &[f64]) -> TruncatedSeries<f64> {
        let mut v = vec![Complex::zero(); cap + 1];
        for (k, &x) in c.iter().enumerate() {
            v[k] = Complex::new(x, 0.0);
        }
        TruncatedSeries::from_dense(t(1, cap), v).unwrap()
    }

    #[test]
    fn product_of_conjugate_binomials() {
        let f = poly1(2, &[1.0, 1.0]);
        let g = poly1(2, &[1.0, -1.0]);
        let p = f.mul(&g).unwrap();
        assert_eq!(p, poly1(2, &[1.0, 0.0, -1.0]));
    }

    #[test]
    fn product_at_truncation_boundary_vanishes() {
        let cap = 5;
        let zn = TruncatedSeries::<f64>::monomial(t(1, cap), &MultiIndex::new(vec![5]).unwrap(), Complex::one())
            .unwrap();
        let z = TruncatedSeries::variable(t(1, cap), 0).unwrap();
        assert!(zn.mul(&z).unwrap().is_zero());
    }

    #[test]
    fn squared_exponential_partial_sum() {
        let e = poly1(3, &[1.0, 1.0, 0.5, 1.0 / 6.0]);
        let sq = e.mul(&e).unwrap();
        // oracle: coefficients of e^{2z} are 2^k / k!
        let expect = [1.0, 2.0, 2.0, 4.0 / 3.0];
        for (k, &x) in expect.iter().enumerate() {
            assert!((sq.coeffs()[k].re - x).abs() < 1e-15);
        }
    }

    #[test]
    fn mismatched_product_is_error() {
        let a = TruncatedSeries::<f64>::one(t(1, 3));
        let b = TruncatedSeries::<f64>::one(t(2, 3));
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let z = TruncatedSeries::<f64>::zero(t(2, 4));
        assert_eq!(z.exp().unwrap(), TruncatedSeries::one(t(2, 4)));
    }

    #[test]
    fn exp_of_linear_form_two_vars() {
        let tr = t(2, 2);
        let f = TruncatedSeries::<f64>::linear(tr, &[cplx(1.0, 0.0), cplx(1.0, 0.0)]).unwrap();
        let e = f.exp().unwrap();
        let expect = [1.0, 1.0, 1.0, 0.5, 1.0, 0.5];
        for (k, &x) in expect.iter().enumerate() {
            assert!((e.coeffs()[k] - cplx::<f64>(x, 0.0)).norm() < 1e-15, "k={k}");
        }
        assert!(e.max_abs_diff(&TruncatedSeries::exp_linear(tr, &[cplx(1.0, 0.0), cplx(1.0, 0.0)]).unwrap()) < 1e-15);
    }

    #[test]
    fn exp_times_exp_of_negation_is_one() {
        let tr = t(2, 8);
        let f = TruncatedSeries::<f64>::from_terms(
            tr,
            [
                (MultiIndex::new(vec![1, 0]).unwrap(), cplx(0.3, -0.2)),
                (MultiIndex::new(vec![1, 1]).unwrap(), cplx(0.5, 0.1)),
                (MultiIndex::new(vec![0, 3]).unwrap(), cplx(-0.7, 0.0)),
            ],
        )
        .unwrap();
        let p = f.exp().unwrap().mul(&(-&f).exp().unwrap()).unwrap();
        assert!(p.max_abs_diff(&TruncatedSeries::one(tr)) < 1e-12);
    }

    #[test]
    fn exp_rejects_constant_term() {
        let f = TruncatedSeries::<f64>::one(t(1, 3));
        assert_eq!(f.exp(), Err(Error::NonzeroConstant));
    }

    #[test]
    fn compose_coordinate_extraction() {
        let f = TruncatedSeries::<f64>::variable(t(1, 4), 0).unwrap();
        let z2 = TruncatedSeries::monomial(t(1, 4), &MultiIndex::new(vec![2]).unwrap(), Complex::one()).unwrap();
        assert_eq!(f.compose(&[z2.clone()]).unwrap(), z2);
    }

    #[test]
    fn compose_into_diagonal_map() {
        let f = TruncatedSeries::<f64>::monomial(t(2, 2), &MultiIndex::new(vec![1, 1]).unwrap(), Complex::one())
            .unwrap();
        let half = poly1(4, &[0.5, 0.5]);
        let g = f.compose(&[half.clone(), half]).unwrap();
        // (1+z)²/4
        assert!(g.max_abs_diff(&poly1(4, &[0.25, 0.5, 0.25])) < 1e-16);
    }

    #[test]
    fn compose_exponential_with_scaling() {
        let e = TruncatedSeries::<f64>::exp_linear(t(1, 4), &[cplx(1.0, 0.0)]).unwrap();
        let half_z = poly1(4, &[0.0, 0.5]);
        let g = e.compose(&[half_z]).unwrap();
        for k in 0..=4u32 {
            let oracle = 1.0 / (crate::scalar::factorial::<f64>(k) * 2f64.powi(k as i32));
            assert!((g.coeffs()[k as usize].re - oracle).abs() < 1e-16);
        }
    }

    #[test]
    fn compose_variable_count_mismatch() {
        let f = TruncatedSeries::<f64>::one(t(2, 2));
        assert!(f.compose(&[poly1(2, &[0.0, 1.0])]).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let f = poly1(3, &[1.0, 1.0]);
        assert_eq!(f.eval(&[cplx(0.5, 0.0)]), cplx(1.5, 0.0));
        let m = TruncatedSeries::<f64>::monomial(t(2, 3), &MultiIndex::new(vec![1, 2]).unwrap(), Complex::one())
            .unwrap();
        assert_eq!(m.eval(&[cplx(0.0, 0.0), cplx(0.7, 0.2)]), Complex::zero());
        let e = TruncatedSeries::<f64>::exp_linear(t(1, 20), &[cplx(1.0, 0.0)]).unwrap();
        // tail Σ_{k>20} 1/k! < 5e-20
        assert!((e.eval(&[cplx(1.0, 0.0)]).re - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_round_trip() {
        let a = poly1(6, &[2.0, -1.0, 0.5]);
        let r = a.reciprocal().unwrap();
        assert!(a.mul(&r).unwrap().max_abs_diff(&TruncatedSeries::one(t(1, 6))) < 1e-14);
        assert_eq!(poly1(3, &[0.0, 1.0]).reciprocal(), Err(Error::WeightVanishesAtOrigin));
    }

    #[test]
    fn from_terms_rejects_overflow() {
        let r = TruncatedSeries::<f64>::from_terms(t(1, 2), [(MultiIndex::new(vec![3]).unwrap(), Complex::one())]);
        assert!(matches!(r, Err(Error::DegreeOverflow { degree: 3, cap: 2 })));
    }

    #[test]
    fn degree_and_display() {
        let f = poly1(5, &[1.0, 0.0, -2.0]);
        assert_eq!(f.degree(), Some(2));
        assert_eq!(format!("{f}"), "1 + -2*z1^2");
        assert_eq!(TruncatedSeries::<f64>::zero(t(1, 2)).degree(), None);
    }
}
