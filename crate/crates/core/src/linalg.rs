//! Small dense complex linear algebra: Hermitian Cholesky, Householder
//! least squares and power-iteration norm estimates.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cplx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Cplx<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A* x`.
    pub fn adjoint_matvec(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let mut out = vec![Complex::zero(); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a.conj() * xi;
            }
        }
        out
    }

    /// `max |A − A*|` entrywise.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace_re(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Cplx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cplx<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Unconjugated dot product `Σ aᵢ bᵢ`.
pub fn dot<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Cplx<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn vec_norm<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// Lower Cholesky factor `L` with `A = L L*`.
#[derive(Clone, Debug)]
pub struct Cholesky<T: Real> {
    l: CMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factorizes a Hermitian positive definite matrix; `None` when a
    /// pivot is not strictly positive.
    pub fn new(a: &CMatrix<T>) -> Option<Self> {
        let n = a.rows;
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d = d - l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex::new(ljj, T::zero());
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Some(Cholesky { l })
    }

    pub fn solve(&self, b: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.l.rows;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[(k, i)].conj() * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    pub fn factor(&self) -> &CMatrix<T> {
        &self.l
    }
}

/// Outcome of a Hermitian positive definite solve.
#[derive(Clone, Debug)]
pub struct HpdSolution<T: Real> {
    pub x: Vec<Cplx<T>>,
    /// Diagonal shift that was added (zero when the first attempt succeeded).
    pub jitter: T,
    /// Estimate of `λ_max / λ_min` of the (possibly shifted) matrix.
    pub condition: T,
}

/// Solves `A x = b` for Hermitian positive definite `A`. On factorization
/// failure a diagonal jitter of `1e−12 · trace / size` is added once.
pub fn solve_hpd<T: Real>(a: &CMatrix<T>, b: &[Cplx<T>]) -> Result<HpdSolution<T>> {
    let n = a.rows;
    if n == 0 {
        return Ok(HpdSolution { x: vec![], jitter: T::zero(), condition: T::one() });
    }
    let (chol, jitter, shifted) = match Cholesky::new(a) {
        Some(c) => (c, T::zero(), None),
        None => {
            let jitter = T::lit(1e-12) * a.trace_re().abs() / T::from_usize_lossy(n);
            let mut s = a.clone();
            for i in 0..n {
                s[(i, i)] = s[(i, i)] + Complex::new(jitter, T::zero());
            }
            match Cholesky::new(&s) {
                Some(c) => (c, jitter, Some(s)),
                None => {
                    let condition = hpd_condition_fallback(a);
                    return Err(Error::SingularGram { condition: condition.to_f64_lossy() });
                }
            }
        }
    };
    let m = shifted.as_ref().unwrap_or(a);
    let x = chol.solve(b);
    let condition = condition_estimate(m, &chol);
    Ok(HpdSolution { x, jitter, condition })
}

fn hpd_condition_fallback<T: Real>(a: &CMatrix<T>) -> T {
    let big = largest_eigenvalue(a);
    if big > T::zero() {
        big / (T::epsilon() * big)
    } else {
        T::infinity()
    }
}

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration.
pub fn largest_eigenvalue<T: Real>(a: &CMatrix<T>) -> T {
    power_iterate(a.rows, |x| a.matvec(x))
}

fn power_iterate<T: Real>(n: usize, apply: impl Fn(&[Cplx<T>]) -> Vec<Cplx<T>>) -> T {
    if n == 0 {
        return T::zero();
    }
    // deterministic, non-symmetric start vector
    let mut x: Vec<Cplx<T>> = (0..n)
        .map(|k| Complex::new(T::one() + T::lit(0.1) * T::from_usize_lossy(k % 7), T::lit(0.05) * T::from_usize_lossy(k % 3)))
        .collect();
    let nx = vec_norm(&x);
    x.iter_mut().for_each(|c| *c = *c / nx);
    let mut lambda = T::zero();
    for _ in 0..500 {
        let y = apply(&x);
        let ny = vec_norm(&y);
        if ny == T::zero() {
            return T::zero();
        }
        let converged = (ny - lambda).abs() <= T::lit(1e-13) * ny;
        lambda = ny;
        x = y.into_iter().map(|c| c / ny).collect();
        if converged {
            break;
        }
    }
    lambda
}

/// `λ_max / λ_min` from power iteration on `A` and on `A⁻¹` (via the factor).
pub fn condition_estimate<T: Real>(a: &CMatrix<T>, chol: &Cholesky<T>) -> T {
    let big = largest_eigenvalue(a);
    let inv_big = power_iterate(a.rows, |x| chol.solve(x));
    if inv_big == T::zero() {
        return T::infinity();
    }
    big * inv_big
}

/// Largest singular value of `A` (power iteration on `A* A`).
pub fn spectral_norm<T: Real>(a: &CMatrix<T>) -> T {
    power_iterate(a.cols, |x| a.adjoint_matvec(&a.matvec(x))).sqrt()
}

/// Least squares `min ‖A x − b‖₂` by Householder QR. Fails when a column
/// pivot falls below `rank_tol · max|R_jj|`.
pub fn lstsq<T: Real>(a: &CMatrix<T>, b: &[Cplx<T>], rank_tol: T) -> Result<Vec<Cplx<T>>> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(Error::RankDeficient { rows: m, cols: n });
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let norm: T = (j..m).map(|i| r[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::RankDeficient { rows: m, cols: n });
        }
        let x0 = r[(j, j)];
        let phase = if x0.norm() == T::zero() { Complex::one() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x − α e₁
        let mut v: Vec<Cplx<T>> = (j..m).map(|i| r[(i, j)]).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 > T::zero() {
            for k in j..n {
                let s = (j..m).fold(Complex::zero(), |acc, i| acc + v[i - j].conj() * r[(i, k)]);
                let f = s * (T::lit(2.0) / vnorm2);
                for i in j..m {
                    r[(i, k)] = r[(i, k)] - v[i - j] * f;
                }
            }
            let s = (j..m).fold(Complex::zero(), |acc, i| acc + v[i - j].conj() * y[i]);
            let f = s * (T::lit(2.0) / vnorm2);
            for i in j..m {
                y[i] = y[i] - v[i - j] * f;
            }
        }
        diag.push(r[(j, j)].norm());
    }
    let dmax = diag.iter().copied().fold(T::zero(), T::max);
    if diag.iter().any(|&d| d <= rank_tol * dmax) {
        return Err(Error::RankDeficient { rows: m, cols: n });
    }
    let mut x = vec![Complex::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - r[(i, k)] * x[k];
        }
        x[i] = s / r[(i, i)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    fn hpd() -> CMatrix<f64> {
        // B* B + I for a fixed B
        let b = CMatrix::from_fn(4, 3, |i, j| c((i + 2 * j) as f64 * 0.3 - 0.5, (i * j) as f64 * 0.1));
        let mut a = CMatrix::from_fn(3, 3, |i, j| (0..4).fold(c(0.0, 0.0), |s, k| s + b[(k, i)].conj() * b[(k, j)]));
        for i in 0..3 {
            a[(i, i)] += c(1.0, 0.0);
        }
        a
    }

    #[test]
    fn cholesky_solves() {
        let a = hpd();
        assert!(a.hermitian_defect() < 1e-15);
        let rhs = vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 3.0)];
        let sol = solve_hpd(&a, &rhs).unwrap();
        let r = a.matvec(&sol.x);
        for (x, y) in r.iter().zip(&rhs) {
            assert!((x - y).norm() < 1e-12);
        }
        assert_eq!(sol.jitter, 0.0);
        assert!(sol.condition >= 1.0);
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let a = CMatrix::<f64>::from_fn(2, 2, |_, _| c(0.0, 0.0));
        assert!(matches!(solve_hpd(&a, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::SingularGram { .. })));
    }

    #[test]
    fn qr_least_squares_matches_normal_equations() {
        let a = CMatrix::from_fn(6, 3, |i, j| c(((i + 1) as f64).powi(j as i32) * 0.5, (i as f64 - j as f64) * 0.1));
        let b: Vec<_> = (0..6).map(|i| c(i as f64 * 0.7 - 1.0, 0.2)).collect();
        let x = lstsq(&a, &b, 1e-12).unwrap();
        // normal equations oracle
        let g = CMatrix::from_fn(3, 3, |i, j| (0..6).fold(c(0.0, 0.0), |s, k| s + a[(k, i)].conj() * a[(k, j)]));
        let v = a.adjoint_matvec(&b);
        let y = solve_hpd(&g, &v).unwrap().x;
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-9);
        }
    }

    #[test]
    fn rank_deficiency_detected() {
        let a = CMatrix::from_fn(4, 2, |i, _| c(i as f64, 0.0));
        assert!(matches!(lstsq(&a, &[c(0.0, 0.0); 4], 1e-10), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = CMatrix::from_fn(3, 3, |i, j| if i == j { c((i + 1) as f64, 0.0) } else { c(0.0, 0.0) });
        assert!((spectral_norm(&a) - 3.0).abs() < 1e-10);
    }
}
