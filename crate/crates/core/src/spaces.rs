//! Weighted coefficient spaces: Hardy `H²(𝔻ⁿ)`, Dirichlet-type `𝒟_α`
//! and Drury–Arveson `ℋ²ₙ`.
//!
//! Each space is a diagonal weight on the monomial basis, so norms, inner
//! products, shift norms and Gram matrices reduce to weighted coefficient
//! sums.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Cholesky};
use crate::multiindex::{MultiIndex, Truncation};
use crate::scalar::{Cplx, Real};
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    HardyH2 { n: usize },
    DirichletAlpha { n: usize, alpha: f64 },
    DruryArveson { n: usize },
}

impl SpaceSpec {
    pub fn n(&self) -> usize {
        match *self {
            SpaceSpec::HardyH2 { n } | SpaceSpec::DirichletAlpha { n, .. } | SpaceSpec::DruryArveson { n } => n,
        }
    }

    /// Same kind of space over a different number of variables.
    pub fn with_n(&self, n: usize) -> SpaceSpec {
        match *self {
            SpaceSpec::HardyH2 { .. } => SpaceSpec::HardyH2 { n },
            SpaceSpec::DirichletAlpha { alpha, .. } => SpaceSpec::DirichletAlpha { n, alpha },
            SpaceSpec::DruryArveson { .. } => SpaceSpec::DruryArveson { n },
        }
    }

    pub fn is_hardy(&self) -> bool {
        matches!(self, SpaceSpec::HardyH2 { .. })
    }

    /// Squared-norm weight of the monomial `z^α`.
    pub fn weight<T: Real>(&self, alpha: &MultiIndex) -> T {
        match *self {
            SpaceSpec::HardyH2 { .. } => T::one(),
            SpaceSpec::DirichletAlpha { alpha: a, .. } => {
                if a == 0.0 {
                    return T::one();
                }
                let prod = alpha
                    .entries()
                    .iter()
                    .fold(T::one(), |acc, &e| acc * T::from_u32(e + 1).unwrap());
                prod.powf(T::lit(a))
            }
            SpaceSpec::DruryArveson { .. } => {
                // α!/|α|! as Π over the running multinomial build-up
                let mut acc = T::one();
                let mut total = 0u32;
                for &e in alpha.entries() {
                    for j in 1..=e {
                        total += 1;
                        acc = acc * T::from_u32(j).unwrap() / T::from_u32(total).unwrap();
                    }
                }
                acc
            }
        }
    }

    /// Weights for every basis element of a truncation.
    pub fn weights<T: Real>(&self, trunc: Truncation) -> Vec<T> {
        trunc.basis().iter().map(|a| self.weight(a)).collect()
    }

    fn check(&self, trunc: &Truncation) -> Result<()> {
        if trunc.n != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "space over n = {} applied to series over n = {}",
                self.n(),
                trunc.n
            )));
        }
        Ok(())
    }

    /// `⟨f, g⟩ = Σ weight(α) f̂(α) conj(ĝ(α))`.
    pub fn inner<T: Real>(&self, f: &TruncatedSeries<T>, g: &TruncatedSeries<T>) -> Result<Cplx<T>> {
        self.check(&f.trunc())?;
        f.trunc().check_same(&g.trunc())?;
        let w = self.weights::<T>(f.trunc());
        Ok(weighted_inner(&w, f.coeffs(), g.coeffs()))
    }

    pub fn norm<T: Real>(&self, f: &TruncatedSeries<T>) -> Result<T> {
        self.check(&f.trunc())?;
        let w = self.weights::<T>(f.trunc());
        Ok(weighted_norm(&w, f.coeffs()))
    }

    /// Operator norms of the shifts `Sᵢ` restricted to the truncated basis:
    /// `max_α √(weight(α + eᵢ) / weight(α))` over `|α| < N`.
    pub fn shift_norms<T: Real>(&self, trunc: Truncation) -> Result<Vec<T>> {
        self.check(&trunc)?;
        if trunc.degree_cap == 0 {
            return Ok(vec![T::zero(); trunc.n]);
        }
        let inner = trunc.with_cap(trunc.degree_cap - 1);
        let mut out = vec![T::zero(); trunc.n];
        for alpha in inner.basis().iter() {
            let w0: T = self.weight(alpha);
            for (i, slot) in out.iter_mut().enumerate() {
                let w1: T = self.weight(&alpha.add(&MultiIndex::unit(trunc.n, i)));
                *slot = slot.max((w1 / w0).sqrt());
            }
        }
        Ok(out)
    }

    /// `G_{jk} = ⟨b_j, b_k⟩`.
    pub fn gram<T: Real>(&self, basis: &[TruncatedSeries<T>]) -> Result<GramMatrix<T>> {
        let trunc = match basis.first() {
            Some(b) => b.trunc(),
            None => return Ok(GramMatrix { entries: CMatrix::zeros(0, 0) }),
        };
        self.check(&trunc)?;
        for b in basis {
            trunc.check_same(&b.trunc())?;
        }
        let w = self.weights::<T>(trunc);
        Ok(GramMatrix { entries: gram_from_coeffs(&w, &basis.iter().map(|b| b.coeffs()).collect::<Vec<_>>()) })
    }
}

pub(crate) fn weighted_inner<T: Real>(w: &[T], f: &[Cplx<T>], g: &[Cplx<T>]) -> Cplx<T> {
    w.iter()
        .zip(f.iter().zip(g))
        .fold(Complex::zero(), |acc, (&wk, (&a, &b))| acc + a * b.conj() * wk)
}

pub(crate) fn weighted_norm<T: Real>(w: &[T], f: &[Cplx<T>]) -> T {
    w.iter().zip(f).map(|(&wk, c)| wk * c.norm_sqr()).sum::<T>().sqrt()
}

/// Gram matrix of coefficient vectors under a diagonal weight. Rows are
/// assembled in parallel; each entry is a fixed-order sum.
pub(crate) fn gram_from_coeffs<T: Real>(w: &[T], cols: &[&[Cplx<T>]]) -> CMatrix<T> {
    use rayon::prelude::*;
    let m = cols.len();
    let rows: Vec<Vec<Cplx<T>>> = (0..m)
        .into_par_iter()
        .map(|j| (0..m).map(|k| if k >= j { weighted_inner(w, cols[j], cols[k]) } else { Complex::zero() }).collect())
        .collect();
    let mut g = CMatrix::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            g[(j, k)] = rows[j][k];
            g[(k, j)] = rows[j][k].conj();
        }
        g[(j, j)] = Complex::new(rows[j][j].re, T::zero());
    }
    g
}

/// Hermitian Gram matrix under a [`SpaceSpec`].
#[derive(Clone, Debug)]
pub struct GramMatrix<T: Real> {
    pub entries: CMatrix<T>,
}

impl<T: Real> GramMatrix<T> {
    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.entries.hermitian_defect() <= tol
    }

    /// Smallest eigenvalue is at least `−tol`, tested by factorizing
    /// `G + tol·I`.
    pub fn is_psd(&self, tol: T) -> bool {
        let mut s = self.entries.clone();
        for i in 0..s.rows() {
            s[(i, i)] = Complex::new(s[(i, i)].re + tol, T::zero());
        }
        Cholesky::new(&s).is_some()
    }

    /// Row-major CSV with a header of basis labels.
    pub fn to_csv(&self, labels: &[String]) -> String {
        let mut out = String::new();
        out.push_str("basis");
        for l in labels {
            out.push(',');
            out.push_str(&csv_field(l));
        }
        out.push('\n');
        for i in 0..self.size() {
            out.push_str(&csv_field(labels.get(i).map(String::as_str).unwrap_or("")));
            for j in 0..self.size() {
                out.push(',');
                out.push_str(&format_complex(self.entries[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `re` for real values, otherwise `re+imi` / `re-imi`.
pub fn format_complex<T: Real>(c: Cplx<T>) -> String {
    let (re, im) = (c.re.to_f64_lossy(), c.im.to_f64_lossy());
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceSpec::HardyH2 { n } => write!(f, "h2:n={n}"),
            SpaceSpec::DirichletAlpha { n, alpha } => write!(f, "dirichlet:n={n}:alpha={alpha:?}"),
            SpaceSpec::DruryArveson { n } => write!(f, "drury:n={n}"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// Parses `h2:n=2`, `dirichlet:n=2:alpha=1.0` or `drury:n=3`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or_default().to_ascii_lowercase();
        let mut n = None;
        let mut alpha = None;
        for p in parts {
            let (key, value) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("space field `{p}` is not key=value")))?;
            match key.trim() {
                "n" => n = Some(value.trim().parse::<usize>().map_err(|e| Error::Parse(format!("n: {e}")))?),
                "alpha" => {
                    alpha = Some(value.trim().parse::<f64>().map_err(|e| Error::Parse(format!("alpha: {e}")))?)
                }
                other => return Err(Error::Parse(format!("unknown space field `{other}`"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse(format!("space `{s}` lacks n=")))?;
        if n == 0 {
            return Err(Error::Parse("space needs n >= 1".into()));
        }
        match kind.as_str() {
            "h2" | "hardy" => Ok(SpaceSpec::HardyH2 { n }),
            "dirichlet" => {
                let alpha = alpha.ok_or_else(|| Error::Parse("dirichlet space needs alpha=".into()))?;
                if !alpha.is_finite() {
                    return Err(Error::Parse("alpha must be finite".into()));
                }
                Ok(SpaceSpec::DirichletAlpha { n, alpha })
            }
            "drury" | "drury-arveson" => Ok(SpaceSpec::DruryArveson { n }),
            other => Err(Error::Parse(format!("unknown space kind `{other}`"))),
        }
    }
}
