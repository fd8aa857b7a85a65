//! JSON interchange for series and moment tables.
//!
//! Series: `{"n", "degree_cap", "terms": [{"alpha": [...], "re", "im"}]}`.
//! Moments: `{"n", "degree_cap", "moments": [...], "growth": {"C", "rho"} | null}`.
//! Operators: `{"domain": side, "codomain": side, "entries": [[re, im], ...]}`
//! with entries in column-major order and `side = {"n", "degree_cap", "space"}`.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::functionals::{GrowthBound, MomentFunctional};
use crate::linalg::CMatrix;
use crate::multiindex::{MultiIndex, Truncation};
use crate::operators::{OperatorMatrix, Side};
use crate::scalar::Real;
use crate::series::TruncatedSeries;
use crate::spaces::SpaceSpec;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub alpha: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub n: usize,
    pub degree_cap: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GrowthJson {
    #[serde(rename = "C")]
    pub c: f64,
    pub rho: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MomentsJson {
    pub n: usize,
    pub degree_cap: usize,
    pub moments: Vec<TermJson>,
    #[serde(default)]
    pub growth: Option<GrowthJson>,
}

fn terms_of<T: Real>(s: &TruncatedSeries<T>) -> Vec<TermJson> {
    s.term_list()
        .into_iter()
        .map(|(a, c)| TermJson { alpha: a.entries().to_vec(), re: c.re.to_f64_lossy(), im: c.im.to_f64_lossy() })
        .collect()
}

impl SeriesJson {
    pub fn from_series<T: Real>(s: &TruncatedSeries<T>) -> Self {
        SeriesJson { n: s.n(), degree_cap: s.cap(), terms: terms_of(s) }
    }

    /// Rejects indices of the wrong length or degree above the cap.
    pub fn to_series<T: Real>(&self) -> Result<TruncatedSeries<T>> {
        let trunc = Truncation::new(self.n, self.degree_cap)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.alpha.len() != self.n {
                    return Err(Error::Parse(format!("index {:?} has length {} for n = {}", t.alpha, t.alpha.len(), self.n)));
                }
                Ok((MultiIndex::new(t.alpha.clone())?, Complex::new(T::lit(t.re), T::lit(t.im))))
            })
            .collect::<Result<Vec<_>>>()?;
        TruncatedSeries::from_terms(trunc, terms)
    }
}

impl<T: Real> Serialize for TruncatedSeries<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from_series(self).serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for TruncatedSeries<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(deserializer)?.to_series().map_err(D::Error::custom)
    }
}

pub fn series_from_json<T: Real>(text: &str) -> Result<TruncatedSeries<T>> {
    let parsed: SeriesJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parsed.to_series()
}

pub fn series_to_json<T: Real>(s: &TruncatedSeries<T>) -> String {
    serde_json::to_string_pretty(&SeriesJson::from_series(s)).expect("plain data serializes")
}

impl MomentsJson {
    pub fn from_functional<T: Real>(m: &MomentFunctional<T>) -> Self {
        let trunc = m.trunc();
        MomentsJson {
            n: trunc.n,
            degree_cap: trunc.degree_cap,
            moments: trunc
                .basis()
                .iter()
                .zip(m.moments())
                .map(|(a, c)| TermJson { alpha: a.entries().to_vec(), re: c.re.to_f64_lossy(), im: c.im.to_f64_lossy() })
                .collect(),
            growth: m.growth().map(|g| GrowthJson { c: g.c.to_f64_lossy(), rho: g.rho.iter().map(|r| r.to_f64_lossy()).collect() }),
        }
    }

    /// Every basis index up to the cap must appear exactly once.
    pub fn to_functional<T: Real>(&self) -> Result<MomentFunctional<T>> {
        let trunc = Truncation::new(self.n, self.degree_cap)?;
        let mut values: Vec<Option<Complex<T>>> = vec![None; trunc.size()];
        for t in &self.moments {
            if t.alpha.len() != self.n {
                return Err(Error::Parse(format!("index {:?} has length {} for n = {}", t.alpha, t.alpha.len(), self.n)));
            }
            let k = trunc
                .rank(&t.alpha)
                .ok_or(Error::DegreeOverflow { degree: t.alpha.iter().map(|&a| a as usize).sum(), cap: self.degree_cap })?;
            if values[k].replace(Complex::new(T::lit(t.re), T::lit(t.im))).is_some() {
                return Err(Error::Parse(format!("duplicate moment for index {:?}", t.alpha)));
            }
        }
        let basis = trunc.basis();
        let moments = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::Parse(format!("missing moment for index {}", basis[k]))))
            .collect::<Result<Vec<_>>>()?;
        let growth = self
            .growth
            .as_ref()
            .map(|g| GrowthBound { c: T::lit(g.c), rho: g.rho.iter().map(|&r| T::lit(r)).collect() });
        MomentFunctional::new(trunc, moments, growth)
    }
}

pub fn moments_from_json<T: Real>(text: &str) -> Result<MomentFunctional<T>> {
    let parsed: MomentsJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parsed.to_functional()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SideJson {
    pub n: usize,
    pub degree_cap: usize,
    pub space: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub domain: SideJson,
    pub codomain: SideJson,
    pub entries: Vec<[f64; 2]>,
    #[serde(default)]
    pub truncated: Option<Vec<bool>>,
}

impl SideJson {
    fn from_side(s: &Side) -> Self {
        SideJson { n: s.trunc.n, degree_cap: s.trunc.degree_cap, space: s.space.to_string() }
    }

    fn to_side(&self) -> Result<Side> {
        let space: SpaceSpec = self.space.parse()?;
        Side::new(Truncation::new(self.n, self.degree_cap)?, space)
    }
}

impl OperatorJson {
    pub fn from_operator<T: Real>(op: &OperatorMatrix<T>) -> Self {
        let (rows, cols) = (op.entries.rows(), op.entries.cols());
        let mut entries = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                let c = op.entries[(i, j)];
                entries.push([c.re.to_f64_lossy(), c.im.to_f64_lossy()]);
            }
        }
        OperatorJson {
            domain: SideJson::from_side(&op.domain),
            codomain: SideJson::from_side(&op.codomain),
            entries,
            truncated: Some(op.truncated.clone()),
        }
    }

    /// Missing `truncated` flags default to all false.
    pub fn to_operator<T: Real>(&self) -> Result<OperatorMatrix<T>> {
        let domain = self.domain.to_side()?;
        let codomain = self.codomain.to_side()?;
        let (rows, cols) = (codomain.trunc.size(), domain.trunc.size());
        if self.entries.len() != rows * cols {
            return Err(Error::Parse(format!("{} entries for a {rows} x {cols} operator", self.entries.len())));
        }
        let truncated = self.truncated.clone().unwrap_or_else(|| vec![false; cols]);
        if truncated.len() != cols {
            return Err(Error::Parse(format!("{} truncation flags for {cols} columns", truncated.len())));
        }
        let e = &self.entries;
        let entries = CMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = e[j * rows + i];
            Complex::new(T::lit(re), T::lit(im))
        });
        Ok(OperatorMatrix { domain, codomain, entries, truncated })
    }
}

pub fn operator_from_json<T: Real>(text: &str) -> Result<OperatorMatrix<T>> {
    let parsed: OperatorJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parsed.to_operator()
}

pub fn operator_to_json<T: Real>(op: &OperatorMatrix<T>) -> String {
    serde_json::to_string_pretty(&OperatorJson::from_operator(op)).expect("plain data serializes")
}

/// A single series object or an array of them.
pub fn series_list_from_json<T: Real>(text: &str) -> Result<Vec<TruncatedSeries<T>>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|v| serde_json::from_value::<SeriesJson>(v).map_err(|e| Error::Parse(e.to_string()))?.to_series())
        .collect()
}
