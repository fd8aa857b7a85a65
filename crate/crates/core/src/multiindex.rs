//! Multi-indices and total-degree truncations.
//!
//! Every basis in the crate is enumerated in graded lexicographic order:
//! first by total degree `|α|`, then lexicographically on the entry tuple.
//! [`Truncation::rank`] maps an index to its position in that order
//! without a lookup table.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::binomial;

/// Exponent tuple `(α₁, …, αₙ)` of a monomial `z^α`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("multi-index needs n >= 1 entries".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n.max(1)])
    }

    /// The unit index `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// `α! = Π αᵢ!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).fold(1.0f64, |acc, j| acc * j as f64))
            .product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Monomial label such as `z1^2*z3`, or `1` for the zero index.
    pub fn label(&self) -> String {
        if self.is_zero() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (i, &a) in self.0.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("z{}", i + 1)),
                _ => parts.push(format!("z{}^{}", i + 1, a)),
            }
        }
        parts.join("*")
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Variable count and maximum retained total degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    pub n: usize,
    pub degree_cap: usize,
}

type BasisCache = Mutex<HashMap<(usize, usize), Arc<[MultiIndex]>>>;

thread_local! {
    static LOCAL_BASIS: std::cell::RefCell<HashMap<(usize, usize), Arc<[MultiIndex]>>> = std::cell::RefCell::new(HashMap::new());
}

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn compositions(d: usize, n: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if n == 1 {
        prefix.push(d as u32);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for v in 0..=d {
        prefix.push(v as u32);
        compositions(d - v, n - 1, prefix, out);
        prefix.pop();
    }
}

impl Truncation {
    pub fn new(n: usize, degree_cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("variable count must be >= 1".into()));
        }
        Ok(Truncation { n, degree_cap })
    }

    /// `C(N + n, n)`.
    pub fn size(&self) -> usize {
        binomial(self.degree_cap + self.n, self.n)
    }

    /// Number of indices of total degree strictly below `d`.
    pub fn offset(&self, d: usize) -> usize {
        if d == 0 {
            0
        } else {
            binomial(d - 1 + self.n, self.n)
        }
    }

    /// Number of indices of total degree exactly `d`.
    pub fn level_size(&self, d: usize) -> usize {
        binomial(d + self.n - 1, self.n - 1)
    }

    /// The full basis in graded-lex order (cached per truncation).
    pub fn basis(&self) -> Arc<[MultiIndex]> {
        let key = (self.n, self.degree_cap);
        if let Some(b) = LOCAL_BASIS.with(|m| m.borrow().get(&key).cloned()) {
            return b;
        }
        let b = self.shared_basis();
        LOCAL_BASIS.with(|m| m.borrow_mut().insert(key, b.clone()));
        b
    }

    fn shared_basis(&self) -> Arc<[MultiIndex]> {
        let key = (self.n, self.degree_cap);
        let mut cache = basis_cache().lock().expect("basis cache poisoned");
        if let Some(b) = cache.get(&key) {
            return b.clone();
        }
        let mut out = Vec::with_capacity(self.size());
        let mut prefix = Vec::with_capacity(self.n);
        for d in 0..=self.degree_cap {
            compositions(d, self.n, &mut prefix, &mut out);
        }
        let arc: Arc<[MultiIndex]> = out.into();
        cache.insert(key, arc.clone());
        arc
    }

    /// Position of the exponent tuple `entries` in the graded-lex basis.
    /// Returns `None` when the degree exceeds the cap.
    pub fn rank(&self, entries: &[u32]) -> Option<usize> {
        debug_assert_eq!(entries.len(), self.n);
        let d: usize = entries.iter().map(|&a| a as usize).sum();
        if d > self.degree_cap {
            return None;
        }
        let mut pos = self.offset(d);
        let mut s = d;
        for (i, &a) in entries.iter().enumerate().take(self.n - 1) {
            let r = self.n - 1 - i;
            let a = a as usize;
            // compositions of s into r+1 parts beginning with a value < a
            pos += binomial(s + r, r) - binomial(s - a + r, r);
            s -= a;
        }
        Some(pos)
    }

    /// Rank of the componentwise sum of two exponent tuples.
    pub fn rank_of_sum(&self, a: &[u32], b: &[u32]) -> Option<usize> {
        let mut buf = [0u32; 8];
        if self.n <= 8 {
            for i in 0..self.n {
                buf[i] = a[i] + b[i];
            }
            self.rank(&buf[..self.n])
        } else {
            let v: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            self.rank(&v)
        }
    }

    pub fn with_cap(&self, degree_cap: usize) -> Truncation {
        Truncation { n: self.n, degree_cap }
    }

    pub fn check_same(&self, other: &Truncation) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch(format!(
                "truncation (n={}, cap={}) vs (n={}, cap={})",
                self.n, self.degree_cap, other.n, other.degree_cap
            )));
        }
        Ok(())
    }
}
