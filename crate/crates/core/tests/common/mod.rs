#![allow(dead_code)]

use num_complex::Complex;
use proptest::prelude::*;

use polydisc::{Cplx, Series64, Truncation};

pub type C = Cplx<f64>;

pub fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

pub fn complex(scale: f64) -> impl Strategy<Value = C> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| c(re, im))
}

/// A point with every coordinate in the open disc of radius `r`.
pub fn point(n: usize, r: f64) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((0.0..r, 0.0..std::f64::consts::TAU), n)
        .prop_map(|v| v.into_iter().map(|(m, t)| Complex::from_polar(m, t)).collect())
}

/// Coefficients in the box `[-scale, scale]²` up to `degree`, stored at `cap`.
pub fn series(n: usize, degree: usize, cap: usize, scale: f64) -> impl Strategy<Value = Series64> {
    let t = Truncation::new(n, cap).unwrap();
    let live = t.offset(degree.min(cap) + 1);
    prop::collection::vec(complex(scale), live).prop_map(move |mut v| {
        v.resize(t.size(), c(0.0, 0.0));
        Series64::from_dense(t, v).unwrap()
    })
}

pub fn without_constant(mut s: Series64) -> Series64 {
    s.coeffs_mut()[0] = c(0.0, 0.0);
    s
}
