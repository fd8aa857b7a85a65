//! Finite-truncation workbench for Hilbert spaces of analytic functions on
//! the polydisc: weighted norms, cyclicity distances, the outer-function
//! integral test, moment functionals, weighted composition operators and
//! exponent recovery for zero-free entire functions.
//!
//! Everything is generic over `f32`/`f64` through [`scalar::Real`]; the
//! `*64` / `*32` aliases below fix the precision.

pub mod error;
pub mod evaluator;
pub mod linalg;
pub mod multiindex;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod spaces;
pub mod functionals;
pub mod cyclicity;
pub mod io;
pub mod operators;
pub mod entire;
pub mod expr;

pub use error::{Error, Result};
pub use evaluator::{Evaluator, NamedEvaluator};
pub use multiindex::{MultiIndex, Truncation};
pub use scalar::{Cplx, Real};
pub use series::TruncatedSeries;
pub use spaces::SpaceSpec;

/// Tool version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Series64 = TruncatedSeries<f64>;
pub type Series32 = TruncatedSeries<f32>;
pub type Complex64 = Cplx<f64>;
pub type Complex32 = Cplx<f32>;
pub type Moments64 = functionals::MomentFunctional<f64>;
pub type Moments32 = functionals::MomentFunctional<f32>;
pub type Operator64 = operators::OperatorMatrix<f64>;
pub type Operator32 = operators::OperatorMatrix<f32>;
