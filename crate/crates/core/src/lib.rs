//! Exact q-expansion arithmetic for half-integral weight modular forms.
//!
//! The crate builds cusp forms such as the weight 13/2 form attached to Δ and
//! the weight 3/2 form attached to `X_0(11)` as exact truncated q-series,
//! applies Hecke operators and Shimura lifts to them, and measures the signs
//! of their Fourier coefficients.
//!
//! Series arithmetic is generic over the coefficient ring ([`Scalar`]); the
//! aliases below name the instantiations used in practice.

pub mod arith;
pub mod coeffile;
pub mod forms;
pub mod hecke;
pub mod qseries;
pub mod scalar;
pub(crate) mod serde_big;
pub mod signs;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use arith::DirichletCharacter;
pub use coeffile::CoefficientFile;
pub use forms::{FormSpec, HalfIntegralForm, IntegralForm};
pub use hecke::{EigenReport, LiftResult};
pub use qseries::{Offset, QSeries};
pub use scalar::Scalar;
pub use signs::SignStatsReport;

/// Exact rational coefficients.
pub type RationalSeries = QSeries<BigRational>;
/// Exact integer coefficients; scaling fails unless the result stays integral.
pub type IntegerSeries = QSeries<BigInt>;
/// Floating-point coefficients, for quick numerical experiments.
pub type FloatSeries = QSeries<f64>;
/// Single-precision variant of [`FloatSeries`].
pub type Float32Series = QSeries<f32>;
