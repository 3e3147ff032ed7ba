//! Exact arithmetic for the Hirota variety of the g-cube: generators, the main
//! component parameterization, rank certificates, KP solitons and the Abel map.

pub mod certify;
pub mod cube;
pub mod error;
pub mod expsum;
pub mod ideal;
pub mod io;
pub mod linalg;
pub mod main_component;
pub mod numeric;
pub mod poly;
pub mod sampling;
pub mod scalar;
pub mod soliton;

pub use error::{Error, Result};
pub use scalar::{Field, Rational, Scalar};

pub type QPolynomial = poly::Polynomial<Rational>;
pub type SymbolicExpSum = expsum::SymbolicExpSum;
pub type NumericExpSum = expsum::NumericExpSum<Rational>;
pub type RationalPoint = main_component::HirotaPoint<Rational>;
pub type RationalParams = main_component::MainParams<Rational>;
pub type F64Point = main_component::HirotaPoint<f64>;
pub type F64Params = main_component::MainParams<f64>;
pub use linalg::RationalMatrix;
pub use numeric::{Real, Wide};
pub type EvalContext64 = numeric::EvalContext<f64>;
pub type WideEvalContext = numeric::EvalContext<Wide>;
