//! Exact computations with quantum covering groups of anisotropic type:
//! the half algebra, crystal bases, integrable modules and canonical bases.

pub mod canonical;
pub mod cartan;
pub mod checks;
pub mod crystal;
pub mod error;
pub mod export;
pub mod golden;
pub mod graded;
pub mod half;
pub mod linalg;
pub mod module;
pub mod poly;
pub mod projection;
pub mod ratfunc;
pub mod relations;
pub mod scalar;
pub mod tensor;

pub use cartan::{CartanDatum, RootVec, Weight};
pub use error::{QpiError, Result};
pub use linalg::{Field, Matrix, Ring};
pub use ratfunc::RatFunc;
pub use scalar::{qpi_binomial, qpi_factorial, qpi_integer, PiRational, QOrder, Scalar};

pub type Rational = num_rational::BigRational;
pub type IntPoly = poly::Poly<num_bigint::BigInt>;
pub type QMatrix = Matrix<Rational>;
pub type FnMatrix = Matrix<RatFunc>;
pub type ScalarMatrix = Matrix<Scalar>;
