//! Isotropy groups of complex skew-symmetric and complex orthogonal matrices under
//! orthogonal similarity, computed exactly over Q(i, sqrt 2).

pub mod canonical;
pub mod error;
pub mod isotropy;
pub mod json;
pub mod matrix;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod solver;
pub mod toeplitz;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Backend, ExactScalar, FloatScalar, Rational, Scalar};
