//! Sparse multivariate polynomials over the rationals or over `f64`.

mod field;
mod monomial;
mod polynomial;
mod scalar;

pub use field::VectorField;
pub use monomial::{monomials_of_degree, monomials_of_weight, Monomial};
pub use polynomial::{default_names, Polynomial};
pub use scalar::{format_rational, rational_to_f64, Mode, Scalar};
