//! Exact scalar fields and linear algebra.

pub mod cyclotomic;
pub mod matrix;
pub mod rational;
pub mod scalar;

pub use cyclotomic::{conductor_for, cyclotomic_poly, totient, Cyclotomic};
pub use matrix::{rank_of, ExactMatrix};
pub use rational::{int, rat, Rational};
pub use scalar::{hermitian_dot, is_positive_rational, Field, FieldKind, Positivity, Scalar};

/// Complex conjugate of a scalar.
pub fn conj(s: &Scalar) -> Scalar {
    s.conj()
}

/// Right kernel basis of a matrix.
pub fn kernel_basis<F: Field>(m: &ExactMatrix<F>) -> Vec<Vec<F>> {
    m.kernel_basis()
}
