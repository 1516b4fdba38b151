//! Exact arithmetic substrate: rationals, polynomials over `Q`, real number
//! fields with sign determination, integer normal forms and Perron data.

pub mod factor;
pub mod field;
pub mod matrix;
pub mod perron;
pub mod poly;
pub mod rational;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use field::{fe_arith, ArithOp, FieldElement, NumberField};
pub use matrix::{hermite_normal_form, rational_nullspace, smith_normal_form, solve_integer, IntMatrix, SmithForm};
pub use perron::{perron_data, PerronData};
pub use rational::Rational;

use crate::error::Result;

/// Validated number field from an integer polynomial (lowest degree first)
/// and an isolating interval.
pub fn field_from_poly(min_poly: &[BigInt], root_interval: (BigRational, BigRational)) -> Result<Arc<NumberField>> {
    NumberField::new(min_poly, root_interval.0, root_interval.1)
}

/// Exact sign of a field element.
pub fn fe_sign(a: &FieldElement) -> i8 {
    a.sign()
}
