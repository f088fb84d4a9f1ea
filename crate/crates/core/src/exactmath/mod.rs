//! Exact arithmetic: rationals, real number fields, and the linear algebra
//! every other module computes through.

mod field;
mod kmatrix;
mod lattice;
mod poly;
mod qmatrix;
mod rational;

pub use field::{nf_sign, AlgebraicReal, RealNumberField};
pub use kmatrix::{restrict_scalars, KMatrix};
pub use lattice::{saturate, saturation_index, smith_normal_form, IntMatrix, SmithForm};
pub use poly::QPoly;
pub use qmatrix::{same_column_span, QMatrix};
pub use rational::{
    common_denominator, format_rational, parse_integer, parse_rational, primitive_integer_vector, rat, ratio,
    to_i128, Rational,
};
