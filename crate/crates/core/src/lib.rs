//! Exact arithmetic for factorial ratios and their q-analogues.
//!
//! * [`poly`] and [`cyclotomic`]: dense integer polynomials and `Φ_d`.
//! * [`ratio`]: ratio specifications, direct evaluation and floor-sum criteria.
//! * [`qratio`]: q-factorial ratios as cyclotomic products, positivity scans,
//!   and the registry of named families.
//! * [`laurent`]: bivariate Laurent polynomials and the G2 constant term.

pub mod cyclotomic;
pub mod laurent;
pub mod poly;
pub mod qratio;
pub mod ratio;

pub use cyclotomic::{cyclotomic, warm_cyclotomics};
pub use poly::{factorial_big, IntPoly, PolyError};
pub use ratio::{parse_spec, Evaluation, LinearForm, RatioError, RatioSpec, Verdict};

/// Serializes any displayable big integer as a decimal string.
pub fn serde_decimal<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
