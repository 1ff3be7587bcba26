//! Precision-parameterized scalars and dense linear algebra.
//!
//! Every computation runs in exactly one [`Precision`]: either native
//! binary64 (`f64`) or an MPFR-backed big float ([`Mp`]) carrying `D`
//! decimal digits. Generic code is written against [`Real`]; constants are
//! created from an existing value (`x.lit(2.0)`) or from a [`Precision`] so
//! that the working precision propagates without a global context.

mod cholesky;
mod lu;
mod matrix;
mod mp;

use std::fmt::{self, Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

pub use cholesky::{cholesky, Cholesky};
pub use lu::{lu_factor, lu_solve, LuFactor};
pub use matrix::Matrix;
pub use mp::Mp;

/// Default number of decimal digits when big-float mode is requested
/// without an explicit digit count.
pub const DEFAULT_DIGITS: u32 = 100;

/// Working precision of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    /// IEEE-754 binary64.
    Binary64,
    /// Big float with the given number of significant decimal digits.
    Digits(u32),
}

impl Precision {
    /// Digits used when scaling tolerances: 16 for binary64, `D` otherwise.
    pub fn effective_digits(&self) -> u32 {
        match self {
            Precision::Binary64 => 16,
            Precision::Digits(d) => *d,
        }
    }

    /// Mantissa bits needed to hold `D` decimal digits.
    pub fn bits(&self) -> u32 {
        match self {
            Precision::Binary64 => 53,
            Precision::Digits(d) => ((*d as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 1,
        }
    }

    /// `10^(k - D_effective)`, the shape shared by every precision-scaled
    /// tolerance in the crate.
    pub fn scaled_tolerance(&self, k: i32) -> f64 {
        10f64.powi(k - self.effective_digits() as i32)
    }

    /// Pivot threshold for LU and the degeneracy threshold for kernel
    /// constraints: `10^(5 - D_effective)`.
    pub fn tol_pivot(&self) -> f64 {
        self.scaled_tolerance(5)
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Binary64 => write!(f, "f64"),
            Precision::Digits(d) => write!(f, "mp:{d}"),
        }
    }
}

/// Error returned when a precision string is malformed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid precision `{0}` (expected `f64`, `mp` or `mp:<digits>`)")]
pub struct ParsePrecisionError(pub String);

impl FromStr for Precision {
    type Err = ParsePrecisionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "f64" | "binary64" | "double" => Ok(Precision::Binary64),
            "mp" => Ok(Precision::Digits(DEFAULT_DIGITS)),
            _ => {
                let digits = t
                    .strip_prefix("mp:")
                    .and_then(|d| d.parse::<u32>().ok())
                    .filter(|d| (10..=2000).contains(d))
                    .ok_or_else(|| ParsePrecisionError(s.to_string()))?;
                Ok(Precision::Digits(digits))
            }
        }
    }
}

/// Arithmetic plus the elementary functions needed to write closed-form
/// solutions and data once and evaluate them on plain scalars or on jets.
pub trait Elementary:
    Clone
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Underlying real scalar type.
    type Base: Real;

    /// Constant with the same precision (and jet shape) as `self`.
    fn lift(&self, v: &Self::Base) -> Self;
    fn lit(&self, v: f64) -> Self;
    /// The rational `n/d`, rounded once at working precision.
    fn ratio(&self, n: i64, d: i64) -> Self;
    fn pi(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn recip(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    /// `self^r` for a real exponent (requires `self > 0`).
    fn powr(&self, r: &Self::Base) -> Self;
}

/// A real scalar at a fixed working precision.
pub trait Real:
    Elementary<Base = Self>
    + PartialOrd
    + Debug
    + Display
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    fn from_f64(v: f64, prec: Precision) -> Self;
    fn from_ratio(n: i64, d: i64, prec: Precision) -> Self;
    /// Parses a decimal literal directly at working precision, so that
    /// values such as `0.18` are not first rounded to binary64.
    fn parse_decimal(s: &str, prec: Precision) -> Option<Self>;
    fn pi_at(prec: Precision) -> Self;
    fn precision(&self) -> Precision;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;
    /// Decimal rendering with up to `digits` significant digits.
    fn to_decimal(&self, digits: usize) -> String;

    fn zero_at(prec: Precision) -> Self {
        Self::from_f64(0.0, prec)
    }

    fn one_at(prec: Precision) -> Self {
        Self::from_f64(1.0, prec)
    }

    fn zero(&self) -> Self {
        self.lit(0.0)
    }

    fn one(&self) -> Self {
        self.lit(1.0)
    }

    /// Converts an `f64` through its shortest decimal representation.
    fn from_f64_decimal(v: f64, prec: Precision) -> Self {
        Self::parse_decimal(&format!("{v:e}"), prec).unwrap_or_else(|| Self::from_f64(v, prec))
    }

    /// `self -= a * b`.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a.clone() * b;
    }

    /// `self += a * b`.
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        *self += a.clone() * b;
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Elementary for f64 {
    type Base = f64;

    fn lift(&self, v: &f64) -> f64 {
        *v
    }
    fn lit(&self, v: f64) -> f64 {
        v
    }
    fn ratio(&self, n: i64, d: i64) -> f64 {
        n as f64 / d as f64
    }
    fn pi(&self) -> f64 {
        std::f64::consts::PI
    }
    fn exp(&self) -> f64 {
        f64::exp(*self)
    }
    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
    fn sin(&self) -> f64 {
        f64::sin(*self)
    }
    fn cos(&self) -> f64 {
        f64::cos(*self)
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn recip(&self) -> f64 {
        1.0 / *self
    }
    fn powi(&self, n: i32) -> f64 {
        f64::powi(*self, n)
    }
    fn powr(&self, r: &f64) -> f64 {
        f64::powf(*self, *r)
    }
}

impl Real for f64 {
    fn from_f64(v: f64, _prec: Precision) -> f64 {
        v
    }
    fn from_ratio(n: i64, d: i64, _prec: Precision) -> f64 {
        n as f64 / d as f64
    }
    fn parse_decimal(s: &str, _prec: Precision) -> Option<f64> {
        s.trim().parse().ok()
    }
    fn pi_at(_prec: Precision) -> f64 {
        std::f64::consts::PI
    }
    fn precision(&self) -> Precision {
        Precision::Binary64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> f64 {
        f64::abs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1).min(16), self)
    }
    fn sub_mul_assign(&mut self, a: &f64, b: &f64) {
        *self -= a * b;
    }
    fn add_mul_assign(&mut self, a: &f64, b: &f64) {
        *self += a * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_parsing() {
        assert_eq!("f64".parse::<Precision>().unwrap(), Precision::Binary64);
        assert_eq!("mp".parse::<Precision>().unwrap(), Precision::Digits(100));
        assert_eq!("mp:150".parse::<Precision>().unwrap(), Precision::Digits(150));
        assert!("mp:x".parse::<Precision>().is_err());
        assert!("quad".parse::<Precision>().is_err());
        assert_eq!(Precision::Digits(50).to_string(), "mp:50");
    }

    #[test]
    fn tolerances_scale_with_digits() {
        assert_eq!(Precision::Binary64.tol_pivot(), 1e-11);
        assert!((Precision::Digits(100).tol_pivot() / 1e-95 - 1.0).abs() < 1e-12);
        assert!(Precision::Digits(100).bits() >= 333);
    }
}
