use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::{Elementary, Precision, Real};

/// MPFR big float. All values taking part in one computation share one
/// precision; binary operations keep the precision of the left operand and
/// assert equality in debug builds.
#[derive(Clone, Debug)]
pub struct Mp {
    value: Float,
    digits: u32,
}

impl Mp {
    pub fn new(value: Float, digits: u32) -> Self {
        Mp { value, digits }
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    pub fn into_float(self) -> Float {
        self.value
    }

    fn bits(&self) -> u32 {
        self.value.prec()
    }

    fn wrap(&self, value: Float) -> Mp {
        Mp { value, digits: self.digits }
    }

    fn digits_of(prec: Precision) -> u32 {
        match prec {
            Precision::Digits(d) => d,
            Precision::Binary64 => panic!("Mp requires a big-float precision, got binary64"),
        }
    }
}

impl PartialEq for Mp {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.to_decimal(p.max(1))),
            None => write!(f, "{}", self.to_decimal(self.digits as usize)),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident, $op:tt) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $method(mut self, rhs: Mp) -> Mp {
                debug_assert_eq!(self.digits, rhs.digits, "mixed precisions");
                self.value $op &rhs.value;
                self
            }
        }
        impl<'a> $tr<&'a Mp> for Mp {
            type Output = Mp;
            fn $method(mut self, rhs: &'a Mp) -> Mp {
                debug_assert_eq!(self.digits, rhs.digits, "mixed precisions");
                self.value $op &rhs.value;
                self
            }
        }
        impl<'a> $tr<&'a Mp> for &'a Mp {
            type Output = Mp;
            fn $method(self, rhs: &'a Mp) -> Mp {
                let mut out = self.clone();
                out $op rhs;
                out
            }
        }
        impl $atr for Mp {
            fn $amethod(&mut self, rhs: Mp) {
                debug_assert_eq!(self.digits, rhs.digits, "mixed precisions");
                self.value $op &rhs.value;
            }
        }
        impl<'a> $atr<&'a Mp> for Mp {
            fn $amethod(&mut self, rhs: &'a Mp) {
                debug_assert_eq!(self.digits, rhs.digits, "mixed precisions");
                self.value $op &rhs.value;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +=);
binop!(Sub, sub, SubAssign, sub_assign, -=);
binop!(Mul, mul, MulAssign, mul_assign, *=);
binop!(Div, div, DivAssign, div_assign, /=);

impl Neg for Mp {
    type Output = Mp;
    fn neg(mut self) -> Mp {
        self.value = -self.value;
        self
    }
}

impl Elementary for Mp {
    type Base = Mp;

    fn lift(&self, v: &Mp) -> Mp {
        v.clone()
    }
    fn lit(&self, v: f64) -> Mp {
        self.wrap(Float::with_val(self.bits(), v))
    }
    fn ratio(&self, n: i64, d: i64) -> Mp {
        let mut f = Float::with_val(self.bits(), n);
        f /= d;
        self.wrap(f)
    }
    fn pi(&self) -> Mp {
        self.wrap(Float::with_val(self.bits(), Constant::Pi))
    }
    fn exp(&self) -> Mp {
        self.wrap(self.value.clone().exp())
    }
    fn ln(&self) -> Mp {
        self.wrap(self.value.clone().ln())
    }
    fn sin(&self) -> Mp {
        self.wrap(self.value.clone().sin())
    }
    fn cos(&self) -> Mp {
        self.wrap(self.value.clone().cos())
    }
    fn sqrt(&self) -> Mp {
        self.wrap(self.value.clone().sqrt())
    }
    fn recip(&self) -> Mp {
        self.wrap(self.value.clone().recip())
    }
    fn powi(&self, n: i32) -> Mp {
        self.wrap(self.value.clone().pow(n))
    }
    fn powr(&self, r: &Mp) -> Mp {
        self.wrap(self.value.clone().pow(&r.value))
    }
}

impl Real for Mp {
    fn from_f64(v: f64, prec: Precision) -> Mp {
        Mp::new(Float::with_val(prec.bits(), v), Mp::digits_of(prec))
    }
    fn from_ratio(n: i64, d: i64, prec: Precision) -> Mp {
        let mut f = Float::with_val(prec.bits(), n);
        f /= d;
        Mp::new(f, Mp::digits_of(prec))
    }
    fn parse_decimal(s: &str, prec: Precision) -> Option<Mp> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(Mp::new(Float::with_val(prec.bits(), parsed), Mp::digits_of(prec)))
    }
    fn pi_at(prec: Precision) -> Mp {
        Mp::new(Float::with_val(prec.bits(), Constant::Pi), Mp::digits_of(prec))
    }
    fn precision(&self) -> Precision {
        Precision::Digits(self.digits)
    }
    fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
    fn abs(&self) -> Mp {
        self.wrap(self.value.clone().abs())
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
    fn to_decimal(&self, digits: usize) -> String {
        self.value.to_string_radix(10, Some(digits.max(1)))
    }
    fn sub_mul_assign(&mut self, a: &Mp, b: &Mp) {
        self.value -= &a.value * &b.value;
    }
    fn add_mul_assign(&mut self, a: &Mp, b: &Mp) {
        self.value += &a.value * &b.value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact_at_working_precision() {
        let p = Precision::Digits(60);
        let a = Mp::parse_decimal("0.1", p).unwrap();
        let b = Mp::from_ratio(1, 10, p);
        assert_eq!(a, b);
        assert_ne!(a, Mp::from_f64(0.1, p));
    }

    #[test]
    fn elementary_functions_match_known_digits() {
        let p = Precision::Digits(50);
        let one = Mp::one_at(p);
        let e = one.exp().to_decimal(30);
        assert!(e.starts_with("2.71828182845904523536028747135"), "{e}");
        let pi = Mp::pi_at(p).to_decimal(20);
        assert!(pi.starts_with("3.141592653589793238"), "{pi}");
    }

    #[test]
    fn fused_updates() {
        let p = Precision::Digits(40);
        let mut x = Mp::from_f64(10.0, p);
        x.sub_mul_assign(&Mp::from_f64(2.0, p), &Mp::from_f64(3.0, p));
        assert_eq!(x.to_f64(), 4.0);
        x.add_mul_assign(&Mp::from_f64(0.5, p), &Mp::from_f64(4.0, p));
        assert_eq!(x.to_f64(), 6.0);
    }
}
