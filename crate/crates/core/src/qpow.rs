//! Exact powers `q^x` where `x` may be a half-integer.
//!
//! Exponents are carried in half units: `pow_half(x2)` is `q^(x2/2)`. Odd
//! `x2` needs `q` to be a perfect square, in which case `q^(x2/2) = q0^x2`.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("q^({num}/2) is not rational for q = {q}")]
    IrrationalPower { q: u64, num: i64 },
    #[error("{what} is not an integer: {value}")]
    NonIntegerResult { what: String, value: String },
    #[error("{what} does not fit in 64 bits")]
    Overflow { what: String },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QOrder {
    pub q: u64,
    /// `sqrt(q)` when `q` is a perfect square.
    pub root: Option<u64>,
}

impl QOrder {
    pub fn new(q: u64) -> QOrder {
        let r = q.sqrt();
        QOrder { q, root: (r * r == q).then_some(r) }
    }

    /// `q^(x2/2)` as an exact rational.
    pub fn pow_half(&self, x2: i64) -> Result<BigRational, CountError> {
        let (base, e) = if x2 % 2 == 0 {
            (self.q, x2 / 2)
        } else {
            match self.root {
                Some(r) => (r, x2),
                None => return Err(CountError::IrrationalPower { q: self.q, num: x2 }),
            }
        };
        let p = num_traits::pow(BigInt::from(base), e.unsigned_abs() as usize);
        Ok(if e >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        })
    }

    /// `q^(a + b*e)` with `e = e2/2`, i.e. exponent `2a + b*e2` in half units.
    pub fn pow_e(&self, a: i64, b: i64, e2: i64) -> Result<BigRational, CountError> {
        self.pow_half(2 * a + b * e2)
    }

    /// `q^k` for an integer exponent.
    pub fn pow(&self, k: i64) -> BigRational {
        self.pow_half(2 * k).expect("integer exponents are always rational")
    }

    pub fn q_rat(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.q))
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_integer(value: &BigRational, what: &str) -> Result<BigInt, CountError> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(CountError::NonIntegerResult { what: what.to_string(), value: value.to_string() })
    }
}

pub fn to_i64(value: &BigRational, what: &str) -> Result<i64, CountError> {
    to_integer(value, what)?.to_i64().ok_or_else(|| CountError::Overflow { what: what.to_string() })
}

pub fn big_to_i64(value: &BigInt, what: &str) -> Result<i64, CountError> {
    value.to_i64().ok_or_else(|| CountError::Overflow { what: what.to_string() })
}

/// Renders a rational for reports: integers plainly, otherwise `a/b`.
pub fn fmt_rational(value: &BigRational) -> String {
    if value.is_integer() {
        value.to_integer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_powers_use_the_root() {
        let q = QOrder::new(4);
        assert_eq!(q.pow_half(3).unwrap(), rat(8));
        assert_eq!(q.pow_half(-1).unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(q.pow_e(1, 1, 1).unwrap(), rat(8));
        assert!(QOrder::new(2).pow_half(1).is_err());
        assert_eq!(QOrder::new(2).pow_half(6).unwrap(), rat(8));
    }

    #[test]
    fn integer_checks() {
        assert_eq!(to_i64(&rat(12), "x").unwrap(), 12);
        let half = BigRational::new(1.into(), 2.into());
        assert!(matches!(to_i64(&half, "x"), Err(CountError::NonIntegerResult { .. })));
        assert_eq!(fmt_rational(&half), "1/2");
    }
}
