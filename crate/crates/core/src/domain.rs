//! Commutative domains with exact division.
//!
//! Every quantity the decomposition engine produces lives in the domain
//! itself; the only division it ever performs is [`Domain::exact_div`], and a
//! non-exact division is reported as an error rather than truncated.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

mod poly;

pub use poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("{dividend} is not divisible by {divisor}")]
    NotDivisible { dividend: String, divisor: String },
    #[error("division by zero")]
    ZeroDivisor,
    #[error("fixed-width overflow in {0}; use an arbitrary-precision domain")]
    Overflow(&'static str),
    #[error("cannot parse {literal:?} as {domain}: {reason}")]
    Parse {
        literal: String,
        domain: &'static str,
        reason: String,
    },
}

impl DomainError {
    fn not_divisible(a: &impl fmt::Display, b: &impl fmt::Display) -> Self {
        DomainError::NotDivisible {
            dividend: a.to_string(),
            divisor: b.to_string(),
        }
    }

    fn parse(literal: &str, domain: &'static str, reason: impl Into<String>) -> Self {
        DomainError::Parse {
            literal: literal.to_string(),
            domain,
            reason: reason.into(),
        }
    }
}

/// An element of a commutative ring without zero divisors.
///
/// Arithmetic is fallible only because the fixed-width instance can
/// overflow; the arbitrary-precision instances never fail on `try_add`,
/// `try_sub`, `try_mul` or `try_neg`.
pub trait Domain:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Name used on the command line and in serialized documents.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn from_i64(value: i64) -> Self;

    fn try_add(&self, rhs: &Self) -> Result<Self, DomainError>;
    fn try_sub(&self, rhs: &Self) -> Result<Self, DomainError>;
    fn try_mul(&self, rhs: &Self) -> Result<Self, DomainError>;
    fn try_neg(&self) -> Result<Self, DomainError>;

    /// Returns `q` with `self = rhs * q`.
    ///
    /// Fails with [`DomainError::ZeroDivisor`] when `rhs` is zero and with
    /// [`DomainError::NotDivisible`] when no such `q` exists.
    fn exact_div(&self, rhs: &Self) -> Result<Self, DomainError>;

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self) -> Result<(), DomainError> {
        *self = self.try_add(&a.try_mul(b)?)?;
        Ok(())
    }

    /// Parses the textual element syntax (decimal integers, `p/q`
    /// rationals, `3*x^2-x+1` polynomials).
    fn parse_literal(text: &str) -> Result<Self, DomainError>;

    /// Largest coefficient bit length; used to report coefficient growth.
    fn bit_size(&self) -> u64;

    /// Brings a fraction `num/den` to a canonical form when the domain has
    /// gcds. The default leaves it untouched.
    fn reduce_fraction(num: Self, den: Self) -> (Self, Self) {
        (num, den)
    }
}

impl Domain for i64 {
    const NAME: &'static str = "int";

    fn zero() -> Self {
        0
    }

    fn one() -> Self {
        1
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }

    fn from_i64(value: i64) -> Self {
        value
    }

    fn try_add(&self, rhs: &Self) -> Result<Self, DomainError> {
        self.checked_add(*rhs).ok_or(DomainError::Overflow("add"))
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self, DomainError> {
        self.checked_sub(*rhs).ok_or(DomainError::Overflow("sub"))
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self, DomainError> {
        self.checked_mul(*rhs).ok_or(DomainError::Overflow("mul"))
    }

    fn try_neg(&self) -> Result<Self, DomainError> {
        self.checked_neg().ok_or(DomainError::Overflow("neg"))
    }

    fn exact_div(&self, rhs: &Self) -> Result<Self, DomainError> {
        if *rhs == 0 {
            return Err(DomainError::ZeroDivisor);
        }
        if self.checked_rem(*rhs).ok_or(DomainError::Overflow("div"))? != 0 {
            return Err(DomainError::not_divisible(self, rhs));
        }
        self.checked_div(*rhs).ok_or(DomainError::Overflow("div"))
    }

    fn parse_literal(text: &str) -> Result<Self, DomainError> {
        text.trim()
            .parse::<i64>()
            .map_err(|e| DomainError::parse(text, Self::NAME, e.to_string()))
    }

    fn bit_size(&self) -> u64 {
        u64::from(64 - self.unsigned_abs().leading_zeros())
    }

    fn reduce_fraction(num: Self, den: Self) -> (Self, Self) {
        let g = num.gcd(&den);
        if g == 0 {
            return (num, den);
        }
        let (n, d) = (num / g, den / g);
        match (n.checked_neg(), d.checked_neg()) {
            (Some(a), Some(b)) if d < 0 => (a, b),
            _ => (n, d),
        }
    }
}

impl Domain for BigInt {
    const NAME: &'static str = "bigint";

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    fn from_i64(value: i64) -> Self {
        BigInt::from(value)
    }

    fn try_add(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self + rhs)
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self - rhs)
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self * rhs)
    }

    fn try_neg(&self) -> Result<Self, DomainError> {
        Ok(-self)
    }

    fn exact_div(&self, rhs: &Self) -> Result<Self, DomainError> {
        if Zero::is_zero(rhs) {
            return Err(DomainError::ZeroDivisor);
        }
        if One::is_one(rhs) {
            return Ok(self.clone());
        }
        let (q, r) = self.div_rem(rhs);
        if !Zero::is_zero(&r) {
            return Err(DomainError::not_divisible(self, rhs));
        }
        Ok(q)
    }

    fn add_product(&mut self, a: &Self, b: &Self) -> Result<(), DomainError> {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            *self += a * b;
        }
        Ok(())
    }

    fn parse_literal(text: &str) -> Result<Self, DomainError> {
        text.trim()
            .parse::<BigInt>()
            .map_err(|e| DomainError::parse(text, Self::NAME, e.to_string()))
    }

    fn bit_size(&self) -> u64 {
        self.bits()
    }

    fn reduce_fraction(num: Self, den: Self) -> (Self, Self) {
        let g = num.gcd(&den);
        if Zero::is_zero(&g) {
            return (num, den);
        }
        let (n, d) = (num / &g, den / &g);
        if d.is_negative() {
            (-n, -d)
        } else {
            (n, d)
        }
    }
}

impl Domain for BigRational {
    const NAME: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn try_add(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self + rhs)
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self - rhs)
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self * rhs)
    }

    fn try_neg(&self) -> Result<Self, DomainError> {
        Ok(-self)
    }

    fn exact_div(&self, rhs: &Self) -> Result<Self, DomainError> {
        if Zero::is_zero(rhs) {
            return Err(DomainError::ZeroDivisor);
        }
        Ok(self / rhs)
    }

    fn parse_literal(text: &str) -> Result<Self, DomainError> {
        let text = text.trim();
        let parsed = match text.split_once('/') {
            Some((p, q)) => {
                let p = p
                    .parse::<BigInt>()
                    .map_err(|e| DomainError::parse(text, Self::NAME, e.to_string()))?;
                let q = q
                    .parse::<BigInt>()
                    .map_err(|e| DomainError::parse(text, Self::NAME, e.to_string()))?;
                if Zero::is_zero(&q) {
                    return Err(DomainError::parse(text, Self::NAME, "zero denominator"));
                }
                BigRational::new(p, q)
            }
            None => BigRational::from_integer(
                text.parse::<BigInt>()
                    .map_err(|e| DomainError::parse(text, Self::NAME, e.to_string()))?,
            ),
        };
        Ok(parsed)
    }

    fn bit_size(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn ring_ops_on_integers() {
        assert_eq!(3i64.try_add(&4).unwrap(), 7);
        assert_eq!(10i64.try_mul(&28).unwrap(), 280);
        assert_eq!(big(10).try_mul(&big(28)).unwrap(), big(280));
        assert_eq!(i64::MAX.try_add(&1), Err(DomainError::Overflow("add")));
        assert_eq!(i64::MIN.try_neg(), Err(DomainError::Overflow("neg")));
    }

    #[test]
    fn exact_division() {
        assert_eq!(280i64.exact_div(&7).unwrap(), 40);
        assert_eq!(big(280).exact_div(&big(7)).unwrap(), big(40));
        assert_eq!(42i64.exact_div(&7).unwrap(), 6);
        assert!(matches!(
            5i64.exact_div(&3),
            Err(DomainError::NotDivisible { .. })
        ));
        assert!(matches!(
            big(5).exact_div(&big(3)),
            Err(DomainError::NotDivisible { .. })
        ));
        assert_eq!(5i64.exact_div(&0), Err(DomainError::ZeroDivisor));
        assert_eq!(big(5).exact_div(&big(0)), Err(DomainError::ZeroDivisor));
        assert_eq!(i64::MIN.exact_div(&-1), Err(DomainError::Overflow("div")));
    }

    #[test]
    fn rationals_divide_freely() {
        let a = BigRational::parse_literal("5").unwrap();
        let b = BigRational::parse_literal("3").unwrap();
        assert_eq!(a.exact_div(&b).unwrap().to_string(), "5/3");
        assert_eq!(BigRational::parse_literal("4/6").unwrap().to_string(), "2/3");
        assert!(BigRational::parse_literal("1/0").is_err());
    }

    #[test]
    fn integer_literals() {
        assert_eq!(i64::parse_literal("-17").unwrap(), -17);
        assert_eq!(BigInt::parse_literal("+12").unwrap(), big(12));
        assert!(i64::parse_literal("1.5").is_err());
        assert!(BigInt::parse_literal("x").is_err());
    }

    #[test]
    fn fraction_reduction_normalizes_sign() {
        assert_eq!(BigInt::reduce_fraction(big(4), big(-6)), (big(-2), big(3)));
        assert_eq!(i64::reduce_fraction(7, 21), (1, 3));
        assert_eq!(i64::reduce_fraction(0, -5), (0, 1));
    }

    proptest! {
        #[test]
        fn exact_div_inverts_mul(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            prop_assume!(b != 0);
            let (ba, bb) = (big(a), big(b));
            prop_assert_eq!(ba.try_mul(&bb).unwrap().exact_div(&bb).unwrap(), ba.clone());
            prop_assert_eq!(a.try_mul(&b).unwrap().exact_div(&b).unwrap(), a);
            prop_assert!(Domain::is_zero(&ba.try_sub(&ba).unwrap()));
            prop_assert_eq!(<BigInt as Domain>::one().try_mul(&ba).unwrap(), ba);
        }

        #[test]
        fn ring_axioms_on_bigints(a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000) {
            let (a, b, c) = (big(a), big(b), big(c));
            let ab_c = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
            let a_bc = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(a.try_mul(&b).unwrap(), b.try_mul(&a).unwrap());
            let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
            let rhs = a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let prod = a.try_mul(&b).unwrap();
            prop_assert!(!Domain::is_zero(&prod) || Domain::is_zero(&a) || Domain::is_zero(&b));
        }
    }
}
