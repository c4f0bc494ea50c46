//! Dense univariate polynomials with integer coefficients, `Z[x]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::DomainError;

/// Coefficients lowest degree first; the zero polynomial has no
/// coefficients and the last stored coefficient is never zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().copied().map(BigInt::from).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    fn add_poly(&self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => BigInt::zero(),
            })
            .collect();
        Poly::new(coeffs)
    }

    fn neg_poly(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn mul_poly(&self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::default();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }

    fn div_exact_poly(&self, rhs: &Poly) -> Result<Poly, DomainError> {
        let (Some(rhs_deg), Some(rhs_lead)) = (rhs.degree(), rhs.leading()) else {
            return Err(DomainError::ZeroDivisor);
        };
        let not_divisible = || DomainError::NotDivisible {
            dividend: self.to_string(),
            divisor: rhs.to_string(),
        };
        let mut rem = self.coeffs.clone();
        let Some(self_deg) = self.degree() else {
            return Ok(Poly::default());
        };
        if self_deg < rhs_deg {
            return Err(not_divisible());
        }
        let mut quot = vec![BigInt::zero(); self_deg - rhs_deg + 1];
        for shift in (0..=self_deg - rhs_deg).rev() {
            let top = &rem[shift + rhs_deg];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(rhs_lead);
            if !r.is_zero() {
                return Err(not_divisible());
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                rem[shift + j] -= &q * b;
            }
            quot[shift] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(not_divisible());
        }
        Ok(Poly::new(quot))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            match deg {
                0 => write!(f, "{magnitude}")?,
                _ => {
                    if !magnitude.is_one() {
                        write!(f, "{magnitude}*")?;
                    }
                    f.write_str("x")?;
                    if deg > 1 {
                        write!(f, "^{deg}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_poly(text: &str) -> Result<Poly, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty literal".into());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > start && !compact[..i].ends_with('^') {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);

    let mut coeffs: Vec<BigInt> = Vec::new();
    for term in terms {
        let (negative, body) = match term.as_bytes().first() {
            Some(b'-') => (true, &term[1..]),
            Some(b'+') => (false, &term[1..]),
            _ => (false, term),
        };
        if body.is_empty() {
            return Err(format!("dangling sign in {term:?}"));
        }
        let (coef, degree) = match body.find('x') {
            None => (
                body.parse::<BigInt>().map_err(|e| e.to_string())?,
                0usize,
            ),
            Some(pos) => {
                let coef_part = body[..pos].strip_suffix('*').unwrap_or(&body[..pos]);
                let coef = if coef_part.is_empty() {
                    if pos > 0 {
                        return Err(format!("missing coefficient in {term:?}"));
                    }
                    BigInt::one()
                } else {
                    coef_part.parse::<BigInt>().map_err(|e| e.to_string())?
                };
                let rest = &body[pos + 1..];
                let degree = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| format!("unexpected {rest:?} after x"))?
                        .parse::<usize>()
                        .map_err(|e| e.to_string())?
                };
                (coef, degree)
            }
        };
        if coeffs.len() <= degree {
            coeffs.resize(degree + 1, BigInt::zero());
        }
        if negative {
            coeffs[degree] -= coef;
        } else {
            coeffs[degree] += coef;
        }
    }
    Ok(Poly::new(coeffs))
}

impl super::Domain for Poly {
    const NAME: &'static str = "poly";

    fn zero() -> Self {
        Poly::default()
    }

    fn one() -> Self {
        Poly::from_coeffs(&[1])
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn from_i64(value: i64) -> Self {
        Poly::from_coeffs(&[value])
    }

    fn try_add(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self.add_poly(rhs))
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self.add_poly(&rhs.neg_poly()))
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self, DomainError> {
        Ok(self.mul_poly(rhs))
    }

    fn try_neg(&self) -> Result<Self, DomainError> {
        Ok(self.neg_poly())
    }

    fn exact_div(&self, rhs: &Self) -> Result<Self, DomainError> {
        self.div_exact_poly(rhs)
    }

    fn parse_literal(text: &str) -> Result<Self, DomainError> {
        parse_poly(text).map_err(|reason| DomainError::Parse {
            literal: text.to_string(),
            domain: Self::NAME,
            reason,
        })
    }

    fn bit_size(&self) -> u64 {
        self.coeffs.iter().map(BigInt::bits).max().unwrap_or(0)
    }
}
