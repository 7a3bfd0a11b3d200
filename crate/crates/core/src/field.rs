//! Exact coefficient fields.
//!
//! Two families are provided: [`Rational`] (the field ℚ, with an `i64` fast
//! path that promotes to arbitrary precision on overflow) and [`Fp`], the
//! prime field of a compile-time modulus.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact field.
pub trait Field:
    Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// The image of `num/den`, or `None` when `den` vanishes in the field.
    fn from_ratio(num: i64, den: i64) -> Option<Self> {
        Self::from_i64(den).inv().map(|d| Self::from_i64(num).mul(&d))
    }
    fn characteristic() -> u64;
    /// Short name used in reports, e.g. `Q` or `F5`.
    fn name() -> String;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    /// Parses the bit-exact syntax `p` or `p/q`.
    fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
        match t.split_once('/') {
            None => Ok(Self::from_i64(t.parse::<i64>().map_err(|_| bad())?)),
            Some((p, q)) => {
                let p = p.trim().parse::<i64>().map_err(|_| bad())?;
                let q = q.trim().parse::<i64>().map_err(|_| bad())?;
                Self::from_ratio(p, q)
                    .ok_or_else(|| Error::Parse(format!("denominator vanishes in {}: {s:?}", Self::name())))
            }
        }
    }
}

/// An element of ℚ in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Rational {
    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Rational::Small(a, b),
            _ => Rational::Big(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Rational::Small(a, b),
            _ => Rational::Big(Box::new(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self {
            Rational::Small(n, d) => Some((*n, *d)),
            Rational::Big(_) => None,
        }
    }

    fn binop(
        &self,
        other: &Self,
        small: impl Fn(i128, i128, i128, i128) -> Option<(i128, i128)>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            if let Some((n, m)) = small(*a as i128, *b as i128, *c as i128, *d as i128) {
                return Rational::from_i128(n, m);
            }
        }
        Rational::from_big(big(self.to_big(), other.to_big()))
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational::Small(0, 1)
    }
    fn one() -> Self {
        Rational::Small(1, 1)
    }
    fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }
    fn add(&self, other: &Self) -> Self {
        self.binop(
            other,
            |a, b, c, d| Some((a.checked_mul(d)?.checked_add(c.checked_mul(b)?)?, b.checked_mul(d)?)),
            |x, y| x + y,
        )
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        self.binop(
            other,
            |a, b, c, d| Some((a.checked_mul(c)?, b.checked_mul(d)?)),
            |x, y| x * y,
        )
    }
    fn neg(&self) -> Self {
        match self {
            Rational::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational::Small(m, *d),
                None => Rational::from_big(-self.to_big()),
            },
            Rational::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Rational::Small(n, d) => Rational::from_i128(*d as i128, *n as i128),
            Rational::Big(b) => Rational::from_big(b.recip()),
        })
    }
    fn from_i64(n: i64) -> Self {
        Rational::Small(n, 1)
    }
    fn from_ratio(num: i64, den: i64) -> Option<Self> {
        (den != 0).then(|| Rational::from_i128(num as i128, den as i128))
    }
    fn characteristic() -> u64 {
        0
    }
    fn name() -> String {
        "Q".to_string()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) => {
                if b.denom().is_one() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Rational {
    /// Sign of the value: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small(n, _) => n.signum() as i32,
            Rational::Big(b) => {
                if b.is_zero() {
                    0
                } else if b.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// The prime field of order `P`; `P` must be a prime below 2³².
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        Fp(acc)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        Fp((self.0 + other.0) % P)
    }
    fn sub(&self, other: &Self) -> Self {
        Fp((self.0 + P - other.0) % P)
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(self.0 * other.0 % P)
    }
    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }
    fn inv(&self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow(P - 2))
    }
    fn from_i64(n: i64) -> Self {
        Fp(n.rem_euclid(P as i64) as u64)
    }
    fn characteristic() -> u64 {
        P
    }
    fn name() -> String {
        format!("F{P}")
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_overflow_promotes_and_demotes() {
        let big = Rational::from_i64(i64::MAX);
        let sq = big.mul(&big);
        assert!(matches!(sq, Rational::Big(_)));
        let back = sq.div(&big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(back, Rational::Small(_, _)));
    }

    #[test]
    fn rational_parse_and_display() {
        let x = Rational::parse("-6/4").unwrap();
        assert_eq!(x.to_string(), "-3/2");
        assert!(Rational::parse("1/0").is_err());
        assert_eq!(Rational::parse(" 7 ").unwrap(), Rational::from_i64(7));
    }

    #[test]
    fn prime_field_inverse() {
        for n in 1..5 {
            let x = F5::from_i64(n);
            assert!(x.mul(&x.inv().unwrap()).is_one());
        }
        assert_eq!(F5::from_ratio(1, 2), Some(F5::from_i64(3)));
        assert_eq!(F2::from_ratio(1, 2), None);
        assert_eq!(F5::from_i64(-1), F5::from_i64(4));
    }
}
