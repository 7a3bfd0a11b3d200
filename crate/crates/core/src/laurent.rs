//! Integer Laurent polynomials in one variable `v`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely supported map from exponents to nonzero integer coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// `c·v^k`.
    pub fn monomial(k: i32, c: i64) -> Self {
        let mut p = LaurentPoly::default();
        p.add_term(k, c);
        p
    }

    /// `v^k`.
    pub fn v(k: i32) -> Self {
        Self::monomial(k, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i32) -> i64 {
        self.coeffs.get(&k).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, k: i32, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(k).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&k);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, c) in other.terms() {
            self.add_term(k, c);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, x)| (*k, x * c)).collect() }
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (e + k, *c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = LaurentPoly::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                r.add_term(a + b, x * y);
            }
        }
        r
    }

    /// The involution `v ↦ v⁻¹`.
    pub fn bar(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, c)| (-k, *c)).collect() }
    }

    /// Value at `v = 1`.
    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn has_positive_coefficients(&self) -> bool {
        self.coeffs.values().all(|c| *c > 0)
    }

    /// Parses the output of `Display`, e.g. `1 + 2v^2 - v^-1`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a Laurent polynomial: {text:?}"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(Self::zero());
        }
        let mut p = Self::zero();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let end = body
                .char_indices()
                .skip(1)
                .find(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with('^'))
                .map(|(i, _)| i)
                .unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let (c, k) = match term.split_once('v') {
                None => (term.parse::<i64>().map_err(|_| bad())?, 0),
                Some((c, e)) => {
                    let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| bad())? };
                    let k = if e.is_empty() {
                        1
                    } else {
                        e.strip_prefix('^').ok_or_else(bad)?.parse::<i32>().map_err(|_| bad())?
                    };
                    (c, k)
                }
            };
            p.add_term(k, sign * c);
        }
        Ok(p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (k, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "v")?,
                (1, m) => write!(f, "{m}v")?,
                (k, 1) => write!(f, "v^{k}")?,
                (k, m) => write!(f, "{m}v^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-4i32..5, -3i64..4), 0..5).prop_map(|ts| {
            let mut p = LaurentPoly::zero();
            for (k, c) in ts {
                p.add_term(k, c);
            }
            p
        })
    }

    #[test]
    fn display_forms() {
        assert_eq!(LaurentPoly::v(1).to_string(), "v");
        let p = LaurentPoly::one().add(&LaurentPoly::v(2));
        assert_eq!(p.to_string(), "1 + v^2");
        let q = LaurentPoly::v(-1).sub(&LaurentPoly::v(1));
        assert_eq!(q.to_string(), "v^-1 - v");
        assert_eq!(LaurentPoly::monomial(2, -3).to_string(), "-3v^2");
    }

    proptest! {
        #[test]
        fn parse_roundtrip(p in arb_poly()) {
            prop_assert_eq!(LaurentPoly::parse(&p.to_string()).unwrap(), p);
        }

        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
            prop_assert_eq!(a.bar().bar(), a);
        }
    }
}
