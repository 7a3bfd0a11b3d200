//! Sparse multivariate polynomials over a [`Field`] in at most eight
//! variables, with exponents packed into a single `u64`.

use std::collections::HashMap;
use std::fmt;

use crate::field::Field;

pub const MAX_VARS: usize = 8;

/// A monomial; the exponent of variable `i` lives in byte `7 - i`, so the
/// integer order on the packed word is the lexicographic monomial order with
/// `x_0 > x_1 > …`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Mono(pub u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn var(i: usize) -> Mono {
        Mono(1u64 << (8 * (7 - i)))
    }

    pub fn from_exponents(exps: &[u8]) -> Mono {
        assert!(exps.len() <= MAX_VARS);
        Mono(exps.iter().enumerate().map(|(i, &e)| (e as u64) << (8 * (7 - i))).sum())
    }

    pub fn exponent(self, i: usize) -> u8 {
        (self.0 >> (8 * (7 - i))) as u8
    }

    pub fn exponents(self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.exponent(i)).collect()
    }

    /// Total degree (polynomial degree, not the doubled grading).
    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exponent(i) as u32).sum()
    }

    pub fn mul(self, other: Mono) -> Mono {
        debug_assert!((0..MAX_VARS).all(|i| self.exponent(i) as u32 + other.exponent(i) as u32 <= 255));
        Mono(self.0 + other.0)
    }

    pub fn divides(self, other: Mono) -> bool {
        (0..MAX_VARS).all(|i| self.exponent(i) <= other.exponent(i))
    }

    pub fn div(self, other: Mono) -> Option<Mono> {
        other.divides(self).then(|| Mono(self.0 - other.0))
    }

    /// Index of the first variable with a nonzero exponent.
    pub fn first_var(self) -> Option<usize> {
        (0..MAX_VARS).find(|&i| self.exponent(i) > 0)
    }
}

/// All monomials of total degree `d` in `n` variables, in decreasing order.
pub fn monomials(n: usize, d: u32) -> Vec<Mono> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Mono>) {
        if i + 1 == n {
            cur.push(left as u8);
            out.push(Mono::from_exponents(cur));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u8);
            rec(n, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        return if d == 0 { vec![Mono::ONE] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(n, 0, d, &mut Vec::new(), &mut out);
    out
}

/// Binomial coefficient `C(n + d - 1, d)`, the number of monomials of degree
/// `d` in `n` variables.
pub fn count_monomials(n: usize, d: u32) -> usize {
    if n == 0 {
        return usize::from(d == 0);
    }
    let mut r: u128 = 1;
    for i in 0..d as u128 {
        r = r * (n as u128 + i) / (i + 1);
    }
    r as usize
}

/// A polynomial: terms sorted by increasing monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<F: Field> {
    terms: Vec<(Mono, F)>,
}

impl<F: Field> Default for Poly<F> {
    fn default() -> Self {
        Poly { terms: Vec::new() }
    }
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::term(Mono::ONE, c)
    }

    pub fn term(m: Mono, c: F) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(i: usize) -> Self {
        Self::term(Mono::var(i), F::one())
    }

    /// The linear form `Σ c_i x_i`.
    pub fn linear(coeffs: &[F]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, c)| (Mono::var(i), c.clone())))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, F)>) -> Self {
        let mut acc: HashMap<Mono, F> = HashMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(x) => *x = x.add(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<(Mono, F)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|t| t.0);
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Mono, F)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> F {
        match self.terms.binary_search_by_key(&m, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => F::zero(),
        }
    }

    /// Constant term.
    pub fn constant_term(&self) -> F {
        self.coeff(Mono::ONE)
    }

    /// Total degree of a homogeneous polynomial (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) => self.terms.iter().all(|t| t.0.degree() == d),
        }
    }

    pub fn leading(&self) -> Option<&(Mono, F)> {
        self.terms.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = a[i].1.add(&b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn add_assign(&mut self, other: &Self) {
        if other.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = other.clone();
            return;
        }
        *self = self.add(other);
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (*m, x.mul(c))).collect() }
    }

    pub fn mul_mono(&self, m: Mono, c: &F) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(n, x)| (n.mul(m), x.mul(c))).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_mono(*m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_mono(*m, c);
        }
        Poly::from_terms(
            self.terms
                .iter()
                .flat_map(|(m, c)| other.terms.iter().map(move |(n, d)| (m.mul(*n), c.mul(d)))),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Poly::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Exact division by a nonzero linear form; `None` if not exact.
    pub fn div_linear(&self, l: &Poly<F>) -> Option<Poly<F>> {
        let (lm, lc) = l.leading()?.clone();
        let j = lm.first_var()?;
        debug_assert_eq!(lm, Mono::var(j));
        let inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.leading().cloned() {
            let q = m.div(Mono::var(j))?;
            let qc = c.mul(&inv);
            rem = rem.sub(&l.mul_mono(q, &qc));
            quot.push((q, qc));
        }
        Some(Poly::from_terms(quot))
    }

    /// Image under the ring map sending `x_i` to `images[i]`.
    pub fn substitute(&self, images: &[Poly<F>]) -> Self {
        let mut cache: HashMap<(usize, u8), Poly<F>> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (i, img) in images.iter().enumerate() {
                let e = m.exponent(i);
                if e == 0 {
                    continue;
                }
                let p = cache.entry((i, e)).or_insert_with(|| img.pow(e as u32)).clone();
                t = t.mul(&p);
            }
            out.add_assign(&t);
        }
        out
    }

    /// Coefficients with respect to a list of monomials.
    pub fn coords(&self, basis_index: &HashMap<Mono, usize>, dim: usize) -> Vec<F> {
        let mut v = vec![F::zero(); dim];
        for (m, c) in &self.terms {
            v[basis_index[m]] = c.clone();
        }
        v
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, name) in names.iter().enumerate() {
                match m.exponent(i) {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            let mono = factors.join("*");
            let coef = c.to_string();
            parts.push(match (mono.is_empty(), coef.as_str()) {
                (true, _) => coef,
                (false, "1") => mono,
                (false, "-1") => format!("-{mono}"),
                (false, _) => format!("{coef}*{mono}"),
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..MAX_VARS).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Rational, F5};
    use proptest::prelude::*;

    type P = Poly<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = P> {
        proptest::collection::vec((proptest::collection::vec(0u8..3, n), -3i64..4), 0..5).prop_map(|ts| {
            Poly::from_terms(ts.into_iter().map(|(e, c)| (Mono::from_exponents(&e), Rational::from_i64(c))))
        })
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(2, 2).len(), 3);
        assert_eq!(count_monomials(2, 2), 3);
        assert_eq!(count_monomials(3, 4), 15);
        assert_eq!(monomials(3, 4).len(), 15);
        assert_eq!(monomials(0, 0), vec![Mono::ONE]);
    }

    #[test]
    fn exact_linear_division() {
        let x = P::var(0);
        let y = P::var(1);
        let l = x.scale(&q(2)).sub(&y);
        let f = l.mul(&x.add(&y.scale(&q(3))));
        assert_eq!(f.div_linear(&l), Some(x.add(&y.scale(&q(3)))));
        assert_eq!(x.mul(&y).add(&P::one()).div_linear(&l), None);
        let xf: Poly<F5> = Poly::var(0);
        assert_eq!(xf.mul(&xf).div_linear(&xf), Some(xf));
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.sub(&a), P::zero());
        }

        #[test]
        fn division_inverts_multiplication(a in arb_poly(2), c0 in 1i64..4, c1 in -3i64..4) {
            let l = P::linear(&[q(c0), q(c1)]);
            prop_assert_eq!(a.mul(&l).div_linear(&l), Some(a));
        }
    }
}
