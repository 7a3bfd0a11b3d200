//! Complexes of graded free `R`-modules and the Koszul complex `Λ ⊗ M`.
//!
//! A summand `R(j)` in cohomological degree `c` has its generator in total
//! degree `c − j` once the polynomial variables are given degree 2; the
//! differential then has total degree 1.

use std::collections::{BTreeMap, HashMap};

use crate::field::Field;
use crate::linalg::{sparse_kernel, SparseEchelon, SparseVec};
use crate::poly::{monomials, Mono, Poly};

type PolyBlock<F> = BTreeMap<(usize, usize), Poly<F>>;

/// A bounded complex of graded free modules over a polynomial ring in
/// `nvars` variables; the term list holds the shifts `j` of each `R(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeComplex<F: Field> {
    nvars: usize,
    lo: i32,
    terms: Vec<Vec<i32>>,
    diff: Vec<PolyBlock<F>>,
    empty: PolyBlock<F>,
}

/// Cohomology of `Λ ⊗ M` in a window of total degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulReport {
    pub window: (i32, i32),
    pub dims: BTreeMap<i32, usize>,
}

impl KoszulReport {
    pub fn nonzero_degrees(&self) -> Vec<i32> {
        self.dims.iter().filter(|(_, &d)| d > 0).map(|(n, _)| *n).collect()
    }
}

impl<F: Field> FreeComplex<F> {
    pub fn new(nvars: usize) -> Self {
        FreeComplex { nvars, lo: 0, terms: vec![], diff: vec![], empty: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32
    }

    pub fn degrees(&self) -> std::ops::Range<i32> {
        self.lo..self.hi()
    }

    pub fn term(&self, c: i32) -> &[i32] {
        let k = c - self.lo;
        if k < 0 || k as usize >= self.terms.len() {
            &[]
        } else {
            &self.terms[k as usize]
        }
    }

    pub fn d(&self, c: i32) -> &PolyBlock<F> {
        let k = c - self.lo;
        if k < 0 || k as usize >= self.diff.len() {
            &self.empty
        } else {
            &self.diff[k as usize]
        }
    }

    fn ensure(&mut self, c: i32) {
        if self.terms.is_empty() {
            self.lo = c;
        }
        while c < self.lo {
            self.terms.insert(0, vec![]);
            self.diff.insert(0, BTreeMap::new());
            self.lo -= 1;
        }
        while c >= self.hi() {
            self.terms.push(vec![]);
            self.diff.push(BTreeMap::new());
        }
    }

    pub fn push_term(&mut self, c: i32, shift: i32) -> usize {
        self.ensure(c);
        let k = (c - self.lo) as usize;
        self.terms[k].push(shift);
        self.terms[k].len() - 1
    }

    /// Sets the entry `R(j_src) → R(j_tgt)` from degree `c`.
    pub fn set_d(&mut self, c: i32, tgt: usize, src: usize, p: Poly<F>) {
        if p.is_zero() {
            if c >= self.lo && c < self.hi() {
                let k = (c - self.lo) as usize;
                self.diff[k].remove(&(tgt, src));
            }
            return;
        }
        let gap = self.term(c + 1)[tgt] - self.term(c)[src];
        assert!(
            p.is_homogeneous() && gap >= 0 && gap % 2 == 0 && p.degree() == Some((gap / 2) as u32),
            "free differential entry of the wrong degree"
        );
        self.ensure(c);
        let k = (c - self.lo) as usize;
        self.diff[k].insert((tgt, src), p);
    }

    pub fn add_d(&mut self, c: i32, tgt: usize, src: usize, p: &Poly<F>) {
        let cur = self.d(c).get(&(tgt, src)).cloned().unwrap_or_else(Poly::zero);
        self.set_d(c, tgt, src, cur.add(p));
    }

    pub fn num_terms(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.num_terms() == 0
    }

    /// `(c, j)` for every summand.
    pub fn summands(&self) -> Vec<(i32, i32)> {
        self.degrees().flat_map(|c| self.term(c).iter().map(move |&j| (c, j))).collect()
    }

    /// Total degrees `c − j` of the generators.
    pub fn generator_degrees(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.summands().into_iter().map(|(c, j)| c - j).collect();
        v.sort_unstable();
        v
    }

    pub fn is_valid(&self) -> bool {
        for c in self.degrees() {
            let next = self.d(c + 1);
            let mut acc: PolyBlock<F> = BTreeMap::new();
            for (&(t, s), p) in self.d(c) {
                for (&(u, t2), q) in next {
                    if t2 == t {
                        let e = acc.entry((u, s)).or_insert_with(Poly::zero);
                        *e = e.add(&q.mul(p));
                    }
                }
            }
            if acc.values().any(|p| !p.is_zero()) {
                return false;
            }
        }
        true
    }

    /// `(n)`: shifts `j += n`, differential times `(−1)^n`.
    pub fn shift_internal(&self, n: i32) -> Self {
        let mut out = self.clone();
        for ts in &mut out.terms {
            for j in ts {
                *j += n;
            }
        }
        if n.rem_euclid(2) == 1 {
            for b in &mut out.diff {
                for p in b.values_mut() {
                    *p = p.neg();
                }
            }
        }
        out
    }

    /// `[n]`.
    pub fn shift_cohomological(&self, n: i32) -> Self {
        let mut out = self.clone();
        out.lo -= n;
        if n.rem_euclid(2) == 1 {
            for b in &mut out.diff {
                for p in b.values_mut() {
                    *p = p.neg();
                }
            }
        }
        out
    }

    /// `⟨n⟩ = (−n)[n]`.
    pub fn shift_angle(&self, n: i32) -> Self {
        self.shift_internal(-n).shift_cohomological(n)
    }

    fn find_unit(&self) -> Option<(i32, usize, usize, F)> {
        for c in self.degrees() {
            for (&(t, s), p) in self.d(c) {
                if self.term(c)[s] == self.term(c + 1)[t] && !p.is_zero() {
                    return Some((c, s, t, p.constant_term()));
                }
            }
        }
        None
    }

    /// Cancels invertible constant entries until none remain.
    pub fn minimize(&self) -> Self {
        let mut cur = self.clone();
        while let Some((c, x, y, u)) = cur.find_unit() {
            cur = cur.cancel(c, x, y, &u);
        }
        cur.trim();
        cur
    }

    fn cancel(&self, c: i32, x: usize, y: usize, u: &F) -> Self {
        let uinv = u.inv().expect("unit entry");
        let ra = |a: usize| a - usize::from(a > x);
        let rb = |b: usize| b - usize::from(b > y);
        let mut out = FreeComplex::new(self.nvars);
        for d in self.degrees() {
            out.ensure(d);
            let mut ts = self.term(d).to_vec();
            if d == c {
                ts.remove(x);
            }
            if d == c + 1 {
                ts.remove(y);
            }
            let k = (d - out.lo) as usize;
            out.terms[k] = ts;
        }
        for d in self.degrees() {
            for (&(t, s), p) in self.d(d) {
                let keep = match d {
                    _ if d == c - 1 => t != x,
                    _ if d == c => t != y && s != x,
                    _ if d == c + 1 => s != y,
                    _ => true,
                };
                if !keep {
                    continue;
                }
                let t2 = if d == c - 1 { ra(t) } else if d == c { rb(t) } else { t };
                let s2 = if d == c { ra(s) } else if d == c + 1 { rb(s) } else { s };
                out.add_d(d, t2, s2, p);
            }
        }
        let beta: Vec<(usize, &Poly<F>)> =
            self.d(c).iter().filter(|((t, s), _)| *t == y && *s != x).map(|((_, s), p)| (*s, p)).collect();
        let gamma: Vec<(usize, &Poly<F>)> =
            self.d(c).iter().filter(|((t, s), _)| *s == x && *t != y).map(|((t, _), p)| (*t, p)).collect();
        for (b, g) in &gamma {
            for (a, be) in &beta {
                out.add_d(c, rb(*b), ra(*a), &g.mul(be).scale(&uinv).neg());
            }
        }
        out
    }

    fn trim(&mut self) {
        while self.terms.last().is_some_and(Vec::is_empty) {
            self.terms.pop();
            self.diff.pop();
        }
        while self.terms.first().is_some_and(Vec::is_empty) {
            self.terms.remove(0);
            self.diff.remove(0);
            self.lo += 1;
        }
        if self.terms.is_empty() {
            self.lo = 0;
        }
    }

    /// True when no entry between equal shifts is nonzero.
    pub fn is_minimal(&self) -> bool {
        self.find_unit().is_none()
    }

    /// The graded vector space complex `k ⊗_R M`, returned as bigraded
    /// cohomology dimensions keyed by `(c, j)`.
    pub fn reduced_cohomology(&self) -> BTreeMap<(i32, i32), usize> {
        let mut out = BTreeMap::new();
        let mut js: Vec<i32> = self.summands().into_iter().map(|(_, j)| j).collect();
        js.sort_unstable();
        js.dedup();
        for &j in &js {
            for c in self.degrees() {
                let here: Vec<usize> = (0..self.term(c).len()).filter(|&i| self.term(c)[i] == j).collect();
                if here.is_empty() {
                    continue;
                }
                let rank_out = constant_rank(self.d(c), &here, self.term(c + 1), j);
                let prev: Vec<usize> = (0..self.term(c - 1).len()).filter(|&i| self.term(c - 1)[i] == j).collect();
                let rank_in = constant_rank(self.d(c - 1), &prev, self.term(c), j);
                let dim = here.len() - rank_out - rank_in;
                if dim > 0 {
                    out.insert((c, j), dim);
                }
            }
        }
        out
    }

    fn total_basis(&self, n: i32) -> Vec<(i32, usize, Mono)> {
        let mut out = Vec::new();
        for c in self.degrees() {
            for (i, &j) in self.term(c).iter().enumerate() {
                let rest = n - (c - j);
                if rest >= 0 && rest % 2 == 0 {
                    for m in monomials(self.nvars, (rest / 2) as u32) {
                        out.push((c, i, m));
                    }
                }
            }
        }
        out
    }

    /// `d(μ g)` expressed over `(c + 1, index, monomial)`.
    fn apply_d(&self, c: i32, i: usize, mu: Mono) -> Vec<((i32, usize, Mono), F)> {
        let mut out = Vec::new();
        for (&(t, s), p) in self.d(c) {
            if s != i {
                continue;
            }
            for (m, x) in p.terms() {
                out.push(((c + 1, t, m.mul(mu)), x.clone()));
            }
        }
        out
    }

    /// `dim H^n(M)` in total degree `n`.
    pub fn cohomology_dim(&self, n: i32) -> usize {
        let cur = self.total_basis(n);
        let rank_out = self.total_rank(n);
        let rank_in = self.total_rank(n - 1);
        cur.len() - rank_out - rank_in
    }

    fn total_columns(&self, n: i32) -> Vec<SparseVec<F>> {
        let src = self.total_basis(n);
        let tgt = self.total_basis(n + 1);
        let index: HashMap<(i32, usize, Mono), usize> = tgt.iter().enumerate().map(|(k, b)| (*b, k)).collect();
        src.iter()
            .map(|&(c, i, mu)| {
                let mut v: SparseVec<F> = self.apply_d(c, i, mu).into_iter().map(|(k, x)| (index[&k], x)).collect();
                v.sort_by_key(|t| t.0);
                crate::linalg::sparse_from(v)
            })
            .collect()
    }

    fn total_rank(&self, n: i32) -> usize {
        let mut e = SparseEchelon::new();
        for v in self.total_columns(n) {
            e.insert(&v);
        }
        e.rank()
    }

    /// Total-degree cohomology of `Λ ⊗ M` for `n` in `window`.
    pub fn koszul(&self, window: (i32, i32)) -> KoszulReport {
        let k = Koszul { m: self };
        let dims = (window.0..=window.1).map(|n| (n, k.cohomology_dim(n))).collect();
        KoszulReport { window, dims }
    }

    /// Rank of `H^0(M) → H^0(Λ ⊗ M)` induced by `m ↦ 1 ⊗ m`, together with
    /// `dim H^0(M)` and `dim H^0(Λ ⊗ M)`.
    pub fn koszul_h0_comparison(&self) -> (usize, usize, usize) {
        let k = Koszul { m: self };
        let h0m = self.cohomology_dim(0);
        let h0k = k.cohomology_dim(0);
        let cycles = sparse_kernel(&self.total_columns(0));
        let src = self.total_basis(0);
        let kb = k.basis(0);
        let kindex: HashMap<(usize, i32, usize, Mono), usize> = kb.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        let mut e = SparseEchelon::new();
        for v in k.columns(-1) {
            e.insert(&v);
        }
        let base = e.rank();
        for z in cycles {
            let v: Vec<(usize, F)> = z
                .iter()
                .zip(&src)
                .filter(|(x, _)| !x.is_zero())
                .map(|(x, &(c, i, mu))| (kindex[&(0usize, c, i, mu)], x.clone()))
                .collect();
            e.insert(&crate::linalg::sparse_from(v));
        }
        (e.rank() - base, h0m, h0k)
    }
}

fn constant_rank<F: Field>(block: &PolyBlock<F>, src: &[usize], tgt_terms: &[i32], j: i32) -> usize {
    let rows: Vec<usize> = (0..tgt_terms.len()).filter(|&i| tgt_terms[i] == j).collect();
    let row_index: HashMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let mut e = SparseEchelon::new();
    for &s in src {
        let v: Vec<(usize, F)> = block
            .iter()
            .filter(|((t, s2), _)| *s2 == s && row_index.contains_key(t))
            .map(|((t, _), p)| (row_index[t], p.constant_term()))
            .collect();
        e.insert(&crate::linalg::sparse_from(v));
    }
    e.rank()
}

struct Koszul<'a, F: Field> {
    m: &'a FreeComplex<F>,
}

impl<'a, F: Field> Koszul<'a, F> {
    /// Basis `(J, c, i, μ)` of `(Λ ⊗ M)^n`, `J` a bitmask of exterior generators.
    fn basis(&self, n: i32) -> Vec<(usize, i32, usize, Mono)> {
        let r = self.m.nvars;
        let mut out = Vec::new();
        for mask in 0..(1usize << r) {
            let k = mask.count_ones() as i32;
            for (c, i, mu) in self.m.total_basis(n - k) {
                out.push((mask, c, i, mu));
            }
        }
        out
    }

    fn columns(&self, n: i32) -> Vec<SparseVec<F>> {
        let src = self.basis(n);
        let tgt = self.basis(n + 1);
        let index: HashMap<(usize, i32, usize, Mono), usize> = tgt.iter().enumerate().map(|(k, b)| (*b, k)).collect();
        src.iter()
            .map(|&(mask, c, i, mu)| {
                let mut v = Vec::new();
                let k = mask.count_ones();
                let mut pos = 0;
                for var in 0..self.m.nvars {
                    if mask & (1 << var) == 0 {
                        continue;
                    }
                    let sign = if pos % 2 == 0 { F::one() } else { F::one().neg() };
                    let key = (mask & !(1 << var), c, i, mu.mul(Mono::var(var)));
                    v.push((index[&key], sign));
                    pos += 1;
                }
                let sign = if k % 2 == 0 { F::one() } else { F::one().neg() };
                for ((c2, t, m2), x) in self.m.apply_d(c, i, mu) {
                    v.push((index[&(mask, c2, t, m2)], x.mul(&sign)));
                }
                crate::linalg::sparse_from(v)
            })
            .collect()
    }

    fn rank(&self, n: i32) -> usize {
        let mut e = SparseEchelon::new();
        for v in self.columns(n) {
            e.insert(&v);
        }
        e.rank()
    }

    fn cohomology_dim(&self, n: i32) -> usize {
        self.basis(n).len() - self.rank(n) - self.rank(n - 1)
    }
}

impl<F: Field> FreeComplex<F> {
    /// `M ⊗_R N` with `d = d_M ⊗ 1 + (−1)^p 1 ⊗ d_N`.
    pub fn tensor(&self, other: &FreeComplex<F>) -> FreeComplex<F> {
        assert_eq!(self.nvars, other.nvars);
        let mut out = FreeComplex::new(self.nvars);
        let mut index: HashMap<(i32, usize, i32, usize), usize> = HashMap::new();
        for n in (self.lo + other.lo)..(self.hi() + other.hi()) {
            for p in self.degrees() {
                let q = n - p;
                for (i, &a) in self.term(p).iter().enumerate() {
                    for (j, &b) in other.term(q).iter().enumerate() {
                        index.insert((p, i, q, j), out.push_term(n, a + b));
                    }
                }
            }
        }
        for (&(p, i, q, j), &src) in &index {
            let n = p + q;
            for (&(t, s), x) in self.d(p) {
                if s == i {
                    out.add_d(n, index[&(p + 1, t, q, j)], src, x);
                }
            }
            let sign = if p.rem_euclid(2) == 0 { F::one() } else { F::one().neg() };
            for (&(t, s), x) in other.d(q) {
                if s == j {
                    out.add_d(n, index[&(p, i, q + 1, t)], src, &x.scale(&sign));
                }
            }
        }
        out
    }
}

impl<F: Field> FreeComplex<F> {
    /// Builds from summand lists and entries, for tests and generators.
    pub fn from_parts(nvars: usize, terms: BTreeMap<i32, Vec<i32>>, entries: Vec<(i32, usize, usize, Poly<F>)>) -> Self {
        let mut m = FreeComplex::new(nvars);
        for (c, js) in terms {
            for j in js {
                m.push_term(c, j);
            }
        }
        for (c, t, s, p) in entries {
            m.add_d(c, t, s, &p);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, Rational};

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn koszul_of_free_rank_one_is_the_field() {
        let mut m = FreeComplex::<Rational>::new(2);
        m.push_term(0, 0);
        let rep = m.koszul((-3, 4));
        assert_eq!(rep.nonzero_degrees(), vec![0]);
        assert_eq!(rep.dims[&0], 1);
        assert_eq!(m.cohomology_dim(0), 1);
        assert_eq!(m.cohomology_dim(2), 2);
    }

    #[test]
    fn koszul_cohomology_sits_at_generator_degrees() {
        // [R(-1) --x0--> R(1)] in degrees 0, 1: generators at 1 and 0.
        let mut m = FreeComplex::<Rational>::new(2);
        m.push_term(0, -1);
        m.push_term(1, 1);
        m.set_d(0, 0, 0, Poly::var(0));
        assert!(m.is_valid() && m.is_minimal());
        assert_eq!(m.generator_degrees(), vec![0, 1]);
        let rep = m.koszul((-2, 4));
        assert_eq!(rep.nonzero_degrees(), vec![0, 1]);
    }

    #[test]
    fn minimization_cancels_units() {
        let mut m = FreeComplex::<Rational>::new(1);
        m.push_term(0, 0);
        m.push_term(0, -2);
        m.push_term(1, 0);
        m.set_d(0, 0, 0, Poly::constant(q(3)));
        m.set_d(0, 0, 1, Poly::var(0));
        let min = m.minimize();
        assert_eq!(min.summands(), vec![(0, -2)]);
        assert_eq!(min.koszul((-2, 3)), m.koszul((-2, 3)));
        let (rank, a, b) = m.koszul_h0_comparison();
        assert_eq!((rank, a, b), (0, 0, 0));
    }

    #[test]
    fn reduced_cohomology_counts_constant_ranks() {
        let mut m = FreeComplex::<Rational>::new(1);
        m.push_term(0, 2);
        m.push_term(1, 2);
        m.push_term(1, 4);
        m.set_d(0, 0, 0, Poly::constant(q(1)));
        m.set_d(0, 1, 0, Poly::var(0));
        let h = m.reduced_cohomology();
        assert_eq!(h.into_iter().collect::<Vec<_>>(), vec![((1, 4), 1)]);
    }
}
