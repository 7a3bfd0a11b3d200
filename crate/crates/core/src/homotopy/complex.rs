//! Bounded complexes of shifted Bott–Samelson objects and chain maps.

use std::collections::BTreeMap;

use crate::coxeter::Gen;
use crate::error::Result;
use crate::field::Field;
use crate::hecke::{HeckeAlgebra, HeckeElement, LaurentPoly};
use crate::soergelcalc::{BSObject, Bimod, BimodMap, Soergel};

/// A matrix of bimodule maps keyed by `(target index, source index)`.
pub type Block<F> = BTreeMap<(usize, usize), BimodMap<F>>;

/// `g ∘ f` for blocks.
pub fn block_compose<F: Field>(g: &Block<F>, f: &Block<F>) -> Block<F> {
    let mut by_src: BTreeMap<usize, Vec<(usize, &BimodMap<F>)>> = BTreeMap::new();
    for (&(k, j), m) in g {
        by_src.entry(j).or_default().push((k, m));
    }
    let mut out: Block<F> = BTreeMap::new();
    for (&(j, i), fm) in f {
        let Some(gs) = by_src.get(&j) else { continue };
        for &(k, gm) in gs {
            let c = gm.compose(fm);
            if c.is_zero() {
                continue;
            }
            add_entry(&mut out, (k, i), c);
        }
    }
    out
}

pub fn add_entry<F: Field>(b: &mut Block<F>, key: (usize, usize), m: BimodMap<F>) {
    if m.is_zero() {
        return;
    }
    match b.remove(&key) {
        Some(old) => {
            let s = old.add(&m);
            if !s.is_zero() {
                b.insert(key, s);
            }
        }
        None => {
            b.insert(key, m);
        }
    }
}

pub fn block_add<F: Field>(a: &Block<F>, b: &Block<F>) -> Block<F> {
    let mut out = a.clone();
    for (k, m) in b {
        add_entry(&mut out, *k, m.clone());
    }
    out
}

pub fn block_neg<F: Field>(a: &Block<F>) -> Block<F> {
    a.iter().map(|(k, m)| (*k, m.neg())).collect()
}

pub fn block_sub<F: Field>(a: &Block<F>, b: &Block<F>) -> Block<F> {
    block_add(a, &block_neg(b))
}

pub fn block_is_zero<F: Field>(a: &Block<F>) -> bool {
    a.values().all(BimodMap::is_zero)
}

/// A bounded complex; `terms[k]` sits in cohomological degree `lo + k` and
/// `diff[k]` maps it to degree `lo + k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<F: Field> {
    lo: i32,
    terms: Vec<Vec<BSObject>>,
    diff: Vec<Block<F>>,
    empty: Block<F>,
}

impl<F: Field> Complex<F> {
    pub fn zero() -> Self {
        Complex { lo: 0, terms: vec![], diff: vec![], empty: BTreeMap::new() }
    }

    /// A single object in cohomological degree `c`.
    pub fn single(obj: BSObject, c: i32) -> Self {
        Complex { lo: c, terms: vec![vec![obj]], diff: vec![BTreeMap::new()], empty: BTreeMap::new() }
    }

    /// Terms without differential, degrees `lo, lo + 1, …`.
    pub fn from_terms(lo: i32, terms: Vec<Vec<BSObject>>) -> Self {
        let n = terms.len();
        let mut c = Complex { lo, terms, diff: vec![BTreeMap::new(); n], empty: BTreeMap::new() };
        c.trim();
        c
    }

    /// `B_∅` in degree 0.
    pub fn unit() -> Self {
        Self::single(BSObject::new(vec![], 0), 0)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// One past the top nonzero degree.
    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> {
        self.lo..self.hi()
    }

    pub fn term(&self, c: i32) -> &[BSObject] {
        let k = c - self.lo;
        if k < 0 || k as usize >= self.terms.len() {
            &[]
        } else {
            &self.terms[k as usize]
        }
    }

    /// The differential out of degree `c`.
    pub fn d(&self, c: i32) -> &Block<F> {
        let k = c - self.lo;
        if k < 0 || k as usize >= self.diff.len() {
            &self.empty
        } else {
            &self.diff[k as usize]
        }
    }

    pub fn d_mut(&mut self, c: i32) -> &mut Block<F> {
        let k = (c - self.lo) as usize;
        &mut self.diff[k]
    }

    pub fn set_d(&mut self, c: i32, tgt: usize, src: usize, m: BimodMap<F>) {
        assert_eq!(m.src, self.term(c)[src].word);
        assert_eq!(m.tgt, self.term(c + 1)[tgt].word);
        assert!(
            m.is_zero() || m.degree == self.term(c + 1)[tgt].shift - self.term(c)[src].shift,
            "differential entry of the wrong degree"
        );
        if m.is_zero() {
            self.d_mut(c).remove(&(tgt, src));
        } else {
            self.d_mut(c).insert((tgt, src), m);
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.num_terms() == 0
    }

    /// Drops empty degrees at both ends.
    pub fn trim(&mut self) {
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

    /// Extends storage so that degrees `lo..hi` exist.
    pub fn ensure_range(&mut self, lo: i32, hi: i32) {
        if self.terms.is_empty() {
            self.lo = lo;
        }
        while self.lo > lo {
            self.terms.insert(0, vec![]);
            self.diff.insert(0, BTreeMap::new());
            self.lo -= 1;
        }
        while self.hi() < hi {
            self.terms.push(vec![]);
            self.diff.push(BTreeMap::new());
        }
    }

    /// Replaces the terms in degree `c`, leaving differentials untouched.
    pub fn replace_terms(&mut self, c: i32, terms: Vec<BSObject>) {
        self.ensure_range(c.min(self.lo), (c + 1).max(self.hi()));
        let k = (c - self.lo) as usize;
        self.terms[k] = terms;
    }

    pub fn push_term(&mut self, c: i32, obj: BSObject) -> usize {
        self.ensure_range(c.min(self.lo), (c + 1).max(self.hi()));
        let k = (c - self.lo) as usize;
        self.terms[k].push(obj);
        self.terms[k].len() - 1
    }

    /// `d ∘ d = 0` and every entry has the degree dictated by the shifts.
    pub fn is_valid(&self) -> bool {
        for c in self.degrees() {
            for (&(t, s), m) in self.d(c) {
                let (src, tgt) = (&self.term(c)[s], &self.term(c + 1)[t]);
                if m.src != src.word || m.tgt != tgt.word || m.degree != tgt.shift - src.shift {
                    return false;
                }
            }
            if !block_is_zero(&block_compose(self.d(c + 1), self.d(c))) {
                return false;
            }
        }
        true
    }

    /// `Σ_c (−1)^c Σ v^n [B_w̲]` with `[B(1)] = v[B]`.
    pub fn character(&self, hecke: &HeckeAlgebra) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for c in self.degrees() {
            let sign = if c.rem_euclid(2) == 0 { 1 } else { -1 };
            for t in self.term(c) {
                out = out.add(&hecke.bs_class(&t.word).scale(&LaurentPoly::monomial(t.shift, sign)));
            }
        }
        out
    }

    /// `(n)`: every term shifted by `n`, differential multiplied by `(−1)^n`.
    pub fn shift_internal(&self, n: i32) -> Self {
        let mut c = self.clone();
        for ts in &mut c.terms {
            for t in ts {
                t.shift += n;
            }
        }
        if n.rem_euclid(2) == 1 {
            c.diff = c.diff.iter().map(block_neg).collect();
        }
        c
    }

    /// `[n]`: `C[n]^c = C^{c+n}`, differential multiplied by `(−1)^n`.
    pub fn shift_cohomological(&self, n: i32) -> Self {
        let mut c = self.clone();
        c.lo -= n;
        if n.rem_euclid(2) == 1 {
            c.diff = c.diff.iter().map(block_neg).collect();
        }
        c
    }

    /// `⟨n⟩ = (−n)[n]`.
    pub fn shift_angle(&self, n: i32) -> Self {
        self.shift_internal(-n).shift_cohomological(n)
    }

    /// Mapping cone of a chain map `f: self → other`:
    /// `Cone^c = self^{c+1} ⊕ other^c`, `d = [[−d, 0], [f, d]]`.
    pub fn cone(&self, other: &Complex<F>, f: &ChainMap<F>) -> Complex<F> {
        assert_eq!(f.degree, 0);
        let lo = (self.lo - 1).min(other.lo);
        let hi = (self.hi() - 1).max(other.hi());
        let mut out = Complex::zero();
        if lo >= hi {
            return out;
        }
        out.ensure_range(lo, hi);
        let mut offsets = BTreeMap::new();
        for c in lo..hi {
            let k = (c - lo) as usize;
            out.terms[k] = self.term(c + 1).to_vec();
            offsets.insert(c, self.term(c + 1).len());
            out.terms[k].extend(other.term(c).iter().cloned());
        }
        for c in lo..hi - 1 {
            let off0 = offsets[&c];
            let off1 = offsets[&(c + 1)];
            let mut b = BTreeMap::new();
            for (&(t, s), m) in self.d(c + 1) {
                b.insert((t, s), m.neg());
            }
            for (&(t, s), m) in f.block(c + 1) {
                b.insert((t + off1, s), m.clone());
            }
            for (&(t, s), m) in other.d(c) {
                b.insert((t + off1, s + off0), m.clone());
            }
            out.diff[(c - lo) as usize] = b;
        }
        out.trim();
        out
    }

    /// The complex with terms permuted within each degree by `perm[c][new] = old`.
    pub fn permuted(&self, perm: &BTreeMap<i32, Vec<usize>>) -> Complex<F> {
        let mut out = self.clone();
        let inv: BTreeMap<i32, Vec<usize>> = perm
            .iter()
            .map(|(c, p)| {
                let mut q = vec![0; p.len()];
                for (new, &old) in p.iter().enumerate() {
                    q[old] = new;
                }
                (*c, q)
            })
            .collect();
        for c in self.degrees() {
            let k = (c - self.lo) as usize;
            if let Some(p) = perm.get(&c) {
                out.terms[k] = p.iter().map(|&o| self.terms[k][o].clone()).collect();
            }
            let map_s = inv.get(&c);
            let map_t = inv.get(&(c + 1));
            out.diff[k] = self.diff[k]
                .iter()
                .map(|(&(t, s), m)| {
                    let t2 = map_t.map_or(t, |q| q[t]);
                    let s2 = map_s.map_or(s, |q| q[s]);
                    ((t2, s2), m.clone())
                })
                .collect();
        }
        out
    }

    /// A compact description: degree → list of `word(shift)`.
    pub fn describe(&self, labels: &dyn Fn(&[Gen]) -> String) -> String {
        let mut parts = Vec::new();
        for c in self.degrees() {
            let ts: Vec<String> = self.term(c).iter().map(|t| format!("{}({})", labels(&t.word), t.shift)).collect();
            parts.push(format!("{}: {}", c, ts.join(" + ")));
        }
        parts.join("; ")
    }
}

/// A map of complexes of cohomological degree `degree`, with components
/// `C^c → D^{c+degree}`.
#[derive(Clone, Debug)]
pub struct ChainMap<F: Field> {
    pub degree: i32,
    pub comps: BTreeMap<i32, Block<F>>,
    empty: Block<F>,
}

impl<F: Field> ChainMap<F> {
    pub fn zero(degree: i32) -> Self {
        ChainMap { degree, comps: BTreeMap::new(), empty: BTreeMap::new() }
    }

    pub fn identity(c: &Complex<F>) -> Self {
        let mut comps = BTreeMap::new();
        for d in c.degrees() {
            let b: Block<F> =
                c.term(d).iter().enumerate().map(|(i, t)| ((i, i), BimodMap::identity(&t.word))).collect();
            comps.insert(d, b);
        }
        ChainMap { degree: 0, comps, empty: BTreeMap::new() }
    }

    pub fn block(&self, c: i32) -> &Block<F> {
        self.comps.get(&c).unwrap_or(&self.empty)
    }

    pub fn set(&mut self, c: i32, tgt: usize, src: usize, m: BimodMap<F>) {
        if m.is_zero() {
            if let Some(b) = self.comps.get_mut(&c) {
                b.remove(&(tgt, src));
            }
        } else {
            self.comps.entry(c).or_default().insert((tgt, src), m);
        }
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &ChainMap<F>) -> ChainMap<F> {
        let mut comps = BTreeMap::new();
        for (&c, fb) in &f.comps {
            let b = block_compose(self.block(c + f.degree), fb);
            if !b.is_empty() {
                comps.insert(c, b);
            }
        }
        ChainMap { degree: self.degree + f.degree, comps, empty: BTreeMap::new() }
    }

    pub fn add(&self, other: &ChainMap<F>) -> ChainMap<F> {
        assert_eq!(self.degree, other.degree);
        let mut comps = self.comps.clone();
        for (c, b) in &other.comps {
            let e = comps.entry(*c).or_default();
            *e = block_add(e, b);
        }
        comps.retain(|_, b| !b.is_empty());
        ChainMap { degree: self.degree, comps, empty: BTreeMap::new() }
    }

    pub fn neg(&self) -> ChainMap<F> {
        ChainMap {
            degree: self.degree,
            comps: self.comps.iter().map(|(c, b)| (*c, block_neg(b))).collect(),
            empty: BTreeMap::new(),
        }
    }

    pub fn sub(&self, other: &ChainMap<F>) -> ChainMap<F> {
        self.add(&other.neg())
    }

    pub fn scale(&self, x: &F) -> ChainMap<F> {
        ChainMap {
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .map(|(c, b)| (*c, b.iter().map(|(k, m)| (*k, m.scale(x))).filter(|(_, m)| !m.is_zero()).collect()))
                .collect(),
            empty: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(block_is_zero)
    }

    /// `d_D ∘ self − (−1)^p self ∘ d_C`, the Hom-complex differential.
    pub fn differential(&self, c: &Complex<F>, d: &Complex<F>) -> ChainMap<F> {
        let p = self.degree;
        let mut out = ChainMap::zero(p + 1);
        let sign_neg = p.rem_euclid(2) == 0;
        for deg in c.degrees().chain(std::iter::once(c.lo() - 1)) {
            let left = block_compose(d.d(deg + p), self.block(deg));
            let right = block_compose(self.block(deg + 1), c.d(deg));
            let b = if sign_neg { block_sub(&left, &right) } else { block_add(&left, &right) };
            let b: Block<F> = b.into_iter().filter(|(_, m)| !m.is_zero()).collect();
            if !b.is_empty() {
                out.comps.insert(deg, b);
            }
        }
        out
    }

    pub fn is_chain_map(&self, c: &Complex<F>, d: &Complex<F>) -> bool {
        self.differential(c, d).is_zero()
    }
}

/// A homotopy equivalence `f: C → C'`, `g: C' → C` with
/// `gf − id = dh + hd` and `fg − id = dk + kd`.
#[derive(Clone, Debug)]
pub struct Equivalence<F: Field> {
    pub f: ChainMap<F>,
    pub g: ChainMap<F>,
    pub h: ChainMap<F>,
    pub k: ChainMap<F>,
}

impl<F: Field> Equivalence<F> {
    pub fn identity(c: &Complex<F>) -> Self {
        Equivalence { f: ChainMap::identity(c), g: ChainMap::identity(c), h: ChainMap::zero(-1), k: ChainMap::zero(-1) }
    }

    /// `C → C' → C''` from `self: C ≃ C'` and `next: C' ≃ C''`.
    pub fn then(&self, next: &Equivalence<F>) -> Equivalence<F> {
        Equivalence {
            f: next.f.compose(&self.f),
            g: self.g.compose(&next.g),
            h: self.g.compose(&next.h).compose(&self.f).add(&self.h),
            k: next.f.compose(&self.k).compose(&next.g).add(&next.k),
        }
    }

    pub fn inverse(&self) -> Equivalence<F> {
        Equivalence { f: self.g.clone(), g: self.f.clone(), h: self.k.clone(), k: self.h.clone() }
    }

    /// Checks all chain-map and homotopy identities exactly.
    pub fn verify(&self, c: &Complex<F>, c2: &Complex<F>) -> bool {
        if !self.f.is_chain_map(c, c2) || !self.g.is_chain_map(c2, c) {
            return false;
        }
        let gf = self.g.compose(&self.f).sub(&ChainMap::identity(c));
        let fg = self.f.compose(&self.g).sub(&ChainMap::identity(c2));
        gf.sub(&self.h.differential(c, c)).is_zero() && fg.sub(&self.k.differential(c2, c2)).is_zero()
    }
}

/// Term indexing of a convolution `C ⋆ D`.
#[derive(Clone, Debug, Default)]
pub struct TensorIndex {
    map: BTreeMap<(i32, usize, i32, usize), (i32, usize)>,
}

impl TensorIndex {
    pub fn get(&self, p: i32, i: usize, q: i32, j: usize) -> (i32, usize) {
        self.map[&(p, i, q, j)]
    }
}

/// `C ⋆ D` with differential `d_C ⊗ id + (−1)^p id ⊗ d_D`.
pub fn convolve_indexed<F: Field>(bm: &Bimod<F>, c: &Complex<F>, d: &Complex<F>) -> (Complex<F>, TensorIndex) {
    let mut out = Complex::zero();
    let mut idx = TensorIndex::default();
    if c.is_zero() || d.is_zero() {
        return (out, idx);
    }
    out.ensure_range(c.lo() + d.lo(), c.hi() + d.hi() - 1);
    for n in c.lo() + d.lo()..c.hi() + d.hi() - 1 {
        for p in c.degrees() {
            let q = n - p;
            for (i, a) in c.term(p).iter().enumerate() {
                for (j, b) in d.term(q).iter().enumerate() {
                    let mut word = a.word.clone();
                    word.extend_from_slice(&b.word);
                    let k = out.push_term(n, BSObject::new(word, a.shift + b.shift));
                    idx.map.insert((p, i, q, j), (n, k));
                }
            }
        }
    }
    for p in c.degrees() {
        for q in d.degrees() {
            for (i, a) in c.term(p).iter().enumerate() {
                for (j, b) in d.term(q).iter().enumerate() {
                    let (n, src) = idx.get(p, i, q, j);
                    for (&(t, s), m) in c.d(p) {
                        if s == i {
                            let (_, tgt) = idx.get(p + 1, t, q, j);
                            let e = bm.tensor_id_right(m, &b.word);
                            add_entry(out.d_mut(n), (tgt, src), e);
                        }
                    }
                    for (&(t, s), m) in d.d(q) {
                        if s == j {
                            let (_, tgt) = idx.get(p, i, q + 1, t);
                            let mut e = bm.tensor_id_left(&a.word, m);
                            if p.rem_euclid(2) == 1 {
                                e = e.neg();
                            }
                            add_entry(out.d_mut(n), (tgt, src), e);
                        }
                    }
                }
            }
        }
    }
    out.trim();
    (out, idx)
}

pub fn convolve<F: Field>(bm: &Bimod<F>, c: &Complex<F>, d: &Complex<F>) -> Complex<F> {
    convolve_indexed(bm, c, d).0
}

/// `id_X ⋆ φ` for `φ: A → B`, as a map `X ⋆ A → X ⋆ B`.
pub fn tensor_left<F: Field>(bm: &Bimod<F>, x: &Complex<F>, a: &Complex<F>, b: &Complex<F>, phi: &ChainMap<F>) -> ChainMap<F> {
    let ia = convolve_indexed_terms(x, a);
    let ib = convolve_indexed_terms(x, b);
    let mut out = ChainMap::zero(phi.degree);
    for p in x.degrees() {
        let sign = (p * phi.degree).rem_euclid(2) == 1;
        for (i, t) in x.term(p).iter().enumerate() {
            for (&q, blk) in &phi.comps {
                for (&(jt, js), m) in blk {
                    let Some(&(n, src)) = ia.get(&(p, i, q, js)) else { continue };
                    let (_, tgt) = ib[&(p, i, q + phi.degree, jt)];
                    let mut e = bm.tensor_id_left(&t.word, m);
                    if sign {
                        e = e.neg();
                    }
                    let blk = out.comps.entry(n).or_default();
                    add_entry(blk, (tgt, src), e);
                }
            }
        }
    }
    out
}

/// `φ ⋆ id_Y` for `φ: A → B`, as a map `A ⋆ Y → B ⋆ Y`.
pub fn tensor_right<F: Field>(bm: &Bimod<F>, a: &Complex<F>, b: &Complex<F>, y: &Complex<F>, phi: &ChainMap<F>) -> ChainMap<F> {
    let ia = convolve_indexed_terms(a, y);
    let ib = convolve_indexed_terms(b, y);
    let mut out = ChainMap::zero(phi.degree);
    for p in y.degrees() {
        for (i, t) in y.term(p).iter().enumerate() {
            for (&q, blk) in &phi.comps {
                for (&(jt, js), m) in blk {
                    let Some(&(n, src)) = ia.get(&(q, js, p, i)) else { continue };
                    let (_, tgt) = ib[&(q + phi.degree, jt, p, i)];
                    let e = bm.tensor_id_right(m, &t.word);
                    let blk = out.comps.entry(n).or_default();
                    add_entry(blk, (tgt, src), e);
                }
            }
        }
    }
    out
}

/// Term indexing of `C ⋆ D` without building differentials.
type TermMap = BTreeMap<(i32, usize, i32, usize), (i32, usize)>;

fn convolve_indexed_terms<F: Field>(c: &Complex<F>, d: &Complex<F>) -> TermMap {
    let mut map = BTreeMap::new();
    if c.is_zero() || d.is_zero() {
        return map;
    }
    for n in c.lo() + d.lo()..c.hi() + d.hi() - 1 {
        let mut k = 0;
        for p in c.degrees() {
            let q = n - p;
            for i in 0..c.term(p).len() {
                for j in 0..d.term(q).len() {
                    map.insert((p, i, q, j), (n, k));
                    k += 1;
                }
            }
        }
    }
    map
}

/// `id_L ⋆ E ⋆ id_R` for an equivalence `E: M ≃ M'`, between
/// `(L ⋆ M) ⋆ R` and `(L ⋆ M') ⋆ R`.
pub fn tensor_equivalence<F: Field>(
    bm: &Bimod<F>,
    l: &Complex<F>,
    m: &Complex<F>,
    m2: &Complex<F>,
    r: &Complex<F>,
    e: &Equivalence<F>,
) -> Equivalence<F> {
    let lm = convolve(bm, l, m);
    let lm2 = convolve(bm, l, m2);
    let lift = |phi: &ChainMap<F>, a: &Complex<F>, b: &Complex<F>, la: &Complex<F>, lb: &Complex<F>| {
        let inner = tensor_left(bm, l, a, b, phi);
        tensor_right(bm, la, lb, r, &inner)
    };
    Equivalence {
        f: lift(&e.f, m, m2, &lm, &lm2),
        g: lift(&e.g, m2, m, &lm2, &lm),
        h: lift(&e.h, m, m, &lm, &lm),
        k: lift(&e.k, m2, m2, &lm2, &lm2),
    }
}

/// `𝔻C`: `(𝔻C)^c = 𝔻(C^{−c})`, shifts negated, entries dualized.
pub fn dualize_complex<F: Field>(ctx: &Soergel<F>, c: &Complex<F>) -> Result<Complex<F>> {
    let mut out = Complex::zero();
    if c.is_zero() {
        return Ok(out);
    }
    let lo = 1 - c.hi();
    out.ensure_range(lo, -c.lo() + 1);
    for d in c.degrees() {
        for t in c.term(d) {
            out.push_term(-d, BSObject::new(t.word.clone(), -t.shift));
        }
    }
    for d in c.degrees() {
        for (&(t, s), m) in c.d(d) {
            // C^d_s → C^{d+1}_t dualizes to (𝔻C)^{−d−1}_t → (𝔻C)^{−d}_s.
            let dm = ctx.dualize(m)?;
            out.set_d(-d - 1, s, t, dm);
        }
    }
    out.trim();
    Ok(out)
}
