//! Gaussian elimination of isomorphism entries and splitting of `B_sB_s`.

use std::collections::BTreeMap;

use crate::coxeter::Gen;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg;
use crate::poly::Poly;
use crate::soergelcalc::{BSObject, Bimod, BimodMap};

use super::complex::{add_entry, convolve, tensor_equivalence, Block, ChainMap, Complex, Equivalence};

/// The inverse of a degree-0 endomorphism of `B_w̲`, if it is invertible.
///
/// Entries from `c_e` to `c_f` have polynomial degree `|e| − |f|`, so the
/// map is a constant block-diagonal part `D` plus a nilpotent part `N`, and
/// `(D + N)^{-1} = Σ (−D^{-1}N)^i D^{-1}`.
pub fn invert_degree_zero<F: Field>(phi: &BimodMap<F>) -> Option<BimodMap<F>> {
    if phi.src != phi.tgt || phi.degree != 0 {
        return None;
    }
    let n = phi.src.len();
    let size = 1usize << n;
    let mut dinv_cols: Vec<Vec<Poly<F>>> = vec![vec![Poly::zero(); size]; size];
    let mut ncols: Vec<Vec<Poly<F>>> = vec![vec![Poly::zero(); size]; size];
    for k in 0..=n {
        let class: Vec<usize> = (0..size).filter(|e| e.count_ones() as usize == k).collect();
        let m: Vec<Vec<F>> =
            class.iter().map(|&f| class.iter().map(|&e| phi.entry(f, e).constant_term()).collect()).collect();
        let inv = linalg::invert(&m)?;
        for (r, &f) in class.iter().enumerate() {
            for (c, &e) in class.iter().enumerate() {
                if !inv[r][c].is_zero() {
                    dinv_cols[e][f] = Poly::constant(inv[r][c].clone());
                }
            }
        }
    }
    for e in 0..size {
        for f in 0..size {
            if f.count_ones() != e.count_ones() {
                ncols[e][f] = phi.entry(f, e).clone();
            }
        }
    }
    let w = phi.src.clone();
    let dinv = BimodMap::from_cols(w.clone(), w.clone(), 0, dinv_cols);
    let nmap = BimodMap::from_cols(w.clone(), w.clone(), 0, ncols);
    let step = dinv.compose(&nmap).neg();
    let mut term = dinv.clone();
    let mut total = dinv.clone();
    for _ in 0..n {
        term = step.compose(&term);
        if term.is_zero() {
            break;
        }
        total = total.add(&term);
    }
    debug_assert_eq!(total.compose(phi), BimodMap::identity(&w));
    Some(total)
}

/// The decomposition `B_{u s s u'} ≅ B_{u s u'}(−1) ⊕ B_{u s u'}(1)`.
///
/// Returns `(π_a, ι_a, π_b, ι_b)` with `π_a ι_a = π_b ι_b = id`,
/// `π_a ι_b = π_b ι_a = 0` and `ι_a π_a + ι_b π_b = id`.
pub fn split_maps<F: Field>(
    bm: &Bimod<F>,
    word: &[Gen],
    pos: usize,
) -> (BimodMap<F>, BimodMap<F>, BimodMap<F>, BimodMap<F>) {
    let s = word[pos];
    assert_eq!(word[pos + 1], s);
    let left = &word[..pos];
    let right = &word[pos + 2..];
    let real = bm.realization();
    let delta = real.delta(s).clone();
    let sdelta = real.reflect(&delta, s).neg();
    let mid = |p: &Poly<F>| bm.embed(&[s], &bm.poly_map(p), &[s]);
    let pi_a = bm.merge(s);
    let iota_a = mid(&delta).compose(&bm.split(s));
    let pi_b = bm.merge(s).compose(&mid(&sdelta));
    let iota_b = bm.split(s);
    let e = |m: &BimodMap<F>| bm.embed(left, m, right);
    (e(&pi_a), e(&iota_a), e(&pi_b), e(&iota_b))
}

/// A complex together with an equivalence from a fixed original complex.
#[derive(Clone, Debug)]
pub struct Reduction<F: Field> {
    pub original: Complex<F>,
    pub current: Complex<F>,
    pub equivalence: Equivalence<F>,
}

impl<F: Field> Reduction<F> {
    pub fn new(c: Complex<F>) -> Self {
        Reduction { equivalence: Equivalence::identity(&c), current: c.clone(), original: c }
    }

    pub fn verify(&self) -> bool {
        self.equivalence.verify(&self.original, &self.current)
    }

    /// Splits the `B_sB_s` at `pos` in term `t` of degree `c`.
    pub fn split(&mut self, bm: &Bimod<F>, c: i32, t: usize, pos: usize) {
        let obj = self.current.term(c)[t].clone();
        let (pa, ia, pb, ib) = split_maps(bm, &obj.word, pos);
        let mut word = obj.word.clone();
        word.remove(pos);
        let n = self.current.term(c).len();
        let mut next = self.current.clone();
        replace_term(&mut next, c, t, BSObject::new(word.clone(), obj.shift - 1));
        next.push_term(c, BSObject::new(word, obj.shift + 1));
        let mut out_d: Block<F> = BTreeMap::new();
        for (&(z, s), m) in self.current.d(c) {
            if s == t {
                add_entry(&mut out_d, (z, t), m.compose(&ia));
                add_entry(&mut out_d, (z, n), m.compose(&ib));
            } else {
                out_d.insert((z, s), m.clone());
            }
        }
        *next.d_mut(c) = out_d;
        if self.current.term(c - 1).len() > 0 {
            let mut in_d: Block<F> = BTreeMap::new();
            for (&(r, z), m) in self.current.d(c - 1) {
                if r == t {
                    add_entry(&mut in_d, (t, z), pa.compose(m));
                    add_entry(&mut in_d, (n, z), pb.compose(m));
                } else {
                    in_d.insert((r, z), m.clone());
                }
            }
            *next.d_mut(c - 1) = in_d;
        }
        let eq = &mut self.equivalence;
        let mut fblk: Block<F> = BTreeMap::new();
        for (&(r, o), m) in eq.f.block(c) {
            if r == t {
                add_entry(&mut fblk, (t, o), pa.compose(m));
                add_entry(&mut fblk, (n, o), pb.compose(m));
            } else {
                fblk.insert((r, o), m.clone());
            }
        }
        eq.f.comps.insert(c, fblk);
        let mut gblk: Block<F> = BTreeMap::new();
        for (&(o, s), m) in eq.g.block(c) {
            if s == t {
                add_entry(&mut gblk, (o, t), m.compose(&ia));
                add_entry(&mut gblk, (o, n), m.compose(&ib));
            } else {
                gblk.insert((o, s), m.clone());
            }
        }
        eq.g.comps.insert(c, gblk);
        self.current = next;
    }

    /// Cancels the isomorphism `φ = d(y ← x)` from degree `c` to `c + 1`.
    pub fn eliminate(&mut self, c: i32, x: usize, y: usize, phi_inv: &BimodMap<F>) {
        let cur = &self.current;
        let beta: BTreeMap<usize, &BimodMap<F>> =
            cur.d(c).iter().filter(|((t, s), _)| *t == y && *s != x).map(|((_, s), m)| (*s, m)).collect();
        let gamma: BTreeMap<usize, &BimodMap<F>> =
            cur.d(c).iter().filter(|((t, s), _)| *s == x && *t != y).map(|((t, _), m)| (*t, m)).collect();
        let ra = |a: usize| a - usize::from(a > x);
        let rb = |b: usize| b - usize::from(b > y);

        let mut next = cur.clone();
        remove_term(&mut next, c, x);
        remove_term(&mut next, c + 1, y);
        let mut dc: Block<F> = BTreeMap::new();
        for (&(t, s), m) in cur.d(c) {
            if t != y && s != x {
                dc.insert((rb(t), ra(s)), m.clone());
            }
        }
        let gphi: BTreeMap<usize, BimodMap<F>> = gamma.iter().map(|(b, g)| (*b, g.compose(phi_inv))).collect();
        for (b, gp) in &gphi {
            for (a, be) in &beta {
                add_entry(&mut dc, (rb(*b), ra(*a)), gp.compose(be).neg());
            }
        }
        *next.d_mut(c) = dc;
        let prev: Block<F> =
            cur.d(c - 1).iter().filter(|((t, _), _)| *t != x).map(|(&(t, s), m)| ((ra(t), s), m.clone())).collect();
        if !cur.term(c - 1).is_empty() {
            *next.d_mut(c - 1) = prev;
        }
        let post: Block<F> =
            cur.d(c + 1).iter().filter(|((_, s), _)| *s != y).map(|(&(t, s), m)| ((t, rb(s)), m.clone())).collect();
        if !cur.term(c + 2).is_empty() {
            *next.d_mut(c + 1) = post;
        }

        let eq = &mut self.equivalence;
        // h' = h + G ∘ (x ← y: −φ^{-1}) ∘ F, using the old F and G.
        let gx: Vec<(usize, BimodMap<F>)> = eq
            .g
            .block(c)
            .iter()
            .filter(|((_, s), _)| *s == x)
            .map(|(&(o, _), m)| (o, m.compose(phi_inv)))
            .collect();
        let fy: Vec<(usize, &BimodMap<F>)> =
            eq.f.block(c + 1).iter().filter(|((r, _), _)| *r == y).map(|(&(_, o), m)| (o, m)).collect();
        let mut hblk = eq.h.block(c + 1).clone();
        for (o2, gm) in &gx {
            for (o1, fm) in &fy {
                add_entry(&mut hblk, (*o2, *o1), gm.compose(fm).neg());
            }
        }
        if !hblk.is_empty() {
            eq.h.comps.insert(c + 1, hblk);
        }

        // F'^{c+1}(b) = F(b) − γ_b φ^{-1} F(y); other rows reindexed.
        let mut f1: Block<F> = BTreeMap::new();
        for (&(r, o), m) in eq.f.block(c + 1) {
            if r != y {
                add_entry(&mut f1, (rb(r), o), m.clone());
            }
        }
        for (b, gp) in &gphi {
            for (o, fm) in &fy {
                add_entry(&mut f1, (rb(*b), *o), gp.compose(fm).neg());
            }
        }
        let f0: Block<F> =
            eq.f.block(c).iter().filter(|((r, _), _)| *r != x).map(|(&(r, o), m)| ((ra(r), o), m.clone())).collect();
        // G'^c(a) = G(a) − G(x) φ^{-1} β_a.
        let mut g0: Block<F> = BTreeMap::new();
        for (&(o, s), m) in eq.g.block(c) {
            if s != x {
                add_entry(&mut g0, (o, ra(s)), m.clone());
            }
        }
        for (o, gm) in &gx {
            for (a, be) in &beta {
                add_entry(&mut g0, (*o, ra(*a)), gm.compose(be).neg());
            }
        }
        let g1: Block<F> =
            eq.g.block(c + 1).iter().filter(|((_, s), _)| *s != y).map(|(&(o, s), m)| ((o, rb(s)), m.clone())).collect();
        eq.f.comps.insert(c, f0);
        eq.f.comps.insert(c + 1, f1);
        eq.g.comps.insert(c, g0);
        eq.g.comps.insert(c + 1, g1);
        eq.f.comps.retain(|_, b| !b.is_empty());
        eq.g.comps.retain(|_, b| !b.is_empty());

        next.trim();
        self.current = next;
    }

    /// The first `B_sB_s` occurrence, lowest degree first.
    fn find_split(&self) -> Option<(i32, usize, usize)> {
        for c in self.current.degrees() {
            for (i, t) in self.current.term(c).iter().enumerate() {
                if let Some(p) = t.word.windows(2).position(|w| w[0] == w[1]) {
                    return Some((c, i, p));
                }
            }
        }
        None
    }

    /// The first isomorphism entry by (degree, shift, indices).
    fn find_iso(&self) -> Option<(i32, usize, usize, BimodMap<F>)> {
        let cur = &self.current;
        let mut best: Option<(i32, i32, usize, usize)> = None;
        for c in cur.degrees() {
            for (&(y, x), m) in cur.d(c) {
                let (a, b) = (&cur.term(c)[x], &cur.term(c + 1)[y]);
                if a.word != b.word || a.shift != b.shift {
                    continue;
                }
                let key = (c, a.shift, y, x);
                if best.is_some_and(|bk| bk <= key) {
                    continue;
                }
                if invert_degree_zero(m).is_some() {
                    best = Some(key);
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (c, _, y, x) = best?;
        let inv = invert_degree_zero(&cur.d(c)[&(y, x)])?;
        Some((c, x, y, inv))
    }

    /// Alternates splitting and elimination until neither applies.
    pub fn minimize(&mut self, bm: &Bimod<F>, split: bool) {
        loop {
            if split {
                if let Some((c, t, p)) = self.find_split() {
                    self.split(bm, c, t, p);
                    continue;
                }
            }
            match self.find_iso() {
                Some((c, x, y, inv)) => self.eliminate(c, x, y, &inv),
                None => break,
            }
        }
    }
}

fn remove_term<F: Field>(c: &mut Complex<F>, deg: i32, idx: usize) {
    let mut terms: Vec<BSObject> = c.term(deg).to_vec();
    terms.remove(idx);
    set_terms(c, deg, terms);
}

fn replace_term<F: Field>(c: &mut Complex<F>, deg: i32, idx: usize, obj: BSObject) {
    let mut terms: Vec<BSObject> = c.term(deg).to_vec();
    terms[idx] = obj;
    set_terms(c, deg, terms);
}

fn set_terms<F: Field>(c: &mut Complex<F>, deg: i32, terms: Vec<BSObject>) {
    c.replace_terms(deg, terms);
}

/// Minimizes `c` and returns the reduction with its certificate.
pub fn minimize<F: Field>(bm: &Bimod<F>, c: &Complex<F>) -> Reduction<F> {
    let mut r = Reduction::new(c.clone());
    r.minimize(bm, true);
    r
}

/// `L_1 ⋆ (L_2 ⋆ ( … L_k ⋆ R_k … ) ⋆ R_2) ⋆ R_1`, reduced from the inside out.
///
/// Each `L_i ⋆ X ⋆ R_i` is bracketed as `(L_i ⋆ X) ⋆ R_i`. The returned
/// reduction starts from the raw nested convolution.
pub fn nested_reduction<F: Field>(bm: &Bimod<F>, left: &[Complex<F>], right: &[Complex<F>]) -> Result<Reduction<F>> {
    if left.len() != right.len() {
        return Err(Error::Precondition("nested reduction needs matching factor lists".into()));
    }
    let mut acc = Reduction::new(Complex::unit());
    for (l, r) in left.iter().zip(right.iter()).rev() {
        let raw = convolve(bm, &convolve(bm, l, &acc.original), r);
        let mid = convolve(bm, &convolve(bm, l, &acc.current), r);
        let lifted = tensor_equivalence(bm, l, &acc.original, &acc.current, r, &acc.equivalence);
        let mut inner = Reduction::new(mid);
        inner.minimize(bm, true);
        acc = Reduction { original: raw, equivalence: lifted.then(&inner.equivalence), current: inner.current };
    }
    Ok(acc)
}

impl<F: Field> ChainMap<F> {
    /// Number of nonzero component entries.
    pub fn num_entries(&self) -> usize {
        self.comps.values().map(|b| b.len()).sum()
    }
}
