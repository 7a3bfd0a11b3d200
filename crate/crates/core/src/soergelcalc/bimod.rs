//! Concrete Bott–Samelson bimodules.
//!
//! `B_w̲ = R ⊗_{R^{s_1}} R ⊗ ⋯ ⊗_{R^{s_k}} R` is free as a right `R`-module
//! on `c_e = x_1 ⊗ ⋯ ⊗ x_k ⊗ 1` with `x_i ∈ {1, δ_{s_i}}`; bit `i` of the
//! index `e` records `x_i = δ_{s_i}`. With the shift convention of the
//! diagrammatic category, `deg c_e = 2|e| − k`.
//!
//! A bimodule map is stored by its right-module matrix: column `e` is the
//! image of `c_e`, written in the basis of the target.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::coxeter::Gen;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{sparse_kernel, SparseVec};
use crate::poly::{count_monomials, Mono, Poly};
use crate::realization::Realization;

pub type Word = Vec<Gen>;

/// `deg c_e` in `B_w̲` for a word of length `len`.
pub fn basis_degree(len: usize, e: usize) -> i32 {
    2 * e.count_ones() as i32 - len as i32
}

/// An element of `B_w̲`: right coefficients on the basis `c_e`.
pub type BElem<F> = Vec<Poly<F>>;

fn add_into<F: Field>(acc: &mut [Poly<F>], v: &[Poly<F>], coeff: &Poly<F>) {
    if coeff.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            a.add_assign(&x.mul(coeff));
        }
    }
}

/// A homogeneous bimodule map `B_src → B_tgt` of the given degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BimodMap<F: Field> {
    pub src: Word,
    pub tgt: Word,
    pub degree: i32,
    cols: Vec<BElem<F>>,
}

impl<F: Field> BimodMap<F> {
    pub fn zero(src: Word, tgt: Word, degree: i32) -> Self {
        let cols = vec![vec![Poly::zero(); 1 << tgt.len()]; 1 << src.len()];
        BimodMap { src, tgt, degree, cols }
    }

    pub fn identity(word: &[Gen]) -> Self {
        let n = 1usize << word.len();
        let cols = (0..n)
            .map(|e| {
                let mut c = vec![Poly::zero(); n];
                c[e] = Poly::one();
                c
            })
            .collect();
        BimodMap { src: word.to_vec(), tgt: word.to_vec(), degree: 0, cols }
    }

    pub fn from_cols(src: Word, tgt: Word, degree: i32, cols: Vec<BElem<F>>) -> Self {
        assert_eq!(cols.len(), 1 << src.len());
        debug_assert!(cols.iter().all(|c| c.len() == 1 << tgt.len()));
        let m = BimodMap { src, tgt, degree, cols };
        debug_assert!(m.is_homogeneous(), "inhomogeneous bimodule map {:?}", m);
        m
    }

    pub fn cols(&self) -> &[BElem<F>] {
        &self.cols
    }

    pub fn col(&self, e: usize) -> &BElem<F> {
        &self.cols[e]
    }

    pub fn entry(&self, f: usize, e: usize) -> &Poly<F> {
        &self.cols[e][f]
    }

    /// Polynomial degree forced on entry `(f, e)`, if nonnegative.
    pub fn entry_degree(&self, f: usize, e: usize) -> Option<u32> {
        let g = self.degree + basis_degree(self.src.len(), e) - basis_degree(self.tgt.len(), f);
        (g >= 0 && g % 2 == 0).then_some((g / 2) as u32)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.cols.iter().enumerate().all(|(e, c)| {
            c.iter().enumerate().all(|(f, p)| {
                p.is_zero() || (p.is_homogeneous() && self.entry_degree(f, e) == p.degree())
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.iter().all(Poly::is_zero))
    }

    fn check_same_shape(&self, other: &Self) {
        assert_eq!((&self.src, &self.tgt), (&other.src, &other.tgt), "bimodule maps between different objects");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_shape(other);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        assert_eq!(self.degree, other.degree, "adding maps of different degrees");
        let cols = self.cols.iter().zip(&other.cols).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect()).collect();
        BimodMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree, cols }
    }

    pub fn neg(&self) -> Self {
        let cols = self.cols.iter().map(|c| c.iter().map(Poly::neg).collect()).collect();
        BimodMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree, cols }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        let cols = self.cols.iter().map(|col| col.iter().map(|p| p.scale(c)).collect()).collect();
        BimodMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree, cols }
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &BimodMap<F>) -> BimodMap<F> {
        assert_eq!(f.tgt, self.src, "composing maps with mismatched boundaries");
        let n = 1usize << self.tgt.len();
        let cols = f
            .cols
            .iter()
            .map(|col| {
                let mut acc = vec![Poly::zero(); n];
                for (g, p) in col.iter().enumerate() {
                    add_into(&mut acc, &self.cols[g], p);
                }
                acc
            })
            .collect();
        BimodMap { src: f.src.clone(), tgt: self.tgt.clone(), degree: self.degree + f.degree, cols }
    }

    /// Post-composition with right multiplication by `p` (equivalently
    /// pre-composition; both are the same bimodule map).
    pub fn right_mul(&self, p: &Poly<F>) -> Self {
        let d = 2 * p.degree().unwrap_or(0) as i32;
        let cols = self.cols.iter().map(|c| c.iter().map(|x| x.mul(p)).collect()).collect();
        BimodMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree + d, cols }
    }

    /// Applies the map to an element of `B_src`.
    pub fn apply(&self, v: &[Poly<F>]) -> BElem<F> {
        let mut acc = vec![Poly::zero(); 1 << self.tgt.len()];
        for (g, p) in v.iter().enumerate() {
            add_into(&mut acc, &self.cols[g], p);
        }
        acc
    }

    /// Sparse coordinates over `(e, f, monomial)`; `stride` bounds the
    /// monomial indices.
    pub fn flatten(&self, real: &Realization<F>, stride: usize) -> SparseVec<F> {
        let nf = 1usize << self.tgt.len();
        let mut out = Vec::new();
        for (e, col) in self.cols.iter().enumerate() {
            for (f, p) in col.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let k = p.degree().expect("nonzero");
                let basis = real.basis(k);
                let base = (e * nf + f) * stride;
                let mut entries: Vec<(usize, F)> =
                    p.terms().iter().map(|(m, c)| (base + basis.index[m], c.clone())).collect();
                entries.sort_by_key(|t| t.0);
                out.extend(entries);
            }
        }
        out
    }

    /// The largest polynomial degree any entry can have.
    pub fn max_entry_degree(&self) -> u32 {
        let g = self.degree + self.src.len() as i32 + self.tgt.len() as i32;
        if g < 0 {
            0
        } else {
            (g / 2) as u32
        }
    }
}

/// Evaluation context: a realization plus memo tables.
pub struct Bimod<F: Field> {
    real: Arc<Realization<F>>,
    left: RwLock<HashMap<(Word, Mono, usize), Arc<BElem<F>>>>,
    braids: RwLock<HashMap<(Gen, Gen), Arc<BimodMap<F>>>>,
}

impl<F: Field> Bimod<F> {
    pub fn new(real: Arc<Realization<F>>) -> Self {
        Bimod { real, left: RwLock::new(HashMap::new()), braids: RwLock::new(HashMap::new()) }
    }

    pub fn realization(&self) -> &Arc<Realization<F>> {
        &self.real
    }

    fn left_mul_mono(&self, m: Mono, word: &[Gen], e: usize) -> Arc<BElem<F>> {
        let key = (word.to_vec(), m, e);
        if let Some(v) = self.left.read().get(&key) {
            return v.clone();
        }
        let out = if word.is_empty() {
            vec![Poly::term(m, F::one())]
        } else {
            let s = word[0];
            let rest = &word[1..];
            let mut f = Poly::term(m, F::one());
            if e & 1 == 1 {
                f = f.mul(self.real.delta(s));
            }
            let (g, h) = self.real.invariant_decompose(&f, s);
            let gv = self.left_mul_poly(&g, rest, e >> 1);
            let hv = self.left_mul_poly(&h, rest, e >> 1);
            let mut out = vec![Poly::zero(); 1 << word.len()];
            for (i, p) in gv.into_iter().enumerate() {
                out[2 * i] = p;
            }
            for (i, p) in hv.into_iter().enumerate() {
                out[2 * i + 1] = p;
            }
            out
        };
        let out = Arc::new(out);
        self.left.write().insert(key, out.clone());
        out
    }

    /// `p · c_e` in `B_word`.
    pub fn left_mul_poly(&self, p: &Poly<F>, word: &[Gen], e: usize) -> BElem<F> {
        let mut acc = vec![Poly::zero(); 1 << word.len()];
        for (m, c) in p.terms() {
            let v = self.left_mul_mono(*m, word, e);
            for (a, x) in acc.iter_mut().zip(v.iter()) {
                if !x.is_zero() {
                    a.add_assign(&x.scale(c));
                }
            }
        }
        acc
    }

    /// `p · v` for an element `v` of `B_word`.
    pub fn left_mul_elem(&self, p: &Poly<F>, word: &[Gen], v: &[Poly<F>]) -> BElem<F> {
        let mut acc = vec![Poly::zero(); 1 << word.len()];
        for (f, q) in v.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let pc = self.left_mul_poly(p, word, f);
            add_into(&mut acc, &pc, q);
        }
        acc
    }

    /// `λ_p ∘ φ`.
    pub fn left_mul_map(&self, p: &Poly<F>, phi: &BimodMap<F>) -> BimodMap<F> {
        let d = 2 * p.degree().unwrap_or(0) as i32;
        let cols = phi.cols.iter().map(|c| self.left_mul_elem(p, &phi.tgt, c)).collect();
        BimodMap { src: phi.src.clone(), tgt: phi.tgt.clone(), degree: phi.degree + d, cols }
    }

    /// `id_{B_a} ⊗ φ`.
    pub fn tensor_id_left(&self, a: &[Gen], phi: &BimodMap<F>) -> BimodMap<F> {
        if a.is_empty() {
            return phi.clone();
        }
        let na = 1usize << a.len();
        let nt = 1usize << (a.len() + phi.tgt.len());
        let mut cols = Vec::with_capacity(na << phi.src.len());
        for e2 in 0..(1usize << phi.src.len()) {
            for e1 in 0..na {
                let mut c = vec![Poly::zero(); nt];
                for (f2, p) in phi.cols[e2].iter().enumerate() {
                    if !p.is_zero() {
                        c[e1 + (f2 << a.len())] = p.clone();
                    }
                }
                cols.push(c);
            }
        }
        let mut src = a.to_vec();
        src.extend_from_slice(&phi.src);
        let mut tgt = a.to_vec();
        tgt.extend_from_slice(&phi.tgt);
        BimodMap { src, tgt, degree: phi.degree, cols }
    }

    /// `φ ⊗ id_{B_b}`.
    pub fn tensor_id_right(&self, phi: &BimodMap<F>, b: &[Gen]) -> BimodMap<F> {
        if b.is_empty() {
            return phi.clone();
        }
        let ls = phi.src.len();
        let lt = phi.tgt.len();
        let nt = 1usize << (lt + b.len());
        let mut cols = Vec::with_capacity(1 << (ls + b.len()));
        for e2 in 0..(1usize << b.len()) {
            for e1 in 0..(1usize << ls) {
                let mut c = vec![Poly::zero(); nt];
                for (f, p) in phi.cols[e1].iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let v = self.left_mul_poly(p, b, e2);
                    for (g, q) in v.into_iter().enumerate() {
                        if !q.is_zero() {
                            c[f + (g << lt)].add_assign(&q);
                        }
                    }
                }
                cols.push(c);
            }
        }
        let mut src = phi.src.clone();
        src.extend_from_slice(b);
        let mut tgt = phi.tgt.clone();
        tgt.extend_from_slice(b);
        BimodMap { src, tgt, degree: phi.degree, cols }
    }

    /// `φ ⊗ ψ`.
    pub fn tensor(&self, phi: &BimodMap<F>, psi: &BimodMap<F>) -> BimodMap<F> {
        let right = self.tensor_id_left(&phi.src, psi);
        let left = self.tensor_id_right(phi, &psi.tgt);
        left.compose(&right)
    }

    /// `id_{B_left} ⊗ φ ⊗ id_{B_right}`.
    pub fn embed(&self, left: &[Gen], phi: &BimodMap<F>, right: &[Gen]) -> BimodMap<F> {
        self.tensor_id_left(left, &self.tensor_id_right(phi, right))
    }

    /// Multiplication by `f` on `B_∅`.
    pub fn poly_map(&self, f: &Poly<F>) -> BimodMap<F> {
        let d = 2 * f.degree().unwrap_or(0) as i32;
        BimodMap { src: vec![], tgt: vec![], degree: d, cols: vec![vec![f.clone()]] }
    }

    /// `B_s → B_∅(1)`, `f ⊗ g ↦ fg`.
    pub fn dot(&self, s: Gen) -> BimodMap<F> {
        BimodMap::from_cols(vec![s], vec![], 1, vec![vec![Poly::one()], vec![self.real.delta(s).clone()]])
    }

    /// `B_∅ → B_s(1)`, `1 ↦ δ_s ⊗ 1 + 1 ⊗ (α_s − δ_s)`.
    pub fn enddot(&self, s: Gen) -> BimodMap<F> {
        let a = self.real.alpha(s).sub(self.real.delta(s));
        BimodMap::from_cols(vec![], vec![s], 1, vec![vec![a, Poly::one()]])
    }

    /// `B_s B_s → B_s(−1)`, `f ⊗ g ⊗ h ↦ f ∂_s(g) ⊗ h`.
    pub fn merge(&self, s: Gen) -> BimodMap<F> {
        let z = || vec![Poly::zero(), Poly::zero()];
        BimodMap::from_cols(
            vec![s, s],
            vec![s],
            -1,
            vec![z(), z(), vec![Poly::one(), Poly::zero()], vec![Poly::zero(), Poly::one()]],
        )
    }

    /// `B_s → B_s B_s(−1)`, `f ⊗ g ↦ f ⊗ 1 ⊗ g`.
    pub fn split(&self, s: Gen) -> BimodMap<F> {
        let unit = |i: usize| {
            let mut c = vec![Poly::zero(); 4];
            c[i] = Poly::one();
            c
        };
        BimodMap::from_cols(vec![s], vec![s, s], -1, vec![unit(0), unit(1)])
    }

    /// Alternating word `s t s …` of length `m`.
    pub fn alternating(s: Gen, t: Gen, m: usize) -> Word {
        (0..m).map(|i| if i % 2 == 0 { s } else { t }).collect()
    }

    /// The `2m`-valent vertex `B_{sts…} → B_{tst…}` (degree 0), normalized by
    /// `c_{0…0} ↦ c_{0…0}`. Only `m ≤ 3` is evaluated.
    pub fn braid(&self, s: Gen, t: Gen) -> Result<Arc<BimodMap<F>>> {
        if let Some(b) = self.braids.read().get(&(s, t)) {
            return Ok(b.clone());
        }
        let sys = self.real.system();
        let m = match sys.m(s, t) {
            Some(m) if m <= 3 => m as usize,
            Some(m) => return Err(Error::UnsupportedValence(m.to_string())),
            None => return Err(Error::UnsupportedValence("inf".into())),
        };
        let src = Self::alternating(s, t, m);
        let tgt = Self::alternating(t, s, m);
        let basis = self.hom_basis(&src, &tgt, 0);
        if basis.len() != 1 {
            return Err(Error::EvaluationNotFaithful {
                domain: sys.expr_string(&src),
                codomain: sys.expr_string(&tgt),
                degree: 0,
            });
        }
        let b = &basis[0];
        let c = b.entry(0, 0).constant_term();
        let inv = c.inv().ok_or_else(|| Error::EvaluationNotFaithful {
            domain: sys.expr_string(&src),
            codomain: sys.expr_string(&tgt),
            degree: 0,
        })?;
        let map = Arc::new(b.scale(&inv));
        self.braids.write().insert((s, t), map.clone());
        Ok(map)
    }

    /// A basis of all bimodule maps `B_src → B_tgt` of the given degree,
    /// found by solving left-linearity on the right-module matrix.
    pub fn hom_basis(&self, src: &[Gen], tgt: &[Gen], degree: i32) -> Vec<BimodMap<F>> {
        let ns = 1usize << src.len();
        let nt = 1usize << tgt.len();
        let dim = self.real.dim();
        let shape = BimodMap::<F>::zero(src.to_vec(), tgt.to_vec(), degree);
        let kmax = shape.max_entry_degree() + 1;
        let stride = count_monomials(dim, kmax).max(1);
        let xs: Vec<Poly<F>> = (0..dim).map(Poly::var).collect();
        let a: Vec<Vec<BElem<F>>> = (0..ns).map(|e| xs.iter().map(|x| self.left_mul_poly(x, src, e)).collect()).collect();
        let b: Vec<Vec<BElem<F>>> = (0..nt).map(|f| xs.iter().map(|x| self.left_mul_poly(x, tgt, f)).collect()).collect();
        let key = |i: usize, e: usize, f: usize| ((i * ns + e) * nt + f) * stride;
        let mut unknowns = Vec::new();
        let mut columns: Vec<SparseVec<F>> = Vec::new();
        for e in 0..ns {
            for f in 0..nt {
                let Some(k) = shape.entry_degree(f, e) else { continue };
                for &mu in &self.real.basis(k).monos {
                    let mut entries: Vec<(usize, F)> = Vec::new();
                    let mut push = |base: usize, p: &Poly<F>, sign: bool| {
                        for (m, c) in p.terms() {
                            let idx = self.real.basis(m.degree()).index[m];
                            entries.push((base + idx, if sign { c.clone() } else { c.neg() }));
                        }
                    };
                    for (ep, row) in a.iter().enumerate() {
                        for (i, v) in row.iter().enumerate() {
                            if !v[e].is_zero() {
                                push(key(i, ep, f), &v[e].mul_mono(mu, &F::one()), true);
                            }
                        }
                    }
                    for (i, v) in b[f].iter().enumerate() {
                        for (fp, p) in v.iter().enumerate() {
                            if !p.is_zero() {
                                push(key(i, e, fp), &p.mul_mono(mu, &F::one()), false);
                            }
                        }
                    }
                    columns.push(crate::linalg::sparse_from(entries));
                    unknowns.push((e, f, mu));
                }
            }
        }
        sparse_kernel(&columns)
            .into_iter()
            .map(|k| {
                let mut m = shape.clone();
                for (j, c) in k.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let (e, f, mu) = unknowns[j];
                    m.cols[e][f].add_assign(&Poly::term(mu, c.clone()));
                }
                m
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    fn ctx(name: &str) -> Bimod<Rational> {
        Bimod::new(Arc::new(Realization::standard(name).unwrap()))
    }

    #[test]
    fn barbell_is_alpha() {
        let b = ctx("A2");
        let bar = b.dot(0).compose(&b.enddot(0));
        assert_eq!(bar, b.poly_map(b.realization().alpha(0)));
    }

    #[test]
    fn frobenius_unit_and_needle() {
        let b = ctx("A2");
        let s = 0;
        let unit = b.merge(s).compose(&b.tensor_id_left(&[s], &b.enddot(s)));
        assert_eq!(unit, BimodMap::identity(&[s]));
        let counit = b.tensor_id_left(&[s], &b.dot(s)).compose(&b.split(s));
        assert_eq!(counit, BimodMap::identity(&[s]));
        let needle = b.merge(s).compose(&b.split(s)).compose(&b.enddot(s));
        assert!(needle.is_zero());
    }

    #[test]
    fn left_multiplication_is_a_module_action() {
        let b = ctx("A2");
        let r = b.realization().clone();
        let word = vec![0, 1, 0];
        let p = r.alpha(0).clone();
        let q = r.delta(1).mul(r.alpha(1));
        for e in 0..8 {
            let pq = b.left_mul_poly(&p.mul(&q), &word, e);
            let step = b.left_mul_elem(&p, &word, &b.left_mul_poly(&q, &word, e));
            assert_eq!(pq, step);
        }
    }

    #[test]
    fn hom_dimension_matches_small_cases() {
        let b = ctx("A2");
        assert_eq!(b.hom_basis(&[0], &[], 1).len(), 1);
        assert_eq!(b.hom_basis(&[0], &[0], 0).len(), 1);
        assert_eq!(b.hom_basis(&[0], &[0], 2).len(), 3);
        assert_eq!(b.hom_basis(&[0], &[1], 0).len(), 0);
    }

    #[test]
    fn braid_maps_exist_for_m_two_and_three() {
        let b = ctx("A2");
        let f = b.braid(0, 1).unwrap();
        assert_eq!((f.src.clone(), f.tgt.clone()), (vec![0, 1, 0], vec![1, 0, 1]));
        let c = ctx("A1xA1");
        let g = c.braid(0, 1).unwrap();
        let h = c.braid(1, 0).unwrap();
        assert_eq!(h.compose(&g), BimodMap::identity(&[0, 1]));
        let b2 = ctx("B2");
        assert!(matches!(b2.braid(0, 1), Err(Error::UnsupportedValence(_))));
    }
}
