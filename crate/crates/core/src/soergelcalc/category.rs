//! Light leaves, double leaves and Hom spaces between Bott–Samelson objects.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::coxeter::{CoxeterSystem, Decoration, Element, Gen, Subexpression};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hecke::LaurentPoly;
use crate::linalg::SparseEchelon;
use crate::poly::{count_monomials, Mono, Poly};
use crate::realization::Realization;

use super::bimod::{Bimod, BimodMap, Word};
use super::diagram::{Diagram, Generator};

/// Morphisms are represented by their bimodule maps; double-leaf
/// coefficients are recovered with [`Soergel::coefficients`].
pub type Morphism<F> = BimodMap<F>;

/// A Bott–Samelson object `B_w̲(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BSObject {
    pub word: Word,
    pub shift: i32,
}

impl BSObject {
    pub fn new(word: Word, shift: i32) -> Self {
        BSObject { word, shift }
    }
}

/// Index of the double leaf `𝔻(LL_{w̲,f}) ∘ LL_{v̲,e}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafIndex {
    pub x: Element,
    pub e: Subexpression,
    pub f: Subexpression,
}

impl LeafIndex {
    pub fn degree(&self) -> i32 {
        self.e.defect + self.f.defect
    }

    /// The index of the flipped leaf.
    pub fn swapped(&self) -> LeafIndex {
        LeafIndex { x: self.x.clone(), e: self.f.clone(), f: self.e.clone() }
    }
}

impl fmt::Display for LeafIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={:?} e={} f={}", self.x.canonical_word(), self.e, self.f)
    }
}

/// `Hom^d(B_v̲, B_w̲)` with its basis `{μ · 𝕃𝕃}` over monomials `μ`.
pub struct HomSpace<F: Field> {
    pub src: Word,
    pub tgt: Word,
    pub degree: i32,
    basis: Vec<(usize, Mono)>,
    leaves: Vec<LeafIndex>,
    leaf_maps: Vec<Arc<BimodMap<F>>>,
    echelon: SparseEchelon<F>,
    stride: usize,
}

impl<F: Field> HomSpace<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn leaves(&self) -> &[LeafIndex] {
        &self.leaves
    }

    pub fn leaf_map(&self, i: usize) -> &Arc<BimodMap<F>> {
        &self.leaf_maps[i]
    }

    /// Basis vectors as `(leaf position, monomial)`.
    pub fn basis(&self) -> &[(usize, Mono)] {
        &self.basis
    }

    fn check_shape(&self, m: &BimodMap<F>) {
        assert_eq!((&m.src[..], &m.tgt[..]), (&self.src[..], &self.tgt[..]), "map outside this Hom space");
    }

    /// Coordinates in the basis, or `None` if `m` is not in the span.
    pub fn coordinates(&self, real: &Realization<F>, m: &BimodMap<F>) -> Option<Vec<F>> {
        self.check_shape(m);
        let mut out = vec![F::zero(); self.basis.len()];
        if m.is_zero() {
            return Some(out);
        }
        assert_eq!(m.degree, self.degree, "map of the wrong degree");
        for (j, c) in self.echelon.solve(&m.flatten(real, self.stride))? {
            out[j] = c;
        }
        Some(out)
    }

    pub fn contains(&self, real: &Realization<F>, m: &BimodMap<F>) -> bool {
        self.check_shape(m);
        m.is_zero() || (m.degree == self.degree && self.echelon.contains(&m.flatten(real, self.stride)))
    }
}

type StepKey = (Element, Gen, bool);

/// The diagrammatic category over a fixed realization.
pub struct Soergel<F: Field> {
    bimod: Bimod<F>,
    steps: RwLock<HashMap<StepKey, (Arc<BimodMap<F>>, Arc<BimodMap<F>>)>>,
    leaves: RwLock<HashMap<(Word, usize), Arc<BimodMap<F>>>>,
    dual_leaves: RwLock<HashMap<(Word, usize), Arc<BimodMap<F>>>>,
    homs: RwLock<HashMap<(Word, Word, i32), Arc<HomSpace<F>>>>,
}

impl<F: Field> Soergel<F> {
    pub fn new(real: Arc<Realization<F>>) -> Self {
        Soergel {
            bimod: Bimod::new(real),
            steps: RwLock::new(HashMap::new()),
            leaves: RwLock::new(HashMap::new()),
            dual_leaves: RwLock::new(HashMap::new()),
            homs: RwLock::new(HashMap::new()),
        }
    }

    pub fn bimod(&self) -> &Bimod<F> {
        &self.bimod
    }

    pub fn realization(&self) -> &Arc<Realization<F>> {
        self.bimod.realization()
    }

    pub fn system(&self) -> &Arc<CoxeterSystem> {
        self.realization().system()
    }

    fn push_rex_move(&self, d: &mut Diagram<F>, offset: usize, from: &[Gen], to: &[Gen]) -> Result<()> {
        let sys = self.system();
        for mv in sys.rex_path(from, to)? {
            d.push(sys, offset + mv.position - 1, Generator::Braid(mv.from, mv.to));
        }
        Ok(())
    }

    /// A diagram `B_a → B_b` built from braid moves between two reduced
    /// expressions of the same element.
    pub fn rex_move(&self, a: &[Gen], b: &[Gen]) -> Result<Diagram<F>> {
        let mut d = Diagram::identity(a);
        self.push_rex_move(&mut d, 0, a, b)?;
        Ok(d)
    }

    /// One inductive step `B_{x̲ s} → B_{x̲'}` of the light leaf construction.
    fn leaf_step(&self, x: &Element, s: Gen, bit: bool) -> Result<(Diagram<F>, Element)> {
        let sys = self.system();
        let xw = x.canonical_word().to_vec();
        let n = xw.len();
        let mut start = xw.clone();
        start.push(s);
        let mut d = Diagram::identity(&start);
        let up = !sys.has_right_descent(x, s);
        let next = match (up, bit) {
            (true, true) => {
                let xs = sys.mul_gen(x, s);
                self.push_rex_move(&mut d, 0, &start, xs.canonical_word())?;
                xs
            }
            (true, false) => {
                d.push(sys, n, Generator::Dot(s));
                x.clone()
            }
            (false, _) => {
                let ending = sys.word_ending_in(x, s);
                self.push_rex_move(&mut d, 0, &xw, &ending)?;
                d.push(sys, n - 1, Generator::Merge(s));
                if bit {
                    d.push(sys, n - 1, Generator::Dot(s));
                    sys.mul_gen(x, s)
                } else {
                    self.push_rex_move(&mut d, 0, &ending, &xw)?;
                    x.clone()
                }
            }
        };
        Ok((d, next))
    }

    /// The light leaf `LL_{w̲,e}: B_w̲ → B_x̲` as a diagram, `x̲` canonical.
    pub fn light_leaf_diagram(&self, word: &[Gen], e: &Subexpression) -> Result<Diagram<F>> {
        let mut d = Diagram::identity(&[]);
        let mut x = Element::identity();
        for (i, &s) in word.iter().enumerate() {
            let (step, next) = self.leaf_step(&x, s, e.bits[i])?;
            d = step.compose(&d.tensor(&Diagram::identity(&[s])));
            x = next;
        }
        Ok(d)
    }

    fn step_maps(&self, x: &Element, s: Gen, bit: bool) -> Result<(Arc<BimodMap<F>>, Arc<BimodMap<F>>, Element)> {
        let key = (x.clone(), s, bit);
        let next = if bit { self.system().mul_gen(x, s) } else { x.clone() };
        if let Some((a, b)) = self.steps.read().get(&key) {
            return Ok((a.clone(), b.clone(), next));
        }
        let (d, _) = self.leaf_step(x, s, bit)?;
        let m = Arc::new(self.bimod.evaluate(&d)?);
        let dm = Arc::new(self.bimod.evaluate(&d.dual())?);
        self.steps.write().insert(key, (m.clone(), dm.clone()));
        Ok((m, dm, next))
    }

    /// Evaluation of the light leaf `LL_{w̲,e}`, memoized along prefixes.
    pub fn light_leaf(&self, word: &[Gen], e: &Subexpression) -> Result<Arc<BimodMap<F>>> {
        Ok(self.leaf_pair(word, &e.bits)?.0)
    }

    /// Evaluation of `𝔻(LL_{w̲,e})`.
    pub fn dual_light_leaf(&self, word: &[Gen], e: &Subexpression) -> Result<Arc<BimodMap<F>>> {
        Ok(self.leaf_pair(word, &e.bits)?.1)
    }

    fn leaf_pair(&self, word: &[Gen], bits: &[bool]) -> Result<(Arc<BimodMap<F>>, Arc<BimodMap<F>>, Element)> {
        let mask: usize = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| 1 << i).sum();
        let key = (word.to_vec(), mask);
        let sys = self.system();
        let x = sys.element(&word.iter().zip(bits).filter(|(_, b)| **b).map(|(s, _)| *s).collect::<Vec<_>>());
        if let (Some(a), Some(b)) = (self.leaves.read().get(&key), self.dual_leaves.read().get(&key)) {
            return Ok((a.clone(), b.clone(), x));
        }
        let (ll, dll) = match word.split_last() {
            None => {
                let id = Arc::new(BimodMap::identity(&[]));
                (id.clone(), id)
            }
            Some((&s, rest)) => {
                let k = rest.len();
                let (prev, dprev, px) = self.leaf_pair(rest, &bits[..k])?;
                let (step, dstep, _) = self.step_maps(&px, s, bits[k])?;
                let ll = step.compose(&self.bimod.tensor_id_right(&prev, &[s]));
                let dll = self.bimod.tensor_id_right(&dprev, &[s]).compose(&dstep);
                (Arc::new(ll), Arc::new(dll))
            }
        };
        self.leaves.write().insert(key.clone(), ll.clone());
        self.dual_leaves.write().insert(key, dll.clone());
        Ok((ll, dll, x))
    }

    /// `𝕃𝕃^{v̲,w̲}_{x,f,e}` as a diagram.
    pub fn double_leaf_diagram(&self, idx: &LeafIndex, v: &[Gen], w: &[Gen]) -> Result<Diagram<F>> {
        Ok(self.light_leaf_diagram(w, &idx.f)?.dual().compose(&self.light_leaf_diagram(v, &idx.e)?))
    }

    /// Evaluation of `𝕃𝕃^{v̲,w̲}_{x,f,e}`.
    pub fn double_leaf(&self, idx: &LeafIndex, v: &[Gen], w: &[Gen]) -> Result<BimodMap<F>> {
        Ok(self.dual_light_leaf(w, &idx.f)?.compose(&*self.light_leaf(v, &idx.e)?))
    }

    /// All double-leaf indices for `Hom(B_v̲, B_w̲)`, sorted by `(x, e, f)`.
    pub fn leaf_indices(&self, v: &[Gen], w: &[Gen]) -> Vec<LeafIndex> {
        let sys = self.system();
        let sv = sys.all_subexpressions(v);
        let sw = sys.all_subexpressions(w);
        let mut out = Vec::new();
        for (x, es) in &sv {
            let Some(fs) = sw.get(x) else { continue };
            for e in es {
                for f in fs {
                    out.push(LeafIndex { x: x.clone(), e: e.clone(), f: f.clone() });
                }
            }
        }
        out
    }

    /// Graded rank of `Hom^•(B_v̲, B_w̲)` as a free left `R`-module.
    pub fn hom_graded_rank(&self, v: &[Gen], w: &[Gen]) -> LaurentPoly {
        let sys = self.system();
        let sv = sys.all_subexpressions(v);
        let sw = sys.all_subexpressions(w);
        let mut p = LaurentPoly::zero();
        for (x, es) in &sv {
            let Some(fs) = sw.get(x) else { continue };
            for e in es {
                for f in fs {
                    p.add_term(e.defect + f.defect, 1);
                }
            }
        }
        p
    }

    /// `dim_k Hom^d(B_v̲, B_w̲)` from the graded rank.
    pub fn hom_dim(&self, v: &[Gen], w: &[Gen], d: i32) -> usize {
        let real = self.realization();
        self.hom_graded_rank(v, w)
            .terms()
            .map(|(k, c)| c as usize * real.graded_dim(d - k))
            .sum()
    }

    /// The Hom space in degree `d`, with its evaluated basis in echelon form.
    pub fn hom_space(&self, v: &[Gen], w: &[Gen], d: i32) -> Result<Arc<HomSpace<F>>> {
        let key = (v.to_vec(), w.to_vec(), d);
        if let Some(h) = self.homs.read().get(&key) {
            return Ok(h.clone());
        }
        let real = self.realization().clone();
        let shape = BimodMap::<F>::zero(v.to_vec(), w.to_vec(), d);
        let stride = count_monomials(real.dim(), shape.max_entry_degree()).max(1);
        let mut leaves = Vec::new();
        let mut leaf_maps = Vec::new();
        let mut basis = Vec::new();
        let mut echelon = SparseEchelon::tracking();
        for idx in self.leaf_indices(v, w) {
            let gap = d - idx.degree();
            if gap < 0 || gap % 2 != 0 {
                continue;
            }
            let map = Arc::new(self.double_leaf(&idx, v, w)?);
            let li = leaves.len();
            for &mu in &real.basis((gap / 2) as u32).monos {
                let m = self.bimod.left_mul_map(&Poly::term(mu, F::one()), &map);
                if !echelon.insert(&m.flatten(&real, stride)) {
                    let sys = self.system();
                    return Err(Error::EvaluationNotFaithful {
                        domain: sys.expr_string(v),
                        codomain: sys.expr_string(w),
                        degree: d,
                    });
                }
                basis.push((li, mu));
            }
            leaves.push(idx);
            leaf_maps.push(map);
        }
        let h = Arc::new(HomSpace { src: v.to_vec(), tgt: w.to_vec(), degree: d, basis, leaves, leaf_maps, echelon, stride });
        self.homs.write().insert(key, h.clone());
        Ok(h)
    }

    /// Double-leaf expansion `m = Σ p_i · 𝕃𝕃_i` with left coefficients.
    pub fn coefficients(&self, m: &BimodMap<F>) -> Result<BTreeMap<LeafIndex, Poly<F>>> {
        let h = self.hom_space(&m.src, &m.tgt, m.degree)?;
        let coords = h.coordinates(self.realization(), m).ok_or_else(|| {
            let sys = self.system();
            Error::NotInSpan { domain: sys.expr_string(&m.src), codomain: sys.expr_string(&m.tgt) }
        })?;
        let mut out: BTreeMap<LeafIndex, Poly<F>> = BTreeMap::new();
        for (c, &(li, mu)) in coords.iter().zip(h.basis()) {
            if !c.is_zero() {
                out.entry(h.leaves[li].clone()).or_insert_with(Poly::zero).add_assign(&Poly::term(mu, c.clone()));
            }
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    /// Rebuilds a map from its double-leaf expansion.
    pub fn from_coefficients(
        &self,
        v: &[Gen],
        w: &[Gen],
        d: i32,
        coeffs: &BTreeMap<LeafIndex, Poly<F>>,
    ) -> Result<BimodMap<F>> {
        let mut m = BimodMap::zero(v.to_vec(), w.to_vec(), d);
        for (idx, p) in coeffs {
            if p.is_zero() {
                continue;
            }
            let leaf = self.double_leaf(idx, v, w)?;
            m = m.add(&self.bimod.left_mul_map(p, &leaf));
        }
        Ok(m)
    }

    /// All basis maps `μ · 𝕃𝕃` of `Hom^d(B_v̲, B_w̲)`.
    pub fn hom_basis_maps(&self, v: &[Gen], w: &[Gen], d: i32) -> Result<Vec<BimodMap<F>>> {
        let h = self.hom_space(v, w, d)?;
        Ok(h.basis()
            .iter()
            .map(|&(li, mu)| self.bimod.left_mul_map(&Poly::term(mu, F::one()), h.leaf_map(li)))
            .collect())
    }

    pub fn compose(&self, g: &BimodMap<F>, f: &BimodMap<F>) -> BimodMap<F> {
        g.compose(f)
    }

    pub fn tensor(&self, f: &BimodMap<F>, g: &BimodMap<F>) -> BimodMap<F> {
        self.bimod.tensor(f, g)
    }

    /// The flip `𝔻` on morphisms, through the double-leaf expansion.
    pub fn dualize(&self, m: &BimodMap<F>) -> Result<BimodMap<F>> {
        let coeffs = self.coefficients(m)?;
        let swapped: BTreeMap<LeafIndex, Poly<F>> = coeffs.into_iter().map(|(i, p)| (i.swapped(), p)).collect();
        self.from_coefficients(&m.tgt, &m.src, m.degree, &swapped)
    }

    /// Decorations of every light-leaf step, for display.
    pub fn describe_leaf(&self, word: &[Gen], e: &Subexpression) -> String {
        let sys = self.system();
        let mut parts = Vec::new();
        for (i, d) in e.decorations.iter().enumerate() {
            let tag = match d {
                Decoration::U0 => "U0",
                Decoration::U1 => "U1",
                Decoration::D0 => "D0",
                Decoration::D1 => "D1",
            };
            parts.push(format!("{}{}", sys.labels()[word[i] as usize], tag));
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    fn ctx(name: &str) -> Soergel<Rational> {
        Soergel::new(Arc::new(Realization::standard(name).unwrap()))
    }

    fn sub(sys: &CoxeterSystem, word: &[Gen], bits: &[u8]) -> Subexpression {
        sys.decorate(word, &bits.iter().map(|b| *b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn graded_ranks() {
        let c = ctx("A2");
        assert_eq!(c.hom_graded_rank(&[0], &[]).to_string(), "v");
        assert_eq!(c.hom_graded_rank(&[0], &[0]).to_string(), "1 + v^2");
        assert_eq!(c.hom_graded_rank(&[0, 1, 0], &[0]).to_string(), "1 + 2v^2 + v^4");
    }

    #[test]
    fn small_light_leaves() {
        let c = ctx("A2");
        let sys = c.system().clone();
        let b = c.bimod();
        assert_eq!(*c.light_leaf(&[0], &sub(&sys, &[0], &[0])).unwrap(), b.dot(0));
        assert_eq!(*c.light_leaf(&[0], &sub(&sys, &[0], &[1])).unwrap(), BimodMap::identity(&[0]));
        let e = sub(&sys, &[0, 0], &[1, 0]);
        let ll = c.light_leaf(&[0, 0], &e).unwrap();
        assert_eq!(ll.degree, -1);
        assert_eq!(ll.tgt, vec![0]);
        assert_eq!(*ll, b.merge(0));
    }

    #[test]
    fn leaf_maps_agree_with_diagram_evaluation() {
        let c = ctx("A2");
        let sys = c.system().clone();
        let word = vec![0, 1, 0, 1];
        for (_, subs) in sys.all_subexpressions(&word) {
            for e in subs {
                let d = c.light_leaf_diagram(&word, &e).unwrap();
                assert_eq!(d.degree(), e.defect);
                assert_eq!(c.bimod().evaluate(&d).unwrap(), *c.light_leaf(&word, &e).unwrap());
                assert_eq!(c.bimod().evaluate(&d.dual()).unwrap(), *c.dual_light_leaf(&word, &e).unwrap());
            }
        }
    }

    #[test]
    fn double_leaves_span_the_bimodule_hom() {
        let c = ctx("A2");
        for (v, w) in [(vec![0], vec![0]), (vec![0, 1, 0], vec![0]), (vec![0, 1], vec![1, 0]), (vec![0, 0], vec![0])] {
            for d in -2..=4 {
                let h = c.hom_space(&v, &w, d).unwrap();
                assert_eq!(h.dim(), c.hom_dim(&v, &w, d), "{v:?} {w:?} {d}");
                assert_eq!(h.dim(), c.bimod().hom_basis(&v, &w, d).len(), "{v:?} {w:?} {d}");
            }
        }
    }

    #[test]
    fn barbell_coefficient() {
        let c = ctx("A2");
        let b = c.bimod();
        let bar = b.dot(0).compose(&b.enddot(0));
        let coeffs = c.coefficients(&bar).unwrap();
        assert_eq!(coeffs.len(), 1);
        let (idx, p) = coeffs.iter().next().unwrap();
        assert!(idx.x.is_identity());
        assert_eq!(p, c.realization().alpha(0));
        assert!(c.coefficients(&b.merge(0).compose(&b.split(0))).unwrap().is_empty());
    }

    #[test]
    fn dualize_swaps_dots() {
        let c = ctx("A2");
        let b = c.bimod();
        assert_eq!(c.dualize(&b.dot(0)).unwrap(), b.enddot(0));
        assert_eq!(c.dualize(&BimodMap::identity(&[0, 1])).unwrap(), BimodMap::identity(&[0, 1]));
        let m = b.tensor_id_left(&[0], &b.enddot(0));
        assert_eq!(c.dualize(&c.dualize(&m).unwrap()).unwrap(), m);
        assert_eq!(c.dualize(&m).unwrap(), b.tensor_id_left(&[0], &b.dot(0)));
    }
}
