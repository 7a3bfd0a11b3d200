//! The Hecke algebra in the standard basis `{H_w}` (Soergel's normalization),
//! the bar involution and the Kazhdan–Lusztig basis with a persistent cache.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::RwLock;

use crate::coxeter::{CoxeterSystem, Element, Gen};
use crate::error::{Error, Result};
pub use crate::laurent::LaurentPoly;

/// A finitely supported combination `Σ p_w H_w`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeckeElement {
    terms: BTreeMap<Element, LaurentPoly>,
}

impl HeckeElement {
    pub fn zero() -> Self {
        HeckeElement::default()
    }

    /// `H_w`.
    pub fn basis(w: Element) -> Self {
        Self::term(w, LaurentPoly::one())
    }

    pub fn term(w: Element, p: LaurentPoly) -> Self {
        let mut h = HeckeElement::zero();
        h.add_term(w, &p);
        h
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Element) -> LaurentPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Element, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, w: Element, p: &LaurentPoly) {
        if p.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_default();
        e.add_assign(p);
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (w, p) in other.terms() {
            r.add_term(w.clone(), p);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&LaurentPoly::monomial(0, -1)))
    }

    /// Multiplication by a scalar Laurent polynomial.
    pub fn scale(&self, p: &LaurentPoly) -> Self {
        let mut r = HeckeElement::zero();
        for (w, q) in self.terms() {
            r.add_term(w.clone(), &q.mul(p));
        }
        r
    }

    pub fn display(&self, sys: &CoxeterSystem) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, p)| format!("({p})H_{}", sys.elem_string(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(w, p)| (w.canonical_word().to_vec(), p.to_string()))).finish()
    }
}

/// The Hecke algebra of a Coxeter system, with memoized `bar(H_w)` and KL data.
pub struct HeckeAlgebra {
    sys: Arc<CoxeterSystem>,
    bar_cache: RwLock<BTreeMap<Element, HeckeElement>>,
    kl: KLTable,
    interval_cap: usize,
}

impl HeckeAlgebra {
    pub fn new(sys: Arc<CoxeterSystem>) -> Self {
        let kl = KLTable::new(sys.matrix_hash());
        HeckeAlgebra { sys, bar_cache: RwLock::new(BTreeMap::new()), kl, interval_cap: 100_000 }
    }

    pub fn with_interval_cap(mut self, cap: usize) -> Self {
        self.interval_cap = cap;
        self
    }

    pub fn system(&self) -> &Arc<CoxeterSystem> {
        &self.sys
    }

    pub fn kl_table(&self) -> &KLTable {
        &self.kl
    }

    /// `a · H_s`.
    pub fn mul_gen(&self, a: &HeckeElement, s: Gen) -> HeckeElement {
        let quad = LaurentPoly::v(-1).sub(&LaurentPoly::v(1));
        let mut r = HeckeElement::zero();
        for (x, p) in a.terms() {
            let xs = self.sys.mul_gen(x, s);
            if xs.length() > x.length() {
                r.add_term(xs, p);
            } else {
                r.add_term(xs, p);
                r.add_term(x.clone(), &p.mul(&quad));
            }
        }
        r
    }

    /// `a · H_w̲` for the product of the letters' standard generators.
    pub fn mul_word(&self, a: &HeckeElement, word: &[Gen]) -> HeckeElement {
        word.iter().fold(a.clone(), |acc, &s| self.mul_gen(&acc, s))
    }

    pub fn mul_standard(&self, a: &HeckeElement, b: &HeckeElement) -> HeckeElement {
        let mut r = HeckeElement::zero();
        for (y, q) in b.terms() {
            let part = self.mul_word(a, y.canonical_word()).scale(q);
            r = r.add(&part);
        }
        r
    }

    /// `a · (H_s + v)`.
    pub fn mul_kl_gen(&self, a: &HeckeElement, s: Gen) -> HeckeElement {
        self.mul_gen(a, s).add(&a.scale(&LaurentPoly::v(1)))
    }

    fn bar_basis(&self, w: &Element) -> HeckeElement {
        if let Some(b) = self.bar_cache.read().get(w) {
            return b.clone();
        }
        let result = match w.canonical_word().last() {
            None => HeckeElement::basis(Element::identity()),
            Some(&s) => {
                let ws = self.sys.mul_gen(w, s);
                let prev = self.bar_basis(&ws);
                let corr = LaurentPoly::v(1).sub(&LaurentPoly::v(-1));
                self.mul_gen(&prev, s).add(&prev.scale(&corr))
            }
        };
        self.bar_cache.write().insert(w.clone(), result.clone());
        result
    }

    /// The ring involution with `v ↦ v⁻¹` and `H_s ↦ H_s⁻¹`.
    pub fn bar(&self, a: &HeckeElement) -> HeckeElement {
        let mut r = HeckeElement::zero();
        for (w, p) in a.terms() {
            r = r.add(&self.bar_basis(w).scale(&p.bar()));
        }
        r
    }

    /// `Π_i (H_{s_i} + v)`, the class of `B_w̲`.
    pub fn bs_class(&self, word: &[Gen]) -> HeckeElement {
        word.iter().fold(HeckeElement::basis(Element::identity()), |acc, &s| self.mul_kl_gen(&acc, s))
    }

    /// The Kazhdan–Lusztig basis element `H̲_w`.
    pub fn kl_basis(&self, w: &Element) -> Result<HeckeElement> {
        if let Some(h) = self.kl.get(w) {
            return Ok(h);
        }
        if w.length() > 0 {
            // Guard the interval size before recursing.
            self.sys.lower_interval(w, self.interval_cap)?;
        }
        let h = match w.canonical_word().last() {
            None => HeckeElement::basis(Element::identity()),
            Some(&s) => {
                let y = self.sys.mul_gen(w, s);
                let hy = self.kl_basis(&y)?;
                let mut prod = self.mul_kl_gen(&hy, s);
                // Subtract μ(z, y) H̲_z for z < y with zs < z.
                let lower: Vec<(Element, i64)> = hy
                    .terms()
                    .filter(|(z, _)| **z != y && self.sys.has_right_descent(z, s))
                    .map(|(z, p)| (z.clone(), p.coeff(1)))
                    .filter(|(_, mu)| *mu != 0)
                    .collect();
                for (z, mu) in lower {
                    let hz = self.kl_basis(&z)?;
                    prod = prod.sub(&hz.scale(&LaurentPoly::monomial(0, mu)));
                }
                prod
            }
        };
        self.kl.insert(w.clone(), h.clone());
        Ok(h)
    }

    /// `Σ_x a_x b_x`.
    pub fn standard_pairing(&self, a: &HeckeElement, b: &HeckeElement) -> LaurentPoly {
        let mut r = LaurentPoly::zero();
        for (x, p) in a.terms() {
            r.add_assign(&p.mul(&b.coeff(x)));
        }
        r
    }

    /// Whether `h` is bar-invariant and of the form `H_w + Σ_{x<w} vℤ[v] H_x`.
    pub fn is_kl_shaped(&self, w: &Element, h: &HeckeElement) -> bool {
        if h.coeff(w) != LaurentPoly::one() {
            return false;
        }
        for (x, p) in h.terms() {
            if x == w {
                continue;
            }
            if !self.sys.bruhat_lt(x, w) || p.min_degree().map_or(true, |d| d < 1) {
                return false;
            }
        }
        self.bar(h) == *h
    }

    /// Virtual character: `Σ sign · v^shift · class(word)`.
    pub fn character<'a>(&self, summands: impl IntoIterator<Item = (i64, i32, &'a [Gen])>) -> HeckeElement {
        let mut r = HeckeElement::zero();
        for (sign, shift, word) in summands {
            r = r.add(&self.bs_class(word).scale(&LaurentPoly::monomial(shift, sign)));
        }
        r
    }

    /// Loads KL entries from `dir`, keeping those that verify; returns the
    /// number of entries accepted.
    pub fn load_cache(&self, dir: &Path) -> usize {
        let path = self.kl.cache_path(dir);
        let Ok(text) = fs::read_to_string(&path) else { return 0 };
        match self.kl.parse(&self.sys, &text) {
            Ok(entries) => {
                let mut n = 0;
                for (w, h) in entries {
                    if self.is_kl_shaped(&w, &h) {
                        self.kl.insert(w, h);
                        n += 1;
                    }
                }
                n
            }
            Err(_) => 0,
        }
    }

    pub fn save_cache(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = self.kl.cache_path(dir);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.kl.serialize(&self.sys))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Classical KL polynomials `P_{x,w}(q)` (coefficients, constant first)
    /// recovered from the KL basis via `h_{x,w} = v^{ℓ(w)−ℓ(x)} P_{x,w}(v⁻²)`.
    pub fn kl_polynomial(&self, x: &Element, w: &Element) -> Result<Vec<i64>> {
        let h = self.kl_basis(w)?.coeff(x);
        let diff = w.length() as i32 - x.length() as i32;
        let mut out = Vec::new();
        for (k, c) in h.terms() {
            let e = diff - k;
            debug_assert!(e >= 0 && e % 2 == 0);
            let i = (e / 2) as usize;
            if out.len() <= i {
                out.resize(i + 1, 0);
            }
            out[i] = c;
        }
        Ok(out)
    }
}

const CACHE_VERSION: &str = "heckekit-kl v1";

/// Memoized KL basis elements, keyed by the Coxeter matrix hash on disk.
pub struct KLTable {
    key: String,
    entries: RwLock<BTreeMap<Element, HeckeElement>>,
}

impl KLTable {
    fn new(key: String) -> Self {
        KLTable { key, entries: RwLock::new(BTreeMap::new()) }
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, w: &Element) -> Option<HeckeElement> {
        self.entries.read().get(w).cloned()
    }

    fn insert(&self, w: Element, h: HeckeElement) {
        self.entries.write().entry(w).or_insert(h);
    }

    pub fn cache_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("kl-{}.txt", &self.key[..16]))
    }

    fn serialize(&self, sys: &CoxeterSystem) -> String {
        let mut out = format!("{CACHE_VERSION}\nmatrix {}\n", self.key);
        for (w, h) in self.entries.read().iter() {
            out.push_str(&sys.elem_string(w));
            for (x, p) in h.terms() {
                out.push_str(" | ");
                out.push_str(&sys.elem_string(x));
                for (k, c) in p.terms() {
                    out.push_str(&format!(" {k}:{c}"));
                }
            }
            out.push('\n');
        }
        out
    }

    fn parse(&self, sys: &CoxeterSystem, text: &str) -> Result<Vec<(Element, HeckeElement)>> {
        let bad = |m: &str| Error::Cache(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(CACHE_VERSION) {
            return Err(bad("version mismatch"));
        }
        if lines.next() != Some(format!("matrix {}", self.key).as_str()) {
            return Err(bad("matrix hash mismatch"));
        }
        let mut out = Vec::new();
        for line in lines {
            let mut parts = line.split(" | ");
            let w = sys.element(&sys.parse_word(parts.next().ok_or_else(|| bad("empty record"))?)?);
            let mut h = HeckeElement::zero();
            for part in parts {
                let mut fields = part.split(' ');
                let x = sys.element(&sys.parse_word(fields.next().ok_or_else(|| bad("missing element"))?)?);
                let mut p = LaurentPoly::zero();
                for f in fields {
                    let (k, c) = f.split_once(':').ok_or_else(|| bad("bad coefficient"))?;
                    let k: i32 = k.parse().map_err(|_| bad("bad exponent"))?;
                    let c: i64 = c.parse().map_err(|_| bad("bad coefficient"))?;
                    p.add_term(k, c);
                }
                h.add_term(x, &p);
            }
            out.push((w, h));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(name: &str) -> HeckeAlgebra {
        HeckeAlgebra::new(Arc::new(CoxeterSystem::of_type(name).unwrap()))
    }

    #[test]
    fn quadratic_relation() {
        let h = alg("A2");
        let s = h.system().generator(0);
        let hs = HeckeElement::basis(s.clone());
        let sq = h.mul_standard(&hs, &hs);
        let mut expected = HeckeElement::basis(Element::identity());
        expected.add_term(s, &LaurentPoly::v(-1).sub(&LaurentPoly::v(1)));
        assert_eq!(sq, expected);
    }

    #[test]
    fn length_additive_products() {
        let h = alg("A2");
        let sys = h.system().clone();
        let st = sys.element(&[0, 1]);
        let hs = HeckeElement::basis(sys.generator(0));
        let ht = HeckeElement::basis(sys.generator(1));
        assert_eq!(h.mul_standard(&hs, &ht), HeckeElement::basis(st.clone()));
        assert_eq!(h.mul_standard(&HeckeElement::basis(st), &hs), HeckeElement::basis(sys.element(&[0, 1, 0])));
    }

    #[test]
    fn bar_of_generator() {
        let h = alg("A2");
        let s = h.system().generator(0);
        let mut expected = HeckeElement::basis(s.clone());
        expected.add_term(Element::identity(), &LaurentPoly::v(1).sub(&LaurentPoly::v(-1)));
        assert_eq!(h.bar(&HeckeElement::basis(s)), expected);
        let e = HeckeElement::basis(Element::identity());
        assert_eq!(h.bar(&e), e);
    }

    #[test]
    fn kl_basis_examples() {
        let h = alg("A2");
        let sys = h.system().clone();
        let s = sys.generator(0);
        let ks = h.kl_basis(&s).unwrap();
        let mut expected = HeckeElement::basis(s);
        expected.add_term(Element::identity(), &LaurentPoly::v(1));
        assert_eq!(ks, expected);
        assert_eq!(h.kl_basis(&Element::identity()).unwrap(), HeckeElement::basis(Element::identity()));
        let sts = sys.element(&[0, 1, 0]);
        let k = h.kl_basis(&sts).unwrap();
        for x in sys.enumerate(10).unwrap() {
            assert_eq!(k.coeff(&x), LaurentPoly::v(3 - x.length() as i32));
        }
    }

    #[test]
    fn bs_class_examples() {
        let h = alg("A2");
        let s = h.system().generator(0);
        let ks = h.kl_basis(&s).unwrap();
        assert_eq!(h.bs_class(&[0]), ks);
        assert_eq!(h.bs_class(&[]), HeckeElement::basis(Element::identity()));
        let two = LaurentPoly::v(1).add(&LaurentPoly::v(-1));
        assert_eq!(h.bs_class(&[0, 0]), ks.scale(&two));
    }

    #[test]
    fn pairing_examples() {
        let h = alg("A2");
        let a = h.bs_class(&[0]);
        assert_eq!(h.standard_pairing(&a, &a).to_string(), "1 + v^2");
        let b = h.bs_class(&[0, 1, 0]);
        assert_eq!(h.standard_pairing(&b, &a).to_string(), "1 + 2v^2 + v^4");
    }

    #[test]
    fn cache_roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let h = alg("B2");
        let w0 = h.system().longest_element().unwrap();
        let k = h.kl_basis(&w0).unwrap();
        let path = h.save_cache(dir.path()).unwrap();
        let fresh = alg("B2");
        assert_eq!(fresh.load_cache(dir.path()), h.kl_table().len());
        assert_eq!(fresh.kl_table().get(&w0), Some(k));
        let text = fs::read_to_string(&path).unwrap().replace(" 1:1", " 1:2");
        fs::write(&path, text).unwrap();
        let corrupt = alg("B2");
        assert!(corrupt.load_cache(dir.path()) < h.kl_table().len());
        let other = alg("A2");
        assert_eq!(other.load_cache(dir.path()), 0);
    }
}
