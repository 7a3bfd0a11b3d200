//! The right-equivariant category: morphisms with left coefficients reduced
//! to the ground field, its perverse heart and the Ringel functor.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::coxeter::{CoxeterSystem, Element};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hecke::{HeckeAlgebra, HeckeElement, LaurentPoly};
use crate::homotopy::{
    block_compose, chain_map_vanishes, convolve, find_equivalence_in, hom_dims, verify_equivalence, ChainMap,
    Complex, Equivalence, HomFlavor, Reduction,
};
use crate::locale::LocallyClosedSubset;
use crate::poly::Mono;
use crate::recperv::{build_costandard, build_standard, singleton_shriek, singleton_star, support_closure};
use crate::soergelcalc::{BimodMap, Soergel};

/// A complex in the right-equivariant category.
///
/// Differential entries are canonical representatives: linear combinations
/// of double leaves with constant coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ReComplex<F: Field> {
    pub complex: Complex<F>,
}

/// The canonical representative of `m` modulo positive-degree left
/// multiples of double leaves.
pub fn reduce_morphism<F: Field>(ctx: &Soergel<F>, m: &BimodMap<F>) -> Result<BimodMap<F>> {
    if m.is_zero() {
        return Ok(m.clone());
    }
    let h = ctx.hom_space(&m.src, &m.tgt, m.degree)?;
    let coords = h.coordinates(ctx.realization(), m).ok_or_else(|| Error::NotInSpan {
        domain: ctx.system().expr_string(&m.src),
        codomain: ctx.system().expr_string(&m.tgt),
    })?;
    let mut out = BimodMap::zero(m.src.clone(), m.tgt.clone(), m.degree);
    for (x, &(li, mu)) in coords.iter().zip(h.basis()) {
        if mu == Mono(0) && !x.is_zero() {
            out = out.add(&h.leaf_map(li).scale(x));
        }
    }
    Ok(out)
}

fn reduce_complex<F: Field>(ctx: &Soergel<F>, c: &Complex<F>) -> Result<Complex<F>> {
    let mut out = c.clone();
    for deg in c.degrees() {
        let blk = out.d_mut(deg);
        let keys: Vec<_> = blk.keys().copied().collect();
        for k in keys {
            let r = reduce_morphism(ctx, &blk[&k])?;
            if r.is_zero() {
                blk.remove(&k);
            } else {
                blk.insert(k, r);
            }
        }
    }
    Ok(out)
}

/// `For`: reduce every differential entry.
pub fn forget<F: Field>(ctx: &Soergel<F>, c: &Complex<F>) -> Result<ReComplex<F>> {
    Ok(ReComplex { complex: reduce_complex(ctx, c)? })
}

impl<F: Field> ReComplex<F> {
    /// `d ∘ d = 0` in the right-equivariant category.
    pub fn is_valid(&self, ctx: &Soergel<F>) -> Result<bool> {
        for deg in self.complex.degrees() {
            let mut m = ChainMap::zero(2);
            for (&(t, s), e) in &block_compose(self.complex.d(deg + 1), self.complex.d(deg)) {
                m.set(deg, t, s, e.clone());
            }
            if !chain_map_vanishes(ctx, &m, HomFlavor::RightEquivariant)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `For(F) ⋆ G` for a complex `G` of the ordinary category.
    pub fn convolve_right(&self, ctx: &Soergel<F>, g: &Complex<F>) -> Result<ReComplex<F>> {
        forget(ctx, &convolve(ctx.bimod(), &self.complex, g))
    }

    /// Gaussian elimination, with the certificate checked modulo the
    /// augmentation ideal.
    pub fn minimize(&self, ctx: &Soergel<F>) -> Result<(ReComplex<F>, Equivalence<F>)> {
        let mut r = Reduction::new(self.complex.clone());
        r.minimize(ctx.bimod(), true);
        let out = forget(ctx, &r.current)?;
        if !verify_equivalence(ctx, &r.equivalence, &self.complex, &out.complex, HomFlavor::RightEquivariant)? {
            return Err(Error::Inconsistent("right-equivariant reduction certificate fails".into()));
        }
        Ok((out, r.equivalence))
    }

    pub fn is_zero(&self) -> bool {
        self.complex.is_zero()
    }
}

/// `Δ̄_w`.
pub fn re_standard<F: Field>(ctx: &Soergel<F>, w: &Element) -> Result<ReComplex<F>> {
    forget(ctx, &build_standard(ctx, w)?.current)
}

/// `∇̄_w`.
pub fn re_costandard<F: Field>(ctx: &Soergel<F>, w: &Element) -> Result<ReComplex<F>> {
    forget(ctx, &build_costandard(ctx, w)?.current)
}

/// `dim Hom_RE(C, D⟨n⟩[m])` over `|n|, |m| ≤ window`.
pub fn re_hom_dims<F: Field>(
    ctx: &Soergel<F>,
    c: &ReComplex<F>,
    d: &ReComplex<F>,
    window: i32,
) -> Result<BTreeMap<(i32, i32), usize>> {
    hom_dims(ctx, &c.complex, &d.complex, HomFlavor::RightEquivariant, -window..=window, -window..=window)
}

/// `dim Hom_RE(Δ̄_x, ∇̄_y⟨n⟩[m])` over the window.
pub fn re_hom_table<F: Field>(
    ctx: &Soergel<F>,
    x: &Element,
    y: &Element,
    window: i32,
) -> Result<BTreeMap<(i32, i32), usize>> {
    re_hom_dims(ctx, &re_standard(ctx, x)?, &re_costandard(ctx, y)?, window)
}

/// The expected pairing: one-dimensional exactly when `x = y` and
/// `n = m = 0`.
pub fn re_hom_expected(x: &Element, y: &Element, n: i32, m: i32) -> usize {
    usize::from(x == y && n == 0 && m == 0)
}

/// Singleton restrictions of a right-equivariant complex, as bigraded
/// vector spaces `(c, j) ↦ dim`.
#[derive(Clone, Debug)]
pub struct ReSingleton {
    pub element: Element,
    pub star: BTreeMap<(i32, i32), usize>,
    pub shriek: BTreeMap<(i32, i32), usize>,
}

impl ReSingleton {
    fn total_degrees(m: &BTreeMap<(i32, i32), usize>) -> impl Iterator<Item = i32> + '_ {
        m.iter().filter(|(_, &d)| d > 0).map(|(&(c, j), _)| c - j)
    }

    pub fn le0(&self) -> bool {
        Self::total_degrees(&self.star).all(|t| t <= 0)
    }

    pub fn ge0(&self) -> bool {
        Self::total_degrees(&self.shriek).all(|t| t >= 0)
    }
}

#[derive(Clone, Debug)]
pub struct RePerversityReport {
    pub entries: Vec<ReSingleton>,
}

impl RePerversityReport {
    pub fn le0(&self) -> bool {
        self.entries.iter().all(ReSingleton::le0)
    }

    pub fn ge0(&self) -> bool {
        self.entries.iter().all(ReSingleton::ge0)
    }

    pub fn is_perverse(&self) -> bool {
        self.le0() && self.ge0()
    }

    pub fn to_json(&self, sys: &CoxeterSystem) -> Value {
        let tbl = |m: &BTreeMap<(i32, i32), usize>| -> Value {
            m.iter().map(|(&(c, j), d)| json!({"degree": c, "shift": j, "dim": d})).collect()
        };
        json!({
            "tag": "re",
            "le0": self.le0(),
            "ge0": self.ge0(),
            "perverse": self.is_perverse(),
            "elements": self.entries.iter().map(|e| json!({
                "element": sys.elem_string(&e.element),
                "star": tbl(&e.star),
                "shriek": tbl(&e.shriek),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Perversity in the right-equivariant category.
///
/// The singleton categories are bounded derived categories of graded
/// vector spaces; a class in bidegree `(c, j)` sits in perverse degree
/// `c − j`.
pub fn re_perverse_check<F: Field>(
    ctx: &Soergel<F>,
    c: &ReComplex<F>,
    elements: Option<&[Element]>,
) -> Result<RePerversityReport> {
    let elems = match elements {
        Some(e) => e.to_vec(),
        None => support_closure(ctx, &c.complex)?,
    };
    let mut entries = Vec::new();
    for w in elems {
        let star = singleton_star(ctx, &c.complex, &w)?.reduced_cohomology();
        let shriek = singleton_shriek(ctx, &c.complex, &w)?.reduced_cohomology();
        entries.push(ReSingleton { element: w, star, shriek });
    }
    Ok(RePerversityReport { entries })
}

/// One row of the full faithfulness comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRow {
    pub label: String,
    pub bimodule: usize,
    pub right_equivariant: usize,
}

impl ProbeRow {
    pub fn agrees(&self) -> bool {
        self.bimodule == self.right_equivariant
    }
}

/// `dim Hom(F, G)` against `dim Hom_RE(For F, For G)` in degree 0.
pub fn full_faithfulness_probe<F: Field>(
    ctx: &Soergel<F>,
    pairs: &[(String, Complex<F>, Complex<F>)],
) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::new();
    for (label, a, b) in pairs {
        let be = hom_dims(ctx, a, b, HomFlavor::Bimodule, 0..=0, 0..=0)?[&(0, 0)];
        let (fa, fb) = (forget(ctx, a)?, forget(ctx, b)?);
        let re = hom_dims(ctx, &fa.complex, &fb.complex, HomFlavor::RightEquivariant, 0..=0, 0..=0)?[&(0, 0)];
        rows.push(ProbeRow { label: label.clone(), bimodule: be, right_equivariant: re });
    }
    Ok(rows)
}

fn longest(sys: &CoxeterSystem) -> Result<Element> {
    sys.longest_element()
}

/// `𝔉R = (−) ⋆ Δ_{w₀}`, minimized.
pub fn ringel<F: Field>(ctx: &Soergel<F>, c: &ReComplex<F>) -> Result<ReComplex<F>> {
    let d = build_standard(ctx, &longest(ctx.system())?)?.current;
    Ok(c.convolve_right(ctx, &d)?.minimize(ctx)?.0)
}

/// `(−) ⋆ ∇_{w₀}`, the quasi-inverse of [`ringel`].
pub fn ringel_inverse<F: Field>(ctx: &Soergel<F>, c: &ReComplex<F>) -> Result<ReComplex<F>> {
    let n = build_costandard(ctx, &longest(ctx.system())?)?.current;
    Ok(c.convolve_right(ctx, &n)?.minimize(ctx)?.0)
}

/// A certified equivalence `𝔉R(∇̄_x) ≃ Δ̄_{x w₀}`.
pub fn ringel_costandard<F: Field>(
    ctx: &Soergel<F>,
    x: &Element,
) -> Result<(ReComplex<F>, ReComplex<F>, Equivalence<F>)> {
    let sys = ctx.system();
    let xw0 = sys.multiply(x, &longest(sys)?);
    let lhs = ringel(ctx, &re_costandard(ctx, x)?)?;
    let rhs = re_standard(ctx, &xw0)?;
    let eq = find_equivalence_in(ctx, &lhs.complex, &rhs.complex, HomFlavor::RightEquivariant)?;
    Ok((lhs, rhs, eq))
}

/// Verdicts of the highest weight checks on a closed subset.
#[derive(Clone, Debug, Default)]
pub struct HwReport {
    pub failures: Vec<String>,
    pub checked: usize,
}

impl HwReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// The expected standard pattern `Σ_x v^{ℓ(w₀)−ℓ(x)} H_x`.
pub fn tilting_character(hecke: &HeckeAlgebra, w0: &Element) -> Result<HeckeElement> {
    let sys = hecke.system();
    let mut out = HeckeElement::zero();
    for x in sys.lower_interval(w0, crate::recperv::ELEMENT_CAP)? {
        let k = (w0.length() - x.length()) as i32;
        out = out.add(&HeckeElement::basis(x).scale(&LaurentPoly::monomial(k, 1)));
    }
    Ok(out)
}

/// `(𝒯_{w₀} : Δ̄_x⟨n⟩) = 1` iff `n = ℓ(x w₀)`, read from the
/// Kazhdan–Lusztig element of `w₀`.
pub fn tilting_multiplicities_hold(hecke: &HeckeAlgebra) -> Result<bool> {
    let sys = hecke.system();
    let w0 = longest(sys)?;
    let kl = hecke.kl_basis(&w0)?;
    if kl != tilting_character(hecke, &w0)? {
        return Ok(false);
    }
    for x in sys.lower_interval(&w0, crate::recperv::ELEMENT_CAP)? {
        let n = sys.multiply(&x, &w0).length() as i32;
        if kl.coeff(&x) != LaurentPoly::monomial(n, 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Highest weight checks in the right-equivariant category on a closed
/// subset, within the window:
/// `End(Δ̄_w)` is the ground field in degree 0, `Hom(Δ̄_x, Δ̄_y⟨n⟩[1]) = 0`
/// unless `x < y`, and `Hom(Δ̄_x, ∇̄_y⟨n⟩[m])` is the expected pairing.
pub fn hw_axiom_check<F: Field>(ctx: &Soergel<F>, subset: &LocallyClosedSubset, window: i32) -> Result<HwReport> {
    let sys = ctx.system();
    let members = subset.members().iter().cloned().collect::<Vec<_>>();
    for w in &members {
        for x in sys.lower_interval(w, crate::recperv::ELEMENT_CAP)? {
            if !subset.contains(&x) {
                return Err(Error::Precondition(format!("{subset} is not closed")));
            }
        }
    }
    let std: Vec<ReComplex<F>> = members.iter().map(|w| re_standard(ctx, w)).collect::<Result<_>>()?;
    let costd: Vec<ReComplex<F>> = members.iter().map(|w| re_costandard(ctx, w)).collect::<Result<_>>()?;
    let mut rep = HwReport::default();
    for (i, x) in members.iter().enumerate() {
        let xs = sys.elem_string(x);
        let end = re_hom_dims(ctx, &std[i], &std[i], window)?;
        for (&(n, m), &d) in &end {
            let want = usize::from(n == 0 && m == 0);
            rep.record(d == want, || format!("End(Δ_{xs}) at ({n},{m}) is {d}"));
        }
        for (j, y) in members.iter().enumerate() {
            let ys = sys.elem_string(y);
            let ext = hom_dims(
                ctx,
                &std[i].complex,
                &std[j].complex,
                HomFlavor::RightEquivariant,
                -window..=window,
                1..=1,
            )?;
            let below = x != y && sys.bruhat_leq(x, y);
            for (&(n, _), &d) in &ext {
                rep.record(d == 0 || below, || format!("Hom(Δ_{xs}, Δ_{ys}<{n}>[1]) is {d}"));
            }
            for (&(n, m), &d) in &re_hom_dims(ctx, &std[i], &costd[j], window)? {
                rep.record(d == re_hom_expected(x, y, n, m), || format!("Hom(Δ_{xs}, ∇_{ys}<{n}>[{m}]) is {d}"));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::realization::Realization;
    use crate::recperv::{elementary_costandard, elementary_standard, perverse_check};
    use std::sync::Arc;

    fn ctx(name: &str) -> Soergel<Rational> {
        Soergel::new(Arc::new(Realization::standard(name).unwrap()))
    }

    #[test]
    fn forget_reduces_coefficients() {
        let k = ctx("A1");
        let ds = forget(&k, &elementary_standard(&k, 0)).unwrap();
        assert_eq!(ds.complex, elementary_standard(&k, 0));
        assert!(forget(&k, &Complex::zero()).unwrap().is_zero());
        let a = k.realization().alpha(0);
        let m = k.bimod().poly_map(&a);
        assert!(reduce_morphism(&k, &m).unwrap().is_zero());
    }

    #[test]
    fn forget_commutes_with_convolution() {
        let k = ctx("A2");
        let c = elementary_standard(&k, 0);
        let d = elementary_costandard(&k, 1);
        let lhs = forget(&k, &convolve(k.bimod(), &c, &d)).unwrap();
        let rhs = forget(&k, &c).unwrap().convolve_right(&k, &d).unwrap();
        assert_eq!(lhs, rhs);
        assert!(lhs.is_valid(&k).unwrap());
    }

    #[test]
    fn re_hom_pairing_in_a1() {
        let k = ctx("A1");
        let sys = k.system().clone();
        for x in sys.enumerate(4).unwrap() {
            for y in sys.enumerate(4).unwrap() {
                for ((n, m), d) in re_hom_table(&k, &x, &y, 2).unwrap() {
                    assert_eq!(d, re_hom_expected(&x, &y, n, m), "{x:?} {y:?} {n} {m}");
                }
            }
        }
    }

    #[test]
    fn re_perversity_agrees() {
        let k = ctx("A1");
        for c in [elementary_standard(&k, 0), elementary_costandard(&k, 0), Complex::unit()] {
            let re = re_perverse_check(&k, &forget(&k, &c).unwrap(), None).unwrap();
            let be = perverse_check(&k, &c, None, 4).unwrap();
            assert!(re.is_perverse() && be.is_perverse());
        }
        let shifted = forget(&k, &Complex::unit().shift_cohomological(1)).unwrap();
        assert!(!re_perverse_check(&k, &shifted, None).unwrap().is_perverse());
    }

    #[test]
    fn ringel_in_a1() {
        let k = ctx("A1");
        let sys = k.system().clone();
        for x in sys.enumerate(4).unwrap() {
            let (lhs, rhs, eq) = ringel_costandard(&k, &x).unwrap();
            assert!(verify_equivalence(&k, &eq, &lhs.complex, &rhs.complex, HomFlavor::RightEquivariant).unwrap());
        }
        let ds = re_standard(&k, &sys.generator(0)).unwrap();
        let back = ringel_inverse(&k, &ringel(&k, &ds).unwrap()).unwrap();
        assert!(find_equivalence_in(&k, &back.complex, &ds.complex, HomFlavor::RightEquivariant).is_ok());
    }

    #[test]
    fn highest_weight_checks() {
        let k = ctx("A1");
        let sys = k.system().clone();
        for lit in ["e", "e,s"] {
            let i = LocallyClosedSubset::parse(&sys, lit).unwrap();
            let r = hw_axiom_check(&k, &i, 2).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
        }
        let hecke = HeckeAlgebra::new(sys);
        assert!(tilting_multiplicities_hold(&hecke).unwrap());
    }
}
