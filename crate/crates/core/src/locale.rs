//! Locally closed subsets of `(W, ≤)` and the quotient categories they index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::coxeter::{CoxeterSystem, Element, Gen};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hecke::LaurentPoly;
use crate::poly::Poly;
use crate::soergelcalc::{BSObject, BimodMap, LeafIndex, Soergel};

const INTERVAL_CAP: usize = 100_000;

/// A finite locally closed subset `I = Ī ∖ (Ī ∖ I)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyClosedSubset {
    members: BTreeSet<Element>,
    closure: BTreeSet<Element>,
}

fn down_closure(sys: &CoxeterSystem, members: &BTreeSet<Element>) -> Result<BTreeSet<Element>> {
    let mut out = BTreeSet::new();
    for w in members {
        out.extend(sys.lower_interval(w, INTERVAL_CAP)?);
    }
    Ok(out)
}

fn is_down_closed(sys: &CoxeterSystem, set: &BTreeSet<Element>) -> Result<bool> {
    Ok(down_closure(sys, set)? == *set)
}

impl LocallyClosedSubset {
    /// Validates that `members` is locally closed, i.e. `Ī ∖ I` is closed.
    pub fn new(sys: &CoxeterSystem, members: impl IntoIterator<Item = Element>) -> Result<Self> {
        let members: BTreeSet<Element> = members.into_iter().collect();
        let closure = down_closure(sys, &members)?;
        let rest: BTreeSet<Element> = closure.difference(&members).cloned().collect();
        if !is_down_closed(sys, &rest)? {
            return Err(Error::Precondition("subset is not locally closed".into()));
        }
        Ok(LocallyClosedSubset { members, closure })
    }

    /// `I₀ ∖ I₁` for closed `I₁ ⊆ I₀`, normalized to `(Ī, Ī ∖ I)`.
    pub fn from_pair(sys: &CoxeterSystem, i0: &BTreeSet<Element>, i1: &BTreeSet<Element>) -> Result<Self> {
        if !is_down_closed(sys, i0)? || !is_down_closed(sys, i1)? || !i1.is_subset(i0) {
            return Err(Error::Precondition("expected closed subsets I₁ ⊆ I₀".into()));
        }
        Self::new(sys, i0.difference(i1).cloned())
    }

    /// `{x : x ≤ w}`.
    pub fn lower(sys: &CoxeterSystem, w: &Element) -> Result<Self> {
        Self::new(sys, sys.lower_interval(w, INTERVAL_CAP)?)
    }

    /// `{x : x < w}`.
    pub fn strict_lower(sys: &CoxeterSystem, w: &Element) -> Result<Self> {
        Self::new(sys, sys.lower_interval(w, INTERVAL_CAP)?.into_iter().filter(|x| x != w))
    }

    pub fn singleton(sys: &CoxeterSystem, w: &Element) -> Result<Self> {
        Self::new(sys, [w.clone()])
    }

    /// All of a finite `W`.
    pub fn everything(sys: &CoxeterSystem) -> Result<Self> {
        Self::lower(sys, &sys.longest_element()?)
    }

    /// Parses `s,ts,e`, `<=sts` or `<sts`.
    pub fn parse(sys: &CoxeterSystem, text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(w) = text.strip_prefix("<=") {
            return Self::lower(sys, &sys.element(&sys.parse_word(w)?));
        }
        if let Some(w) = text.strip_prefix('<') {
            return Self::strict_lower(sys, &sys.element(&sys.parse_word(w)?));
        }
        if text.is_empty() {
            return Self::new(sys, []);
        }
        let mut members = Vec::new();
        for part in text.split(',') {
            members.push(sys.element(&sys.parse_word(part.trim())?));
        }
        Self::new(sys, members)
    }

    pub fn members(&self) -> &BTreeSet<Element> {
        &self.members
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Ī`.
    pub fn closure(&self) -> &BTreeSet<Element> {
        &self.closure
    }

    /// `Ī ∖ I`, the closed set whose morphisms are quotiented out.
    pub fn boundary(&self) -> BTreeSet<Element> {
        self.closure.difference(&self.members).cloned().collect()
    }

    pub fn is_closed(&self) -> bool {
        self.members == self.closure
    }

    /// Whether `J ⊆ self` is closed in `self`.
    pub fn is_closed_subset(&self, sys: &CoxeterSystem, j: &BTreeSet<Element>) -> bool {
        j.is_subset(&self.members)
            && j.iter().all(|y| self.members.iter().all(|x| !sys.bruhat_leq(x, y) || j.contains(x)))
    }

    /// Whether `J ⊆ self` is open in `self`.
    pub fn is_open_subset(&self, sys: &CoxeterSystem, j: &BTreeSet<Element>) -> bool {
        j.is_subset(&self.members)
            && j.iter().all(|x| self.members.iter().all(|y| !sys.bruhat_leq(x, y) || j.contains(y)))
    }

    /// Minimal elements.
    pub fn minimal(&self, sys: &CoxeterSystem) -> Vec<Element> {
        self.members
            .iter()
            .filter(|w| !self.members.iter().any(|x| sys.bruhat_lt(x, w)))
            .cloned()
            .collect()
    }
}

impl fmt::Display for LocallyClosedSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|x| format!("{:?}", x.canonical_word())).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Double-leaf indices with `x ∈ I₁`: an `R`-basis of the morphisms
/// factoring through objects supported on `I₁`.
pub fn factor_ideal<F: Field>(ctx: &Soergel<F>, v: &[Gen], w: &[Gen], i1: &BTreeSet<Element>) -> Vec<LeafIndex> {
    ctx.leaf_indices(v, w).into_iter().filter(|idx| i1.contains(&idx.x)).collect()
}

/// `Σ_{x ∈ I} Σ_{f,e} v^{d(e)+d(f)}`.
pub fn local_hom_rank(sys: &CoxeterSystem, v: &[Gen], w: &[Gen], i: &LocallyClosedSubset) -> LaurentPoly {
    let sv = sys.all_subexpressions(v);
    let sw = sys.all_subexpressions(w);
    let mut p = LaurentPoly::zero();
    for x in i.members() {
        let (Some(es), Some(fs)) = (sv.get(x), sw.get(x)) else { continue };
        for e in es {
            for f in fs {
                p.add_term(e.defect + f.defect, 1);
            }
        }
    }
    p
}

/// A morphism of the quotient category `𝒟_{BS,I}`, held by a representative.
#[derive(Clone, Debug)]
pub struct LocalMorphism<F: Field> {
    pub map: BimodMap<F>,
    pub subset: Arc<LocallyClosedSubset>,
}

impl<F: Field> LocalMorphism<F> {
    pub fn new(map: BimodMap<F>, subset: Arc<LocallyClosedSubset>) -> Self {
        LocalMorphism { map, subset }
    }

    /// Double-leaf coefficients with `x ∈ I`.
    pub fn coefficients(&self, ctx: &Soergel<F>) -> Result<BTreeMap<LeafIndex, Poly<F>>> {
        let mut c = ctx.coefficients(&self.map)?;
        c.retain(|idx, _| self.subset.contains(&idx.x));
        Ok(c)
    }

    pub fn is_zero(&self, ctx: &Soergel<F>) -> Result<bool> {
        Ok(self.coefficients(ctx)?.is_empty())
    }

    pub fn compose(&self, f: &LocalMorphism<F>) -> LocalMorphism<F> {
        assert_eq!(self.subset, f.subset, "composing across different quotient categories");
        LocalMorphism { map: self.map.compose(&f.map), subset: self.subset.clone() }
    }

    pub fn sub(&self, other: &LocalMorphism<F>) -> LocalMorphism<F> {
        LocalMorphism { map: self.map.sub(&other.map), subset: self.subset.clone() }
    }

    pub fn equals(&self, ctx: &Soergel<F>, other: &LocalMorphism<F>) -> Result<bool> {
        self.sub(other).is_zero(ctx)
    }
}

/// The image of `f` in `𝒟_{BS,I}`.
pub fn quotient_morphism<F: Field>(f: &BimodMap<F>, i: &Arc<LocallyClosedSubset>) -> LocalMorphism<F> {
    LocalMorphism::new(f.clone(), i.clone())
}

/// The canonical isomorphism `B_a → B_b` in `𝒟_{BS,{w}}` for two reduced
/// expressions of `w`. When the rex graph offers a second route, both are
/// evaluated and required to agree in the quotient.
pub fn rex_iso<F: Field>(ctx: &Soergel<F>, a: &[Gen], b: &[Gen]) -> Result<LocalMorphism<F>> {
    let sys = ctx.system().clone();
    if !sys.is_reduced(a) {
        return Err(Error::NotReduced(sys.expr_string(a)));
    }
    if !sys.is_reduced(b) {
        return Err(Error::NotReduced(sys.expr_string(b)));
    }
    let w = sys.element(a);
    if sys.element(b) != w {
        return Err(Error::NotSameElement);
    }
    let subset = Arc::new(LocallyClosedSubset::singleton(&sys, &w)?);
    let direct = ctx.bimod().evaluate(&ctx.rex_move(a, b)?)?;
    let iso = LocalMorphism::new(direct, subset.clone());
    let path = sys.rex_path(a, b)?;
    let mut visited = vec![a.to_vec()];
    let mut cur = a.to_vec();
    for mv in &path {
        cur = sys.apply_braid(&cur, *mv);
        visited.push(cur.clone());
    }
    if let Some(detour) = sys.rex_graph(&w)?.nodes.into_iter().find(|n| !visited.contains(n)) {
        let via = ctx.rex_move(&detour, b)?.compose(&ctx.rex_move(a, &detour)?);
        let other = LocalMorphism::new(ctx.bimod().evaluate(&via)?, subset);
        if !iso.equals(ctx, &other)? {
            return Err(Error::Precondition("rex moves disagree in the singleton quotient".into()));
        }
    }
    Ok(iso)
}

/// Splits a list of objects over `I` by whether their element lies in
/// `J` (open and closed in `I`), checking that no morphisms cross.
pub fn split_open_closed(
    sys: &CoxeterSystem,
    objects: &[BSObject],
    i: &LocallyClosedSubset,
    j: &BTreeSet<Element>,
) -> Result<(Vec<BSObject>, Vec<BSObject>)> {
    if !i.is_open_subset(sys, j) || !i.is_closed_subset(sys, j) {
        return Err(Error::Precondition("J must be open and closed in I".into()));
    }
    let (inside, outside): (Vec<BSObject>, Vec<BSObject>) =
        objects.iter().cloned().partition(|o| j.contains(&sys.element(&o.word)));
    for a in &inside {
        for b in &outside {
            if !local_hom_rank(sys, &a.word, &b.word, i).is_zero() || !local_hom_rank(sys, &b.word, &a.word, i).is_zero() {
                return Err(Error::Precondition("morphisms cross the open-closed decomposition".into()));
            }
        }
    }
    Ok((inside, outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::realization::Realization;

    fn ctx() -> Soergel<Rational> {
        Soergel::new(Arc::new(Realization::standard("A2").unwrap()))
    }

    #[test]
    fn parsing_and_closure() {
        let c = ctx();
        let sys = c.system();
        let i = LocallyClosedSubset::parse(sys, "<=st").unwrap();
        assert_eq!(i.len(), 4);
        assert!(i.is_closed());
        let j = LocallyClosedSubset::parse(sys, "s,t").unwrap();
        assert_eq!(j.boundary().len(), 1);
        assert!(LocallyClosedSubset::parse(sys, "e,st").is_err());
        assert_eq!(LocallyClosedSubset::parse(sys, "<sts").unwrap().len(), 5);
    }

    #[test]
    fn ideal_and_local_ranks() {
        let c = ctx();
        let sys = c.system().clone();
        let e: BTreeSet<Element> = [Element::identity()].into();
        let idx = factor_ideal(&c, &[0], &[0], &e);
        assert_eq!(idx.iter().map(|i| i.degree()).collect::<Vec<_>>(), vec![2]);
        let mut degs: Vec<i32> = factor_ideal(&c, &[0, 1, 0], &[0], &e).iter().map(|i| i.degree()).collect();
        degs.sort();
        assert_eq!(degs, vec![2, 4]);
        let s = LocallyClosedSubset::singleton(&sys, &sys.generator(0)).unwrap();
        assert_eq!(local_hom_rank(&sys, &[0], &[0], &s).to_string(), "1");
        let w0 = LocallyClosedSubset::singleton(&sys, &sys.element(&[0, 1, 0])).unwrap();
        assert_eq!(local_hom_rank(&sys, &[0, 1, 0], &[0, 1, 0], &w0).to_string(), "1");
        let i = LocallyClosedSubset::lower(&sys, &sys.element(&[0, 1, 0])).unwrap();
        let j = LocallyClosedSubset::lower(&sys, &sys.element(&[0, 1])).unwrap();
        let open = LocallyClosedSubset::new(&sys, i.members().difference(j.members()).cloned()).unwrap();
        let total = local_hom_rank(&sys, &[0, 1, 0], &[1, 0], &i);
        let split = local_hom_rank(&sys, &[0, 1, 0], &[1, 0], &open).add(&local_hom_rank(&sys, &[0, 1, 0], &[1, 0], &j));
        assert_eq!(total, split);
    }

    #[test]
    fn quotients_of_endomorphisms() {
        let c = ctx();
        let sys = c.system().clone();
        let b = c.bimod();
        let s = Arc::new(LocallyClosedSubset::singleton(&sys, &sys.generator(0)).unwrap());
        let bb = b.enddot(0).compose(&b.dot(0));
        assert!(quotient_morphism(&bb, &s).is_zero(&c).unwrap());
        assert!(!quotient_morphism(&BimodMap::identity(&[0]), &s).is_zero(&c).unwrap());
        let alpha_id = BimodMap::identity(&[0]).right_mul(c.realization().alpha(0));
        let full = c.coefficients(&alpha_id).unwrap();
        assert!(full.keys().any(|i| i.x.is_identity()) && full.keys().any(|i| !i.x.is_identity()));
        let kept = quotient_morphism(&alpha_id, &s).coefficients(&c).unwrap();
        assert!(kept.keys().all(|i| !i.x.is_identity()) && !kept.is_empty());
    }

    #[test]
    fn rex_isos_in_the_singleton_quotient() {
        let c = ctx();
        let f = rex_iso(&c, &[0, 1, 0], &[1, 0, 1]).unwrap();
        let g = rex_iso(&c, &[1, 0, 1], &[0, 1, 0]).unwrap();
        let id = LocalMorphism::new(BimodMap::identity(&[0, 1, 0]), f.subset.clone());
        assert!(g.compose(&f).equals(&c, &id).unwrap());
        assert!(!g.compose(&f).map.sub(&id.map).is_zero());
        assert!(rex_iso(&c, &[0, 0], &[0, 0]).is_err());
        let b2 = Soergel::<Rational>::new(Arc::new(Realization::standard("B2").unwrap()));
        assert!(matches!(rex_iso(&b2, &[0, 1, 0, 1], &[1, 0, 1, 0]), Err(Error::UnsupportedValence(_))));
    }

    #[test]
    fn open_closed_split() {
        let c = ctx();
        let sys = c.system();
        let i = LocallyClosedSubset::parse(sys, "s,t").unwrap();
        let objs = vec![BSObject::new(vec![0], 0), BSObject::new(vec![1], 0)];
        let j: BTreeSet<Element> = [sys.generator(0)].into();
        let (a, b) = split_open_closed(sys, &objs, &i, &j).unwrap();
        assert_eq!((a, b), (vec![objs[0].clone()], vec![objs[1].clone()]));
        let (a, b) = split_open_closed(sys, &objs, &i, i.members()).unwrap();
        assert_eq!((a.len(), b.len()), (2, 0));
    }
}
