//! Standard and costandard complexes, recollement functors, and the
//! perverse t-structure checker.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::coxeter::{CoxeterSystem, Element, Gen, Subexpression};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hecke::{HeckeAlgebra, HeckeElement};
use crate::homotopy::{
    block_compose, convolve, find_equivalence, minimize, nested_reduction, tensor_left, ChainMap, Complex,
    Equivalence, FreeComplex, KoszulReport, Reduction,
};
use crate::locale::{quotient_morphism, LocallyClosedSubset};
use crate::poly::Poly;
use crate::soergelcalc::{BSObject, BimodMap, LeafIndex, Soergel};

/// Cap on Coxeter group enumeration for the checks in this module.
pub const ELEMENT_CAP: usize = 100_000;

/// `Δ_s = [B_s → B_∅(1)]` in degrees 0 and 1.
pub fn elementary_standard<F: Field>(ctx: &Soergel<F>, s: Gen) -> Complex<F> {
    let mut c = Complex::from_terms(0, vec![vec![BSObject::new(vec![s], 0)], vec![BSObject::new(vec![], 1)]]);
    c.set_d(0, 0, 0, ctx.bimod().dot(s));
    c
}

/// `∇_s = [B_∅(−1) → B_s]` in degrees −1 and 0.
pub fn elementary_costandard<F: Field>(ctx: &Soergel<F>, s: Gen) -> Complex<F> {
    let mut c = Complex::from_terms(-1, vec![vec![BSObject::new(vec![], -1)], vec![BSObject::new(vec![s], 0)]]);
    c.set_d(-1, 0, 0, ctx.bimod().enddot(s));
    c
}

fn convolve_all<F: Field>(ctx: &Soergel<F>, factors: impl IntoIterator<Item = Complex<F>>) -> Complex<F> {
    factors.into_iter().fold(Complex::unit(), |acc, f| convolve(ctx.bimod(), &acc, &f))
}

fn require_reduced(sys: &CoxeterSystem, word: &[Gen]) -> Result<()> {
    if sys.is_reduced(word) {
        Ok(())
    } else {
        Err(Error::NotReduced(sys.expr_string(word)))
    }
}

/// `Δ_{s_1} ⋆ ⋯ ⋆ Δ_{s_k}` for a reduced word, minimized with its certificate.
pub fn build_standard_word<F: Field>(ctx: &Soergel<F>, word: &[Gen]) -> Result<Reduction<F>> {
    require_reduced(ctx.system(), word)?;
    let raw = convolve_all(ctx, word.iter().map(|&s| elementary_standard(ctx, s)));
    Ok(minimize(ctx.bimod(), &raw))
}

/// `∇_{s_1} ⋆ ⋯ ⋆ ∇_{s_k}` for a reduced word, minimized with its certificate.
pub fn build_costandard_word<F: Field>(ctx: &Soergel<F>, word: &[Gen]) -> Result<Reduction<F>> {
    require_reduced(ctx.system(), word)?;
    let raw = convolve_all(ctx, word.iter().map(|&s| elementary_costandard(ctx, s)));
    Ok(minimize(ctx.bimod(), &raw))
}

pub fn build_standard<F: Field>(ctx: &Soergel<F>, w: &Element) -> Result<Reduction<F>> {
    build_standard_word(ctx, w.canonical_word())
}

pub fn build_costandard<F: Field>(ctx: &Soergel<F>, w: &Element) -> Result<Reduction<F>> {
    build_costandard_word(ctx, w.canonical_word())
}

/// A certified equivalence between the standard (or costandard) complexes
/// built from two reduced words of the same element.
pub fn rex_independence<F: Field>(
    ctx: &Soergel<F>,
    a: &[Gen],
    b: &[Gen],
    costandard: bool,
) -> Result<(Complex<F>, Complex<F>, Equivalence<F>)> {
    let sys = ctx.system();
    if sys.element(a) != sys.element(b) {
        return Err(Error::NotSameElement);
    }
    let build = if costandard { build_costandard_word::<F> } else { build_standard_word::<F> };
    let ca = build(ctx, a)?.current;
    let cb = build(ctx, b)?.current;
    let eq = find_equivalence(ctx, &ca, &cb)?;
    Ok((ca, cb, eq))
}

/// Certified reductions of `Δ_w ⋆ ∇_{w⁻¹}` and `∇_{w⁻¹} ⋆ Δ_w` to `B_∅`.
///
/// Both convolutions are bracketed from the middle outwards so that each
/// step cancels an elementary pair `Δ_s ⋆ ∇_s` or `∇_s ⋆ Δ_s`.
pub fn inverse_pair_reductions<F: Field>(ctx: &Soergel<F>, w: &Element) -> Result<(Reduction<F>, Reduction<F>)> {
    let word = w.canonical_word();
    let ds: Vec<Complex<F>> = word.iter().map(|&s| elementary_standard(ctx, s)).collect();
    let ns: Vec<Complex<F>> = word.iter().map(|&s| elementary_costandard(ctx, s)).collect();
    let dn = nested_reduction(ctx.bimod(), &ds, &ns)?;
    let rev_n: Vec<Complex<F>> = ns.iter().rev().cloned().collect();
    let rev_d: Vec<Complex<F>> = ds.iter().rev().cloned().collect();
    let nd = nested_reduction(ctx.bimod(), &rev_n, &rev_d)?;
    Ok((dn, nd))
}

/// Generators `𝕃𝕃_{w,1,f}: B_w̲ → B_v̲`, `f ∈ M(v̲, w)`, of `Hom^•` in the
/// singleton quotient.
fn shriek_generators<F: Field>(ctx: &Soergel<F>, v: &[Gen], w: &Element) -> Vec<Subexpression> {
    ctx.system().subexpressions(v, w)
}

/// Left coefficients on the `x = w` double leaves.
fn top_coefficients<F: Field>(
    ctx: &Soergel<F>,
    m: &BimodMap<F>,
    w: &Element,
) -> Result<BTreeMap<LeafIndex, Poly<F>>> {
    if m.is_zero() {
        return Ok(BTreeMap::new());
    }
    let mut c = ctx.coefficients(m)?;
    c.retain(|idx, _| &idx.x == w);
    Ok(c)
}

fn ones(n: usize) -> Subexpression {
    Subexpression::all_ones(n)
}

/// `i_w^! F` as a complex of free graded `R`-modules:
/// `B_v̲(p) ↦ ⊕_{f ∈ M(v̲,w)} R(p − d(f))`, entries from
/// `φ ∘ 𝕃𝕃_{w,1,f} = Σ_g c_{g,f} 𝕃𝕃_{w,1,g}` modulo leaves below `w`.
pub fn singleton_shriek<F: Field>(ctx: &Soergel<F>, c: &Complex<F>, w: &Element) -> Result<FreeComplex<F>> {
    let wword = w.canonical_word().to_vec();
    let mut out = FreeComplex::new(ctx.realization().dim());
    let mut gens: BTreeMap<(i32, usize), Vec<Subexpression>> = BTreeMap::new();
    let mut index: BTreeMap<(i32, usize), Vec<usize>> = BTreeMap::new();
    for deg in c.degrees() {
        for (i, t) in c.term(deg).iter().enumerate() {
            let fs = shriek_generators(ctx, &t.word, w);
            let idx = fs.iter().map(|f| out.push_term(deg, t.shift - f.defect)).collect();
            index.insert((deg, i), idx);
            gens.insert((deg, i), fs);
        }
    }
    for deg in c.degrees() {
        for (&(t, s), phi) in c.d(deg) {
            let src_gens = &gens[&(deg, s)];
            let tgt_gens = &gens[&(deg + 1, t)];
            if src_gens.is_empty() || tgt_gens.is_empty() {
                continue;
            }
            for (fi, f) in src_gens.iter().enumerate() {
                let idx = LeafIndex { x: w.clone(), e: ones(wword.len()), f: f.clone() };
                let leaf = ctx.double_leaf(&idx, &wword, &phi.src)?;
                for (li, p) in top_coefficients(ctx, &phi.compose(&leaf), w)? {
                    let gi = tgt_gens.iter().position(|g| *g == li.f).expect("leaf of the target");
                    out.add_d(deg, index[&(deg + 1, t)][gi], index[&(deg, s)][fi], &p);
                }
            }
        }
    }
    Ok(out)
}

/// `i_w^* F`: `B_v̲(p) ↦ ⊕_{e ∈ M(v̲,w)} R(p + d(e))`, entries from
/// `𝕃𝕃_{w,g,1} ∘ φ = Σ_e c_{g,e} 𝕃𝕃_{w,e,1}` modulo leaves below `w`.
pub fn singleton_star<F: Field>(ctx: &Soergel<F>, c: &Complex<F>, w: &Element) -> Result<FreeComplex<F>> {
    let wword = w.canonical_word().to_vec();
    let mut out = FreeComplex::new(ctx.realization().dim());
    let mut gens: BTreeMap<(i32, usize), Vec<Subexpression>> = BTreeMap::new();
    let mut index: BTreeMap<(i32, usize), Vec<usize>> = BTreeMap::new();
    for deg in c.degrees() {
        for (i, t) in c.term(deg).iter().enumerate() {
            let es = shriek_generators(ctx, &t.word, w);
            let idx = es.iter().map(|e| out.push_term(deg, t.shift + e.defect)).collect();
            index.insert((deg, i), idx);
            gens.insert((deg, i), es);
        }
    }
    for deg in c.degrees() {
        for (&(t, s), phi) in c.d(deg) {
            let src_gens = &gens[&(deg, s)];
            let tgt_gens = &gens[&(deg + 1, t)];
            if src_gens.is_empty() || tgt_gens.is_empty() {
                continue;
            }
            for (gi, g) in tgt_gens.iter().enumerate() {
                let idx = LeafIndex { x: w.clone(), e: g.clone(), f: ones(wword.len()) };
                let leaf = ctx.double_leaf(&idx, &phi.tgt, &wword)?;
                for (li, p) in top_coefficients(ctx, &leaf.compose(phi), w)? {
                    let ei = src_gens.iter().position(|e| *e == li.e).expect("leaf of the source");
                    out.add_d(deg, index[&(deg + 1, t)][gi], index[&(deg, s)][ei], &p);
                }
            }
        }
    }
    Ok(out)
}

/// Both singleton restrictions at one element, checked by two routes.
#[derive(Clone, Debug)]
pub struct SingletonReport<F: Field> {
    pub element: Element,
    /// Minimized `i_w^* F`.
    pub star: FreeComplex<F>,
    /// Minimized `i_w^! F`.
    pub shriek: FreeComplex<F>,
    /// `Λ ⊗ i_w^* F` computed from the unminimized complex.
    pub star_koszul: KoszulReport,
    pub shriek_koszul: KoszulReport,
}

impl<F: Field> SingletonReport<F> {
    /// Every generator of `i_w^* F` in total degree `≤ bound`.
    pub fn star_at_most(&self, bound: i32) -> bool {
        self.star.generator_degrees().iter().all(|&t| t <= bound)
            && self.star_koszul.nonzero_degrees().iter().all(|&n| n <= bound)
    }

    /// Every generator of `i_w^! F` in total degree `≥ bound`.
    pub fn shriek_at_least(&self, bound: i32) -> bool {
        self.shriek.generator_degrees().iter().all(|&t| t >= bound)
            && self.shriek_koszul.nonzero_degrees().iter().all(|&n| n >= bound)
    }

    pub fn le0(&self) -> bool {
        self.star_at_most(0)
    }

    pub fn ge0(&self) -> bool {
        self.shriek_at_least(0)
    }

    pub fn to_json(&self, sys: &CoxeterSystem) -> Value {
        let inv = |m: &FreeComplex<F>| -> Value {
            m.summands().into_iter().map(|(c, j)| json!({"degree": c, "shift": j})).collect()
        };
        let kz = |k: &KoszulReport| -> Value {
            k.dims.iter().filter(|(_, &d)| d > 0).map(|(n, d)| json!({"degree": n, "dim": d})).collect()
        };
        json!({
            "element": sys.elem_string(&self.element),
            "star": inv(&self.star),
            "shriek": inv(&self.shriek),
            "star_koszul": kz(&self.star_koszul),
            "shriek_koszul": kz(&self.shriek_koszul),
            "le0": self.le0(),
            "ge0": self.ge0(),
        })
    }
}

fn degree_histogram(v: &[i32]) -> BTreeMap<i32, usize> {
    let mut h = BTreeMap::new();
    for &t in v {
        *h.entry(t).or_insert(0) += 1;
    }
    h
}

fn check_routes(name: &str, min: &FreeComplex<impl Field>, k: &KoszulReport) -> Result<()> {
    let gens = degree_histogram(&min.generator_degrees());
    let koszul: BTreeMap<i32, usize> = k.dims.iter().filter(|(_, &d)| d > 0).map(|(a, b)| (*a, *b)).collect();
    if gens != koszul {
        return Err(Error::Inconsistent(format!(
            "{name}: minimal generators {gens:?} but Koszul cohomology {koszul:?}"
        )));
    }
    Ok(())
}

/// Computes `i_w^*` and `i_w^!` at one element.
///
/// The minimal free complexes and the Koszul cohomology of the unminimized
/// ones must agree degree by degree; `window` bounds the total degrees
/// examined.
pub fn singleton_report<F: Field>(
    ctx: &Soergel<F>,
    c: &Complex<F>,
    w: &Element,
    window: i32,
) -> Result<SingletonReport<F>> {
    let star_raw = singleton_star(ctx, c, w)?;
    let shriek_raw = singleton_shriek(ctx, c, w)?;
    debug_assert!(star_raw.is_valid() && shriek_raw.is_valid());
    let star = star_raw.minimize();
    let shriek = shriek_raw.minimize();
    for m in [&star, &shriek] {
        if let Some(&t) = m.generator_degrees().iter().max_by_key(|t| t.abs()) {
            if t.abs() > window {
                return Err(Error::WindowInsufficient { window, needed: t.abs() });
            }
        }
    }
    let star_koszul = star_raw.koszul((-window, window));
    let shriek_koszul = shriek_raw.koszul((-window, window));
    let name = ctx.system().elem_string(w);
    check_routes(&format!("i^* at {name}"), &star, &star_koszul)?;
    check_routes(&format!("i^! at {name}"), &shriek, &shriek_koszul)?;
    Ok(SingletonReport { element: w.clone(), star, shriek, star_koszul, shriek_koszul })
}

/// Per-element singleton data and the resulting verdicts.
#[derive(Clone, Debug)]
pub struct PerversityReport<F: Field> {
    pub window: i32,
    pub entries: Vec<SingletonReport<F>>,
}

impl<F: Field> PerversityReport<F> {
    pub fn le0(&self) -> bool {
        self.entries.iter().all(SingletonReport::le0)
    }

    pub fn ge0(&self) -> bool {
        self.entries.iter().all(SingletonReport::ge0)
    }

    pub fn is_perverse(&self) -> bool {
        self.le0() && self.ge0()
    }

    pub fn to_json(&self, sys: &CoxeterSystem) -> Value {
        json!({
            "window": self.window,
            "le0": self.le0(),
            "ge0": self.ge0(),
            "perverse": self.is_perverse(),
            "elements": self.entries.iter().map(|e| e.to_json(sys)).collect::<Vec<_>>(),
        })
    }
}

/// Elements below some term of `c`; singleton restrictions vanish elsewhere.
pub fn support_closure<F: Field>(ctx: &Soergel<F>, c: &Complex<F>) -> Result<Vec<Element>> {
    let sys = ctx.system();
    let mut out = BTreeSet::new();
    for deg in c.degrees() {
        for t in c.term(deg) {
            let top = sys.hecke_star(&t.word);
            out.extend(sys.lower_interval(&top, ELEMENT_CAP)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// The perverse t-structure test at every element of `elements` (all of
/// the support closure when `None`).
pub fn perverse_check<F: Field>(
    ctx: &Soergel<F>,
    c: &Complex<F>,
    elements: Option<&[Element]>,
    window: i32,
) -> Result<PerversityReport<F>> {
    let elems = match elements {
        Some(e) => e.to_vec(),
        None => support_closure(ctx, c)?,
    };
    let entries = elems.iter().map(|w| singleton_report(ctx, c, w, window)).collect::<Result<Vec<_>>>()?;
    Ok(PerversityReport { window, entries })
}

/// Evidence for the characterization of the simple object at `w`.
#[derive(Clone, Debug)]
pub struct SimpleEvidence<F: Field> {
    pub top: SingletonReport<F>,
    pub lower: Vec<SingletonReport<F>>,
    pub top_is_unit: bool,
    pub lower_bounds_hold: bool,
}

impl<F: Field> SimpleEvidence<F> {
    pub fn passed(&self) -> bool {
        self.top_is_unit && self.lower_bounds_hold
    }
}

/// `i_w^* B ≅ b_w`, and for every `y < w`: `i_y^* B` in degrees `≤ −1`,
/// `i_y^! B` in degrees `≥ 1`.
pub fn simple_candidate_check<F: Field>(
    ctx: &Soergel<F>,
    b: &Complex<F>,
    w: &Element,
    window: i32,
) -> Result<SimpleEvidence<F>> {
    let sys = ctx.system();
    let top = singleton_report(ctx, b, w, window)?;
    let top_is_unit = top.star.summands() == vec![(0, 0)];
    let mut lower = Vec::new();
    for y in sys.lower_interval(w, ELEMENT_CAP)? {
        if &y == w {
            continue;
        }
        lower.push(singleton_report(ctx, b, &y, window)?);
    }
    let lower_bounds_hold = lower.iter().all(|r| r.star_at_most(-1) && r.shriek_at_least(1));
    Ok(SimpleEvidence { top, lower, top_is_unit, lower_bounds_hold })
}

/// A candidate for the simple object at `w`: `B_w̲` with the lower
/// indecomposable summands of degree 0 split off by a cone.
///
/// The decomposition `[B_w̲] = Σ p_y [B_y]` is read from the
/// Kazhdan–Lusztig basis. Each lower summand must have constant
/// multiplicity, a Bott–Samelson object whose class is its Kazhdan–Lusztig
/// element, and a degree-0 Hom space of matching dimension.
pub fn simple_candidate<F: Field>(ctx: &Soergel<F>, hecke: &HeckeAlgebra, word: &[Gen]) -> Result<Complex<F>> {
    let sys = ctx.system();
    let w = sys.element(word);
    let mut rest = hecke.bs_class(word).sub(&hecke.kl_basis(&w)?);
    let mut parts: Vec<(Vec<Gen>, usize)> = Vec::new();
    while !rest.is_zero() {
        let y = rest
            .support()
            .max_by_key(|y| (y.length(), (*y).clone()))
            .cloned()
            .expect("nonzero element has support");
        let coeff = rest.coeff(&y);
        let mult = coeff.coeff(0);
        if coeff != crate::hecke::LaurentPoly::monomial(0, mult) || mult <= 0 {
            return Err(Error::Precondition(format!(
                "summand {} has multiplicity {} in B_{}",
                sys.elem_string(&y),
                coeff,
                sys.expr_string(word)
            )));
        }
        let cy = hecke.kl_basis(&y)?;
        if hecke.bs_class(y.canonical_word()) != cy {
            return Err(Error::Precondition(format!("B_{} is not indecomposable", sys.elem_string(&y))));
        }
        rest = rest.sub(&cy.scale(&crate::hecke::LaurentPoly::monomial(0, mult)));
        parts.push((y.canonical_word().to_vec(), mult as usize));
    }
    let mut c = Complex::single(BSObject::new(word.to_vec(), 0), 0);
    for (yw, mult) in parts {
        let maps = ctx.hom_basis_maps(word, &yw, 0)?;
        if maps.len() != mult {
            return Err(Error::Precondition(format!(
                "Hom^0(B_{}, B_{}) has dimension {} but the multiplicity is {}",
                sys.expr_string(word),
                sys.expr_string(&yw),
                maps.len(),
                mult
            )));
        }
        for m in maps {
            let k = c.push_term(1, BSObject::new(yw.clone(), 0));
            c.set_d(0, k, 0, m);
        }
    }
    Ok(c)
}

/// The cone of a rex move and its restriction to the top element.
#[derive(Clone, Debug)]
pub struct RexConeReport<F: Field> {
    pub cone: Complex<F>,
    pub top_star: FreeComplex<F>,
    pub minimized: Complex<F>,
}

impl<F: Field> RexConeReport<F> {
    /// `i_w^*(cone) ≃ 0`.
    pub fn supported_below(&self) -> bool {
        self.top_star.is_zero()
    }
}

/// `[B_a → B_b]` in degrees −1, 0 for the rex move `a → b`.
pub fn rex_cone<F: Field>(ctx: &Soergel<F>, a: &[Gen], b: &[Gen]) -> Result<RexConeReport<F>> {
    let sys = ctx.system();
    require_reduced(sys, a)?;
    if sys.element(a) != sys.element(b) {
        return Err(Error::NotSameElement);
    }
    let f = ctx.bimod().evaluate(&ctx.rex_move(a, b)?)?;
    let mut cone = Complex::from_terms(-1, vec![vec![BSObject::new(a.to_vec(), 0)], vec![BSObject::new(b.to_vec(), 0)]]);
    cone.set_d(-1, 0, 0, f);
    let w = sys.element(a);
    let top_star = singleton_star(ctx, &cone, &w)?.minimize();
    let minimized = minimize(ctx.bimod(), &cone).current;
    Ok(RexConeReport { cone, top_star, minimized })
}

/// Evidence for the triangles `Δ_w⟨−1⟩ → Δ_{ws} → Δ_w ⋆ B_s` and
/// `∇_w(−1) → ∇_w ⋆ B_s → ∇_{ws}`.
#[derive(Clone, Debug)]
pub struct TriangleEvidence<F: Field> {
    pub standard_cone: Complex<F>,
    pub standard: Complex<F>,
    pub standard_equivalence: Equivalence<F>,
    pub costandard_cone: Complex<F>,
    pub costandard: Complex<F>,
    pub costandard_equivalence: Equivalence<F>,
    pub char_identity: bool,
}

impl<F: Field> TriangleEvidence<F> {
    pub fn passed(&self) -> bool {
        self.char_identity
            && self.standard_equivalence.verify(&self.standard_cone, &self.standard)
            && self.costandard_equivalence.verify(&self.costandard_cone, &self.costandard)
    }
}

pub fn verify_triangle<F: Field>(
    ctx: &Soergel<F>,
    hecke: &HeckeAlgebra,
    w: &Element,
    s: Gen,
) -> Result<TriangleEvidence<F>> {
    let sys = ctx.system();
    let ws = sys.mul_gen(w, s);
    if ws.length() < w.length() {
        return Err(Error::Precondition(format!("{} s < {}", sys.elem_string(w), sys.elem_string(w))));
    }
    let bm = ctx.bimod();
    let bs = Complex::single(BSObject::new(vec![s], 0), 0);
    let unit1 = Complex::single(BSObject::new(vec![], 1), 0);
    let unitm1 = Complex::single(BSObject::new(vec![], -1), 0);

    let dw = build_standard(ctx, w)?.current;
    let dws = build_standard(ctx, &ws)?.current;
    let x = convolve(bm, &dw, &bs);
    let mut dot = ChainMap::zero(0);
    dot.set(0, 0, 0, bm.dot(s));
    let q = tensor_left(bm, &dw, &bs, &unit1, &dot);
    let dw1 = convolve(bm, &dw, &unit1);
    let standard_cone = x.cone(&dw1, &q).shift_cohomological(-1);
    let standard_equivalence = find_equivalence(ctx, &standard_cone, &dws)?;

    let nw = build_costandard(ctx, w)?.current;
    let nws = build_costandard(ctx, &ws)?.current;
    let y = convolve(bm, &nw, &bs);
    let mut enddot = ChainMap::zero(0);
    enddot.set(0, 0, 0, bm.enddot(s));
    let iota = tensor_left(bm, &nw, &unitm1, &bs, &enddot);
    let nwm1 = convolve(bm, &nw, &unitm1);
    let costandard_cone = nwm1.cone(&y, &iota);
    let costandard_equivalence = find_equivalence(ctx, &costandard_cone, &nws)?;

    let hs = HeckeElement::basis(sys.generator(s));
    let char_identity = dws.character(hecke) == hecke.mul_standard(&dw.character(hecke), &hs)
        && dws.character(hecke) == HeckeElement::basis(ws.clone());
    Ok(TriangleEvidence {
        standard_cone,
        standard: dws,
        standard_equivalence,
        costandard_cone,
        costandard: nws,
        costandard_equivalence,
        char_identity,
    })
}

fn check_minimal_in(sys: &CoxeterSystem, subset: &LocallyClosedSubset, w: &Element) -> Result<()> {
    if !subset.contains(w) || subset.members().iter().any(|x| x != w && sys.bruhat_leq(x, w)) {
        return Err(Error::Precondition(format!("{} is not minimal in {}", sys.elem_string(w), subset)));
    }
    Ok(())
}

/// `B⁺_x̲ = [⊕_f B_w̲(−d(f)) → B_x̲]` in degrees −1, 0, with entries the
/// double leaves `𝕃𝕃_{w,1,f}`.
pub fn build_bplus<F: Field>(
    ctx: &Soergel<F>,
    subset: &LocallyClosedSubset,
    x: &[Gen],
    w: &Element,
) -> Result<Complex<F>> {
    let sys = ctx.system();
    check_minimal_in(sys, subset, w)?;
    require_reduced(sys, x)?;
    let xe = sys.element(x);
    if &xe == w || !subset.contains(&xe) {
        return Err(Error::Precondition(format!("{} is not in I minus {}", sys.expr_string(x), sys.elem_string(w))));
    }
    let wword = w.canonical_word().to_vec();
    let mut c = Complex::single(BSObject::new(x.to_vec(), 0), 0);
    for f in shriek_generators(ctx, x, w) {
        let k = c.push_term(-1, BSObject::new(wword.clone(), -f.defect));
        let idx = LeafIndex { x: w.clone(), e: ones(wword.len()), f };
        c.set_d(-1, 0, k, ctx.double_leaf(&idx, &wword, x)?);
    }
    Ok(c)
}

/// `(i_{I∖{w}})_* C`: each term replaced by its `B⁺` complex and each
/// differential entry lifted through the `x = w` leaves.
///
/// The result is a complex in the quotient category of `I`; its
/// differential squares to zero modulo morphisms factoring outside `I`.
pub fn open_pushforward<F: Field>(
    ctx: &Soergel<F>,
    subset: &LocallyClosedSubset,
    w: &Element,
    c: &Complex<F>,
) -> Result<Complex<F>> {
    let sys = ctx.system();
    check_minimal_in(sys, subset, w)?;
    let wword = w.canonical_word().to_vec();
    let mut out = Complex::zero();
    let mut top: BTreeMap<(i32, usize), usize> = BTreeMap::new();
    let mut low: BTreeMap<(i32, usize), Vec<usize>> = BTreeMap::new();
    let mut gens: BTreeMap<(i32, usize), Vec<Subexpression>> = BTreeMap::new();
    for deg in c.degrees() {
        for (i, t) in c.term(deg).iter().enumerate() {
            let xe = sys.element(&t.word);
            if !sys.is_reduced(&t.word) || &xe == w || !subset.contains(&xe) {
                return Err(Error::Precondition(format!(
                    "term {} is not a reduced expression in I minus {}",
                    sys.expr_string(&t.word),
                    sys.elem_string(w)
                )));
            }
            top.insert((deg, i), out.push_term(deg, t.clone()));
        }
    }
    for deg in c.degrees() {
        for (i, t) in c.term(deg).iter().enumerate() {
            let fs = shriek_generators(ctx, &t.word, w);
            let mut idx = Vec::new();
            for f in &fs {
                let k = out.push_term(deg - 1, BSObject::new(wword.clone(), t.shift - f.defect));
                idx.push(k);
                let leaf = ctx.double_leaf(&LeafIndex { x: w.clone(), e: ones(wword.len()), f: f.clone() }, &wword, &t.word)?;
                let sign = if deg.rem_euclid(2) == 0 { leaf } else { leaf.neg() };
                out.set_d(deg - 1, top[&(deg, i)], k, sign);
            }
            low.insert((deg, i), idx);
            gens.insert((deg, i), fs);
        }
    }
    let arc = Arc::new(subset.clone());
    for deg in c.degrees() {
        for (&(t, s), phi) in c.d(deg) {
            out.set_d(deg, top[&(deg + 1, t)], top[&(deg, s)], phi.clone());
            for (fi, f) in gens[&(deg, s)].iter().enumerate() {
                let leaf_f = ctx.double_leaf(&LeafIndex { x: w.clone(), e: ones(wword.len()), f: f.clone() }, &wword, &phi.src)?;
                let comp = phi.compose(&leaf_f);
                let coeffs = top_coefficients(ctx, &comp, w)?;
                let mut lifted = BimodMap::zero(wword.clone(), phi.tgt.clone(), comp.degree);
                for (li, p) in coeffs {
                    let gi = gens[&(deg + 1, t)].iter().position(|g| *g == li.f).expect("leaf of the target");
                    let psi = ctx.bimod().left_mul_map(&p, &BimodMap::identity(&wword));
                    let leaf_g = ctx.double_leaf(&li, &wword, &phi.tgt)?;
                    lifted = lifted.add(&leaf_g.compose(&psi));
                    out.set_d(deg - 1, low[&(deg + 1, t)][gi], low[&(deg, s)][fi], psi);
                }
                let residual = quotient_morphism(&comp.sub(&lifted), &arc);
                if !residual.is_zero(ctx)? {
                    return Err(Error::LiftFailed(format!(
                        "{} -> {} through {}",
                        sys.expr_string(&phi.src),
                        sys.expr_string(&phi.tgt),
                        sys.elem_string(w)
                    )));
                }
            }
        }
    }
    out.trim();
    Ok(out)
}

/// `(i_{I∖{w}})_! = 𝔻 ∘ (i_{I∖{w}})_* ∘ 𝔻`.
pub fn open_shriek<F: Field>(
    ctx: &Soergel<F>,
    subset: &LocallyClosedSubset,
    w: &Element,
    c: &Complex<F>,
) -> Result<Complex<F>> {
    let d = crate::homotopy::dualize_complex(ctx, c)?;
    let p = open_pushforward(ctx, subset, w, &d)?;
    crate::homotopy::dualize_complex(ctx, &p)
}

/// `d ∘ d = 0` modulo morphisms factoring through elements outside `I`.
pub fn is_valid_in<F: Field>(ctx: &Soergel<F>, c: &Complex<F>, subset: &LocallyClosedSubset) -> Result<bool> {
    let arc = Arc::new(subset.clone());
    for deg in c.degrees() {
        for m in block_compose(c.d(deg + 1), c.d(deg)).values() {
            if !quotient_morphism(m, &arc).is_zero(ctx)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Δ_w ⋆ ∇_y`, built from the minimized factors and minimized again.
pub fn standard_costandard<F: Field>(ctx: &Soergel<F>, w: &Element, y: &Element) -> Result<Complex<F>> {
    let d = build_standard(ctx, w)?.current;
    let n = build_costandard(ctx, y)?.current;
    Ok(minimize(ctx.bimod(), &convolve(ctx.bimod(), &d, &n)).current)
}

/// `∇_y ⋆ Δ_w`, built the same way.
pub fn costandard_standard<F: Field>(ctx: &Soergel<F>, y: &Element, w: &Element) -> Result<Complex<F>> {
    let n = build_costandard(ctx, y)?.current;
    let d = build_standard(ctx, w)?.current;
    Ok(minimize(ctx.bimod(), &convolve(ctx.bimod(), &n, &d)).current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::realization::Realization;

    fn ctx(name: &str) -> Soergel<Rational> {
        Soergel::new(Arc::new(Realization::standard(name).unwrap()))
    }

    #[test]
    fn elementary_complexes_and_characters() {
        let k = ctx("A2");
        let hecke = HeckeAlgebra::new(k.system().clone());
        let sys = k.system().clone();
        for w in sys.enumerate(10).unwrap() {
            let d = build_standard(&k, &w).unwrap();
            assert!(d.current.is_valid());
            assert!(d.verify());
            assert_eq!(d.current.character(&hecke), HeckeElement::basis(w.clone()));
            let n = build_costandard(&k, &w).unwrap();
            assert!(n.verify());
            assert_eq!(hecke.bar(&n.current.character(&hecke)), HeckeElement::basis(w.clone()));
        }
        assert_eq!(build_standard(&k, &Element::identity()).unwrap().current.num_terms(), 1);
    }

    #[test]
    fn singleton_functors_on_small_objects() {
        let k = ctx("A1");
        let sys = k.system().clone();
        let s = sys.generator(0);
        let e = Element::identity();
        let bs = Complex::single(BSObject::new(vec![0], 0), 0);
        assert_eq!(singleton_shriek(&k, &bs, &s).unwrap().summands(), vec![(0, 0)]);
        assert_eq!(singleton_shriek(&k, &bs, &e).unwrap().summands(), vec![(0, -1)]);
        assert_eq!(singleton_star(&k, &bs, &e).unwrap().summands(), vec![(0, 1)]);
        let ds = elementary_standard(&k, 0);
        assert!(singleton_star(&k, &ds, &e).unwrap().minimize().is_zero());
        assert_eq!(singleton_star(&k, &ds, &s).unwrap().minimize().summands(), vec![(0, 0)]);
        let ns = elementary_costandard(&k, 0);
        assert!(singleton_shriek(&k, &ns, &e).unwrap().minimize().is_zero());
    }

    #[test]
    fn perversity_calibration() {
        let k = ctx("A1");
        let unit = Complex::unit();
        assert!(perverse_check(&k, &unit, None, 4).unwrap().is_perverse());
        let r = perverse_check(&k, &unit.shift_cohomological(1), None, 4).unwrap();
        assert!(r.le0() && !r.ge0());
        let r = perverse_check(&k, &unit.shift_cohomological(-1), None, 4).unwrap();
        assert!(!r.le0() && r.ge0());
        assert!(perverse_check(&k, &unit.shift_angle(1), None, 4).unwrap().is_perverse());
        for c in [elementary_standard(&k, 0), elementary_costandard(&k, 0)] {
            assert!(perverse_check(&k, &c, None, 4).unwrap().is_perverse());
            assert!(perverse_check(&k, &c.shift_angle(-1), None, 4).unwrap().is_perverse());
        }
        assert!(matches!(
            perverse_check(&k, &unit.shift_cohomological(3), None, 2),
            Err(Error::WindowInsufficient { .. })
        ));
    }

    #[test]
    fn bplus_and_open_pushforward() {
        let k = ctx("A2");
        let sys = k.system().clone();
        let i = LocallyClosedSubset::parse(&sys, "e,s").unwrap();
        let bp = build_bplus(&k, &i, &[0], &Element::identity()).unwrap();
        assert_eq!(bp.term(-1), &[BSObject::new(vec![], -1)]);
        assert_eq!(bp.d(-1)[&(0, 0)], k.bimod().enddot(0));
        let pushed = open_pushforward(&k, &i, &Element::identity(), &Complex::single(BSObject::new(vec![0], 0), 0)).unwrap();
        let eq = find_equivalence(&k, &pushed, &elementary_costandard(&k, 0)).unwrap();
        assert!(eq.verify(&pushed, &elementary_costandard(&k, 0)));
        let shriek = open_shriek(&k, &i, &Element::identity(), &Complex::single(BSObject::new(vec![0], 0), 0)).unwrap();
        assert!(find_equivalence(&k, &shriek, &elementary_standard(&k, 0)).is_ok());
        assert!(open_pushforward(&k, &i, &Element::identity(), &Complex::zero()).unwrap().is_zero());
        let single = LocallyClosedSubset::parse(&sys, "e").unwrap();
        assert!(build_bplus(&k, &single, &[0], &Element::identity()).is_err());
    }

    #[test]
    fn rex_cone_is_supported_below() {
        let k = ctx("A2");
        let r = rex_cone(&k, &[0, 1, 0], &[1, 0, 1]).unwrap();
        assert!(r.supported_below());
        let same = rex_cone(&k, &[0, 1], &[0, 1]).unwrap();
        assert!(same.minimized.is_zero());
        let b2 = ctx("B2");
        assert!(matches!(rex_cone(&b2, &[0, 1, 0, 1], &[1, 0, 1, 0]), Err(Error::UnsupportedValence(_))));
    }

    #[test]
    fn triangles_in_a2() {
        let k = ctx("A2");
        let hecke = HeckeAlgebra::new(k.system().clone());
        let sys = k.system().clone();
        let s = sys.generator(0);
        let ev = verify_triangle(&k, &hecke, &s, 1).unwrap();
        assert!(ev.passed());
        assert!(verify_triangle(&k, &hecke, &s, 0).is_err());
    }

    #[test]
    fn simple_candidate_for_the_longest_element() {
        let k = ctx("A2");
        let hecke = HeckeAlgebra::new(k.system().clone());
        let sys = k.system().clone();
        let c = simple_candidate(&k, &hecke, &[0, 1, 0]).unwrap();
        assert_eq!(c.num_terms(), 2);
        let ev = simple_candidate_check(&k, &c, &sys.element(&[0, 1, 0]), 6).unwrap();
        assert!(ev.passed());
        let bad = Complex::single(BSObject::new(vec![0, 1, 0], 0), 0);
        assert!(!simple_candidate_check(&k, &bad, &sys.element(&[0, 1, 0]), 6).unwrap().passed());
    }

    #[test]
    fn inverse_pairs_reduce_to_the_unit() {
        let k = ctx("A2");
        let w = k.system().element(&[0, 1]);
        let (dn, nd) = inverse_pair_reductions(&k, &w).unwrap();
        for r in [dn, nd] {
            assert!(r.verify());
            assert_eq!(r.current.num_terms(), 1);
            assert_eq!(r.current.term(0), &[BSObject::new(vec![], 0)]);
        }
    }
}
