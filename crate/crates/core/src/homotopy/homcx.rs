//! Hom complexes between complexes, their cohomology, and equivalence search.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{sparse_kernel, SparseEchelon, SparseVec};
use crate::poly::{count_monomials, Mono};
use crate::soergelcalc::{BimodMap, Soergel};

use super::complex::{ChainMap, Complex, Equivalence};

/// Which morphism spaces to use between Bott–Samelson objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomFlavor {
    /// Full graded bimodule morphisms.
    Bimodule,
    /// Morphisms modulo the left action of positive-degree polynomials.
    RightEquivariant,
}

const PIECE_SHIFT: u32 = 40;

struct Piece {
    c: i32,
    i: usize,
    j: usize,
    deg: i32,
    stride: usize,
}

/// `Hom^p(C, D)` in a fixed internal degree, with a basis.
struct Level<F: Field> {
    p: i32,
    pieces: Vec<Piece>,
    index: HashMap<(i32, usize, usize), usize>,
    basis: Vec<ChainMap<F>>,
}

struct HomComplex<'a, F: Field> {
    ctx: &'a Soergel<F>,
    c: &'a Complex<F>,
    d: &'a Complex<F>,
    k: i32,
    flavor: HomFlavor,
}

impl<'a, F: Field> HomComplex<'a, F> {
    fn level(&self, p: i32) -> Result<Level<F>> {
        let real = self.ctx.realization();
        let mut lvl = Level { p, pieces: vec![], index: HashMap::new(), basis: vec![] };
        for c in self.c.degrees() {
            for (i, a) in self.c.term(c).iter().enumerate() {
                for (j, b) in self.d.term(c + p).iter().enumerate() {
                    let deg = self.k + b.shift - a.shift;
                    let shape = BimodMap::<F>::zero(a.word.clone(), b.word.clone(), deg);
                    let stride = count_monomials(real.dim(), shape.max_entry_degree()).max(1);
                    lvl.index.insert((c, i, j), lvl.pieces.len());
                    lvl.pieces.push(Piece { c, i, j, deg, stride });
                    let maps: Vec<BimodMap<F>> = match self.flavor {
                        HomFlavor::Bimodule => self.ctx.hom_basis_maps(&a.word, &b.word, deg)?,
                        HomFlavor::RightEquivariant => {
                            let h = self.ctx.hom_space(&a.word, &b.word, deg)?;
                            h.basis()
                                .iter()
                                .filter(|(_, mu)| *mu == Mono(0))
                                .map(|&(li, _)| (**h.leaf_map(li)).clone())
                                .collect()
                        }
                    };
                    for m in maps {
                        let mut cm = ChainMap::zero(p);
                        cm.set(c, j, i, m);
                        lvl.basis.push(cm);
                    }
                }
            }
        }
        Ok(lvl)
    }

    /// Coordinates of an element of `Hom^p` in the ambient space of `lvl`.
    fn vectorize(&self, lvl: &Level<F>, m: &ChainMap<F>) -> Result<SparseVec<F>> {
        assert_eq!(m.degree, lvl.p);
        let real = self.ctx.realization();
        let mut out = Vec::new();
        for (&c, blk) in &m.comps {
            for (&(j, i), e) in blk {
                if e.is_zero() {
                    continue;
                }
                let pi = lvl.index[&(c, i, j)];
                let piece = &lvl.pieces[pi];
                debug_assert_eq!((piece.c, piece.i, piece.j), (c, i, j));
                let base = pi << PIECE_SHIFT;
                match self.flavor {
                    HomFlavor::Bimodule => {
                        out.extend(e.flatten(real, piece.stride).into_iter().map(|(k, x)| (base + k, x)));
                    }
                    HomFlavor::RightEquivariant => {
                        let h = self.ctx.hom_space(&e.src, &e.tgt, piece.deg)?;
                        let coords = h.coordinates(real, e).ok_or_else(|| Error::NotInSpan {
                            domain: self.ctx.system().expr_string(&e.src),
                            codomain: self.ctx.system().expr_string(&e.tgt),
                        })?;
                        for (q, (x, &(_, mu))) in coords.into_iter().zip(h.basis()).enumerate() {
                            if mu == Mono(0) && !x.is_zero() {
                                out.push((base + q, x));
                            }
                        }
                    }
                }
            }
        }
        out.sort_by_key(|t| t.0);
        Ok(out)
    }

    fn differential_rank(&self, src: &Level<F>, tgt: &Level<F>) -> Result<usize> {
        let mut e = SparseEchelon::new();
        for b in &src.basis {
            let db = b.differential(self.c, self.d);
            e.insert(&self.vectorize(tgt, &db)?);
        }
        Ok(e.rank())
    }

    fn cohomology_dim(&self, p: i32) -> Result<usize> {
        let prev = self.level(p - 1)?;
        let cur = self.level(p)?;
        let next = self.level(p + 1)?;
        let r_in = self.differential_rank(&prev, &cur)?;
        let r_out = self.differential_rank(&cur, &next)?;
        Ok(cur.basis.len() - r_in - r_out)
    }
}

/// `dim Hom_{K^b}(C, D⟨n⟩[m])` for every `(n, m)` in the given ranges.
///
/// This is `H^{n+m}` of the Hom complex in internal degree `−n`.
pub fn hom_dims<F: Field>(
    ctx: &Soergel<F>,
    c: &Complex<F>,
    d: &Complex<F>,
    flavor: HomFlavor,
    ns: std::ops::RangeInclusive<i32>,
    ms: std::ops::RangeInclusive<i32>,
) -> Result<BTreeMap<(i32, i32), usize>> {
    let mut out = BTreeMap::new();
    for n in ns {
        let hc = HomComplex { ctx, c, d, k: -n, flavor };
        for m in ms.clone() {
            out.insert((n, m), hc.cohomology_dim(n + m)?);
        }
    }
    Ok(out)
}

/// Degree-0 cycles of `Hom(C, D)` that are not boundaries, one per class.
fn h0_representatives<F: Field>(
    ctx: &Soergel<F>,
    c: &Complex<F>,
    d: &Complex<F>,
    flavor: HomFlavor,
) -> Result<Vec<ChainMap<F>>> {
    let hc = HomComplex { ctx, c, d, k: 0, flavor };
    let prev = hc.level(-1)?;
    let cur = hc.level(0)?;
    let next = hc.level(1)?;
    let cols: Vec<SparseVec<F>> =
        cur.basis.iter().map(|b| hc.vectorize(&next, &b.differential(c, d))).collect::<Result<_>>()?;
    let mut bounds = SparseEchelon::new();
    for b in &prev.basis {
        bounds.insert(&hc.vectorize(&cur, &b.differential(c, d))?);
    }
    let mut reps = Vec::new();
    for kvec in sparse_kernel(&cols) {
        let mut m = ChainMap::zero(0);
        for (x, b) in kvec.iter().zip(&cur.basis) {
            if !x.is_zero() {
                m = m.add(&b.scale(x));
            }
        }
        let v = hc.vectorize(&cur, &m)?;
        if bounds.insert(&v) {
            reps.push(m);
        }
    }
    Ok(reps)
}

/// Solves `target = λ · id + (dh + hd)` for `λ` and `h ∈ Hom^{-1}(C, C)`.
fn solve_scalar_homotopy<F: Field>(
    ctx: &Soergel<F>,
    c: &Complex<F>,
    target: &ChainMap<F>,
    flavor: HomFlavor,
) -> Result<Option<(F, ChainMap<F>)>> {
    let hc = HomComplex { ctx, c, d: c, k: 0, flavor };
    let prev = hc.level(-1)?;
    let cur = hc.level(0)?;
    let mut e = SparseEchelon::tracking();
    let mut slots: Vec<Option<usize>> = Vec::new();
    let id = ChainMap::identity(c);
    if e.insert(&hc.vectorize(&cur, &id)?) {
        slots.push(None);
    }
    for (i, b) in prev.basis.iter().enumerate() {
        if e.insert(&hc.vectorize(&cur, &b.differential(c, c))?) {
            slots.push(Some(i));
        }
    }
    let Some(sol) = e.solve(&hc.vectorize(&cur, target)?) else { return Ok(None) };
    let mut lambda = F::zero();
    let mut h = ChainMap::zero(-1);
    for (slot, x) in sol {
        match slots[slot] {
            None => lambda = x,
            Some(i) => h = h.add(&prev.basis[i].scale(&x)),
        }
    }
    Ok(Some((lambda, h)))
}

/// Whether every component of `m` vanishes in the given flavor.
///
/// In the right-equivariant flavor a component vanishes when it lies in
/// the span of positive-degree left multiples of double leaves.
pub fn chain_map_vanishes<F: Field>(ctx: &Soergel<F>, m: &ChainMap<F>, flavor: HomFlavor) -> Result<bool> {
    for blk in m.comps.values() {
        for e in blk.values() {
            if e.is_zero() {
                continue;
            }
            match flavor {
                HomFlavor::Bimodule => return Ok(false),
                HomFlavor::RightEquivariant => {
                    let h = ctx.hom_space(&e.src, &e.tgt, e.degree)?;
                    let coords = h.coordinates(ctx.realization(), e).ok_or_else(|| Error::NotInSpan {
                        domain: ctx.system().expr_string(&e.src),
                        codomain: ctx.system().expr_string(&e.tgt),
                    })?;
                    if coords.iter().zip(h.basis()).any(|(x, &(_, mu))| mu == Mono(0) && !x.is_zero()) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Checks `gf − id = δh` and `fg − id = δk` in the given flavor.
pub fn verify_equivalence<F: Field>(
    ctx: &Soergel<F>,
    eq: &Equivalence<F>,
    c: &Complex<F>,
    d: &Complex<F>,
    flavor: HomFlavor,
) -> Result<bool> {
    if flavor == HomFlavor::Bimodule {
        return Ok(eq.verify(c, d));
    }
    let gf = eq.g.compose(&eq.f).sub(&ChainMap::identity(c)).sub(&eq.h.differential(c, c));
    let fg = eq.f.compose(&eq.g).sub(&ChainMap::identity(d)).sub(&eq.k.differential(d, d));
    let df = eq.f.differential(c, d);
    let dg = eq.g.differential(d, c);
    for m in [&gf, &fg, &df, &dg] {
        if !chain_map_vanishes(ctx, m, flavor)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches for a homotopy equivalence `C ≃ D` from degree-0 Hom classes.
///
/// Succeeds when some pair of classes `f`, `g` composes to nonzero scalar
/// multiples of the identities up to homotopy; the returned certificate
/// is exact.
pub fn find_equivalence<F: Field>(ctx: &Soergel<F>, c: &Complex<F>, d: &Complex<F>) -> Result<Equivalence<F>> {
    find_equivalence_in(ctx, c, d, HomFlavor::Bimodule)
}

/// [`find_equivalence`] with morphisms taken in the given flavor.
pub fn find_equivalence_in<F: Field>(
    ctx: &Soergel<F>,
    c: &Complex<F>,
    d: &Complex<F>,
    flavor: HomFlavor,
) -> Result<Equivalence<F>> {
    let fs = h0_representatives(ctx, c, d, flavor)?;
    let gs = h0_representatives(ctx, d, c, flavor)?;
    for f in &fs {
        for g in &gs {
            let gf = g.compose(f);
            let Some((lambda, h)) = solve_scalar_homotopy(ctx, c, &gf, flavor)? else { continue };
            let Some(inv) = lambda.inv() else { continue };
            let g2 = g.scale(&inv);
            let fg = f.compose(&g2);
            let Some((mu, k)) = solve_scalar_homotopy(ctx, d, &fg, flavor)? else { continue };
            if mu != F::one() {
                continue;
            }
            let eq = Equivalence { f: f.clone(), g: g2, h: h.scale(&inv), k };
            debug_assert!(verify_equivalence(ctx, &eq, c, d, flavor).unwrap_or(false));
            return Ok(eq);
        }
    }
    Err(Error::NotEquivalent(format!(
        "no degree-0 classes compose to the identity ({} and {} candidates)",
        fs.len(),
        gs.len()
    )))
}
