//! Soergel diagrams as stacks of horizontal slices.

use std::fmt;

use crate::coxeter::{CoxeterSystem, Gen};
use crate::field::Field;
use crate::poly::Poly;

use super::bimod::{Bimod, BimodMap, Word};
use crate::error::{Error, Result};

/// A generating morphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Generator<F: Field> {
    /// Multiplication by a homogeneous polynomial in a region.
    Poly(Poly<F>),
    /// `B_s → B_∅`.
    Dot(Gen),
    /// `B_∅ → B_s`.
    EndDot(Gen),
    /// `B_{ss} → B_s`.
    Merge(Gen),
    /// `B_s → B_{ss}`.
    Split(Gen),
    /// `B_{sts…} → B_{tst…}` with `m_{st}` strands on each side.
    Braid(Gen, Gen),
}

impl<F: Field> Generator<F> {
    pub fn source(&self, sys: &CoxeterSystem) -> Word {
        match self {
            Generator::Poly(_) | Generator::EndDot(_) => vec![],
            Generator::Dot(s) | Generator::Split(s) => vec![*s],
            Generator::Merge(s) => vec![*s, *s],
            Generator::Braid(s, t) => Bimod::<F>::alternating(*s, *t, braid_len(sys, *s, *t)),
        }
    }

    pub fn target(&self, sys: &CoxeterSystem) -> Word {
        match self {
            Generator::Poly(_) | Generator::Dot(_) => vec![],
            Generator::EndDot(s) | Generator::Merge(s) => vec![*s],
            Generator::Split(s) => vec![*s, *s],
            Generator::Braid(s, t) => Bimod::<F>::alternating(*t, *s, braid_len(sys, *s, *t)),
        }
    }

    pub fn degree(&self) -> i32 {
        match self {
            Generator::Poly(f) => 2 * f.degree().unwrap_or(0) as i32,
            Generator::Dot(_) | Generator::EndDot(_) => 1,
            Generator::Merge(_) | Generator::Split(_) => -1,
            Generator::Braid(..) => 0,
        }
    }

    /// The upside-down generator.
    pub fn flip(&self) -> Self {
        match self {
            Generator::Poly(f) => Generator::Poly(f.clone()),
            Generator::Dot(s) => Generator::EndDot(*s),
            Generator::EndDot(s) => Generator::Dot(*s),
            Generator::Merge(s) => Generator::Split(*s),
            Generator::Split(s) => Generator::Merge(*s),
            Generator::Braid(s, t) => Generator::Braid(*t, *s),
        }
    }
}

fn braid_len(sys: &CoxeterSystem, s: Gen, t: Gen) -> usize {
    sys.m(s, t).expect("2m-valent vertex needs finite m_st") as usize
}

/// One generator placed with its leftmost input strand at `position`
/// (0-based); all other strands pass through.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Slice<F: Field> {
    pub position: usize,
    pub generator: Generator<F>,
}

/// A diagram read bottom to top.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagram<F: Field> {
    source: Word,
    target: Word,
    degree: i32,
    slices: Vec<Slice<F>>,
}

impl<F: Field> Diagram<F> {
    pub fn identity(word: &[Gen]) -> Self {
        Diagram { source: word.to_vec(), target: word.to_vec(), degree: 0, slices: vec![] }
    }

    pub fn generator(sys: &CoxeterSystem, g: Generator<F>) -> Self {
        let mut d = Diagram::identity(&g.source(sys));
        d.push(sys, 0, g);
        d
    }

    pub fn source(&self) -> &[Gen] {
        &self.source
    }

    pub fn target(&self) -> &[Gen] {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn slices(&self) -> &[Slice<F>] {
        &self.slices
    }

    /// Stacks a generator on top, acting on the strands starting at `position`.
    pub fn push(&mut self, sys: &CoxeterSystem, position: usize, g: Generator<F>) {
        let src = g.source(sys);
        assert!(
            position + src.len() <= self.target.len() && self.target[position..position + src.len()] == src[..],
            "generator {:?} does not match strands at {}",
            g,
            position
        );
        let mut tgt = self.target[..position].to_vec();
        tgt.extend(g.target(sys));
        tgt.extend_from_slice(&self.target[position + src.len()..]);
        self.target = tgt;
        self.degree += g.degree();
        self.slices.push(Slice { position, generator: g });
    }

    /// `self ∘ below`.
    pub fn compose(&self, below: &Diagram<F>) -> Diagram<F> {
        assert_eq!(below.target, self.source, "composing diagrams with mismatched boundaries");
        let mut slices = below.slices.clone();
        slices.extend(self.slices.iter().cloned());
        Diagram { source: below.source.clone(), target: self.target.clone(), degree: self.degree + below.degree, slices }
    }

    /// Horizontal juxtaposition: `self` on the left, `other` on the right.
    pub fn tensor(&self, other: &Diagram<F>) -> Diagram<F> {
        let mut slices: Vec<Slice<F>> = other
            .slices
            .iter()
            .map(|s| Slice { position: s.position + self.source.len(), generator: s.generator.clone() })
            .collect();
        slices.extend(self.slices.iter().cloned());
        let mut source = self.source.clone();
        source.extend_from_slice(&other.source);
        let mut target = self.target.clone();
        target.extend_from_slice(&other.target);
        Diagram { source, target, degree: self.degree + other.degree, slices }
    }

    /// `id_left ⊗ self ⊗ id_right`.
    pub fn embed(&self, left: &[Gen], right: &[Gen]) -> Diagram<F> {
        Diagram::identity(left).tensor(self).tensor(&Diagram::identity(right))
    }

    /// The flip `𝔻`: reverse the slices and turn each generator upside down.
    pub fn dual(&self) -> Diagram<F> {
        let slices =
            self.slices.iter().rev().map(|s| Slice { position: s.position, generator: s.generator.flip() }).collect();
        Diagram { source: self.target.clone(), target: self.source.clone(), degree: self.degree, slices }
    }

    pub fn has_unsupported_valence(&self, sys: &CoxeterSystem) -> bool {
        self.slices.iter().any(|s| match s.generator {
            Generator::Braid(a, b) => sys.m(a, b).map_or(true, |m| m > 3),
            _ => false,
        })
    }
}

impl<F: Field> Bimod<F> {
    fn generator_map(&self, g: &Generator<F>) -> Result<BimodMap<F>> {
        Ok(match g {
            Generator::Poly(f) => self.poly_map(f),
            Generator::Dot(s) => self.dot(*s),
            Generator::EndDot(s) => self.enddot(*s),
            Generator::Merge(s) => self.merge(*s),
            Generator::Split(s) => self.split(*s),
            Generator::Braid(s, t) => (*self.braid(*s, *t)?).clone(),
        })
    }

    /// The bimodule map of a diagram.
    pub fn evaluate(&self, d: &Diagram<F>) -> Result<BimodMap<F>> {
        let mut cur = BimodMap::identity(d.source());
        let mut strands = d.source().to_vec();
        for slice in d.slices() {
            let g = self.generator_map(&slice.generator)?;
            let width = g.src.len();
            let left = strands[..slice.position].to_vec();
            let right = strands[slice.position + width..].to_vec();
            let step = self.embed(&left, &g, &right);
            cur = step.compose(&cur);
            strands = step.tgt.clone();
        }
        debug_assert_eq!(strands, d.target());
        Ok(cur)
    }

    /// As [`Bimod::evaluate`], refusing diagrams whose entries would exceed
    /// the polynomial degree bound `bound` (in the grading `deg V* = 2`).
    pub fn evaluate_bounded(&self, d: &Diagram<F>, bound: i32) -> Result<BimodMap<F>> {
        let needed = d.degree() + d.source().len() as i32 + d.target().len() as i32;
        if needed > bound {
            return Err(Error::DegreeBoundExceeded { needed, bound });
        }
        self.evaluate(d)
    }
}

impl<F: Field> fmt::Display for Diagram<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?} [deg {}]:", self.source, self.target, self.degree)?;
        for s in &self.slices {
            let name = match &s.generator {
                Generator::Poly(p) => format!("poly({p:?})"),
                Generator::Dot(s) => format!("dot({s})"),
                Generator::EndDot(s) => format!("enddot({s})"),
                Generator::Merge(s) => format!("merge({s})"),
                Generator::Split(s) => format!("split({s})"),
                Generator::Braid(s, t) => format!("braid({s},{t})"),
            };
            write!(f, " {}@{}", name, s.position)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::realization::Realization;
    use std::sync::Arc;

    #[test]
    fn diagram_evaluation_matches_direct_composites() {
        let b = Bimod::<Rational>::new(Arc::new(Realization::standard("A2").unwrap()));
        let sys = b.realization().system().clone();
        let mut d = Diagram::identity(&[0, 0]);
        d.push(&sys, 0, Generator::Merge(0));
        d.push(&sys, 0, Generator::Split(0));
        d.push(&sys, 1, Generator::Dot(0));
        assert_eq!(d.degree(), -1);
        let direct = b.tensor_id_left(&[0], &b.dot(0)).compose(&b.split(0)).compose(&b.merge(0));
        assert_eq!(b.evaluate(&d).unwrap(), direct);
        assert_eq!(b.evaluate(&Diagram::identity(&[0, 1, 0])).unwrap(), BimodMap::identity(&[0, 1, 0]));
    }

    #[test]
    fn dual_is_an_involution() {
        let sys = CoxeterSystem::of_type("A2").unwrap();
        let mut d = Diagram::<Rational>::identity(&[0, 1, 0]);
        d.push(&sys, 0, Generator::Braid(0, 1));
        d.push(&sys, 2, Generator::Dot(1));
        d.push(&sys, 0, Generator::Poly(Poly::var(0)));
        assert_eq!(d.dual().dual(), d);
        assert_eq!(d.dual().source(), d.target());
        assert_eq!(d.dual().degree(), d.degree());
    }

    #[test]
    fn tensor_of_dots_has_degree_two() {
        let b = Bimod::<Rational>::new(Arc::new(Realization::standard("A2").unwrap()));
        let sys = b.realization().system().clone();
        let d = Diagram::generator(&sys, Generator::Dot(0)).tensor(&Diagram::generator(&sys, Generator::Dot(1)));
        assert_eq!(d.degree(), 2);
        assert_eq!(b.evaluate(&d).unwrap(), b.tensor(&b.dot(0), &b.dot(1)));
    }
}
