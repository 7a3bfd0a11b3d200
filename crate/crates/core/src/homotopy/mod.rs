//! Complexes in the bounded homotopy category of Soergel bimodules.

pub mod complex;
pub mod free;
pub mod homcx;
pub mod minimize;

pub use complex::{
    block_compose, convolve, convolve_indexed, dualize_complex, tensor_equivalence, tensor_left, tensor_right, Block,
    ChainMap, Complex, Equivalence, TensorIndex,
};
pub use free::{FreeComplex, KoszulReport};
pub use homcx::{chain_map_vanishes, find_equivalence, find_equivalence_in, hom_dims, verify_equivalence, HomFlavor};
pub use minimize::{invert_degree_zero, minimize, nested_reduction, split_maps, Reduction};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::hecke::{HeckeAlgebra, HeckeElement};
    use crate::realization::Realization;
    use crate::soergelcalc::{BSObject, Soergel};
    use std::sync::Arc;

    fn ctx(name: &str) -> Soergel<Rational> {
        Soergel::new(Arc::new(Realization::standard(name).unwrap()))
    }

    fn delta(ctx: &Soergel<Rational>, s: crate::coxeter::Gen) -> Complex<Rational> {
        let mut c = Complex::from_terms(0, vec![vec![BSObject::new(vec![s], 0)], vec![BSObject::new(vec![], 1)]]);
        c.set_d(0, 0, 0, ctx.bimod().dot(s));
        c
    }

    fn nabla(ctx: &Soergel<Rational>, s: crate::coxeter::Gen) -> Complex<Rational> {
        let mut c = Complex::from_terms(-1, vec![vec![BSObject::new(vec![], -1)], vec![BSObject::new(vec![s], 0)]]);
        c.set_d(-1, 0, 0, ctx.bimod().enddot(s));
        c
    }

    #[test]
    fn delta_nabla_cancels_to_unit() {
        let k = ctx("A1");
        let c = convolve(k.bimod(), &delta(&k, 0), &nabla(&k, 0));
        assert!(c.is_valid());
        let r = minimize(k.bimod(), &c);
        assert_eq!(r.current.num_terms(), 1);
        assert_eq!(r.current.term(0), &[BSObject::new(vec![], 0)]);
        assert!(r.verify());
    }

    #[test]
    fn nested_reduction_of_a_length_two_pair() {
        let k = ctx("A2");
        let r = nested_reduction(k.bimod(), &[delta(&k, 0), delta(&k, 1)], &[nabla(&k, 0), nabla(&k, 1)]).unwrap();
        assert_eq!(r.original.num_terms(), 16);
        assert_eq!(r.current.num_terms(), 1);
        assert!(r.verify());
    }

    #[test]
    fn shifts_and_characters() {
        let k = ctx("A1");
        let hecke = HeckeAlgebra::new(k.system().clone());
        let d = delta(&k, 0);
        let s = k.system().generator(0);
        // [B_s] − v[B_∅] = H_s.
        let expect = HeckeElement::basis(s.clone());
        assert_eq!(d.character(&hecke), expect);
        assert_eq!(d.shift_angle(1).character(&hecke), expect.scale(&crate::hecke::LaurentPoly::monomial(-1, -1)));
        let dd = dualize_complex(&k, &d).unwrap();
        assert!(dd.is_valid());
        assert_eq!(dd.term(-1), nabla(&k, 0).term(-1));
        assert_eq!(dd.term(0), nabla(&k, 0).term(0));
        assert_eq!(hecke.bar(&d.character(&hecke)), dd.character(&hecke));
    }

    #[test]
    fn split_maps_decompose_the_identity() {
        let k = ctx("A2");
        let bm = k.bimod();
        for (w, p) in [(vec![0, 0], 0), (vec![1, 0, 0], 1), (vec![0, 0, 1], 0)] {
            let (pa, ia, pb, ib) = split_maps(bm, &w, p);
            let short = { let mut v = w.clone(); v.remove(p); v };
            assert_eq!(pa.compose(&ia), crate::soergelcalc::BimodMap::identity(&short));
            assert_eq!(pb.compose(&ib), crate::soergelcalc::BimodMap::identity(&short));
            assert!(pa.compose(&ib).is_zero() && pb.compose(&ia).is_zero());
            assert_eq!(ia.compose(&pa).add(&ib.compose(&pb)), crate::soergelcalc::BimodMap::identity(&w));
        }
    }

    #[test]
    fn hom_from_delta_to_nabla() {
        let k = ctx("A1");
        let t = hom_dims(&k, &delta(&k, 0), &nabla(&k, 0), HomFlavor::Bimodule, -3..=3, -3..=3).unwrap();
        for ((n, m), d) in t {
            let want = if m == -n && m >= 0 && m % 2 == 0 { k.realization().graded_dim(m) } else { 0 };
            assert_eq!(d, want, "n={n} m={m}");
        }
    }

    #[test]
    fn equivalence_search_finds_the_unit() {
        let k = ctx("A1");
        let c = convolve(k.bimod(), &delta(&k, 0), &nabla(&k, 0));
        let eq = find_equivalence(&k, &c, &Complex::unit()).unwrap();
        assert!(eq.verify(&c, &Complex::unit()));
    }
}
