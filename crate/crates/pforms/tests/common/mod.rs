#![allow(dead_code)]

use pforms::{FieldElem, GroundField, QuasiForm};
use proptest::prelude::*;

pub fn field(p: u32, m: usize) -> GroundField {
    let names = ["a", "b", "c", "d", "e"];
    GroundField::new(p, &names[..m]).unwrap()
}

/// A polynomial with at most `terms` terms in `m` variables, each exponent < 4.
pub fn poly_terms(p: u32, m: usize, terms: usize) -> impl Strategy<Value = Vec<(Vec<u32>, u32)>> {
    prop::collection::vec((prop::collection::vec(0u32..4, m), 1..p), 0..=terms)
}

pub fn build(f: &GroundField, terms: &[(Vec<u32>, u32)]) -> FieldElem {
    terms
        .iter()
        .fold(f.zero(), |acc, (e, c)| acc.add(&f.monomial(e).scale(*c)))
}

pub fn elem(f: &GroundField, terms: usize) -> BoxedStrategy<FieldElem> {
    let f = f.clone();
    poly_terms(f.p(), f.nvars(), terms).prop_map(move |t| build(&f, &t)).boxed()
}

pub fn nonzero(f: &GroundField, terms: usize) -> BoxedStrategy<FieldElem> {
    elem(f, terms).prop_filter("nonzero", |x| !x.is_zero()).boxed()
}

/// Nonzero fractions `n/d`.
pub fn fraction(f: &GroundField) -> BoxedStrategy<FieldElem> {
    (nonzero(f, 3), nonzero(f, 2)).prop_map(|(n, d)| n.div(&d).unwrap()).boxed()
}

pub fn form(f: &GroundField, dims: std::ops::RangeInclusive<usize>, terms: usize) -> BoxedStrategy<QuasiForm> {
    let g = f.clone();
    prop::collection::vec(elem(f, terms), dims)
        .prop_map(move |e| QuasiForm::new(&g, e).unwrap())
        .boxed()
}

pub fn anisotropic(f: &GroundField, dims: std::ops::RangeInclusive<usize>, terms: usize) -> BoxedStrategy<QuasiForm> {
    form(f, dims, terms)
        .prop_map(|q| q.anisotropic_part().unwrap())
        .prop_filter("nonzero", |q| q.dim() > 0)
        .boxed()
}

/// (p, number of variables) pairs small enough for brute force.
pub fn small_fields() -> impl Strategy<Value = GroundField> {
    prop_oneof![Just(field(2, 3)), Just(field(3, 2)), Just(field(5, 2))]
}
