//! Seeded generators for field elements and forms, shared by the property
//! suites, the lemma registry and the splitting-pattern sampler.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::groundfield::{FieldElem, GroundField, Mono, Poly};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial with at most `max_terms` terms of total degree `<= max_deg`.
pub fn poly<R: Rng>(rng: &mut R, field: &GroundField, max_deg: u32, max_terms: usize) -> Poly {
    let p = field.p();
    let m = field.nvars();
    let nterms = rng.gen_range(1..=max_terms.max(1));
    let mut terms = Vec::with_capacity(nterms);
    for _ in 0..nterms {
        let deg = rng.gen_range(0..=max_deg);
        let mut exps = vec![0u32; m];
        if m > 0 {
            for _ in 0..deg {
                exps[rng.gen_range(0..m)] += 1;
            }
        }
        terms.push((Mono::from_exps(&exps), rng.gen_range(1..p)));
    }
    Poly::from_terms(p, terms)
}

pub fn nonzero_poly<R: Rng>(rng: &mut R, field: &GroundField, max_deg: u32, max_terms: usize) -> Poly {
    loop {
        let q = poly(rng, field, max_deg, max_terms);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Random polynomial element, possibly zero.
pub fn elem<R: Rng>(rng: &mut R, field: &GroundField, max_deg: u32) -> FieldElem {
    FieldElem::from_poly(poly(rng, field, max_deg, 3))
}

pub fn nonzero_elem<R: Rng>(rng: &mut R, field: &GroundField, max_deg: u32) -> FieldElem {
    FieldElem::from_poly(nonzero_poly(rng, field, max_deg, 3))
}

/// Random fraction with a nonconstant denominator some of the time.
pub fn fraction<R: Rng>(rng: &mut R, field: &GroundField, max_deg: u32) -> FieldElem {
    let n = poly(rng, field, max_deg, 3);
    if rng.gen_bool(0.5) {
        return FieldElem::from_poly(n);
    }
    let d = nonzero_poly(rng, field, max_deg, 2);
    FieldElem::new(n, d).expect("denominator is nonzero")
}

/// Random element outside F^p.
pub fn non_pth_power<R: Rng>(rng: &mut R, field: &GroundField, max_deg: u32) -> FieldElem {
    assert!(field.nvars() > 0, "F^p = F when there are no variables");
    loop {
        let x = nonzero_elem(rng, field, max_deg.max(1));
        if crate::groundfield::pth_root(&x).is_err() {
            return x;
        }
    }
}

/// A random element of `F^p(basis)`: `Σ x_λ^p b^λ` over a random subset of
/// the monomials in `basis`, with `x_λ` of degree `<= deg`.
pub fn in_subfield<R: Rng>(rng: &mut R, field: &GroundField, basis: &[FieldElem], deg: u32) -> FieldElem {
    let p = field.p();
    let mut acc = field.zero();
    let total = (p as usize).pow(basis.len() as u32);
    for idx in 0..total {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let mut mono = field.one();
        let mut rest = idx;
        for b in basis {
            let e = (rest % p as usize) as u32;
            rest /= p as usize;
            if e > 0 {
                mono = mono.mul(&b.pow(e));
            }
        }
        let x = nonzero_elem(rng, field, deg);
        acc = acc.add(&x.frobenius().mul(&mono));
    }
    acc
}

/// Sample a random index set of size `k` from `0..n`.
pub fn subset<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut out = idx[..k.min(n)].to_vec();
    out.sort_unstable();
    out
}
