//! Coordinates of an element with respect to the monomial p-basis
//! `{t^λ : 0 ≤ λ_i < p}` of F over F^p.

use std::collections::BTreeMap;

use super::elem::FieldElem;
use super::poly::{Mono, Poly};
use crate::{Error, Result};

/// `f = Σ_λ g_λ^p t^λ`, keyed by λ with every λ_i < p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobCoords {
    p: u32,
    coords: BTreeMap<Mono, FieldElem>,
}

impl FrobCoords {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, lambda: Mono) -> Option<&FieldElem> {
        self.coords.get(&lambda)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Mono, &FieldElem)> {
        self.coords.iter().map(|(k, v)| (*k, v))
    }

    /// Rebuild `Σ g_λ^p t^λ`.
    pub fn reconstruct(&self) -> FieldElem {
        let mut acc = FieldElem::zero(self.p);
        for (lambda, g) in &self.coords {
            acc = acc.add(&g.frobenius().mul(&FieldElem::monomial(self.p, *lambda)));
        }
        acc
    }
}

/// Split a polynomial `N = Σ_λ H_λ(t^p) t^λ` and return the `H_λ`, read as
/// polynomials in the same variables. Since coefficients lie in F_p,
/// `H_λ(t^p) = H_λ(t)^p`.
pub fn frob_poly(n: &Poly) -> Vec<(Mono, Poly)> {
    let p = n.p();
    let mut groups: BTreeMap<Mono, Vec<(Mono, u32)>> = BTreeMap::new();
    for &(m, c) in n.terms() {
        let lambda = m.map(|_, e| e % p);
        let quo = m.map(|_, e| e / p);
        groups.entry(lambda).or_default().push((quo, c));
    }
    groups.into_iter().map(|(l, t)| (l, Poly::from_terms(p, t))).collect()
}

/// Polynomial `n·d^{p-1}` with `f = n·d^{p-1} / d^p`.
pub fn cleared_numerator(f: &FieldElem) -> Poly {
    let p = f.p();
    if f.is_poly() {
        f.numer().clone()
    } else {
        f.numer().mul(&f.denom().pow(p - 1))
    }
}

pub fn frobenius_decompose(f: &FieldElem) -> FrobCoords {
    let p = f.p();
    let n = cleared_numerator(f);
    let d = FieldElem::from_poly(f.denom().clone());
    let coords = frob_poly(&n)
        .into_iter()
        .map(|(l, h)| {
            let g = FieldElem::from_poly(h).div(&d).expect("denominator is nonzero");
            (l, g)
        })
        .collect();
    FrobCoords { p, coords }
}

/// The unique `g` with `g^p = f`, or `NotAPthPower`.
pub fn pth_root(f: &FieldElem) -> Result<FieldElem> {
    let p = f.p();
    let root = |q: &Poly| -> Option<Poly> {
        let mut out = Vec::with_capacity(q.len());
        for &(m, c) in q.terms() {
            if (0..super::poly::MAX_VARS).any(|i| m.exp(i) % p != 0) {
                return None;
            }
            out.push((m.map(|_, e| e / p), c));
        }
        Some(Poly::from_terms(p, out))
    };
    match (root(f.numer()), root(f.denom())) {
        (Some(n), Some(d)) => FieldElem::new(n, d),
        _ => Err(Error::NotAPthPower),
    }
}
