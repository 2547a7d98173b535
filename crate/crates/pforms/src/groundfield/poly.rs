//! Sparse multivariate polynomials over F_p.
//!
//! Monomials are packed into a `u128` so that comparing the raw integers
//! gives graded lexicographic order: total degree sits in the top 16 bits,
//! then one 14-bit slot per variable with the first variable most
//! significant.

use std::cmp::Ordering;
use std::fmt;

/// Maximum number of variables a monomial can carry.
pub const MAX_VARS: usize = 8;
const EBITS: u32 = 14;
const EMASK: u128 = (1 << EBITS) - 1;
const DEG_SHIFT: u32 = 112;
/// Largest exponent (and total degree) a monomial may hold.
pub const MAX_DEGREE: u32 = EMASK as u32;

#[inline]
fn slot(i: usize) -> u32 {
    DEG_SHIFT - EBITS * (i as u32 + 1)
}

/// An exponent vector in packed form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(u128);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn from_exps(exps: &[u32]) -> Mono {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut raw = 0u128;
        let mut deg = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            deg += e;
            raw |= (e as u128) << slot(i);
        }
        assert!(deg <= MAX_DEGREE, "monomial degree overflow");
        Mono(raw | ((deg as u128) << DEG_SHIFT))
    }

    pub fn var(i: usize, e: u32) -> Mono {
        let mut exps = [0u32; MAX_VARS];
        exps[i] = e;
        Mono::from_exps(&exps)
    }

    #[inline]
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> slot(i)) & EMASK) as u32
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> DEG_SHIFT) as u32
    }

    pub fn exps(self) -> [u32; MAX_VARS] {
        let mut out = [0u32; MAX_VARS];
        for (i, e) in out.iter_mut().enumerate() {
            *e = self.exp(i);
        }
        out
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Mono) -> Mono {
        let d = self.degree() + other.degree();
        assert!(d <= MAX_DEGREE, "monomial degree overflow");
        Mono(self.0 + other.0)
    }

    #[inline]
    pub fn divides(self, other: Mono) -> bool {
        if self.degree() > other.degree() {
            return false;
        }
        (0..MAX_VARS).all(|i| self.exp(i) <= other.exp(i))
    }

    /// `self / other`; caller guarantees `other.divides(self)`.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, other: Mono) -> Mono {
        Mono(self.0 - other.0)
    }

    pub fn gcd(self, other: Mono) -> Mono {
        let a = self.exps();
        let b = other.exps();
        let mut g = [0u32; MAX_VARS];
        for i in 0..MAX_VARS {
            g[i] = a[i].min(b[i]);
        }
        Mono::from_exps(&g)
    }

    /// Apply `f` to every exponent.
    pub fn map(self, mut f: impl FnMut(usize, u32) -> u32) -> Mono {
        let mut e = self.exps();
        for (i, x) in e.iter_mut().enumerate() {
            *x = f(i, *x);
        }
        Mono::from_exps(&e)
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}

#[inline]
pub(crate) fn mod_inv(c: u32, p: u32) -> u32 {
    debug_assert!(!c.is_multiple_of(p));
    mod_pow(c, p - 2, p)
}

pub(crate) fn mod_pow(mut b: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u32;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// A polynomial in F_p[t_1..t_m]. Terms are kept sorted by descending
/// monomial and never hold a zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u32,
    terms: Vec<(Mono, u32)>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.terms)
    }
}

impl Poly {
    pub fn zero(p: u32) -> Poly {
        Poly { p, terms: Vec::new() }
    }

    pub fn one(p: u32) -> Poly {
        Poly::constant(p, 1)
    }

    pub fn constant(p: u32, c: u32) -> Poly {
        Poly::monomial(p, Mono::ONE, c)
    }

    pub fn monomial(p: u32, m: Mono, c: u32) -> Poly {
        let c = c % p;
        if c == 0 {
            Poly::zero(p)
        } else {
            Poly { p, terms: vec![(m, c)] }
        }
    }

    /// Build from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(p: u32, mut terms: Vec<(Mono, u32)>) -> Poly {
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        let mut out: Vec<(Mono, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            let c = c % p;
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = (last.1 + c) % p,
                _ => out.push((m, c)),
            }
            if let Some(last) = out.last() {
                if last.1 == 0 {
                    out.pop();
                }
            }
        }
        Poly { p, terms: out }
    }

    /// Terms already sorted descending with nonzero reduced coefficients.
    fn from_sorted(p: u32, terms: Vec<(Mono, u32)>) -> Poly {
        Poly { p, terms }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn terms(&self) -> &[(Mono, u32)] {
        &self.terms
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (Mono::ONE, 1)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Constant term value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if m.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn lead(&self) -> Option<(Mono, u32)> {
        self.terms.first().copied()
    }

    pub fn lead_coeff(&self) -> u32 {
        self.terms.first().map(|t| t.1).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0.exp(v) > 0)
    }

    /// Bitmask of variables that occur.
    pub fn var_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (m, _) in &self.terms {
            for i in 0..MAX_VARS {
                if m.exp(i) > 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    pub fn neg(&self) -> Poly {
        let p = self.p;
        Poly::from_sorted(p, self.terms.iter().map(|&(m, c)| (m, p - c)).collect())
    }

    pub fn scale(&self, c: u32) -> Poly {
        let p = self.p;
        let c = c % p;
        if c == 0 {
            return Poly::zero(p);
        }
        Poly::from_sorted(p, self.terms.iter().map(|&(m, x)| (m, x * c % p)).collect())
    }

    pub fn mul_term(&self, mono: Mono, c: u32) -> Poly {
        let p = self.p;
        let c = c % p;
        if c == 0 {
            return Poly::zero(p);
        }
        Poly::from_sorted(
            p,
            self.terms.iter().map(|&(m, x)| (m.mul(mono), x * c % p)).collect(),
        )
    }

    /// Make the leading coefficient 1.
    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => self.clone(),
            Some((_, 1)) => self.clone(),
            Some((_, c)) => self.scale(mod_inv(c, self.p)),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        Poly::from_sorted(self.p, merge(&self.terms, &other.terms, 1, self.p))
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        Poly::from_sorted(self.p, merge(&self.terms, &other.terms, self.p - 1, self.p))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(p);
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.len() == 1 {
            let (m, c) = small.terms[0];
            return big.mul_term(m, c);
        }
        let mut rows: Vec<Vec<(Mono, u32)>> = small
            .terms
            .iter()
            .map(|&(m, c)| big.terms.iter().map(|&(n, d)| (m.mul(n), c * d % p)).collect())
            .collect();
        while rows.len() > 1 {
            let mut next = Vec::with_capacity(rows.len().div_ceil(2));
            let mut it = rows.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(merge(&a, &b, 1, p)),
                    None => next.push(a),
                }
            }
            rows = next;
        }
        Poly::from_sorted(p, rows.pop().unwrap_or_default())
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The p-th power, computed by scaling exponents (coefficients of F_p
    /// are fixed by Frobenius).
    pub fn frobenius(&self) -> Poly {
        let p = self.p;
        Poly::from_sorted(p, self.terms.iter().map(|&(m, c)| (m.map(|_, e| e * p), c)).collect())
    }

    /// Partial derivative in variable `v`.
    pub fn derivative(&self, v: usize) -> Poly {
        let p = self.p;
        let terms = self
            .terms
            .iter()
            .filter_map(|&(m, c)| {
                let e = m.exp(v);
                let c = (c as u64 * (e % p) as u64 % p as u64) as u32;
                (c != 0).then(|| (m.map(|i, x| if i == v { x - 1 } else { x }), c))
            })
            .collect();
        Poly::from_terms(p, terms)
    }

    /// Substitute new exponents via `f`; re-sorts since order may change.
    pub fn map_monomials(&self, f: impl Fn(Mono) -> Mono) -> Poly {
        Poly::from_terms(self.p, self.terms.iter().map(|&(m, c)| (f(m), c)).collect())
    }

    /// Gcd of all monomials (the largest monomial dividing every term).
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let Some(&(first, _)) = it.next() else {
            return Mono::ONE;
        };
        it.fold(first, |g, &(m, _)| if g.is_one() { g } else { g.gcd(m) })
    }

    /// Exact division. Returns `None` if `other` does not divide `self`.
    pub fn exact_div(&self, other: &Poly) -> Option<Poly> {
        assert!(!other.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.is_zero() {
            return Some(Poly::zero(p));
        }
        let (lm, lc) = other.terms[0];
        let inv = mod_inv(lc, p);
        if other.len() == 1 {
            let mut out = Vec::with_capacity(self.len());
            for &(m, c) in &self.terms {
                if !lm.divides(m) {
                    return None;
                }
                out.push((m.div(lm), c * inv % p));
            }
            return Some(Poly::from_sorted(p, out));
        }
        if other.total_degree() > self.total_degree() {
            return None;
        }
        let tail = &other.terms[1..];
        // The remainder is `rem[pos..] + pending[ppos..]`; quotient terms only
        // ever touch `pending`, so the input itself is never rewritten.
        let rem = &self.terms;
        let mut quot: Vec<(Mono, u32)> = Vec::new();
        let mut pos = 0usize;
        let mut pending: Vec<(Mono, u32)> = Vec::new();
        let mut ppos = 0usize;
        loop {
            let lead = match (rem.get(pos), pending.get(ppos)) {
                (None, None) => break,
                (Some(&a), None) => {
                    pos += 1;
                    a
                }
                (None, Some(&b)) => {
                    ppos += 1;
                    b
                }
                (Some(&a), Some(&b)) => match a.0.cmp(&b.0) {
                    Ordering::Greater => {
                        pos += 1;
                        a
                    }
                    Ordering::Less => {
                        ppos += 1;
                        b
                    }
                    Ordering::Equal => {
                        pos += 1;
                        ppos += 1;
                        let c = (a.1 + b.1) % p;
                        if c == 0 {
                            continue;
                        }
                        (a.0, c)
                    }
                },
            };
            if !lm.divides(lead.0) {
                return None;
            }
            let qm = lead.0.div(lm);
            let qc = lead.1 * inv % p;
            quot.push((qm, qc));
            let neg = (p - qc) % p;
            let contrib: Vec<(Mono, u32)> =
                tail.iter().map(|&(m, c)| (m.mul(qm), c * neg % p)).collect();
            pending = merge(&pending[ppos..], &contrib, 1, p);
            ppos = 0;
        }
        Some(Poly::from_sorted(p, quot))
    }

    /// Coefficients with respect to variable `v`: entry k is the
    /// coefficient of t_v^k, with t_v removed.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Mono, u32)>> = vec![Vec::new(); d + 1];
        let unit = Mono::var(v, 1);
        for &(m, c) in &self.terms {
            let e = m.exp(v);
            let stripped = if e == 0 { m } else { Mono(m.0 - e as u128 * unit.0) };
            buckets[e as usize].push((stripped, c));
        }
        // Stripping a fixed variable from terms sharing the same power
        // preserves relative grlex order.
        buckets.into_iter().map(|t| Poly::from_sorted(self.p, t)).collect()
    }

    pub fn from_coeffs_in(p: u32, v: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            let sh = Mono::var(v, k as u32);
            for &(m, x) in &c.terms {
                terms.push((m.mul(sh), x));
            }
        }
        Poly::from_terms(p, terms)
    }

    /// Substitute `t_i -> t_i^scales[i]`.
    pub fn inflate(&self, scales: &[u32]) -> Poly {
        self.map_monomials(|m| {
            m.map(|i, e| if i < scales.len() { e * scales[i] } else { e })
        })
    }
}

/// Merge two descending term lists computing `a + k*b`.
fn merge(a: &[(Mono, u32)], b: &[(Mono, u32)], k: u32, p: u32) -> Vec<(Mono, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Greater => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Less => {
                let c = b[j].1 * k % p;
                if c != 0 {
                    out.push((b[j].0, c));
                }
                j += 1;
            }
            Ordering::Equal => {
                let c = (a[i].1 + b[j].1 * k) % p;
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    for &(m, c) in &b[j..] {
        let c = c * k % p;
        if c != 0 {
            out.push((m, c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(e: &[u32]) -> Mono {
        Mono::from_exps(e)
    }

    fn poly(p: u32, t: &[(&[u32], u32)]) -> Poly {
        Poly::from_terms(p, t.iter().map(|(e, c)| (x(e), *c)).collect())
    }

    #[test]
    fn grlex_order_from_packing() {
        // degree first
        assert!(x(&[0, 2]) > x(&[1, 0]));
        // then lex with first variable dominant
        assert!(x(&[1, 0]) > x(&[0, 1]));
        assert!(x(&[2, 0, 0]) > x(&[1, 1, 0]));
        assert!(x(&[1, 1, 0]) > x(&[0, 2, 0]));
    }

    #[test]
    fn char_two_square() {
        let s = poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(s.mul(&s), poly(2, &[(&[2, 0], 1), (&[0, 2], 1)]));
        assert_eq!(s.frobenius(), s.mul(&s));
    }

    #[test]
    fn exact_division_round_trip() {
        let a = poly(5, &[(&[2, 1], 3), (&[0, 1], 1), (&[0, 0], 4)]);
        let b = poly(5, &[(&[1, 0], 1), (&[0, 2], 2), (&[0, 0], 1)]);
        let ab = a.mul(&b);
        assert_eq!(ab.exact_div(&b), Some(a.clone()));
        assert_eq!(ab.exact_div(&a), Some(b.clone()));
        let c = ab.add(&Poly::one(5));
        assert_eq!(c.exact_div(&b), None);
    }

    #[test]
    fn coefficient_split_roundtrip() {
        let a = poly(3, &[(&[2, 1], 2), (&[1, 2], 1), (&[0, 1], 1), (&[1, 0], 2)]);
        for v in 0..2 {
            let cs = a.coeffs_in(v);
            assert_eq!(Poly::from_coeffs_in(3, v, &cs), a);
        }
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let a = poly(7, &[(&[1, 0], 3), (&[0, 1], 1), (&[0, 0], 2)]);
        let mut r = Poly::one(7);
        for _ in 0..5 {
            r = r.mul(&a);
        }
        assert_eq!(a.pow(5), r);
        assert_eq!(a.pow(7), a.frobenius());
    }
}
