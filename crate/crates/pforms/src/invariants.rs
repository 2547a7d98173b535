//! Norm fields, similarity factors and the invariants built on them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::groundfield::{cleared_numerator, coords_of, kernel_of_rows, FieldElem, GroundField, Mono, Poly};
use crate::qform::{normalize_entry, QuasiForm};
use crate::{Error, Result};

/// A field `E = F^p(b_1,…,b_k)` with `F^p ⊆ E ⊆ F`, stored with its
/// p-independent generators and the monomial F^p-basis they span.
#[derive(Clone, Debug)]
pub struct Subfield {
    field: GroundField,
    pbasis: Vec<FieldElem>,
    basis: OnceLock<Vec<FieldElem>>,
}

fn monomial_basis(field: &GroundField, pbasis: &[FieldElem]) -> Vec<FieldElem> {
    let p = field.p();
    let mut basis = vec![field.one()];
    for b in pbasis {
        let mut next = Vec::with_capacity(basis.len() * p as usize);
        for e in &basis {
            let mut x = e.clone();
            for _ in 0..p {
                next.push(x.clone());
                x = x.mul(b);
            }
        }
        basis = next;
    }
    basis
}

impl Subfield {
    /// `F^p(pbasis)`; fails unless the generators are p-independent.
    pub fn new(field: &GroundField, pbasis: Vec<FieldElem>) -> Result<Subfield> {
        if !is_p_independent(field, &pbasis)? {
            return Err(Error::Precondition("generators are not p-independent".into()));
        }
        Ok(Subfield::from_pbasis(field, pbasis))
    }

    fn from_pbasis(field: &GroundField, pbasis: Vec<FieldElem>) -> Subfield {
        let pbasis: Vec<FieldElem> = pbasis.iter().map(normalize_entry).collect();
        Subfield { field: field.clone(), pbasis, basis: OnceLock::new() }
    }

    /// `F^p` itself.
    pub fn prime(field: &GroundField) -> Subfield {
        Subfield::from_pbasis(field, Vec::new())
    }

    /// Greedy p-basis of `F^p(gens)`: keep a generator iff it lies outside
    /// the field generated by those already kept.
    pub fn generated_by(field: &GroundField, gens: &[FieldElem]) -> Result<Subfield> {
        let mut pbasis: Vec<FieldElem> = Vec::new();
        for g in gens {
            if pbasis.len() == field.nvars() {
                break;
            }
            if g.is_zero() {
                continue;
            }
            pbasis.push(g.clone());
            if field.p_rank(&pbasis)? < pbasis.len() {
                pbasis.pop();
            }
        }
        Ok(Subfield::from_pbasis(field, pbasis))
    }

    /// The same field with a p-basis that prefers variables, then products
    /// of two variables, then the old generators.
    pub fn simplified(&self) -> Result<Subfield> {
        let f = &self.field;
        let m = f.nvars();
        let mut cands: Vec<FieldElem> = (0..m).map(|i| f.var(i)).collect();
        for i in 0..m {
            for j in i + 1..m {
                cands.push(f.var(i).mul(&f.var(j)));
            }
        }
        let mut pbasis: Vec<FieldElem> = Vec::new();
        let mut sub = Subfield::prime(f);
        for c in cands.iter().chain(self.pbasis.iter()) {
            if sub.exponent() == self.exponent() {
                break;
            }
            if !self.contains(c)? || sub.contains(c)? {
                continue;
            }
            pbasis.push(c.clone());
            sub = Subfield::from_pbasis(f, pbasis.clone());
        }
        Ok(sub)
    }

    pub fn field(&self) -> &GroundField {
        &self.field
    }

    pub fn pbasis(&self) -> &[FieldElem] {
        &self.pbasis
    }

    /// The monomials `b^λ`, `0 ≤ λ_i < p`, an F^p-basis of the subfield.
    pub fn monomial_basis(&self) -> &[FieldElem] {
        self.basis.get_or_init(|| monomial_basis(&self.field, &self.pbasis))
    }

    /// `k` with `[E : F^p] = p^k`.
    pub fn exponent(&self) -> usize {
        self.pbasis.len()
    }

    pub fn degree(&self) -> u64 {
        (self.field.p() as u64).pow(self.pbasis.len() as u32)
    }

    pub fn contains(&self, x: &FieldElem) -> Result<bool> {
        if x.is_zero() {
            return Ok(true);
        }
        if self.pbasis.len() == self.field.nvars() {
            return Ok(true);
        }
        let mut elems = self.pbasis.clone();
        elems.push(x.clone());
        Ok(self.field.p_rank(&elems)? == self.pbasis.len())
    }

    pub fn contains_field(&self, other: &Subfield) -> Result<bool> {
        for b in &other.pbasis {
            if !self.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_as(&self, other: &Subfield) -> Result<bool> {
        Ok(self.exponent() == other.exponent() && self.contains_field(other)?)
    }

    /// Dimension of the E-span of `elems` inside F.
    ///
    /// Complete the p-basis `b` of E by variables `t_J` to a p-basis of F and
    /// take derivations `E_j` killing `b` and `t_{J∖j}`. The operators `E^λ`,
    /// `λ_j < p`, span `End_E(F)` over F, so the E-rank of the elements is the
    /// F-rank of the matrix `(E^λ x_i)`. Scaling elements or generators by
    /// p-th powers changes nothing, so everything stays polynomial.
    pub fn rank_over(&self, elems: &[FieldElem]) -> Result<usize> {
        let f = &self.field;
        let p = f.p();
        let nz: Vec<Poly> = elems.iter().filter(|x| !x.is_zero()).map(cleared_numerator).collect();
        if nz.is_empty() {
            return Ok(0);
        }
        let m = f.nvars();
        let k = self.pbasis.len();
        if k == m {
            return Ok(1);
        }
        let bs: Vec<Poly> = self.pbasis.iter().map(cleared_numerator).collect();
        let mut ys = self.pbasis.clone();
        let mut added = Vec::new();
        for i in 0..m {
            if ys.len() == m {
                break;
            }
            ys.push(f.var(i));
            if f.p_rank(&ys)? < ys.len() {
                ys.pop();
            } else {
                added.push(i);
            }
        }
        let rest: Vec<usize> = (0..m).filter(|i| !added.contains(i)).collect();
        let grad: Vec<Vec<Poly>> = bs.iter().map(|b| (0..m).map(|i| b.derivative(i)).collect()).collect();
        let a: Vec<Vec<Poly>> = grad.iter().map(|g| rest.iter().map(|&i| g[i].clone()).collect()).collect();
        let (det, adj) = adjugate(p, &a);
        // E_j = det·∂_j − Σ_{i ∈ rest} (adj · ∂_j b)_i ∂_i
        let ders: Vec<Vec<(usize, Poly)>> = added
            .iter()
            .map(|&j| {
                let mut d = vec![(j, det.clone())];
                for (r, &i) in rest.iter().enumerate() {
                    let c = (0..k).fold(Poly::zero(p), |acc, s| acc.add(&adj[r][s].mul(&grad[s][j])));
                    if !c.is_zero() {
                        d.push((i, c.neg()));
                    }
                }
                d
            })
            .collect();
        let apply = |d: &[(usize, Poly)], x: &Poly| -> Poly {
            d.iter().fold(Poly::zero(p), |acc, (i, c)| acc.add(&c.mul(&x.derivative(*i))))
        };
        let mut rows: Vec<Vec<Poly>> = vec![nz];
        for d in &ders {
            let mut next = Vec::with_capacity(rows.len() * p as usize);
            for row in &rows {
                let mut cur = row.clone();
                for step in 0..p {
                    if step + 1 < p {
                        let nxt: Vec<Poly> = cur.iter().map(|x| apply(d, x)).collect();
                        next.push(std::mem::replace(&mut cur, nxt));
                    } else {
                        next.push(std::mem::take(&mut cur));
                    }
                }
            }
            rows = next;
        }
        let rows: Vec<Vec<FieldElem>> =
            rows.into_iter().map(|r| r.into_iter().map(FieldElem::from_poly).collect()).collect();
        f.f_rank(&rows)
    }

    /// The quasi-Pfister form on the p-basis.
    pub fn pfister_form(&self) -> QuasiForm {
        QuasiForm::quasi_pfister(&self.field, &self.pbasis).expect("p-basis elements are nonzero")
    }

    pub fn render(&self) -> String {
        let gens: Vec<String> = self.pbasis.iter().map(|b| self.field.render(b)).collect();
        format!("F^{}({})", self.field.p(), gens.join(","))
    }

    pub fn render_degree(&self) -> String {
        format!("{}^{}", self.field.p(), self.exponent())
    }
}

impl fmt::Display for Subfield {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `scalar·(simform ⊗ cofactor) ≅ φ_an`.
#[derive(Clone, Debug)]
pub struct SimilarityDecomposition {
    pub simform: QuasiForm,
    pub cofactor: QuasiForm,
    pub scalar: FieldElem,
}

fn require_anisotropic(phi: &QuasiForm) -> Result<()> {
    if phi.is_anisotropic()? {
        Ok(())
    } else {
        Err(Error::Isotropic)
    }
}

/// Is `{a_1,…,a_n}` p-independent over F?
pub fn is_p_independent(field: &GroundField, elems: &[FieldElem]) -> Result<bool> {
    if elems.iter().any(|e| e.is_zero()) {
        return Err(Error::ZeroSlot);
    }
    Ok(field.p_rank(elems)? == elems.len())
}

fn det(p: u32, a: &[Vec<Poly>]) -> Poly {
    match a.len() {
        0 => Poly::one(p),
        1 => a[0][0].clone(),
        n => (0..n).fold(Poly::zero(p), |acc, c| {
            if a[0][c].is_zero() {
                return acc;
            }
            let t = a[0][c].mul(&det(p, &minor(a, 0, c)));
            if c % 2 == 0 { acc.add(&t) } else { acc.sub(&t) }
        }),
    }
}

fn minor(a: &[Vec<Poly>], r: usize, c: usize) -> Vec<Vec<Poly>> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Determinant and adjugate (`adj·a = det·I`) by cofactor expansion; `a` is
/// at most the number of variables across.
fn adjugate(p: u32, a: &[Vec<Poly>]) -> (Poly, Vec<Vec<Poly>>) {
    let n = a.len();
    let adj = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = det(p, &minor(a, j, i));
                    if (i + j) % 2 == 0 { d } else { d.neg() }
                })
                .collect()
        })
        .collect();
    (det(p, a), adj)
}

/// Entries of `a_0^{-1}·φ_an`, normalized, so the first one is 1.
fn unit_normalized(an: &QuasiForm) -> Vec<FieldElem> {
    let a0 = an.entries()[0].clone();
    an.entries().iter().map(|e| normalize_entry(&e.div(&a0).expect("entry is nonzero"))).collect()
}

pub fn norm_field(phi: &QuasiForm) -> Result<Subfield> {
    let an = phi.anisotropic_part()?;
    if an.dim() == 0 {
        return Err(Error::ZeroForm);
    }
    let ratios = unit_normalized(&an);
    Subfield::generated_by(phi.field(), &ratios[1..])?.simplified()
}

pub fn norm_degree(phi: &QuasiForm) -> Result<u64> {
    Ok(norm_field(phi)?.degree())
}

pub fn norm_form(phi: &QuasiForm) -> Result<QuasiForm> {
    Ok(norm_field(phi)?.pfister_form())
}

/// `ndeg φ = p^{dim φ − 1}`.
pub fn is_minimal(phi: &QuasiForm) -> Result<bool> {
    require_anisotropic(phi)?;
    if phi.dim() == 0 {
        return Err(Error::ZeroForm);
    }
    Ok(norm_field(phi)?.exponent() == phi.dim() - 1)
}

/// Codimension in the norm form if φ is a quasi-Pfister neighbor.
pub fn is_quasi_pfister_neighbor(phi: &QuasiForm) -> Result<Option<u64>> {
    require_anisotropic(phi)?;
    let ndeg = norm_degree(phi)?;
    let dim = phi.dim() as u64;
    Ok(if phi.field().p() as u64 * dim > ndeg { Some(ndeg - dim) } else { None })
}

pub fn is_quasi_pfister(phi: &QuasiForm) -> Result<bool> {
    Ok(is_quasi_pfister_neighbor(phi)? == Some(0))
}

/// F^p-basis of `{c ∈ span(e) : c·b ∈ span(e) for every target b}`, where
/// `e` is F^p-independent. All inputs must be polynomials.
pub(crate) fn multiplier_space(field: &GroundField, e: &[FieldElem], targets: &[FieldElem]) -> Result<Vec<FieldElem>> {
    let p = field.p();
    let cap = field.term_cap();
    let n = e.len();
    let ecols: Vec<Vec<(Mono, Poly)>> = e.iter().map(coords_of).collect();
    let prods: Vec<Vec<Vec<(Mono, Poly)>>> = targets
        .iter()
        .map(|b| e.iter().map(|ej| coords_of(&ej.mul(b))).collect())
        .collect();
    let mut index: BTreeMap<Mono, usize> = BTreeMap::new();
    for col in ecols.iter().chain(prods.iter().flatten()) {
        for (l, _) in col {
            let k = index.len();
            index.entry(*l).or_insert(k);
        }
    }
    let r = index.len();
    let dense = |col: &Vec<(Mono, Poly)>| -> Vec<Poly> {
        let mut v = vec![Poly::zero(p); r];
        for (l, h) in col {
            v[index[l]] = h.clone();
        }
        v
    };
    // Functionals vanishing on span(e).
    let annihilator = kernel_of_rows(p, ecols.iter().map(dense).collect(), r, cap)?;
    let annihilator: Vec<Vec<Poly>> = annihilator.into_iter().map(clear_denominators).collect();

    let mut rows: Vec<Vec<Poly>> = Vec::new();
    for prod in &prods {
        let cols: Vec<Vec<Poly>> = prod.iter().map(dense).collect();
        for w in &annihilator {
            let row: Vec<Poly> = cols
                .iter()
                .map(|col| {
                    let mut acc = Poly::zero(p);
                    for (wk, ck) in w.iter().zip(col) {
                        if !wk.is_zero() && !ck.is_zero() {
                            acc = acc.add(&wk.mul(ck));
                        }
                    }
                    acc
                })
                .collect();
            if row.iter().any(|q| !q.is_zero()) && !rows.contains(&row) {
                rows.push(row);
            }
        }
    }
    let kernel = kernel_of_rows(p, rows, n, cap)?;
    Ok(kernel
        .into_iter()
        .map(|y| {
            let mut c = field.zero();
            for (yj, ej) in y.iter().zip(e) {
                if !yj.is_zero() {
                    c = c.add(&yj.frobenius().mul(ej));
                }
            }
            c
        })
        .collect())
}

pub(crate) fn clear_denominators(v: Vec<FieldElem>) -> Vec<Poly> {
    let p = v[0].p();
    let mut l = Poly::one(p);
    for x in &v {
        if !x.denom().is_one() {
            l = crate::groundfield::gcd::lcm(&l, x.denom());
        }
    }
    v.iter()
        .map(|x| {
            if x.is_zero() {
                Poly::zero(p)
            } else {
                x.numer().mul(&l.exact_div(x.denom()).expect("lcm is a multiple"))
            }
        })
        .collect()
}

/// `G_F(φ) = {x : xφ ≅ φ} ∪ {0}` for anisotropic φ.
pub fn similarity_group(phi: &QuasiForm) -> Result<Subfield> {
    require_anisotropic(phi)?;
    if phi.dim() == 0 {
        return Err(Error::ZeroForm);
    }
    let field = phi.field();
    let e = unit_normalized(phi);
    let space = multiplier_space(field, &e, &e)?;
    let gens: Vec<FieldElem> = space.iter().map(normalize_entry).collect();
    let g = Subfield::generated_by(field, &gens)?.simplified()?;
    if g.degree() != space.len() as u64 {
        return Err(Error::Internal(format!(
            "similarity factors span dimension {} but generate a field of degree {}",
            space.len(),
            g.degree()
        )));
    }
    for m in g.monomial_basis() {
        if !field.in_span(m, &space)? {
            return Err(Error::Internal("similarity factors are not closed under products".into()));
        }
    }
    Ok(g)
}

/// The similarity form of φ: the quasi-Pfister form of `G_F(φ)`.
pub fn similarity_form(phi: &QuasiForm) -> Result<QuasiForm> {
    Ok(similarity_group(phi)?.pfister_form())
}

pub fn divide_by_similarity(phi: &QuasiForm) -> Result<SimilarityDecomposition> {
    let g = similarity_group(phi)?;
    let field = phi.field();
    let simform = g.pfister_form();
    let scalar = normalize_entry(&phi.entries()[0]);
    let e = unit_normalized(phi);
    let mut cof: Vec<FieldElem> = Vec::new();
    let mut span: Vec<FieldElem> = Vec::new();
    for x in &e {
        if !span.is_empty() && field.in_span(x, &span)? {
            continue;
        }
        cof.push(x.clone());
        span.extend(g.monomial_basis().iter().map(|m| m.mul(x)));
    }
    let cofactor = QuasiForm::new(field, cof)?;
    let rebuilt = simform.tensor(&cofactor)?.scale(&scalar)?;
    if !rebuilt.is_isometric(phi)? {
        return Err(Error::Internal("similarity decomposition does not rebuild the form".into()));
    }
    Ok(SimilarityDecomposition { simform, cofactor, scalar })
}

/// A scalar `c` with `φ ≅ cψ`, if one exists.
pub fn is_similar(phi: &QuasiForm, psi: &QuasiForm) -> Result<Option<FieldElem>> {
    if phi.field() != psi.field() {
        return Err(Error::FieldMismatch);
    }
    let field = phi.field();
    if phi.dim() != psi.dim() {
        return Ok(None);
    }
    let pa = phi.anisotropic_part()?;
    let qa = psi.anisotropic_part()?;
    if pa.dim() != qa.dim() {
        return Ok(None);
    }
    if pa.dim() == 0 {
        return Ok(Some(field.one()));
    }
    let e = unit_normalized(&pa);
    let b = unit_normalized(&qa);
    let space = multiplier_space(field, &e, &b)?;
    let a0 = &pa.entries()[0];
    let b0 = &qa.entries()[0];
    let mut best: Option<(String, FieldElem)> = None;
    for c in space {
        let s = normalize_entry(&a0.mul(&c).div(b0).expect("entry is nonzero"));
        let r = field.render(&s);
        if best.as_ref().is_none_or(|(br, _)| r < *br) {
            best = Some((r, s));
        }
    }
    let Some((_, s)) = best else { return Ok(None) };
    if !psi.scale(&s)?.is_isometric(phi)? {
        return Err(Error::Internal("similarity scalar fails the isometry check".into()));
    }
    Ok(Some(s))
}
