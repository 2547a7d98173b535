//! Low-dimensional structure for p = 2: canonical shapes up to dimension 6,
//! special quasi-Pfister neighbor decompositions and the small lemmas they
//! rest on.

mod verify;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub use verify::{lemma_names, verify_lemma, Counterexample, LemmaReport};

use crate::extensions::{defect_over, InsepExtension};
use crate::groundfield::{kernel_of_rows, pth_root, FieldElem, GroundField};
use crate::invariants::{clear_denominators, divide_by_similarity, is_quasi_pfister, is_similar, norm_field, Subfield};
use crate::qform::{normalize_entry, QuasiForm};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    Unit,
    Binary,
    Ternary,
    Pfister2,
    Minimal4,
    SPN5,
    Minimal5,
    SPN6,
    Pfister2PlusPair,
    Exotic6,
    Minimal6,
}

/// `scalar · canonical(shape, parameters)` is isometric to the classified form.
#[derive(Clone, Debug)]
pub struct ShapeLabel {
    pub field: GroundField,
    pub dim: usize,
    pub ndeg: u64,
    pub shape: Shape,
    pub parameters: Vec<FieldElem>,
    pub scalar: FieldElem,
}

impl ShapeLabel {
    /// The canonical form, without the scalar.
    ///
    /// `Exotic6` parameters are `[a,b,c,d,t,z]` for `<1,a,b,c,d,t+z·d>`.
    pub fn canonical_form(&self) -> Result<QuasiForm> {
        let f = &self.field;
        let p = &self.parameters;
        let one = f.one();
        let plain = |v: Vec<FieldElem>| QuasiForm::new(f, v);
        match self.shape {
            Shape::Unit => plain(vec![one]),
            Shape::Binary => plain(vec![one, p[0].clone()]),
            Shape::Ternary => plain(vec![one, p[0].clone(), p[1].clone()]),
            Shape::Pfister2 => QuasiForm::quasi_pfister(f, &p[..2]),
            Shape::Minimal4 | Shape::Minimal5 | Shape::Minimal6 => {
                let mut v = vec![one];
                v.extend(p.iter().cloned());
                plain(v)
            }
            Shape::SPN5 => QuasiForm::quasi_pfister(f, &p[..2])?.orth_sum(&plain(vec![p[2].clone()])?),
            Shape::SPN6 => QuasiForm::quasi_pfister(f, &p[..2])?
                .orth_sum(&QuasiForm::quasi_pfister(f, &p[..1])?.scale(&p[2])?),
            Shape::Pfister2PlusPair => {
                QuasiForm::quasi_pfister(f, &p[..2])?.orth_sum(&plain(vec![p[2].clone(), p[3].clone()])?)
            }
            Shape::Exotic6 => {
                let last = p[4].add(&p[5].mul(&p[3]));
                plain(vec![one, p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone(), last])
            }
        }
    }

    pub fn form(&self) -> Result<QuasiForm> {
        self.canonical_form()?.scale(&self.scalar)
    }
}

impl Serialize for ShapeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let f = &self.field;
        let mut st = s.serialize_struct("ShapeLabel", 6)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("ndeg", &self.ndeg)?;
        st.serialize_field("shape", &self.shape)?;
        let params: Vec<String> = self.parameters.iter().map(|x| f.render(x)).collect();
        st.serialize_field("parameters", &params)?;
        st.serialize_field("scalar", &f.render(&self.scalar))?;
        let canonical = self.canonical_form().map(|c| c.render()).unwrap_or_default();
        st.serialize_field("canonical", &canonical)?;
        st.end()
    }
}

/// `scalar · (pi ⊥ b·sigma)` with `sigma ⊆ pi`.
#[derive(Clone, Debug)]
pub struct SPNTriple {
    pub pi: QuasiForm,
    pub b: FieldElem,
    pub sigma: QuasiForm,
    pub scalar: FieldElem,
}

impl SPNTriple {
    pub fn form(&self) -> Result<QuasiForm> {
        self.pi.orth_sum(&self.sigma.scale(&self.b)?)?.scale(&self.scalar)
    }
}

impl Serialize for SPNTriple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let f = self.pi.field();
        let mut st = s.serialize_struct("SPNTriple", 4)?;
        st.serialize_field("pi", &self.pi.render())?;
        st.serialize_field("b", &f.render(&self.b))?;
        st.serialize_field("sigma", &self.sigma.render())?;
        st.serialize_field("scalar", &f.render(&self.scalar))?;
        st.end()
    }
}

fn require_char2(field: &GroundField) -> Result<()> {
    if field.p() == 2 {
        Ok(())
    } else {
        Err(Error::Precondition("characteristic 2 is required".into()))
    }
}

fn outside_squares(x: &FieldElem, what: &str) -> Result<()> {
    if x.is_zero() || pth_root(x).is_ok() {
        Err(Error::Precondition(format!("{what} must lie outside F^2")))
    } else {
        Ok(())
    }
}

fn ratio(x: &FieldElem, y: &FieldElem) -> FieldElem {
    normalize_entry(&x.div(y).expect("divisor is nonzero"))
}

fn simplicity(field: &GroundField, x: &FieldElem) -> (u32, usize, String) {
    let deg = x.numer().total_degree() + x.denom().total_degree();
    (deg, x.numer().len() + x.denom().len(), field.render(x))
}

/// `τ` with `τ ⊗ <1,a> ⊆ φ` and `dim τ` the defect of φ over `F(√a)`:
/// a basis of `D(φ) ∩ a·D(φ)` as a module over `F^2(a)`.
pub fn extract_divisible_subform(phi: &QuasiForm, a: &FieldElem) -> Result<QuasiForm> {
    let field = phi.field();
    require_char2(field)?;
    if !phi.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    if phi.dim() < 2 {
        return Err(Error::Precondition("dimension at least 2 is required".into()));
    }
    outside_squares(a, "a")?;
    let ext = InsepExtension::new(field, vec![a.clone()])?;
    let defect = defect_over(phi, &ext)?;
    if defect == 0 {
        return Err(Error::Precondition("φ stays anisotropic over F(√a)".into()));
    }
    let n = phi.dim();
    let mut cols: Vec<FieldElem> = phi.entries().to_vec();
    cols.extend(phi.entries().iter().map(|e| e.mul(a)));
    // The intersection is an F^2(a)-module; take the simplest of w, aw first.
    let mut cands: Vec<FieldElem> = Vec::new();
    for rel in field.fp_relations(&cols)? {
        let mut w = field.zero();
        for (x, e) in rel[..n].iter().zip(phi.entries()) {
            if !x.is_zero() {
                w = w.add(&x.frobenius().mul(e));
            }
        }
        if !w.is_zero() {
            cands.push(normalize_entry(&w));
            cands.push(normalize_entry(&w.mul(a)));
        }
    }
    cands.sort_by_cached_key(|x| simplicity(field, x));
    let mut tau: Vec<FieldElem> = Vec::new();
    let mut span: Vec<FieldElem> = Vec::new();
    for w in cands {
        if !span.is_empty() && field.in_span(&w, &span)? {
            continue;
        }
        span.push(w.clone());
        span.push(w.mul(a));
        tau.push(w);
    }
    let tau = QuasiForm::new(field, tau)?;
    if tau.dim() != defect {
        return Err(Error::Internal(format!("divisible part has dimension {} but the defect is {defect}", tau.dim())));
    }
    if !tau.tensor(&QuasiForm::quasi_pfister(field, std::slice::from_ref(a))?)?.is_subform_of(phi)? {
        return Err(Error::Internal("divisible part is not a subform".into()));
    }
    Ok(tau)
}

/// `<1,a^k>` and `<1,a^l>` are similar exactly when `k ≡ ±l (mod p)`.
pub fn two_dim_similar(k: i64, l: i64, p: u32) -> Result<bool> {
    let p = p as i64;
    if k.rem_euclid(p) == 0 || l.rem_euclid(p) == 0 {
        return Err(Error::Precondition("k and l must be nonzero mod p".into()));
    }
    Ok((k - l).rem_euclid(p) == 0 || (k + l).rem_euclid(p) == 0)
}

/// `c ∈ D(<1,b>)`, `b ∈ D(<1,c>)` and `<1,b> ≅ <1,c>`, evaluated separately.
pub fn two_dim_congruent(field: &GroundField, b: &FieldElem, c: &FieldElem) -> Result<bool> {
    require_char2(field)?;
    outside_squares(b, "b")?;
    outside_squares(c, "c")?;
    let fb = QuasiForm::new(field, vec![field.one(), b.clone()])?;
    let fc = QuasiForm::new(field, vec![field.one(), c.clone()])?;
    let x = fb.represents_value(c)?;
    let y = fc.represents_value(b)?;
    let z = fb.is_isometric(&fc)?;
    if x != y || y != z {
        return Err(Error::Internal(format!("congruence tests disagree: {x} {y} {z}")));
    }
    Ok(x)
}

/// For `a = x^2 + c·y^2 + bc·z^2`, returns `s = x`, so that
/// `<1,c,bc> ≅ (a + s^2)<1,a,b>`.
pub fn three_dim_rewrite(field: &GroundField, a: &FieldElem, b: &FieldElem, c: &FieldElem) -> Result<FieldElem> {
    require_char2(field)?;
    outside_squares(a, "a")?;
    outside_squares(b, "b")?;
    outside_squares(c, "c")?;
    let target = QuasiForm::new(field, vec![field.one(), c.clone(), b.mul(c)])?;
    let Some(xyz) = target.represents(a)? else {
        return Err(Error::Precondition("a is not represented by <1,c,bc>".into()));
    };
    let s = xyz[0].clone();
    let lhs = QuasiForm::new(field, vec![field.one(), a.clone(), b.clone()])?.scale(&a.add(&s.mul(&s)))?;
    if !lhs.is_isometric(&target)? {
        return Err(Error::Internal("rewritten ternary form is not isometric".into()));
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubformCase {
    /// `<1,c,ac> ⊆ ψ`.
    WithProduct,
    /// `<1,a> ⊆ ψ` and `c ∈ D(<1,a>)`.
    PfisterSlot,
}

pub fn two_dim_subform_case(psi: &QuasiForm, c: &FieldElem, a: &FieldElem) -> Result<SubformCase> {
    let field = psi.field();
    require_char2(field)?;
    if !psi.represents_value(&field.one())? {
        return Err(Error::Precondition("ψ must represent 1".into()));
    }
    let binary = QuasiForm::new(field, vec![field.one(), a.clone()])?;
    let cb = binary.scale(c)?;
    if !cb.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    if !cb.is_subform_of(psi)? {
        return Err(Error::Precondition("c<1,a> must be a subform of ψ".into()));
    }
    if cb.represents_value(&field.one())? {
        if !binary.is_subform_of(psi)? || !binary.represents_value(c)? {
            return Err(Error::Internal("<1,a> case fails its postcondition".into()));
        }
        Ok(SubformCase::PfisterSlot)
    } else {
        let t = QuasiForm::new(field, vec![field.one(), c.clone(), a.mul(c)])?;
        if !t.is_subform_of(psi)? {
            return Err(Error::Internal("<1,c,ac> case fails its postcondition".into()));
        }
        Ok(SubformCase::WithProduct)
    }
}

/// `ρ ⊆ π` with `π ⊥ bρ ≅ ψ`.
pub fn spn_decompose_with_pfister(psi: &QuasiForm, pi: &QuasiForm, b: &FieldElem) -> Result<QuasiForm> {
    let field = psi.field();
    require_char2(field)?;
    if !psi.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    if !is_quasi_pfister(pi)? || !pi.represents_value(&field.one())? {
        return Err(Error::Precondition("π must be a quasi-Pfister form".into()));
    }
    if !pi.is_subform_of(psi)? {
        return Err(Error::Precondition("π must be a subform of ψ".into()));
    }
    let k = norm_field(pi)?;
    let nf = norm_field(psi)?;
    let mut kb = k.pbasis().to_vec();
    kb.push(b.clone());
    if !nf.same_as(&Subfield::generated_by(field, &kb)?)? || nf.exponent() != k.exponent() + 1 {
        return Err(Error::Precondition("the norm form of ψ must be π ⊗ <<b>>".into()));
    }
    let mut basis: Vec<FieldElem> = k.monomial_basis().to_vec();
    let kdim = basis.len();
    basis.extend(k.monomial_basis().iter().map(|m| m.mul(b)));
    let mut span: Vec<FieldElem> = pi.anisotropic_part()?.entries().to_vec();
    let mut rho: Vec<FieldElem> = Vec::new();
    for d in psi.entries() {
        if field.in_span(d, &span)? {
            continue;
        }
        span.push(d.clone());
        let xs = field.fp_solve(d, &basis).map_err(|e| match e {
            Error::NoSolution => Error::Internal("entry lies outside π ⊕ bπ".into()),
            e => e,
        })?;
        let mut v = field.zero();
        for (x, m) in xs[kdim..].iter().zip(k.monomial_basis()) {
            if !x.is_zero() {
                v = v.add(&x.frobenius().mul(m));
            }
        }
        rho.push(normalize_entry(&v));
    }
    let rho = QuasiForm::new(field, rho)?;
    if !rho.is_subform_of(pi)? {
        return Err(Error::Internal("ρ is not a subform of π".into()));
    }
    if !pi.orth_sum(&rho.scale(b)?)?.is_isometric(psi)? {
        return Err(Error::Internal("π ⊥ bρ does not rebuild ψ".into()));
    }
    Ok(rho)
}

/// Split `ψ ⊇ π` as a triple, picking `b` from the norm-field p-basis.
pub fn spn_triple(psi: &QuasiForm, pi: &QuasiForm) -> Result<SPNTriple> {
    let k = norm_field(pi)?;
    let nf = norm_field(psi)?;
    let b = nf
        .pbasis()
        .iter()
        .find(|x| !k.contains(x).unwrap_or(true))
        .cloned()
        .ok_or_else(|| Error::Precondition("ψ has the norm field of π".into()))?;
    let sigma = spn_decompose_with_pfister(psi, pi, &b)?;
    Ok(SPNTriple { pi: pi.clone(), b, sigma, scalar: psi.field().one() })
}

/// Elements of `N` orthogonal to `D(φ)` under the top-coefficient pairing
/// `<x,y> = coefficient of b_1⋯b_k in xy`. Entries must lie in `N`.
fn trace_dual(phi: &QuasiForm, n: &Subfield) -> Result<Vec<FieldElem>> {
    let field = phi.field();
    let m = n.monomial_basis();
    let top = m.len() - 1;
    let mut rows = Vec::new();
    for d in phi.entries() {
        let x = field.fp_solve(d, m)?;
        rows.push(clear_denominators((0..m.len()).map(|i| x[i ^ top].clone()).collect()));
    }
    let kernel = kernel_of_rows(2, rows, m.len(), field.term_cap())?;
    Ok(kernel
        .into_iter()
        .map(|y| {
            let mut acc = field.zero();
            for (yi, mi) in y.iter().zip(m) {
                if !yi.is_zero() {
                    acc = acc.add(&yi.frobenius().mul(mi));
                }
            }
            acc
        })
        .collect())
}

/// `φ ≅ t·(<<x,y>> ⊥ <w>)` for a 5-dimensional φ of norm degree 8 with 1 ∈ D(φ).
fn split_spn5(phi: &QuasiForm) -> Result<(FieldElem, [FieldElem; 3])> {
    let field = phi.field();
    let n = norm_field(phi)?;
    let dual = QuasiForm::new(field, trace_dual(phi, &n)?)?;
    let k = norm_field(&dual)?;
    if k.exponent() != 2 {
        return Err(Error::Internal("dual of a neighbor does not span a 2-fold field".into()));
    }
    let x = k.pbasis()[0].clone();
    let tau = extract_divisible_subform(phi, &x)?;
    if tau.dim() != 2 {
        return Err(Error::Internal("expected a 2-dimensional divisible part".into()));
    }
    let t = tau.entries()[0].clone();
    let y = ratio(&tau.entries()[1], &t);
    let pf = QuasiForm::quasi_pfister(field, &[x.clone(), y.clone()])?.scale(&t)?;
    for e in phi.entries() {
        if !field.in_span(e, pf.entries())? {
            return Ok((t.clone(), [x, y, ratio(e, &t)]));
        }
    }
    Err(Error::Internal("neighbor has no entry outside its Pfister part".into()))
}

/// The five entries of the hyperplane `ℓ = 0` of the F_2-rational span and the pivot left out.
fn rational_hyperplane(e: &[FieldElem], ell: u32) -> (Vec<FieldElem>, usize) {
    let j = ell.trailing_zeros() as usize;
    let mut out = Vec::new();
    for (i, x) in e.iter().enumerate() {
        if i == j {
            continue;
        }
        if ell & (1 << i) == 0 {
            out.push(x.clone());
        } else {
            out.push(x.add(&e[j]));
        }
    }
    (out, j)
}

fn label(field: &GroundField, dim: usize, ndeg: u64, shape: Shape, parameters: Vec<FieldElem>, scalar: FieldElem) -> ShapeLabel {
    ShapeLabel { field: field.clone(), dim, ndeg, shape, parameters, scalar: normalize_entry(&scalar) }
}

/// Canonical shape of an anisotropic form of dimension at most 6 over a
/// field of characteristic 2.
pub fn classify_low_dim(phi: &QuasiForm) -> Result<ShapeLabel> {
    let field = phi.field();
    require_char2(field)?;
    if phi.dim() == 0 {
        return Err(Error::ZeroForm);
    }
    if phi.dim() > 6 {
        return Err(Error::UnsupportedDimension(phi.dim()));
    }
    if !phi.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    let s = normalize_entry(&phi.entries()[0]);
    let e: Vec<FieldElem> = phi.entries().iter().map(|x| ratio(x, &s)).collect();
    let unit = QuasiForm::new(field, e.clone())?;
    let n = norm_field(&unit)?;
    let ndeg = n.degree();
    let dim = phi.dim();
    let rest = e[1..].to_vec();
    let out = match (dim, ndeg) {
        (1, _) => label(field, dim, ndeg, Shape::Unit, vec![], s),
        (2, _) => label(field, dim, ndeg, Shape::Binary, rest, s),
        (3, _) => label(field, dim, ndeg, Shape::Ternary, rest, s),
        (4, 4) => label(field, dim, ndeg, Shape::Pfister2, n.pbasis().to_vec(), s),
        (4, _) => label(field, dim, ndeg, Shape::Minimal4, rest, s),
        (5, 8) => {
            let (t, p) = split_spn5(&unit)?;
            label(field, dim, ndeg, Shape::SPN5, p.to_vec(), s.mul(&t))
        }
        (5, _) => label(field, dim, ndeg, Shape::Minimal5, rest, s),
        (6, 8) => {
            let dec = divide_by_similarity(&unit)?;
            let g = dec.simform.entries();
            if g.len() != 2 {
                return Err(Error::Internal("expected a similarity factor field of degree 2".into()));
            }
            let c = dec.cofactor.entries();
            let c0 = &c[0];
            let params = vec![g[1].clone(), ratio(&c[1], c0), ratio(&c[2], c0)];
            label(field, dim, ndeg, Shape::SPN6, params, s.mul(&dec.scalar).mul(c0))
        }
        (6, 16) => classify_six_sixteen(&unit, &e, &s)?,
        (6, _) => label(field, dim, ndeg, Shape::Minimal6, rest, s),
        _ => return Err(Error::Internal(format!("unexpected norm degree {ndeg} in dimension {dim}"))),
    };
    let rebuilt = out.form()?;
    if !rebuilt.is_isometric(phi)? || is_similar(phi, &out.canonical_form()?)?.is_none() {
        return Err(Error::Internal(format!("shape {:?} does not rebuild the form", out.shape)));
    }
    Ok(out)
}

fn classify_six_sixteen(unit: &QuasiForm, e: &[FieldElem], s: &FieldElem) -> Result<ShapeLabel> {
    let field = unit.field();
    for ell in 1u32..64 {
        let (hyper, j) = rational_hyperplane(e, ell);
        let h = QuasiForm::new(field, hyper)?;
        if norm_field(&h)?.degree() != 8 {
            continue;
        }
        let h0 = normalize_entry(&h.entries()[0]);
        let hu = QuasiForm::new(field, h.entries().iter().map(|x| ratio(x, &h0)).collect())?;
        let (t, [x, y, w]) = split_spn5(&hu)?;
        let t = t.mul(&h0);
        let params = vec![x, y, w, ratio(&e[j], &t)];
        return Ok(label(field, 6, 16, Shape::Pfister2PlusPair, params, s.mul(&t)));
    }
    // <1,a,b,c,d> is minimal here; split the last entry along d.
    let gens = e[1..5].to_vec();
    let sub = Subfield::new(field, gens.clone())?;
    let m = sub.monomial_basis();
    let x = &e[5];
    let coords = field.fp_solve(x, m)?;
    let (mut y, mut z) = (field.zero(), field.zero());
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let c2 = c.frobenius();
        if i & 1 == 0 {
            y = y.add(&c2.mul(&m[i]));
        } else {
            z = z.add(&c2.mul(&m[i ^ 1]));
        }
    }
    let d = &gens[3];
    if z.is_zero() || pth_root(&z).is_ok() {
        let sigma = QuasiForm::new(field, vec![field.one(), gens[0].clone(), gens[1].clone(), gens[2].clone(), y])?;
        let (t, [x1, y1, w]) = split_spn5(&sigma)?;
        let params = vec![x1, y1, w, ratio(d, &t)];
        return Ok(label(field, 6, 16, Shape::Pfister2PlusPair, params, s.mul(&t)));
    }
    let mut abc = gens[..3].to_vec();
    let mut base = vec![field.one()];
    base.extend(abc.iter().cloned());
    if let Ok(k) = field.fp_solve(&z, &base) {
        if let Some(i) = (1..4).find(|&i| !k[i].is_zero()) {
            abc.remove(i - 1);
            abc.insert(0, z.clone());
        }
    }
    let params = vec![abc[0].clone(), abc[1].clone(), abc[2].clone(), d.clone(), y, z];
    Ok(label(field, 6, 16, Shape::Exotic6, params, s.clone()))
}
