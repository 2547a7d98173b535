//! Behaviour over purely inseparable extensions `F(a_1^{1/p},…,a_r^{1/p})`:
//! defects, splitting patterns and weak Vishik equivalence.

use std::collections::BTreeSet;

use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::groundfield::{pth_root, FieldElem, GroundField};
use crate::invariants::{
    is_minimal, is_quasi_pfister_neighbor, is_similar, norm_field, similarity_group, Subfield,
};
use crate::qform::{normalize_entry, QuasiForm};
use crate::random;
use crate::{Error, Result};

/// `E = F(a_1^{1/p},…,a_r^{1/p})`. Redundant generators are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsepExtension {
    field: GroundField,
    adjoined: Vec<FieldElem>,
}

impl InsepExtension {
    pub fn new(field: &GroundField, adjoined: Vec<FieldElem>) -> Result<InsepExtension> {
        if adjoined.iter().any(|a| a.is_zero()) {
            return Err(Error::ZeroSlot);
        }
        QuasiForm::new(field, adjoined.clone())?;
        Ok(InsepExtension { field: field.clone(), adjoined })
    }

    pub fn trivial(field: &GroundField) -> InsepExtension {
        InsepExtension { field: field.clone(), adjoined: Vec::new() }
    }

    /// Adjoin p-th roots of the named generators.
    pub fn of_variables(field: &GroundField, vars: &[usize]) -> InsepExtension {
        InsepExtension { field: field.clone(), adjoined: vars.iter().map(|&i| field.var(i)).collect() }
    }

    pub fn field(&self) -> &GroundField {
        &self.field
    }

    pub fn adjoined(&self) -> &[FieldElem] {
        &self.adjoined
    }

    /// `E^p = F^p(adjoined)` as a subfield of F, with a greedy p-basis.
    pub fn pth_power_field(&self) -> Result<Subfield> {
        Subfield::generated_by(&self.field, &self.adjoined)
    }

    /// Indices of the generators if every adjoined element is a variable.
    pub fn variable_indices(&self) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for a in &self.adjoined {
            let i = (0..self.field.nvars()).find(|&i| *a == self.field.var(i))?;
            if !out.contains(&i) {
                out.push(i);
            }
        }
        Some(out)
    }

    pub fn render(&self) -> Vec<String> {
        self.adjoined.iter().map(|a| self.field.render(a)).collect()
    }
}

impl Serialize for InsepExtension {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.render().serialize(s)
    }
}

/// `i_ql(φ_E) = i_ql(⟨⟨b_1,…,b_r⟩⟩ ⊗ φ) / p^r` for a p-basis `b` of `E^p` over `F^p`.
pub fn defect_over(phi: &QuasiForm, ext: &InsepExtension) -> Result<usize> {
    if phi.field() != ext.field() {
        return Err(Error::FieldMismatch);
    }
    let sub = ext.pth_power_field()?;
    if sub.exponent() == 0 {
        return phi.defect();
    }
    let t = sub.pfister_form().tensor(phi)?;
    let i = t.defect()?;
    let scale = sub.degree() as usize;
    if i % scale != 0 {
        return Err(Error::Internal(format!("defect {i} of the tensor is not divisible by {scale}")));
    }
    Ok(i / scale)
}

pub fn anisotropic_dim_over(phi: &QuasiForm, ext: &InsepExtension) -> Result<usize> {
    Ok(phi.dim() - defect_by_derivations(phi, ext)?)
}

/// The same defect as [`defect_over`], read off as `dim φ` minus the
/// `E^p`-rank of the entries. Much cheaper than the tensor for large `p^r`.
pub fn defect_by_derivations(phi: &QuasiForm, ext: &InsepExtension) -> Result<usize> {
    if phi.field() != ext.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(phi.dim() - ext.pth_power_field()?.rank_over(phi.entries())?)
}

/// Rebuild φ over `F' = F_p(…, s_j, …)` with `t_j = s_j^p` for the
/// generators in `vars`. The new field realizes `F(t_j^{1/p})`.
pub fn substitute_roots(phi: &QuasiForm, vars: &[usize]) -> Result<QuasiForm> {
    let field = phi.field();
    let p = field.p();
    let names: Vec<String> = field
        .var_names()
        .iter()
        .enumerate()
        .map(|(i, n)| if vars.contains(&i) { format!("{n}_root") } else { n.clone() })
        .collect();
    let target = GroundField::new(p, &names)?.with_term_cap(field.term_cap());
    let scales: Vec<u32> = (0..field.nvars()).map(|i| if vars.contains(&i) { p } else { 1 }).collect();
    QuasiForm::new(&target, phi.entries().iter().map(|e| e.inflate(&scales)).collect())
}

/// Defect over a generator-variable extension, computed by substitution.
pub fn substitution_defect(phi: &QuasiForm, ext: &InsepExtension) -> Result<usize> {
    let vars = ext
        .variable_indices()
        .ok_or_else(|| Error::Precondition("every adjoined element must be a generator variable".into()))?;
    substitute_roots(phi, &vars)?.defect()
}

fn require_anisotropic(phi: &QuasiForm) -> Result<()> {
    if phi.is_anisotropic()? {
        Ok(())
    } else {
        Err(Error::Isotropic)
    }
}

fn is_pth_power(x: &FieldElem) -> bool {
    pth_root(x).is_ok()
}

/// Isotropy over `F(a^{1/p})` forces `a ∈ N_F(φ)`.
pub fn isotropy_implies_normfield_check(phi: &QuasiForm, a: &FieldElem) -> Result<bool> {
    require_anisotropic(phi)?;
    if a.is_zero() || is_pth_power(a) {
        return Err(Error::Precondition("a must lie outside F^p".into()));
    }
    let ext = InsepExtension::new(phi.field(), vec![a.clone()])?;
    if defect_over(phi, &ext)? == 0 {
        return Ok(true);
    }
    norm_field(phi)?.contains(a)
}

/// For an anisotropic quasi-Pfister neighbor φ: is `φ ⊗ ⟨⟨x⟩⟩` isotropic?
/// Both the defect and the norm-field membership are computed and compared.
pub fn pfister_slot_isotropy(phi: &QuasiForm, x: &FieldElem) -> Result<bool> {
    require_anisotropic(phi)?;
    if x.is_zero() {
        return Err(Error::ZeroSlot);
    }
    if is_quasi_pfister_neighbor(phi)?.is_none() {
        return Err(Error::Precondition("form must be a quasi-Pfister form or neighbor".into()));
    }
    let t = phi.tensor(&QuasiForm::quasi_pfister(phi.field(), std::slice::from_ref(x))?)?;
    let lhs = t.defect()? > 0;
    let rhs = norm_field(phi)?.contains(x)?;
    if lhs != rhs {
        return Err(Error::Internal(format!(
            "tensor isotropy {lhs} disagrees with norm-field membership {rhs}"
        )));
    }
    Ok(lhs)
}

/// `γ` with `φ_an ≅ ⟨⟨a⟩⟩ ⊗ γ`, if it exists.
pub fn divide_by_pfister(phi: &QuasiForm, a: &FieldElem) -> Result<Option<QuasiForm>> {
    let field = phi.field();
    let an = phi.anisotropic_part()?;
    let pf = QuasiForm::quasi_pfister(field, std::slice::from_ref(a))?;
    let mut gamma: Vec<FieldElem> = Vec::new();
    let mut span: Vec<FieldElem> = Vec::new();
    for e in an.entries() {
        if !span.is_empty() && field.in_span(e, &span)? {
            continue;
        }
        gamma.push(e.clone());
        span.extend(pf.entries().iter().map(|m| m.mul(e)));
    }
    let gamma = QuasiForm::new(field, gamma)?;
    if pf.tensor(&gamma)?.is_isometric(&an)? {
        Ok(Some(gamma))
    } else {
        Ok(None)
    }
}

/// Search limits for the splitting-pattern sampler and the witness search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Largest subset of the norm-field p-basis to adjoin; `None` means all.
    pub max_subset: Option<usize>,
    pub samples: usize,
    pub degree: u32,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_subset: None, samples: 64, degree: 2, seed: DEFAULT_SEED }
    }
}

fn sample_stream(seed: u64, level: u32, index: usize) -> random::Rng64 {
    random::rng(seed ^ ((level as u64) << 48) ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Sparse random element of `F^p(basis)` with monomial p-th power coefficients of degree `<= deg`.
fn sparse_subfield_elem<R: Rng>(rng: &mut R, field: &GroundField, sub: &Subfield, deg: u32) -> FieldElem {
    let monos = sub.monomial_basis();
    let k = rng.gen_range(1..=2usize.min(monos.len()));
    let mut x = field.zero();
    for _ in 0..k {
        let m = &monos[rng.gen_range(0..monos.len())];
        let c = FieldElem::from_poly(random::nonzero_poly(rng, field, deg, 1));
        x = x.add(&c.frobenius().mul(m));
    }
    x
}

/// Anisotropic dimensions over exponent-one extensions inside `N_F(φ)`:
/// every subset of the norm-field p-basis, pairwise products and sums, and
/// random samples. A lower approximation of the full splitting pattern.
pub fn insep_splitting_pattern(phi: &QuasiForm, budget: &Budget) -> Result<BTreeSet<usize>> {
    require_anisotropic(phi)?;
    let field = phi.field();
    let mut out = BTreeSet::new();
    out.insert(phi.dim());
    if phi.dim() == 0 {
        return Ok(out);
    }
    let unit = QuasiForm::new(field, unit_ratios(phi))?;
    let phi = &unit;
    let n = norm_field(phi)?;
    let pb = n.pbasis().to_vec();
    let k = pb.len();
    let max_subset = budget.max_subset.unwrap_or(k);
    let eval = |gens: Vec<FieldElem>, out: &mut BTreeSet<usize>| -> Result<()> {
        let gens: Vec<FieldElem> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        let ext = InsepExtension::new(field, gens)?;
        out.insert(anisotropic_dim_over(phi, &ext)?);
        Ok(())
    };
    for mask in 1u32..(1u32 << k) {
        if mask.count_ones() as usize > max_subset {
            continue;
        }
        let gens = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| pb[i].clone()).collect();
        eval(gens, &mut out)?;
    }
    if max_subset >= 1 {
        for i in 0..k {
            for j in i + 1..k {
                eval(vec![pb[i].mul(&pb[j])], &mut out)?;
                eval(vec![pb[i].add(&pb[j])], &mut out)?;
            }
        }
    }
    if k > 0 {
        for level in 0..=budget.degree {
            for s in 0..budget.samples {
                let mut rng = sample_stream(budget.seed, level, s);
                let size = rng.gen_range(1..=2usize.min(k));
                let gens: Vec<FieldElem> = (0..size).map(|_| sparse_subfield_elem(&mut rng, field, &n, level)).collect();
                if size <= max_subset {
                    eval(gens, &mut out)?;
                }
            }
        }
    }
    Ok(out)
}

/// Full splitting patterns of generic special quasi-Pfister neighbors for p = 2.
pub fn fsp_special_qpn(dim: usize) -> Result<BTreeSet<usize>> {
    let v: &[usize] = match dim {
        3 => &[1, 2, 3],
        5 => &[1, 2, 3, 4, 5],
        6 => &[1, 2, 3, 4, 6],
        7 => &[1, 2, 4, 7],
        9 => &[1, 2, 3, 4, 5, 8, 9],
        10 => &[1, 2, 3, 4, 5, 6, 8, 10],
        11 => &[1, 2, 3, 4, 6, 7, 8, 11],
        _ => return Err(Error::UnsupportedDimension(dim)),
    };
    Ok(v.iter().copied().collect())
}

/// The generic special neighbor of a tabulated dimension over `F_2(a,b,c,d)`:
/// `<<a,b>> ⊥ c·σ` or `<<a,b,c>> ⊥ d·σ` with `σ` one of `<1>`, `<1,a>`, `<1,a,b>`,
/// and `<1,a,d>` in dimension 3.
pub fn generic_special_qpn(dim: usize) -> Result<QuasiForm> {
    let f = GroundField::new(2, &["a", "b", "c", "d"])?;
    let (a, b, c, d) = (f.var(0), f.var(1), f.var(2), f.var(3));
    let one = f.one();
    let spn = |slots: &[FieldElem], s: &FieldElem, sigma: Vec<FieldElem>| -> Result<QuasiForm> {
        QuasiForm::quasi_pfister(&f, slots)?.orth_sum(&QuasiForm::new(&f, sigma)?.scale(s)?)
    };
    match dim {
        3 => QuasiForm::new(&f, vec![one, a, d]),
        5 => spn(&[a, b], &c, vec![one]),
        6 => spn(&[a.clone(), b], &c, vec![one, a]),
        7 => spn(&[a.clone(), b.clone()], &d, vec![one, a, b]),
        9 => spn(&[a, b, c], &d, vec![one]),
        10 => spn(&[a.clone(), b, c], &d, vec![one, a]),
        11 => spn(&[a.clone(), b.clone(), c], &d, vec![one, a, b]),
        _ => Err(Error::UnsupportedDimension(dim)),
    }
}

/// For p = 2 and a tabulated dimension: does the computed pattern fit inside
/// the pattern every special quasi-Pfister neighbor of that dimension has?
/// `None` when no table entry exists.
pub fn special_qpn_consistent(phi: &QuasiForm, budget: &Budget) -> Result<Option<(bool, BTreeSet<usize>)>> {
    if phi.field().p() != 2 {
        return Err(Error::Precondition("the table is for p = 2".into()));
    }
    let Ok(table) = fsp_special_qpn(phi.dim()) else { return Ok(None) };
    let pattern = insep_splitting_pattern(phi, budget)?;
    Ok(Some((pattern.is_subset(&table), pattern)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VishikStatus {
    CertifiedEquivalent,
    Inequivalent,
    Unknown,
}

/// Outcome of a weak Vishik check.
#[derive(Clone, Debug)]
pub struct VishikVerdict {
    pub status: VishikStatus,
    /// Certificate rule, failed necessary condition, or `None` for Unknown.
    pub rule: Option<String>,
    pub witness: Option<InsepExtension>,
    /// Defects of φ and ψ over the witness.
    pub witness_defects: Option<(usize, usize)>,
    pub candidates_checked: usize,
    pub budget: Budget,
}

impl Serialize for VishikVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("VishikVerdict", 7)?;
        st.serialize_field("status", &self.status)?;
        st.serialize_field("rule", &self.rule)?;
        st.serialize_field("witness", &self.witness)?;
        st.serialize_field("witness_defects", &self.witness_defects)?;
        st.serialize_field("candidates_checked", &self.candidates_checked)?;
        st.serialize_field("seed", &self.budget.seed)?;
        st.serialize_field("budget", &self.budget)?;
        st.end()
    }
}

fn verdict(status: VishikStatus, rule: &str, budget: &Budget, checked: usize) -> VishikVerdict {
    VishikVerdict {
        status,
        rule: Some(rule.to_string()),
        witness: None,
        witness_defects: None,
        candidates_checked: checked,
        budget: budget.clone(),
    }
}

fn unit_ratios(an: &QuasiForm) -> Vec<FieldElem> {
    let a0 = &an.entries()[0];
    an.entries().iter().map(|e| normalize_entry(&e.div(a0).expect("entry is nonzero"))).collect()
}

/// Elements of `A` missing from `B`, first from `A`'s p-basis then from `B`'s.
fn separating_generator(a: &Subfield, b: &Subfield) -> Result<Option<FieldElem>> {
    for x in a.pbasis() {
        if !b.contains(x)? {
            return Ok(Some(x.clone()));
        }
    }
    for x in b.pbasis() {
        if !a.contains(x)? {
            return Ok(Some(x.clone()));
        }
    }
    Ok(None)
}

/// Weak Vishik equivalence: equal defects over every `F(a^{1/p})`.
/// Necessary conditions first, then a deterministic witness search, then
/// certificates. The checker is one-sided: `Unknown` is an honest answer.
pub fn weak_vishik(phi: &QuasiForm, psi: &QuasiForm, budget: &Budget) -> Result<VishikVerdict> {
    use VishikStatus::*;
    if phi.field() != psi.field() {
        return Err(Error::FieldMismatch);
    }
    let field = phi.field();
    if phi.dim() != psi.dim() {
        return Ok(verdict(Inequivalent, "dimension", budget, 0));
    }
    let (i_phi, i_psi) = (phi.defect()?, psi.defect()?);
    if i_phi != i_psi {
        let mut v = verdict(Inequivalent, "defect", budget, 0);
        v.witness = Some(InsepExtension::trivial(field));
        v.witness_defects = Some((i_phi, i_psi));
        return Ok(v);
    }
    let pa = phi.anisotropic_part()?;
    let qa = psi.anisotropic_part()?;
    if pa.dim() == 0 {
        return Ok(verdict(CertifiedEquivalent, "similarity", budget, 0));
    }

    let with_witness = |rule: &str, x: Option<FieldElem>, checked: usize| -> Result<VishikVerdict> {
        let mut v = verdict(Inequivalent, rule, budget, checked);
        if let Some(x) = x {
            let ext = InsepExtension::new(field, vec![x])?;
            let d = (defect_by_derivations(phi, &ext)?, defect_by_derivations(psi, &ext)?);
            if d.0 != d.1 {
                v.witness = Some(ext);
                v.witness_defects = Some(d);
            }
        }
        Ok(v)
    };

    let n_phi = norm_field(&pa)?;
    let n_psi = norm_field(&qa)?;
    if !n_phi.same_as(&n_psi)? {
        let x = separating_generator(&n_phi, &n_psi)?;
        return with_witness("norm-field", x, 0);
    }
    let g_phi = similarity_group(&pa)?;
    let g_psi = similarity_group(&qa)?;
    if !g_phi.same_as(&g_psi)? {
        let x = separating_generator(&g_phi, &g_psi)?;
        return with_witness("similarity-group", x, 0);
    }

    // similar forms have equal defects everywhere, so no witness can exist
    if is_similar(&pa, &qa)?.is_some() {
        return Ok(verdict(CertifiedEquivalent, "similarity", budget, 0));
    }

    // Candidate generators in N_F(φ) = N_F(ψ).
    let mut candidates: Vec<FieldElem> = n_phi.monomial_basis()[1..].to_vec();
    let mut ratios = unit_ratios(&pa);
    ratios.extend(unit_ratios(&qa));
    for i in 0..ratios.len() {
        candidates.push(ratios[i].clone());
        for j in i + 1..ratios.len() {
            candidates.push(ratios[i].add(&ratios[j]));
        }
    }
    let mut rng = random::rng(budget.seed);
    for _ in 0..budget.samples {
        candidates.push(random::in_subfield(&mut rng, field, n_phi.pbasis(), budget.degree));
    }
    let mut seen: Vec<FieldElem> = Vec::new();
    let mut checked = 0;
    for x in candidates {
        if x.is_zero() || is_pth_power(&x) {
            continue;
        }
        let x = normalize_entry(&x);
        if seen.contains(&x) {
            continue;
        }
        seen.push(x.clone());
        checked += 1;
        let ext = InsepExtension::new(field, vec![x])?;
        let d = (defect_by_derivations(phi, &ext)?, defect_by_derivations(psi, &ext)?);
        if d.0 != d.1 {
            let mut v = verdict(Inequivalent, "witness", budget, checked);
            v.witness = Some(ext);
            v.witness_defects = Some(d);
            return Ok(v);
        }
    }

    if n_phi.exponent() == 1 && pa.dim() >= 2 {
        return Ok(verdict(CertifiedEquivalent, "qpn-of-1fold-pfister", budget, checked));
    }
    if field.p() == 2 && (is_minimal(&pa)? || is_minimal(&qa)?) {
        return Ok(verdict(Inequivalent, "minimal-form-theorem", budget, checked));
    }
    for f in [&pa, &qa] {
        if matches!(is_quasi_pfister_neighbor(f)?, Some(0) | Some(1)) {
            return Ok(verdict(Inequivalent, "qp-or-codim1-neighbor", budget, checked));
        }
    }
    Ok(VishikVerdict {
        status: Unknown,
        rule: None,
        witness: None,
        witness_defects: None,
        candidates_checked: checked,
        budget: budget.clone(),
    })
}

/// Move to `E` by substitution, take anisotropic parts and check again that
/// weak Vishik equivalence is not contradicted there.
pub fn vishik_anisotropic_transfer_check(
    phi: &QuasiForm,
    psi: &QuasiForm,
    ext: &InsepExtension,
    budget: &Budget,
) -> Result<bool> {
    let vars = ext.variable_indices().ok_or_else(|| {
        Error::Precondition("the extension must adjoin p-th roots of generator variables only".into())
    })?;
    if weak_vishik(phi, psi, budget)?.status == VishikStatus::Inequivalent {
        return Err(Error::Precondition("the pair is already weakly Vishik inequivalent".into()));
    }
    let pe = substitute_roots(phi, &vars)?.anisotropic_part()?;
    let qe = substitute_roots(psi, &vars)?.anisotropic_part()?;
    if pe.dim() != qe.dim() {
        return Ok(false);
    }
    Ok(weak_vishik(&pe, &qe, budget)?.status != VishikStatus::Inequivalent)
}
