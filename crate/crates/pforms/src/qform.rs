//! Diagonal quasilinear p-forms and their structural algebra.

use std::fmt;

use crate::groundfield::gcd::gcd;
use crate::groundfield::{cleared_numerator, coords_of, FieldElem, GroundField, Poly};
use crate::{Error, Result};

/// Replace a nonzero `a = n/d` by the polynomial `n·d^{p-1}` divided by the
/// p-th power of the gcd of its Frobenius coordinates, made monic. The result
/// differs from `a` by a factor in `(F^*)^p`.
pub fn normalize_entry(a: &FieldElem) -> FieldElem {
    if a.is_zero() {
        return a.clone();
    }
    let p = a.p();
    let mut coords = coords_of(a);
    // small coordinates first: cheap gcds that often reach 1 early
    coords.sort_by_key(|(_, h)| (h.total_degree(), h.len()));
    let mut g = Poly::zero(p);
    for (_, h) in &coords {
        g = gcd(&g, h);
        if g.is_one() {
            break;
        }
    }
    let n = cleared_numerator(a);
    let n = if g.is_one() { n } else { n.exact_div(&g.frobenius()).expect("p-th power of the coordinate gcd divides") };
    FieldElem::from_poly(n.monic())
}

/// `⟨a_1,…,a_n⟩` over a fixed ground field.
#[derive(Clone, PartialEq, Eq)]
pub struct QuasiForm {
    field: GroundField,
    entries: Vec<FieldElem>,
}

/// `φ ≅ φ_an ⊥ defect×⟨0⟩`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub form: QuasiForm,
    pub defect: usize,
    pub anisotropic_entries: Vec<FieldElem>,
}

impl Diagonalization {
    pub fn anisotropic_part(&self) -> QuasiForm {
        QuasiForm { field: self.form.field.clone(), entries: self.anisotropic_entries.clone() }
    }
}

fn check_elem(field: &GroundField, x: &FieldElem) -> Result<()> {
    let mask = (1u32 << field.nvars()) - 1;
    if x.p() != field.p() || (x.numer().var_mask() | x.denom().var_mask()) & !mask != 0 {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

impl QuasiForm {
    pub fn new(field: &GroundField, entries: Vec<FieldElem>) -> Result<QuasiForm> {
        for e in &entries {
            check_elem(field, e)?;
        }
        Ok(QuasiForm::new_unchecked(field, entries))
    }

    pub(crate) fn new_unchecked(field: &GroundField, entries: Vec<FieldElem>) -> QuasiForm {
        let entries = entries.iter().map(normalize_entry).collect();
        QuasiForm { field: field.clone(), entries }
    }

    pub fn empty(field: &GroundField) -> QuasiForm {
        QuasiForm { field: field.clone(), entries: Vec::new() }
    }

    /// `k×⟨0⟩`.
    pub fn zeros(field: &GroundField, k: usize) -> QuasiForm {
        QuasiForm { field: field.clone(), entries: vec![field.zero(); k] }
    }

    pub fn field(&self) -> &GroundField {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    fn same_field(&self, other: &QuasiForm) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn orth_sum(&self, other: &QuasiForm) -> Result<QuasiForm> {
        self.same_field(other)?;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(QuasiForm { field: self.field.clone(), entries })
    }

    /// Row-major: entry `(i, j)` is `a_i·b_j`.
    pub fn tensor(&self, other: &QuasiForm) -> Result<QuasiForm> {
        self.same_field(other)?;
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a.mul(b));
            }
        }
        Ok(QuasiForm::new_unchecked(&self.field, entries))
    }

    pub fn scale(&self, c: &FieldElem) -> Result<QuasiForm> {
        if c.is_zero() {
            return Err(Error::ZeroScalar);
        }
        check_elem(&self.field, c)?;
        let entries = self.entries.iter().map(|a| a.mul(c)).collect();
        Ok(QuasiForm::new_unchecked(&self.field, entries))
    }

    /// `⟨⟨a_1,…,a_n⟩⟩`, of dimension `p^n`; the empty slot list gives `⟨1⟩`.
    pub fn quasi_pfister(field: &GroundField, slots: &[FieldElem]) -> Result<QuasiForm> {
        let p = field.p();
        let mut entries = vec![field.one()];
        for a in slots {
            if a.is_zero() {
                return Err(Error::ZeroSlot);
            }
            check_elem(field, a)?;
            let a = normalize_entry(a);
            let powers: Vec<FieldElem> = (0..p).map(|k| a.pow(k)).collect();
            let mut next = Vec::with_capacity(entries.len() * p as usize);
            for e in &entries {
                for ak in &powers {
                    next.push(e.mul(ak));
                }
            }
            entries = next;
        }
        Ok(QuasiForm::new_unchecked(field, entries))
    }

    pub fn diagonalize(&self) -> Result<Diagonalization> {
        let (rank, basis) = self.field.fp_rank(&self.entries)?;
        let anisotropic_entries: Vec<FieldElem> = basis.iter().map(|&i| self.entries[i].clone()).collect();
        Ok(Diagonalization { form: self.clone(), defect: self.dim() - rank, anisotropic_entries })
    }

    /// The quasilinear isotropy index `i_ql`.
    pub fn defect(&self) -> Result<usize> {
        Ok(self.dim() - self.rank()?)
    }

    /// `dim_{F^p} D_F(φ)`, the anisotropic dimension.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.field.fp_rank(&self.entries)?.0)
    }

    pub fn anisotropic_part(&self) -> Result<QuasiForm> {
        Ok(self.diagonalize()?.anisotropic_part())
    }

    pub fn is_anisotropic(&self) -> Result<bool> {
        Ok(self.defect()? == 0)
    }

    /// Coordinates `x_i` with `v = Σ x_i^p a_i`, or `None` if `v ∉ D_F(φ)`.
    pub fn represents(&self, v: &FieldElem) -> Result<Option<Vec<FieldElem>>> {
        check_elem(&self.field, v)?;
        if v.is_zero() {
            return Ok(Some(vec![self.field.zero(); self.dim()]));
        }
        match self.field.fp_solve(v, &self.entries) {
            Ok(x) => Ok(Some(x)),
            Err(Error::NoSolution) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn represents_value(&self, v: &FieldElem) -> Result<bool> {
        Ok(self.represents(v)?.is_some())
    }

    /// Equal dimension and equal span of entries.
    pub fn is_isometric(&self, other: &QuasiForm) -> Result<bool> {
        self.same_field(other)?;
        if self.dim() != other.dim() {
            return Ok(false);
        }
        let r1 = self.rank()?;
        let r2 = other.rank()?;
        if r1 != r2 {
            return Ok(false);
        }
        let mut all = self.entries.clone();
        all.extend(other.entries.iter().cloned());
        Ok(self.field.fp_rank(&all)?.0 == r1)
    }

    /// Is `self ⊆ other`, i.e. `other ≅ self ⊥ σ` for some σ?
    pub fn is_subform_of(&self, other: &QuasiForm) -> Result<bool> {
        self.same_field(other)?;
        if self.dim() > other.dim() {
            return Ok(false);
        }
        let r_self = self.rank()?;
        let r_other = other.rank()?;
        if r_other - r_self.min(r_other) > other.dim() - self.dim() {
            return Ok(false);
        }
        let mut all = other.entries.clone();
        all.extend(self.entries.iter().cloned());
        Ok(self.field.fp_rank(&all)?.0 == r_other)
    }

    /// Entries with the given indices.
    pub fn subform(&self, idx: &[usize]) -> QuasiForm {
        QuasiForm { field: self.field.clone(), entries: idx.iter().map(|&i| self.entries[i].clone()).collect() }
    }

    /// Canonical text, e.g. `<1,a,a^2>`.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.entries.iter().map(|e| self.field.render(e)).collect();
        format!("<{}>", parts.join(","))
    }
}

impl fmt::Debug for QuasiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.render(), self.field)
    }
}

impl fmt::Display for QuasiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2ab() -> GroundField {
        GroundField::new(2, &["a", "b"]).unwrap()
    }

    fn form(f: &GroundField, e: &[FieldElem]) -> QuasiForm {
        QuasiForm::new(f, e.to_vec()).unwrap()
    }

    #[test]
    fn normalization_strips_pth_powers() {
        let f = GroundField::new(3, &["t"]).unwrap();
        let t = f.var(0);
        let x = t.pow(4).scale(2); // 2t^4 = 2·t^3·t
        assert_eq!(normalize_entry(&x), t);
        let y = t.div(&t.add(&f.one())).unwrap();
        let n = normalize_entry(&y);
        assert!(n.is_poly());
        assert!(pth_ratio(&n, &y));
        assert_eq!(normalize_entry(&n), n);
    }

    fn pth_ratio(a: &FieldElem, b: &FieldElem) -> bool {
        crate::groundfield::pth_root(&a.div(b).unwrap()).is_ok()
    }

    #[test]
    fn sums_and_products() {
        let f = f2ab();
        let (a, b, one) = (f.var(0), f.var(1), f.one());
        let s = form(&f, &[one.clone(), a.clone()]).orth_sum(&form(&f, std::slice::from_ref(&b))).unwrap();
        assert_eq!(s.entries(), &[one.clone(), a.clone(), b.clone()]);
        let t = form(&f, &[one.clone(), a.clone()]).tensor(&form(&f, &[one.clone(), b.clone()])).unwrap();
        assert_eq!(t.entries(), &[one.clone(), b.clone(), a.clone(), a.mul(&b)]);
        assert_eq!(QuasiForm::zeros(&f, 1).orth_sum(&QuasiForm::zeros(&f, 1)).unwrap().dim(), 2);
    }

    #[test]
    fn scaling() {
        let f = f2ab();
        let (a, b) = (f.var(0), f.var(1));
        let phi = form(&f, std::slice::from_ref(&a));
        assert_eq!(phi.scale(&b.pow(2)).unwrap(), phi);
        let s = form(&f, &[f.one(), a.clone()]).scale(&a).unwrap();
        assert_eq!(s.entries(), &[a.clone(), f.one()]);
        assert!(matches!(phi.scale(&f.zero()), Err(Error::ZeroScalar)));
        assert_eq!(QuasiForm::empty(&f).scale(&a).unwrap().dim(), 0);
    }

    #[test]
    fn quasi_pfister_forms() {
        let f5 = GroundField::new(5, &["a"]).unwrap();
        let a = f5.var(0);
        let pi = QuasiForm::quasi_pfister(&f5, std::slice::from_ref(&a)).unwrap();
        assert_eq!(pi.entries(), &(0..5).map(|k| a.pow(k)).collect::<Vec<_>>()[..]);
        assert_eq!(QuasiForm::quasi_pfister(&f5, &[]).unwrap().entries(), &[f5.one()]);
        let f = f2ab();
        let q = QuasiForm::quasi_pfister(&f, &[f.var(0), f.var(1)]).unwrap();
        assert_eq!(q.dim(), 4);
        assert!(matches!(QuasiForm::quasi_pfister(&f, &[f.zero()]), Err(Error::ZeroSlot)));
    }

    #[test]
    fn diagonalize_examples() {
        let f = GroundField::new(2, &["a"]).unwrap();
        let (one, a) = (f.one(), f.var(0));
        let d = form(&f, &[one.clone(), a.clone(), one.add(&a)]).diagonalize().unwrap();
        assert_eq!(d.defect, 1);
        assert_eq!(d.anisotropic_entries, vec![one.clone(), a.clone()]);
        let g = f2ab();
        assert_eq!(form(&g, &[g.var(0), g.var(1)]).defect().unwrap(), 0);
        let z = form(&g, &[g.one(), g.zero(), g.zero()]).diagonalize().unwrap();
        assert_eq!(z.defect, 2);
    }

    #[test]
    fn isometry_examples() {
        let f = f2ab();
        let (a, b) = (f.var(0), f.var(1));
        assert!(form(&f, &[a.clone(), b.clone()]).is_isometric(&form(&f, &[a.add(&b), b.clone()])).unwrap());
        let f5 = GroundField::new(5, &["a"]).unwrap();
        let x = f5.var(0);
        assert!(!form(&f5, &[f5.one(), x.clone()]).is_isometric(&form(&f5, &[f5.one(), x.pow(2)])).unwrap());
        assert!(form(&f, &[f.one(), f.zero()]).is_isometric(&form(&f, &[f.one(), f.one()])).unwrap());
    }

    #[test]
    fn representation_examples() {
        let f = GroundField::new(2, &["a"]).unwrap();
        let a = f.var(0);
        let phi = form(&f, &[f.one(), a.clone()]);
        assert_eq!(phi.represents(&f.one().add(&a)).unwrap(), Some(vec![f.one(), f.one()]));
        let f5 = GroundField::new(5, &["a"]).unwrap();
        let x = f5.var(0);
        let psi = form(&f5, &[f5.one(), x.clone(), x.pow(2)]);
        assert_eq!(psi.represents(&x.pow(3)).unwrap(), None);
        assert!(psi.represents(&f5.zero()).unwrap().is_some());
    }

    #[test]
    fn subform_examples() {
        let f = f2ab();
        let (a, b, one) = (f.var(0), f.var(1), f.one());
        let pi = QuasiForm::quasi_pfister(&f, &[a.clone(), b.clone()]).unwrap();
        assert!(form(&f, &[one.clone(), a.clone()]).is_subform_of(&pi).unwrap());
        let g = GroundField::new(2, &["a"]).unwrap();
        let phi = form(&g, &[g.one(), g.zero()]);
        let psi = form(&g, &[g.one(), g.var(0)]);
        assert!(!phi.is_subform_of(&psi).unwrap());
        assert!(pi.is_subform_of(&pi).unwrap());
        assert!(QuasiForm::empty(&f).is_subform_of(&pi).unwrap());
    }

    #[test]
    fn field_mismatch() {
        let f = f2ab();
        let g = GroundField::new(3, &["a", "b"]).unwrap();
        let x = QuasiForm::new(&f, vec![f.one()]).unwrap();
        let y = QuasiForm::new(&g, vec![g.one()]).unwrap();
        assert!(matches!(x.orth_sum(&y), Err(Error::FieldMismatch)));
        let h = GroundField::new(2, &["a"]).unwrap();
        assert!(matches!(QuasiForm::new(&h, vec![f.var(1)]), Err(Error::FieldMismatch)));
    }
}
