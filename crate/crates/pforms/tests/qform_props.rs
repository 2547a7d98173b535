mod common;

use common::*;
use pforms::{FieldElem, GroundField, QuasiForm};
use proptest::prelude::*;

/// Apply elementary isometries: swaps, `a_i ↦ x^p a_i`, `a_i ↦ a_i + x^p a_j`.
fn isometric_copy(phi: &QuasiForm, ops: &[(usize, usize, u8, FieldElem)]) -> QuasiForm {
    let mut e = phi.entries().to_vec();
    let n = e.len();
    for (i, j, kind, x) in ops {
        let (i, j) = (i % n, j % n);
        match kind % 3 {
            0 => e.swap(i, j),
            1 if !x.is_zero() => e[i] = e[i].mul(&x.frobenius()),
            _ if i != j => e[i] = e[i].add(&x.frobenius().mul(&e[j])),
            _ => {}
        }
    }
    QuasiForm::new(phi.field(), e).unwrap()
}

fn ops(f: &GroundField) -> BoxedStrategy<Vec<(usize, usize, u8, FieldElem)>> {
    prop::collection::vec((0usize..8, 0usize..8, 0u8..3, elem(f, 2)), 0..6).boxed()
}

/// `ψ ⊆ φ` by brute force: look for entries of φ that complete ψ to φ.
fn subform_oracle(psi: &QuasiForm, phi: &QuasiForm) -> bool {
    let (k, n) = (psi.dim(), phi.dim());
    if k > n {
        return false;
    }
    let f = phi.field();
    (0u32..1 << n).filter(|m| m.count_ones() as usize <= n - k).any(|mask| {
        let mut chi: Vec<FieldElem> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| phi.entries()[i].clone()).collect();
        chi.resize(n - k, f.zero());
        psi.orth_sum(&QuasiForm::new(f, chi).unwrap()).unwrap().is_isometric(phi).unwrap()
    })
}

fn with<T: std::fmt::Debug + Clone + 'static>(s: impl Fn(&GroundField) -> BoxedStrategy<T> + 'static) -> BoxedStrategy<(GroundField, T)> {
    small_fields()
        .prop_flat_map(move |f| {
            let g = f.clone();
            s(&f).prop_map(move |t| (g.clone(), t))
        })
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isometry_is_an_equivalence((_f, (phi, o1, o2)) in with(|f| (form(f, 1..=4, 2), ops(f), ops(f)).boxed())) {
        let psi = isometric_copy(&phi, &o1);
        let chi = isometric_copy(&psi, &o2);
        prop_assert!(phi.is_isometric(&phi).unwrap());
        prop_assert!(phi.is_isometric(&psi).unwrap());
        prop_assert!(psi.is_isometric(&phi).unwrap());
        prop_assert!(psi.is_isometric(&chi).unwrap());
        prop_assert!(phi.is_isometric(&chi).unwrap());
    }

    #[test]
    fn isometry_is_symmetric((_f, (phi, psi)) in with(|f| (form(f, 1..=3, 2), form(f, 1..=3, 2)).boxed())) {
        prop_assert_eq!(phi.is_isometric(&psi).unwrap(), psi.is_isometric(&phi).unwrap());
    }

    #[test]
    fn scaling_by_inverse_restores((_f, (phi, c)) in with(|f| (form(f, 1..=4, 2), fraction(f)).boxed())) {
        let back = phi.scale(&c).unwrap().scale(&c.inv().unwrap()).unwrap();
        prop_assert!(back.is_isometric(&phi).unwrap());
    }

    #[test]
    fn tensor_distributes((_f, (a, b, c)) in with(|f| (form(f, 1..=2, 2), form(f, 1..=2, 2), form(f, 1..=2, 2)).boxed())) {
        let lhs = a.tensor(&b.orth_sum(&c).unwrap()).unwrap();
        let rhs = a.tensor(&b).unwrap().orth_sum(&a.tensor(&c).unwrap()).unwrap();
        prop_assert!(lhs.is_isometric(&rhs).unwrap());
    }

    #[test]
    fn represented_values_give_subforms((f, (phi, coeffs)) in with(|f| (form(f, 1..=4, 2), prop::collection::vec(elem(f, 1), 4)).boxed())) {
        let v = phi.entries().iter().zip(&coeffs).fold(f.zero(), |acc, (a, x)| acc.add(&x.frobenius().mul(a)));
        prop_assume!(!v.is_zero());
        let w = phi.represents(&v).unwrap();
        prop_assert!(w.is_some());
        let w = w.unwrap();
        let back = phi.entries().iter().zip(&w).fold(f.zero(), |acc, (a, x)| acc.add(&x.frobenius().mul(a)));
        prop_assert_eq!(back, v.clone());
        prop_assert!(QuasiForm::new(&f, vec![v]).unwrap().is_subform_of(&phi).unwrap());
    }

    #[test]
    fn sum_substitution((f, (a, b)) in with(|f| (nonzero(f, 2), nonzero(f, 2)).boxed())) {
        let lhs = QuasiForm::new(&f, vec![a.clone(), b.clone()]).unwrap();
        let rhs = QuasiForm::new(&f, vec![a.add(&b), b]).unwrap();
        prop_assert!(lhs.is_isometric(&rhs).unwrap());
    }

    #[test]
    fn pth_power_multiples((f, (a, x)) in with(|f| (nonzero(f, 2), fraction(f)).boxed())) {
        let lhs = QuasiForm::new(&f, vec![a.clone()]).unwrap();
        let rhs = QuasiForm::new(&f, vec![a.mul(&x.frobenius())]).unwrap();
        prop_assert!(lhs.is_isometric(&rhs).unwrap());
    }

    #[test]
    fn subform_matches_brute_force((f, (phi, picks, extra)) in with(|f| (
        form(f, 1..=4, 2),
        prop::collection::vec(prop::collection::vec(0u32..3, 4), 1..=3),
        prop::option::of(nonzero(f, 2)),
    ).boxed())) {
        // ψ built mostly from F_p-combinations of φ's entries, sometimes with
        // a foreign entry, so both answers occur.
        let mut psi: Vec<FieldElem> = picks
            .iter()
            .map(|c| phi.entries().iter().zip(c).fold(f.zero(), |acc, (a, &k)| acc.add(&a.scale(k % f.p()))))
            .collect();
        if let Some(x) = extra {
            psi[0] = x;
        }
        let psi = QuasiForm::new(&f, psi).unwrap();
        prop_assert_eq!(psi.is_subform_of(&phi).unwrap(), subform_oracle(&psi, &phi));
    }

    #[test]
    fn anisotropic_part_is_isometric_up_to_zeros((_f, phi) in with(|f| form(f, 1..=5, 2))) {
        let an = phi.anisotropic_part().unwrap();
        prop_assert!(an.is_anisotropic().unwrap());
        prop_assert_eq!(an.dim() + phi.defect().unwrap(), phi.dim());
        let padded = an.orth_sum(&QuasiForm::zeros(phi.field(), phi.defect().unwrap())).unwrap();
        prop_assert!(padded.is_isometric(&phi).unwrap());
    }
}
