mod common;

use common::*;
use pforms::extensions::{
    anisotropic_dim_over, defect_by_derivations, defect_over, insep_splitting_pattern, substitution_defect, weak_vishik, Budget, InsepExtension,
    VishikStatus,
};
use pforms::invariants::norm_field;
use pforms::GroundField;
use proptest::prelude::*;

fn fields() -> impl Strategy<Value = GroundField> {
    prop_oneof![Just(field(2, 3)), Just(field(3, 3)), Just(field(5, 2))]
}

fn with<T: std::fmt::Debug + Clone + 'static>(s: impl Fn(&GroundField) -> BoxedStrategy<T> + 'static) -> BoxedStrategy<(GroundField, T)> {
    fields()
        .prop_flat_map(move |f| {
            let g = f.clone();
            s(&f).prop_map(move |t| (g.clone(), t))
        })
        .boxed()
}

fn var_subset(m: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::sample::subsequence((0..m).collect::<Vec<_>>(), 0..=m)
}

fn small_budget() -> Budget {
    Budget { samples: 4, degree: 1, ..Budget::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensor_defect_matches_substitution((f, (phi, vars)) in with(|f| (form(f, 1..=4, 2), var_subset(f.nvars())).boxed())) {
        let ext = InsepExtension::of_variables(&f, &vars);
        prop_assert_eq!(defect_over(&phi, &ext).unwrap(), substitution_defect(&phi, &ext).unwrap());
    }

    #[test]
    fn derivation_defect_matches_tensor((f, (phi, adj)) in small_fields().prop_flat_map(|f| {
        let g = f.clone();
        (form(&f, 1..=4, 2), prop::collection::vec(nonzero(&f, 2), 1..=2)).prop_map(move |t| (g.clone(), t))
    })) {
        let ext = InsepExtension::new(&f, adj).unwrap();
        prop_assert_eq!(defect_by_derivations(&phi, &ext).unwrap(), defect_over(&phi, &ext).unwrap());
    }

    #[test]
    fn defect_grows_with_the_extension((f, (phi, vars, drop)) in with(|f| (form(f, 1..=4, 2), var_subset(f.nvars()), 0usize..3).boxed())) {
        let big = InsepExtension::of_variables(&f, &vars);
        let mut fewer = vars.clone();
        if !fewer.is_empty() {
            fewer.remove(drop % fewer.len());
        }
        let small = InsepExtension::of_variables(&f, &fewer);
        let trivial = InsepExtension::trivial(&f);
        prop_assert_eq!(defect_over(&phi, &trivial).unwrap(), phi.defect().unwrap());
        prop_assert!(defect_over(&phi, &small).unwrap() <= defect_over(&phi, &big).unwrap());
    }

    #[test]
    fn norm_field_splits_to_dimension_one((f, phi) in with(|f| anisotropic(f, 1..=4, 2))) {
        let nf = norm_field(&phi).unwrap();
        let ext = InsepExtension::new(&f, nf.pbasis().to_vec()).unwrap();
        prop_assert_eq!(anisotropic_dim_over(&phi, &ext).unwrap(), 1);
    }

    #[test]
    fn pattern_has_both_ends((_f, phi) in with(|f| anisotropic(f, 1..=4, 2))) {
        let pat = insep_splitting_pattern(&phi, &small_budget()).unwrap();
        prop_assert!(pat.contains(&1));
        prop_assert!(pat.contains(&phi.dim()));
        prop_assert!(pat.iter().all(|&d| d >= 1 && d <= phi.dim()));
    }

    #[test]
    fn vishik_verdicts_are_sound((f, (phi, psi, c)) in with(|f| (anisotropic(f, 1..=3, 2), anisotropic(f, 1..=3, 2), fraction(f)).boxed())) {
        let b = small_budget();
        let same = weak_vishik(&phi, &phi.scale(&c).unwrap(), &b).unwrap();
        prop_assert_eq!(same.status, VishikStatus::CertifiedEquivalent);
        let v = weak_vishik(&phi, &psi, &b).unwrap();
        if let (Some(w), Some((d1, d2))) = (&v.witness, v.witness_defects) {
            prop_assert_eq!(v.status, VishikStatus::Inequivalent);
            prop_assert_eq!(defect_over(&phi, w).unwrap(), d1);
            prop_assert_eq!(defect_over(&psi, w).unwrap(), d2);
            prop_assert_ne!(d1, d2);
        }
        let _ = f;
    }
}
