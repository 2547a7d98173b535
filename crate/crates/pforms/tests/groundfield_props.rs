mod common;

use common::*;
use pforms::groundfield::gcd::gcd;
use pforms::groundfield::{frobenius_decompose, pth_root, FrobCoords};
use pforms::{FieldElem, GroundField};
use proptest::prelude::*;

/// Rank over F of a matrix of field elements, by plain Gaussian elimination
/// on fractions.
fn naive_rank(mut rows: Vec<Vec<FieldElem>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, piv);
        let inv = rows[rank][c].inv().unwrap();
        for i in rank + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].mul(&inv);
            let (top, bottom) = rows.split_at_mut(i);
            for (k, v) in bottom[0].iter_mut().enumerate().skip(c) {
                *v = v.sub(&factor.mul(&top[rank][k]));
            }
        }
        rank += 1;
    }
    rank
}

/// F^p-rank via Frobenius coordinates: `x ↦ x^p` identifies F with F^p, so
/// the F^p-rank of the elements is the F-rank of their coordinate matrix.
fn oracle_fp_rank(elems: &[FieldElem]) -> usize {
    let coords: Vec<FrobCoords> = elems.iter().map(frobenius_decompose).collect();
    let mut keys: Vec<_> = coords.iter().flat_map(|c| c.iter().map(|(l, _)| l)).collect();
    keys.sort();
    keys.dedup();
    let p = elems[0].p();
    let rows = keys
        .iter()
        .map(|&l| coords.iter().map(|c| c.get(l).cloned().unwrap_or(FieldElem::zero(p))).collect())
        .collect();
    naive_rank(rows)
}

fn field_and_elems(n: usize, terms: usize) -> impl Strategy<Value = (GroundField, Vec<FieldElem>)> {
    small_fields().prop_flat_map(move |f| {
        let g = f.clone();
        prop::collection::vec(elem(&f, terms), n).prop_map(move |e| (g.clone(), e))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gcd_keeps_planted_factors((f, a, b, g) in small_fields().prop_flat_map(|f| {
        let g = f.clone();
        (nonzero(&f, 4), nonzero(&f, 4), nonzero(&f, 3)).prop_map(move |(a, b, c)| (g.clone(), a, b, c))
    })) {
        let (x, y) = (a.numer().mul(g.numer()), b.numer().mul(g.numer()));
        let d = gcd(&x, &y);
        prop_assert!(d.exact_div(g.numer()).is_some(), "planted factor lost");
        let (u, v) = (x.exact_div(&d), y.exact_div(&d));
        prop_assert!(u.is_some() && v.is_some(), "gcd does not divide");
        prop_assert!(gcd(&u.unwrap(), &v.unwrap()).is_one(), "cofactors share a factor");
        prop_assert_eq!(gcd(&y, &x), d);
        let _ = f;
    }

    #[test]
    fn frobenius_round_trip((f, x) in small_fields().prop_flat_map(|f| { let g = f.clone(); fraction(&f).prop_map(move |x| (g.clone(), x)) })) {
        let _ = f;
        prop_assert_eq!(frobenius_decompose(&x).reconstruct(), x);
    }

    #[test]
    fn pth_root_inverts_frobenius((f, x) in small_fields().prop_flat_map(|f| { let g = f.clone(); fraction(&f).prop_map(move |x| (g.clone(), x)) })) {
        let _ = f;
        prop_assert_eq!(pth_root(&x.frobenius()).unwrap(), x.clone());
        if let Ok(r) = pth_root(&x) {
            prop_assert_eq!(r.frobenius(), x);
        }
    }

    #[test]
    fn bareiss_rank_matches_naive_oracle((f, e) in field_and_elems(5, 3)) {
        let nz: Vec<FieldElem> = e.into_iter().filter(|x| !x.is_zero()).collect();
        prop_assume!(!nz.is_empty());
        let (r, pivots) = f.fp_rank(&nz).unwrap();
        prop_assert_eq!(r, oracle_fp_rank(&nz));
        prop_assert_eq!(pivots.len(), r);
    }

    #[test]
    fn rank_is_permutation_invariant((f, e) in field_and_elems(4, 3), rot in 0usize..4) {
        let mut g = e.clone();
        g.rotate_left(rot);
        g.reverse();
        prop_assert_eq!(f.fp_rank(&e).unwrap().0, f.fp_rank(&g).unwrap().0);
    }

    #[test]
    fn solve_agrees_with_rank((f, e) in field_and_elems(4, 2), t in 0usize..4) {
        let basis = &e[..3];
        let target = e[3].mul(&FieldElem::constant(f.p(), t as u32 % f.p()));
        let (rb, _) = f.fp_rank(basis).unwrap();
        let mut all = basis.to_vec();
        all.push(target.clone());
        let (ra, _) = f.fp_rank(&all).unwrap();
        match f.fp_solve(&target, basis) {
            Ok(x) => {
                prop_assert_eq!(ra, rb);
                let back = x.iter().zip(basis).fold(f.zero(), |acc, (xi, b)| acc.add(&xi.frobenius().mul(b)));
                prop_assert_eq!(back, target);
            }
            Err(pforms::Error::NoSolution) => prop_assert_eq!(ra, rb + 1),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn differential_rank_matches_monomial_span((f, e) in field_and_elems(2, 2)) {
        // [F^p(x, y) : F^p] is the F^p-dimension of the monomials x^i y^j.
        let p = f.p();
        let nz: Vec<FieldElem> = e.into_iter().filter(|x| !x.is_zero()).collect();
        let mut monos = vec![f.one()];
        for x in &nz {
            monos = monos.iter().flat_map(|m| (0..p).map(move |i| m.mul(&x.pow(i)))).collect();
        }
        let (r, _) = f.fp_rank(&monos).unwrap();
        let k = f.p_rank(&nz).unwrap();
        prop_assert_eq!(r as u64, (p as u64).pow(k as u32));
    }
}
