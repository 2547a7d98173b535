//! F^p-linear algebra on Frobenius coordinates.
//!
//! An element `f = n/d` becomes the column of coordinates of the polynomial
//! `n·d^{p-1}`; these are polynomials in `u = t^p`, which we store in the same
//! variables as `t`. Elimination is fraction-free (Bareiss) over F_p[u].

use std::collections::BTreeMap;

use super::elem::FieldElem;
use super::frobenius::{cleared_numerator, frob_poly};
use super::gcd::gcd;
use super::poly::{Mono, Poly};
use crate::{Error, Result};

/// Polynomial coordinates of `f·d^p` where `d` is the denominator of `f`.
pub(crate) fn coords_of(f: &FieldElem) -> Vec<(Mono, Poly)> {
    if f.is_zero() {
        return Vec::new();
    }
    frob_poly(&cleared_numerator(f))
}

/// Dense matrix over F_p[u] assembled from sparse coordinate columns.
pub(crate) fn matrix_from_columns(p: u32, cols: &[Vec<(Mono, Poly)>]) -> Vec<Vec<Poly>> {
    let mut index: BTreeMap<Mono, usize> = BTreeMap::new();
    for col in cols {
        for (l, _) in col {
            let n = index.len();
            index.entry(*l).or_insert(n);
        }
    }
    let mut mat = vec![vec![Poly::zero(p); cols.len()]; index.len()];
    for (j, col) in cols.iter().enumerate() {
        for (l, h) in col {
            mat[index[l]][j] = h.clone();
        }
    }
    mat
}

/// Row echelon form: `pivots[k]` is the column of the pivot in row `k`.
pub(crate) struct Echelon {
    pub mat: Vec<Vec<Poly>>,
    pub pivots: Vec<usize>,
    /// Column j of `mat` equals the original column j divided by `col_scale[j]`.
    pub col_scale: Vec<Mono>,
    pub ncols: usize,
    p: u32,
}

fn check_cap(q: &Poly, cap: usize) -> Result<()> {
    if q.len() > cap {
        Err(Error::ResourceLimit { terms: q.len(), cap })
    } else {
        Ok(())
    }
}

pub(crate) fn echelon(p: u32, mut mat: Vec<Vec<Poly>>, ncols: usize, cap: usize) -> Result<Echelon> {
    // Strip monomial content from rows and columns; neither changes rank and
    // column scaling is undone when reading kernels.
    for row in mat.iter_mut() {
        let mut g: Option<Mono> = None;
        for q in row.iter().filter(|q| !q.is_zero()) {
            let c = q.monomial_content();
            g = Some(match g {
                None => c,
                Some(x) => x.gcd(c),
            });
        }
        if let Some(g) = g.filter(|g| !g.is_one()) {
            let d = Poly::monomial(p, g, 1);
            for q in row.iter_mut() {
                *q = q.exact_div(&d).expect("monomial content");
            }
        }
    }
    let mut col_scale = vec![Mono::ONE; ncols];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        let mut g: Option<Mono> = None;
        for row in mat.iter() {
            if !row[j].is_zero() {
                let c = row[j].monomial_content();
                g = Some(match g {
                    None => c,
                    Some(x) => x.gcd(c),
                });
            }
        }
        if let Some(g) = g.filter(|g| !g.is_one()) {
            let d = Poly::monomial(p, g, 1);
            for row in mat.iter_mut() {
                row[j] = row[j].exact_div(&d).expect("monomial content");
            }
            *scale = g;
        }
    }

    let nrows = mat.len();
    let mut pivots = Vec::new();
    let mut prev = Poly::one(p);
    let mut r = 0usize;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let best = (r..nrows)
            .filter(|&i| !mat[i][c].is_zero())
            .min_by_key(|&i| (mat[i][c].len(), mat[i][c].total_degree(), i));
        let Some(best) = best else { continue };
        mat.swap(r, best);
        pivots.push(c);
        let piv = mat[r][c].clone();
        let (top, bottom) = mat.split_at_mut(r + 1);
        let prow = &top[r];
        for row in bottom.iter_mut() {
            let a = std::mem::replace(&mut row[c], Poly::zero(p));
            for k in c + 1..ncols {
                let v = if a.is_zero() {
                    if row[k].is_zero() {
                        continue;
                    }
                    piv.mul(&row[k])
                } else {
                    piv.mul(&row[k]).sub(&a.mul(&prow[k]))
                };
                let v = if prev.is_one() {
                    v
                } else {
                    v.exact_div(&prev).expect("Bareiss division is exact")
                };
                check_cap(&v, cap)?;
                row[k] = v;
            }
        }
        prev = piv;
        r += 1;
    }
    Ok(Echelon { mat, pivots, col_scale, ncols, p })
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.ncols];
        for &c in &self.pivots {
            is_piv[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_piv[c]).collect()
    }

    /// Kernel vector with a 1 in free column `f` and zeros in other free
    /// columns, expressed for the original (unscaled) matrix.
    pub fn kernel_vector(&self, f: usize) -> Vec<FieldElem> {
        let p = self.p;
        let mut x: Vec<FieldElem> = vec![FieldElem::zero(p); self.ncols];
        x[f] = FieldElem::one(p);
        for k in (0..self.pivots.len()).rev() {
            let c = self.pivots[k];
            let mut acc = FieldElem::zero(p);
            for (j, xj) in x.iter().enumerate().skip(c + 1) {
                if !xj.is_zero() && !self.mat[k][j].is_zero() {
                    acc = acc.add(&FieldElem::from_poly(self.mat[k][j].clone()).mul(xj));
                }
            }
            if !acc.is_zero() {
                let piv = FieldElem::from_poly(self.mat[k][c].clone());
                x[c] = acc.neg().div(&piv).expect("pivot is nonzero");
            }
        }
        for (j, s) in self.col_scale.iter().enumerate() {
            if !s.is_one() && !x[j].is_zero() {
                x[j] = x[j].div(&FieldElem::monomial(p, *s)).expect("monomial is nonzero");
            }
        }
        x
    }

    pub fn kernel(&self) -> Vec<Vec<FieldElem>> {
        self.free_columns().into_iter().map(|f| self.kernel_vector(f)).collect()
    }
}

/// Kernel over F_p(u) of a matrix given by rows.
pub(crate) fn kernel_of_rows(p: u32, rows: Vec<Vec<Poly>>, ncols: usize, cap: usize) -> Result<Vec<Vec<FieldElem>>> {
    if rows.is_empty() {
        return Ok((0..ncols)
            .map(|f| {
                let mut v = vec![FieldElem::zero(p); ncols];
                v[f] = FieldElem::one(p);
                v
            })
            .collect());
    }
    let ech = echelon(p, rows, ncols, cap)?;
    Ok(ech.kernel())
}

/// Strip p-th power factors from each element and the common polynomial
/// factor from all of them. Linear dependencies over F^p are unchanged.
fn reduce_content(p: u32, elems: &[FieldElem]) -> Vec<FieldElem> {
    let polys: Vec<Poly> = elems
        .iter()
        .map(|e| if e.is_zero() { Poly::zero(p) } else { crate::qform::normalize_entry(e).numer().clone() })
        .collect();
    let mut g = Poly::zero(p);
    for q in &polys {
        g = gcd(&g, q);
        if g.is_one() {
            break;
        }
    }
    polys
        .into_iter()
        .map(|q| {
            if g.is_one() || q.is_zero() {
                FieldElem::from_poly(q)
            } else {
                FieldElem::from_poly(q.exact_div(&g).expect("gcd divides"))
            }
        })
        .collect()
}

/// Rank of the F^p-span and the greedy left-to-right basis.
pub fn fp_rank(elems: &[FieldElem], cap: usize) -> Result<(usize, Vec<usize>)> {
    let Some(p) = elems.first().map(|e| e.p()) else {
        return Ok((0, Vec::new()));
    };
    let elems = reduce_content(p, elems);
    let cols: Vec<_> = elems.iter().map(coords_of).collect();
    let mat = matrix_from_columns(p, &cols);
    if mat.is_empty() {
        return Ok((0, Vec::new()));
    }
    let ech = echelon(p, mat, elems.len(), cap)?;
    Ok((ech.rank(), ech.pivots.clone()))
}

/// `[F^p(elems) : F^p] = p^r`, with `r` read off as the F-rank of the
/// differentials. `n·d^{p-1}` has differential `d^p·d(n/d)`, so the cleared
/// numerator stands in for each element.
pub fn p_rank(elems: &[FieldElem], nvars: usize, cap: usize) -> Result<usize> {
    let Some(p) = elems.first().map(|e| e.p()) else {
        return Ok(0);
    };
    let rows: Vec<Vec<Poly>> = elems
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| {
            let n = cleared_numerator(e);
            (0..nvars).map(|v| n.derivative(v)).collect()
        })
        .filter(|r: &Vec<Poly>| r.iter().any(|q| !q.is_zero()))
        .collect();
    if rows.is_empty() || nvars == 0 {
        return Ok(0);
    }
    Ok(echelon(p, rows, nvars, cap)?.rank())
}

/// Rank over F of a matrix of field elements.
pub fn f_rank(rows: &[Vec<FieldElem>], cap: usize) -> Result<usize> {
    let Some(p) = rows.iter().flatten().next().map(|e| e.p()) else {
        return Ok(0);
    };
    let ncols = rows[0].len();
    let mut mat = Vec::with_capacity(rows.len());
    for row in rows {
        let mut l = Poly::one(p);
        for x in row.iter().filter(|x| !x.denom().is_one()) {
            l = super::gcd::lcm(&l, x.denom());
        }
        let r: Vec<Poly> = row
            .iter()
            .map(|x| if x.is_zero() { Poly::zero(p) } else { x.numer().mul(&l.exact_div(x.denom()).expect("lcm is a multiple")) })
            .collect();
        if r.iter().any(|q| !q.is_zero()) {
            mat.push(r);
        }
    }
    if mat.is_empty() || ncols == 0 {
        return Ok(0);
    }
    Ok(echelon(p, mat, ncols, cap)?.rank())
}

/// Relations: each returned `y` satisfies `Σ y_i^p elems_i = 0`; together
/// they span all relations over F^p.
pub fn fp_relations(elems: &[FieldElem], cap: usize) -> Result<Vec<Vec<FieldElem>>> {
    let Some(p) = elems.first().map(|e| e.p()) else {
        return Ok(Vec::new());
    };
    let cols: Vec<_> = elems.iter().map(coords_of).collect();
    let mat = matrix_from_columns(p, &cols);
    let kernel = kernel_of_rows(p, mat, elems.len(), cap)?;
    Ok(kernel
        .into_iter()
        .map(|z| {
            z.iter()
                .zip(elems)
                .map(|(zi, e)| zi.mul(&FieldElem::from_poly(e.denom().clone())))
                .collect()
        })
        .collect())
}

/// Solve `target = Σ x_i^p basis_i`; returns the `x_i`.
pub fn fp_solve(target: &FieldElem, basis: &[FieldElem], cap: usize) -> Result<Vec<FieldElem>> {
    let p = target.p();
    if target.is_zero() {
        return Ok(vec![FieldElem::zero(p); basis.len()]);
    }
    let mut cols: Vec<_> = basis.iter().map(coords_of).collect();
    cols.push(coords_of(target));
    let n = cols.len();
    let mat = matrix_from_columns(p, &cols);
    let ech = echelon(p, mat, n, cap)?;
    if ech.pivots.contains(&(n - 1)) {
        return Err(Error::NoSolution);
    }
    let x = ech.kernel_vector(n - 1);
    // Σ x_i H_i + x_T H_T = 0, so H_T = Σ (-x_i/x_T) H_i; undo the cleared denominators.
    let dt = FieldElem::from_poly(target.denom().clone()).mul(&x[n - 1]);
    Ok(basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if x[i].is_zero() {
                FieldElem::zero(p)
            } else {
                x[i].neg()
                    .mul(&FieldElem::from_poly(b.denom().clone()))
                    .div(&dt)
                    .expect("denominator is nonzero")
            }
        })
        .collect())
}
