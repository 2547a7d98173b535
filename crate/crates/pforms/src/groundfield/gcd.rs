//! Multivariate gcd over F_p by recursive primitive remainder sequences.

use super::poly::{Mono, Poly, MAX_VARS};

/// Monic gcd of two polynomials. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let p = a.p();
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(p);
    }
    if a == b {
        return a.monic();
    }
    if a.is_monomial() || b.is_monomial() {
        let g = a.monomial_content().gcd(b.monomial_content());
        return Poly::monomial(p, g, 1);
    }
    // Pull the shared monomial factor so the recursion sees fewer variables
    // in the common case of entries differing by a monomial.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(mb);
    if !ma.is_one() || !mb.is_one() {
        let a1 = a.exact_div(&Poly::monomial(p, ma, 1)).expect("monomial content");
        let b1 = b.exact_div(&Poly::monomial(p, mb, 1)).expect("monomial content");
        return gcd(&a1, &b1).mul_term(mg, 1).monic();
    }
    let mask_a = a.var_mask();
    let mask_b = b.var_mask();
    if mask_a & mask_b == 0 {
        // Disjoint variable sets: any common factor lies in F_p.
        return Poly::one(p);
    }
    // A variable missing from one side: the gcd divides the other's content.
    if let Some(v) = (0..MAX_VARS).find(|&i| (mask_a ^ mask_b) & (1 << i) != 0) {
        return if mask_a & (1 << v) == 0 { gcd(a, &content_in(b, v)) } else { gcd(&content_in(a, v), b) };
    }
    // Shortest remainder sequence: eliminate the variable of lowest degree.
    let v = (0..MAX_VARS)
        .filter(|&i| mask_a & (1 << i) != 0)
        .min_by_key(|&i| a.degree_in(i).max(b.degree_in(i)))
        .unwrap();
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let g = gcd(&ca, &cb);
    let mut x = a.exact_div(&ca).expect("content divides");
    let mut y = b.exact_div(&cb).expect("content divides");
    if x.degree_in(v) < y.degree_in(v) {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        let r = pseudo_rem(&x, &y, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            y = Poly::one(p);
            break;
        }
        x = y;
        y = primitive_part(&r, v);
    }
    g.mul(&primitive_part(&y, v)).monic()
}

/// Gcd of the coefficients of `a` viewed as a polynomial in `v`.
pub fn content_in(a: &Poly, v: usize) -> Poly {
    let coeffs = a.coeffs_in(v);
    let mut nonzero: Vec<&Poly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| c.len());
    let mut g = Poly::zero(a.p());
    for c in nonzero {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

pub fn primitive_part(a: &Poly, v: usize) -> Poly {
    if a.is_zero() {
        return a.clone();
    }
    let c = content_in(a, v);
    a.exact_div(&c).expect("content divides")
}

/// Pseudo-remainder of `a` by `b` in the variable `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeffs_in(v)[dr as usize].clone();
        let shift = Mono::var(v, dr - db);
        r = lb.mul(&r).sub(&lr.mul(b).mul_term(shift, 1));
    }
    r
}

/// Least common multiple, monic.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero(a.p());
    }
    let g = gcd(a, b);
    a.exact_div(&g).expect("gcd divides").mul(b).monic()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(p: u32, i: usize) -> Poly {
        Poly::monomial(p, Mono::var(i, 1), 1)
    }

    #[test]
    fn recovers_planted_factor() {
        let p = 3;
        let (a, b, c) = (var(p, 0), var(p, 1), var(p, 2));
        let one = Poly::one(p);
        let g = a.mul(&b).add(&c).add(&one); // ab + c + 1
        let u = a.add(&b.mul(&b)).add(&one.scale(2));
        let w = c.mul(&a).add(&b);
        let x = g.mul(&u);
        let y = g.mul(&w);
        assert_eq!(gcd(&x, &y), g.monic());
    }

    #[test]
    fn coprime_inputs() {
        let p = 2;
        let (a, b) = (var(p, 0), var(p, 1));
        let x = a.add(&Poly::one(p));
        let y = b.add(&a.mul(&b)).add(&Poly::one(p));
        assert!(gcd(&x, &y).is_one());
    }

    #[test]
    fn char_p_powers() {
        let p = 5;
        let a = var(p, 0);
        let x = a.add(&Poly::one(p)).pow(5); // a^5 + 1
        let y = a.add(&Poly::one(p)).pow(2);
        assert_eq!(gcd(&x, &y), a.add(&Poly::one(p)).pow(2));
    }

    #[test]
    fn monomial_factors() {
        let p = 7;
        let (a, b) = (var(p, 0), var(p, 1));
        let x = a.mul(&a).mul(&b).mul(&a.add(&b));
        let y = a.mul(&b).mul(&b).mul(&a.add(&b)).scale(3);
        assert_eq!(gcd(&x, &y), a.mul(&b).mul(&a.add(&b)));
    }
}
