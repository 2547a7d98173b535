//! Canonical rational functions over F_p.

use super::gcd::gcd;
use super::poly::{mod_inv, Mono, Poly};
use crate::{Error, Result};

/// An element `num/den` of F_p(t_1..t_m) with `gcd(num, den) = 1` and
/// `den` monic under grlex. Zero is stored as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    num: Poly,
    den: Poly,
}

impl FieldElem {
    pub fn zero(p: u32) -> FieldElem {
        FieldElem { num: Poly::zero(p), den: Poly::one(p) }
    }

    pub fn one(p: u32) -> FieldElem {
        FieldElem::from_poly(Poly::one(p))
    }

    pub fn constant(p: u32, c: u32) -> FieldElem {
        FieldElem::from_poly(Poly::constant(p, c))
    }

    pub fn monomial(p: u32, m: Mono) -> FieldElem {
        FieldElem::from_poly(Poly::monomial(p, m, 1))
    }

    pub fn from_poly(num: Poly) -> FieldElem {
        let p = num.p();
        FieldElem { num, den: Poly::one(p) }
    }

    /// Canonicalize an arbitrary fraction.
    pub fn new(num: Poly, den: Poly) -> Result<FieldElem> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElem::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> FieldElem {
        let p = num.p();
        if num.is_zero() {
            return FieldElem::zero(p);
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
            }
        };
        let lc = den.lead_coeff();
        if lc == 1 {
            FieldElem { num, den }
        } else {
            let inv = mod_inv(lc, p);
            FieldElem { num: num.scale(inv), den: den.scale(inv) }
        }
    }

    pub fn p(&self) -> u32 {
        self.num.p()
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// The value if this element lies in F_p.
    pub fn as_constant(&self) -> Option<u32> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let n = self.num.add(&other.num);
            if self.den.is_one() {
                return FieldElem::from_poly(n);
            }
            return FieldElem::reduce(n, self.den.clone());
        }
        let n = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        FieldElem::reduce(n, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        let p = self.p();
        if self.is_zero() || other.is_zero() {
            return FieldElem::zero(p);
        }
        if self.den.is_one() && other.den.is_one() {
            return FieldElem::from_poly(self.num.mul(&other.num));
        }
        // Cross-cancel before multiplying to keep the pieces small.
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let a = self.num.exact_div(&g1).expect("gcd divides");
        let d = other.den.exact_div(&g1).expect("gcd divides");
        let c = other.num.exact_div(&g2).expect("gcd divides");
        let b = self.den.exact_div(&g2).expect("gcd divides");
        let num = a.mul(&c);
        let den = b.mul(&d);
        let lc = den.lead_coeff();
        let inv = mod_inv(lc, p);
        FieldElem { num: num.scale(inv), den: den.scale(inv) }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.p();
        let lc = self.num.lead_coeff();
        let inv = mod_inv(lc, p);
        Ok(FieldElem { num: self.den.scale(inv), den: self.num.scale(inv) })
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        if e == 0 {
            return FieldElem::one(self.p());
        }
        // Powers of a reduced fraction stay reduced.
        FieldElem { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, e: i64) -> Result<FieldElem> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    /// `self^p`. Coefficients in F_p are fixed, so only exponents change.
    pub fn frobenius(&self) -> FieldElem {
        FieldElem { num: self.num.frobenius(), den: self.den.frobenius() }
    }

    pub fn scale(&self, c: u32) -> FieldElem {
        FieldElem::reduce(self.num.scale(c), self.den.clone())
    }

    /// Partial derivative in variable `v`.
    pub fn derivative(&self, v: usize) -> FieldElem {
        let dn = self.num.derivative(v);
        if self.den.is_one() {
            return FieldElem::from_poly(dn);
        }
        let dd = self.den.derivative(v);
        FieldElem::reduce(dn.mul(&self.den).sub(&self.num.mul(&dd)), self.den.mul(&self.den))
    }

    /// Substitute `t_i -> t_i^{scales[i]}` in numerator and denominator.
    pub fn inflate(&self, scales: &[u32]) -> FieldElem {
        FieldElem::reduce(self.num.inflate(scales), self.den.inflate(scales))
    }
}
