//! The ground field F = F_p(t_1..t_m) and everything needed to compute in it:
//! canonical fractions, Frobenius coordinates, and F^p-linear algebra.

mod elem;
mod frobenius;
pub mod gcd;
mod linalg;
mod poly;

use std::fmt;
use std::sync::Arc;

pub use elem::FieldElem;
pub(crate) use frobenius::cleared_numerator;
pub use frobenius::{frobenius_decompose, pth_root, FrobCoords};
pub(crate) use linalg::{coords_of, kernel_of_rows};
pub use linalg::{f_rank, fp_rank, fp_relations, fp_solve, p_rank};
pub use poly::{Mono, Poly, MAX_DEGREE, MAX_VARS};

use crate::{Error, Result};

/// Default cap on the number of terms any intermediate polynomial may hold.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// F_p(t_1..t_m) with a fixed variable order.
#[derive(Clone)]
pub struct GroundField {
    p: u32,
    vars: Arc<[String]>,
    term_cap: usize,
}

impl PartialEq for GroundField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.vars == other.vars
    }
}

impl Eq for GroundField {}

impl fmt::Debug for GroundField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroundField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}({})", self.p, self.vars.join(","))
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn valid_ident(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && it.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl GroundField {
    pub fn new<S: AsRef<str>>(p: u32, vars: &[S]) -> Result<GroundField> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > 31 {
            return Err(Error::InvalidField(format!("p = {p} exceeds the supported range 2..=31")));
        }
        if vars.len() > MAX_VARS {
            return Err(Error::InvalidField(format!("at most {MAX_VARS} variables are supported")));
        }
        let names: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if !valid_ident(n) {
                return Err(Error::InvalidField(format!("invalid variable name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidField(format!("duplicate variable {n:?}")));
            }
        }
        Ok(GroundField { p, vars: names.into(), term_cap: DEFAULT_TERM_CAP })
    }

    pub fn with_term_cap(mut self, cap: usize) -> GroundField {
        self.term_cap = cap;
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn term_cap(&self) -> usize {
        self.term_cap
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::zero(self.p)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::one(self.p)
    }

    pub fn constant(&self, c: i64) -> FieldElem {
        FieldElem::constant(self.p, c.rem_euclid(self.p as i64) as u32)
    }

    /// The i-th generator.
    pub fn var(&self, i: usize) -> FieldElem {
        assert!(i < self.vars.len(), "variable index out of range");
        FieldElem::monomial(self.p, Mono::var(i, 1))
    }

    pub fn var_named(&self, name: &str) -> Result<FieldElem> {
        self.var_index(name)
            .map(|i| self.var(i))
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Monomial `t^e` from an exponent slice.
    pub fn monomial(&self, exps: &[u32]) -> FieldElem {
        FieldElem::monomial(self.p, Mono::from_exps(exps))
    }

    pub fn elem_arith(&self, a: &FieldElem, b: &FieldElem, op: ArithOp) -> Result<FieldElem> {
        match op {
            ArithOp::Add => Ok(a.add(b)),
            ArithOp::Sub => Ok(a.sub(b)),
            ArithOp::Mul => Ok(a.mul(b)),
            ArithOp::Div => a.div(b),
        }
    }

    pub fn fp_rank(&self, elems: &[FieldElem]) -> Result<(usize, Vec<usize>)> {
        fp_rank(elems, self.term_cap)
    }

    pub fn fp_solve(&self, target: &FieldElem, basis: &[FieldElem]) -> Result<Vec<FieldElem>> {
        fp_solve(target, basis, self.term_cap)
    }

    pub fn fp_relations(&self, elems: &[FieldElem]) -> Result<Vec<Vec<FieldElem>>> {
        fp_relations(elems, self.term_cap)
    }

    /// `r` with `[F^p(elems) : F^p] = p^r`.
    pub fn p_rank(&self, elems: &[FieldElem]) -> Result<usize> {
        p_rank(elems, self.nvars(), self.term_cap)
    }

    pub fn f_rank(&self, rows: &[Vec<FieldElem>]) -> Result<usize> {
        f_rank(rows, self.term_cap)
    }

    /// Is `x` in the F^p-span of `basis`?
    pub fn in_span(&self, x: &FieldElem, basis: &[FieldElem]) -> Result<bool> {
        match self.fp_solve(x, basis) {
            Ok(_) => Ok(true),
            Err(Error::NoSolution) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn render_poly(&self, q: &Poly) -> String {
        if q.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, &(m, c)) in q.terms().iter().enumerate() {
            if k > 0 {
                out.push('+');
            }
            let mut factors: Vec<String> = Vec::new();
            if c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (i, name) in self.vars.iter().enumerate() {
                match m.exp(i) {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Canonical rendering: expanded numerator and denominator, grlex
    /// descending, explicit `*` and `^`.
    pub fn render(&self, x: &FieldElem) -> String {
        let n = self.render_poly(x.numer());
        if x.is_poly() {
            n
        } else {
            format!("({})/({})", n, self.render_poly(x.denom()))
        }
    }
}
