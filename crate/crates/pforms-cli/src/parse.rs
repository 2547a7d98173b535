//! Recursive-descent parser for fields, elements and forms.
//!
//! ```text
//! field := "p=" prime (";vars=" ident ("," ident)*)?
//! form  := term (("+" | "⊥") term)*
//! term  := scalar? "*"? atom ("*" atom)*
//! atom  := "<" elems ">" | "<<" elems ">>" | "(" form ")" | binding
//! elem  := "-"? prod (("+" | "-") prod)*
//! prod  := pow (("*" | "/") pow)*
//! pow   := base ("^" "-"? digits)?
//! base  := digits | variable | "(" elem ")"
//! ```
//!
//! Positions in errors count characters from the start of the input.

use std::collections::BTreeMap;

use pforms::groundfield::MAX_DEGREE;
use pforms::{FieldElem, GroundField, QuasiForm};

use crate::error::{CliError, Result};

/// Cap on the total degree of a parsed element, well below what monomials hold.
const DEGREE_LIMIT: u32 = MAX_DEGREE / 8;

pub fn parse_field(desc: &str) -> Result<GroundField> {
    let mut p = Cursor::new(desc);
    p.expect_word("p")?;
    p.expect('=')?;
    let start = p.pos;
    let prime = p.digits()?.ok_or_else(|| CliError::parse(start, "expected a prime"))?;
    let prime: u32 = prime.try_into().map_err(|_| CliError::parse(start, "prime is too large"))?;
    if !pforms::groundfield::is_prime(prime) {
        return Err(CliError::parse(start, format!("{prime} is not prime")));
    }
    let mut vars: Vec<String> = Vec::new();
    if p.eat(';') {
        p.expect_word("vars")?;
        p.expect('=')?;
        loop {
            let at = p.peek_pos();
            let name = p.ident().ok_or_else(|| CliError::parse(at, "expected a variable name"))?;
            if vars.contains(&name) {
                return Err(CliError::parse(at, format!("duplicate variable {name:?}")));
            }
            vars.push(name);
            if !p.eat(',') {
                break;
            }
        }
    }
    p.end()?;
    GroundField::new(prime, &vars).map_err(|e| CliError::parse(0, e.to_string()))
}

pub fn parse_form(expr: &str, field: &GroundField) -> Result<QuasiForm> {
    parse_form_with(expr, field, &BTreeMap::new())
}

pub fn parse_form_with(expr: &str, field: &GroundField, bindings: &BTreeMap<String, QuasiForm>) -> Result<QuasiForm> {
    let mut p = FormParser { c: Cursor::new(expr), field, bindings };
    let q = p.form()?;
    p.c.end()?;
    Ok(q)
}

pub fn parse_elem(expr: &str, field: &GroundField) -> Result<FieldElem> {
    let bindings = BTreeMap::new();
    let mut p = FormParser { c: Cursor::new(expr), field, bindings: &bindings };
    let x = p.elem()?;
    p.c.end()?;
    Ok(x)
}

/// Split on commas that are not inside parentheses.
pub fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out
}

pub fn is_ident(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && it.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(s: &str) -> Cursor {
        Cursor { chars: s.chars().collect(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn peek_pos(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn peek2(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos + 1).copied()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {ch:?}")))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<()> {
        let at = self.peek_pos();
        match self.ident() {
            Some(x) if x == w => Ok(()),
            _ => Err(CliError::parse(at, format!("expected {w:?}"))),
        }
    }

    fn unexpected(&mut self, what: &str) -> CliError {
        let at = self.peek_pos();
        match self.chars.get(at) {
            Some(c) => CliError::parse(at, format!("{what}, found {c:?}")),
            None => CliError::parse(at, format!("{what}, found end of input")),
        }
    }

    fn end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            Err(self.unexpected("expected end of input"))
        } else {
            Ok(())
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        let first = *self.chars.get(start)?;
        if !(first.is_ascii_alphabetic() || first == '_') {
            return None;
        }
        let mut end = start + 1;
        while self.chars.get(end).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
            end += 1;
        }
        self.pos = end;
        Some(self.chars[start..end].iter().collect())
    }

    fn digits(&mut self) -> Result<Option<u64>> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while self.chars.get(end).is_some_and(|c| c.is_ascii_digit()) {
            end += 1;
        }
        if end == start {
            return Ok(None);
        }
        self.pos = end;
        let s: String = self.chars[start..end].iter().collect();
        s.parse().map(Some).map_err(|_| CliError::parse(start, "number is too large"))
    }
}

struct FormParser<'a> {
    c: Cursor,
    field: &'a GroundField,
    bindings: &'a BTreeMap<String, QuasiForm>,
}

impl FormParser<'_> {
    fn form(&mut self) -> Result<QuasiForm> {
        let mut acc = self.term()?;
        while self.c.eat('+') || self.c.eat('⊥') {
            let t = self.term()?;
            acc = acc.orth_sum(&t)?;
        }
        Ok(acc)
    }

    /// Does an atom start here? `(` counts only if a whole form follows.
    fn atom_ahead(&mut self) -> bool {
        match self.c.peek() {
            Some('<') => true,
            Some('(') => {
                let save = self.c.pos;
                self.c.pos += 1;
                let ok = self.form().is_ok() && self.c.eat(')');
                self.c.pos = save;
                ok
            }
            Some(ch) if ch.is_ascii_alphabetic() || ch == '_' => {
                let save = self.c.pos;
                let name = self.c.ident();
                self.c.pos = save;
                name.is_some_and(|n| self.bindings.contains_key(&n))
            }
            _ => false,
        }
    }

    /// `k x` in front of a term repeats it k times, as in `2 x <0>`.
    fn multiplicity(&mut self) -> Result<Option<(u64, usize)>> {
        let save = self.c.pos;
        let at = self.c.peek_pos();
        if let Some(k) = self.c.digits()? {
            // with a variable named x, `2x*<1>` stays a scalar term
            let x_is_var = self.field.var_index("x").is_some();
            if self.c.ident().as_deref() == Some("x")
                && (self.atom_ahead() || (!x_is_var && self.c.peek().is_some_and(|c| c != '+')))
            {
                return Ok(Some((k, at)));
            }
        }
        self.c.pos = save;
        Ok(None)
    }

    fn term(&mut self) -> Result<QuasiForm> {
        let Some((k, at)) = self.multiplicity()? else {
            return self.simple_term();
        };
        if k == 0 || k > 4096 {
            return Err(CliError::parse(at, "multiplicity must be between 1 and 4096"));
        }
        let t = self.simple_term()?;
        let mut acc = t.clone();
        for _ in 1..k {
            acc = acc.orth_sum(&t)?;
        }
        Ok(acc)
    }

    fn simple_term(&mut self) -> Result<QuasiForm> {
        let scalar = if self.atom_ahead() { None } else { Some(self.scalar()?) };
        if scalar.is_some() {
            self.c.eat('*');
        }
        let mut acc = self.atom()?;
        while self.c.peek() == Some('*') {
            let save = self.c.pos;
            self.c.pos += 1;
            if !self.atom_ahead() {
                self.c.pos = save;
                return Err(self.c.unexpected("expected a form after '*'"));
            }
            let a = self.atom()?;
            acc = acc.tensor(&a)?;
        }
        match scalar {
            Some(s) => Ok(acc.scale(&s).map_err(|_| CliError::Math(pforms::Error::ZeroScalar))?),
            None => Ok(acc),
        }
    }

    /// A product of factors that stops before `*` when a form follows.
    fn scalar(&mut self) -> Result<FieldElem> {
        let neg = self.c.eat('-');
        let mut acc = self.pow()?;
        loop {
            match self.c.peek() {
                Some('*') => {
                    let save = self.c.pos;
                    self.c.pos += 1;
                    let form_next = self.atom_ahead();
                    self.c.pos = save;
                    if form_next {
                        break;
                    }
                    self.c.pos += 1;
                    let at = self.c.peek_pos();
                    let x = self.pow()?;
                    acc = self.guarded_mul(&acc, &x, at)?;
                }
                Some('/') => {
                    self.c.pos += 1;
                    let at = self.c.peek_pos();
                    let x = self.pow()?;
                    acc = acc.div(&x).map_err(|_| CliError::parse(at, "division by zero"))?;
                }
                _ => break,
            }
        }
        Ok(if neg { acc.neg() } else { acc })
    }

    fn atom(&mut self) -> Result<QuasiForm> {
        let at = self.c.peek_pos();
        match self.c.peek() {
            Some('<') if self.c.peek2() == Some('<') => {
                self.c.pos += 2;
                let slots = self.elem_list('>')?;
                self.c.expect('>')?;
                self.c.expect('>')?;
                QuasiForm::quasi_pfister(self.field, &slots).map_err(|_| CliError::parse(at, "quasi-Pfister slots must be nonzero"))
            }
            Some('<') => {
                self.c.pos += 1;
                let entries = self.elem_list('>')?;
                self.c.expect('>')?;
                Ok(QuasiForm::new(self.field, entries)?)
            }
            Some('(') => {
                self.c.pos += 1;
                let q = self.form()?;
                self.c.expect(')')?;
                Ok(q)
            }
            Some(ch) if ch.is_ascii_alphabetic() || ch == '_' => {
                let name = self.c.ident().expect("identifier");
                self.bindings
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| CliError::parse(at, format!("unknown form binding {name:?}")))
            }
            _ => Err(self.c.unexpected("expected a form")),
        }
    }

    fn elem_list(&mut self, close: char) -> Result<Vec<FieldElem>> {
        let mut out = Vec::new();
        if self.c.peek() == Some(close) {
            return Ok(out);
        }
        loop {
            out.push(self.elem()?);
            if !self.c.eat(',') {
                return Ok(out);
            }
        }
    }

    fn elem(&mut self) -> Result<FieldElem> {
        let neg = self.c.eat('-');
        let mut acc = self.prod()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.c.eat('+') {
                acc = acc.add(&self.prod()?);
            } else if self.c.peek() == Some('-') {
                self.c.pos += 1;
                acc = acc.sub(&self.prod()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn prod(&mut self) -> Result<FieldElem> {
        let mut acc = self.pow()?;
        loop {
            let at = self.c.peek_pos();
            if self.c.eat('*') {
                let x = self.pow()?;
                acc = self.guarded_mul(&acc, &x, at)?;
            } else if self.c.eat('/') {
                let at = self.c.peek_pos();
                let x = self.pow()?;
                acc = acc.div(&x).map_err(|_| CliError::parse(at, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn guarded_mul(&self, a: &FieldElem, b: &FieldElem, at: usize) -> Result<FieldElem> {
        if degree(a) + degree(b) > DEGREE_LIMIT {
            return Err(CliError::parse(at, "degree too large"));
        }
        Ok(a.mul(b))
    }

    fn pow(&mut self) -> Result<FieldElem> {
        let base = self.base()?;
        if !self.c.eat('^') {
            return Ok(base);
        }
        let at = self.c.peek_pos();
        let neg = self.c.eat('-');
        let e = self.c.digits()?.ok_or_else(|| CliError::parse(at, "expected an exponent"))?;
        if e.saturating_mul(degree(&base) as u64) > DEGREE_LIMIT as u64 {
            return Err(CliError::parse(at, "degree too large"));
        }
        let x = base.pow(e as u32);
        if neg {
            x.inv().map_err(|_| CliError::parse(at, "division by zero"))
        } else {
            Ok(x)
        }
    }

    fn base(&mut self) -> Result<FieldElem> {
        let at = self.c.peek_pos();
        match self.c.peek() {
            Some('(') => {
                self.c.pos += 1;
                let x = self.elem()?;
                self.c.expect(')')?;
                Ok(x)
            }
            Some(ch) if ch.is_ascii_digit() => {
                let n = self.c.digits()?.expect("digits");
                Ok(self.field.constant((n % self.field.p() as u64) as i64))
            }
            Some(ch) if ch.is_ascii_alphabetic() || ch == '_' => {
                let name = self.c.ident().expect("identifier");
                self.field
                    .var_index(&name)
                    .map(|i| self.field.var(i))
                    .ok_or_else(|| CliError::parse(at, format!("unknown variable {name:?}")))
            }
            _ => Err(self.c.unexpected("expected an element")),
        }
    }
}

fn degree(x: &FieldElem) -> u32 {
    x.numer().total_degree().max(x.denom().total_degree())
}
