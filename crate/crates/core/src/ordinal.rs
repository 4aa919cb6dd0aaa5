//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An ordinal is stored as a strictly decreasing list of terms `w^e * c`
//! with `c >= 1`. The representation is unique, so derived equality and
//! hashing agree with ordinal equality. The text syntax is the one printed
//! by [`Display`](std::fmt::Display): `w^2*3 + w + 5`, `w^(w+1)`, `0`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub exp: Ordinal,
    pub coeff: u64,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Zero,
    Successor,
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exp: Self::zero(),
                    coeff: n,
                }],
            }
        }
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    /// `w`.
    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `w^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal {
            terms: vec![Term { exp: e, coeff: 1 }],
        }
    }

    /// Builds from `(exponent, coefficient)` pairs; they must already be in
    /// normal form.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self, Error> {
        for t in &terms {
            if t.coeff == 0 {
                return Err(Error::InvalidOrdinal("zero coefficient".into()));
            }
        }
        for w in terms.windows(2) {
            if w[0].exp <= w[1].exp {
                return Err(Error::InvalidOrdinal("exponents must strictly decrease".into()));
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kind(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some(t) if t.exp.is_zero() => Kind::Successor,
            Some(_) => Kind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.kind() == Kind::Limit
    }

    pub fn is_successor(&self) -> bool {
        self.kind() == Kind::Successor
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coeff),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    /// Exponent of the leading term; zero for the ordinal zero.
    pub fn leading_exponent(&self) -> Ordinal {
        self.terms.first().map(|t| t.exp.clone()).unwrap_or_default()
    }

    /// The finite part (coefficient of `w^0`).
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(t) if t.exp.is_zero() => t.coeff,
            _ => 0,
        }
    }

    pub fn successor(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    pub fn add_nat(&self, n: u64) -> Ordinal {
        self.add(&Ordinal::nat(n))
    }

    /// Predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        if last.coeff == 1 {
            terms.pop();
        } else {
            last.coeff -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Ordinal sum; terms of `self` below the leading term of `rhs` are absorbed.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(head) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let mut merged = None;
        for t in &self.terms {
            match t.exp.cmp(&head.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    merged = Some(t.coeff);
                    break;
                }
                Ordering::Less => break,
            }
        }
        let mut rest = rhs.terms.iter();
        let first = rest.next().unwrap();
        terms.push(Term {
            exp: first.exp.clone(),
            coeff: first.coeff + merged.unwrap_or(0),
        });
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// `self * n` for a natural number `n`.
    pub fn mul_nat(&self, n: u64) -> Ordinal {
        if n == 0 || self.is_zero() {
            return Ordinal::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].coeff *= n;
        Ordinal { terms }
    }

    /// `w^e * b`.
    pub fn omega_pow_mul(e: &Ordinal, b: &Ordinal) -> Ordinal {
        Ordinal {
            terms: b
                .terms
                .iter()
                .map(|t| Term {
                    exp: e.add(&t.exp),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }

    /// The unique `c` with `self + c == other`, when `self <= other`.
    pub fn left_subtract(&self, other: &Ordinal) -> Option<Ordinal> {
        if self > other {
            return None;
        }
        let mut i = 0;
        while i < self.terms.len() && self.terms[i] == other.terms[i] {
            i += 1;
        }
        if i == self.terms.len() {
            return Some(Ordinal {
                terms: other.terms[i..].to_vec(),
            });
        }
        let (a, b) = (&self.terms[i], &other.terms[i]);
        let mut terms = Vec::new();
        if a.exp == b.exp {
            terms.push(Term {
                exp: b.exp.clone(),
                coeff: b.coeff - a.coeff,
            });
            terms.extend(other.terms[i + 1..].iter().cloned());
        } else {
            terms.extend(other.terms[i..].iter().cloned());
        }
        Some(Ordinal { terms })
    }

    /// Writes `self = w * alpha + k` and returns `(alpha, k)`.
    pub fn div_omega(&self) -> (Ordinal, u64) {
        let one = Ordinal::one();
        let terms = self
            .terms
            .iter()
            .filter(|t| !t.exp.is_zero())
            .map(|t| Term {
                exp: one.left_subtract(&t.exp).unwrap(),
                coeff: t.coeff,
            })
            .collect();
        (Ordinal { terms }, self.finite_part())
    }

    /// The `n`-th term of the standard fundamental sequence of a limit.
    ///
    /// For `d + w^(b+1)` this is `d + w^b * n`; for `d + w^b` with `b` a
    /// limit it is `d + w^(b[n])`.
    pub fn fundamental(&self, n: u64) -> Result<Ordinal, Error> {
        if !self.is_limit() {
            return Err(Error::NotLimit(self.to_string()));
        }
        let mut prefix = self.terms.clone();
        let last = prefix.pop().unwrap();
        if last.coeff > 1 {
            prefix.push(Term {
                exp: last.exp.clone(),
                coeff: last.coeff - 1,
            });
        }
        let delta = Ordinal { terms: prefix };
        let tail = match last.exp.predecessor() {
            Some(b) => Ordinal::omega_pow(b).mul_nat(n),
            None => Ordinal::omega_pow(last.exp.fundamental(n)?),
        };
        Ok(delta.add(&tail))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let c = a.exp.cmp(&b.exp).then(a.coeff.cmp(&b.coeff));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            write!(f, "w")?;
            match t.exp.as_nat() {
                Some(1) => {}
                Some(k) => write!(f, "^{k}")?,
                None if t.exp == Ordinal::omega() => write!(f, "^w")?,
                None => write!(f, "^({})", t.exp)?,
            }
            if t.coeff > 1 {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    s: &'a [char],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::InvalidOrdinal(format!("{msg} at offset {}", self.pos))
    }

    fn nat(&mut self) -> Result<u64, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let text: String = self.s[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.err("number out of range"))
    }

    fn sum(&mut self) -> Result<Ordinal, Error> {
        let mut acc = self.term()?;
        while self.eat('+') {
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, Error> {
        match self.peek() {
            Some('w') | Some('ω') => {
                self.pos += 1;
                let exp = if self.eat('^') {
                    self.exponent()?
                } else {
                    Ordinal::one()
                };
                let coeff = if self.eat('*') { self.nat()? } else { 1 };
                Ok(Ordinal::omega_pow(exp).mul_nat(coeff))
            }
            Some('(') => {
                self.pos += 1;
                let o = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(o)
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(self.nat()?)),
            _ => Err(self.err("expected a term")),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, Error> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let o = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(o)
            }
            Some('w') | Some('ω') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            _ => Ok(Ordinal::nat(self.nat()?)),
        }
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let chars: Vec<char> = s.chars().collect();
        let mut p = Parser { s: &chars, pos: 0 };
        let o = p.sum()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(o)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn absorption() {
        assert_eq!(Ordinal::one().add(&Ordinal::omega()), Ordinal::omega());
        assert_eq!(o("w + 3").add(&o("w^2")), o("w^2"));
        assert_eq!(o("w*2 + 1").add(&o("w")), o("w*3"));
    }

    #[test]
    fn fundamental_examples() {
        assert_eq!(Ordinal::omega().fundamental(3).unwrap(), Ordinal::nat(3));
        assert_eq!(o("w^2").fundamental(2).unwrap(), o("w*2"));
        assert_eq!(o("w^w").fundamental(4).unwrap(), o("w^4"));
        assert_eq!(o("w^2 + w").fundamental(5).unwrap(), o("w^2 + 5"));
        assert!(Ordinal::nat(3).fundamental(1).is_err());
    }

    #[test]
    fn printing() {
        for s in ["0", "7", "w", "w*2 + 1", "w^2*3 + w + 5", "w^w", "w^(w + 1)*2 + w^3"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o("ω^2").to_string(), "w^2");
        assert_eq!(o("w^(2)").to_string(), "w^2");
    }

    #[test]
    fn classification() {
        assert_eq!(Ordinal::zero().kind(), Kind::Zero);
        assert_eq!(o("w + 1").kind(), Kind::Successor);
        assert_eq!(o("w^2*2").kind(), Kind::Limit);
    }

    #[test]
    fn helpers() {
        assert_eq!(o("w + 1").left_subtract(&o("w*2")), Some(o("w")));
        assert_eq!(o("w").left_subtract(&o("w + 3")), Some(o("3")));
        assert_eq!(o("w^2").left_subtract(&o("w")), None);
        assert_eq!(o("w^2*3 + w*2 + 5").div_omega(), (o("w*3 + 2"), 5));
        assert_eq!(Ordinal::omega_pow_mul(&o("1"), &o("w + 2")), o("w^2 + w*2"));
        assert_eq!(o("w*2").mul_nat(3), o("w*6"));
        assert_eq!(o("w + 2").predecessor(), Some(o("w + 1")));
    }
}
