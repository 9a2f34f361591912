//! Truncated Novikov series over a prime field, with the valuation used by action filtrations.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NovikovError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("ground fields differ: F_{0} vs F_{1}")]
    FieldMismatch(u32, u32),
    #[error("the zero scalar has no inverse")]
    InvertZero,
    #[error("the zero scalar has no leading term")]
    ZeroLeadingTerm,
    #[error("inversion order {order} must exceed {bound}")]
    OrderTooLow { order: String, bound: String },
    #[error("period group generators must be strictly positive")]
    NonPositiveGenerator,
    #[error("period group generated by {0} is dense")]
    DenseGroup(String),
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// A prime field F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField(u32);

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, NovikovError> {
        let prime = p >= 2 && (2..).take_while(|d: &u64| d * d <= p as u64).all(|d| !(p as u64).is_multiple_of(d));
        if prime {
            Ok(Self(p))
        } else {
            Err(NovikovError::NotPrime(p as u64))
        }
    }

    pub fn f2() -> Self {
        Self(2)
    }

    pub fn p(self) -> u32 {
        self.0
    }

    pub fn reduce(self, c: i64) -> u32 {
        c.rem_euclid(self.0 as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.0 as u64 - b as u64) % self.0 as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Inverse of a nonzero element by Fermat's little theorem.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0));
        let (mut base, mut e, mut acc) = (a as u64 % self.0 as u64, self.0 as u64 - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.0 as u64;
            }
            base = base * base % self.0 as u64;
            e >>= 1;
        }
        acc as u32
    }
}

/// An extended rational: a finite value or +∞.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Q),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Valuation::Finite(q) => Some(q),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn plus(&self, other: &Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }

    pub fn plus_q(&self, q: &Q) -> Valuation {
        match self {
            Valuation::Finite(a) => Valuation::Finite(a + q),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    fn admits(&self, e: &Q) -> bool {
        match self {
            Valuation::Finite(t) => e < t,
            Valuation::Infinite => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(q) => write!(f, "{}", rational::format(q)),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Discrete subgroup Γ of ℝ given by positive rational generators; empty means Γ = {0}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PeriodGroup {
    generators: Vec<Q>,
}

impl PeriodGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn new(generators: Vec<Q>) -> Result<Self, NovikovError> {
        if generators.iter().any(|g| !g.is_positive()) {
            return Err(NovikovError::NonPositiveGenerator);
        }
        Ok(Self { generators })
    }

    /// Builds Γ from real generators, expressing each as a rational multiple of the first.
    /// Irrational ratios (no convergent with denominator up to 10^4 within 10^-12) are rejected as dense.
    pub fn from_reals(gens: &[f64]) -> Result<Self, NovikovError> {
        if gens.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(NovikovError::NonPositiveGenerator);
        }
        let Some(&base) = gens.first() else {
            return Ok(Self::trivial());
        };
        let base_q = rational::snap_default(base);
        let mut out = Vec::with_capacity(gens.len());
        for &g in gens {
            let r = g / base;
            match rational::approximate(r, 10_000) {
                Some((h, k)) if ((h as f64 / k as f64) - r).abs() <= 1e-12 * r.max(1.0) => {
                    out.push(base_q * Q::new(h, k));
                }
                _ => return Err(NovikovError::DenseGroup(format!("{gens:?}"))),
            }
        }
        Self::new(out)
    }

    pub fn generators(&self) -> &[Q] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// Positive generator g of Γ = gℤ, or `None` for Γ = {0}.
    pub fn step(&self) -> Option<Q> {
        let mut it = self.generators.iter();
        let first = *it.next()?;
        Some(it.fold(first, |acc, g| rational::gcd(&acc, g)))
    }

    pub fn contains(&self, x: &Q) -> bool {
        match self.step() {
            Some(g) => rational::is_multiple(x, &g),
            None => x.is_zero(),
        }
    }

    /// Representative of `x + Γ` in the fundamental domain `[0, g)`.
    pub fn reduce(&self, x: &Q) -> Q {
        match self.step() {
            Some(g) => rational::rem_period(x, &g),
            None => *x,
        }
    }
}

/// A finite sum Σ f_j T^{a_j} with f_j ∈ F_p, known below its truncation order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NovikovScalar {
    field: PrimeField,
    terms: Vec<(Q, u32)>,
    trunc: Valuation,
}

impl NovikovScalar {
    /// Builds a scalar from arbitrary terms; sorts, merges, drops zeros and terms at or above `trunc`.
    pub fn new(field: PrimeField, terms: impl IntoIterator<Item = (Q, i64)>, trunc: Valuation) -> Self {
        let raw = terms.into_iter().map(|(e, c)| (e, field.reduce(c))).collect();
        Self::canonical(field, raw, trunc)
    }

    pub fn zero(field: PrimeField) -> Self {
        Self { field, terms: Vec::new(), trunc: Valuation::Infinite }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::monomial(field, 1, Q::zero())
    }

    pub fn monomial(field: PrimeField, coeff: i64, exponent: Q) -> Self {
        Self::new(field, [(exponent, coeff)], Valuation::Infinite)
    }

    /// The zero series known only below `trunc`, i.e. O(T^trunc).
    pub fn big_o(field: PrimeField, trunc: Q) -> Self {
        Self { field, terms: Vec::new(), trunc: Valuation::Finite(trunc) }
    }

    fn canonical(field: PrimeField, mut raw: Vec<(Q, u32)>, trunc: Valuation) -> Self {
        raw.sort_by_key(|a| a.0);
        let mut terms: Vec<(Q, u32)> = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            match terms.last_mut() {
                Some(last) if last.0 == e => last.1 = field.add(last.1, c),
                _ => terms.push((e, c)),
            }
        }
        terms.retain(|(e, c)| *c != 0 && trunc.admits(e));
        Self { field, terms, trunc }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn terms(&self) -> &[(Q, u32)] {
        &self.terms
    }

    pub fn truncation(&self) -> &Valuation {
        &self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some((e, _)) => Valuation::Finite(*e),
            None => Valuation::Infinite,
        }
    }

    pub fn leading_term(&self) -> Result<(Q, u32), NovikovError> {
        self.terms.first().cloned().ok_or(NovikovError::ZeroLeadingTerm)
    }

    /// Re-normalizes; canonical form is a fixed point.
    pub fn normalized(&self) -> Self {
        Self::canonical(self.field, self.terms.clone(), self.trunc.clone())
    }

    /// Drops every term at or above `order`.
    pub fn truncate(&self, order: &Valuation) -> Self {
        let trunc = order.clone().min(self.trunc.clone());
        Self::canonical(self.field, self.terms.clone(), trunc)
    }

    fn check(&self, other: &Self) -> Result<(), NovikovError> {
        if self.field != other.field {
            Err(NovikovError::FieldMismatch(self.field.p(), other.field.p()))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, NovikovError> {
        self.check(other)?;
        let raw = self.terms.iter().chain(&other.terms).cloned().collect();
        let trunc = self.trunc.clone().min(other.trunc.clone());
        Ok(Self::canonical(self.field, raw, trunc))
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.neg(1))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NovikovError> {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: u32) -> Self {
        let raw = self.terms.iter().map(|(e, f)| (*e, self.field.mul(*f, c))).collect();
        Self::canonical(self.field, raw, self.trunc.clone())
    }

    /// Multiplies by T^shift.
    pub fn shift(&self, shift: &Q) -> Self {
        Self {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (e + shift, *c)).collect(),
            trunc: self.trunc.plus_q(shift),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, NovikovError> {
        self.check(other)?;
        let trunc = self
            .valuation()
            .plus(&other.trunc)
            .min(other.valuation().plus(&self.trunc));
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                let e = a + b;
                if trunc.admits(&e) {
                    raw.push((e, self.field.mul(*f, *g)));
                }
            }
        }
        Ok(Self::canonical(self.field, raw, trunc))
    }

    /// Returns y with x·y ≡ 1 mod T^{order + ν(x)}, via leading-term division and a geometric series.
    pub fn invert(&self, order: &Q) -> Result<Self, NovikovError> {
        let (a, f) = self.leading_term().map_err(|_| NovikovError::InvertZero)?;
        let bound = -a;
        if *order <= bound {
            return Err(NovikovError::OrderTooLow {
                order: rational::format(order),
                bound: rational::format(&bound),
            });
        }
        let field = self.field;
        let finv = field.inv(f);
        // x = f T^a (1 + w) with ν(w) > 0; 1/(1+w) = Σ (-w)^n.
        let unit = self.shift(&-a).scale(finv);
        let target = Valuation::Finite(order + a).min(unit.trunc.clone());
        let minus_w = unit.sub(&Self::one(field))?.neg().truncate(&target);
        let mut sum = Self::one(field).truncate(&target);
        let mut power = Self::one(field).truncate(&target);
        if let Some(step) = minus_w.valuation().finite().cloned() {
            let mut reached = Q::zero();
            while Valuation::Finite(reached + step) < target {
                power = power.mul(&minus_w)?.truncate(&target);
                sum = sum.add(&power)?;
                reached += step;
            }
        }
        Ok(sum.truncate(&target).shift(&-a).scale(finv))
    }

    /// Equality of the parts both operands know, i.e. below the smaller truncation order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let t = self.trunc.clone().min(other.trunc.clone());
        self.field == other.field && self.truncate(&t).terms == other.truncate(&t).terms
    }

    pub fn parse(field: PrimeField, s: &str) -> Result<Self, NovikovError> {
        let err = || NovikovError::Parse(s.to_string());
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero(field));
        }
        let mut raw = Vec::new();
        let mut trunc = Valuation::Infinite;
        for piece in split_terms(s) {
            let piece = piece.trim();
            if let Some(inner) = piece.strip_prefix("O(T^").and_then(|r| r.strip_suffix(')')) {
                trunc = Valuation::Finite(rational::parse(inner).ok_or_else(err)?);
                continue;
            }
            let (coeff, exp) = match piece.split_once("T^") {
                Some((c, e)) => {
                    let c = c.trim();
                    let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| err())? };
                    (c, rational::parse(e).ok_or_else(err)?)
                }
                None => (piece.parse::<i64>().map_err(|_| err())?, Q::zero()),
            };
            raw.push((exp, field.reduce(coeff)));
        }
        Ok(Self::canonical(field, raw, trunc))
    }
}

fn split_terms(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'+' && i > 0 && !matches!(bytes[i - 1], b'e' | b'E') {
            out.push(&s[start..i]);
            start = i + 1;
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c} T^{}", rational::format(e)))
            .collect();
        if let Valuation::Finite(t) = &self.trunc {
            parts.push(format!("O(T^{})", rational::format(t)));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d)
    }

    fn f2() -> PrimeField {
        PrimeField::f2()
    }

    #[test]
    fn valuation_examples() {
        let x = NovikovScalar::new(f2(), [(q(1, 2), 1), (q(6, 5), 1)], Valuation::Infinite);
        assert_eq!(x.valuation(), Valuation::Finite(q(1, 2)));
        assert_eq!(NovikovScalar::zero(f2()).valuation(), Valuation::Infinite);
        let y = NovikovScalar::new(f2(), [(q(-1, 1), 1), (q(0, 1), 1)], Valuation::Infinite);
        assert_eq!(y.valuation(), Valuation::Finite(q(-1, 1)));
    }

    #[test]
    fn add_examples() {
        let one = NovikovScalar::one(f2());
        assert!(one.add(&one).unwrap().is_zero());
        let a = NovikovScalar::monomial(f2(), 1, q(1, 2));
        let b = NovikovScalar::monomial(f2(), 1, q(6, 5));
        assert_eq!(a.add(&b).unwrap().to_string(), "1 T^1/2 + 1 T^6/5");
        let c = NovikovScalar::new(f2(), [(q(0, 1), 1), (q(1, 1), 1)], Valuation::Infinite);
        assert_eq!(c.add(&NovikovScalar::monomial(f2(), 1, q(1, 1))).unwrap(), one);
    }

    #[test]
    fn add_rejects_mixed_fields() {
        let f3 = PrimeField::new(3).unwrap();
        let err = NovikovScalar::one(f2()).add(&NovikovScalar::one(f3)).unwrap_err();
        assert_eq!(err, NovikovError::FieldMismatch(2, 3));
    }

    #[test]
    fn add_takes_smaller_truncation() {
        let a = NovikovScalar::new(f2(), [(q(0, 1), 1)], Valuation::Finite(q(3, 1)));
        let b = NovikovScalar::new(f2(), [(q(1, 1), 1)], Valuation::Finite(q(2, 1)));
        assert_eq!(*a.add(&b).unwrap().truncation(), Valuation::Finite(q(2, 1)));
    }

    #[test]
    fn mul_examples() {
        let a = NovikovScalar::monomial(f2(), 1, q(1, 3));
        let b = NovikovScalar::monomial(f2(), 1, q(1, 2));
        assert_eq!(a.mul(&b).unwrap(), NovikovScalar::monomial(f2(), 1, q(5, 6)));
        assert_eq!(a.mul(&NovikovScalar::one(f2())).unwrap(), a);
        let c = NovikovScalar::new(f2(), [(q(0, 1), 1), (q(1, 1), 1)], Valuation::Infinite);
        let sq = NovikovScalar::new(f2(), [(q(0, 1), 1), (q(2, 1), 1)], Valuation::Infinite);
        assert_eq!(c.mul(&c).unwrap(), sq);
    }

    #[test]
    fn mul_truncation_rule() {
        let x = NovikovScalar::new(f2(), [(q(1, 1), 1)], Valuation::Finite(q(4, 1)));
        let y = NovikovScalar::new(f2(), [(q(2, 1), 1)], Valuation::Finite(q(3, 1)));
        // min(1 + 3, 2 + 4) = 4
        assert_eq!(*x.mul(&y).unwrap().truncation(), Valuation::Finite(q(4, 1)));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(NovikovScalar::one(f2()).invert(&q(5, 1)).unwrap().terms(), &[(q(0, 1), 1)]);
        let t = NovikovScalar::monomial(f2(), 1, q(3, 2));
        assert_eq!(t.invert(&q(1, 1)).unwrap().terms(), &[(q(-3, 2), 1)]);
        let x = NovikovScalar::new(f2(), [(q(0, 1), 1), (q(1, 1), 1)], Valuation::Infinite);
        let y = x.invert(&q(3, 1)).unwrap();
        assert_eq!(y.terms(), &[(q(0, 1), 1), (q(1, 1), 1), (q(2, 1), 1)]);
        // multiply back by hand: (1 + T)(1 + T + T^2) = 1 + T^3 over F_2
        let back = x.mul(&y).unwrap();
        assert_eq!(back.terms(), &[(q(0, 1), 1)]);
        assert_eq!(*back.truncation(), Valuation::Finite(q(3, 1)));
    }

    #[test]
    fn invert_over_f5_with_offset() {
        let f5 = PrimeField::new(5).unwrap();
        let x = NovikovScalar::new(f5, [(q(-1, 1), 2), (q(0, 1), 1)], Valuation::Infinite);
        let y = x.invert(&q(4, 1)).unwrap();
        let back = x.mul(&y).unwrap();
        assert_eq!(back.terms(), &[(q(0, 1), 1)]);
        assert_eq!(*back.truncation(), Valuation::Finite(q(3, 1)));
    }

    #[test]
    fn invert_zero_fails() {
        assert_eq!(NovikovScalar::zero(f2()).invert(&q(1, 1)), Err(NovikovError::InvertZero));
    }

    #[test]
    fn leading_term_examples() {
        let x = NovikovScalar::new(f2(), [(q(6, 5), 1), (q(1, 2), 1)], Valuation::Infinite);
        assert_eq!(x.leading_term().unwrap(), (q(1, 2), 1));
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(NovikovScalar::monomial(f5, 3, q(-2, 1)).leading_term().unwrap(), (q(-2, 1), 3));
        assert!(NovikovScalar::zero(f2()).leading_term().is_err());
    }

    #[test]
    fn text_round_trip() {
        let f7 = PrimeField::new(7).unwrap();
        let x = NovikovScalar::new(f7, [(q(-3, 4), 3), (q(2, 1), 6)], Valuation::Finite(q(5, 2)));
        let s = x.to_string();
        assert_eq!(s, "3 T^-3/4 + 6 T^2 + O(T^5/2)");
        assert_eq!(NovikovScalar::parse(f7, &s).unwrap(), x);
        assert_eq!(NovikovScalar::parse(f7, "0").unwrap(), NovikovScalar::zero(f7));
        assert!(NovikovScalar::parse(f7, "x T^1").is_err());
    }

    #[test]
    fn prime_field_checks() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert_eq!(PrimeField::new(7).unwrap().inv(3), 5);
    }

    #[test]
    fn period_groups() {
        let g = PeriodGroup::new(vec![q(1, 2), q(3, 4)]).unwrap();
        assert_eq!(g.step(), Some(q(1, 4)));
        assert!(g.contains(&q(-5, 4)));
        assert!(!g.contains(&q(1, 3)));
        assert!(PeriodGroup::new(vec![q(-1, 1)]).is_err());
        assert!(PeriodGroup::from_reals(&[1.0, 1.618033988749895]).is_err());
        let r = PeriodGroup::from_reals(&[0.5, 1.5]).unwrap();
        assert_eq!(r.generators(), &[q(1, 2), q(3, 2)]);
        assert_eq!(PeriodGroup::trivial().step(), None);
        assert_eq!(g.reduce(&q(-1, 8)), q(1, 8));
    }
}
