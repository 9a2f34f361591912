//! Floer packages: filtered complexes over Λ^Γ with fixed generators, actions and an
//! action-decreasing differential.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::novikov::{NovikovError, NovikovScalar, PeriodGroup, PrimeField, Valuation};
use crate::rational::{self, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("the zero chain has no action")]
    ZeroChain,
    #[error("perturbation size {delta} must be below half the margin {margin}")]
    PerturbationTooLarge { delta: String, margin: String },
    #[error("invalid package: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub label: String,
    pub action: Q,
    pub class: String,
}

impl Generator {
    pub fn new(label: impl Into<String>, action: Q, class: impl Into<String>) -> Self {
        Self { label: label.into(), action, class: class.into() }
    }
}

/// A chain Σ λ_i x_i with zero coefficients omitted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    coefficients: BTreeMap<usize, NovikovScalar>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(i: usize, field: PrimeField) -> Self {
        let mut c = Self::new();
        c.coefficients.insert(i, NovikovScalar::one(field));
        c
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, NovikovScalar)>) -> Result<Self, NovikovError> {
        let mut c = Self::new();
        for (i, s) in terms {
            c.add_term(i, &s)?;
        }
        Ok(c)
    }

    /// Adds `s · x_i`, removing the entry if it cancels.
    pub fn add_term(&mut self, i: usize, s: &NovikovScalar) -> Result<(), NovikovError> {
        let sum = match self.coefficients.get(&i) {
            Some(old) => old.add(s)?,
            None => s.clone(),
        };
        if sum.is_zero() {
            self.coefficients.remove(&i);
        } else {
            self.coefficients.insert(i, sum);
        }
        Ok(())
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, NovikovScalar> {
        &self.coefficients
    }

    pub fn get(&self, i: usize) -> Option<&NovikovScalar> {
        self.coefficients.get(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn add(&self, other: &Chain) -> Result<Chain, NovikovError> {
        let mut out = self.clone();
        for (i, s) in &other.coefficients {
            out.add_term(*i, s)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &NovikovScalar) -> Result<Chain, NovikovError> {
        let mut out = Chain::new();
        for (i, c) in &self.coefficients {
            out.add_term(*i, &c.mul(s)?)?;
        }
        Ok(out)
    }
}

/// Report of the three package conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub d_squared_zero: bool,
    pub action_decreasing: bool,
    pub classes_preserved: bool,
    pub exponents_in_gamma: bool,
    /// Minimal arrow length A(x_i) - A(x_j) + a over all terms; +∞ without arrows.
    pub margin: Valuation,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.d_squared_zero && self.action_decreasing && self.classes_preserved && self.exponents_in_gamma
    }
}

/// Action spectrum per component, reduced modulo Γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpectrum {
    pub period: Option<Q>,
    pub components: BTreeMap<String, BTreeSet<Q>>,
}

/// Difference sets S - S per component, reduced modulo Γ; each representative stands for its Γ-orbit
/// when `period` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceSet {
    pub period: Option<Q>,
    pub components: BTreeMap<String, BTreeSet<Q>>,
}

impl DifferenceSet {
    pub fn contains(&self, class: &str, x: &Q) -> bool {
        let Some(set) = self.components.get(class) else {
            return false;
        };
        match &self.period {
            Some(g) => set.contains(&rational::rem_period(x, g)),
            None => set.contains(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloerPackage {
    field: PrimeField,
    gamma: PeriodGroup,
    generators: Vec<Generator>,
    differential: BTreeMap<(usize, usize), NovikovScalar>,
}

impl FloerPackage {
    /// Assembles a package; repeated `(i, j)` entries are summed and zero entries dropped.
    /// Conditions on the differential are checked by [`FloerPackage::validate`].
    pub fn new(
        field: PrimeField,
        gamma: PeriodGroup,
        generators: Vec<Generator>,
        entries: impl IntoIterator<Item = (usize, usize, NovikovScalar)>,
    ) -> Result<Self, ComplexError> {
        let n = generators.len();
        let mut differential: BTreeMap<(usize, usize), NovikovScalar> = BTreeMap::new();
        for (i, j, s) in entries {
            for idx in [i, j] {
                if idx >= n {
                    return Err(ComplexError::IndexOutOfRange(idx));
                }
            }
            if s.field() != field {
                return Err(NovikovError::FieldMismatch(field.p(), s.field().p()).into());
            }
            let sum = match differential.remove(&(i, j)) {
                Some(old) => old.add(&s)?,
                None => s,
            };
            if !sum.is_zero() {
                differential.insert((i, j), sum);
            }
        }
        Ok(Self { field, gamma, generators, differential })
    }

    /// Builds a package and rejects it unless [`FloerPackage::validate`] passes.
    pub fn new_validated(
        field: PrimeField,
        gamma: PeriodGroup,
        generators: Vec<Generator>,
        entries: impl IntoIterator<Item = (usize, usize, NovikovScalar)>,
    ) -> Result<Self, ComplexError> {
        let p = Self::new(field, gamma, generators, entries)?;
        let report = p.validate();
        if report.is_valid() {
            Ok(p)
        } else {
            Err(ComplexError::Invalid(report.violations.join("; ")))
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn gamma(&self) -> &PeriodGroup {
        &self.gamma
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn action(&self, i: usize) -> &Q {
        &self.generators[i].action
    }

    /// Nonzero entries λ_ij, the coefficient of x_j in ∂x_i.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &NovikovScalar)> {
        self.differential.iter().map(|(&(i, j), s)| (i, j, s))
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&NovikovScalar> {
        self.differential.get(&(i, j))
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &NovikovScalar)> {
        self.differential.range((i, 0)..(i + 1, 0)).map(|(&(_, j), s)| (j, s))
    }

    pub fn num_entries(&self) -> usize {
        self.differential.len()
    }

    pub fn has_zero_differential(&self) -> bool {
        self.differential.is_empty()
    }

    /// Component labels in sorted order.
    pub fn classes(&self) -> BTreeSet<&str> {
        self.generators.iter().map(|g| g.class.as_str()).collect()
    }

    pub fn boundary(&self, xi: &Chain) -> Result<Chain, ComplexError> {
        let mut out = Chain::new();
        for (&i, c) in xi.coefficients() {
            if i >= self.len() {
                return Err(ComplexError::IndexOutOfRange(i));
            }
            for (j, l) in self.row(i) {
                out.add_term(j, &c.mul(l)?)?;
            }
        }
        Ok(out)
    }

    /// A(Σ λ_i x_i) = max_i A(x_i) - ν(λ_i).
    pub fn chain_action(&self, xi: &Chain) -> Result<Q, ComplexError> {
        let mut best: Option<Q> = None;
        for (&i, c) in xi.coefficients() {
            if i >= self.len() {
                return Err(ComplexError::IndexOutOfRange(i));
            }
            let Valuation::Finite(v) = c.valuation() else { continue };
            let a = self.action(i) - v;
            if best.as_ref().is_none_or(|b| a > *b) {
                best = Some(a);
            }
        }
        best.ok_or(ComplexError::ZeroChain)
    }

    /// Length A(x_i) - A(x_j) + a of the arrow for term T^a of λ_ij.
    pub fn arrow_length(&self, i: usize, j: usize, exponent: &Q) -> Q {
        self.action(i) - self.action(j) + exponent
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut margin = Valuation::Infinite;
        let mut action_decreasing = true;
        let mut classes_preserved = true;
        let mut exponents_in_gamma = true;
        for (i, j, s) in self.entries() {
            if self.generators[i].class != self.generators[j].class {
                classes_preserved = false;
                push_violation(&mut violations, format!("entry ({i},{j}) joins different components"));
            }
            for (a, _) in s.terms() {
                let len = self.arrow_length(i, j, a);
                if !len.is_positive() {
                    action_decreasing = false;
                    push_violation(
                        &mut violations,
                        format!("entry ({i},{j}) term T^{} does not decrease action", rational::format(a)),
                    );
                }
                if !self.gamma.contains(a) {
                    exponents_in_gamma = false;
                    push_violation(&mut violations, format!("entry ({i},{j}) exponent {} not in Γ", rational::format(a)));
                }
                margin = margin.min(Valuation::Finite(len));
            }
        }
        let mut d_squared_zero = true;
        for i in 0..self.len() {
            let once = match self.boundary(&Chain::basis(i, self.field)) {
                Ok(c) => c,
                Err(_) => continue,
            };
            match self.boundary(&once) {
                Ok(twice) if twice.is_zero() => {}
                _ => {
                    d_squared_zero = false;
                    push_violation(&mut violations, format!("∂²x_{i} ≠ 0"));
                }
            }
        }
        ValidationReport { d_squared_zero, action_decreasing, classes_preserved, exponents_in_gamma, margin, violations }
    }

    /// Negates actions and transposes the differential.
    pub fn dualize(&self) -> FloerPackage {
        let generators = self
            .generators
            .iter()
            .map(|g| Generator { label: g.label.clone(), action: -g.action, class: g.class.clone() })
            .collect();
        let differential = self.differential.iter().map(|(&(i, j), s)| ((j, i), s.clone())).collect();
        FloerPackage { field: self.field, gamma: self.gamma.clone(), generators, differential }
    }

    /// Moves generator `i` to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<FloerPackage, ComplexError> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(ComplexError::Invalid("permutation length mismatch".into()));
        }
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(ComplexError::Invalid("not a permutation".into()));
            }
        }
        let mut generators = self.generators.clone();
        for (i, g) in self.generators.iter().enumerate() {
            generators[perm[i]] = g.clone();
        }
        let differential = self.differential.iter().map(|(&(i, j), s)| ((perm[i], perm[j]), s.clone())).collect();
        Ok(FloerPackage { field: self.field, gamma: self.gamma.clone(), generators, differential })
    }

    /// Replaces the actions, keeping everything else.
    pub fn with_actions(&self, actions: &[Q]) -> FloerPackage {
        let mut out = self.clone();
        for (g, a) in out.generators.iter_mut().zip(actions) {
            g.action = *a;
        }
        out
    }

    /// Shifts each action by an independent uniform value in (-δ, δ) on a 2^-40 grid of δ.
    pub fn perturb_actions(&self, delta: &Q, seed: u64) -> Result<FloerPackage, ComplexError> {
        let margin = self.validate().margin;
        let too_large = delta.is_negative()
            || matches!(&margin, Valuation::Finite(m) if *delta * Q::from_integer(2) >= *m);
        if too_large {
            return Err(ComplexError::PerturbationTooLarge { delta: rational::format(delta), margin: margin.to_string() });
        }
        if delta.is_zero() {
            return Ok(self.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1i128 << rational::GRID_BITS;
        let actions: Vec<Q> = self
            .generators
            .iter()
            .map(|g| g.action + delta * Q::new(rng.gen_range(1 - scale..scale), scale))
            .collect();
        Ok(self.with_actions(&actions))
    }

    pub fn spectrum(&self) -> ActionSpectrum {
        let mut components: BTreeMap<String, BTreeSet<Q>> = BTreeMap::new();
        for g in &self.generators {
            components.entry(g.class.clone()).or_default().insert(self.gamma.reduce(&g.action));
        }
        ActionSpectrum { period: self.gamma.step(), components }
    }

    pub fn difference_set(&self) -> DifferenceSet {
        let spectrum = self.spectrum();
        let components = spectrum
            .components
            .iter()
            .map(|(c, s)| {
                let d = s.iter().flat_map(|a| s.iter().map(move |b| self.gamma.reduce(&(a - b)))).collect();
                (c.clone(), d)
            })
            .collect();
        DifferenceSet { period: spectrum.period, components }
    }

    /// Text form: `field p`, `gamma g...`, `gen label action class`, `d i j coeff exponent`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "field {}", self.field.p());
        let gens: Vec<String> = self.gamma.generators().iter().map(rational::format).collect();
        let _ = writeln!(s, "gamma{}{}", if gens.is_empty() { "" } else { " " }, gens.join(" "));
        for g in &self.generators {
            let _ = writeln!(s, "gen {} {} {}", g.label, rational::format(&g.action), g.class);
        }
        for (i, j, v) in self.entries() {
            for (a, c) in v.terms() {
                let _ = writeln!(s, "d {i} {j} {c} {}", rational::format(a));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<FloerPackage, ComplexError> {
        let mut field: Option<PrimeField> = None;
        let mut gamma = PeriodGroup::trivial();
        let mut generators = Vec::new();
        let mut terms: Vec<(usize, usize, usize, i64, Q)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: &str| ComplexError::Parse { line: line_no, message: message.to_string() };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "field" => {
                    let p = words.get(1).and_then(|w| w.parse::<u32>().ok()).ok_or_else(|| err("bad field line"))?;
                    field = Some(PrimeField::new(p).map_err(|e| err(&e.to_string()))?);
                }
                "gamma" => {
                    let gens = words[1..]
                        .iter()
                        .map(|w| rational::parse(w).ok_or_else(|| err("bad gamma generator")))
                        .collect::<Result<Vec<_>, _>>()?;
                    gamma = PeriodGroup::new(gens).map_err(|e| err(&e.to_string()))?;
                }
                "gen" => {
                    if words.len() != 4 {
                        return Err(err("expected `gen label action class`"));
                    }
                    let action = rational::parse(words[2]).ok_or_else(|| err("bad action"))?;
                    generators.push(Generator::new(words[1], action, words[3]));
                }
                "d" => {
                    if words.len() != 5 {
                        return Err(err("expected `d i j coeff exponent`"));
                    }
                    let i = words[1].parse::<usize>().map_err(|_| err("bad row index"))?;
                    let j = words[2].parse::<usize>().map_err(|_| err("bad column index"))?;
                    let c = words[3].parse::<i64>().map_err(|_| err("bad coefficient"))?;
                    let a = rational::parse(words[4]).ok_or_else(|| err("bad exponent"))?;
                    terms.push((line_no, i, j, c, a));
                }
                other => return Err(err(&format!("unknown record `{other}`"))),
            }
        }
        let field = field.ok_or(ComplexError::Parse { line: 0, message: "missing field line".into() })?;
        let n = generators.len();
        let mut entries = Vec::with_capacity(terms.len());
        for (line, i, j, c, a) in terms {
            if i >= n || j >= n {
                return Err(ComplexError::Parse { line, message: "generator index out of range".into() });
            }
            entries.push((i, j, NovikovScalar::monomial(field, c, a)));
        }
        FloerPackage::new(field, gamma, generators, entries)
    }
}

fn push_violation(v: &mut Vec<String>, msg: String) {
    if v.len() < 16 {
        v.push(msg);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d)
    }

    fn one() -> NovikovScalar {
        NovikovScalar::one(PrimeField::f2())
    }

    fn two_gen(a2: Q) -> FloerPackage {
        let gens = vec![Generator::new("x1", q(2, 1), "c"), Generator::new("x2", a2, "c")];
        FloerPackage::new(PrimeField::f2(), PeriodGroup::trivial(), gens, [(0, 1, one())]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let r = two_gen(q(1, 2)).validate();
        assert!(r.is_valid());
        assert_eq!(r.margin, Valuation::Finite(q(3, 2)));
        let r = two_gen(q(5, 2)).validate();
        assert!(!r.action_decreasing && !r.is_valid());
        let gens = vec![
            Generator::new("x1", q(3, 1), "c"),
            Generator::new("x2", q(2, 1), "c"),
            Generator::new("x3", q(1, 1), "c"),
        ];
        let p = FloerPackage::new(PrimeField::f2(), PeriodGroup::trivial(), gens, [(0, 1, one()), (1, 2, one())]).unwrap();
        let r = p.validate();
        assert!(!r.d_squared_zero && r.action_decreasing);
    }

    #[test]
    fn class_mixing_is_reported() {
        let gens = vec![Generator::new("x1", q(2, 1), "a"), Generator::new("x2", q(0, 1), "b")];
        let p = FloerPackage::new(PrimeField::f2(), PeriodGroup::trivial(), gens, [(0, 1, one())]).unwrap();
        assert!(!p.validate().classes_preserved);
    }

    #[test]
    fn chain_action_examples() {
        let gens = vec![Generator::new("x1", q(2, 1), "c"), Generator::new("x2", q(1, 2), "c")];
        let p = FloerPackage::new(PrimeField::f2(), PeriodGroup::trivial(), gens, []).unwrap();
        let f = PrimeField::f2();
        assert_eq!(p.chain_action(&Chain::basis(0, f)).unwrap(), q(2, 1));
        let c = Chain::from_terms([(0, NovikovScalar::monomial(f, 1, q(3, 10)))]).unwrap();
        assert_eq!(p.chain_action(&c).unwrap(), q(17, 10));
        let c = Chain::from_terms([(0, one()), (1, NovikovScalar::monomial(f, 1, q(-1, 1)))]).unwrap();
        assert_eq!(p.chain_action(&c).unwrap(), q(2, 1));
        assert_eq!(p.chain_action(&Chain::new()), Err(ComplexError::ZeroChain));
    }

    #[test]
    fn dualize_is_involution() {
        let p = two_gen(q(1, 2));
        let d = p.dualize();
        assert_eq!(d.action(0), &q(-2, 1));
        assert!(d.entry(1, 0).is_some() && d.entry(0, 1).is_none());
        assert!(d.validate().is_valid());
        assert_eq!(d.dualize(), p);
    }

    #[test]
    fn perturbation_bounds() {
        let p = two_gen(q(1, 2));
        assert_eq!(p.perturb_actions(&Q::zero(), 1).unwrap(), p);
        assert!(p.perturb_actions(&q(3, 4), 1).is_err());
        let pp = p.perturb_actions(&q(1, 4), 7).unwrap();
        for i in 0..2 {
            assert!((pp.action(i) - p.action(i)).abs() < q(1, 4));
        }
        assert!(pp.validate().is_valid());
    }

    #[test]
    fn perturbation_breaks_ties() {
        let gens = (0..6).map(|i| Generator::new(format!("x{i}"), q(1, 1), "c")).collect();
        let p = FloerPackage::new(PrimeField::f2(), PeriodGroup::trivial(), gens, []).unwrap();
        let pp = p.perturb_actions(&q(1, 100), 3).unwrap();
        let distinct: BTreeSet<_> = pp.generators().iter().map(|g| g.action).collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn spectrum_examples() {
        let p = two_gen(q(1, 2));
        let s = p.spectrum();
        assert_eq!(s.components["c"], [q(1, 2), q(2, 1)].into_iter().collect());
        let d = p.difference_set();
        assert_eq!(d.components["c"], [q(-3, 2), q(0, 1), q(3, 2)].into_iter().collect());
        let gens = vec![Generator::new("x", q(1, 5), "c")];
        let g = PeriodGroup::new(vec![q(1, 1)]).unwrap();
        let p = FloerPackage::new(PrimeField::f2(), g, gens, []).unwrap();
        assert_eq!(p.spectrum().components["c"], [q(1, 5)].into_iter().collect());
        let d = p.difference_set();
        assert!(d.contains("c", &q(3, 1)) && d.contains("c", &q(-1, 1)) && !d.contains("c", &q(1, 2)));
    }

    #[test]
    fn text_round_trip() {
        let f = PrimeField::new(3).unwrap();
        let g = PeriodGroup::new(vec![q(1, 2)]).unwrap();
        let gens = vec![Generator::new("a", q(7, 3), "c0"), Generator::new("b", q(-1, 8), "c0")];
        let s = NovikovScalar::new(f, [(q(0, 1), 2), (q(1, 1), 1)], Valuation::Infinite);
        let p = FloerPackage::new(f, g, gens, [(0, 1, s)]).unwrap();
        let text = p.to_text();
        assert_eq!(FloerPackage::from_text(&text).unwrap(), p);
        assert_eq!(FloerPackage::from_text(&text).unwrap().to_text(), text);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "field 2\ngamma\ngen x1 2 c\ngen x2 0.5 c\nd 0 one 1 0\n";
        match FloerPackage::from_text(text) {
            Err(ComplexError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(FloerPackage::from_text("field 4\n"), Err(ComplexError::Parse { line: 1, .. })));
    }

    #[test]
    fn permutation_moves_entries() {
        let p = two_gen(q(1, 2));
        let pp = p.permuted(&[1, 0]).unwrap();
        assert_eq!(pp.generators()[1].label, "x1");
        assert!(pp.entry(1, 0).is_some());
        assert!(p.permuted(&[0, 0]).is_err());
    }
}
