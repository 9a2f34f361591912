//! Singular decompositions and barcodes by valuation-greedy elimination.
//!
//! The arrow of least length A(x_k) - A(x_l) + ν(M_kl) is paired first; the remaining
//! matrix is updated by its Schur complement, which keeps the basis orthogonal.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::complex::{Chain, ComplexError, FloerPackage};
use crate::novikov::{NovikovError, NovikovScalar, PrimeField, Valuation};
use crate::ratfn::RatFn;
use crate::rational::{self, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarcodeError {
    #[error("package is not valid: {0}")]
    Invalid(String),
    #[error("entry ({0},{1}) is truncated; exact entries are required")]
    Truncated(usize, usize),
    #[error("generators {0} and {1} have equal actions modulo Γ; perturb first")]
    TiedActions(usize, usize),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentBars {
    /// Finite bar lengths, ascending.
    pub finite: Vec<Q>,
    pub infinite: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Barcode {
    pub components: BTreeMap<String, ComponentBars>,
}

impl Barcode {
    pub fn finite_bars(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.components.values().flat_map(|c| c.finite.iter().cloned()).collect();
        v.sort();
        v
    }

    pub fn infinite_count(&self) -> usize {
        self.components.values().map(|c| c.infinite).sum()
    }

    pub fn finite_count(&self) -> usize {
        self.components.values().map(|c| c.finite.len()).sum()
    }

    /// 2·(finite bars) + (infinite bars).
    pub fn generator_count(&self) -> usize {
        2 * self.finite_count() + self.infinite_count()
    }

    /// Number of bars, finite or infinite, of length strictly greater than ε.
    pub fn b_eps(&self, eps: &Q) -> usize {
        let finite: usize = self
            .components
            .values()
            .map(|c| c.finite.len() - c.finite.partition_point(|b| b <= eps))
            .sum();
        finite + self.infinite_count()
    }

    /// Longest finite bar, 0 without finite bars.
    pub fn boundary_depth(&self) -> Q {
        self.components.values().filter_map(|c| c.finite.last()).max().cloned().unwrap_or_else(Q::zero)
    }

    /// b_{ε+δ}: a lower bound for the generator count of any package within action distance δ/2.
    pub fn intersection_lower_bound(&self, eps: &Q, delta: &Q) -> usize {
        self.b_eps(&(eps + delta))
    }

    /// CSV rows `component,length,multiplicity`, with `INF` for infinite bars.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("component,length,multiplicity\n");
        for (c, bars) in &self.components {
            let mut i = 0;
            while i < bars.finite.len() {
                let j = bars.finite[i..].iter().take_while(|b| **b == bars.finite[i]).count();
                let _ = writeln!(s, "{c},{},{j}", rational::to_f64(&bars.finite[i]));
                i += j;
            }
            if bars.infinite > 0 {
                let _ = writeln!(s, "{c},INF,{}", bars.infinite);
            }
        }
        s
    }
}

/// Orthogonal basis of cycles α_i and pairs (η_j, γ_j) with ∂γ_j = η_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularDecomposition {
    pub cycles: Vec<Chain>,
    /// (η, γ, A(γ) - A(η))
    pub pairs: Vec<(Chain, Chain, Q)>,
    /// Order below which series coefficients of the chains are exact.
    pub truncation: Valuation,
}

trait Coeff: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn exponent(&self, step: &Q) -> Q;
    fn mul(&self, o: &Self, f: PrimeField) -> Self;
    fn div(&self, o: &Self, f: PrimeField) -> Self;
    fn sub(&self, o: &Self, f: PrimeField) -> Self;
    fn neg(&self, f: PrimeField) -> Self;
}

impl Coeff for u32 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn exponent(&self, _: &Q) -> Q {
        Q::zero()
    }
    fn mul(&self, o: &Self, f: PrimeField) -> Self {
        f.mul(*self, *o)
    }
    fn div(&self, o: &Self, f: PrimeField) -> Self {
        f.mul(*self, f.inv(*o))
    }
    fn sub(&self, o: &Self, f: PrimeField) -> Self {
        f.sub(*self, *o)
    }
    fn neg(&self, f: PrimeField) -> Self {
        f.neg(*self)
    }
}

impl Coeff for RatFn {
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn exponent(&self, step: &Q) -> Q {
        step * Q::from_integer(self.valuation().unwrap_or(0) as i128)
    }
    fn mul(&self, o: &Self, f: PrimeField) -> Self {
        RatFn::mul(self, o, f)
    }
    fn div(&self, o: &Self, f: PrimeField) -> Self {
        RatFn::div(self, o, f)
    }
    fn sub(&self, o: &Self, f: PrimeField) -> Self {
        RatFn::sub(self, o, f)
    }
    fn neg(&self, f: PrimeField) -> Self {
        RatFn::neg(self, f)
    }
}

struct Elimination<C> {
    pairs: Vec<(usize, usize, Q)>,
    survivors: Vec<usize>,
    chains: Option<Vec<HashMap<usize, C>>>,
}

/// Greedy elimination on one component with local indices `0..actions.len()`.
fn eliminate<C: Coeff>(
    actions: &[Q],
    entries: Vec<(usize, usize, C)>,
    step: &Q,
    field: PrimeField,
    one: C,
    track: bool,
) -> Elimination<C> {
    let n = actions.len();
    let mut rows: Vec<HashMap<usize, C>> = (0..n).map(|_| HashMap::new()).collect();
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut heap = BinaryHeap::new();
    let len = |k: usize, l: usize, c: &C| actions[k] - actions[l] + c.exponent(step);
    for (k, l, c) in entries {
        heap.push(Reverse((len(k, l, &c), k, l)));
        cols[l].push(k);
        rows[k].insert(l, c);
    }
    let mut chains: Option<Vec<HashMap<usize, C>>> =
        track.then(|| (0..n).map(|k| HashMap::from([(k, one.clone())])).collect());
    let mut alive = vec![true; n];
    let mut pairs = Vec::new();
    while let Some(Reverse((length, i, j))) = heap.pop() {
        if !(alive[i] && alive[j]) {
            continue;
        }
        let Some(mij) = rows[i].get(&j).cloned() else { continue };
        if len(i, j, &mij) != length {
            continue;
        }
        pairs.push((i, j, length));
        let row_i: Vec<(usize, C)> = rows[i].iter().filter(|(l, _)| **l != j).map(|(l, c)| (*l, c.clone())).collect();
        let mut col_j: Vec<usize> = std::mem::take(&mut cols[j]);
        col_j.sort_unstable();
        col_j.dedup();
        for k in col_j {
            if k == i || !alive[k] {
                continue;
            }
            let Some(mkj) = rows[k].remove(&j) else { continue };
            let factor = mkj.div(&mij, field);
            for (l, mil) in &row_i {
                let delta = factor.mul(mil, field);
                let updated = match rows[k].get(l) {
                    Some(old) => old.sub(&delta, field),
                    None => {
                        cols[*l].push(k);
                        delta.neg(field)
                    }
                };
                if updated.is_zero() {
                    rows[k].remove(l);
                } else {
                    heap.push(Reverse((len(k, *l, &updated), k, *l)));
                    rows[k].insert(*l, updated);
                }
            }
            if let Some(chains) = chains.as_mut() {
                let ei: Vec<(usize, C)> = chains[i].iter().map(|(a, c)| (*a, c.clone())).collect();
                let ek = &mut chains[k];
                for (a, c) in ei {
                    let delta = factor.mul(&c, field);
                    let updated = match ek.get(&a) {
                        Some(old) => old.sub(&delta, field),
                        None => delta.neg(field),
                    };
                    if updated.is_zero() {
                        ek.remove(&a);
                    } else {
                        ek.insert(a, updated);
                    }
                }
            }
        }
        for dead in [i, j] {
            alive[dead] = false;
            rows[dead].clear();
        }
        for k in std::mem::take(&mut cols[i]) {
            rows[k].remove(&i);
        }
    }
    let survivors = (0..n).filter(|k| alive[*k]).collect();
    Elimination { pairs, survivors, chains }
}

struct ComponentInput {
    name: String,
    members: Vec<usize>,
}

fn components_of(p: &FloerPackage) -> Vec<ComponentInput> {
    let mut map: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, g) in p.generators().iter().enumerate() {
        map.entry(g.class.as_str()).or_default().push(i);
    }
    map.into_iter().map(|(name, members)| ComponentInput { name: name.to_string(), members }).collect()
}

fn check_input(p: &FloerPackage) -> Result<(), BarcodeError> {
    let report = p.validate();
    if !report.is_valid() {
        return Err(BarcodeError::Invalid(report.violations.join("; ")));
    }
    for (i, j, s) in p.entries() {
        if !s.is_exact() {
            return Err(BarcodeError::Truncated(i, j));
        }
    }
    if let Some(g) = p.gamma().step() {
        let mut seen: HashMap<(&str, Q), usize> = HashMap::new();
        for (i, gen) in p.generators().iter().enumerate() {
            let key = (gen.class.as_str(), rational::rem_period(&gen.action, &g));
            if let Some(prev) = seen.insert(key, i) {
                return Err(BarcodeError::TiedActions(prev, i));
            }
        }
    }
    Ok(())
}

enum Solved {
    Prime(Vec<Elimination<u32>>),
    Laurent(Vec<Elimination<RatFn>>, Q),
}

fn solve(p: &FloerPackage, track: bool) -> Result<(Vec<ComponentInput>, Solved), BarcodeError> {
    check_input(p)?;
    let comps = components_of(p);
    let mut local = vec![0usize; p.len()];
    let mut comp_of = vec![0usize; p.len()];
    for (c, comp) in comps.iter().enumerate() {
        for (k, &i) in comp.members.iter().enumerate() {
            local[i] = k;
            comp_of[i] = c;
        }
    }
    let actions: Vec<Vec<Q>> = comps.iter().map(|c| c.members.iter().map(|&i| *p.action(i)).collect()).collect();
    let field = p.field();
    match p.gamma().step() {
        None => {
            let mut per: Vec<Vec<(usize, usize, u32)>> = vec![Vec::new(); comps.len()];
            for (i, j, s) in p.entries() {
                // Γ = {0}: every exponent is 0, so the entry is a constant.
                let c = s.terms().first().map(|t| t.1).unwrap_or(0);
                per[comp_of[i]].push((local[i], local[j], c));
            }
            let step = Q::zero();
            let out = per
                .into_iter()
                .zip(&actions)
                .map(|(e, a)| eliminate(a, e, &step, field, 1u32, track))
                .collect();
            Ok((comps, Solved::Prime(out)))
        }
        Some(g) => {
            let mut per: Vec<Vec<(usize, usize, RatFn)>> = vec![Vec::new(); comps.len()];
            for (i, j, s) in p.entries() {
                let terms: Vec<(i64, u32)> = s
                    .terms()
                    .iter()
                    .map(|(e, c)| ((e / g).to_integer() as i64, *c))
                    .collect();
                per[comp_of[i]].push((local[i], local[j], RatFn::from_terms(&terms, field)));
            }
            let out = per
                .into_iter()
                .zip(&actions)
                .map(|(e, a)| eliminate(a, e, &g, field, RatFn::monomial(1, 0), track))
                .collect();
            Ok((comps, Solved::Laurent(out, g)))
        }
    }
}

fn bars_from<C>(comps: &[ComponentInput], elims: &[Elimination<C>]) -> Barcode {
    let components = comps
        .iter()
        .zip(elims)
        .map(|(c, e)| {
            let mut finite: Vec<Q> = e.pairs.iter().map(|p| p.2).collect();
            finite.sort();
            (c.name.clone(), ComponentBars { finite, infinite: e.survivors.len() })
        })
        .collect();
    Barcode { components }
}

/// Barcode of a valid package with exact entries.
pub fn barcode(p: &FloerPackage) -> Result<Barcode, BarcodeError> {
    let (comps, solved) = solve(p, false)?;
    Ok(match &solved {
        Solved::Prime(e) => bars_from(&comps, e),
        Solved::Laurent(e, _) => bars_from(&comps, e),
    })
}

pub fn b_eps(p: &FloerPackage, eps: &Q) -> Result<usize, BarcodeError> {
    Ok(barcode(p)?.b_eps(eps))
}

pub fn boundary_depth(p: &FloerPackage) -> Result<Q, BarcodeError> {
    Ok(barcode(p)?.boundary_depth())
}

pub fn intersection_lower_bound(p: &FloerPackage, eps: &Q, delta: &Q) -> Result<usize, BarcodeError> {
    Ok(barcode(p)?.intersection_lower_bound(eps, delta))
}

/// Default series order: longest finite bar + action diameter + one period.
pub fn default_truncation(p: &FloerPackage, bars: &Barcode) -> Valuation {
    let Some(g) = p.gamma().step() else {
        return Valuation::Infinite;
    };
    let lo = p.generators().iter().map(|x| x.action).min().unwrap_or_else(Q::zero);
    let hi = p.generators().iter().map(|x| x.action).max().unwrap_or_else(Q::zero);
    Valuation::Finite(bars.boundary_depth() + (hi - lo) + g)
}

pub fn singular_decomposition(p: &FloerPackage) -> Result<SingularDecomposition, BarcodeError> {
    let (comps, solved) = solve(p, true)?;
    let field = p.field();
    let mut cycles = Vec::new();
    let mut pairs = Vec::new();
    let truncation;
    match solved {
        Solved::Prime(elims) => {
            truncation = Valuation::Infinite;
            for (comp, e) in comps.iter().zip(&elims) {
                let chains = e.chains.as_ref().expect("tracked");
                let to_chain = |k: usize| {
                    Chain::from_terms(
                        chains[k].iter().map(|(a, c)| (comp.members[*a], NovikovScalar::monomial(field, *c as i64, Q::zero()))),
                    )
                };
                for &k in &e.survivors {
                    cycles.push(to_chain(k)?);
                }
                for (i, _, length) in &e.pairs {
                    let gamma = to_chain(*i)?;
                    pairs.push((p.boundary(&gamma)?, gamma, *length));
                }
            }
        }
        Solved::Laurent(elims, g) => {
            let bars = bars_from(&comps, &elims);
            truncation = default_truncation(p, &bars);
            let order = truncation.finite().cloned().unwrap_or_else(Q::zero);
            let below = (order / g).ceil().to_integer() as i64;
            for (comp, e) in comps.iter().zip(&elims) {
                let chains = e.chains.as_ref().expect("tracked");
                let to_chain = |k: usize| {
                    Chain::from_terms(chains[k].iter().map(|(a, c)| {
                        let terms = c.expand(below, field);
                        let s = NovikovScalar::new(
                            field,
                            terms.into_iter().map(|(e, c)| (g * Q::from_integer(e as i128), c as i64)),
                            Valuation::Finite(order),
                        );
                        (comp.members[*a], s)
                    }))
                };
                for &k in &e.survivors {
                    cycles.push(to_chain(k)?);
                }
                for (i, _, length) in &e.pairs {
                    let gamma = to_chain(*i)?;
                    pairs.push((p.boundary(&gamma)?, gamma, *length));
                }
            }
        }
    }
    debug_assert!(pairs.iter().all(|(_, _, l): &(Chain, Chain, Q)| l.is_positive()));
    Ok(SingularDecomposition { cycles, pairs, truncation })
}
