//! The Floer graph of a package and its ε-isolated vertices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::complex::FloerPackage;
use crate::novikov::Valuation;
use crate::rational::{self, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub exponent: Q,
    pub length: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloerGraph {
    pub vertices: usize,
    pub labels: Vec<String>,
    pub arrows: Vec<Arrow>,
    /// Smallest truncation order among the differential entries; arrows beyond it are unknown.
    pub truncation: Valuation,
    /// Isolation is certified for ε below this value.
    pub certified_below: Valuation,
}

/// One arrow per nonzero term f·T^a of every λ_ij.
pub fn build_graph(p: &FloerPackage) -> FloerGraph {
    let mut arrows = Vec::new();
    let mut truncation = Valuation::Infinite;
    for (i, j, s) in p.entries() {
        truncation = truncation.min(s.truncation().clone());
        for (a, _) in s.terms() {
            arrows.push(Arrow { from: i, to: j, exponent: *a, length: p.arrow_length(i, j, a) });
        }
    }
    let diameter = match (
        p.generators().iter().map(|g| g.action).min(),
        p.generators().iter().map(|g| g.action).max(),
    ) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => Q::zero(),
    };
    let certified_below = match &truncation {
        Valuation::Finite(t) => Valuation::Finite(t - diameter),
        Valuation::Infinite => Valuation::Infinite,
    };
    FloerGraph {
        vertices: p.len(),
        labels: p.generators().iter().map(|g| g.label.clone()).collect(),
        arrows,
        truncation,
        certified_below,
    }
}

impl FloerGraph {
    /// Vertices all of whose incident arrows are strictly longer than ε.
    pub fn epsilon_isolated(&self, eps: &Q) -> BTreeSet<usize> {
        let mut isolated = vec![true; self.vertices];
        for a in &self.arrows {
            if a.length <= *eps {
                isolated[a.from] = false;
                isolated[a.to] = false;
            }
        }
        (0..self.vertices).filter(|v| isolated[*v]).collect()
    }

    /// DOT text with arrow lengths as edge labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph floer {\n");
        for (v, l) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  n{v} [label=\"{}\"];", l.replace('"', "'"));
        }
        for a in &self.arrows {
            let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", a.from, a.to, rational::format(&a.length));
        }
        s.push_str("}\n");
        s
    }
}

pub fn epsilon_isolated(g: &FloerGraph, eps: &Q) -> BTreeSet<usize> {
    g.epsilon_isolated(eps)
}

/// ⌈p/2⌉ for the p ε-isolated vertices; never exceeds b_ε.
pub fn isolated_lower_bound(p: &FloerPackage, eps: &Q) -> usize {
    build_graph(p).epsilon_isolated(eps).len().div_ceil(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Generator;
    use crate::novikov::{NovikovScalar, PeriodGroup, PrimeField};

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d)
    }

    fn p1(entry: NovikovScalar, gamma: PeriodGroup) -> FloerPackage {
        let gens = vec![
            Generator::new("x1", q(2, 1), "c"),
            Generator::new("x2", q(1, 2), "c"),
            Generator::new("x3", q(0, 1), "c"),
        ];
        FloerPackage::new(PrimeField::f2(), gamma, gens, [(0, 1, entry)]).unwrap()
    }

    #[test]
    fn graph_examples() {
        let f = PrimeField::f2();
        let g = build_graph(&p1(NovikovScalar::one(f), PeriodGroup::trivial()));
        assert_eq!(g.arrows.len(), 1);
        assert_eq!(g.arrows[0].length, q(3, 2));
        let s = NovikovScalar::new(f, [(q(0, 1), 1), (q(1, 1), 1)], Valuation::Infinite);
        let g = build_graph(&p1(s, PeriodGroup::new(vec![q(1, 1)]).unwrap()));
        let lengths: Vec<Q> = g.arrows.iter().map(|a| a.length).collect();
        assert_eq!(lengths, vec![q(3, 2), q(5, 2)]);
        let empty = FloerPackage::new(f, PeriodGroup::trivial(), vec![Generator::new("a", q(0, 1), "c")], []).unwrap();
        assert!(build_graph(&empty).arrows.is_empty());
    }

    #[test]
    fn isolation_examples() {
        let f = PrimeField::f2();
        let p = p1(NovikovScalar::one(f), PeriodGroup::trivial());
        let g = build_graph(&p);
        assert_eq!(g.epsilon_isolated(&q(1, 1)), [0, 1, 2].into_iter().collect());
        assert_eq!(g.epsilon_isolated(&q(3, 2)), [2].into_iter().collect());
        assert_eq!(isolated_lower_bound(&p, &q(1, 1)), 2);
    }

    #[test]
    fn zero_differential_bound() {
        let f = PrimeField::f2();
        let gens = (0..5).map(|i| Generator::new(format!("x{i}"), q(i, 1), "c")).collect();
        let p = FloerPackage::new(f, PeriodGroup::trivial(), gens, []).unwrap();
        assert_eq!(isolated_lower_bound(&p, &q(100, 1)), 3);
    }

    #[test]
    fn dot_output() {
        let f = PrimeField::f2();
        let dot = build_graph(&p1(NovikovScalar::one(f), PeriodGroup::trivial())).to_dot();
        assert!(dot.contains("n0 -> n1 [label=\"3/2\"]"));
    }
}
