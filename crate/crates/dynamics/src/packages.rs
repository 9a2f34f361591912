//! Filtered complexes generated by the periodic points in an orbit table.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use floer_core::complex::{ComplexError, FloerPackage, Generator};
use floer_core::novikov::{NovikovScalar, PeriodGroup, PrimeField};
use floer_core::rational::snap_default;
use nalgebra::DVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::orbits::{action_gradient, action_hessian, discrete_action, polish, shift_point, OrbitData, OrbitTable, PointIndex};
use crate::twist::TwistMapModel;

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingRule {
    /// ∂ = 0: every generator carries an infinite bar.
    Zero,
    /// Index-one critical points of the discrete action are joined to the minima their unstable
    /// directions descend to, with sign +1 / -1 for the two branches.
    Morse(TwistMapModel),
    /// Symbolic tables only: ∂x_{0…01} = x_{0…0}, one bar of length w_1 - w_0.
    PlantedPair,
    /// Pairs the i-th highest action with the i-th lowest, for i < count.
    FarPairs(usize),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("coupling rule not applicable: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone)]
pub struct PackageBuild {
    pub package: FloerPackage,
    /// (record index, shift) for each generator.
    pub origin: Vec<(usize, usize)>,
    /// Morse arrows that ended at no listed minimum, in another class, or without an action drop.
    pub dropped_arrows: usize,
}

fn generators(table: &OrbitTable) -> (Vec<Generator>, Vec<(usize, usize)>) {
    let mut gens = Vec::new();
    let mut origin = Vec::new();
    for (ri, r) in table.records.iter().enumerate() {
        for s in 0..r.minimal_period {
            let label = match &r.data {
                OrbitData::Symbolic { word } => {
                    let rot: String = word[s..].iter().chain(&word[..s]).map(|c| c.to_string()).collect();
                    format!("w{rot}")
                }
                OrbitData::Twist { .. } => format!("o{ri}s{s}"),
            };
            gens.push(Generator::new(label, snap_default(r.action), r.class.clone()));
            origin.push((ri, s));
        }
    }
    (gens, origin)
}

pub fn build_package_from_orbits(
    table: &OrbitTable,
    rule: &CouplingRule,
    field: PrimeField,
) -> Result<PackageBuild, BuildError> {
    let (gens, origin) = generators(table);
    let one = NovikovScalar::one(field);
    let minus = one.neg();
    let mut entries = Vec::new();
    let mut dropped = 0;
    match rule {
        CouplingRule::Zero => {}
        CouplingRule::PlantedPair => {
            let k = table.period;
            let find = |target: &[u8]| {
                gens.iter().position(|g| g.label[1..].bytes().map(|b| b - b'0').eq(target.iter().copied()))
            };
            let zero = vec![0u8; k];
            let mut one_hot = vec![0u8; k];
            one_hot[k - 1] = 1;
            match (table.records.first().map(|r| &r.data), find(&one_hot), find(&zero)) {
                (Some(OrbitData::Symbolic { .. }), Some(hi), Some(lo)) => entries.push((hi, lo, one.clone())),
                _ => return Err(BuildError::Unsupported("planted pair needs a symbolic table".into())),
            }
        }
        CouplingRule::FarPairs(count) => {
            let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, g) in gens.iter().enumerate() {
                by_class.entry(&g.class).or_default().push(i);
            }
            for members in by_class.values_mut() {
                members.sort_by(|a, b| gens[*a].action.cmp(&gens[*b].action).then(a.cmp(b)));
                let n = members.len();
                for i in 0..(*count).min(n / 2) {
                    let (lo, hi) = (members[i], members[n - 1 - i]);
                    if gens[hi].action > gens[lo].action {
                        entries.push((hi, lo, one.clone()));
                    }
                }
            }
        }
        CouplingRule::Morse(model) => {
            let k_strength = model.kick().ok_or_else(|| BuildError::Unsupported("Morse rule needs a kicked map".into()))?;
            let mut index = PointIndex::default();
            let mut first_gen = vec![0usize; table.records.len()];
            for (g, &(ri, s)) in origin.iter().enumerate() {
                if s == 0 {
                    first_gen[ri] = g;
                }
                if let OrbitData::Twist { points, .. } = &table.records[ri].data {
                    index.insert(points[s].0, points[s].1, g);
                }
            }
            let arrows: Vec<(Vec<(usize, usize, bool)>, usize)> = table
                .records
                .par_iter()
                .enumerate()
                .map(|(ri, r)| {
                    let OrbitData::Twist { sequence, m, n: 0, .. } = &r.data else { return (Vec::new(), 0) };
                    if r.morse_index != Some(1) {
                        return (Vec::new(), 0);
                    }
                    let mut out = Vec::new();
                    let mut lost = 0;
                    for (sign, end) in descend_branches(model, sequence, *m, k_strength) {
                        let Some(end) = end else {
                            lost += r.minimal_period;
                            continue;
                        };
                        for s in 0..r.minimal_period {
                            let p = shift_point(&end, *m, 0, s);
                            let target = index.find(p.0, p.1, 1e-7);
                            let from = first_gen[ri] + s;
                            match target {
                                Some(t)
                                    if gens[t].class == gens[from].class
                                        && table.records[origin[t].0].morse_index == Some(0)
                                        && gens[t].action < gens[from].action =>
                                {
                                    out.push((from, t, sign));
                                }
                                _ => lost += 1,
                            }
                        }
                    }
                    (out, lost)
                })
                .collect();
            for (list, lost) in arrows {
                dropped += lost;
                for (from, to, plus) in list {
                    entries.push((from, to, if plus { one.clone() } else { minus.clone() }));
                }
            }
        }
    }
    let package = FloerPackage::new(field, PeriodGroup::trivial(), gens, entries)?;
    Ok(PackageBuild { package, origin, dropped_arrows: dropped })
}

/// Gradient-descent endpoints of the two unstable branches of an index-one critical point.
fn descend_branches(model: &TwistMapModel, seq: &[f64], m: i64, big_k: f64) -> [(bool, Option<Vec<f64>>); 2] {
    let eig = action_hessian(seq, big_k).symmetric_eigen();
    let (neg, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("nonempty sequence");
    let v: DVector<f64> = eig.eigenvectors.column(neg).normalize();
    let start = discrete_action(model, seq, m);
    let branch = |sign: f64| {
        let x: Vec<f64> = seq.iter().zip(v.iter()).map(|(a, b)| a + sign * 1e-2 * b).collect();
        descend(model, x, m, big_k, start)
    };
    [(true, branch(1.0)), (false, branch(-1.0))]
}

fn descend(model: &TwistMapModel, mut x: Vec<f64>, m: i64, big_k: f64, start: f64) -> Option<Vec<f64>> {
    let c = big_k / (2.0 * PI);
    let eta = 1.0 / (4.0 + big_k.abs());
    for _ in 0..200_000 {
        let g = action_gradient(&x, m, c);
        if g.iter().fold(0.0f64, |a, b| a.max(b.abs())) < 1e-7 {
            if polish(&mut x, m, 0, big_k) > 1e-10 {
                return None;
            }
            let eig = action_hessian(&x, big_k).symmetric_eigenvalues();
            if eig.iter().any(|e| *e <= 0.0) || discrete_action(model, &x, m) >= start {
                return None;
            }
            return Some(x);
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= eta * gi;
        }
    }
    None
}
