//! Random packages and the standard column-reduction persistence oracle.
#![allow(dead_code)]

use std::collections::BTreeMap;

use floer_core::complex::{FloerPackage, Generator};
use floer_core::novikov::{NovikovScalar, PeriodGroup, PrimeField};
use floer_core::Q;
use rand::seq::SliceRandom;
use rand::Rng;

/// Dense F_p matrix, row i = ∂x_i.
pub type Dense = Vec<Vec<u32>>;

fn matmul(a: &Dense, b: &Dense, f: PrimeField) -> Dense {
    let n = a.len();
    let mut out = vec![vec![0u32; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = f.add(out[i][j], f.mul(a[i][k], b[k][j]));
            }
        }
    }
    out
}

/// Inverse of a unitriangular matrix whose off-diagonal entries only point to strictly smaller `order`.
fn invert_unitriangular(v: &Dense, order: &[usize], f: PrimeField) -> Dense {
    let n = v.len();
    let mut w = vec![vec![0u32; n]; n];
    // Process rows from lowest order; W = I - N + N^2 - ..., solved by forward substitution.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&i| order[i]);
    for &i in &idx {
        w[i][i] = 1;
        for &k in &idx {
            if order[k] >= order[i] {
                break;
            }
            // (V W)_{ik} = 0 for k ≠ i: W_ik = -Σ_{m ≠ i} V_im W_mk
            let mut s = 0u32;
            for m in 0..n {
                if m != i && v[i][m] != 0 {
                    s = f.add(s, f.mul(v[i][m], w[m][k]));
                }
            }
            w[i][k] = f.neg(s);
        }
    }
    w
}

pub struct RandomSpec {
    pub max_gens: usize,
    pub field: PrimeField,
    pub classes: usize,
    /// Actions are drawn from `0..action_levels` in units of 1/4; few levels force ties.
    pub action_levels: i128,
    pub fill: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self { max_gens: 12, field: PrimeField::f2(), classes: 1, action_levels: 64, fill: 0.5 }
    }
}

/// Random valid Γ = {0} package: a random pairing conjugated by a random filtered basis change.
pub fn random_package<R: Rng>(rng: &mut R, spec: &RandomSpec) -> FloerPackage {
    let f = spec.field;
    let n = rng.gen_range(1..=spec.max_gens);
    let actions: Vec<Q> = (0..n).map(|_| Q::new(rng.gen_range(0..spec.action_levels), 4)).collect();
    let classes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..spec.classes)).collect();
    let mut d0 = vec![vec![0u32; n]; n];
    for c in 0..spec.classes {
        let mut members: Vec<usize> = (0..n).filter(|i| classes[*i] == c).collect();
        members.shuffle(rng);
        let mut k = 0;
        while k + 1 < members.len() {
            let (a, b) = (members[k], members[k + 1]);
            if actions[a] != actions[b] && rng.gen_bool(0.6) {
                let (hi, lo) = if actions[a] > actions[b] { (a, b) } else { (b, a) };
                d0[hi][lo] = rng.gen_range(1..f.p());
                k += 2;
            } else {
                k += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| actions[*a].cmp(&actions[*b]));
    let mut rank = vec![0usize; n];
    // Equal actions share an order level so the basis change never mixes them.
    let mut level = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && actions[order[pos - 1]] != actions[i] {
            level += 1;
        }
        rank[i] = level;
    }
    let mut v = vec![vec![0u32; n]; n];
    for i in 0..n {
        v[i][i] = 1;
        for k in 0..n {
            if rank[k] < rank[i] && classes[k] == classes[i] && rng.gen_bool(spec.fill) {
                v[i][k] = rng.gen_range(1..f.p());
            }
        }
    }
    let w = invert_unitriangular(&v, &rank, f);
    let d = matmul(&matmul(&v, &d0, f), &w, f);
    let gens = (0..n)
        .map(|i| Generator::new(format!("x{i}"), actions[i], format!("c{}", classes[i])))
        .collect();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if d[i][j] != 0 {
                entries.push((i, j, NovikovScalar::monomial(f, d[i][j] as i64, Q::from_integer(0))));
            }
        }
    }
    FloerPackage::new(f, PeriodGroup::trivial(), gens, entries).expect("well-formed")
}

/// Bars of one component: finite lengths (sorted) and infinite count.
pub type OracleBars = BTreeMap<String, (Vec<Q>, usize)>;

/// Standard left-to-right column reduction over F_p, columns ordered by action.
pub fn oracle_barcode(p: &FloerPackage) -> OracleBars {
    let f = p.field();
    let mut out = OracleBars::new();
    for class in p.classes() {
        let members: Vec<usize> = (0..p.len()).filter(|i| p.generators()[*i].class == class).collect();
        let mut sorted = members.clone();
        sorted.sort_by(|a, b| p.action(*a).cmp(p.action(*b)).then(a.cmp(b)));
        let pos: BTreeMap<usize, usize> = sorted.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        let m = sorted.len();
        let mut cols: Vec<Vec<u32>> = vec![vec![0; m]; m];
        for (c, &i) in sorted.iter().enumerate() {
            for (j, s) in p.row(i) {
                let coeff = s.terms().first().map(|t| t.1).unwrap_or(0);
                cols[c][pos[&j]] = coeff;
            }
        }
        let low = |col: &Vec<u32>| col.iter().rposition(|x| *x != 0);
        let mut pivot_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut finite = Vec::new();
        let mut paired = vec![false; m];
        for c in 0..m {
            while let Some(l) = low(&cols[c]) {
                match pivot_of.get(&l) {
                    Some(&c2) => {
                        let factor = f.mul(cols[c][l], f.inv(cols[c2][l]));
                        for r in 0..m {
                            let sub = f.mul(factor, cols[c2][r]);
                            cols[c][r] = f.sub(cols[c][r], sub);
                        }
                    }
                    None => {
                        pivot_of.insert(l, c);
                        paired[l] = true;
                        paired[c] = true;
                        finite.push(p.action(sorted[c]) - p.action(sorted[l]));
                        break;
                    }
                }
            }
        }
        finite.sort();
        let infinite = paired.iter().filter(|x| !**x).count();
        out.insert(class.to_string(), (finite, infinite));
    }
    out
}

pub fn as_oracle(b: &floer_core::Barcode) -> OracleBars {
    b.components.iter().map(|(c, bars)| (c.clone(), (bars.finite.clone(), bars.infinite))).collect()
}

/// Rank of ∂ over F_p by plain Gaussian elimination (Γ = {0}).
pub fn rank(p: &FloerPackage) -> usize {
    let f = p.field();
    let n = p.len();
    let mut m = vec![vec![0u32; n]; n];
    for (i, j, s) in p.entries() {
        m[i][j] = s.terms().first().map(|t| t.1).unwrap_or(0);
    }
    let mut r = 0;
    for c in 0..n {
        let Some(piv) = (r..n).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = f.inv(m[r][c]);
        for i in 0..n {
            if i != r && m[i][c] != 0 {
                let factor = f.mul(m[i][c], inv);
                for k in 0..n {
                    let sub = f.mul(factor, m[r][k]);
                    m[i][k] = f.sub(m[i][k], sub);
                }
            }
        }
        r += 1;
    }
    r
}

/// Recaps x_i to T^{g m_i} x_i: action A_i - g m_i, entries λ_ij T^{g(m_i - m_j)}.
pub fn recap<R: Rng>(rng: &mut R, p: &FloerPackage, g: Q, span: i64) -> FloerPackage {
    let m: Vec<i64> = (0..p.len()).map(|_| rng.gen_range(-span..=span)).collect();
    let gens = p
        .generators()
        .iter()
        .enumerate()
        .map(|(i, x)| Generator::new(x.label.clone(), x.action - g * Q::from_integer(m[i] as i128), x.class.clone()))
        .collect();
    let entries: Vec<_> = p
        .entries()
        .map(|(i, j, s)| (i, j, s.shift(&(g * Q::from_integer((m[i] - m[j]) as i128)))))
        .collect();
    FloerPackage::new(p.field(), PeriodGroup::new(vec![g]).unwrap(), gens, entries).expect("well-formed")
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}
