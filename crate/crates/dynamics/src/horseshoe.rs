//! Linear symbolic horseshoe: the full shift on s symbols with expansion rate λ.

use std::collections::BTreeSet;

use crate::orbits::{OrbitData, OrbitRecord, OrbitTable, SearchStats, Stability};

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicHorseshoe {
    pub symbols: usize,
    /// Action contributed by each symbol; the action of a word is the sum over its letters.
    pub weights: Vec<f64>,
    pub expansion: f64,
}

impl SymbolicHorseshoe {
    /// Weights 1, φ, √2, √3, √5, ... (rationally independent for the first two).
    pub fn new(symbols: usize) -> Self {
        assert!(symbols >= 2, "a horseshoe needs at least two symbols");
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut weights = vec![1.0, phi];
        let mut p = 2u32;
        while weights.len() < symbols {
            if (2..p).all(|d| !p.is_multiple_of(d)) {
                weights.push((p as f64).sqrt());
            }
            p += 1;
        }
        Self { symbols, weights, expansion: 3.0 }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), self.symbols);
        self.weights = weights;
        self
    }

    pub fn word_action(&self, word: &[u8]) -> f64 {
        word.iter().map(|&c| self.weights[c as usize]).sum()
    }

    /// All words of length k, as base-s digits of 0..s^k.
    pub fn words(&self, k: usize) -> impl Iterator<Item = Vec<u8>> + '_ {
        let s = self.symbols as u64;
        (0..s.pow(k as u32)).map(move |mut n| {
            let mut w = vec![0u8; k];
            for c in w.iter_mut().rev() {
                *c = (n % s) as u8;
                n /= s;
            }
            w
        })
    }
}

pub fn minimal_period(word: &[u8]) -> usize {
    let k = word.len();
    (1..=k).find(|d| k.is_multiple_of(*d) && (0..k).all(|i| word[i] == word[(i + d) % k])).unwrap_or(k)
}

/// Lexicographically least rotation.
pub fn canonical_rotation(word: &[u8]) -> Vec<u8> {
    let k = word.len();
    (0..k).map(|r| word[r..].iter().chain(&word[..r]).copied().collect::<Vec<u8>>()).min().unwrap_or_default()
}

/// One record per cyclic orbit of k-periodic words; all have monodromy trace λ^k + λ^{-k}.
pub fn horseshoe_orbit_table(h: &SymbolicHorseshoe, k: usize) -> OrbitTable {
    let mut seen = BTreeSet::new();
    for w in h.words(k) {
        seen.insert(canonical_rotation(&w));
    }
    let trace = h.expansion.powi(k as i32) + h.expansion.powi(-(k as i32));
    let records = seen
        .into_iter()
        .map(|word| OrbitRecord {
            period: k,
            minimal_period: minimal_period(&word),
            class: "0".to_string(),
            action: h.word_action(&word),
            trace,
            residue: (2.0 - trace) / 4.0,
            stability: Stability::Hyperbolic,
            residual: 0.0,
            morse_index: None,
            data: OrbitData::Symbolic { word },
        })
        .collect();
    OrbitTable {
        period: k,
        records,
        degenerate: false,
        excluded_parabolic: 0,
        partial: false,
        stats: SearchStats::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_and_periods() {
        assert_eq!(canonical_rotation(&[1, 0, 1, 1]), vec![0, 1, 1, 1]);
        assert_eq!(minimal_period(&[0, 1, 0, 1]), 2);
        assert_eq!(minimal_period(&[0, 0, 1]), 3);
        assert_eq!(minimal_period(&[1]), 1);
    }

    #[test]
    fn points_count_full_shift() {
        let h = SymbolicHorseshoe::new(2);
        for k in 1..=12 {
            assert_eq!(horseshoe_orbit_table(&h, k).point_count(), 1 << k);
        }
        let h3 = SymbolicHorseshoe::new(3);
        assert_eq!(horseshoe_orbit_table(&h3, 5).point_count(), 243);
    }

    #[test]
    fn default_weights() {
        let h = SymbolicHorseshoe::new(4);
        assert_eq!(h.weights.len(), 4);
        assert!((h.weights[2] - 2f64.sqrt()).abs() < 1e-15 && (h.weights[3] - 3f64.sqrt()).abs() < 1e-15);
    }
}
