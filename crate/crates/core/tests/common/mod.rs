#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempreach::cdg::state_closure;
use tempreach::oracle::numeric_rank;
use tempreach::{Realization, SparsityPattern, StructuredPair, TemporalNetwork};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every product `A_last^{j_last} ⋯ A_k^{j_k} B_k` with exponents `< n`, in
/// the given subsystem order, stacked side by side.
pub fn explicit_words(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = a.first().map_or(0, DMatrix::nrows);
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    for k in 0..a.len() {
        let mut words = vec![b[k].clone()];
        for ak in &a[k..] {
            let mut next = Vec::new();
            for w in &words {
                let mut p = w.clone();
                for _ in 0..n {
                    next.push(p.clone());
                    p = ak * p;
                }
            }
            words = next;
        }
        blocks.extend(words);
    }
    let cols: usize = blocks.iter().map(DMatrix::ncols).sum();
    let mut out = DMatrix::zeros(n, cols);
    let mut at = 0;
    for blk in blocks {
        out.columns_mut(at, blk.ncols()).copy_from(&blk);
        at += blk.ncols();
    }
    out
}

/// Rank of the explicit `Ω̄` generator matrix.
pub fn explicit_omegabar_rank(r: &Realization, tol: f64) -> usize {
    numeric_rank(&explicit_words(&r.a_mats, &r.b_mats), tol)
}

/// Rank of the explicit `Θ̄` generator matrix (words in the reversed order).
pub fn explicit_thetabar_rank(r: &Realization, tol: f64) -> usize {
    let a: Vec<_> = r.a_mats.iter().rev().cloned().collect();
    let b: Vec<_> = r.b_mats.iter().rev().cloned().collect();
    numeric_rank(&explicit_words(&a, &b), tol)
}

/// Node sets (bit masks) a cactus configuration of `pair` can cover: each
/// state picks at most one predecessor, predecessors are used once, a picked
/// state predecessor is itself covered, and only input-reachable nodes count.
pub fn cover_sets(pair: &StructuredPair) -> BTreeSet<u32> {
    let n = pair.n();
    let closure = state_closure(pair);
    let reachable: Vec<bool> = (0..n)
        .map(|v| pair.b().iter().any(|(r, _)| closure[r][v]))
        .collect();
    let mut preds: Vec<Vec<Option<usize>>> = vec![vec![None]; n];
    for (j, k) in pair.a().iter() {
        preds[j].push(Some(k));
    }
    for (j, k) in pair.b().iter() {
        preds[j].push(Some(n + k));
    }
    let mut sets = BTreeSet::new();
    let mut choice = vec![0usize; n];
    loop {
        let pred: Vec<Option<usize>> = (0..n).map(|v| preds[v][choice[v]]).collect();
        let mut used = BTreeSet::new();
        let valid = pred.iter().flatten().all(|p| used.insert(*p))
            && pred.iter().flatten().all(|&p| p >= n || pred[p].is_some());
        if valid {
            sets.insert(
                (0..n)
                    .filter(|&v| pred[v].is_some() && reachable[v])
                    .fold(0u32, |m, v| m | 1 << v),
            );
        }
        let mut i = 0;
        loop {
            if i == n {
                return sets;
            }
            choice[i] += 1;
            if choice[i] < preds[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Optimum of the union problem: one cover per subsystem, largest union.
pub fn brute_union_optimum(net: &TemporalNetwork) -> usize {
    let mut unions: BTreeSet<u32> = BTreeSet::from([0]);
    for pair in net.pairs() {
        let sets = cover_sets(pair);
        unions = unions
            .iter()
            .flat_map(|&u| sets.iter().map(move |&s| u | s))
            .collect();
    }
    unions.into_iter().map(u32::count_ones).max().unwrap_or(0) as usize
}

/// Random pair whose input columns each have exactly one nonzero.
pub fn dedicated_pair(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> StructuredPair {
    let a = SparsityPattern::random(rng, n, n, density);
    let b = SparsityPattern::new(n, m, (0..m).map(|c| (rng.gen_range(0..n), c))).unwrap();
    StructuredPair::new(a, b).unwrap()
}

/// All `n × n` and `n × m` patterns, `m ≤ max_m`, as pairs.
pub fn all_pairs(n: usize, max_m: usize) -> Vec<StructuredPair> {
    let mut out = Vec::new();
    for m in 0..=max_m {
        for a_bits in 0u32..1 << (n * n) {
            for b_bits in 0u32..1 << (n * m) {
                let a = SparsityPattern::new(
                    n,
                    n,
                    (0..n * n)
                        .filter(|i| a_bits & 1 << i != 0)
                        .map(|i| (i / n, i % n)),
                )
                .unwrap();
                let b = SparsityPattern::new(
                    n,
                    m,
                    (0..n * m)
                        .filter(|i| b_bits & 1 << i != 0)
                        .map(|i| (i / m, i % m)),
                )
                .unwrap();
                out.push(StructuredPair::new(a, b).unwrap());
            }
        }
    }
    out
}
