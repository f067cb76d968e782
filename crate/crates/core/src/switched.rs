//! Switching-path search and a lower bound for the switched controllable subspace.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cdg::crp_check;
use crate::error::{Error, Result};
use crate::model::{random_permutation, SwitchingPath, TemporalNetwork};
use crate::oracle::{oracle_gdim_omegabar, OracleParams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthSummary {
    pub length: usize,
    /// Largest CDG linking over all paths of this length.
    pub best_linking: usize,
    pub paths_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrpSearch {
    /// Shortest path whose CDG links all `n` states. Its length is a lower
    /// bound on the shortest path that actually reaches the whole space.
    pub witness_path: Option<SwitchingPath>,
    pub min_length_lower_bound: Option<usize>,
    pub per_length: Vec<LengthSummary>,
}

/// Advances `digits` (base `radix`) to the next lexicographic tuple.
fn next_tuple(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Breadth-first over lengths `1..=l_max`, lexicographic within a length.
pub fn crp_min_length_search(net: &TemporalNetwork, l_max: usize) -> Result<CrpSearch> {
    if l_max == 0 {
        return Err(Error::InvalidParameter("l_max must be ≥ 1".into()));
    }
    let mut per_length = Vec::new();
    for length in 1..=l_max {
        let mut digits = vec![0; length];
        let mut summary = LengthSummary {
            length,
            best_linking: 0,
            paths_checked: 0,
        };
        loop {
            let path = SwitchingPath::new(digits.clone())?;
            let check = crp_check(net, &path)?;
            summary.paths_checked += 1;
            summary.best_linking = summary.best_linking.max(check.linking);
            if check.passes {
                per_length.push(summary);
                return Ok(CrpSearch {
                    witness_path: Some(path),
                    min_length_lower_bound: Some(length),
                    per_length,
                });
            }
            if !next_tuple(&mut digits, net.len()) {
                break;
            }
        }
        per_length.push(summary);
    }
    Ok(CrpSearch {
        witness_path: None,
        min_length_lower_bound: None,
        per_length,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchedBound {
    pub switched_dim_lower_bound: usize,
    pub best_permutation: SwitchingPath,
    pub permutations_evaluated: usize,
    pub exhaustive: bool,
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("p[i] qualifies");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Orders to evaluate: all `N!` in lexicographic order when that fits the
/// budget, otherwise the identity followed by seeded random orders. A smaller
/// budget always evaluates a subset of what a larger one does.
pub fn permutation_schedule(n_subsystems: usize, budget: usize, seed: u64) -> Vec<Vec<usize>> {
    let factorial = (1..=n_subsystems).try_fold(1usize, |acc, k| acc.checked_mul(k));
    let identity: Vec<usize> = (0..n_subsystems).collect();
    if factorial.is_some_and(|f| f <= budget) {
        let mut out = vec![identity.clone()];
        let mut p = identity;
        while next_permutation(&mut p) {
            out.push(p.clone());
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![identity];
    while out.len() < budget {
        out.push(random_permutation(&mut rng, n_subsystems));
    }
    out
}

/// Largest `gdim Ω̄` over reorderings of the subsystems. Each reordering is
/// a sub-sequence of some switching signal, so the result lower-bounds the
/// dimension of the switched controllable subspace.
pub fn switched_dim_lower_bound(
    net: &TemporalNetwork,
    budget: usize,
    params: &OracleParams,
) -> Result<SwitchedBound> {
    if budget == 0 {
        return Err(Error::InvalidParameter(
            "permutation budget must be ≥ 1".into(),
        ));
    }
    let schedule = permutation_schedule(net.len(), budget, params.seed);
    let exhaustive = (1..=net.len())
        .try_fold(1usize, |a, k| a.checked_mul(k))
        .is_some_and(|f| f <= budget);
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut evaluated = 0;
    for order in &schedule {
        evaluated += 1;
        let value = oracle_gdim_omegabar(&net.reordered(order)?, params)?.value;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, order.clone()));
        }
        if value == net.n() {
            break;
        }
    }
    let (bound, order) = best.expect("schedule is nonempty");
    Ok(SwitchedBound {
        switched_dim_lower_bound: bound,
        best_permutation: SwitchingPath::new(order)?,
        permutations_evaluated: evaluated,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{SparsityPattern, StructuredPair};

    #[test]
    fn example_search() {
        let found = crp_min_length_search(&fixtures::sw(), 3).unwrap();
        assert_eq!(found.witness_path.unwrap().one_based(), vec![1, 2, 1]);
        assert_eq!(found.min_length_lower_bound, Some(3));
        let none = crp_min_length_search(&fixtures::sw(), 2).unwrap();
        assert_eq!(none.witness_path, None);
        assert_eq!(none.per_length.len(), 2);
        assert_eq!(none.per_length[1].best_linking, 2);
        assert_eq!(none.per_length[1].paths_checked, 4);
        assert!(crp_min_length_search(&fixtures::sw(), 0).is_err());
    }

    #[test]
    fn single_controllable_subsystem_needs_one_step() {
        let a = SparsityPattern::new(3, 3, [(1, 0), (2, 1)]).unwrap();
        let b = SparsityPattern::new(3, 1, [(0, 0)]).unwrap();
        let net = TemporalNetwork::new(3, vec![StructuredPair::new(a, b).unwrap()]).unwrap();
        let found = crp_min_length_search(&net, 4).unwrap();
        assert_eq!(found.min_length_lower_bound, Some(1));
    }

    #[test]
    fn permutation_schedules() {
        let all = permutation_schedule(3, 6, 1);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[5], vec![2, 1, 0]);
        let some = permutation_schedule(4, 5, 9);
        assert_eq!(some.len(), 5);
        assert_eq!(some[0], vec![0, 1, 2, 3]);
        assert_eq!(permutation_schedule(4, 3, 9), some[..3].to_vec());
    }

    #[test]
    fn switched_bounds() {
        let p = OracleParams::default();
        let fig3 = switched_dim_lower_bound(&fixtures::fig3(), 10, &p).unwrap();
        assert_eq!(fig3.switched_dim_lower_bound, 4);
        assert!(fig3.exhaustive);

        let single = TemporalNetwork::new(3, vec![fixtures::ex1().pair(0).clone()]).unwrap();
        assert_eq!(
            switched_dim_lower_bound(&single, 1, &p)
                .unwrap()
                .switched_dim_lower_bound,
            2
        );

        let zero_b =
            StructuredPair::new(SparsityPattern::full(2, 2), SparsityPattern::zeros(2, 1)).unwrap();
        let net = TemporalNetwork::new(2, vec![zero_b.clone(), zero_b]).unwrap();
        assert_eq!(
            switched_dim_lower_bound(&net, 4, &p)
                .unwrap()
                .switched_dim_lower_bound,
            0
        );
        assert!(switched_dim_lower_bound(&net, 0, &p).is_err());
    }
}
