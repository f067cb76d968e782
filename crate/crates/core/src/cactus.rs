//! Cactus-cover lower bounds.
//!
//! A cactus configuration is a family of vertex-disjoint stems (simple paths
//! starting at an input) and cycles over input-reachable state vertices. The
//! largest coverable subset of a target set is found exactly with one
//! maximum-weight bipartite matching: every state picks one predecessor, which
//! is an input, a state, or the state itself (uncovered). Each predecessor is
//! used at most once, so the chosen edges form stems and cycles.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cdg::build_system_digraph;
use crate::error::{Error, Result};
use crate::graphkit::{
    max_matching_ordered, max_weighted_matching, reachable_from, BipartiteGraph, Digraph, EdgeKind,
    VertexKind, VertexTag,
};
use crate::model::{random_permutation, SparsityPattern, StructuredPair, TemporalNetwork};

/// Stems and cycles as vertex-id sequences of some digraph. Stems start with
/// their input vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Configuration {
    pub stems: Vec<Vec<usize>>,
    pub cycles: Vec<Vec<usize>>,
}

impl Configuration {
    /// Edges `(tail, head)` of all components, closing edges of cycles included.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for stem in &self.stems {
            out.extend(stem.windows(2).map(|w| (w[0], w[1])));
        }
        for cycle in &self.cycles {
            for (i, &v) in cycle.iter().enumerate() {
                out.push((v, cycle[(i + 1) % cycle.len()]));
            }
        }
        out
    }

    fn to_tags(&self, g: &Digraph) -> (Vec<Vec<VertexTag>>, Vec<Vec<VertexTag>>) {
        let conv = |c: &Vec<Vec<usize>>| -> Vec<Vec<VertexTag>> {
            c.iter()
                .map(|p| p.iter().map(|&v| *g.tag(v)).collect())
                .collect()
        };
        (conv(&self.stems), conv(&self.cycles))
    }
}

/// Configuration on the input-reachable part of `g` maximizing the number of
/// edges `(u, v)` with `credit(u, v)`. Inputs are the vertices tagged as inputs.
pub fn max_credit_configuration<F>(g: &Digraph, credit: F) -> Configuration
where
    F: Fn(usize, usize) -> bool,
{
    let inputs = g.vertices_where(VertexTag::is_input);
    let reach = reachable_from(g, &inputs).expect("input ids are valid");
    let left: Vec<usize> = reach.iter().copied().collect();
    let right: Vec<usize> = left
        .iter()
        .copied()
        .filter(|&v| g.tag(v).kind == VertexKind::State)
        .collect();
    if right.is_empty() {
        return Configuration::default();
    }
    let left_pos: BTreeMap<usize, usize> = left.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let right_pos: BTreeMap<usize, usize> =
        right.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Weight K dominates the credit total, so every maximum matching saturates
    // the right side.
    let k = (right.len() + 1) as f64;
    let mut bg = BipartiteGraph::new(left.len(), right.len());
    for &v in &right {
        bg.add_edge(left_pos[&v], right_pos[&v], k)
            .expect("in range");
    }
    for &u in &left {
        for (v, _) in g.successors(u) {
            if let Some(&r) = right_pos.get(&v) {
                let w = if credit(u, v) { 1.0 } else { 0.0 };
                bg.add_edge(left_pos[&u], r, k + w).expect("in range");
            }
        }
    }
    let matching = max_weighted_matching(&bg).expect("weights are nonnegative");

    let mut succ: BTreeMap<usize, usize> = BTreeMap::new();
    let mut has_pred = BTreeSet::new();
    for &(l, r) in &matching.pairs {
        let (u, v) = (left[l], right[r]);
        if u == v && g.edge(u, v).is_none() {
            continue;
        }
        succ.insert(u, v);
        has_pred.insert(v);
    }
    let mut config = Configuration::default();
    let mut placed = BTreeSet::new();
    for &u in &inputs {
        if !reach.contains(&u) || !succ.contains_key(&u) {
            continue;
        }
        let mut stem = vec![u];
        let mut cur = u;
        while let Some(&next) = succ.get(&cur) {
            stem.push(next);
            placed.insert(next);
            cur = next;
        }
        config.stems.push(stem);
    }
    for &v in &right {
        if placed.contains(&v) || !has_pred.contains(&v) {
            continue;
        }
        let mut cycle = vec![v];
        placed.insert(v);
        let mut cur = succ[&v];
        while cur != v {
            cycle.push(cur);
            placed.insert(cur);
            cur = succ[&cur];
        }
        config.cycles.push(cycle);
    }
    config
}

/// Largest cactus-coverable subset of an allowed node set in one subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CactusCover {
    /// Covered node indices (0-based).
    pub covered: BTreeSet<usize>,
    pub stems: Vec<Vec<VertexTag>>,
    pub cycles: Vec<Vec<VertexTag>>,
}

impl CactusCover {
    pub fn size(&self) -> usize {
        self.covered.len()
    }
}

/// Maximum-size subset of `allowed` covered by a cactus configuration in the
/// system digraph of `pair`. With `allowed` = all nodes its size is the generic
/// dimension of the reachable subspace of `pair`.
pub fn max_cactus_cover(pair: &StructuredPair, allowed: &BTreeSet<usize>) -> CactusCover {
    let sd = build_system_digraph(pair, 0);
    let g = &sd.graph;
    let config = max_credit_configuration(g, |_, v| allowed.contains(&g.tag(v).index));
    let covered = config
        .edges()
        .into_iter()
        .map(|(_, v)| g.tag(v).index)
        .filter(|v| allowed.contains(v))
        .collect();
    let (stems, cycles) = config.to_tags(g);
    CactusCover {
        covered,
        stems,
        cycles,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyStep {
    pub subsystem: usize,
    pub covered: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyResult {
    pub bound: usize,
    pub union: BTreeSet<usize>,
    pub steps: Vec<GreedyStep>,
}

/// Greedy union of per-subsystem covers. Each round takes, over the unused
/// subsystems, the largest cover inside the still-uncovered nodes (lowest index
/// on ties) and stops once a round adds nothing or every subsystem is used.
pub fn greedy_union_lower_bound(net: &TemporalNetwork) -> GreedyResult {
    let all: BTreeSet<usize> = (0..net.n()).collect();
    let mut remaining: Vec<usize> = (0..net.len()).collect();
    let mut union = BTreeSet::new();
    let mut steps = Vec::new();
    while !remaining.is_empty() {
        let open: BTreeSet<usize> = all.difference(&union).copied().collect();
        let mut best: Option<(usize, CactusCover)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let cover = max_cactus_cover(net.pair(i), &open);
            if best.as_ref().is_none_or(|(_, b)| cover.size() > b.size()) {
                best = Some((pos, cover));
            }
        }
        let (pos, cover) = best.expect("remaining is nonempty");
        let subsystem = remaining.remove(pos);
        let gained = cover.size();
        union.extend(cover.covered.iter().copied());
        steps.push(GreedyStep {
            subsystem,
            covered: cover.covered,
        });
        if gained == 0 {
            break;
        }
    }
    GreedyResult {
        bound: union.len(),
        union,
        steps,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyGuarantee {
    /// `(2N-3) / (N(N-1)) · opt`.
    pub ratio_bound: f64,
    /// `f(t)` for `t = 0..=N-2`.
    pub f: Vec<f64>,
}

impl GreedyGuarantee {
    pub fn best(&self) -> f64 {
        self.f.iter().copied().fold(self.ratio_bound, f64::max)
    }
}

/// Guaranteed greedy union sizes given the optimum and the first greedy pick.
pub fn greedy_guarantee(
    n_subsystems: usize,
    opt_size: usize,
    first_pick_size: usize,
) -> Result<GreedyGuarantee> {
    if n_subsystems < 2 {
        return Err(Error::BadN {
            n_subsystems,
            min: 2,
            max: usize::MAX,
        });
    }
    let nn = n_subsystems as f64;
    let opt = opt_size as f64;
    let first = first_pick_size as f64;
    let ratio_bound = (2.0 * nn - 3.0) / (nn * (nn - 1.0)) * opt;
    let f = (0..=n_subsystems - 2)
        .map(|t| {
            let tf = t as f64;
            let tail: f64 = (1..=t).map(|j| (nn - tf - 1.0) / (nn - j as f64)).sum();
            tf / (nn - 1.0) * opt + ((nn - tf - 1.0) / (nn - 1.0) + tail - tf) * first
        })
        .collect();
    Ok(GreedyGuarantee { ratio_bound, f })
}

/// Union of the subsystem digraphs plus switching edges `(v^i_j, v^k_j)`, `i < k`,
/// and its restriction to input-reachable vertices.
#[derive(Debug, Clone)]
pub struct SwitchingDigraph {
    pub raw: Digraph,
    pub pruned: Digraph,
}

pub fn build_switching_digraph(net: &TemporalNetwork) -> SwitchingDigraph {
    let n = net.n();
    let mut g = Digraph::new();
    for (i, pair) in net.pairs().iter().enumerate() {
        for j in 0..n {
            g.add_vertex(VertexTag::state(i, j));
        }
        for k in 0..pair.m() {
            g.add_vertex(VertexTag::input(i, k));
        }
    }
    let id = |g: &Digraph, t: VertexTag| g.id(&t).expect("vertex was added");
    for (i, pair) in net.pairs().iter().enumerate() {
        for (j, k) in pair.a().iter() {
            let (u, v) = (
                id(&g, VertexTag::state(i, k)),
                id(&g, VertexTag::state(i, j)),
            );
            g.add_edge(u, v, EdgeKind::Plain).expect("vertices exist");
        }
        for (j, k) in pair.b().iter() {
            let (u, v) = (
                id(&g, VertexTag::input(i, k)),
                id(&g, VertexTag::state(i, j)),
            );
            g.add_edge(u, v, EdgeKind::Plain).expect("vertices exist");
        }
    }
    for i in 0..net.len() {
        for k in i + 1..net.len() {
            for j in 0..n {
                let (u, v) = (
                    id(&g, VertexTag::state(i, j)),
                    id(&g, VertexTag::state(k, j)),
                );
                g.add_edge(u, v, EdgeKind::Switching)
                    .expect("vertices exist");
            }
        }
    }
    let inputs = g.vertices_where(VertexTag::is_input);
    let keep = reachable_from(&g, &inputs).expect("input ids are valid");
    let (pruned, _) = g.induced(&keep);
    SwitchingDigraph { raw: g, pruned }
}

/// Stems and cycles in the pruned switching digraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemporalCactus {
    pub stems: Vec<Vec<VertexTag>>,
    pub cycles: Vec<Vec<VertexTag>>,
    /// Covered node index mapped to the lowest subsystem copy covering it.
    pub covered: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemporalVerdict {
    pub ok: bool,
    pub violations: Vec<String>,
    /// Covered node indices, recomputed from the components.
    pub covered: BTreeSet<usize>,
}

/// Heads of non-switching component edges, by node index with the lowest copy.
fn covered_by_heads(edges: &[(VertexTag, VertexTag, EdgeKind)]) -> BTreeMap<usize, usize> {
    let mut covered: BTreeMap<usize, usize> = BTreeMap::new();
    for &(_, head, kind) in edges {
        if kind != EdgeKind::Switching {
            let copy = covered.entry(head.index).or_insert(head.subsystem);
            *copy = (*copy).min(head.subsystem);
        }
    }
    covered
}

/// Checks a temporal cactus against the pruned switching digraph of `net` and
/// recomputes the covered set. Only heads of non-switching edges count.
pub fn verify_temporal_cactus(
    net: &TemporalNetwork,
    candidate: &TemporalCactus,
) -> TemporalVerdict {
    let g = build_switching_digraph(net).pruned;
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let mut check_edge =
        |u: &VertexTag, v: &VertexTag, violations: &mut Vec<String>| match (g.id(u), g.id(v)) {
            (Some(a), Some(b)) => match g.edge(a, b) {
                Some(kind) => edges.push((*u, *v, kind)),
                None => violations.push(format!("missing edge {} -> {}", u.label(), v.label())),
            },
            _ => violations.push(format!(
                "edge {} -> {} leaves the input-reachable graph",
                u.label(),
                v.label()
            )),
        };
    for stem in &candidate.stems {
        match stem.first() {
            Some(t) if t.is_input() => {}
            _ => violations.push("stem does not start at an input".into()),
        }
        if stem.iter().skip(1).any(VertexTag::is_input) {
            violations.push("input vertex inside a stem".into());
        }
        for w in stem.windows(2) {
            check_edge(&w[0], &w[1], &mut violations);
        }
    }
    for cycle in &candidate.cycles {
        if cycle.is_empty() {
            violations.push("empty cycle".into());
            continue;
        }
        if cycle.iter().any(VertexTag::is_input) {
            violations.push("input vertex on a cycle".into());
        }
        for (i, v) in cycle.iter().enumerate() {
            check_edge(v, &cycle[(i + 1) % cycle.len()], &mut violations);
        }
    }
    for v in candidate.stems.iter().chain(&candidate.cycles).flatten() {
        if !seen.insert(*v) {
            violations.push(format!("not vertex-disjoint at {}", v.label()));
        }
    }
    let covered = covered_by_heads(&edges).into_keys().collect();
    TemporalVerdict {
        ok: violations.is_empty(),
        violations,
        covered,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemporalCactusBound {
    pub bound: usize,
    pub witness: TemporalCactus,
    /// Restart that produced the witness.
    pub restart: usize,
}

/// `B([A'_1, ..., A'_N, B_1, ..., B_N])` where `A'_i` drops rows and columns of
/// input-unreachable copies. Column blocks are tagged with their subsystem.
pub(crate) fn switching_pattern(
    net: &TemporalNetwork,
    sw: &SwitchingDigraph,
) -> (SparsityPattern, Vec<usize>) {
    let n = net.n();
    let mut blocks = Vec::new();
    let mut owner = Vec::new();
    for (i, pair) in net.pairs().iter().enumerate() {
        let alive: Vec<bool> = (0..n)
            .map(|j| sw.pruned.id(&VertexTag::state(i, j)).is_some())
            .collect();
        blocks.push(pair.a().masked(&alive, &alive));
        owner.extend(std::iter::repeat_n(i, n));
    }
    for (i, pair) in net.pairs().iter().enumerate() {
        blocks.push(pair.b().clone());
        owner.extend(std::iter::repeat_n(i, pair.m()));
    }
    let refs: Vec<&SparsityPattern> = blocks.iter().collect();
    (
        SparsityPattern::hconcat(n, &refs).expect("blocks have n rows"),
        owner,
    )
}

/// Lower bound on `gdim Ω̄` from temporal cactus configurations. Each restart
/// draws a maximum matching of the switching pattern (restart 0 in natural
/// order, later ones in seeded random orders), credits the matched copies, and
/// solves for the best configuration on the pruned switching digraph. The
/// largest number of distinct covered nodes over restarts is returned.
pub fn temporal_cactus_lower_bound(
    net: &TemporalNetwork,
    restarts: usize,
    seed: u64,
) -> Result<TemporalCactusBound> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be ≥ 1".into()));
    }
    let sw = build_switching_digraph(net);
    let g = &sw.pruned;
    let (pattern, owner) = switching_pattern(net, &sw);
    let bg = BipartiteGraph::from_pattern(&pattern);

    let mut best: Option<TemporalCactusBound> = None;
    for restart in 0..restarts {
        let (left, right) = if restart == 0 {
            ((0..bg.left()).collect(), (0..bg.right()).collect())
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            let left = random_permutation(&mut rng, bg.left());
            let mut right_rank = vec![0; bg.right()];
            for (rank, c) in random_permutation(&mut rng, bg.right())
                .into_iter()
                .enumerate()
            {
                right_rank[c] = rank;
            }
            (left, right_rank)
        };
        let matching = max_matching_ordered(&bg, &left, &right);
        let credited: BTreeSet<usize> = matching
            .pairs
            .iter()
            .filter_map(|&(row, col)| g.id(&VertexTag::state(owner[col], row)))
            .collect();
        let config = max_credit_configuration(g, |u, v| {
            g.edge(u, v) != Some(EdgeKind::Switching) && credited.contains(&v)
        });
        let edges: Vec<_> = config
            .edges()
            .into_iter()
            .map(|(u, v)| {
                (
                    *g.tag(u),
                    *g.tag(v),
                    g.edge(u, v).expect("configuration edge"),
                )
            })
            .collect();
        let covered = covered_by_heads(&edges);
        let bound = covered.len();
        if best.as_ref().is_none_or(|b| bound > b.bound) {
            let (stems, cycles) = config.to_tags(g);
            best = Some(TemporalCactusBound {
                bound,
                witness: TemporalCactus {
                    stems,
                    cycles,
                    covered,
                },
                restart,
            });
        }
    }
    Ok(best.expect("restarts ≥ 1"))
}

/// `max(greedy union, largest single-subsystem cover)`, a lower bound on `gdim Ω_h`.
pub fn omega_h_lower_bound(net: &TemporalNetwork) -> usize {
    let all: BTreeSet<usize> = (0..net.n()).collect();
    let single = net
        .pairs()
        .iter()
        .map(|p| max_cactus_cover(p, &all).size())
        .max()
        .unwrap_or(0);
    greedy_union_lower_bound(net).bound.max(single)
}
