//! Multi-layer dynamic graph (MDG) and the full-dimension necessary check.
//!
//! Layers run from `l_0 = N(n-1)` down to `0`. Layer `i ≥ 1` holds one copy of
//! every state per subsystem and, in copy `p`, the inputs of subsystems
//! `1..=p`. An edge from copy `k` of layer `i` to copy `q ≥ k` of layer `i-1`
//! follows a nonzero of `A_k`; layer 0 merges all state copies. Paths from
//! inputs to layer 0 mirror the products `A_N^{j_N} ⋯ A_k^{j_k} B_k`, so a
//! maximum linking bounds `gdim Ω̄` from above.

use serde::Serialize;

use crate::cactus::{build_switching_digraph, switching_pattern};
use crate::graphkit::{
    generic_rank, max_disjoint_linking, Digraph, EdgeKind, Linking, VertexKind, VertexTag,
};
use crate::model::TemporalNetwork;

#[derive(Debug, Clone)]
pub struct Mdg {
    pub graph: Digraph,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    /// `l_0 = N(n-1)`; layers are `0..=top_layer`.
    pub top_layer: usize,
}

impl Mdg {
    pub fn layer_size(&self, layer: usize) -> usize {
        self.graph
            .tags()
            .iter()
            .filter(|t| t.layer == Some(layer))
            .count()
    }
}

fn state_tag(layer: usize, copy: usize, j: usize) -> VertexTag {
    if layer == 0 {
        VertexTag::state(0, j).at_layer(0)
    } else {
        VertexTag::state(copy, j).at_layer(layer).with_copy(copy)
    }
}

pub fn build_mdg(net: &TemporalNetwork) -> Mdg {
    let (n, big_n) = (net.n(), net.len());
    let top = big_n * n.saturating_sub(1);
    let mut g = Digraph::new();
    for layer in (0..=top).rev() {
        let copies = if layer == 0 { 1 } else { big_n };
        for copy in 0..copies {
            for j in 0..n {
                g.add_vertex(state_tag(layer, copy, j));
            }
        }
        if layer == 0 {
            for (t, pair) in net.pairs().iter().enumerate() {
                for k in 0..pair.m() {
                    g.add_vertex(VertexTag::input(t, k).at_layer(0).with_copy(t));
                }
            }
        } else {
            for p in 0..big_n {
                for (t, pair) in net.pairs().iter().enumerate().take(p + 1) {
                    for k in 0..pair.m() {
                        g.add_vertex(VertexTag::input(t, k).at_layer(layer).with_copy(p));
                    }
                }
            }
        }
    }
    let id = |g: &Digraph, t: VertexTag| g.id(&t).expect("vertex was added");
    for layer in (0..=top).rev() {
        // Inputs feed the state copy that carries them.
        for p in 0..big_n {
            for (t, pair) in net.pairs().iter().enumerate().take(p + 1) {
                if layer == 0 && t != p {
                    continue;
                }
                for (q, k) in pair.b().iter() {
                    let u = id(&g, VertexTag::input(t, k).at_layer(layer).with_copy(p));
                    let v = id(&g, state_tag(layer, p, q));
                    g.add_edge(u, v, EdgeKind::Plain).expect("vertices exist");
                }
            }
        }
        if layer == 0 {
            continue;
        }
        for (k, pair) in net.pairs().iter().enumerate() {
            for q in k..big_n {
                for (p, j) in pair.a().iter() {
                    let u = id(&g, state_tag(layer, k, j));
                    let v = id(&g, state_tag(layer - 1, q, p));
                    g.add_edge(u, v, EdgeKind::Cross).expect("vertices exist");
                }
            }
        }
    }
    let sources = g.vertices_where(|t| t.kind == VertexKind::Input);
    let sinks = (0..n).map(|j| id(&g, state_tag(0, 0, j))).collect();
    Mdg {
        graph: g,
        sources,
        sinks,
        top_layer: top,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MdgBound {
    pub bound: usize,
    pub witness: Linking,
}

/// Maximum linking from all inputs to the layer-0 states, an upper bound on `gdim Ω̄`.
pub fn mdg_upper_bound(net: &TemporalNetwork) -> MdgBound {
    let mdg = build_mdg(net);
    let witness = max_disjoint_linking(&mdg.graph, &mdg.sources, &mdg.sinks)
        .expect("sources and sinks exist");
    MdgBound {
        bound: witness.size(),
        witness,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NecessaryCheck {
    pub passes: bool,
    pub grank: usize,
}

/// Necessary condition for `gdim Ω̄ = n`: `grank [A'_1, ..., A'_N, B_1, ..., B_N] = n`,
/// where `A'_i` drops rows and columns of input-unreachable copies.
pub fn full_dim_necessary_check(net: &TemporalNetwork) -> NecessaryCheck {
    let sw = build_switching_digraph(net);
    let (pattern, _) = switching_pattern(net, &sw);
    let grank = generic_rank(&pattern);
    NecessaryCheck {
        passes: grank == net.n(),
        grank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{SparsityPattern, StructuredPair};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(n: usize, a: &[(usize, usize)], m: usize, b: &[(usize, usize)]) -> StructuredPair {
        StructuredPair::new(
            SparsityPattern::new(n, n, a.iter().copied()).unwrap(),
            SparsityPattern::new(n, m, b.iter().copied()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn layer_sizes() {
        let net = fixtures::fig2();
        let mdg = build_mdg(&net);
        assert_eq!(mdg.top_layer, 6);
        assert_eq!(mdg.layer_size(0), 6);
        for layer in 1..=6 {
            // nN + m_1 + (m_1 + m_2)
            assert_eq!(mdg.layer_size(layer), 11);
        }
        let ex1 = build_mdg(&fixtures::ex1());
        assert_eq!(ex1.top_layer, 4);
        assert_eq!(ex1.layer_size(5), 0);
    }

    #[test]
    fn single_subsystem_has_n_minus_one_upper_layers() {
        let net = TemporalNetwork::new(3, vec![fixtures::ex1().pair(0).clone()]).unwrap();
        let mdg = build_mdg(&net);
        assert_eq!(mdg.top_layer, 2);
        assert_eq!(mdg.layer_size(1), 4);
    }

    #[test]
    fn bounds_on_fixtures() {
        assert_eq!(mdg_upper_bound(&fixtures::ex1()).bound, 3);
        assert_eq!(mdg_upper_bound(&fixtures::fig2()).bound, 4);
        let no_inputs = TemporalNetwork::new(2, vec![pair(2, &[(1, 0)], 0, &[])]).unwrap();
        assert_eq!(mdg_upper_bound(&no_inputs).bound, 0);
    }

    #[test]
    fn necessary_check_cases() {
        assert_eq!(
            full_dim_necessary_check(&fixtures::ex1()),
            NecessaryCheck {
                passes: true,
                grank: 3
            }
        );
        let isolated = TemporalNetwork::new(
            3,
            vec![pair(3, &[(1, 0)], 1, &[(0, 0)]), pair(3, &[(1, 0)], 0, &[])],
        )
        .unwrap();
        assert!(!full_dim_necessary_check(&isolated).passes);
        let chain =
            TemporalNetwork::new(3, vec![pair(3, &[(1, 0), (2, 1)], 1, &[(0, 0)])]).unwrap();
        assert!(full_dim_necessary_check(&chain).passes);
    }

    proptest! {
        #[test]
        fn full_linking_implies_necessary_check(seed in any::<u64>(), n in 1usize..5, big_n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let net = TemporalNetwork::random(&mut rng, n, big_n, (0, 2), 0.4);
            let b = mdg_upper_bound(&net);
            let mdg = build_mdg(&net);
            prop_assert!(b.witness.verify(&mdg.graph, &mdg.sources, &mdg.sinks).is_ok());
            prop_assert!(b.bound <= n);
            if b.bound == n {
                prop_assert!(full_dim_necessary_check(&net).passes);
            }
        }

        #[test]
        fn vertex_count_below_cubic_bound(seed in any::<u64>(), n in 1usize..6, big_n in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut budget = n;
            let pairs = (0..big_n)
                .map(|_| {
                    let m = rng.gen_range(0..=budget.min(2));
                    budget -= m;
                    StructuredPair::random(&mut rng, n, m, 0.3)
                })
                .collect();
            let net = TemporalNetwork::new(n, pairs).unwrap();
            let mdg = build_mdg(&net);
            prop_assert!(mdg.graph.len() < big_n.pow(3) * n * n);
        }
    }
}
