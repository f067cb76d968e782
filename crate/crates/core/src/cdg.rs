//! System digraphs and the cascaded dynamic graph (CDG).
//!
//! The CDG chains one dynamic graph per subsystem. Block `i` unrolls
//! `(A_i, B_i)` over `n` time steps; consecutive blocks are joined at their last
//! layer by edges `(v^{i-1}_{k,n}, v^i_{j,n})` whenever `G(A_i)` has a path from
//! `k` to `j` (always for `k = j`). A maximum linking from the inputs to the
//! last layer of the final block bounds the generic dimension of the reachable
//! subspace from above.

use serde::Serialize;

use crate::error::Result;
use crate::graphkit::{max_disjoint_linking, Digraph, EdgeKind, Linking, VertexKind, VertexTag};
use crate::model::{StructuredPair, SwitchingPath, TemporalNetwork};

/// System digraph of one subsystem: ids `0..n` are states, `n..n+m` inputs.
#[derive(Debug, Clone)]
pub struct SystemDigraph {
    pub graph: Digraph,
    pub n: usize,
    pub m: usize,
}

impl SystemDigraph {
    pub fn state(&self, j: usize) -> usize {
        j
    }

    pub fn input(&self, k: usize) -> usize {
        self.n + k
    }

    pub fn inputs(&self) -> Vec<usize> {
        (self.n..self.n + self.m).collect()
    }
}

/// Edge `(v_k, v_j)` for `A(j,k) ≠ 0` and `(u_k, v_j)` for `B(j,k) ≠ 0`.
pub fn build_system_digraph(pair: &StructuredPair, subsystem: usize) -> SystemDigraph {
    let (n, m) = (pair.n(), pair.m());
    let mut g = Digraph::new();
    for j in 0..n {
        g.add_vertex(VertexTag::state(subsystem, j));
    }
    for k in 0..m {
        g.add_vertex(VertexTag::input(subsystem, k));
    }
    for (j, k) in pair.a().iter() {
        g.add_edge(k, j, EdgeKind::Plain)
            .expect("state vertices exist");
    }
    for (j, k) in pair.b().iter() {
        g.add_edge(n + k, j, EdgeKind::Plain)
            .expect("input vertices exist");
    }
    SystemDigraph { graph: g, n, m }
}

/// `closure[k][j]` is true when `G(A)` has a path (length ≥ 0) from `v_k` to `v_j`.
pub fn state_closure(pair: &StructuredPair) -> Vec<Vec<bool>> {
    let n = pair.n();
    let mut succ = vec![Vec::new(); n];
    for (j, k) in pair.a().iter() {
        succ[k].push(j);
    }
    (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &succ[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Cascaded dynamic graph with its source (all inputs) and sink sets.
#[derive(Debug, Clone)]
pub struct Cdg {
    pub graph: Digraph,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub blocks: usize,
}

impl Cdg {
    pub fn cross_edges(&self) -> Vec<(usize, usize)> {
        self.graph
            .edges()
            .filter(|&(_, _, k)| k == EdgeKind::Cross)
            .map(|(u, v, _)| (u, v))
            .collect()
    }
}

fn build(n: usize, pairs: &[&StructuredPair], self_pairs_only: bool) -> Cdg {
    let mut g = Digraph::new();
    let state = |i: usize, j: usize, t: usize| VertexTag::state(i, j).at_layer(t);
    let input = |i: usize, k: usize, t: usize| VertexTag::input(i, k).at_layer(t);
    for (i, pair) in pairs.iter().enumerate() {
        for t in 1..=n {
            for j in 0..n {
                g.add_vertex(state(i, j, t));
            }
        }
        for t in 0..n {
            for k in 0..pair.m() {
                g.add_vertex(input(i, k, t));
            }
        }
    }
    let id = |g: &Digraph, tag: VertexTag| g.id(&tag).expect("vertex was added");
    for (i, pair) in pairs.iter().enumerate() {
        for t in 1..n {
            for (k, j) in pair.a().iter() {
                let (u, v) = (id(&g, state(i, j, t)), id(&g, state(i, k, t + 1)));
                g.add_edge(u, v, EdgeKind::Plain).expect("vertices exist");
            }
        }
        for t in 0..n {
            for (k, j) in pair.b().iter() {
                let (u, v) = (id(&g, input(i, j, t)), id(&g, state(i, k, t + 1)));
                g.add_edge(u, v, EdgeKind::Plain).expect("vertices exist");
            }
        }
        if i > 0 {
            let closure = state_closure(pair);
            for (k, row) in closure.iter().enumerate() {
                for (j, &path) in row.iter().enumerate() {
                    if path && (!self_pairs_only || k == j) {
                        let (u, v) = (id(&g, state(i - 1, k, n)), id(&g, state(i, j, n)));
                        g.add_edge(u, v, EdgeKind::Cross).expect("vertices exist");
                    }
                }
            }
        }
    }
    let sources = g.vertices_where(|t| t.kind == VertexKind::Input);
    let last = pairs.len().saturating_sub(1);
    let sinks = if pairs.is_empty() {
        Vec::new()
    } else {
        (0..n).map(|j| id(&g, state(last, j, n))).collect()
    };
    Cdg {
        graph: g,
        sources,
        sinks,
        blocks: pairs.len(),
    }
}

pub fn build_cdg(net: &TemporalNetwork) -> Cdg {
    let pairs: Vec<&StructuredPair> = net.pairs().iter().collect();
    build(net.n(), &pairs, false)
}

/// CDG variant joining blocks only by the self pairs `(v^{i-1}_{k,n}, v^i_{k,n})`,
/// the graph of the reachability matrix with all durations set to zero.
pub fn build_cdg_self_pairs(net: &TemporalNetwork) -> Cdg {
    let pairs: Vec<&StructuredPair> = net.pairs().iter().collect();
    build(net.n(), &pairs, true)
}

/// CDG of the network whose `m`-th pair is a fresh copy of pair `path[m]`.
pub fn build_cdg_for_path(net: &TemporalNetwork, path: &SwitchingPath) -> Result<Cdg> {
    path.check(net)?;
    let pairs: Vec<&StructuredPair> = path.indices().iter().map(|&i| net.pair(i)).collect();
    Ok(build(net.n(), &pairs, false))
}

#[derive(Debug, Clone, Serialize)]
pub struct CdgBound {
    pub bound: usize,
    pub witness: Linking,
    /// For `N = 2` only: the smaller of `bound` and the self-pair CDG bound.
    pub bound_n2_refined: Option<usize>,
}

fn linking(cdg: &Cdg) -> Linking {
    max_disjoint_linking(&cdg.graph, &cdg.sources, &cdg.sinks).expect("sources and sinks exist")
}

/// Maximum linking size in the CDG, an upper bound on `gdim Ω_h`.
pub fn cdg_upper_bound(net: &TemporalNetwork) -> CdgBound {
    let witness = linking(&build_cdg(net));
    let bound = witness.size();
    let bound_n2_refined =
        (net.len() == 2).then(|| bound.min(linking(&build_cdg_self_pairs(net)).size()));
    CdgBound {
        bound,
        witness,
        bound_n2_refined,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrpCheck {
    pub passes: bool,
    pub linking: usize,
}

/// Necessary condition for a switching path to reach the whole state space:
/// the CDG along the path has a linking of size `n`.
pub fn crp_check(net: &TemporalNetwork, path: &SwitchingPath) -> Result<CrpCheck> {
    let size = linking(&build_cdg_for_path(net, path)?).size();
    Ok(CrpCheck {
        passes: size == net.n(),
        linking: size,
    })
}
