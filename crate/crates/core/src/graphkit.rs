//! Graph kernel: tagged digraphs, reachability, bipartite matchings and
//! vertex-disjoint linkings.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SparsityPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    State,
    Input,
}

/// Identity of a vertex inside the constructions. `index` is the node index for
/// states and the input column for inputs (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexTag {
    pub kind: VertexKind,
    pub subsystem: usize,
    pub index: usize,
    pub layer: Option<usize>,
    pub copy: Option<usize>,
}

impl VertexTag {
    pub fn state(subsystem: usize, index: usize) -> Self {
        Self {
            kind: VertexKind::State,
            subsystem,
            index,
            layer: None,
            copy: None,
        }
    }

    pub fn input(subsystem: usize, index: usize) -> Self {
        Self {
            kind: VertexKind::Input,
            ..Self::state(subsystem, index)
        }
    }

    pub fn at_layer(mut self, layer: usize) -> Self {
        self.layer = Some(layer);
        self
    }

    pub fn with_copy(mut self, copy: usize) -> Self {
        self.copy = Some(copy);
        self
    }

    pub fn is_input(&self) -> bool {
        self.kind == VertexKind::Input
    }

    /// Short label used in DOT output, 1-based.
    pub fn label(&self) -> String {
        let mut s = match self.kind {
            VertexKind::State => format!("x{}^{}", self.index + 1, self.subsystem + 1),
            VertexKind::Input => format!("u{}^{}", self.index + 1, self.subsystem + 1),
        };
        if let Some(c) = self.copy {
            let _ = write!(s, " c{}", c + 1);
        }
        if let Some(t) = self.layer {
            let _ = write!(s, " t{t}");
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Plain,
    /// Edge between consecutive subsystems or layers.
    Cross,
    Switching,
}

/// Directed graph over tagged vertices. Vertex ids are dense `0..len`.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    tags: Vec<VertexTag>,
    ids: HashMap<VertexTag, usize>,
    adj: Vec<BTreeMap<usize, EdgeKind>>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex, or returns the existing id for an identical tag.
    pub fn add_vertex(&mut self, tag: VertexTag) -> usize {
        if let Some(&id) = self.ids.get(&tag) {
            return id;
        }
        let id = self.tags.len();
        self.tags.push(tag);
        self.ids.insert(tag, id);
        self.adj.push(BTreeMap::new());
        id
    }

    /// Adds `u -> v`. A repeated edge keeps its first kind.
    pub fn add_edge(&mut self, u: usize, v: usize, kind: EdgeKind) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        self.adj[u].entry(v).or_insert(kind);
        Ok(())
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.tags.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum()
    }

    pub fn tag(&self, v: usize) -> &VertexTag {
        &self.tags[v]
    }

    pub fn tags(&self) -> &[VertexTag] {
        &self.tags
    }

    pub fn id(&self, tag: &VertexTag) -> Option<usize> {
        self.ids.get(tag).copied()
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<EdgeKind> {
        self.adj.get(u)?.get(&v).copied()
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = (usize, EdgeKind)> + '_ {
        self.adj[u].iter().map(|(&v, &k)| (v, k))
    }

    /// All edges, sorted by tail then head.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeKind)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, out)| out.iter().map(move |(&v, &k)| (u, v, k)))
    }

    pub fn vertices_where<F: Fn(&VertexTag) -> bool>(&self, pred: F) -> Vec<usize> {
        (0..self.len()).filter(|&v| pred(&self.tags[v])).collect()
    }

    /// Induced subgraph on `keep`; returns the subgraph and the old-to-new id map.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> (Digraph, BTreeMap<usize, usize>) {
        let mut g = Digraph::new();
        let mut map = BTreeMap::new();
        for &v in keep {
            map.insert(v, g.add_vertex(self.tags[v]));
        }
        for (u, v, k) in self.edges() {
            if let (Some(&a), Some(&b)) = (map.get(&u), map.get(&v)) {
                g.adj[a].entry(b).or_insert(k);
            }
        }
        (g, map)
    }
}

/// Vertices reachable from `sources` by directed paths of length ≥ 0.
pub fn reachable_from(g: &Digraph, sources: &[usize]) -> Result<BTreeSet<usize>> {
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        g.check(s)?;
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for (v, _) in g.successors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    Ok((0..g.len()).filter(|&v| seen[v]).collect())
}

/// Bipartite graph with vertex ids `0..left` and `0..right` on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    adj: Vec<BTreeMap<usize, f64>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            adj: vec![BTreeMap::new(); left],
        }
    }

    /// `B(M)`: rows on the left, columns on the right, unit weights.
    pub fn from_pattern(p: &SparsityPattern) -> Self {
        let mut g = Self::new(p.rows(), p.cols());
        for (r, c) in p.iter() {
            g.adj[r].insert(c, 1.0);
        }
        g
    }

    /// Adds an edge; a repeated edge keeps the larger weight.
    pub fn add_edge(&mut self, l: usize, r: usize, weight: f64) -> Result<()> {
        if l >= self.left {
            return Err(Error::UnknownVertex(l));
        }
        if r >= self.right {
            return Err(Error::UnknownVertex(r));
        }
        let w = self.adj[l].entry(r).or_insert(weight);
        if weight > *w {
            *w = weight;
        }
        Ok(())
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn weight(&self, l: usize, r: usize) -> Option<f64> {
        self.adj.get(l)?.get(&r).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, out)| out.iter().map(move |(&r, &w)| (l, r, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum()
    }
}

/// A matching as `(left, right)` pairs sorted by left id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    pub size: usize,
    pub weight: f64,
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    fn from_pairs(g: &BipartiteGraph, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        let weight = pairs.iter().map(|&(l, r)| g.adj[l][&r]).sum();
        Self {
            size: pairs.len(),
            weight,
            pairs,
        }
    }

    /// Checks that all pairs are edges of `g` and pairwise disjoint.
    pub fn is_valid(&self, g: &BipartiteGraph) -> bool {
        let mut ls = BTreeSet::new();
        let mut rs = BTreeSet::new();
        self.pairs.len() == self.size
            && self
                .pairs
                .iter()
                .all(|&(l, r)| g.weight(l, r).is_some() && ls.insert(l) && rs.insert(r))
    }
}

/// Maximum-cardinality matching, scanning left vertices and their neighbours
/// in increasing id order.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    let left: Vec<usize> = (0..g.left).collect();
    let right: Vec<usize> = (0..g.right).collect();
    max_matching_ordered(g, &left, &right)
}

/// Maximum-cardinality matching where `left_order` fixes the order in which left
/// vertices are augmented and `right_rank[r]` the preference among neighbours.
/// Different orders give different maximum matchings of the same size.
pub fn max_matching_ordered(
    g: &BipartiteGraph,
    left_order: &[usize],
    right_rank: &[usize],
) -> Matching {
    let nbrs: Vec<Vec<usize>> = g
        .adj
        .iter()
        .map(|out| {
            let mut v: Vec<usize> = out.keys().copied().collect();
            v.sort_by_key(|&r| right_rank[r]);
            v
        })
        .collect();
    let mut match_r: Vec<Option<usize>> = vec![None; g.right];

    fn augment(
        l: usize,
        nbrs: &[Vec<usize>],
        match_r: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &r in &nbrs[l] {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if match_r[r].is_none_or(|l2| augment(l2, nbrs, match_r, visited)) {
                match_r[r] = Some(l);
                return true;
            }
        }
        false
    }

    for &l in left_order {
        let mut visited = vec![false; g.right];
        augment(l, &nbrs, &mut match_r, &mut visited);
    }
    let pairs = match_r
        .iter()
        .enumerate()
        .filter_map(|(r, l)| l.map(|l| (l, r)))
        .collect();
    Matching::from_pairs(g, pairs)
}

/// Generic rank of a pattern, the size of a maximum matching of `B(M)`.
pub fn generic_rank(p: &SparsityPattern) -> usize {
    max_matching(&BipartiteGraph::from_pattern(p)).size
}

/// Maximum-weight matching (not necessarily perfect) by the Hungarian method on
/// the square completion with zero-weight non-edges.
pub fn max_weighted_matching(g: &BipartiteGraph) -> Result<Matching> {
    for (l, r, w) in g.edges() {
        if w < 0.0 || w.is_nan() {
            return Err(Error::NegativeWeight {
                left: l,
                right: r,
                weight: w,
            });
        }
    }
    let size = g.left.max(g.right);
    if size == 0 || g.edge_count() == 0 {
        return Ok(Matching::from_pairs(g, Vec::new()));
    }
    let max_w = g.edges().map(|(_, _, w)| w).fold(0.0_f64, f64::max);
    let cost = |i: usize, j: usize| -> f64 {
        let w = if i < g.left && j < g.right {
            g.adj[i].get(&j).copied().unwrap_or(0.0)
        } else {
            0.0
        };
        max_w - w
    };

    // Jonker-style potentials, 1-based with a virtual column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; size + 1];
    let mut v = vec![0.0; size + 1];
    let mut p = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=size {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let pairs = (1..=size)
        .filter_map(|j| {
            let (l, r) = (p[j] - 1, j - 1);
            (l < g.left && r < g.right && g.adj[l].contains_key(&r)).then_some((l, r))
        })
        .collect();
    Ok(Matching::from_pairs(g, pairs))
}

/// Vertex-disjoint directed paths.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Linking {
    pub paths: Vec<Vec<usize>>,
}

impl Linking {
    pub fn size(&self) -> usize {
        self.paths.len()
    }

    /// Checks edges, endpoints and vertex-disjointness.
    pub fn verify(
        &self,
        g: &Digraph,
        sources: &[usize],
        sinks: &[usize],
    ) -> std::result::Result<(), String> {
        let sources: BTreeSet<usize> = sources.iter().copied().collect();
        let sinks: BTreeSet<usize> = sinks.iter().copied().collect();
        let mut used = BTreeSet::new();
        for (i, path) in self.paths.iter().enumerate() {
            let (Some(first), Some(last)) = (path.first(), path.last()) else {
                return Err(format!("path {i} is empty"));
            };
            if !sources.contains(first) {
                return Err(format!("path {i} does not start at a source"));
            }
            if !sinks.contains(last) {
                return Err(format!("path {i} does not end at a sink"));
            }
            for w in path.windows(2) {
                if g.edge(w[0], w[1]).is_none() {
                    return Err(format!("path {i} uses missing edge ({}, {})", w[0], w[1]));
                }
            }
            for &v in path {
                if !used.insert(v) {
                    return Err(format!("vertex {v} used twice"));
                }
            }
        }
        Ok(())
    }
}

struct FlowEdge {
    to: usize,
    cap: i32,
}

/// Unit-capacity Dinic network.
struct Dinic {
    edges: Vec<FlowEdge>,
    graph: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            graph: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, cap: i32) -> usize {
        let id = self.edges.len();
        self.edges.push(FlowEdge { to: v, cap });
        self.graph[u].push(id);
        self.edges.push(FlowEdge { to: u, cap: 0 });
        self.graph[v].push(id + 1);
        id
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.graph[u] {
                let FlowEdge { to, cap } = self.edges[e];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, f: i32) -> i32 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.graph[u].len() {
            let e = self.graph[u][self.iter[u]];
            let FlowEdge { to, cap } = self.edges[e];
            if cap > 0 && self.level[u] < self.level[to] {
                let d = self.dfs(to, t, f.min(cap));
                if d > 0 {
                    self.edges[e].cap -= d;
                    self.edges[e ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i32 {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, i32::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }
}

/// Maximum set of vertex-disjoint source-to-sink paths (vertex splitting plus
/// max-flow). A vertex that is both a source and a sink may form a path alone.
pub fn max_disjoint_linking(g: &Digraph, sources: &[usize], sinks: &[usize]) -> Result<Linking> {
    for &v in sources.iter().chain(sinks) {
        g.check(v)?;
    }
    let nv = g.len();
    let (s, t) = (2 * nv, 2 * nv + 1);
    let mut net = Dinic::new(2 * nv + 2);
    for v in 0..nv {
        net.add_edge(2 * v, 2 * v + 1, 1);
    }
    let mut arc = Vec::new();
    for (u, v, _) in g.edges() {
        arc.push((net.add_edge(2 * u + 1, 2 * v, 1), u, v));
    }
    let source_set: BTreeSet<usize> = sources.iter().copied().collect();
    let sink_set: BTreeSet<usize> = sinks.iter().copied().collect();
    for &v in &source_set {
        net.add_edge(s, 2 * v, 1);
    }
    let mut sink_arc = vec![None; nv];
    for &v in &sink_set {
        sink_arc[v] = Some(net.add_edge(2 * v + 1, t, 1));
    }
    net.max_flow(s, t);

    // Decompose: follow saturated arcs out of each source carrying flow.
    let mut next: Vec<Option<usize>> = vec![None; nv];
    for &(e, u, v) in &arc {
        if net.edges[e].cap == 0 {
            next[u] = Some(v);
        }
    }
    let ends_here = |v: usize| sink_arc[v].is_some_and(|e| net.edges[e].cap == 0);
    let mut paths = Vec::new();
    for &src in &source_set {
        let carries = net.graph[s]
            .iter()
            .any(|&e| net.edges[e].to == 2 * src && net.edges[e].cap == 0);
        if !carries {
            continue;
        }
        let mut path = vec![src];
        let mut cur = src;
        while !ends_here(cur) {
            cur = next[cur].expect("flow conservation");
            path.push(cur);
        }
        paths.push(path);
    }
    Ok(Linking { paths })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Vertices of the same layer are ranked together; cross and
/// switching edges are dashed; `highlight` edges are drawn bold.
pub fn digraph_to_dot(g: &Digraph, name: &str, highlight: &BTreeSet<(usize, usize)>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(name));
    out.push_str("  rankdir=LR;\n");
    for (v, tag) in g.tags.iter().enumerate() {
        let shape = if tag.is_input() { "box" } else { "ellipse" };
        let _ = writeln!(
            out,
            "  n{v} [label=\"{}\", shape={shape}];",
            dot_escape(&tag.label())
        );
    }
    // Copy-indexed vertices share a rank per layer; others rank per subsystem and layer.
    let mut layers: BTreeMap<(Option<usize>, usize), Vec<usize>> = BTreeMap::new();
    for (v, tag) in g.tags.iter().enumerate() {
        if let Some(l) = tag.layer {
            let block = tag.copy.is_none().then_some(tag.subsystem);
            layers.entry((block, l)).or_default().push(v);
        }
    }
    for members in layers.values() {
        let ids: Vec<String> = members.iter().map(|v| format!("n{v}")).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", ids.join("; "));
    }
    for (u, v, kind) in g.edges() {
        let mut attrs = Vec::new();
        if kind != EdgeKind::Plain {
            attrs.push("style=dashed");
        }
        if highlight.contains(&(u, v)) {
            attrs.push("penwidth=3");
            attrs.push("color=red");
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  n{u} -> n{v};");
        } else {
            let _ = writeln!(out, "  n{u} -> n{v} [{}];", attrs.join(", "));
        }
    }
    out.push_str("}\n");
    out
}

/// Graphviz rendering of a bipartite graph with weights as edge labels.
pub fn bipartite_to_dot(g: &BipartiteGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(name));
    out.push_str("  rankdir=LR;\n");
    let left: Vec<String> = (0..g.left).map(|l| format!("l{l}")).collect();
    let right: Vec<String> = (0..g.right).map(|r| format!("r{r}")).collect();
    for id in left.iter().chain(&right) {
        let _ = writeln!(out, "  {id};");
    }
    for side in [&left, &right] {
        if !side.is_empty() {
            let _ = writeln!(out, "  {{ rank=same; {}; }}", side.join("; "));
        }
    }
    for (l, r, w) in g.edges() {
        let _ = writeln!(out, "  l{l} -> r{r} [label=\"{w}\"];");
    }
    out.push_str("}\n");
    out
}
