//! Bi-colored multigraphs, the `(k,g)` counting condition and fan diagrams.
//!
//! Vertices are bodies, black edges are primitive blind constraints and red
//! edges are primitive angular constraints. Vertices are 0-based in code;
//! vertex `0` is the body pinned by the tie-down. File formats and reports
//! use 1-based vertex numbers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// Stable identifier of an edge, independent of its position in the edge list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    Red,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
    pub color: Color,
}

impl Edge {
    pub fn is_red(&self) -> bool {
        self.color == Color::Red
    }

    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// Endpoints ordered so that the first is the smaller index.
    pub fn ordered(&self) -> (Vertex, Vertex) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("edge {id} has endpoint {vertex} outside 1..={n}")]
    VertexOutOfRange { id: EdgeId, vertex: Vertex, n: usize },
    #[error("edge {id} is a self-loop at vertex {vertex}")]
    SelfLoop { id: EdgeId, vertex: Vertex },
    #[error("edge id {0} is used more than once")]
    DuplicateEdgeId(EdgeId),
    #[error("invalid sparsity parameters k={k}, g={g}: need k >= 1 and 0 < g <= k")]
    InvalidParams { k: usize, g: usize },
    #[error("fan enumeration is limited to {limit} vertices, graph has {n}")]
    SizeLimitExceeded { n: usize, limit: usize },
}

/// `H = (V, B ⊔ R)`: a multigraph whose edges are black or red.
///
/// Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiColoredMultigraph {
    n: usize,
    edges: Vec<Edge>,
    index: HashMap<EdgeId, usize>,
}

impl BiColoredMultigraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut index = HashMap::with_capacity(edges.len());
        for (pos, e) in edges.iter().enumerate() {
            for vertex in [e.u, e.v] {
                if vertex >= n {
                    return Err(GraphError::VertexOutOfRange { id: e.id, vertex: vertex + 1, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { id: e.id, vertex: e.u + 1 });
            }
            if index.insert(e.id, pos).is_some() {
                return Err(GraphError::DuplicateEdgeId(e.id));
            }
        }
        Ok(BiColoredMultigraph { n, edges, index })
    }

    pub fn builder(n: usize) -> GraphBuilder {
        GraphBuilder { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn red_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_red()).count()
    }

    pub fn black_count(&self) -> usize {
        self.m() - self.red_count()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.index.get(&id).map(|&i| &self.edges[i])
    }

    /// Position of `id` in the edge list.
    pub fn position(&self, id: EdgeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    /// Same vertices, edges reordered by `order` (a permutation of positions).
    pub fn reordered(&self, order: &[usize]) -> Self {
        let edges = order.iter().map(|&i| self.edges[i].clone()).collect();
        BiColoredMultigraph::new(self.n, edges).expect("a permutation of a valid edge list is valid")
    }

    /// Subgraph on the same vertex set keeping only the listed edges.
    pub fn restricted(&self, keep: &[EdgeId]) -> Self {
        let edges = keep.iter().filter_map(|&id| self.edge(id).cloned()).collect();
        BiColoredMultigraph::new(self.n, edges).expect("a subset of a valid edge list is valid")
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        let mut components = self.n;
        for e in &self.edges {
            if uf.union(e.u, e.v) {
                components -= 1;
            }
        }
        components == 1
    }
}

/// Incremental construction with automatically numbered edges.
#[derive(Debug)]
pub struct GraphBuilder {
    n: usize,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn edge(mut self, u: Vertex, v: Vertex, color: Color) -> Self {
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge { id, u, v, color });
        self
    }

    pub fn black(self, u: Vertex, v: Vertex) -> Self {
        self.edge(u, v, Color::Black)
    }

    pub fn red(self, u: Vertex, v: Vertex) -> Self {
        self.edge(u, v, Color::Red)
    }

    pub fn build(self) -> Result<BiColoredMultigraph, GraphError> {
        BiColoredMultigraph::new(self.n, self.edges)
    }
}

/// `(k, g)`: label length per body and the length of the angular sub-block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparsityParams {
    k: usize,
    g: usize,
}

impl SparsityParams {
    /// Three-dimensional body-and-cad frameworks.
    pub const BODY_AND_CAD: SparsityParams = SparsityParams { k: 6, g: 3 };

    pub fn new(k: usize, g: usize) -> Result<Self, GraphError> {
        if k == 0 || g == 0 || g > k {
            return Err(GraphError::InvalidParams { k, g });
        }
        Ok(SparsityParams { k, g })
    }

    pub fn k(self) -> usize {
        self.k
    }

    pub fn g(self) -> usize {
        self.g
    }

    /// Number of tree classes that accept only black edges.
    pub fn black_only(self) -> usize {
        self.k - self.g
    }

    /// Whether tree class `class` (0-based) may hold an edge of `color`.
    pub fn admits(self, class: usize, color: Color) -> bool {
        class < self.k && (color == Color::Black || class >= self.black_only())
    }

    /// `k(n - 1)`: the rank of a rigid frame on `n` bodies.
    pub fn full_rank(self, n: usize) -> usize {
        self.k * n.saturating_sub(1)
    }
}

/// `m = kn - k` and `m_R <= gn - g`.
pub fn is_kg_counted(graph: &BiColoredMultigraph, params: SparsityParams) -> bool {
    let n = graph.n();
    graph.m() == params.full_rank(n) && graph.red_count() <= params.g() * (n - 1)
}

/// Union-find over `0..n` with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// A distinct `(k,g)`-fan, represented by its fan diagram.
///
/// `groups[i - 1]` lists the `k` edges whose tail is vertex `i`, for
/// `i = 1..n`; vertex `0` has no group. Edges within a group keep edge-list
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FanDiagram {
    pub groups: Vec<Vec<EdgeId>>,
}

impl FanDiagram {
    /// Tail vertex of every edge under the diagram's orientation.
    pub fn orientation(&self) -> BTreeMap<EdgeId, Vertex> {
        self.groups.iter().enumerate().flat_map(|(i, group)| group.iter().map(move |&e| (e, i + 1))).collect()
    }
}

/// Default vertex bound for the exponential fan enumeration.
pub const DEFAULT_FAN_LIMIT: usize = 5;

/// Every distinct `(k,g)`-fan of a counted graph.
///
/// Returns an empty list when `graph` is not `(k,g)`-counted.
pub fn enumerate_distinct_fans(
    graph: &BiColoredMultigraph,
    params: SparsityParams,
    vertex_limit: usize,
) -> Result<Vec<FanDiagram>, GraphError> {
    if graph.n() > vertex_limit {
        return Err(GraphError::SizeLimitExceeded { n: graph.n(), limit: vertex_limit });
    }
    let mut fans = Vec::new();
    if !is_kg_counted(graph, params) {
        return Ok(fans);
    }
    let mut walker = FanWalker::new(graph, params);
    walker.walk(1, &mut |groups| {
        fans.push(FanDiagram {
            groups: groups.iter().map(|g| g.iter().map(|&pos| graph.edges()[pos].id).collect()).collect(),
        });
    });
    Ok(fans)
}

/// Depth-first enumeration of fan groups by edge position.
pub(crate) struct FanWalker<'a> {
    graph: &'a BiColoredMultigraph,
    params: SparsityParams,
    used: Vec<bool>,
    groups: Vec<Vec<usize>>,
}

impl<'a> FanWalker<'a> {
    pub(crate) fn new(graph: &'a BiColoredMultigraph, params: SparsityParams) -> Self {
        FanWalker { graph, params, used: vec![false; graph.m()], groups: Vec::new() }
    }

    /// Calls `visit` once per distinct fan with the groups for vertices `1..n`.
    pub(crate) fn walk(&mut self, vertex: Vertex, visit: &mut dyn FnMut(&[Vec<usize>])) {
        self.walk_pruned(vertex, &mut |_, _| true, visit);
    }

    /// Like [`walk`](Self::walk), but `accept(vertex, group)` may reject a
    /// partial fan, skipping every completion of it.
    pub(crate) fn walk_pruned(
        &mut self,
        vertex: Vertex,
        accept: &mut dyn FnMut(Vertex, &[usize]) -> bool,
        visit: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        let n = self.graph.n();
        if vertex == n {
            if self.used.iter().all(|&u| u) {
                visit(&self.groups);
            }
            return;
        }
        let candidates: Vec<usize> = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(pos, e)| !self.used[*pos] && e.touches(vertex))
            .map(|(pos, _)| pos)
            .collect();
        let mut chosen = Vec::with_capacity(self.params.k());
        self.choose(vertex, &candidates, 0, 0, &mut chosen, accept, visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        vertex: Vertex,
        candidates: &[usize],
        start: usize,
        reds: usize,
        chosen: &mut Vec<usize>,
        accept: &mut dyn FnMut(Vertex, &[usize]) -> bool,
        visit: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        let k = self.params.k();
        if chosen.len() == k {
            for &pos in chosen.iter() {
                self.used[pos] = true;
            }
            // Edges whose endpoints are all at or below `vertex` can no longer be placed.
            let stranded =
                self.graph.edges().iter().enumerate().any(|(pos, e)| !self.used[pos] && e.u.max(e.v) <= vertex);
            if !stranded && accept(vertex, chosen) {
                self.groups.push(chosen.clone());
                self.walk_pruned(vertex + 1, accept, visit);
                self.groups.pop();
            }
            for &pos in chosen.iter() {
                self.used[pos] = false;
            }
            return;
        }
        let needed = k - chosen.len();
        for idx in start..candidates.len() {
            if candidates.len() - idx < needed {
                break;
            }
            let pos = candidates[idx];
            let red = self.graph.edges()[pos].is_red();
            if red && reds == self.params.g() {
                continue;
            }
            chosen.push(pos);
            self.choose(vertex, candidates, idx + 1, reds + red as usize, chosen, accept, visit);
            chosen.pop();
        }
    }
}
