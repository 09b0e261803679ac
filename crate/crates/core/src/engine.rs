//! Colored spanning-tree decomposition.
//!
//! A set of edges is *independent* when it splits into `k` forests such that
//! red edges only sit in the last `g` forests. This is the union of `k - g`
//! copies of the graphic matroid on black edges with `g` copies of the
//! graphic matroid on all edges. A counted graph is generically minimally
//! rigid exactly when all of its edges are independent, in which case every
//! forest is a spanning tree and the black edges in the last `g` trees form
//! the set `B'`.
//!
//! Independence is maintained incrementally with Edmonds-style matroid
//! partition augmentation: an edge that closes a cycle in every admissible
//! forest triggers a breadth-first exchange search over edges on those
//! cycles. When the search fails, the explored edges contain the unique
//! circuit created by the new edge.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_kg_counted, BiColoredMultigraph, Color, EdgeId, SparsityParams, UnionFind, Vertex};

/// Assignment of every edge to one of the `k` tree classes (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestCertificate {
    pub class_of: BTreeMap<EdgeId, usize>,
}

impl ForestCertificate {
    /// Edges of tree class `class`, in id order.
    pub fn tree(&self, class: usize) -> Vec<EdgeId> {
        self.class_of.iter().filter(|(_, &c)| c == class).map(|(&e, _)| e).collect()
    }

    /// `B'`: black edges placed in one of the last `g` trees.
    pub fn angular_side_black(&self, graph: &BiColoredMultigraph, params: SparsityParams) -> Vec<EdgeId> {
        self.class_of
            .iter()
            .filter(|(&e, &c)| c >= params.black_only() && graph.edge(e).is_some_and(|edge| edge.color == Color::Black))
            .map(|(&e, _)| e)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    MinimallyRigid,
    Underconstrained,
    Dependent,
    NotCounted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::MinimallyRigid => "minimally-rigid",
            Status::Underconstrained => "underconstrained",
            Status::Dependent => "dependent",
            Status::NotCounted => "not-counted",
        }
    }
}

/// Outcome of the combinatorial decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialVerdict {
    pub status: Status,
    pub rank: usize,
    /// `k(n-1) - rank(E)`.
    pub deficiency: usize,
    pub certificate: Option<ForestCertificate>,
    /// A minimally dependent edge set, present whenever some edge is dependent.
    pub circuit: Option<Vec<EdgeId>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("edge {0} is not in the graph")]
    UnknownEdge(EdgeId),
    #[error("the given subset is not independent")]
    DependentSubset,
    #[error("edge {0} is independent of the subset, so no circuit exists")]
    NotACircuit(EdgeId),
}

/// Incremental forest packing with admissible classes.
///
/// Single-threaded and mutable; build one per analysis.
#[derive(Clone, Debug)]
pub struct ForestPacking<'g> {
    graph: &'g BiColoredMultigraph,
    params: SparsityParams,
    /// Class of each edge position, `None` when not in the packing.
    class_of: Vec<Option<usize>>,
    /// `adjacency[class][vertex]` holds edge positions.
    adjacency: Vec<Vec<Vec<usize>>>,
    size: usize,
}

impl<'g> ForestPacking<'g> {
    pub fn new(graph: &'g BiColoredMultigraph, params: SparsityParams) -> Self {
        ForestPacking {
            graph,
            params,
            class_of: vec![None; graph.m()],
            adjacency: vec![vec![Vec::new(); graph.n()]; params.k()],
            size: 0,
        }
    }

    /// Number of edges currently packed.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.class_of[pos].is_some()
    }

    /// Inserts the edge at position `pos`, rearranging the packing if needed.
    ///
    /// On failure the packing is unchanged and the explored edge positions
    /// (including `pos`) are returned; they contain the circuit of `pos`.
    pub fn try_insert(&mut self, pos: usize) -> Result<(), Vec<usize>> {
        if self.contains(pos) {
            return Ok(());
        }
        let m = self.graph.m();
        // reached_from[y] = (x, class): x would enter `class`, displacing y.
        let mut reached_from: Vec<Option<(usize, usize)>> = vec![None; m];
        let mut visited = vec![false; m];
        let mut order = vec![pos];
        let mut queue = VecDeque::from([pos]);
        visited[pos] = true;

        while let Some(x) = queue.pop_front() {
            let edge = &self.graph.edges()[x];
            for class in 0..self.params.k() {
                if !self.params.admits(class, edge.color) || self.class_of[x] == Some(class) {
                    continue;
                }
                match self.forest_path(class, edge.u, edge.v) {
                    None => {
                        self.augment(x, class, &reached_from);
                        return Ok(());
                    }
                    Some(cycle) => {
                        for y in cycle {
                            if !visited[y] {
                                visited[y] = true;
                                reached_from[y] = Some((x, class));
                                order.push(y);
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
        Err(order)
    }

    /// Removes the edge at `pos` from its forest, if packed.
    pub fn remove(&mut self, pos: usize) {
        if let Some(class) = self.class_of[pos].take() {
            let e = &self.graph.edges()[pos];
            for end in [e.u, e.v] {
                let list = &mut self.adjacency[class][end];
                let at = list.iter().position(|&p| p == pos).expect("packed edge is in adjacency");
                list.swap_remove(at);
            }
            self.size -= 1;
        }
    }

    fn place(&mut self, pos: usize, class: usize) {
        let was_packed = self.class_of[pos].is_some();
        if was_packed {
            self.remove(pos);
        }
        let e = &self.graph.edges()[pos];
        self.adjacency[class][e.u].push(pos);
        self.adjacency[class][e.v].push(pos);
        self.class_of[pos] = Some(class);
        self.size += 1;
    }

    /// Applies the exchange sequence ending with `last` entering `class`.
    fn augment(&mut self, last: usize, class: usize, reached_from: &[Option<(usize, usize)>]) {
        let (mut x, mut target) = (last, class);
        loop {
            self.place(x, target);
            match reached_from[x] {
                Some((prev, prev_class)) => {
                    x = prev;
                    target = prev_class;
                }
                None => break,
            }
        }
    }

    /// Edge positions on the path from `from` to `to` in forest `class`.
    fn forest_path(&self, class: usize, from: Vertex, to: Vertex) -> Option<Vec<usize>> {
        let n = self.graph.n();
        let mut via: Vec<Option<(Vertex, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                let mut path = Vec::new();
                let mut cur = to;
                while let Some((prev, edge)) = via[cur] {
                    path.push(edge);
                    cur = prev;
                }
                return Some(path);
            }
            for &edge in &self.adjacency[class][x] {
                let e = &self.graph.edges()[edge];
                let y = if e.u == x { e.v } else { e.u };
                if !seen[y] {
                    seen[y] = true;
                    via[y] = Some((x, edge));
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Current class of every packed edge, keyed by id.
    pub fn assignment(&self) -> BTreeMap<EdgeId, usize> {
        self.class_of.iter().enumerate().filter_map(|(pos, c)| c.map(|c| (self.graph.edges()[pos].id, c))).collect()
    }

    /// Unique circuit inside `packed ∪ {pos}` when `pos` was rejected with
    /// the explored set `reached`.
    fn circuit_of(&self, pos: usize, reached: &[usize]) -> Vec<usize> {
        let mut circuit = vec![pos];
        for &y in reached.iter().filter(|&&y| y != pos) {
            let mut trial = self.clone();
            trial.remove(y);
            if trial.try_insert(pos).is_ok() {
                circuit.push(y);
            }
        }
        circuit.sort_unstable();
        circuit
    }
}

fn positions(graph: &BiColoredMultigraph, subset: &[EdgeId]) -> Result<Vec<usize>, EngineError> {
    subset.iter().map(|&id| graph.position(id).ok_or(EngineError::UnknownEdge(id))).collect()
}

/// Size of a largest independent subset of `subset`.
pub fn rank(graph: &BiColoredMultigraph, subset: &[EdgeId], params: SparsityParams) -> Result<usize, EngineError> {
    let mut packing = ForestPacking::new(graph, params);
    for pos in positions(graph, subset)? {
        let _ = packing.try_insert(pos);
    }
    Ok(packing.len())
}

pub fn is_independent(
    graph: &BiColoredMultigraph,
    subset: &[EdgeId],
    params: SparsityParams,
) -> Result<bool, EngineError> {
    let mut distinct = subset.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(distinct.len() == subset.len() && rank(graph, subset, params)? == subset.len())
}

/// A tree decomposition witnessing generic minimal rigidity, if one exists.
pub fn find_certificate(graph: &BiColoredMultigraph, params: SparsityParams) -> Option<ForestCertificate> {
    if !is_kg_counted(graph, params) {
        return None;
    }
    let mut packing = ForestPacking::new(graph, params);
    for pos in 0..graph.m() {
        packing.try_insert(pos).ok()?;
    }
    Some(ForestCertificate { class_of: packing.assignment() })
}

/// Checks a certificate with plain graph tests, independent of the search.
pub fn verify_certificate(graph: &BiColoredMultigraph, cert: &ForestCertificate, params: SparsityParams) -> bool {
    if cert.class_of.len() != graph.m() {
        return false;
    }
    let n = graph.n();
    let mut forests: Vec<UnionFind> = (0..params.k()).map(|_| UnionFind::new(n)).collect();
    let mut sizes = vec![0usize; params.k()];
    for (&id, &class) in &cert.class_of {
        let Some(edge) = graph.edge(id) else {
            return false;
        };
        if !params.admits(class, edge.color) {
            return false;
        }
        if !forests[class].union(edge.u, edge.v) {
            return false;
        }
        sizes[class] += 1;
    }
    // Acyclic with n - 1 edges on n vertices means spanning tree.
    sizes.iter().all(|&s| s == n - 1)
}

/// The unique circuit in `subset ∪ {edge}`, given independent `subset` and
/// dependent `subset ∪ {edge}`.
pub fn circuit_on_failure(
    graph: &BiColoredMultigraph,
    params: SparsityParams,
    subset: &[EdgeId],
    edge: EdgeId,
) -> Result<Vec<EdgeId>, EngineError> {
    let subset_pos = positions(graph, subset)?;
    let pos = graph.position(edge).ok_or(EngineError::UnknownEdge(edge))?;
    let mut packing = ForestPacking::new(graph, params);
    for &p in &subset_pos {
        if p == pos || packing.try_insert(p).is_err() {
            return Err(EngineError::DependentSubset);
        }
    }
    if packing.len() != subset_pos.len() {
        return Err(EngineError::DependentSubset);
    }
    match packing.try_insert(pos) {
        Ok(()) => Err(EngineError::NotACircuit(edge)),
        Err(reached) => Ok(packing.circuit_of(pos, &reached).into_iter().map(|p| graph.edges()[p].id).collect()),
    }
}

/// Circuit of every edge rejected by greedy insertion in edge-list order,
/// as `(rejected edge, circuit)` pairs.
pub fn fundamental_circuits(graph: &BiColoredMultigraph, params: SparsityParams) -> Vec<(EdgeId, Vec<EdgeId>)> {
    let mut packing = ForestPacking::new(graph, params);
    let mut out = Vec::new();
    for pos in 0..graph.m() {
        if let Err(reached) = packing.try_insert(pos) {
            let circuit = packing.circuit_of(pos, &reached).into_iter().map(|p| graph.edges()[p].id).collect();
            out.push((graph.edges()[pos].id, circuit));
        }
    }
    out
}

/// Decides generic minimal rigidity of the frame on `graph`.
pub fn decide(graph: &BiColoredMultigraph, params: SparsityParams) -> CombinatorialVerdict {
    let mut packing = ForestPacking::new(graph, params);
    let mut circuit = None;
    for pos in 0..graph.m() {
        if let Err(reached) = packing.try_insert(pos) {
            if circuit.is_none() {
                circuit = Some(packing.circuit_of(pos, &reached).into_iter().map(|p| graph.edges()[p].id).collect());
            }
        }
    }
    let rank = packing.len();
    let full = params.full_rank(graph.n());
    let deficiency = full - rank;
    let counted = is_kg_counted(graph, params);
    let independent = rank == graph.m();
    let status = if counted && rank == full {
        Status::MinimallyRigid
    } else if independent {
        Status::Underconstrained
    } else if graph.m() > full || graph.red_count() > params.g() * (graph.n() - 1) {
        Status::NotCounted
    } else {
        Status::Dependent
    };
    let certificate = (status == Status::MinimallyRigid).then(|| ForestCertificate { class_of: packing.assignment() });
    CombinatorialVerdict { status, rank, deficiency, certificate, circuit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn parallel(n_black: usize, n_red: usize) -> BiColoredMultigraph {
        let mut b: GraphBuilder = BiColoredMultigraph::builder(2);
        for _ in 0..n_red {
            b = b.red(0, 1);
        }
        for _ in 0..n_black {
            b = b.black(0, 1);
        }
        b.build().unwrap()
    }

    fn ids(range: std::ops::Range<usize>) -> Vec<EdgeId> {
        range.map(EdgeId).collect()
    }

    const P63: SparsityParams = SparsityParams::BODY_AND_CAD;

    #[test]
    fn single_edge_has_rank_one() {
        let g = parallel(1, 0);
        assert_eq!(rank(&g, &ids(0..1), P63).unwrap(), 1);
        let p = SparsityParams::new(1, 1).unwrap();
        assert_eq!(rank(&g, &ids(0..1), p).unwrap(), 1);
    }

    #[test]
    fn seven_parallel_black_edges_have_rank_six() {
        let g = parallel(7, 0);
        assert_eq!(rank(&g, &ids(0..7), P63).unwrap(), 6);
    }

    #[test]
    fn body_and_bar_pair_gets_one_edge_per_class() {
        let g = parallel(6, 0);
        let cert = find_certificate(&g, P63).unwrap();
        assert!(verify_certificate(&g, &cert, P63));
        for class in 0..6 {
            assert_eq!(cert.tree(class).len(), 1);
        }
    }

    #[test]
    fn too_many_red_edges_have_no_certificate() {
        let g = parallel(2, 4);
        assert!(find_certificate(&g, P63).is_none());
        let v = decide(&g, P63);
        assert_eq!(v.status, Status::NotCounted);
        assert_eq!(v.rank, 5);
        let circuit = v.circuit.unwrap();
        assert_eq!(circuit, ids(0..4));
    }

    #[test]
    fn circuit_of_seventh_parallel_edge_is_everything() {
        let g = parallel(7, 0);
        let c = circuit_on_failure(&g, P63, &ids(0..6), EdgeId(6)).unwrap();
        assert_eq!(c, ids(0..7));
    }

    #[test]
    fn circuit_of_fourth_red_edge_is_the_red_edges() {
        let g = parallel(0, 4);
        let c = circuit_on_failure(&g, P63, &ids(0..3), EdgeId(3)).unwrap();
        assert_eq!(c, ids(0..4));
    }

    #[test]
    fn circuit_requires_dependence() {
        let g = parallel(3, 0);
        assert_eq!(circuit_on_failure(&g, P63, &ids(0..2), EdgeId(2)), Err(EngineError::NotACircuit(EdgeId(2))));
        let g = parallel(8, 0);
        assert_eq!(circuit_on_failure(&g, P63, &ids(0..7), EdgeId(7)), Err(EngineError::DependentSubset));
        assert_eq!(circuit_on_failure(&g, P63, &ids(0..2), EdgeId(99)), Err(EngineError::UnknownEdge(EdgeId(99))));
    }

    #[test]
    fn single_body_is_trivially_rigid() {
        let g = BiColoredMultigraph::builder(1).build().unwrap();
        let v = decide(&g, P63);
        assert_eq!(v.status, Status::MinimallyRigid);
        assert!(verify_certificate(&g, &v.certificate.unwrap(), P63));
    }

    #[test]
    fn disconnected_graph_is_never_rigid() {
        let mut b = BiColoredMultigraph::builder(3);
        for _ in 0..12 {
            b = b.black(0, 1);
        }
        let g = b.build().unwrap();
        assert!(find_certificate(&g, P63).is_none());
        let v = decide(&g, P63);
        assert_eq!(v.status, Status::Dependent);
        assert_eq!(v.rank, 6);
        assert_eq!(v.deficiency, 6);
    }

    #[test]
    fn certificate_verifier_rejects_broken_assignments() {
        let g = parallel(4, 2);
        let cert = find_certificate(&g, P63).unwrap();
        assert!(verify_certificate(&g, &cert, P63));
        let red = EdgeId(0);
        let mut moved = cert.clone();
        moved.class_of.insert(red, 0);
        assert!(!verify_certificate(&g, &moved, P63));
        let mut missing = cert.clone();
        missing.class_of.remove(&EdgeId(5));
        assert!(!verify_certificate(&g, &missing, P63));
        let mut doubled = cert.clone();
        let c = doubled.class_of[&EdgeId(4)];
        let other = *doubled.class_of.iter().find(|(_, &k)| k != c && k < 3).unwrap().0;
        doubled.class_of.insert(other, c);
        assert!(!verify_certificate(&g, &doubled, P63));
    }

    /// Backtracking oracle: can `edges` be split into admissible forests?
    fn brute_independent(g: &BiColoredMultigraph, edges: &[usize], params: SparsityParams) -> bool {
        fn place(
            g: &BiColoredMultigraph,
            edges: &[usize],
            at: usize,
            classes: &mut Vec<Vec<usize>>,
            params: SparsityParams,
        ) -> bool {
            if at == edges.len() {
                return true;
            }
            let e = &g.edges()[edges[at]];
            for c in 0..params.k() {
                if !params.admits(c, e.color) {
                    continue;
                }
                classes[c].push(edges[at]);
                let mut uf = UnionFind::new(g.n());
                let acyclic = classes[c].iter().all(|&p| uf.union(g.edges()[p].u, g.edges()[p].v));
                if acyclic && place(g, edges, at + 1, classes, params) {
                    classes[c].pop();
                    return true;
                }
                classes[c].pop();
            }
            false
        }
        place(g, edges, 0, &mut vec![Vec::new(); params.k()], params)
    }

    fn brute_rank(g: &BiColoredMultigraph, params: SparsityParams) -> usize {
        let m = g.m();
        (0u32..1 << m)
            .filter(|mask| {
                let subset: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                brute_independent(g, &subset, params)
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn arb_graph() -> impl Strategy<Value = (BiColoredMultigraph, SparsityParams)> {
        (2usize..=4, 1usize..=3)
            .prop_flat_map(|(n, k)| {
                (Just(n), Just(k), 1..=k, proptest::collection::vec((0..n, 0..n, any::<bool>()), 0..=9))
            })
            .prop_map(|(n, k, g, raw)| {
                let mut b = BiColoredMultigraph::builder(n);
                for (u, v, red) in raw {
                    if u != v {
                        b = b.edge(u, v, if red { Color::Red } else { Color::Black });
                    }
                }
                (b.build().unwrap(), SparsityParams::new(k, g).unwrap())
            })
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rank_matches_backtracking_oracle((g, params) in arb_graph()) {
            prop_assert_eq!(rank(&g, &g.edge_ids(), params).unwrap(), brute_rank(&g, params));
        }

        #[test]
        fn certificates_exist_exactly_for_independent_counted_graphs((g, params) in arb_graph()) {
            let all: Vec<usize> = (0..g.m()).collect();
            let expected = is_kg_counted(&g, params) && brute_independent(&g, &all, params);
            match find_certificate(&g, params) {
                Some(cert) => {
                    prop_assert!(expected);
                    prop_assert!(verify_certificate(&g, &cert, params));
                }
                None => prop_assert!(!expected),
            }
        }

        #[test]
        fn circuits_are_minimally_dependent((g, params) in arb_graph()) {
            for (_, circuit) in fundamental_circuits(&g, params) {
                let pos: Vec<usize> = circuit.iter().map(|&e| g.position(e).unwrap()).collect();
                prop_assert!(!brute_independent(&g, &pos, params));
                for skip in 0..pos.len() {
                    let rest: Vec<usize> = pos.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &p)| p).collect();
                    prop_assert!(brute_independent(&g, &rest, params));
                }
            }
        }

        #[test]
        fn rank_is_monotone_and_submodular((g, params) in arb_graph(), a in any::<u16>(), b in any::<u16>()) {
            let ids = g.edge_ids();
            let pick = |mask: u16| -> Vec<EdgeId> { ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect() };
            let r = |s: &[EdgeId]| rank(&g, s, params).unwrap();
            let (sa, sb) = (pick(a), pick(b));
            let (su, si) = (pick(a | b), pick(a & b));
            prop_assert!(r(&si) <= r(&sa) && r(&sa) <= r(&su));
            prop_assert!(r(&sa) + r(&sb) >= r(&su) + r(&si));
            prop_assert!(r(&sa) <= sa.len());
        }

        #[test]
        fn verdict_ignores_edge_order((g, params) in arb_graph(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut order: Vec<usize> = (0..g.m()).collect();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let shuffled = g.reordered(&order);
            let (v1, v2) = (decide(&g, params), decide(&shuffled, params));
            prop_assert_eq!(v1.status, v2.status);
            prop_assert_eq!(v1.rank, v2.rank);
            prop_assert_eq!(v1.circuit.is_some(), v2.circuit.is_some());
        }
    }
}
