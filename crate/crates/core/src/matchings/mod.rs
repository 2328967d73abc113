//! (h,k)-matchings, 2-path covers, and the correspondence between them.
//!
//! An *(h,k)-matching* in a bipartite graph is a forest subgraph whose
//! connected components are trees with at most `k` edges, in which every left
//! vertex touched by the forest has degree exactly `h`. Isolated right
//! vertices are allowed as 0-edge components. For `(h,k) = (2,4)` the
//! component shapes are: a single right vertex, a 2-edge path
//! right–left–right, and a 4-edge path right–left–right–left–right.
//!
//! A *2-path cover* of a hypergraph assigns to each covered edge `e` a pair
//! `f(e) ⊆ e` of two distinct vertices such that `f` is injective and no
//! three distinct edges chain: there are no `e1, e2, e3` with
//! `f(e1) ∩ f(e2) ≠ ∅` and `f(e2) ∩ f(e3) ≠ ∅`. Equivalently, the assigned
//! pairs, viewed as graph edges, form disjoint single edges and 2-edge paths.
//!
//! When each left vertex of a bipartite graph is identified with its
//! neighborhood (an edge of the neighborhood hypergraph), (2,4)-matchings
//! covering a left set correspond exactly to 2-path covers of that set's
//! neighborhood hypergraph; [`cover_from_matching`] and
//! [`matching_from_cover`] realize the two directions.

mod counterexamples;
mod reducible;
mod search;

pub use counterexamples::{amplify, counterexample, gadget, minimal_counterexample, Counterexample};
pub use reducible::{find_reducible_configuration, ConfigKind, ReducibleConfig};
pub use search::{find_cover_matching, two_path_cover, CoverOutcome, UncoverableReason};

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::graphs::{
    neighborhood_hypergraph, BipartiteGraph, GraphError, Hypergraph, NeighborhoodHypergraph,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unsupported matching shape ({h},{k}); supported: (1,1), (2,2), (2,4)")]
    UnsupportedShape { h: u32, k: u32 },
    #[error("matching component has no edges and no vertex")]
    EmptyComponent,
    #[error("duplicate edge ({left},{right}) in component")]
    DuplicateEdge { left: u32, right: u32 },
    #[error("matching JSON cannot represent an isolated right vertex component")]
    IsolatedRightInJson,
    #[error("matching JSON malformed: {0}")]
    Json(String),
    #[error("hypergraph edge {edge} has size {size}, expected 2 or 3")]
    EdgeSizeOutOfRange { edge: usize, size: usize },
    #[error("hypergraph edge {edge} has fewer than 2 vertices")]
    EdgeTooSmall { edge: usize },
    #[error("epsilon {0} out of range (need epsilon > 1/3 for this family)")]
    EpsilonOutOfRange(String),
    #[error("no pendant size-2 edge with a degree-1 endpoint to amplify at")]
    NoPendantEdge,
    #[error("input matching is invalid ({violations} violations)")]
    InvalidMatching { violations: usize },
    #[error("matching left support does not equal the requested left set")]
    SupportMismatch,
    #[error("enumeration of {size} candidates exceeds the cap (use force to override)")]
    CapExceeded { size: u128 },
}

/// One connected component of an (h,k)-matching.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchComponent {
    /// Sorted (left, right) edges; empty for an isolated right vertex.
    edges: Vec<(u32, u32)>,
    /// Sorted distinct left vertices.
    lefts: Vec<u32>,
    /// Sorted distinct right vertices.
    rights: Vec<u32>,
}

impl MatchComponent {
    /// Component from a nonempty edge list. Duplicate edges are rejected.
    pub fn from_edges(edges: Vec<(u32, u32)>) -> Result<Self, MatchError> {
        if edges.is_empty() {
            return Err(MatchError::EmptyComponent);
        }
        let mut edges = edges;
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(MatchError::DuplicateEdge { left: w[0].0, right: w[0].1 });
            }
        }
        let mut lefts: Vec<u32> = edges.iter().map(|&(l, _)| l).collect();
        lefts.sort_unstable();
        lefts.dedup();
        let mut rights: Vec<u32> = edges.iter().map(|&(_, r)| r).collect();
        rights.sort_unstable();
        rights.dedup();
        Ok(MatchComponent { edges, lefts, rights })
    }

    /// A 0-edge component: one isolated right vertex.
    pub fn isolated_right(r: u32) -> Self {
        MatchComponent { edges: Vec::new(), lefts: Vec::new(), rights: vec![r] }
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn lefts(&self) -> &[u32] {
        &self.lefts
    }

    pub fn rights(&self) -> &[u32] {
        &self.rights
    }

    /// Sort key: rights, then lefts, then edges.
    pub fn key(&self) -> (&[u32], &[u32], &[(u32, u32)]) {
        (&self.rights, &self.lefts, &self.edges)
    }
}

/// An (h,k)-matching: a set of components, kept in a canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HkMatching {
    h: u32,
    k: u32,
    components: Vec<MatchComponent>,
}

impl HkMatching {
    pub fn new(h: u32, k: u32, mut components: Vec<MatchComponent>) -> Self {
        components.sort_by(|a, b| a.key().cmp(&b.key()));
        HkMatching { h, k, components }
    }

    pub fn empty(h: u32, k: u32) -> Self {
        HkMatching { h, k, components: Vec::new() }
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn components(&self) -> &[MatchComponent] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sorted union of the components' left vertices.
    pub fn left_support(&self) -> Vec<u32> {
        let mut out: Vec<u32> =
            self.components.iter().flat_map(|c| c.lefts.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Sorted union of the components' right vertices.
    pub fn right_support(&self) -> Vec<u32> {
        let mut out: Vec<u32> =
            self.components.iter().flat_map(|c| c.rights.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn covers_left(&self, v: u32) -> bool {
        self.components.iter().any(|c| c.lefts.binary_search(&v).is_ok())
    }

    pub fn covers_right(&self, v: u32) -> bool {
        self.components.iter().any(|c| c.rights.binary_search(&v).is_ok())
    }

    /// The matching with component `index` removed.
    pub fn without_component(&self, index: usize) -> HkMatching {
        let mut components = self.components.clone();
        components.remove(index);
        HkMatching { h: self.h, k: self.k, components }
    }

    /// The matching with `component` added (re-canonicalized).
    pub fn with_component(&self, component: MatchComponent) -> HkMatching {
        let mut components = self.components.clone();
        components.push(component);
        HkMatching::new(self.h, self.k, components)
    }

    /// The matching extended by every component of `other`.
    pub fn with_components(&self, other: impl IntoIterator<Item = MatchComponent>) -> HkMatching {
        let mut components = self.components.clone();
        components.extend(other);
        HkMatching::new(self.h, self.k, components)
    }
}

/// A rule broken by a would-be matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingViolation {
    OutOfRange { component: usize, left_side: bool, vertex: u32 },
    EdgeNotInGraph { component: usize, left: u32, right: u32 },
    LeftDegree { component: usize, left: u32, degree: usize, expected: u32 },
    TooManyEdges { component: usize, edges: usize, cap: u32 },
    NotATree { component: usize },
    Overlap { left_side: bool, vertex: u32 },
}

/// Check every matching rule against `g`; an empty list means valid.
///
/// Rules: all vertices in range, all edges present in `g`, each component a
/// tree (connected, acyclic) with at most `k` edges, every left vertex of a
/// component incident to exactly `h` of its edges, and components pairwise
/// vertex-disjoint.
pub fn validate_matching(g: &BipartiteGraph, f: &HkMatching) -> Vec<MatchingViolation> {
    let mut out = Vec::new();
    let mut seen_left: BTreeMap<u32, usize> = BTreeMap::new();
    let mut seen_right: BTreeMap<u32, usize> = BTreeMap::new();
    for (ci, comp) in f.components().iter().enumerate() {
        for &l in &comp.lefts {
            if l >= g.left_count() {
                out.push(MatchingViolation::OutOfRange { component: ci, left_side: true, vertex: l });
            }
            *seen_left.entry(l).or_insert(0) += 1;
        }
        for &r in &comp.rights {
            if r >= g.right_count() {
                out.push(MatchingViolation::OutOfRange {
                    component: ci,
                    left_side: false,
                    vertex: r,
                });
            }
            *seen_right.entry(r).or_insert(0) += 1;
        }
        for &(l, r) in &comp.edges {
            if l < g.left_count() && r < g.right_count() && !g.has_edge(l, r) {
                out.push(MatchingViolation::EdgeNotInGraph { component: ci, left: l, right: r });
            }
        }
        if comp.edges.len() > f.k() as usize {
            out.push(MatchingViolation::TooManyEdges {
                component: ci,
                edges: comp.edges.len(),
                cap: f.k(),
            });
        }
        for &l in &comp.lefts {
            let degree = comp.edges.iter().filter(|&&(a, _)| a == l).count();
            if degree != f.h() as usize {
                out.push(MatchingViolation::LeftDegree {
                    component: ci,
                    left: l,
                    degree,
                    expected: f.h(),
                });
            }
        }
        if !component_is_tree(comp) {
            out.push(MatchingViolation::NotATree { component: ci });
        }
    }
    for (v, count) in seen_left {
        if count > 1 {
            out.push(MatchingViolation::Overlap { left_side: true, vertex: v });
        }
    }
    for (v, count) in seen_right {
        if count > 1 {
            out.push(MatchingViolation::Overlap { left_side: false, vertex: v });
        }
    }
    out
}

/// Connected and acyclic: edge count is vertex count minus one (0-edge
/// components must be a single right vertex), and one BFS reaches everything.
fn component_is_tree(comp: &MatchComponent) -> bool {
    let vertices = comp.lefts.len() + comp.rights.len();
    if comp.edges.len() + 1 != vertices {
        return false;
    }
    if comp.edges.is_empty() {
        return comp.lefts.is_empty() && comp.rights.len() == 1;
    }
    // BFS over the bipartite component from its first left vertex.
    let mut seen_left = vec![false; comp.lefts.len()];
    let mut seen_right = vec![false; comp.rights.len()];
    let mut queue = vec![(true, 0usize)];
    seen_left[0] = true;
    while let Some((is_left, idx)) = queue.pop() {
        for &(l, r) in &comp.edges {
            let li = comp.lefts.binary_search(&l).unwrap();
            let ri = comp.rights.binary_search(&r).unwrap();
            if is_left && li == idx && !seen_right[ri] {
                seen_right[ri] = true;
                queue.push((false, ri));
            }
            if !is_left && ri == idx && !seen_left[li] {
                seen_left[li] = true;
                queue.push((true, li));
            }
        }
    }
    seen_left.into_iter().all(|b| b) && seen_right.into_iter().all(|b| b)
}

/// Serialize a matching as a JSON list of components, each a list of
/// `[left, right]` edges. Isolated right vertices cannot be represented in
/// this format and are rejected.
pub fn matching_to_json(f: &HkMatching) -> Result<Value, MatchError> {
    let mut comps = Vec::new();
    for comp in f.components() {
        if comp.edges().is_empty() {
            return Err(MatchError::IsolatedRightInJson);
        }
        comps.push(Value::Array(
            comp.edges().iter().map(|&(l, r)| json!([l, r])).collect(),
        ));
    }
    Ok(Value::Array(comps))
}

/// Parse the JSON matching format back into an `HkMatching`.
pub fn matching_from_json(h: u32, k: u32, value: &Value) -> Result<HkMatching, MatchError> {
    let comps = value
        .as_array()
        .ok_or_else(|| MatchError::Json("top level must be an array".into()))?;
    let mut components = Vec::with_capacity(comps.len());
    for comp in comps {
        let edges = comp
            .as_array()
            .ok_or_else(|| MatchError::Json("component must be an array".into()))?;
        let mut list = Vec::with_capacity(edges.len());
        for edge in edges {
            let pair = edge
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| MatchError::Json("edge must be [left, right]".into()))?;
            let l = pair[0]
                .as_u64()
                .ok_or_else(|| MatchError::Json("left index must be unsigned".into()))?;
            let r = pair[1]
                .as_u64()
                .ok_or_else(|| MatchError::Json("right index must be unsigned".into()))?;
            list.push((l as u32, r as u32));
        }
        components.push(MatchComponent::from_edges(list)?);
    }
    Ok(HkMatching::new(h, k, components))
}

/// A 2-path cover of some edges of a hypergraph: parallel lists of covered
/// edge indices and their assigned vertex pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoPathCover {
    /// Strictly increasing hypergraph edge indices.
    pub edge_indices: Vec<usize>,
    /// `pairs[i]` is the pair assigned to `edge_indices[i]`, stored `(a, b)`
    /// with `a < b`.
    pub pairs: Vec<(u32, u32)>,
}

/// A rule broken by a would-be 2-path cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverViolation {
    EdgeIndexOutOfRange { position: usize },
    DuplicateEdgeIndex { position: usize },
    PairNotDistinct { position: usize },
    PairNotInEdge { position: usize },
    DuplicatePair { a: usize, b: usize },
    ChainedTriple { a: usize, b: usize, c: usize },
}

/// Check every 2-path-cover rule; an empty list means valid.
pub fn validate_two_path_cover(hg: &Hypergraph, cover: &TwoPathCover) -> Vec<CoverViolation> {
    let mut out = Vec::new();
    let n = cover.edge_indices.len().min(cover.pairs.len());
    for pos in 0..n {
        let e = cover.edge_indices[pos];
        if e >= hg.edge_count() {
            out.push(CoverViolation::EdgeIndexOutOfRange { position: pos });
            continue;
        }
        if pos > 0 && cover.edge_indices[pos - 1] >= e {
            out.push(CoverViolation::DuplicateEdgeIndex { position: pos });
        }
        let (a, b) = cover.pairs[pos];
        if a == b {
            out.push(CoverViolation::PairNotDistinct { position: pos });
        }
        let edge = hg.edge(e);
        if edge.binary_search(&a).is_err() || edge.binary_search(&b).is_err() {
            out.push(CoverViolation::PairNotInEdge { position: pos });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if cover.pairs[i] == cover.pairs[j] {
                out.push(CoverViolation::DuplicatePair { a: i, b: j });
            }
        }
    }
    // No chained triple: in the "pairs intersect" graph on covered positions,
    // no position may touch two others.
    let intersects = |p: (u32, u32), q: (u32, u32)| {
        p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1
    };
    for mid in 0..n {
        let touching: Vec<usize> = (0..n)
            .filter(|&i| i != mid && intersects(cover.pairs[mid], cover.pairs[i]))
            .collect();
        if touching.len() >= 2 {
            out.push(CoverViolation::ChainedTriple {
                a: touching[0],
                b: mid,
                c: touching[1],
            });
        }
    }
    out
}

/// Translate a (2,4)-matching whose left support is exactly `left_set` into
/// the 2-path cover of the neighborhood hypergraph of `left_set`: left vertex
/// = hypergraph edge, its two matched rights = the assigned pair.
pub fn cover_from_matching(
    g: &BipartiteGraph,
    left_set: &[u32],
    f: &HkMatching,
) -> Result<(NeighborhoodHypergraph, TwoPathCover), MatchError> {
    let violations = validate_matching(g, f);
    if !violations.is_empty() {
        return Err(MatchError::InvalidMatching { violations: violations.len() });
    }
    if f.left_support() != left_set || f.components().iter().any(|c| c.edges().is_empty()) {
        return Err(MatchError::SupportMismatch);
    }
    let nh = neighborhood_hypergraph(g, left_set)?;
    let mut pairs = Vec::with_capacity(left_set.len());
    for &l in left_set {
        let comp = f
            .components()
            .iter()
            .find(|c| c.lefts().binary_search(&l).is_ok())
            .expect("support checked above");
        let mut rights: Vec<u32> = comp
            .edges()
            .iter()
            .filter(|&&(a, _)| a == l)
            .map(|&(_, r)| nh.dense_of(r).expect("matched right lies in N(left_set)"))
            .collect();
        rights.sort_unstable();
        pairs.push((rights[0], rights[1]));
    }
    let cover = TwoPathCover { edge_indices: (0..left_set.len()).collect(), pairs };
    Ok((nh, cover))
}

/// Translate a 2-path cover of (part of) the neighborhood hypergraph of
/// `left_set` back into a (2,4)-matching covering the corresponding lefts.
pub fn matching_from_cover(
    g: &BipartiteGraph,
    left_set: &[u32],
    cover: &TwoPathCover,
) -> Result<HkMatching, MatchError> {
    let nh = neighborhood_hypergraph(g, left_set)?;
    let cover_violations = validate_two_path_cover(&nh.hypergraph, cover);
    if !cover_violations.is_empty() {
        return Err(MatchError::InvalidMatching { violations: cover_violations.len() });
    }
    let mut edges = Vec::with_capacity(2 * cover.pairs.len());
    for (pos, &ei) in cover.edge_indices.iter().enumerate() {
        let l = nh.edge_to_left[ei];
        let (a, b) = cover.pairs[pos];
        edges.push((l, nh.right_of(a)));
        edges.push((l, nh.right_of(b)));
    }
    let matching = components_from_edges(2, 4, &edges);
    let violations = validate_matchings_sanity(g, &matching);
    debug_assert!(violations.is_empty(), "cover translated to invalid matching: {violations:?}");
    Ok(matching)
}

fn validate_matchings_sanity(g: &BipartiteGraph, f: &HkMatching) -> Vec<MatchingViolation> {
    validate_matching(g, f)
}

/// Group loose (left, right) edges into connected components and build a
/// matching from them. Used by the searches, which produce edge sets.
pub(crate) fn components_from_edges(h: u32, k: u32, edges: &[(u32, u32)]) -> HkMatching {
    // Union-find over right vertices; each left's edges glue its rights.
    let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<u32, u32>, v: u32) -> u32 {
        let p = *parent.entry(v).or_insert(v);
        if p == v {
            v
        } else {
            let root = find(parent, p);
            parent.insert(v, root);
            root
        }
    }
    let mut by_left: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(l, r) in edges {
        by_left.entry(l).or_default().push(r);
    }
    for rights in by_left.values() {
        for w in rights.windows(2) {
            let a = find(&mut parent, w[0]);
            let b = find(&mut parent, w[1]);
            if a != b {
                parent.insert(a, b);
            }
        }
    }
    let mut groups: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for &(l, r) in edges {
        let root = find(&mut parent, r);
        groups.entry(root).or_default().push((l, r));
    }
    let components = groups
        .into_values()
        .map(|edges| MatchComponent::from_edges(edges).expect("nonempty group"))
        .collect();
    HkMatching::new(h, k, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> BipartiteGraph {
        // Rights a=0, b=1; left c=0 adjacent to both.
        BipartiteGraph::new(1, 2, vec![vec![0, 1]]).unwrap()
    }

    #[test]
    fn single_fork_component_is_valid() {
        let g = path_graph();
        let comp = MatchComponent::from_edges(vec![(0, 0), (0, 1)]).unwrap();
        let f = HkMatching::new(2, 4, vec![comp]);
        assert_eq!(validate_matching(&g, &f), Vec::new());
        assert_eq!(f.left_support(), vec![0]);
        assert_eq!(f.right_support(), vec![0, 1]);
    }

    #[test]
    fn four_edge_path_component_is_valid() {
        // Two lefts sharing right 1: path 0 - L0 - 1 - L1 - 2.
        let g = BipartiteGraph::new(2, 3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let comp = MatchComponent::from_edges(vec![(0, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        let f = HkMatching::new(2, 4, vec![comp]);
        assert_eq!(validate_matching(&g, &f), Vec::new());
    }

    #[test]
    fn isolated_right_component_is_valid() {
        let g = path_graph();
        let f = HkMatching::new(2, 4, vec![MatchComponent::isolated_right(1)]);
        assert_eq!(validate_matching(&g, &f), Vec::new());
        assert!(f.covers_right(1));
        assert!(!f.covers_right(0));
    }

    #[test]
    fn wrong_left_degree_is_flagged() {
        // Left 0 with a single edge in a (2,4)-matching: degree 1, not 2, and
        // the 1-edge component is a valid tree otherwise.
        let g = path_graph();
        let comp = MatchComponent::from_edges(vec![(0, 0)]).unwrap();
        let f = HkMatching::new(2, 4, vec![comp]);
        let violations = validate_matching(&g, &f);
        assert!(violations.contains(&MatchingViolation::LeftDegree {
            component: 0,
            left: 0,
            degree: 1,
            expected: 2
        }));
    }

    #[test]
    fn cycles_missing_edges_and_overlaps_are_flagged() {
        let g = BipartiteGraph::new(2, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        // Both lefts matched to both rights: a 4-cycle, not a tree.
        let comp =
            MatchComponent::from_edges(vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let f = HkMatching::new(2, 4, vec![comp]);
        assert!(validate_matching(&g, &f)
            .contains(&MatchingViolation::NotATree { component: 0 }));

        // Edge absent from the graph.
        let sparse = BipartiteGraph::new(1, 3, vec![vec![0, 1]]).unwrap();
        let comp = MatchComponent::from_edges(vec![(0, 0), (0, 2)]).unwrap();
        let f = HkMatching::new(2, 4, vec![comp]);
        assert!(validate_matching(&sparse, &f)
            .contains(&MatchingViolation::EdgeNotInGraph { component: 0, left: 0, right: 2 }));

        // Two components sharing right 0.
        let wide = BipartiteGraph::new(2, 3, vec![vec![0, 1], vec![0, 2]]).unwrap();
        let f = HkMatching::new(
            2,
            4,
            vec![
                MatchComponent::from_edges(vec![(0, 0), (0, 1)]).unwrap(),
                MatchComponent::from_edges(vec![(1, 0), (1, 2)]).unwrap(),
            ],
        );
        assert!(validate_matching(&wide, &f)
            .contains(&MatchingViolation::Overlap { left_side: false, vertex: 0 }));
    }

    #[test]
    fn too_many_edges_is_flagged_for_small_k() {
        let g = BipartiteGraph::new(2, 3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let comp = MatchComponent::from_edges(vec![(0, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        let f = HkMatching::new(2, 2, vec![comp]);
        assert!(validate_matching(&g, &f)
            .contains(&MatchingViolation::TooManyEdges { component: 0, edges: 4, cap: 2 }));
    }

    #[test]
    fn matching_json_round_trips_and_rejects_singletons() {
        let f = HkMatching::new(
            2,
            4,
            vec![
                MatchComponent::from_edges(vec![(0, 0), (0, 1)]).unwrap(),
                MatchComponent::from_edges(vec![(1, 2), (1, 3)]).unwrap(),
            ],
        );
        let value = matching_to_json(&f).unwrap();
        assert_eq!(value, serde_json::json!([[[0, 0], [0, 1]], [[1, 2], [1, 3]]]));
        assert_eq!(matching_from_json(2, 4, &value).unwrap(), f);

        let with_singleton = f.with_component(MatchComponent::isolated_right(5));
        assert_eq!(matching_to_json(&with_singleton), Err(MatchError::IsolatedRightInJson));
    }

    #[test]
    fn two_path_cover_validation_catches_each_rule() {
        let hg = Hypergraph::new(5, vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
        let ok = TwoPathCover { edge_indices: vec![0, 1], pairs: vec![(0, 1), (2, 3)] };
        assert_eq!(validate_two_path_cover(&hg, &ok), Vec::new());

        let not_in_edge = TwoPathCover { edge_indices: vec![0], pairs: vec![(0, 4)] };
        assert_eq!(
            validate_two_path_cover(&hg, &not_in_edge),
            vec![CoverViolation::PairNotInEdge { position: 0 }]
        );

        let duplicate = TwoPathCover { edge_indices: vec![0, 1], pairs: vec![(1, 2), (1, 2)] };
        assert!(validate_two_path_cover(&hg, &duplicate)
            .contains(&CoverViolation::DuplicatePair { a: 0, b: 1 }));

        // (0,1) and (1,2) intersect at 1; (1,2) and (2,3) intersect at 2.
        let chained = TwoPathCover {
            edge_indices: vec![0, 1, 2],
            pairs: vec![(0, 1), (1, 2), (2, 3)],
        };
        assert!(validate_two_path_cover(&hg, &chained)
            .iter()
            .any(|v| matches!(v, CoverViolation::ChainedTriple { .. })));
    }

    #[test]
    fn matching_and_cover_translate_both_ways() {
        // Lefts 0,1 with N(0) = {0,1}, N(1) = {1,2}: the 4-edge path matching
        // corresponds to the chained-but-legal pair assignment (0,1), (1,2).
        let g = BipartiteGraph::new(2, 3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let comp = MatchComponent::from_edges(vec![(0, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        let f = HkMatching::new(2, 4, vec![comp]);
        let (nh, cover) = cover_from_matching(&g, &[0, 1], &f).unwrap();
        assert_eq!(cover.pairs, vec![(0, 1), (1, 2)]);
        assert_eq!(validate_two_path_cover(&nh.hypergraph, &cover), Vec::new());
        let back = matching_from_cover(&g, &[0, 1], &cover).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn cover_from_matching_rejects_support_mismatch() {
        let g = BipartiteGraph::new(2, 3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let comp = MatchComponent::from_edges(vec![(0, 0), (0, 1)]).unwrap();
        let f = HkMatching::new(2, 4, vec![comp]);
        assert_eq!(cover_from_matching(&g, &[0, 1], &f), Err(MatchError::SupportMismatch));
    }
}
