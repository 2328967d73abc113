//! Bipartite graphs, hypergraphs, their text formats, and exhaustive
//! expansion certification.
//!
//! Both graph types use dense `u32` vertex indices starting at 0. Bipartite
//! adjacency is stored per left vertex as a sorted, duplicate-free list of
//! right indices; hypergraph edges are sorted, duplicate-free vertex lists
//! (repeated edge *sets* are allowed and kept apart by edge index).
//!
//! Text formats:
//!
//! ```text
//! bip <left_count> <right_count>      hyp <vertex_count>
//! <rights of left 0>                  <vertices of edge 0>
//! <rights of left 1>                  <vertices of edge 1>
//! ...                                 ...
//! ```
//!
//! A bipartite graph has exactly `left_count` adjacency lines (a line may be
//! empty for an isolated left vertex); a hypergraph has one line per edge and
//! blank lines are ignored.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratio::ratio_from_usize;
use crate::Limits;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for side with {count} vertices")]
    OutOfRange { vertex: u32, count: u32 },
    #[error("vertex set not strictly increasing at position {position}")]
    NotSorted { position: usize },
    #[error("expansion factor must be positive")]
    NonPositiveDelta,
    #[error("hypergraph edge {edge} is empty")]
    EmptyEdge { edge: usize },
    #[error("enumeration over {subsets} subsets exceeds the cap (use force to override)")]
    CapExceeded { subsets: u128 },
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Check that `set` is a strictly increasing sequence of indices below `count`.
fn check_vertex_set(set: &[u32], count: u32) -> Result<(), GraphError> {
    for (i, &v) in set.iter().enumerate() {
        if v >= count {
            return Err(GraphError::OutOfRange { vertex: v, count });
        }
        if i > 0 && set[i - 1] >= v {
            return Err(GraphError::NotSorted { position: i });
        }
    }
    Ok(())
}

/// A bipartite graph with `left_count` left and `right_count` right vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    left_count: u32,
    right_count: u32,
    /// `adj[l]` is the sorted list of right neighbors of left vertex `l`.
    adj: Vec<Vec<u32>>,
}

impl BipartiteGraph {
    /// Build a graph from per-left adjacency lists. Lists may arrive in any
    /// order and with duplicates; they are sorted and deduplicated.
    pub fn new(
        left_count: u32,
        right_count: u32,
        adjacency: Vec<Vec<u32>>,
    ) -> Result<Self, GraphError> {
        if adjacency.len() != left_count as usize {
            return Err(GraphError::Parse {
                line: 0,
                reason: format!(
                    "expected {} adjacency lists, got {}",
                    left_count,
                    adjacency.len()
                ),
            });
        }
        let mut adj = Vec::with_capacity(adjacency.len());
        for list in adjacency {
            let set: BTreeSet<u32> = list.into_iter().collect();
            if let Some(&max) = set.iter().next_back() {
                if max >= right_count {
                    return Err(GraphError::OutOfRange { vertex: max, count: right_count });
                }
            }
            adj.push(set.into_iter().collect());
        }
        Ok(BipartiteGraph { left_count, right_count, adj })
    }

    pub fn left_count(&self) -> u32 {
        self.left_count
    }

    pub fn right_count(&self) -> u32 {
        self.right_count
    }

    /// Sorted right neighbors of left vertex `l`.
    pub fn neighbors(&self, l: u32) -> &[u32] {
        &self.adj[l as usize]
    }

    pub fn left_degree(&self, l: u32) -> usize {
        self.adj[l as usize].len()
    }

    pub fn has_edge(&self, l: u32, r: u32) -> bool {
        l < self.left_count && self.adj[l as usize].binary_search(&r).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Degree of every right vertex.
    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.right_count as usize];
        for list in &self.adj {
            for &r in list {
                deg[r as usize] += 1;
            }
        }
        deg
    }

    /// Maximum right-vertex degree (0 for an edgeless graph). Computed on
    /// demand; not cached.
    pub fn max_right_degree(&self) -> usize {
        self.right_degrees().into_iter().max().unwrap_or(0)
    }

    pub fn max_left_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Union of the neighborhoods of `left_set` (sorted).
    pub fn neighborhood(&self, left_set: &[u32]) -> Result<Vec<u32>, GraphError> {
        check_vertex_set(left_set, self.left_count)?;
        let mut out: BTreeSet<u32> = BTreeSet::new();
        for &l in left_set {
            out.extend(self.adj[l as usize].iter().copied());
        }
        Ok(out.into_iter().collect())
    }

    /// Serialize to the `bip` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("bip {} {}\n", self.left_count, self.right_count);
        for list in &self.adj {
            out.push_str(&list.iter().map(u32::to_string).join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the `bip` text format. Exactly `left_count` adjacency lines must
    /// follow the header; a line may be empty (isolated left vertex).
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(GraphError::Parse {
            line: 1,
            reason: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "bip" {
            return Err(GraphError::Parse {
                line: 1,
                reason: "expected header `bip <left_count> <right_count>`".into(),
            });
        }
        let parse_count = |s: &str| {
            s.parse::<u32>().map_err(|_| GraphError::Parse {
                line: 1,
                reason: format!("bad count {s:?}"),
            })
        };
        let left_count = parse_count(fields[1])?;
        let right_count = parse_count(fields[2])?;
        let mut adjacency = Vec::with_capacity(left_count as usize);
        for i in 0..left_count {
            let line_no = i as usize + 2;
            let line = lines.next().ok_or(GraphError::Parse {
                line: line_no,
                reason: format!("missing adjacency line for left vertex {i}"),
            })?;
            let mut list = Vec::new();
            for tok in line.split_whitespace() {
                let r = tok.parse::<u32>().map_err(|_| GraphError::Parse {
                    line: line_no,
                    reason: format!("bad vertex {tok:?}"),
                })?;
                list.push(r);
            }
            adjacency.push(list);
        }
        for (extra, line) in lines.enumerate() {
            if !line.trim().is_empty() {
                return Err(GraphError::Parse {
                    line: left_count as usize + 2 + extra,
                    reason: "unexpected content after adjacency lines".into(),
                });
            }
        }
        BipartiteGraph::new(left_count, right_count, adjacency)
    }
}

/// Outcome of exhaustive expansion certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionResult {
    /// Every nonempty left subset of size at most `s` expands.
    Certified,
    /// The first (smallest, then lexicographically least) left subset `X`
    /// with `|N(X)| < delta * |X|`.
    Violation(Vec<u32>),
}

/// Number of nonempty subsets of an `n`-set with size at most `s`,
/// saturating at `u128::MAX`.
pub(crate) fn subset_budget(n: usize, s: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for t in 1..=s.min(n) {
        binom = match binom
            .checked_mul((n - t + 1) as u128)
            .map(|b| b / t as u128)
        {
            Some(b) => b,
            None => return u128::MAX,
        };
        total = total.saturating_add(binom);
    }
    total
}

/// Certify that every nonempty `X ⊆ L` with `|X| ≤ s` has
/// `|N(X)| ≥ delta·|X|`, by exhaustive enumeration in size-then-lex order.
///
/// The comparison is exact rational arithmetic. Enumeration is refused with
/// [`GraphError::CapExceeded`] when the subset count exceeds
/// `2^limits.subset_cap` and `limits.force` is unset.
pub fn is_expander(
    g: &BipartiteGraph,
    s: usize,
    delta: &BigRational,
    limits: &Limits,
) -> Result<ExpansionResult, GraphError> {
    use num_traits::Signed;
    if !delta.is_positive() {
        return Err(GraphError::NonPositiveDelta);
    }
    let n = g.left_count as usize;
    let budget = subset_budget(n, s);
    if !limits.force && budget > (1u128 << limits.subset_cap.min(127)) {
        return Err(GraphError::CapExceeded { subsets: budget });
    }
    for t in 1..=s.min(n) {
        let need = delta * ratio_from_usize(t);
        for combo in (0..n as u32).combinations(t) {
            let mut nbhd: BTreeSet<u32> = BTreeSet::new();
            for &l in &combo {
                nbhd.extend(g.adj[l as usize].iter().copied());
            }
            if ratio_from_usize(nbhd.len()) < need {
                return Ok(ExpansionResult::Violation(combo));
            }
        }
    }
    Ok(ExpansionResult::Certified)
}

/// Old-index/new-index correspondence produced by [`induced_remove`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMaps {
    pub left_old_to_new: Vec<Option<u32>>,
    pub left_new_to_old: Vec<u32>,
    pub right_old_to_new: Vec<Option<u32>>,
    pub right_new_to_old: Vec<u32>,
}

impl IndexMaps {
    pub fn map_left(&self, old: u32) -> Option<u32> {
        self.left_old_to_new[old as usize]
    }

    pub fn map_right(&self, old: u32) -> Option<u32> {
        self.right_old_to_new[old as usize]
    }
}

/// The subgraph obtained by deleting the left vertices `remove_left` and the
/// right vertices `remove_right`, with surviving vertices renumbered densely
/// in their original order. Both removal sets must be strictly increasing.
pub fn induced_remove(
    g: &BipartiteGraph,
    remove_left: &[u32],
    remove_right: &[u32],
) -> Result<(BipartiteGraph, IndexMaps), GraphError> {
    check_vertex_set(remove_left, g.left_count)?;
    check_vertex_set(remove_right, g.right_count)?;
    let mut left_old_to_new = vec![None; g.left_count as usize];
    let mut left_new_to_old = Vec::new();
    let mut drop_left = remove_left.iter().peekable();
    for old in 0..g.left_count {
        if drop_left.peek() == Some(&&old) {
            drop_left.next();
        } else {
            left_old_to_new[old as usize] = Some(left_new_to_old.len() as u32);
            left_new_to_old.push(old);
        }
    }
    let mut right_old_to_new = vec![None; g.right_count as usize];
    let mut right_new_to_old = Vec::new();
    let mut drop_right = remove_right.iter().peekable();
    for old in 0..g.right_count {
        if drop_right.peek() == Some(&&old) {
            drop_right.next();
        } else {
            right_old_to_new[old as usize] = Some(right_new_to_old.len() as u32);
            right_new_to_old.push(old);
        }
    }
    let adjacency: Vec<Vec<u32>> = left_new_to_old
        .iter()
        .map(|&old| {
            g.adj[old as usize]
                .iter()
                .filter_map(|&r| right_old_to_new[r as usize])
                .collect()
        })
        .collect();
    let sub = BipartiteGraph::new(
        left_new_to_old.len() as u32,
        right_new_to_old.len() as u32,
        adjacency,
    )?;
    let maps = IndexMaps { left_old_to_new, left_new_to_old, right_old_to_new, right_new_to_old };
    Ok((sub, maps))
}

/// A hypergraph on `vertex_count` vertices. Edges are sorted vertex lists;
/// two edges may have identical vertex sets (they stay distinct by index).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    vertex_count: u32,
    edges: Vec<Vec<u32>>,
}

impl Hypergraph {
    pub fn new(vertex_count: u32, edges: Vec<Vec<u32>>) -> Result<Self, GraphError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (i, edge) in edges.into_iter().enumerate() {
            let set: BTreeSet<u32> = edge.into_iter().collect();
            if set.is_empty() {
                return Err(GraphError::EmptyEdge { edge: i });
            }
            if let Some(&max) = set.iter().next_back() {
                if max >= vertex_count {
                    return Err(GraphError::OutOfRange { vertex: max, count: vertex_count });
                }
            }
            normalized.push(set.into_iter().collect());
        }
        Ok(Hypergraph { vertex_count, edges: normalized })
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// Degree of `v`: the number of edge *indices* whose edge contains `v`
    /// (repeated edge sets each count).
    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.binary_search(&v).is_ok()).count()
    }

    /// The sub-hypergraph keeping only `edge_indices` (same vertex universe,
    /// edges renumbered in the given order).
    pub fn edge_subset(&self, edge_indices: &[usize]) -> Hypergraph {
        Hypergraph {
            vertex_count: self.vertex_count,
            edges: edge_indices.iter().map(|&i| self.edges[i].clone()).collect(),
        }
    }

    /// Serialize to the `hyp` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("hyp {}\n", self.vertex_count);
        for edge in &self.edges {
            out.push_str(&edge.iter().map(u32::to_string).join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the `hyp` text format: header then one edge per line, blank
    /// lines ignored.
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            reason: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 || fields[0] != "hyp" {
            return Err(GraphError::Parse {
                line: 1,
                reason: "expected header `hyp <vertex_count>`".into(),
            });
        }
        let vertex_count = fields[1].parse::<u32>().map_err(|_| GraphError::Parse {
            line: 1,
            reason: format!("bad count {:?}", fields[1]),
        })?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut edge = Vec::new();
            for tok in line.split_whitespace() {
                let v = tok.parse::<u32>().map_err(|_| GraphError::Parse {
                    line: idx + 1,
                    reason: format!("bad vertex {tok:?}"),
                })?;
                edge.push(v);
            }
            edges.push(edge);
        }
        Hypergraph::new(vertex_count, edges)
    }
}

/// The neighborhood hypergraph of a left subset: one edge per left vertex
/// (its neighborhood), on the vertex universe `N(left_set)` renumbered
/// densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodHypergraph {
    pub hypergraph: Hypergraph,
    /// `edge_to_left[i]` is the left vertex whose neighborhood is edge `i`.
    pub edge_to_left: Vec<u32>,
    /// Dense hypergraph vertex -> original right vertex.
    pub vertex_to_right: Vec<u32>,
    /// Whether distinct left vertices have distinct neighborhoods.
    pub injective: bool,
}

impl NeighborhoodHypergraph {
    /// Original right vertex for a dense hypergraph vertex.
    pub fn right_of(&self, dense: u32) -> u32 {
        self.vertex_to_right[dense as usize]
    }

    /// Dense hypergraph vertex for an original right vertex, if present.
    pub fn dense_of(&self, right: u32) -> Option<u32> {
        self.vertex_to_right.binary_search(&right).ok().map(|i| i as u32)
    }
}

/// Build the neighborhood hypergraph of `left_set` (strictly increasing).
/// Left vertices with empty neighborhoods are rejected (edges are nonempty).
pub fn neighborhood_hypergraph(
    g: &BipartiteGraph,
    left_set: &[u32],
) -> Result<NeighborhoodHypergraph, GraphError> {
    check_vertex_set(left_set, g.left_count)?;
    let vertex_to_right = g.neighborhood(left_set)?;
    let dense = |r: u32| vertex_to_right.binary_search(&r).unwrap() as u32;
    let mut edges = Vec::with_capacity(left_set.len());
    for (i, &l) in left_set.iter().enumerate() {
        if g.adj[l as usize].is_empty() {
            return Err(GraphError::EmptyEdge { edge: i });
        }
        edges.push(g.adj[l as usize].iter().map(|&r| dense(r)).collect::<Vec<_>>());
    }
    let mut seen: BTreeSet<&[u32]> = BTreeSet::new();
    let injective = edges.iter().all(|e| seen.insert(e.as_slice()));
    let hypergraph = Hypergraph::new(vertex_to_right.len() as u32, edges.clone())?;
    Ok(NeighborhoodHypergraph {
        hypergraph,
        edge_to_left: left_set.to_vec(),
        vertex_to_right,
        injective,
    })
}
