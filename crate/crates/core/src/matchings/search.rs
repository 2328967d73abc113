//! Backtracking search for cover matchings and 2-path covers.
//!
//! Both searches branch over per-item choices in lexicographic order and
//! return the first solution found, so results are deterministic. The
//! matching search runs on an auxiliary forest: choosing the pair `{r1, r2}`
//! for a left vertex adds the auxiliary edge `r1–r2` on the right side, and a
//! partial choice extends to a valid (2,k)-matching exactly when the
//! auxiliary edges stay acyclic, parallel-free, and in components of at most
//! `k/2` edges.

use crate::graphs::{BipartiteGraph, Hypergraph};

use super::{components_from_edges, HkMatching, MatchError, TwoPathCover};

/// Result of a cover-matching search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverOutcome {
    Covered(HkMatching),
    Uncoverable(UncoverableReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UncoverableReason {
    /// A vertex in the cover set has degree below `h`; no matching can give
    /// it degree `h`.
    DegreeTooSmall { vertex: u32 },
    /// The exhaustive search ran out of choices.
    Exhausted,
}

impl CoverOutcome {
    pub fn covered(self) -> Option<HkMatching> {
        match self {
            CoverOutcome::Covered(f) => Some(f),
            CoverOutcome::Uncoverable(_) => None,
        }
    }

    pub fn is_covered(&self) -> bool {
        matches!(self, CoverOutcome::Covered(_))
    }
}

/// Union-find over right vertices with an undo trail. No path compression,
/// union by component edge count; `find` depth stays tiny at the scales the
/// searches run at.
struct AuxForest {
    parent: Vec<u32>,
    /// Auxiliary edge count of the component rooted here.
    edges: Vec<u32>,
    trail: Vec<(u32, u32)>,
}

impl AuxForest {
    fn new(n: usize) -> Self {
        AuxForest {
            parent: (0..n as u32).collect(),
            edges: vec![0; n],
            trail: Vec::new(),
        }
    }

    fn find(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    /// Add the auxiliary edge `a–b` if the merged component keeps at most
    /// `max_edges` auxiliary edges and no cycle or parallel edge forms.
    fn try_add(&mut self, a: u32, b: u32, max_edges: u32) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false; // cycle or repeated pair
        }
        let total = self.edges[ra as usize] + self.edges[rb as usize] + 1;
        if total > max_edges {
            return false;
        }
        self.trail.push((ra, self.parent[ra as usize]));
        self.trail.push((rb, self.edges[rb as usize]));
        self.parent[ra as usize] = rb;
        self.edges[rb as usize] = total;
        true
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn rollback(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (rb, edges) = self.trail.pop().unwrap();
            let (ra, parent) = self.trail.pop().unwrap();
            self.edges[rb as usize] = edges;
            self.parent[ra as usize] = parent;
        }
    }
}

/// Find an (h,k)-matching covering the left set `s`, for the supported
/// shapes (1,1), (2,2), (2,4). The returned matching's left support is
/// exactly `s`; per-vertex pair choices are explored in lexicographic order
/// and the first valid assignment wins.
pub fn find_cover_matching(
    g: &BipartiteGraph,
    s: &[u32],
    h: u32,
    k: u32,
) -> Result<CoverOutcome, MatchError> {
    match (h, k) {
        (1, 1) => find_disjoint_rights(g, s),
        (2, 2) | (2, 4) => find_pair_cover(g, s, k),
        _ => Err(MatchError::UnsupportedShape { h, k }),
    }
}

/// (2,k): each vertex of `s` picks a pair of its neighbors; the auxiliary
/// forest enforces validity.
fn find_pair_cover(g: &BipartiteGraph, s: &[u32], k: u32) -> Result<CoverOutcome, MatchError> {
    g.neighborhood(s)?; // validates `s`
    for &v in s {
        if g.left_degree(v) < 2 {
            return Ok(CoverOutcome::Uncoverable(UncoverableReason::DegreeTooSmall {
                vertex: v,
            }));
        }
    }
    let max_aux = k / 2;
    let mut forest = AuxForest::new(g.right_count() as usize);
    let mut chosen: Vec<(u32, u32)> = Vec::with_capacity(s.len());

    fn descend(
        g: &BipartiteGraph,
        s: &[u32],
        max_aux: u32,
        forest: &mut AuxForest,
        chosen: &mut Vec<(u32, u32)>,
    ) -> bool {
        let pos = chosen.len();
        if pos == s.len() {
            return true;
        }
        let nbhd = g.neighbors(s[pos]);
        for i in 0..nbhd.len() {
            for j in i + 1..nbhd.len() {
                let mark = forest.mark();
                if forest.try_add(nbhd[i], nbhd[j], max_aux) {
                    chosen.push((nbhd[i], nbhd[j]));
                    if descend(g, s, max_aux, forest, chosen) {
                        return true;
                    }
                    chosen.pop();
                    forest.rollback(mark);
                }
            }
        }
        false
    }

    if descend(g, s, max_aux, &mut forest, &mut chosen) {
        let mut edges = Vec::with_capacity(2 * s.len());
        for (pos, &(a, b)) in chosen.iter().enumerate() {
            edges.push((s[pos], a));
            edges.push((s[pos], b));
        }
        Ok(CoverOutcome::Covered(components_from_edges(2, k, &edges)))
    } else {
        Ok(CoverOutcome::Uncoverable(UncoverableReason::Exhausted))
    }
}

/// (1,1): a system of distinct representatives for `s`.
fn find_disjoint_rights(g: &BipartiteGraph, s: &[u32]) -> Result<CoverOutcome, MatchError> {
    g.neighborhood(s)?;
    for &v in s {
        if g.left_degree(v) < 1 {
            return Ok(CoverOutcome::Uncoverable(UncoverableReason::DegreeTooSmall {
                vertex: v,
            }));
        }
    }
    let mut used = vec![false; g.right_count() as usize];
    let mut chosen: Vec<u32> = Vec::with_capacity(s.len());

    fn descend(
        g: &BipartiteGraph,
        s: &[u32],
        used: &mut Vec<bool>,
        chosen: &mut Vec<u32>,
    ) -> bool {
        let pos = chosen.len();
        if pos == s.len() {
            return true;
        }
        for &r in g.neighbors(s[pos]) {
            if !used[r as usize] {
                used[r as usize] = true;
                chosen.push(r);
                if descend(g, s, used, chosen) {
                    return true;
                }
                chosen.pop();
                used[r as usize] = false;
            }
        }
        false
    }

    if descend(g, s, &mut used, &mut chosen) {
        let edges: Vec<(u32, u32)> =
            s.iter().zip(&chosen).map(|(&l, &r)| (l, r)).collect();
        Ok(CoverOutcome::Covered(components_from_edges(1, 1, &edges)))
    } else {
        Ok(CoverOutcome::Uncoverable(UncoverableReason::Exhausted))
    }
}

/// Find a 2-path cover of the hypergraph edges `edge_subset` (strictly
/// increasing indices), or `None` if none exists. Every covered edge must
/// have at least 2 vertices. Pairs are tried in lexicographic order over each
/// edge's sorted vertex list.
pub fn two_path_cover(
    hg: &Hypergraph,
    edge_subset: &[usize],
) -> Result<Option<TwoPathCover>, MatchError> {
    for (pos, &e) in edge_subset.iter().enumerate() {
        if e >= hg.edge_count() {
            return Err(MatchError::Json(format!("edge index {e} out of range")));
        }
        if pos > 0 && edge_subset[pos - 1] >= e {
            return Err(MatchError::Json("edge subset must be strictly increasing".into()));
        }
        if hg.edge(e).len() < 2 {
            return Err(MatchError::EdgeTooSmall { edge: e });
        }
    }
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edge_subset.len());
    // deg[i] = how many earlier-assigned pairs intersect pair i.
    let mut deg: Vec<u32> = Vec::with_capacity(edge_subset.len());

    fn intersects(p: (u32, u32), q: (u32, u32)) -> bool {
        p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1
    }

    fn descend(
        hg: &Hypergraph,
        subset: &[usize],
        pairs: &mut Vec<(u32, u32)>,
        deg: &mut Vec<u32>,
    ) -> bool {
        let pos = pairs.len();
        if pos == subset.len() {
            return true;
        }
        let edge = hg.edge(subset[pos]);
        for i in 0..edge.len() {
            for j in i + 1..edge.len() {
                let p = (edge[i], edge[j]);
                // Count intersections with already-assigned pairs; reject a
                // duplicate pair, a second neighbor for p, or a neighbor that
                // already has one.
                let mut neighbor: Option<usize> = None;
                let mut feasible = true;
                for (q_pos, &q) in pairs.iter().enumerate() {
                    if q == p {
                        feasible = false;
                        break;
                    }
                    if !intersects(p, q) {
                        continue;
                    }
                    if neighbor.is_some() || deg[q_pos] > 0 {
                        feasible = false;
                        break;
                    }
                    neighbor = Some(q_pos);
                }
                if !feasible {
                    continue;
                }
                pairs.push(p);
                deg.push(if neighbor.is_some() { 1 } else { 0 });
                if let Some(q_pos) = neighbor {
                    deg[q_pos] += 1;
                }
                if descend(hg, subset, pairs, deg) {
                    return true;
                }
                pairs.pop();
                deg.pop();
                if let Some(q_pos) = neighbor {
                    deg[q_pos] -= 1;
                }
            }
        }
        false
    }

    if descend(hg, edge_subset, &mut pairs, &mut deg) {
        Ok(Some(TwoPathCover { edge_indices: edge_subset.to_vec(), pairs }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchings::{validate_matching, validate_two_path_cover};

    #[test]
    fn forced_fork_is_found() {
        // Left c adjacent to exactly {a, b}: the only choice.
        let g = BipartiteGraph::new(1, 2, vec![vec![0, 1]]).unwrap();
        let f = find_cover_matching(&g, &[0], 2, 4).unwrap().covered().unwrap();
        assert_eq!(validate_matching(&g, &f), Vec::new());
        assert_eq!(f.component_count(), 1);
        assert_eq!(f.components()[0].edges(), &[(0, 0), (0, 1)]);
    }

    #[test]
    fn clause_adjacency_pair_is_covered() {
        // Two lefts with neighborhoods {0,1,2} and {0,1,3}.
        let g = BipartiteGraph::new(2, 4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        let f = find_cover_matching(&g, &[0, 1], 2, 4).unwrap().covered().unwrap();
        assert_eq!(validate_matching(&g, &f), Vec::new());
        assert_eq!(f.left_support(), vec![0, 1]);
    }

    #[test]
    fn low_degree_vertex_reports_reason() {
        let g = BipartiteGraph::new(1, 2, vec![vec![0]]).unwrap();
        assert_eq!(
            find_cover_matching(&g, &[0], 2, 4).unwrap(),
            CoverOutcome::Uncoverable(UncoverableReason::DegreeTooSmall { vertex: 0 })
        );
    }

    #[test]
    fn tight_shapes_are_distinguished() {
        // Three lefts all seeing {0,1,2}: (2,4) can chain two through a
        // shared right but three pairs from a 3-set must pairwise intersect,
        // which no shape allows.
        let g = BipartiteGraph::new(
            3,
            3,
            vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]],
        )
        .unwrap();
        assert!(find_cover_matching(&g, &[0, 1], 2, 4).unwrap().is_covered());
        assert_eq!(
            find_cover_matching(&g, &[0, 1, 2], 2, 4).unwrap(),
            CoverOutcome::Uncoverable(UncoverableReason::Exhausted)
        );
        // (2,2) forbids even the chained pair.
        assert!(!find_cover_matching(&g, &[0, 1], 2, 2).unwrap().is_covered());
        // (1,1) finds distinct representatives for all three.
        assert!(find_cover_matching(&g, &[0, 1, 2], 1, 1).unwrap().is_covered());
    }

    #[test]
    fn unsupported_shape_is_an_error() {
        let g = BipartiteGraph::new(1, 2, vec![vec![0, 1]]).unwrap();
        assert_eq!(
            find_cover_matching(&g, &[0], 3, 6),
            Err(MatchError::UnsupportedShape { h: 3, k: 6 })
        );
    }

    #[test]
    fn single_edge_cover_takes_first_pair() {
        let hg = Hypergraph::new(4, vec![vec![0, 2, 3]]).unwrap();
        let cover = two_path_cover(&hg, &[0]).unwrap().unwrap();
        assert_eq!(cover.pairs, vec![(0, 2)]);
        assert_eq!(validate_two_path_cover(&hg, &cover), Vec::new());
    }

    #[test]
    fn disjoint_edges_get_disjoint_pairs() {
        let hg = Hypergraph::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let cover = two_path_cover(&hg, &[0, 1]).unwrap().unwrap();
        assert_eq!(cover.pairs, vec![(0, 1), (3, 4)]);
    }

    #[test]
    fn shared_vertex_edges_chain_legally() {
        // Edges {0,1,2} and {2,3}: pairs (0,1),(2,3) or a chain through 2.
        let hg = Hypergraph::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        let cover = two_path_cover(&hg, &[0, 1]).unwrap().unwrap();
        assert_eq!(validate_two_path_cover(&hg, &cover), Vec::new());
    }

    #[test]
    fn size_one_edge_is_a_precondition_error() {
        let hg = Hypergraph::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        assert_eq!(two_path_cover(&hg, &[0, 1]), Err(MatchError::EdgeTooSmall { edge: 0 }));
    }

    #[test]
    fn partial_subsets_can_be_covered() {
        let hg = Hypergraph::new(4, vec![vec![0, 1], vec![0, 1], vec![2, 3]]).unwrap();
        // Edges 0 and 1 have the same vertex set: both demand the pair (0,1),
        // so covering both is impossible, but each alone is fine.
        assert!(two_path_cover(&hg, &[0, 1]).unwrap().is_none());
        assert!(two_path_cover(&hg, &[0, 2]).unwrap().is_some());
        assert!(two_path_cover(&hg, &[1]).unwrap().is_some());
    }
}
