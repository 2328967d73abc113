//! Reducible local configurations for 2-path covers.
//!
//! A *reducible configuration* is a small pattern of edges with a stored
//! local pair assignment such that any 2-path cover of the remaining edges
//! extends, unchanged, to a cover including the pattern: the stored pairs
//! only use vertices that lie in no edge outside the pattern (degree-1 and
//! degree-2 vertices whose incident edges are all inside it), so they cannot
//! collide or chain with the rest.
//!
//! Vertex degree here counts incident edge *indices*, so repeated edge sets
//! each contribute.

use crate::graphs::Hypergraph;

use super::MatchError;

/// The five recognized patterns, identified on output by codes `a`..`e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigKind {
    /// (a) A size-3 edge containing at least two degree-1 vertices.
    TripleWithTwoLeaves,
    /// (b) A size-2 edge whose endpoints both have degree 1.
    DetachedPair,
    /// (c) Two size-3 edges sharing a degree-2 vertex, each holding a
    /// degree-1 vertex of its own.
    TriplesSharedMiddle,
    /// (d) Two size-2 edges sharing a degree-2 vertex, with degree-1 tips.
    PairsSharedMiddle,
    /// (e) A size-3 edge with a degree-1 vertex whose degree-2 vertex also
    /// sits in a size-2 edge with a degree-1 tip.
    TripleWithPendantPair,
}

impl ConfigKind {
    /// Stable one-letter code used in reports.
    pub fn code(&self) -> char {
        match self {
            ConfigKind::TripleWithTwoLeaves => 'a',
            ConfigKind::DetachedPair => 'b',
            ConfigKind::TriplesSharedMiddle => 'c',
            ConfigKind::PairsSharedMiddle => 'd',
            ConfigKind::TripleWithPendantPair => 'e',
        }
    }
}

/// A detected configuration: the edges it occupies and the stored local
/// cover (edge index, assigned pair) that any outside cover extends by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducibleConfig {
    pub kind: ConfigKind,
    /// Ascending edge indices occupied by the pattern.
    pub edges: Vec<usize>,
    pub local_cover: Vec<(usize, (u32, u32))>,
}

fn pair(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

/// Scan for the first reducible configuration in a fixed order: kinds
/// `a`..`e`, each by ascending edge (for a, b) or vertex (for c, d, e)
/// index. All edges must have size 2 or 3.
pub fn find_reducible_configuration(
    hg: &Hypergraph,
) -> Result<Option<ReducibleConfig>, MatchError> {
    for (ei, edge) in hg.edges().iter().enumerate() {
        if edge.len() < 2 || edge.len() > 3 {
            return Err(MatchError::EdgeSizeOutOfRange { edge: ei, size: edge.len() });
        }
    }
    let degree: Vec<usize> = (0..hg.vertex_count()).map(|v| hg.degree(v)).collect();
    let deg = |v: u32| degree[v as usize];

    // (a) size-3 edge with two leaves.
    for (ei, edge) in hg.edges().iter().enumerate() {
        if edge.len() == 3 {
            let leaves: Vec<u32> = edge.iter().copied().filter(|&v| deg(v) == 1).collect();
            if leaves.len() >= 2 {
                return Ok(Some(ReducibleConfig {
                    kind: ConfigKind::TripleWithTwoLeaves,
                    edges: vec![ei],
                    local_cover: vec![(ei, pair(leaves[0], leaves[1]))],
                }));
            }
        }
    }
    // (b) detached size-2 edge.
    for (ei, edge) in hg.edges().iter().enumerate() {
        if edge.len() == 2 && deg(edge[0]) == 1 && deg(edge[1]) == 1 {
            return Ok(Some(ReducibleConfig {
                kind: ConfigKind::DetachedPair,
                edges: vec![ei],
                local_cover: vec![(ei, pair(edge[0], edge[1]))],
            }));
        }
    }
    // Vertex-centered patterns: w of degree exactly 2.
    for w in 0..hg.vertex_count() {
        if deg(w) != 2 {
            continue;
        }
        let incident: Vec<usize> = (0..hg.edge_count())
            .filter(|&ei| hg.edge(ei).binary_search(&w).is_ok())
            .collect();
        let (e1, e2) = (incident[0], incident[1]);
        let size1 = hg.edge(e1).len();
        let size2 = hg.edge(e2).len();
        let leaf_in = |ei: usize| {
            hg.edge(ei).iter().copied().find(|&v| v != w && deg(v) == 1)
        };
        match (size1, size2) {
            // (c) two triples through w.
            (3, 3) => {
                if let (Some(u1), Some(u2)) = (leaf_in(e1), leaf_in(e2)) {
                    return Ok(Some(ReducibleConfig {
                        kind: ConfigKind::TriplesSharedMiddle,
                        edges: vec![e1, e2],
                        local_cover: vec![(e1, pair(u1, w)), (e2, pair(w, u2))],
                    }));
                }
            }
            // (d) two pairs through w.
            (2, 2) => {
                if leaf_in(e1).is_some() && leaf_in(e2).is_some() {
                    return Ok(Some(ReducibleConfig {
                        kind: ConfigKind::PairsSharedMiddle,
                        edges: vec![e1, e2],
                        local_cover: vec![
                            (e1, pair(hg.edge(e1)[0], hg.edge(e1)[1])),
                            (e2, pair(hg.edge(e2)[0], hg.edge(e2)[1])),
                        ],
                    }));
                }
            }
            // (e) a triple and a pendant pair through w.
            (3, 2) | (2, 3) => {
                let (et, ep) = if size1 == 3 { (e1, e2) } else { (e2, e1) };
                if let (Some(u1), Some(u2)) = (leaf_in(et), leaf_in(ep)) {
                    let mut edges = vec![et, ep];
                    edges.sort_unstable();
                    return Ok(Some(ReducibleConfig {
                        kind: ConfigKind::TripleWithPendantPair,
                        edges,
                        local_cover: vec![(et, pair(u1, w)), (ep, pair(w, u2))],
                    }));
                }
            }
            _ => unreachable!("edge sizes checked to be 2 or 3"),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchings::{
        minimal_counterexample, two_path_cover, validate_two_path_cover, TwoPathCover,
    };

    #[test]
    fn lone_triple_is_kind_a() {
        let hg = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let config = find_reducible_configuration(&hg).unwrap().unwrap();
        assert_eq!(config.kind, ConfigKind::TripleWithTwoLeaves);
        assert_eq!(config.kind.code(), 'a');
        assert_eq!(config.local_cover, vec![(0, (0, 1))]);
    }

    #[test]
    fn shared_middle_pairs_are_kind_d() {
        // {0,1} and {1,2} with tips 0, 2 of degree 1 and middle 1 of degree 2.
        let hg = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let config = find_reducible_configuration(&hg).unwrap().unwrap();
        assert_eq!(config.kind, ConfigKind::PairsSharedMiddle);
        assert_eq!(config.local_cover, vec![(0, (0, 1)), (1, (1, 2))]);
    }

    #[test]
    fn shared_middle_triples_are_kind_c() {
        // Triples {0,1,2} and {2,3,4} share degree-2 vertex 2; 5 pads degree.
        let hg =
            Hypergraph::new(6, vec![vec![0, 1, 2], vec![2, 3, 4], vec![0, 5], vec![3, 5]])
                .unwrap();
        // Vertices 1 and 4 are leaves inside the triples.
        let config = find_reducible_configuration(&hg).unwrap().unwrap();
        assert_eq!(config.kind, ConfigKind::TriplesSharedMiddle);
        assert_eq!(config.edges, vec![0, 1]);
        assert_eq!(config.local_cover, vec![(0, (1, 2)), (1, (2, 4))]);
    }

    #[test]
    fn triple_with_pendant_pair_is_kind_e() {
        // Triple {0,1,2} with leaf 1; vertex 2 also in pendant {2,3}, leaf 3.
        // Vertex 0 is kept busy by two extra pair edges so (a) cannot fire.
        let hg = Hypergraph::new(
            6,
            vec![vec![0, 1, 2], vec![2, 3], vec![0, 4], vec![0, 5], vec![4, 5]],
        )
        .unwrap();
        let config = find_reducible_configuration(&hg).unwrap().unwrap();
        assert_eq!(config.kind, ConfigKind::TripleWithPendantPair);
        assert_eq!(config.edges, vec![0, 1]);
        assert_eq!(config.local_cover, vec![(0, (1, 2)), (1, (2, 3))]);
    }

    #[test]
    fn minimal_counterexample_has_no_reducible_configuration() {
        assert_eq!(find_reducible_configuration(&minimal_counterexample()).unwrap(), None);
    }

    #[test]
    fn size_4_edges_are_rejected() {
        let hg = Hypergraph::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(
            find_reducible_configuration(&hg),
            Err(MatchError::EdgeSizeOutOfRange { edge: 0, size: 4 })
        );
    }

    #[test]
    fn local_cover_extends_outside_covers() {
        // A kind-c pattern glued to an outside path of pairs; any cover of
        // the outside extends by the stored pairs.
        let hg = Hypergraph::new(
            8,
            vec![vec![0, 1, 2], vec![2, 3, 4], vec![0, 5], vec![3, 6], vec![5, 6, 7]],
        )
        .unwrap();
        let config = find_reducible_configuration(&hg).unwrap().unwrap();
        let outside: Vec<usize> =
            (0..hg.edge_count()).filter(|e| !config.edges.contains(e)).collect();
        let outside_cover = two_path_cover(&hg, &outside).unwrap().unwrap();
        let mut merged: Vec<(usize, (u32, u32))> = outside_cover
            .edge_indices
            .iter()
            .copied()
            .zip(outside_cover.pairs.iter().copied())
            .chain(config.local_cover.iter().copied())
            .collect();
        merged.sort_unstable_by_key(|&(e, _)| e);
        let full = TwoPathCover {
            edge_indices: merged.iter().map(|&(e, _)| e).collect(),
            pairs: merged.iter().map(|&(_, p)| p).collect(),
        };
        assert_eq!(validate_two_path_cover(&hg, &full), Vec::new());
    }
}
