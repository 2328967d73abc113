//! Independent brute-force enumerators used to cross-check the backtracking
//! searches. Nothing here shares search logic with [`crate::matchings`]: the
//! matching oracle enumerates raw edge subsets and re-derives validity from
//! the definitions, and the cover oracle enumerates full per-edge pair
//! products and validates each candidate from scratch.

use std::collections::BTreeMap;

use crate::graphs::{BipartiteGraph, Hypergraph};
use crate::matchings::MatchError;
use crate::Limits;

/// Find a valid (h,k)-matching covering the left set `s` by enumerating all
/// subsets of the edges incident to `s`, in mask order. Returns the edge set
/// of the first valid covering subgraph, or `None` after exhausting all
/// subsets. Refuses with [`MatchError::CapExceeded`] when `2^|edges|`
/// exceeds `2^limits.subset_cap` (unless forced).
pub fn exhaustive_cover_matching(
    g: &BipartiteGraph,
    s: &[u32],
    h: u32,
    k: u32,
    limits: &Limits,
) -> Result<Option<Vec<(u32, u32)>>, MatchError> {
    g.neighborhood(s)?; // validates s
    let edges: Vec<(u32, u32)> = s
        .iter()
        .flat_map(|&l| g.neighbors(l).iter().map(move |&r| (l, r)))
        .collect();
    let m = edges.len();
    if !limits.allows(m) {
        return Err(MatchError::CapExceeded { size: 1u128 << m.min(127) });
    }
    // Per-left bitmasks over edge positions for the quick degree filter.
    let mut left_masks: BTreeMap<u32, u64> = BTreeMap::new();
    for (pos, &(l, _)) in edges.iter().enumerate() {
        *left_masks.entry(l).or_insert(0) |= 1 << pos;
    }
    'mask: for mask in 1u64..(1u64 << m) {
        for &l in s {
            let lm = left_masks.get(&l).copied().unwrap_or(0);
            if (mask & lm).count_ones() != h {
                continue 'mask;
            }
        }
        let chosen: Vec<(u32, u32)> = (0..m)
            .filter(|&p| mask & (1 << p) != 0)
            .map(|p| edges[p])
            .collect();
        if edge_set_is_hk_forest(&chosen, h, k) {
            return Ok(Some(chosen));
        }
    }
    Ok(None)
}

/// Validity check straight from the definition: the chosen edges form a
/// forest whose components have at most `k` edges, and every left endpoint
/// has degree exactly `h`. Written against raw edge lists, independent of
/// the `HkMatching` machinery.
fn edge_set_is_hk_forest(edges: &[(u32, u32)], h: u32, k: u32) -> bool {
    // Distinct edges required.
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if edges[i] == edges[j] {
                return false;
            }
        }
    }
    let mut left_degree: BTreeMap<u32, u32> = BTreeMap::new();
    for &(l, _) in edges {
        *left_degree.entry(l).or_insert(0) += 1;
    }
    if left_degree.values().any(|&d| d != h) {
        return false;
    }
    // Union-find over (side, vertex); a failed union is a cycle.
    let mut parent: BTreeMap<(bool, u32), (bool, u32)> = BTreeMap::new();
    let mut comp_edges: BTreeMap<(bool, u32), u32> = BTreeMap::new();
    fn find(
        parent: &mut BTreeMap<(bool, u32), (bool, u32)>,
        v: (bool, u32),
    ) -> (bool, u32) {
        let p = *parent.entry(v).or_insert(v);
        if p == v {
            v
        } else {
            let root = find(parent, p);
            parent.insert(v, root);
            root
        }
    }
    for &(l, r) in edges {
        let a = find(&mut parent, (true, l));
        let b = find(&mut parent, (false, r));
        if a == b {
            return false;
        }
        let total = comp_edges.get(&a).copied().unwrap_or(0)
            + comp_edges.get(&b).copied().unwrap_or(0)
            + 1;
        if total > k {
            return false;
        }
        parent.insert(a, b);
        comp_edges.insert(b, total);
    }
    true
}

/// Validity check for a full pair assignment, straight from the definition:
/// pairs distinct vertices inside their edges, injective, and no pair
/// intersects two others.
fn raw_cover_is_valid(hg: &Hypergraph, subset: &[usize], pairs: &[(u32, u32)]) -> bool {
    for (pos, &(a, b)) in pairs.iter().enumerate() {
        if a == b {
            return false;
        }
        let edge = hg.edge(subset[pos]);
        if !edge.contains(&a) || !edge.contains(&b) {
            return false;
        }
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (a, b) = (normalize(pairs[i]), normalize(pairs[j]));
            if a == b {
                return false;
            }
        }
    }
    let touches = |p: (u32, u32), q: (u32, u32)| {
        p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1
    };
    for mid in 0..pairs.len() {
        let count = (0..pairs.len())
            .filter(|&i| i != mid && touches(pairs[mid], pairs[i]))
            .count();
        if count >= 2 {
            return false;
        }
    }
    true
}

fn normalize(p: (u32, u32)) -> (u32, u32) {
    (p.0.min(p.1), p.0.max(p.1))
}

/// Number of full pair assignments over `subset` (the product of per-edge
/// pair counts), saturating.
fn product_size(hg: &Hypergraph, subset: &[usize]) -> u128 {
    let mut total: u128 = 1;
    for &e in subset {
        let n = hg.edge(e).len() as u128;
        total = total.saturating_mul(n * (n - 1) / 2);
    }
    total
}

/// Enumerate every valid 2-path cover of `subset` by trying the full product
/// of per-edge pairs and validating each candidate from scratch. Pairs are
/// reported normalized `(min, max)` in subset order.
pub fn enumerate_two_path_covers(
    hg: &Hypergraph,
    subset: &[usize],
    limits: &Limits,
) -> Result<Vec<Vec<(u32, u32)>>, MatchError> {
    let mut out = Vec::new();
    for_each_full_assignment(hg, subset, limits, &mut |pairs| {
        if raw_cover_is_valid(hg, subset, pairs) {
            out.push(pairs.iter().copied().map(normalize).collect());
        }
        true
    })?;
    Ok(out)
}

/// Whether any valid 2-path cover of `subset` exists (early exit).
pub fn exists_two_path_cover(
    hg: &Hypergraph,
    subset: &[usize],
    limits: &Limits,
) -> Result<bool, MatchError> {
    let mut found = false;
    for_each_full_assignment(hg, subset, limits, &mut |pairs| {
        if raw_cover_is_valid(hg, subset, pairs) {
            found = true;
            return false;
        }
        true
    })?;
    Ok(found)
}

/// Drive `visit` over the full cartesian product of per-edge pairs; `visit`
/// returns false to stop early.
fn for_each_full_assignment(
    hg: &Hypergraph,
    subset: &[usize],
    limits: &Limits,
    visit: &mut dyn FnMut(&[(u32, u32)]) -> bool,
) -> Result<(), MatchError> {
    for (pos, &e) in subset.iter().enumerate() {
        if e >= hg.edge_count() {
            return Err(MatchError::Json(format!("edge index {e} out of range")));
        }
        if pos > 0 && subset[pos - 1] >= e {
            return Err(MatchError::Json("edge subset must be strictly increasing".into()));
        }
        if hg.edge(e).len() < 2 {
            return Err(MatchError::EdgeTooSmall { edge: e });
        }
    }
    let size = product_size(hg, subset);
    if !limits.force && size > (1u128 << limits.subset_cap.min(127)) {
        return Err(MatchError::CapExceeded { size });
    }
    let options: Vec<Vec<(u32, u32)>> = subset
        .iter()
        .map(|&e| {
            let edge = hg.edge(e);
            let mut pairs = Vec::new();
            for i in 0..edge.len() {
                for j in i + 1..edge.len() {
                    pairs.push((edge[i], edge[j]));
                }
            }
            pairs
        })
        .collect();
    if subset.is_empty() {
        visit(&[]);
        return Ok(());
    }
    let mut cursor = vec![0usize; subset.len()];
    let mut pairs: Vec<(u32, u32)> = cursor
        .iter()
        .enumerate()
        .map(|(i, &c)| options[i][c])
        .collect();
    loop {
        if !visit(&pairs) {
            return Ok(());
        }
        // Odometer increment.
        let mut pos = subset.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < options[pos].len() {
                pairs[pos] = options[pos][cursor[pos]];
                break;
            }
            cursor[pos] = 0;
            pairs[pos] = options[pos][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchings::{
        find_cover_matching, gadget, minimal_counterexample, two_path_cover,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn oracle_agrees_on_handcrafted_graphs() {
        let coverable = BipartiteGraph::new(2, 4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert!(exhaustive_cover_matching(&coverable, &[0, 1], 2, 4, &Limits::default())
            .unwrap()
            .is_some());
        let tight = BipartiteGraph::new(
            3,
            3,
            vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]],
        )
        .unwrap();
        assert!(exhaustive_cover_matching(&tight, &[0, 1, 2], 2, 4, &Limits::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn oracle_agrees_with_search_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let left = rng.gen_range(1..=4u32);
            let right = rng.gen_range(2..=6u32);
            let adj: Vec<Vec<u32>> = (0..left)
                .map(|_| (0..3).map(|_| rng.gen_range(0..right)).collect())
                .collect();
            let g = BipartiteGraph::new(left, right, adj).unwrap();
            let s: Vec<u32> = (0..left).collect();
            for (h, k) in [(1u32, 1u32), (2, 2), (2, 4)] {
                let fast = find_cover_matching(&g, &s, h, k).unwrap().is_covered();
                let slow = exhaustive_cover_matching(&g, &s, h, k, &Limits::default())
                    .unwrap()
                    .is_some();
                assert_eq!(fast, slow, "disagreement on {} (h={h},k={k})", g.to_text());
            }
        }
    }

    #[test]
    fn every_full_gadget_cover_uses_the_attach_vertex() {
        let (hg, attach) = gadget();
        let all: Vec<usize> = (0..hg.edge_count()).collect();
        let covers = enumerate_two_path_covers(&hg, &all, &Limits::default()).unwrap();
        assert!(!covers.is_empty());
        for cover in &covers {
            assert!(
                cover.iter().any(|&(a, b)| a == attach || b == attach),
                "cover {cover:?} misses the attach vertex"
            );
        }
    }

    #[test]
    fn minimal_counterexample_dichotomy_via_oracle() {
        let hg = minimal_counterexample();
        let all: Vec<usize> = (0..4).collect();
        assert!(!exists_two_path_cover(&hg, &all, &Limits::default()).unwrap());
        for drop in 0..4 {
            let subset: Vec<usize> = (0..4).filter(|&e| e != drop).collect();
            assert!(exists_two_path_cover(&hg, &subset, &Limits::default()).unwrap());
        }
    }

    #[test]
    fn cover_search_agrees_with_oracle_on_random_hypergraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let vertices = rng.gen_range(3..=7u32);
            let edge_count = rng.gen_range(1..=5usize);
            let edges: Vec<Vec<u32>> = (0..edge_count)
                .map(|_| {
                    let size = rng.gen_range(2..=3usize);
                    let mut edge: Vec<u32> = Vec::new();
                    while edge.len() < size {
                        let v = rng.gen_range(0..vertices);
                        if !edge.contains(&v) {
                            edge.push(v);
                        }
                    }
                    edge
                })
                .collect();
            let hg = Hypergraph::new(vertices, edges).unwrap();
            let subset: Vec<usize> = (0..edge_count).collect();
            let fast = two_path_cover(&hg, &subset).unwrap().is_some();
            let slow = exists_two_path_cover(&hg, &subset, &Limits::default()).unwrap();
            assert_eq!(fast, slow, "disagreement on {}", hg.to_text());
        }
    }

    #[test]
    fn cap_refuses_oversized_enumerations() {
        let g = BipartiteGraph::new(
            8,
            8,
            (0..8).map(|_| (0..8u32).collect()).collect(),
        )
        .unwrap();
        let s: Vec<u32> = (0..8).collect();
        let tight = Limits { subset_cap: 10, force: false };
        assert!(matches!(
            exhaustive_cover_matching(&g, &s, 2, 4, &tight),
            Err(MatchError::CapExceeded { .. })
        ));
    }
}
