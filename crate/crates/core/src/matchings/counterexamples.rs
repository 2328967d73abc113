//! An explicit family of hypergraphs with no full 2-path cover, built from a
//! minimal 6-vertex example by repeated gadget amplification.
//!
//! The minimal example is a size-3 edge `{v1,v2,v3}` with a pendant size-2
//! edge hanging off each `vi`. Any pair chosen inside the triple intersects
//! the forced pairs of two pendant edges, chaining three edges, so no full
//! cover exists — yet every proper edge subset is coverable, and the
//! vertex/edge ratio is 6/4.
//!
//! The amplification gadget is a 5-cycle `v1..v5` where edge `i` of the cycle
//! is fattened to the triple `{v_i, v_{i+1}, w}` for a fresh `w`, plus two
//! pendant size-2 edges on two of the `w`'s. Every full cover of the gadget
//! must use its attach vertex (`v1`), so gluing the gadget's attach vertex
//! onto a host vertex `w` forces `w` into any full cover — which substitutes
//! for a deleted pendant edge at `w` while improving the vertex/edge ratio by
//! +10/+6 per amplification. Iterating pushes the ratio toward 5/3 from
//! below, so for any `epsilon > 1/3` finitely many amplifications reach
//! `|V| >= (2 - epsilon)|E|`.

use num_rational::BigRational;

use crate::graphs::Hypergraph;
use crate::ratio::{format_ratio, parse_ratio, ratio_from_usize};

use super::MatchError;

/// The 6-vertex, 4-edge hypergraph with no full 2-path cover whose proper
/// subsets are all coverable. Vertices: `v1,v2,v3 = 0,1,2` (the triple),
/// `w1,w2,w3 = 3,4,5` (pendant tips).
pub fn minimal_counterexample() -> Hypergraph {
    Hypergraph::new(
        6,
        vec![vec![0, 1, 2], vec![0, 3], vec![1, 4], vec![2, 5]],
    )
    .unwrap()
}

/// The amplification gadget and its attach vertex.
///
/// 12 vertices: `v1..v5 = 0..4` (cycle), `w1..w5 = 5..9` (triple tips),
/// `z2 = 10`, `z5 = 11` (pendant tips). 7 edges: five triples around the
/// cycle and two pendant pairs. Every full 2-path cover uses the attach
/// vertex `v1 = 0` in some pair.
pub fn gadget() -> (Hypergraph, u32) {
    let hg = Hypergraph::new(
        12,
        vec![
            vec![0, 1, 8],  // {v1, v2, w4}
            vec![1, 2, 9],  // {v2, v3, w5}
            vec![2, 3, 5],  // {v3, v4, w1}
            vec![3, 4, 6],  // {v4, v5, w2}
            vec![0, 4, 7],  // {v1, v5, w3}
            vec![9, 11],    // {w5, z5}
            vec![6, 10],    // {w2, z2}
        ],
    )
    .unwrap();
    (hg, 0)
}

/// One amplification step: at the lowest-index size-2 edge `{w, y}` with a
/// degree-1 endpoint `y` (the largest-index degree-1 endpoint), delete the
/// edge and `y`, then glue a fresh gadget by its attach vertex onto `w`.
/// Net effect: +10 vertices, +6 edges, and the no-full-cover property is
/// preserved because the gadget forces `w` into any full cover exactly as
/// the deleted pendant edge did.
pub fn amplify(hg: &Hypergraph) -> Result<Hypergraph, MatchError> {
    let degree: Vec<usize> = (0..hg.vertex_count()).map(|v| hg.degree(v)).collect();
    let mut target: Option<(usize, u32, u32)> = None; // (edge, y, w)
    for (ei, edge) in hg.edges().iter().enumerate() {
        if edge.len() != 2 {
            continue;
        }
        let (a, b) = (edge[0], edge[1]);
        let y = if degree[b as usize] == 1 {
            Some(b)
        } else if degree[a as usize] == 1 {
            Some(a)
        } else {
            None
        };
        if let Some(y) = y {
            let w = if y == a { b } else { a };
            target = Some((ei, y, w));
            break;
        }
    }
    let (pendant_edge, y, w) = target.ok_or(MatchError::NoPendantEdge)?;
    // Renumber: drop y, vertices above y shift down by one.
    let shift = |v: u32| if v > y { v - 1 } else { v };
    let host_count = hg.vertex_count() - 1;
    let mut edges: Vec<Vec<u32>> = Vec::with_capacity(hg.edge_count() + 6);
    for (ei, edge) in hg.edges().iter().enumerate() {
        if ei == pendant_edge {
            continue;
        }
        edges.push(edge.iter().map(|&v| shift(v)).collect());
    }
    let (gadget_hg, attach) = gadget();
    // Gadget vertex `attach` lands on w; the others take fresh indices
    // host_count, host_count+1, ... in gadget order.
    let mut fresh = host_count;
    let mut gadget_map = Vec::with_capacity(gadget_hg.vertex_count() as usize);
    for v in 0..gadget_hg.vertex_count() {
        if v == attach {
            gadget_map.push(shift(w));
        } else {
            gadget_map.push(fresh);
            fresh += 1;
        }
    }
    for edge in gadget_hg.edges() {
        edges.push(edge.iter().map(|&v| gadget_map[v as usize]).collect());
    }
    Ok(Hypergraph::new(fresh, edges)?)
}

/// A hypergraph with no full 2-path cover whose vertex/edge ratio reaches
/// `2 - epsilon`.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub hypergraph: Hypergraph,
    /// How many amplification steps were applied to the minimal example.
    pub amplifications: u32,
    /// `|V| / |E|`, exactly.
    pub ratio: BigRational,
}

/// Build the smallest member of the family (fewest amplifications) with
/// `|V| >= (2 - epsilon)|E|`. The family's ratios approach 5/3, so
/// `epsilon > 1/3` is required.
pub fn counterexample(epsilon: &BigRational) -> Result<Counterexample, MatchError> {
    let third = parse_ratio("1/3").unwrap();
    if *epsilon <= third {
        return Err(MatchError::EpsilonOutOfRange(format_ratio(epsilon)));
    }
    let two = parse_ratio("2").unwrap();
    let need = &two - epsilon;
    let mut n: u32 = 0;
    let mut hg = minimal_counterexample();
    loop {
        let vertices = ratio_from_usize(hg.vertex_count() as usize);
        let edge_count = ratio_from_usize(hg.edge_count());
        let ratio = &vertices / &edge_count;
        if ratio >= need {
            return Ok(Counterexample { hypergraph: hg, amplifications: n, ratio });
        }
        hg = amplify(&hg)?;
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchings::{two_path_cover, validate_two_path_cover};

    #[test]
    fn minimal_example_counts_and_dichotomy() {
        let hg = minimal_counterexample();
        assert_eq!(hg.vertex_count(), 6);
        assert_eq!(hg.edge_count(), 4);
        // No full cover...
        assert!(two_path_cover(&hg, &[0, 1, 2, 3]).unwrap().is_none());
        // ...but every drop-one subset is coverable.
        for drop in 0..4 {
            let subset: Vec<usize> = (0..4).filter(|&e| e != drop).collect();
            let cover = two_path_cover(&hg, &subset).unwrap();
            assert!(cover.is_some(), "subset without edge {drop} should be coverable");
            assert_eq!(validate_two_path_cover(&hg, &cover.unwrap()), Vec::new());
        }
    }

    #[test]
    fn gadget_counts_and_full_cover_through_attach_vertex() {
        let (hg, attach) = gadget();
        assert_eq!(hg.vertex_count(), 12);
        assert_eq!(hg.edge_count(), 7);
        let all: Vec<usize> = (0..7).collect();
        let cover = two_path_cover(&hg, &all).unwrap().expect("gadget has a full cover");
        assert_eq!(validate_two_path_cover(&hg, &cover), Vec::new());
        assert!(
            cover.pairs.iter().any(|&(a, b)| a == attach || b == attach),
            "search found a full cover, which must pass through the attach vertex"
        );
    }

    #[test]
    fn one_amplification_grows_by_ten_and_six() {
        let amplified = amplify(&minimal_counterexample()).unwrap();
        assert_eq!(amplified.vertex_count(), 16);
        assert_eq!(amplified.edge_count(), 10);
        let all: Vec<usize> = (0..10).collect();
        assert!(two_path_cover(&amplified, &all).unwrap().is_none());
        for drop in 0..10 {
            let subset: Vec<usize> = (0..10).filter(|&e| e != drop).collect();
            assert!(
                two_path_cover(&amplified, &subset).unwrap().is_some(),
                "subset without edge {drop} should be coverable"
            );
        }
    }

    #[test]
    fn amplification_requires_a_pendant_edge() {
        let triples = Hypergraph::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(amplify(&triples), Err(MatchError::NoPendantEdge));
    }

    #[test]
    fn counterexample_hits_the_requested_ratio() {
        // 2 - 5/12 = 19/12; the minimal example gives 6/4 < 19/12 and one
        // amplification gives 16/10 = 8/5 >= 19/12.
        let out = counterexample(&parse_ratio("5/12").unwrap()).unwrap();
        assert_eq!(out.amplifications, 1);
        assert_eq!(out.hypergraph.vertex_count(), 16);
        assert_eq!(out.hypergraph.edge_count(), 10);
        assert_eq!(out.ratio, parse_ratio("8/5").unwrap());
        assert!(out.ratio >= parse_ratio("19/12").unwrap());

        // 2 - 1/2 = 3/2 is met by the minimal example itself.
        let easy = counterexample(&parse_ratio("1/2").unwrap()).unwrap();
        assert_eq!(easy.amplifications, 0);
        assert_eq!(easy.hypergraph.vertex_count(), 6);

        // Deeper into the family: ratios keep rising toward 5/3.
        let deep = counterexample(&parse_ratio("2/5").unwrap()).unwrap();
        assert_eq!(
            deep.ratio,
            ratio_from_usize(6 + 10 * deep.amplifications as usize)
                / ratio_from_usize(4 + 6 * deep.amplifications as usize)
        );
        assert!(deep.ratio >= parse_ratio("8/5").unwrap());
    }

    #[test]
    fn counterexample_rejects_small_epsilon() {
        assert!(matches!(
            counterexample(&parse_ratio("1/3").unwrap()),
            Err(MatchError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            counterexample(&parse_ratio("1/24").unwrap()),
            Err(MatchError::EpsilonOutOfRange(_))
        ));
    }
}
