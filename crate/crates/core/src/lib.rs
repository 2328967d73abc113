//! Exact combinatorial machinery for degree-bounded bipartite cover problems.
//!
//! The crate is organized around one central object: a *(h,k)-matching*, a
//! forest subgraph of a bipartite graph whose components are trees with at
//! most `k` edges in which every left vertex has degree exactly `h`. For
//! `(h,k) = (2,4)` these matchings witness that a set of left vertices can be
//! "doubly covered" by right vertices, and they are equivalent to *2-path
//! covers* of the left vertices' neighborhood hypergraph.
//!
//! On top of that the crate provides:
//!
//! * [`graphs`] — bipartite graphs and hypergraphs, text formats, exhaustive
//!   expansion certification;
//! * [`matchings`] — matching validation and search, 2-path covers, the
//!   matching/cover correspondence, reducible configurations, and an explicit
//!   family of hypergraphs with no full 2-path cover;
//! * [`covergame`] — a two-player pebbling-style game in which Cover extends
//!   a matching in response to challenged vertices while keeping the
//!   remaining graph coverable;
//! * [`cnf`] — CNF formulas, clause/variable adjacency graphs, a twin-variable
//!   polynomial encoding, and partial assignments;
//! * [`strategies`] — product families of partial assignments, flippable
//!   families extracted from matchings, winning-strategy and free-family
//!   verification, and space lower-bound reports;
//! * [`proofspace`] — resolution and polynomial-calculus refutation traces
//!   with exact space accounting;
//! * [`oracle`] — independent brute-force enumerators used to cross-check the
//!   search code;
//! * [`sweep`] — exhaustive sweeps over small graph classes.
//!
//! Everything is exact: fractions are `BigRational`, searches are exhaustive
//! within documented caps, and all iteration orders are deterministic.

#![forbid(unsafe_code)]

pub mod cnf;
pub mod covergame;
pub mod graphs;
pub mod matchings;
pub mod oracle;
pub mod proofspace;
pub mod ratio;
pub mod strategies;
pub mod sweep;

/// Caps on exhaustive enumeration, threaded through every operation whose
/// worst case is exponential. The default cap refuses subset enumeration over
/// ground sets larger than 20 unless `force` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest ground-set size for which `2^n`-style subset enumeration runs.
    pub subset_cap: usize,
    /// Run anyway when the cap is exceeded.
    pub force: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { subset_cap: 20, force: false }
    }
}

impl Limits {
    /// A cap that never refuses. Used by tests and callers that have already
    /// sized the instance.
    pub fn forced() -> Self {
        Limits { subset_cap: usize::MAX, force: true }
    }

    /// Whether enumeration over a ground set of `n` elements may proceed.
    pub fn allows(&self, n: usize) -> bool {
        self.force || n <= self.subset_cap
    }
}
