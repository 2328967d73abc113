//! Flippable product families of partial assignments and the strategies
//! built from them.
//!
//! A *factor* is a nonempty set of partial assignments over one shared
//! domain; a *product family* is a list of factors with pairwise disjoint
//! domains and denotes all unions of one member per factor. The family is
//! *flippable* when every domain variable takes both values somewhere.
//!
//! Every component of a (2,4)-matching in a formula's adjacency graph
//! yields a two-element flippable factor over the component's variables
//! whose members both satisfy every clause the component covers — the
//! bridge from the cover game to space lower bounds. [`winning`] runs the
//! game behind a strategy interface and verifies the winning-strategy
//! conditions; [`free`] derives and verifies free families of piecewise
//! assignments; [`bounds`] turns a verified budget into the space bounds.

mod bounds;
mod free;
mod winning;

pub use bounds::{lower_bound_report, BoundReport, MuProvenance};
pub use free::{free_family_from_strategy, verify_free_family, FreeFamily, FreeReport, FreeViolation};
pub use winning::{
    enumerate_families, extension_target, verify_winning_strategy, ExtensionTarget, GameStrategy,
    Strategy, StrategyReport, StrategyViolation,
};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cnf::{
    adjacency_graph, AssignError, Clause, Cnf, CnfError, PartialAssignment, Polynomial,
};
use crate::covergame::GameError;
use crate::matchings::{validate_matching, HkMatching, MatchComponent};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StratError {
    #[error("a factor needs at least one assignment")]
    EmptyFactor,
    #[error("assignments within a factor must share one domain")]
    MixedDomain,
    #[error("factor domains must be pairwise disjoint")]
    OverlappingDomains,
    #[error("factor index {index} out of range ({count} factors)")]
    FactorIndexOutOfRange { index: usize, count: usize },
    #[error("no complementary satisfying pair exists for the component on lefts {lefts:?}")]
    NoFlippablePair { lefts: Vec<u32> },
    #[error("matching is not valid for the adjacency graph ({violations} violations)")]
    InvalidMatching { violations: usize },
    #[error("polynomial index {index} out of range for the encoded formula")]
    BadPolynomialIndex { index: usize },
    #[error("enumeration reached {count} families; raise the cap to continue")]
    CapExceeded { count: usize },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Assign(#[from] AssignError),
}

/// A nonempty set of partial assignments over one common domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Factor {
    assignments: BTreeSet<PartialAssignment>,
}

impl Factor {
    pub fn new(assignments: Vec<PartialAssignment>) -> Result<Self, StratError> {
        let assignments: BTreeSet<PartialAssignment> = assignments.into_iter().collect();
        let mut iter = assignments.iter();
        let first = iter.next().ok_or(StratError::EmptyFactor)?;
        let domain = first.domain();
        if iter.any(|a| a.domain() != domain) {
            return Err(StratError::MixedDomain);
        }
        Ok(Factor { assignments })
    }

    /// The trivial factor `{⋆}`: only the empty assignment.
    pub fn star() -> Self {
        Factor { assignments: std::iter::once(PartialAssignment::new()).collect() }
    }

    pub fn is_star(&self) -> bool {
        self.assignments.len() == 1 && self.domain().is_empty()
    }

    pub fn domain(&self) -> Vec<u32> {
        self.assignments.iter().next().expect("factors are nonempty").domain()
    }

    pub fn assignments(&self) -> impl Iterator<Item = &PartialAssignment> {
        self.assignments.iter()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every domain variable takes both values across the assignments.
    pub fn is_flippable(&self) -> bool {
        self.domain().iter().all(|&v| {
            let mut seen = [false, false];
            for a in &self.assignments {
                if let Some(bit) = a.get(v) {
                    seen[bit as usize] = true;
                }
            }
            seen[0] && seen[1]
        })
    }

    /// Drop one assignment (by canonical position). Used to craft broken
    /// families in tests; returns None if the factor would become empty.
    pub fn without_assignment(&self, index: usize) -> Option<Factor> {
        if self.assignments.len() <= 1 || index >= self.assignments.len() {
            return None;
        }
        let assignments = self
            .assignments
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, a)| a.clone())
            .collect();
        Some(Factor { assignments })
    }
}

/// A product of domain-disjoint factors, kept canonical: trivial `{⋆}`
/// factors are dropped and the rest sorted by domain, so rank equals the
/// stored factor count and equal families compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProductFamily {
    factors: Vec<Factor>,
}

impl ProductFamily {
    /// The rank-0 family `{⋆}`.
    pub fn star() -> Self {
        ProductFamily::default()
    }

    pub fn new(factors: Vec<Factor>) -> Result<Self, StratError> {
        let mut kept: Vec<Factor> = factors.into_iter().filter(|f| !f.is_star()).collect();
        kept.sort_by(|a, b| a.domain().cmp(&b.domain()));
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for factor in &kept {
            for v in factor.domain() {
                if !seen.insert(v) {
                    return Err(StratError::OverlappingDomains);
                }
            }
        }
        Ok(ProductFamily { factors: kept })
    }

    /// Number of non-trivial factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn domain(&self) -> BTreeSet<u32> {
        self.factors.iter().flat_map(|f| f.domain()).collect()
    }

    /// All unions of one assignment per factor; the empty product has the
    /// single member `⋆`.
    pub fn members(&self) -> Vec<PartialAssignment> {
        let mut out = vec![PartialAssignment::new()];
        for factor in &self.factors {
            let mut next = Vec::with_capacity(out.len() * factor.len());
            for base in &out {
                for a in factor.assignments() {
                    next.push(
                        base.disjoint_union(a).expect("factor domains are pairwise disjoint"),
                    );
                }
            }
            out = next;
        }
        out
    }

    pub fn member_count(&self) -> usize {
        self.factors.iter().map(Factor::len).product()
    }

    /// Keep only the factors at `keep` (the result is ⊑ the input).
    pub fn restrict(&self, keep: &[usize]) -> Result<ProductFamily, StratError> {
        let mut factors = Vec::with_capacity(keep.len());
        for &i in keep {
            let factor = self
                .factors
                .get(i)
                .ok_or(StratError::FactorIndexOutOfRange { index: i, count: self.factors.len() })?;
            factors.push(factor.clone());
        }
        ProductFamily::new(factors)
    }

    /// All 2^rank restrictions, including `{⋆}` and the family itself.
    pub fn factor_subsets(&self) -> Vec<ProductFamily> {
        let n = self.factors.len();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0u64..(1u64 << n) {
            let keep: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            out.push(self.restrict(&keep).expect("indices in range"));
        }
        out
    }

    /// The product with another family over disjoint variables.
    pub fn merge(&self, other: &ProductFamily) -> Result<ProductFamily, StratError> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        ProductFamily::new(factors)
    }

    /// `self ⊒ other`: every non-trivial factor of `other` is a factor of
    /// `self`.
    pub fn refines(&self, other: &ProductFamily) -> bool {
        other.factors.iter().all(|f| self.factors.contains(f))
    }

    pub fn is_flippable(&self) -> bool {
        self.factors.iter().all(Factor::is_flippable)
    }

    /// `H ⊨ p`: the polynomial vanishes under every member.
    pub fn satisfies_poly(&self, p: &Polynomial) -> bool {
        self.members().iter().all(|alpha| p.apply(alpha).is_zero())
    }

    /// `H ⊨ C`: every member satisfies the clause.
    pub fn satisfies_clause(&self, clause: &Clause) -> bool {
        self.members().iter().all(|alpha| alpha.satisfies_clause(clause))
    }
}

/// Search for two complementary assignments on `vars` that both satisfy
/// every clause in `clauses`. Deterministic: the first hit in lexicographic
/// order of the lower member wins.
pub(crate) fn complementary_pair(vars: &[u32], clauses: &[&Clause]) -> Option<Factor> {
    let n = vars.len();
    debug_assert!(n <= 16, "component domains are tiny");
    // Every complementary pair has exactly one member with the lowest
    // variable set to 0, so scanning half the cube sees each pair once.
    for bits in 0u32..(1u32 << n.saturating_sub(1)) {
        let alpha = PartialAssignment::from_pairs(
            &vars.iter().enumerate().map(|(i, &v)| (v, bits >> i & 1 == 1)).collect::<Vec<_>>(),
        )
        .expect("component variables are distinct");
        let flipped = PartialAssignment::from_pairs(
            &vars.iter().enumerate().map(|(i, &v)| (v, bits >> i & 1 == 0)).collect::<Vec<_>>(),
        )
        .expect("component variables are distinct");
        if clauses
            .iter()
            .all(|c| alpha.satisfies_clause(c) && flipped.satisfies_clause(c))
        {
            return Factor::new(vec![alpha, flipped]).ok();
        }
    }
    None
}

/// The factor a single matching component induces: assignments over the
/// component's variables (its right vertices), both satisfying every
/// clause the component covers, disagreeing everywhere.
pub(crate) fn component_factor(phi: &Cnf, component: &MatchComponent) -> Result<Factor, StratError> {
    let vars: Vec<u32> = component.rights().iter().map(|&r| r + 1).collect();
    let clauses: Vec<&Clause> = component
        .lefts()
        .iter()
        .map(|&l| &phi.clauses()[l as usize])
        .collect();
    complementary_pair(&vars, &clauses)
        .ok_or_else(|| StratError::NoFlippablePair { lefts: component.lefts().to_vec() })
}

/// The flippable product family a (2,4)-matching induces on the formula's
/// adjacency graph: one two-assignment factor per component, members
/// satisfying every covered clause, domain exactly the covered variables,
/// rank equal to the component count.
pub fn flippable_from_matching(phi: &Cnf, f: &HkMatching) -> Result<ProductFamily, StratError> {
    let adjacency = adjacency_graph(phi);
    let violations = validate_matching(&adjacency.graph, f);
    if !violations.is_empty() {
        return Err(StratError::InvalidMatching { violations: violations.len() });
    }
    let factors = f
        .components()
        .iter()
        .map(|component| component_factor(phi, component))
        .collect::<Result<Vec<_>, _>>()?;
    ProductFamily::new(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchings::MatchComponent;

    fn assignment(pairs: &[(u32, bool)]) -> PartialAssignment {
        PartialAssignment::from_pairs(pairs).unwrap()
    }

    fn factor_pairs(factor: &Factor) -> BTreeSet<Vec<(u32, bool)>> {
        factor.assignments().map(|a| a.iter().collect()).collect()
    }

    #[test]
    fn isolated_variable_factor_takes_both_values() {
        // x1 alone in its component: the factor is {x1=0, x1=1}.
        let phi = Cnf::new(2, vec![vec![1, 2]]).unwrap();
        let f = HkMatching::new(2, 4, vec![MatchComponent::isolated_right(0)]);
        let family = flippable_from_matching(&phi, &f).unwrap();
        assert_eq!(family.rank(), 1);
        assert_eq!(
            factor_pairs(&family.factors()[0]),
            BTreeSet::from([vec![(1, false)], vec![(1, true)]])
        );
    }

    #[test]
    fn two_edge_component_flips_across_the_clause() {
        // Component x1—(x1 | x2)—x2: pair {(0,1), (1,0)}.
        let phi = Cnf::new(2, vec![vec![1, 2]]).unwrap();
        let component = MatchComponent::from_edges(vec![(0, 0), (0, 1)]).unwrap();
        let family = flippable_from_matching(&phi, &HkMatching::new(2, 4, vec![component])).unwrap();
        assert_eq!(
            factor_pairs(&family.factors()[0]),
            BTreeSet::from([
                vec![(1, false), (2, true)],
                vec![(1, true), (2, false)],
            ])
        );
    }

    #[test]
    fn four_edge_components_match_both_polarity_variants() {
        // x—(x|y)—y—(y|z)—z: pair {(0,1,0), (1,0,1)}.
        let positive = Cnf::new(3, vec![vec![1, 2], vec![2, 3]]).unwrap();
        let component =
            MatchComponent::from_edges(vec![(0, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        let family =
            flippable_from_matching(&positive, &HkMatching::new(2, 4, vec![component.clone()]))
                .unwrap();
        assert_eq!(
            factor_pairs(&family.factors()[0]),
            BTreeSet::from([
                vec![(1, false), (2, true), (3, false)],
                vec![(1, true), (2, false), (3, true)],
            ])
        );
        // x—(x|y)—y—(~y|z)—z: pair {(0,1,1), (1,0,0)}.
        let mixed = Cnf::new(3, vec![vec![1, 2], vec![-2, 3]]).unwrap();
        let family =
            flippable_from_matching(&mixed, &HkMatching::new(2, 4, vec![component])).unwrap();
        assert_eq!(
            factor_pairs(&family.factors()[0]),
            BTreeSet::from([
                vec![(1, false), (2, true), (3, true)],
                vec![(1, true), (2, false), (3, false)],
            ])
        );
    }

    #[test]
    fn built_families_satisfy_covered_clauses_and_flip() {
        // Two components on a 4-clause formula; checks the full contract:
        // members satisfy covered clauses, domain = covered variables,
        // rank = component count, flippable.
        let phi = Cnf::new(
            6,
            vec![vec![1, 2, 3], vec![3, 4, 5], vec![-1, 5, 6], vec![2, -4, 6]],
        )
        .unwrap();
        let c0 = MatchComponent::from_edges(vec![(0, 0), (0, 1)]).unwrap();
        let c1 = MatchComponent::from_edges(vec![(1, 3), (1, 4), (2, 4), (2, 5)]).unwrap();
        let f = HkMatching::new(2, 4, vec![c0, c1]);
        let family = flippable_from_matching(&phi, &f).unwrap();
        assert_eq!(family.rank(), 2);
        assert!(family.is_flippable());
        assert_eq!(family.domain(), BTreeSet::from([1, 2, 4, 5, 6]));
        assert_eq!(family.member_count(), 4);
        for clause_idx in [0usize, 1, 2] {
            assert!(family.satisfies_clause(&phi.clauses()[clause_idx]));
        }
        // The uncovered clause is not guaranteed.
        let members = family.members();
        assert_eq!(members.len(), 4);
        for alpha in &members {
            assert_eq!(alpha.domain(), vec![1, 2, 4, 5, 6]);
        }
    }

    #[test]
    fn star_is_neutral_for_rank_and_merge() {
        let phi = Cnf::new(2, vec![vec![1, 2]]).unwrap();
        let component = MatchComponent::from_edges(vec![(0, 0), (0, 1)]).unwrap();
        let family = flippable_from_matching(&phi, &HkMatching::new(2, 4, vec![component])).unwrap();
        let with_star =
            family.merge(&ProductFamily::new(vec![Factor::star()]).unwrap()).unwrap();
        assert_eq!(with_star, family);
        assert_eq!(with_star.rank(), 1);
        // Restricting away all factors leaves {⋆}: one member, the empty
        // assignment.
        let star = family.restrict(&[]).unwrap();
        assert_eq!(star.rank(), 0);
        assert_eq!(star.members(), vec![PartialAssignment::new()]);
        assert!(star.refines(&ProductFamily::star()));
        assert!(family.refines(&star));
        assert!(!star.refines(&family));
    }

    #[test]
    fn merge_of_two_flip_factors_has_four_members() {
        let f1 = Factor::new(vec![assignment(&[(1, false)]), assignment(&[(1, true)])]).unwrap();
        let f2 = Factor::new(vec![assignment(&[(2, false)]), assignment(&[(2, true)])]).unwrap();
        let h1 = ProductFamily::new(vec![f1.clone()]).unwrap();
        let h2 = ProductFamily::new(vec![f2]).unwrap();
        let merged = h1.merge(&h2).unwrap();
        assert_eq!(merged.member_count(), 4);
        assert_eq!(merged.members().len(), 4);
        // Overlapping domains are rejected.
        let clash = ProductFamily::new(vec![f1]).unwrap();
        assert_eq!(h1.merge(&clash), Err(StratError::OverlappingDomains));
    }

    #[test]
    fn restriction_rank_counts_kept_nontrivial_factors() {
        let f1 = Factor::new(vec![assignment(&[(1, false)]), assignment(&[(1, true)])]).unwrap();
        let f2 = Factor::new(vec![assignment(&[(2, false)]), assignment(&[(2, true)])]).unwrap();
        let f3 = Factor::new(vec![assignment(&[(3, false)]), assignment(&[(3, true)])]).unwrap();
        let h = ProductFamily::new(vec![f1, f2, f3]).unwrap();
        assert_eq!(h.restrict(&[0, 2]).unwrap().rank(), 2);
        assert_eq!(h.restrict(&[1]).unwrap().rank(), 1);
        assert_eq!(h.factor_subsets().len(), 8);
        assert!(matches!(
            h.restrict(&[5]),
            Err(StratError::FactorIndexOutOfRange { index: 5, count: 3 })
        ));
    }

    #[test]
    fn contradictory_component_clauses_have_no_pair() {
        // All four sign patterns over {x1, x2} cannot be satisfied at once.
        let c1 = Clause::new(vec![1, 2]).unwrap();
        let c2 = Clause::new(vec![-1, 2]).unwrap();
        let c3 = Clause::new(vec![1, -2]).unwrap();
        let c4 = Clause::new(vec![-1, -2]).unwrap();
        assert!(complementary_pair(&[1, 2], &[&c1, &c2, &c3, &c4]).is_none());
        // Sanity: dropping one pattern restores satisfiability.
        assert!(complementary_pair(&[1, 2], &[&c1, &c4]).is_some());
    }

    #[test]
    fn invalid_matchings_are_rejected() {
        let phi = Cnf::new(2, vec![vec![1, 2]]).unwrap();
        // Edge to a variable the clause does not mention.
        let bogus = MatchComponent::from_edges(vec![(0, 0), (0, 5)]).unwrap();
        let err =
            flippable_from_matching(&phi, &HkMatching::new(2, 4, vec![bogus])).unwrap_err();
        assert!(matches!(err, StratError::InvalidMatching { .. }));
    }

    #[test]
    fn mixed_domain_factors_are_rejected() {
        assert_eq!(
            Factor::new(vec![assignment(&[(1, true)]), assignment(&[(2, true)])]),
            Err(StratError::MixedDomain)
        );
        assert_eq!(Factor::new(vec![]), Err(StratError::EmptyFactor));
    }
}
