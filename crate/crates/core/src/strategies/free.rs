//! Free families of piecewise assignments.
//!
//! A family of piecewise assignments is *r-free* for a formula when no
//! member falsifies a clause, the family is closed under dropping pieces,
//! and every member with fewer than `r` pieces extends on any unassigned
//! variable to members setting it each way. A strategy whose families are
//! products of two-element flippable factors yields one at `r = k − 1`:
//! the members are all unions of one assignment per factor, over families
//! of rank at most `r`.

use std::collections::BTreeSet;

use super::{enumerate_families, ProductFamily, StratError, Strategy};
use crate::cnf::{Cnf, PartialAssignment, PiecewiseAssignment};

/// An explicit set of piecewise assignments with its freeness level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeFamily {
    members: BTreeSet<PiecewiseAssignment>,
    r: usize,
}

impl FreeFamily {
    pub fn new(members: BTreeSet<PiecewiseAssignment>, r: usize) -> Self {
        FreeFamily { members, r }
    }

    pub fn members(&self) -> impl Iterator<Item = &PiecewiseAssignment> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn contains(&self, alpha: &PiecewiseAssignment) -> bool {
        self.members.contains(alpha)
    }

    /// Remove members whose combined assignment gives `variable` the value
    /// `value`. Crafts broken families for negative tests.
    pub fn without_value(&self, variable: u32, value: bool) -> FreeFamily {
        let members = self
            .members
            .iter()
            .filter(|m| m.combined().get(variable) != Some(value))
            .cloned()
            .collect();
        FreeFamily { members, r: self.r }
    }
}

fn piecewise_members(family: &ProductFamily) -> Result<Vec<PiecewiseAssignment>, StratError> {
    // One piece per factor; every way of choosing a member from each.
    let mut choices: Vec<Vec<PartialAssignment>> = vec![Vec::new()];
    for factor in family.factors() {
        let mut next = Vec::with_capacity(choices.len() * factor.len());
        for base in &choices {
            for a in factor.assignments() {
                let mut grown = base.clone();
                grown.push(a.clone());
                next.push(grown);
            }
        }
        choices = next;
    }
    choices
        .into_iter()
        .map(|pieces| PiecewiseAssignment::new(pieces).map_err(StratError::Assign))
        .collect()
}

/// All piecewise assignments the strategy's families of rank ≤ r denote:
/// the union-of-pieces construction. The empty piecewise assignment is
/// always a member (from `{⋆}`).
pub fn free_family_from_strategy(
    strategy: &Strategy,
    phi: &Cnf,
    r: usize,
    cap: usize,
) -> Result<FreeFamily, StratError> {
    let mut members = BTreeSet::new();
    for family in enumerate_families(strategy, phi, cap)? {
        if family.rank() > r {
            continue;
        }
        for member in piecewise_members(&family)? {
            members.insert(member);
        }
    }
    Ok(FreeFamily { members, r })
}

/// One violation of the freeness conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeViolation {
    /// The family has no members at all.
    Empty,
    /// A member's combined assignment falsifies the indexed clause.
    FalsifiesClause { member: String, clause: usize },
    /// A piece subset of a member is not a member.
    RetractionMissing { member: String, missing: String },
    /// A member below the piece budget has no extension giving `variable`
    /// the value `value`.
    ExtensionFails { member: String, variable: u32, value: bool },
}

#[derive(Clone, Debug)]
pub struct FreeReport {
    pub members: usize,
    pub extension_checks: usize,
    pub violation: Option<FreeViolation>,
}

impl FreeReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn member_label(alpha: &PiecewiseAssignment) -> String {
    if alpha.pieces().is_empty() {
        return "{}".to_string();
    }
    let pieces: Vec<String> = alpha.pieces().iter().map(|p| p.to_string()).collect();
    pieces.join(" + ")
}

/// Exhaustively check the three freeness conditions of `ff` at level `r`
/// against `phi`: consistency, retraction closure, and two-sided extension
/// on every unassigned variable.
pub fn verify_free_family(ff: &FreeFamily, phi: &Cnf, r: usize) -> FreeReport {
    let mut report = FreeReport {
        members: ff.len(),
        extension_checks: 0,
        violation: None,
    };
    if ff.is_empty() {
        report.violation = Some(FreeViolation::Empty);
        return report;
    }
    for alpha in ff.members() {
        let combined = alpha.combined();
        for (idx, clause) in phi.clauses().iter().enumerate() {
            if combined.falsifies_clause(clause) {
                report.violation = Some(FreeViolation::FalsifiesClause {
                    member: member_label(alpha),
                    clause: idx,
                });
                return report;
            }
        }
        for beta in alpha.piece_subsets() {
            if !ff.contains(&beta) {
                report.violation = Some(FreeViolation::RetractionMissing {
                    member: member_label(alpha),
                    missing: member_label(&beta),
                });
                return report;
            }
        }
    }
    for alpha in ff.members() {
        if alpha.rank() >= r {
            continue;
        }
        let dom: BTreeSet<u32> = alpha.combined().domain().into_iter().collect();
        for x in 1..=phi.variable_count() {
            if dom.contains(&x) {
                continue;
            }
            for value in [false, true] {
                report.extension_checks += 1;
                let found = ff.members().any(|beta| {
                    alpha.sub_assignment_of(beta) && beta.combined().get(x) == Some(value)
                });
                if !found {
                    report.violation = Some(FreeViolation::ExtensionFails {
                        member: member_label(alpha),
                        variable: x,
                        value,
                    });
                    return report;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covergame::GameParams;
    use crate::ratio::parse_ratio;
    use crate::strategies::GameStrategy;
    use crate::Limits;

    fn small_phi() -> Cnf {
        Cnf::new(8, vec![vec![1, 2, 3], vec![4, 5, 6], vec![-1, 7, 8]]).unwrap()
    }

    fn game_strategy(phi: &Cnf, budget: usize) -> Strategy {
        let g = crate::cnf::adjacency_graph(phi).graph;
        let s = 48 * g.right_count() as usize + g.left_count() as usize;
        let params =
            GameParams::new(parse_ratio("1/24").unwrap(), s, g.max_right_degree() as u32)
                .unwrap();
        Strategy::Game(
            GameStrategy::new(phi.clone(), params, Some(budget), true, Limits::default())
                .unwrap(),
        )
    }

    #[test]
    fn empty_piecewise_assignment_is_always_a_member() {
        let phi = small_phi();
        let ff = free_family_from_strategy(&game_strategy(&phi, 2), &phi, 1, 100_000).unwrap();
        assert!(ff.contains(&PiecewiseAssignment::empty()));
        assert!(ff.len() > 1);
    }

    #[test]
    fn game_derived_family_is_free_at_k_minus_one() {
        let phi = small_phi();
        for k in [2usize, 3] {
            let r = k - 1;
            let ff =
                free_family_from_strategy(&game_strategy(&phi, k), &phi, r, 100_000).unwrap();
            let report = verify_free_family(&ff, &phi, r);
            assert!(report.passed(), "k={k}: {:?}", report.violation);
            assert!(report.extension_checks > 0);
        }
    }

    #[test]
    fn deleting_one_flip_direction_breaks_extension_with_a_witness() {
        let phi = small_phi();
        let ff = free_family_from_strategy(&game_strategy(&phi, 2), &phi, 1, 100_000).unwrap();
        // Wipe out every member that sets x7 = 1; extending the empty
        // assignment to x7 = 1 becomes impossible.
        let broken = ff.without_value(7, true);
        let report = verify_free_family(&broken, &phi, 1);
        assert_eq!(
            report.violation,
            Some(FreeViolation::ExtensionFails {
                member: "{}".to_string(),
                variable: 7,
                value: true,
            })
        );
    }

    #[test]
    fn falsifying_members_are_named() {
        let phi = Cnf::new(2, vec![vec![1, 2]]).unwrap();
        let bad = PiecewiseAssignment::new(vec![
            PartialAssignment::from_pairs(&[(1, false), (2, false)]).unwrap(),
        ])
        .unwrap();
        let mut members = BTreeSet::new();
        members.insert(PiecewiseAssignment::empty());
        members.insert(bad);
        let report = verify_free_family(&FreeFamily::new(members, 1), &phi, 1);
        assert!(matches!(
            report.violation,
            Some(FreeViolation::FalsifiesClause { clause: 0, .. })
        ));
        // And an empty family is flagged as such.
        let report = verify_free_family(&FreeFamily::new(BTreeSet::new(), 1), &phi, 1);
        assert_eq!(report.violation, Some(FreeViolation::Empty));
    }

    #[test]
    fn retraction_gaps_are_reported() {
        let phi = Cnf::new(2, vec![vec![1, 2]]).unwrap();
        let two_pieces = PiecewiseAssignment::new(vec![
            PartialAssignment::from_pairs(&[(1, true)]).unwrap(),
            PartialAssignment::from_pairs(&[(2, true)]).unwrap(),
        ])
        .unwrap();
        let mut members = BTreeSet::new();
        members.insert(PiecewiseAssignment::empty());
        members.insert(two_pieces);
        let report = verify_free_family(&FreeFamily::new(members, 0), &phi, 0);
        assert!(matches!(
            report.violation,
            Some(FreeViolation::RetractionMissing { .. })
        ));
    }
}
