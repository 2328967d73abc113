//! Strategies: restriction-closed sets of flippable product families with
//! the extension property, served lazily by replaying the cover game.
//!
//! The correspondence is mechanical. A family is the product of its
//! matching's component factors, so the family for a matching `F` refines
//! the family for every sub-matching of `F`. An extension request for a
//! clause polynomial challenges that clause's left vertex; a request for a
//! boolean axiom challenges the variable's right vertex; the game's answer
//! extends the matching without touching existing components, so the new
//! family refines the old one and satisfies the requested polynomial.
//!
//! Verification is exhaustive: every family reachable through challenges
//! and component removals is enumerated, and the restriction and extension
//! conditions are checked family by family against the full set.

use std::collections::BTreeMap;

use super::{flippable_from_matching, ProductFamily, StratError};
use crate::cnf::{adjacency_graph, Cnf, Polynomial};
use crate::covergame::{BudgetMode, GameParams, GameState, Move, Response, Side};
use crate::matchings::HkMatching;
use crate::ratio::ceil;
use crate::Limits;

/// What an extension request asks the game to cover: the left vertex of a
/// clause, or the right vertex of a variable (for its boolean axioms).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionTarget {
    Clause(usize),
    Axiom(u32),
}

/// Map an index into the formula's polynomial encoding (clause polynomials
/// first, then the two axioms of each variable) to its challenge target.
pub fn extension_target(phi: &Cnf, poly_index: usize) -> Result<ExtensionTarget, StratError> {
    let m = phi.clause_count();
    if poly_index < m {
        return Ok(ExtensionTarget::Clause(poly_index));
    }
    let axiom = poly_index - m;
    let var = (axiom / 2) as u32 + 1;
    if var > phi.variable_count() {
        return Err(StratError::BadPolynomialIndex { index: poly_index });
    }
    Ok(ExtensionTarget::Axiom(var))
}

/// A strategy backed by live cover-game replays on the formula's adjacency
/// graph. Holds an immutable template state; every query replays from a
/// stored matching, so concurrent queries are independent.
#[derive(Clone, Debug)]
pub struct GameStrategy {
    phi: Cnf,
    template: GameState,
    k: usize,
}

impl GameStrategy {
    /// Build the strategy for `phi` with the given game parameters. The
    /// budget is the derived `μ` rounded up, or an explicit override;
    /// a nonpositive `μ` without an override yields the unusable `k = 0`.
    pub fn new(
        phi: Cnf,
        params: GameParams,
        override_budget: Option<usize>,
        check_robust: bool,
        limits: Limits,
    ) -> Result<Self, StratError> {
        let graph = adjacency_graph(&phi).graph;
        let (k, budget) = match override_budget {
            Some(m) => (m, BudgetMode::MaxComponents(m)),
            None if params.is_degenerate() => (0, BudgetMode::MaxComponents(0)),
            None => {
                let k: usize = ceil(params.mu())
                    .try_into()
                    .map_err(|_| StratError::CapExceeded { count: usize::MAX })?;
                (k, BudgetMode::Mu)
            }
        };
        let template = GameState::new(graph, params, budget, check_robust, limits)?;
        Ok(GameStrategy { phi, template, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn phi(&self) -> &Cnf {
        &self.phi
    }

    /// `μ ≤ 0` and no override: the strategy is unusable and flagged.
    pub fn is_degenerate(&self) -> bool {
        self.k == 0
    }

    pub fn initial(&self) -> HkMatching {
        HkMatching::empty(2, 4)
    }

    pub fn family_for(&self, f: &HkMatching) -> Result<ProductFamily, StratError> {
        flippable_from_matching(&self.phi, f)
    }

    /// Answer an extension request from the position `f`. `None` means the
    /// game offers no extension (budget reached or cover lost).
    pub fn extend_for(
        &self,
        f: &HkMatching,
        target: ExtensionTarget,
    ) -> Result<Option<HkMatching>, StratError> {
        let state = self.template.replace_matching(f.clone()).map_err(StratError::Game)?;
        let mv = match target {
            ExtensionTarget::Clause(c) => {
                if c >= self.phi.clause_count() {
                    return Err(StratError::BadPolynomialIndex { index: c });
                }
                Move::Challenge { side: Side::Left, vertex: c as u32 }
            }
            ExtensionTarget::Axiom(v) => {
                if v == 0 || v > self.phi.variable_count() {
                    return Err(StratError::BadPolynomialIndex { index: v as usize });
                }
                Move::Challenge { side: Side::Right, vertex: v - 1 }
            }
        };
        if !state.challenge_allowed() {
            return Ok(None);
        }
        match state.cover_respond(&mv).map_err(StratError::Game)? {
            Response::Continued { state, .. } => Ok(Some(state.matching().clone())),
            Response::CoverLoses { .. } => Ok(None),
        }
    }

    /// All single-component removals of `f` (the restriction moves).
    pub fn removals(&self, f: &HkMatching) -> Vec<HkMatching> {
        (0..f.component_count()).map(|i| f.without_component(i)).collect()
    }
}

/// A strategy is either an explicit family list or a live game.
#[derive(Clone, Debug)]
pub enum Strategy {
    Explicit { families: Vec<ProductFamily>, k: usize },
    Game(GameStrategy),
}

impl Strategy {
    pub fn k(&self) -> usize {
        match self {
            Strategy::Explicit { k, .. } => *k,
            Strategy::Game(g) => g.k(),
        }
    }
}

fn matching_key(f: &HkMatching) -> Vec<(Vec<u32>, Vec<u32>, Vec<(u32, u32)>)> {
    f.components()
        .iter()
        .map(|c| (c.rights().to_vec(), c.lefts().to_vec(), c.edges().to_vec()))
        .collect()
}

/// Enumerate every product family the strategy can ever return, by
/// breadth-first search over challenge and removal moves (game mode) or by
/// listing (explicit mode). Fails once more than `cap` distinct positions
/// appear.
pub fn enumerate_families(
    strategy: &Strategy,
    phi: &Cnf,
    cap: usize,
) -> Result<Vec<ProductFamily>, StratError> {
    match strategy {
        Strategy::Explicit { families, .. } => {
            let mut out = families.clone();
            out.sort();
            out.dedup();
            Ok(out)
        }
        Strategy::Game(game) => {
            let mut visited: BTreeMap<Vec<(Vec<u32>, Vec<u32>, Vec<(u32, u32)>)>, HkMatching> =
                BTreeMap::new();
            let start = game.initial();
            visited.insert(matching_key(&start), start.clone());
            let mut queue = vec![start];
            let targets: Vec<ExtensionTarget> = (0..phi.clause_count())
                .map(ExtensionTarget::Clause)
                .chain((1..=phi.variable_count()).map(ExtensionTarget::Axiom))
                .collect();
            while let Some(f) = queue.pop() {
                if visited.len() > cap {
                    return Err(StratError::CapExceeded { count: visited.len() });
                }
                let mut neighbors = game.removals(&f);
                for &target in &targets {
                    if let Some(extended) = game.extend_for(&f, target)? {
                        neighbors.push(extended);
                    }
                }
                for next in neighbors {
                    let key = matching_key(&next);
                    if !visited.contains_key(&key) {
                        visited.insert(key, next.clone());
                        queue.push(next);
                    }
                }
            }
            let mut out = Vec::with_capacity(visited.len());
            for f in visited.values() {
                out.push(game.family_for(f)?);
            }
            out.sort();
            out.dedup();
            Ok(out)
        }
    }
}

/// One violation of the winning-strategy conditions, with the family that
/// exhibits it rendered for the report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyViolation {
    /// `{⋆}` must belong to every strategy.
    MissingStar,
    /// A member family is not flippable on some domain variable.
    NotFlippable { family: String },
    /// Some restriction of a member family is not itself a member.
    RestrictionMissing { family: String, missing: String },
    /// A family of rank < k has no refinement satisfying polynomial
    /// `poly_index`.
    ExtensionFails { family: String, poly_index: usize },
}

#[derive(Clone, Debug)]
pub struct StrategyReport {
    pub families: usize,
    pub extension_checks: usize,
    pub violation: Option<StrategyViolation>,
}

impl StrategyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn family_label(h: &ProductFamily) -> String {
    let factors: Vec<String> = h
        .factors()
        .iter()
        .map(|f| {
            let members: Vec<String> =
                f.assignments().map(|a| a.to_string()).collect();
            members.join("|")
        })
        .collect();
    if factors.is_empty() {
        "{*}".to_string()
    } else {
        factors.join(" x ")
    }
}

/// Exhaustively verify the two winning-strategy conditions at level `k`
/// against the polynomial list `p`: restriction closure (every factor
/// subset of a member is a member, and `{⋆}` is one) and extension (every
/// member of rank < k has a refinement in the set satisfying each
/// polynomial). Flippability of every member is checked along the way.
pub fn verify_winning_strategy(
    strategy: &Strategy,
    phi: &Cnf,
    p: &[Polynomial],
    k: usize,
    cap: usize,
) -> Result<StrategyReport, StratError> {
    let families = enumerate_families(strategy, phi, cap)?;
    let mut report = StrategyReport {
        families: families.len(),
        extension_checks: 0,
        violation: None,
    };
    if !families.contains(&ProductFamily::star()) {
        report.violation = Some(StrategyViolation::MissingStar);
        return Ok(report);
    }
    for h in &families {
        if !h.is_flippable() {
            report.violation =
                Some(StrategyViolation::NotFlippable { family: family_label(h) });
            return Ok(report);
        }
        for sub in h.factor_subsets() {
            if !families.contains(&sub) {
                report.violation = Some(StrategyViolation::RestrictionMissing {
                    family: family_label(h),
                    missing: family_label(&sub),
                });
                return Ok(report);
            }
        }
    }
    for h in &families {
        if h.rank() >= k {
            continue;
        }
        for (idx, poly) in p.iter().enumerate() {
            report.extension_checks += 1;
            let extended = families
                .iter()
                .any(|h2| h2.refines(h) && h2.satisfies_poly(poly));
            if !extended {
                report.violation = Some(StrategyViolation::ExtensionFails {
                    family: family_label(h),
                    poly_index: idx,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::tr_cnf;
    use crate::ratio::parse_ratio;

    /// A 3-clause formula over 8 variables whose adjacency graph expands:
    /// every left subset of size t has at least 2t variable neighbors.
    fn small_phi() -> Cnf {
        Cnf::new(8, vec![vec![1, 2, 3], vec![4, 5, 6], vec![-1, 7, 8]]).unwrap()
    }

    fn small_params(phi: &Cnf) -> GameParams {
        let g = adjacency_graph(phi).graph;
        let s = 48 * g.right_count() as usize + g.left_count() as usize;
        GameParams::new(parse_ratio("1/24").unwrap(), s, g.max_right_degree() as u32).unwrap()
    }

    fn game_strategy(phi: &Cnf, budget: usize) -> Strategy {
        let params = small_params(phi);
        Strategy::Game(
            GameStrategy::new(phi.clone(), params, Some(budget), true, Limits::default())
                .unwrap(),
        )
    }

    #[test]
    fn polynomial_indices_map_to_challenge_targets() {
        let phi = small_phi();
        assert_eq!(extension_target(&phi, 0).unwrap(), ExtensionTarget::Clause(0));
        assert_eq!(extension_target(&phi, 2).unwrap(), ExtensionTarget::Clause(2));
        assert_eq!(extension_target(&phi, 3).unwrap(), ExtensionTarget::Axiom(1));
        assert_eq!(extension_target(&phi, 4).unwrap(), ExtensionTarget::Axiom(1));
        assert_eq!(extension_target(&phi, 8).unwrap(), ExtensionTarget::Axiom(3));
        assert_eq!(extension_target(&phi, 18).unwrap(), ExtensionTarget::Axiom(8));
        assert!(extension_target(&phi, 19).is_err());
    }

    #[test]
    fn clause_extensions_satisfy_their_polynomial() {
        let phi = small_phi();
        let Strategy::Game(game) = game_strategy(&phi, 2) else { unreachable!() };
        let p = tr_cnf(&phi);
        let start = game.initial();
        for (idx, poly) in p.iter().enumerate() {
            let target = extension_target(&phi, idx).unwrap();
            let extended = game.extend_for(&start, target).unwrap().expect("budget 2 allows it");
            let family = game.family_for(&extended).unwrap();
            assert!(
                family.satisfies_poly(poly),
                "extension for polynomial {idx} does not satisfy it"
            );
            assert!(family.refines(&game.family_for(&start).unwrap()));
        }
    }

    #[test]
    fn already_covered_requests_return_the_same_family() {
        let phi = small_phi();
        let Strategy::Game(game) = game_strategy(&phi, 2) else { unreachable!() };
        let f1 = game
            .extend_for(&game.initial(), ExtensionTarget::Clause(0))
            .unwrap()
            .unwrap();
        let f2 = game.extend_for(&f1, ExtensionTarget::Clause(0)).unwrap().unwrap();
        assert_eq!(matching_key(&f1), matching_key(&f2));
    }

    #[test]
    fn game_strategy_verifies_at_its_budget() {
        let phi = small_phi();
        let p = tr_cnf(&phi);
        for budget in [2usize, 3] {
            let strategy = game_strategy(&phi, budget);
            let report = verify_winning_strategy(&strategy, &phi, &p, budget, 100_000).unwrap();
            assert!(
                report.passed(),
                "budget {budget} verification failed: {:?}",
                report.violation
            );
            assert!(report.families > 1);
            assert!(report.extension_checks > 0);
        }
    }

    #[test]
    fn raising_k_past_the_budget_breaks_extension() {
        let phi = small_phi();
        let p = tr_cnf(&phi);
        let strategy = game_strategy(&phi, 1);
        let report = verify_winning_strategy(&strategy, &phi, &p, 3, 100_000).unwrap();
        assert!(matches!(
            report.violation,
            Some(StrategyViolation::ExtensionFails { .. })
        ));
    }

    #[test]
    fn rank_zero_strategy_is_trivially_winning() {
        let phi = small_phi();
        let p = tr_cnf(&phi);
        let strategy = Strategy::Explicit { families: vec![ProductFamily::star()], k: 0 };
        let report = verify_winning_strategy(&strategy, &phi, &p, 0, 10).unwrap();
        assert!(report.passed());
        assert_eq!(report.extension_checks, 0);
        // Without {⋆} nothing passes.
        let empty = Strategy::Explicit { families: vec![], k: 0 };
        let report = verify_winning_strategy(&empty, &phi, &p, 0, 10).unwrap();
        assert_eq!(report.violation, Some(StrategyViolation::MissingStar));
    }

    #[test]
    fn degenerate_parameters_flag_an_unusable_strategy() {
        let phi = small_phi();
        let params = GameParams::new(parse_ratio("1/24").unwrap(), 100, 2).unwrap();
        assert!(params.is_degenerate());
        let game =
            GameStrategy::new(phi, params, None, false, Limits::default()).unwrap();
        assert!(game.is_degenerate());
        assert_eq!(game.k(), 0);
        assert_eq!(
            game.extend_for(&game.initial(), ExtensionTarget::Clause(0)).unwrap(),
            None
        );
    }

    #[test]
    fn explicit_strategies_detect_missing_restrictions() {
        let phi = small_phi();
        let Strategy::Game(game) = game_strategy(&phi, 2) else { unreachable!() };
        let f = game
            .extend_for(&game.initial(), ExtensionTarget::Clause(0))
            .unwrap()
            .unwrap();
        let family = game.family_for(&f).unwrap();
        // Leave out {⋆}'s sibling: the family itself without its restriction.
        let strategy =
            Strategy::Explicit { families: vec![ProductFamily::star(), family], k: 1 };
        let p = tr_cnf(&phi);
        let report = verify_winning_strategy(&strategy, &phi, &p, 0, 10).unwrap();
        // Rank-1 family's subsets are {⋆} and itself — both present, so the
        // restriction check passes; extension at k=0 is vacuous.
        assert!(report.passed());
        // But a rank-2 family without its rank-1 restrictions fails.
        let f2 = game.extend_for(&f, ExtensionTarget::Clause(1)).unwrap().unwrap();
        let family2 = game.family_for(&f2).unwrap();
        let strategy = Strategy::Explicit {
            families: vec![ProductFamily::star(), family2],
            k: 0,
        };
        let report = verify_winning_strategy(&strategy, &phi, &p, 0, 10).unwrap();
        assert!(matches!(
            report.violation,
            Some(StrategyViolation::RestrictionMissing { .. })
        ));
    }
}
