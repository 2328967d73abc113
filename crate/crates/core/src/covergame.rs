//! The cover game on (2,4)-matchings.
//!
//! Two players move on a bipartite graph: the adversary removes components
//! of the current matching or challenges vertices; the cover player must
//! answer every challenge by extending the matching with new components so
//! the challenged vertex is covered, never touching existing components.
//! Challenges are legal only while the component count is below the budget.
//!
//! On a `(s, 2-ε/2)`-expander with left degree 3 and right degree at most
//! `d`, the cover player wins with budget `μ = εs/(72d+2ε) − d`. The module
//! keeps that guarantee honest at small scale: the invariant the winning
//! strategy maintains — the support pair `(ℓ(F), r(F))` stays *robust* and
//! `(2/ε)|r(F)| + |ℓ(F)| ≤ s` — is re-checked exhaustively after every
//! response when robustness checking is switched on.
//!
//! The constants in `μ` make it nonpositive for any graph small enough to
//! check exhaustively, so the budget can be overridden with an explicit
//! component count; transcripts record which mode produced them.

use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graphs::{induced_remove, subset_budget, BipartiteGraph, GraphError};
use crate::matchings::{find_cover_matching, HkMatching, MatchComponent, MatchError};
use crate::ratio::{format_ratio, parse_ratio, ratio_from_usize};
use crate::Limits;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("epsilon must lie strictly between 0 and 1/23")]
    EpsilonOutOfRange,
    #[error("{0} must be at least 1")]
    ZeroParam(&'static str),
    #[error("declared right-degree bound {declared} is below the actual maximum {actual}")]
    DegreeBoundTooSmall { declared: u32, actual: u32 },
    #[error("robustness check would enumerate {subsets} left subsets; pass force to proceed")]
    CapExceeded { subsets: u128 },
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

fn check_epsilon(epsilon: &BigRational) -> Result<(), GameError> {
    let upper = parse_ratio("1/23").unwrap();
    if !epsilon.is_positive() || *epsilon >= upper {
        return Err(GameError::EpsilonOutOfRange);
    }
    Ok(())
}

/// The component budget `εs/(72d + 2ε) − d`, exactly. May be nonpositive
/// (a degenerate game where no challenge is ever legal) — that is reported
/// by the caller, not an error here.
pub fn mu(epsilon: &BigRational, s: usize, d: u32) -> Result<BigRational, GameError> {
    check_epsilon(epsilon)?;
    if s == 0 {
        return Err(GameError::ZeroParam("s"));
    }
    if d == 0 {
        return Err(GameError::ZeroParam("d"));
    }
    let d_r = ratio_from_usize(d as usize);
    let s_r = ratio_from_usize(s);
    let denom = ratio_from_usize(72) * &d_r + ratio_from_usize(2) * epsilon;
    Ok(epsilon * s_r / denom - d_r)
}

/// Fixed parameters of one game: the expansion scale `s`, the right-degree
/// bound `d`, the slack `ε`, and the derived budget `μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameParams {
    epsilon: BigRational,
    s: usize,
    d: u32,
    mu: BigRational,
}

impl GameParams {
    pub fn new(epsilon: BigRational, s: usize, d: u32) -> Result<Self, GameError> {
        let mu = mu(&epsilon, s, d)?;
        Ok(GameParams { epsilon, s, d, mu })
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn mu(&self) -> &BigRational {
        &self.mu
    }

    /// `μ ≤ 0`: no challenge is ever legal under the derived budget.
    pub fn is_degenerate(&self) -> bool {
        !self.mu.is_positive()
    }
}

/// Which component bound gates challenges: the derived `μ`, or an explicit
/// override for experiments on graphs too small for a positive `μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetMode {
    Mu,
    MaxComponents(usize),
}

impl BudgetMode {
    fn allows_challenge(&self, params: &GameParams, component_count: usize) -> bool {
        match self {
            BudgetMode::Mu => ratio_from_usize(component_count) < params.mu,
            BudgetMode::MaxComponents(m) => component_count < *m,
        }
    }

    fn describe(&self, params: &GameParams) -> String {
        match self {
            BudgetMode::Mu => format!("mu = {}", format_ratio(&params.mu)),
            BudgetMode::MaxComponents(m) => format!("max-components = {m} (override)"),
        }
    }
}

/// Outcome of an exhaustive robustness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RobustResult {
    Robust,
    /// The smallest (size-then-lex) left set outside `A` that no
    /// (2,4)-matching of `G − A − B` covers.
    Counterexample(Vec<u32>),
}

impl RobustResult {
    pub fn is_robust(&self) -> bool {
        matches!(self, RobustResult::Robust)
    }
}

/// Upper bound on the size of a minimal robustness counterexample when `B`
/// is nonempty: `(2/ε)·|B|`.
pub fn counterexample_size_bound(epsilon: &BigRational, b_len: usize) -> BigRational {
    ratio_from_usize(2) / epsilon * ratio_from_usize(b_len)
}

fn robust_search(
    g: &BipartiteGraph,
    a: &[u32],
    b: &[u32],
    s: usize,
    size_cap: Option<usize>,
    limits: &Limits,
) -> Result<RobustResult, GameError> {
    use itertools::Itertools;
    let (sub, maps) = induced_remove(g, a, b)?;
    let free: Vec<u32> = (0..g.left_count()).filter(|v| !a.contains(v)).collect();
    let mut max_size = s.saturating_sub(a.len()).min(free.len());
    if let Some(cap) = size_cap {
        max_size = max_size.min(cap);
    }
    let budget = subset_budget(free.len(), max_size);
    if !limits.force && budget > (1u128 << limits.subset_cap.min(127)) {
        return Err(GameError::CapExceeded { subsets: budget });
    }
    for t in 1..=max_size {
        for combo in free.iter().copied().combinations(t) {
            let mapped: Vec<u32> = combo
                .iter()
                .map(|&v| maps.map_left(v).expect("free vertices survive the removal"))
                .collect();
            if !find_cover_matching(&sub, &mapped, 2, 4)?.is_covered() {
                return Ok(RobustResult::Counterexample(combo));
            }
        }
    }
    Ok(RobustResult::Robust)
}

/// Exhaustively decide whether `(A, B)` is a robust pair: every
/// `C ⊆ L∖A` with `|A| + |C| ≤ s` must admit a (2,4)-matching covering `C`
/// in the graph with `A` and `B` deleted. Returns the first violating `C`
/// in size-then-lex order if not.
pub fn is_robust(
    g: &BipartiteGraph,
    a: &[u32],
    b: &[u32],
    s: usize,
    limits: &Limits,
) -> Result<RobustResult, GameError> {
    robust_search(g, a, b, s, None, limits)
}

/// Like [`is_robust`] but searching only `|C| < (2/ε)|B|`, the size window
/// a minimal counterexample must fall in when `B` is nonempty. Agreement
/// with the unrestricted search is a test oracle for that bound.
pub fn is_robust_small_c(
    g: &BipartiteGraph,
    a: &[u32],
    b: &[u32],
    epsilon: &BigRational,
    s: usize,
    limits: &Limits,
) -> Result<RobustResult, GameError> {
    check_epsilon(epsilon)?;
    let bound = counterexample_size_bound(epsilon, b.len());
    // |C| < bound, so the largest size to try is ceil(bound) - 1.
    let cap = (crate::ratio::ceil(&bound) - 1i32).max(0i32.into());
    let cap: usize = cap.try_into().unwrap_or(usize::MAX);
    robust_search(g, a, b, s, Some(cap), limits)
}

/// All connected (2,4)-matchings covering the left vertex `v`: either `v`
/// with two of its neighbors (one component, 2 edges), or `v` and a second
/// left vertex `u` joined through a shared right (4 edges). Returned in
/// canonical order. For left degree 3 and right degree ≤ d there are at
/// most `12d` of them.
pub fn connected_covering_matchings(
    g: &BipartiteGraph,
    v: u32,
) -> Result<Vec<MatchComponent>, GameError> {
    if v >= g.left_count() {
        return Err(GraphError::OutOfRange { vertex: v, count: g.left_count() }.into());
    }
    let mut out = Vec::new();
    let nv = g.neighbors(v);
    for (i, &a) in nv.iter().enumerate() {
        for &b in &nv[i + 1..] {
            out.push(MatchComponent::from_edges(vec![(v, a), (v, b)])?);
        }
    }
    // v–a, v–b, u–b, u–c with b the shared right and a, b, c distinct.
    for &a in nv {
        for &b in nv {
            if a == b {
                continue;
            }
            for u in 0..g.left_count() {
                if u == v || !g.has_edge(u, b) {
                    continue;
                }
                for &c in g.neighbors(u) {
                    if c == a || c == b {
                        continue;
                    }
                    out.push(MatchComponent::from_edges(vec![
                        (v, a),
                        (v, b),
                        (u, b),
                        (u, c),
                    ])?);
                }
            }
        }
    }
    out.sort_by(|x, y| x.key().cmp(&y.key()));
    out.dedup();
    Ok(out)
}

/// One adversary move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    RemoveComponent(usize),
    Challenge { side: Side, vertex: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Move {
    pub fn to_json(&self) -> Value {
        match self {
            Move::RemoveComponent(i) => json!({"kind": "remove", "component": i}),
            Move::Challenge { side, vertex } => json!({
                "kind": "challenge",
                "side": match side { Side::Left => "left", Side::Right => "right" },
                "vertex": vertex,
            }),
        }
    }

    pub fn from_json(value: &Value) -> Result<Move, GameError> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| GameError::IllegalMove("move lacks a kind".into()))?;
        match kind {
            "remove" => {
                let i = value
                    .get("component")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| GameError::IllegalMove("remove lacks component".into()))?;
                Ok(Move::RemoveComponent(i as usize))
            }
            "challenge" => {
                let side = match value.get("side").and_then(Value::as_str) {
                    Some("left") => Side::Left,
                    Some("right") => Side::Right,
                    _ => return Err(GameError::IllegalMove("challenge lacks side".into())),
                };
                let vertex = value
                    .get("vertex")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| GameError::IllegalMove("challenge lacks vertex".into()))?;
                Ok(Move::Challenge { side, vertex: vertex as u32 })
            }
            other => Err(GameError::IllegalMove(format!("unknown move kind {other:?}"))),
        }
    }
}

/// Immutable game snapshot; every response produces a fresh state.
#[derive(Clone, Debug)]
pub struct GameState {
    graph: BipartiteGraph,
    params: GameParams,
    budget: BudgetMode,
    matching: HkMatching,
    /// Re-check the winning-strategy invariant after every response.
    check_robust: bool,
    limits: Limits,
}

/// A response by the cover player.
#[derive(Clone, Debug)]
pub enum Response {
    Continued { state: GameState, detail: Value },
    /// No robust extension exists. Unreachable when the game's parameters
    /// satisfy the winning conditions; reaching it is a failure signal.
    CoverLoses { reason: String },
}

impl GameState {
    pub fn new(
        graph: BipartiteGraph,
        params: GameParams,
        budget: BudgetMode,
        check_robust: bool,
        limits: Limits,
    ) -> Result<Self, GameError> {
        let actual = graph.max_right_degree() as u32;
        if params.d < actual {
            return Err(GameError::DegreeBoundTooSmall { declared: params.d, actual });
        }
        Ok(GameState {
            graph,
            params,
            budget,
            matching: HkMatching::empty(2, 4),
            check_robust,
            limits,
        })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn budget(&self) -> BudgetMode {
        self.budget
    }

    pub fn matching(&self) -> &HkMatching {
        &self.matching
    }

    pub fn component_count(&self) -> usize {
        self.matching.component_count()
    }

    pub fn robust_checked(&self) -> bool {
        self.check_robust
    }

    pub fn challenge_allowed(&self) -> bool {
        self.budget.allows_challenge(&self.params, self.component_count())
    }

    /// FNV-1a over the canonical component list.
    pub fn state_hash(&self) -> u64 {
        let mut hash: u64 = 0xcbf29ce484222325;
        let mut eat = |byte: u8| {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        };
        for component in self.matching.components() {
            for &r in component.rights() {
                eat(b'r');
                for byte in r.to_le_bytes() {
                    eat(byte);
                }
            }
            for &(l, r) in component.edges() {
                eat(b'e');
                for byte in l.to_le_bytes() {
                    eat(byte);
                }
                for byte in r.to_le_bytes() {
                    eat(byte);
                }
            }
            eat(b';');
        }
        hash
    }

    /// Both membership conditions of the winning strategy's family: the
    /// support pair is robust, and `(2/ε)|r(F)| + |ℓ(F)| ≤ s`. Returns a
    /// human-readable reason on failure.
    pub fn strategy_invariant(&self) -> Result<Option<String>, GameError> {
        let a = self.matching.left_support();
        let b = self.matching.right_support();
        let size = ratio_from_usize(2) / &self.params.epsilon * ratio_from_usize(b.len())
            + ratio_from_usize(a.len());
        if size > ratio_from_usize(self.params.s) {
            return Ok(Some(format!(
                "support too large: (2/eps)|r(F)| + |l(F)| = {} > s = {}",
                format_ratio(&size),
                self.params.s
            )));
        }
        match is_robust(&self.graph, &a, &b, self.params.s, &self.limits)? {
            RobustResult::Robust => Ok(None),
            RobustResult::Counterexample(c) => {
                Ok(Some(format!("support pair not robust; uncoverable C = {c:?}")))
            }
        }
    }

    fn with_matching(&self, matching: HkMatching) -> GameState {
        GameState { matching, ..self.clone() }
    }

    /// The same game position with the matching swapped out, validated
    /// against the graph. Lets a caller resume play from a stored matching.
    pub fn replace_matching(&self, matching: HkMatching) -> Result<GameState, GameError> {
        let violations = crate::matchings::validate_matching(&self.graph, &matching);
        if !violations.is_empty() {
            return Err(MatchError::InvalidMatching { violations: violations.len() }.into());
        }
        Ok(self.with_matching(matching))
    }

    /// Extend the matching with a new component covering the uncovered left
    /// vertex `v`, keeping the support pair robust when checking is on.
    /// Candidates are tried in canonical order.
    fn extend_left(&self, v: u32) -> Result<Option<HkMatching>, GameError> {
        let a = self.matching.left_support();
        let b = self.matching.right_support();
        let (sub, maps) = induced_remove(&self.graph, &a, &b)?;
        let v_new = maps
            .map_left(v)
            .expect("an uncovered vertex survives removal of the support");
        for candidate in connected_covering_matchings(&sub, v_new)? {
            let edges: Vec<(u32, u32)> = candidate
                .edges()
                .iter()
                .map(|&(l, r)| {
                    (maps.left_new_to_old[l as usize], maps.right_new_to_old[r as usize])
                })
                .collect();
            let component = MatchComponent::from_edges(edges)?;
            let extended = self.matching.with_component(component);
            if self.check_robust {
                let a2 = extended.left_support();
                let b2 = extended.right_support();
                match is_robust(&self.graph, &a2, &b2, self.params.s, &self.limits)? {
                    RobustResult::Robust => return Ok(Some(extended)),
                    RobustResult::Counterexample(_) => continue,
                }
            } else {
                return Ok(Some(extended));
            }
        }
        Ok(None)
    }

    /// Answer one adversary move. Illegal moves are errors; a challenge the
    /// cover player cannot answer is a [`Response::CoverLoses`].
    pub fn cover_respond(&self, mv: &Move) -> Result<Response, GameError> {
        match *mv {
            Move::RemoveComponent(i) => {
                if i >= self.component_count() {
                    return Err(GameError::IllegalMove(format!(
                        "component {i} out of range (count {})",
                        self.component_count()
                    )));
                }
                let state = self.with_matching(self.matching.without_component(i));
                Ok(Response::Continued {
                    state,
                    detail: json!({"kind": "removed", "component": i}),
                })
            }
            Move::Challenge { side, vertex } => {
                if !self.challenge_allowed() {
                    return Err(GameError::IllegalMove(format!(
                        "challenge with {} components at budget {}",
                        self.component_count(),
                        self.budget.describe(&self.params)
                    )));
                }
                match side {
                    Side::Left => self.respond_left(vertex),
                    Side::Right => self.respond_right(vertex),
                }
            }
        }
    }

    fn respond_left(&self, v: u32) -> Result<Response, GameError> {
        if v >= self.graph.left_count() {
            return Err(GameError::IllegalMove(format!("left vertex {v} out of range")));
        }
        if self.matching.covers_left(v) {
            return Ok(Response::Continued {
                state: self.clone(),
                detail: json!({"kind": "already_covered"}),
            });
        }
        match self.extend_left(v)? {
            Some(matching) => {
                let added = matching.component_count() - self.component_count();
                let state = self.with_matching(matching);
                Ok(Response::Continued {
                    state,
                    detail: json!({"kind": "extended", "components_added": added}),
                })
            }
            None => Ok(Response::CoverLoses {
                reason: format!("no robust extension covers left vertex {v}"),
            }),
        }
    }

    fn respond_right(&self, v: u32) -> Result<Response, GameError> {
        if v >= self.graph.right_count() {
            return Err(GameError::IllegalMove(format!("right vertex {v} out of range")));
        }
        if self.matching.covers_right(v) {
            return Ok(Response::Continued {
                state: self.clone(),
                detail: json!({"kind": "already_covered"}),
            });
        }
        // Cover every neighbor of v first, then v itself is either already
        // swept in or joins as a singleton component.
        let mut work = self.clone();
        let mut singleton = false;
        for u in 0..self.graph.left_count() {
            if !self.graph.has_edge(u, v) || work.matching.covers_left(u) {
                continue;
            }
            match work.extend_left(u)? {
                Some(matching) => work = work.with_matching(matching),
                None => {
                    return Ok(Response::CoverLoses {
                        reason: format!(
                            "no robust extension covers left vertex {u} \
                             (neighbor of challenged right vertex {v})"
                        ),
                    })
                }
            }
        }
        if !work.matching.covers_right(v) {
            let matching = work.matching.with_component(MatchComponent::isolated_right(v));
            work = work.with_matching(matching);
            singleton = true;
        }
        if work.check_robust {
            if let Some(reason) = work.strategy_invariant()? {
                return Ok(Response::CoverLoses { reason });
            }
        }
        let added = work.component_count() - self.component_count();
        Ok(Response::Continued {
            state: work,
            detail: json!({
                "kind": "extended",
                "components_added": added,
                "singleton_added": singleton,
            }),
        })
    }
}

/// How the adversary picks moves.
#[derive(Clone, Debug)]
pub enum Adversary {
    /// Replay a fixed move list.
    Scripted(Vec<Move>),
    /// Seeded random mix of removals and challenges; may propose illegal
    /// moves, which the transcript notes and skips.
    Random { seed: u64, moves: usize },
    /// Deterministically challenge the lowest uncovered vertex, removing a
    /// component whenever challenges are barred.
    Greedy { moves: usize },
}

fn greedy_move(state: &GameState) -> Option<Move> {
    if state.challenge_allowed() {
        let f = state.matching();
        if let Some(v) = (0..state.graph().left_count()).find(|&v| !f.covers_left(v)) {
            return Some(Move::Challenge { side: Side::Left, vertex: v });
        }
        if let Some(v) = (0..state.graph().right_count()).find(|&v| !f.covers_right(v)) {
            return Some(Move::Challenge { side: Side::Right, vertex: v });
        }
    }
    if state.component_count() > 0 {
        return Some(Move::RemoveComponent(0));
    }
    None
}

fn random_move(state: &GameState, rng: &mut ChaCha8Rng) -> Move {
    let count = state.component_count();
    if count > 0 && rng.gen_range(0..4u8) == 0 {
        return Move::RemoveComponent(rng.gen_range(0..count));
    }
    if rng.gen_range(0..3u8) == 0 {
        Move::Challenge {
            side: Side::Right,
            vertex: rng.gen_range(0..state.graph().right_count()),
        }
    } else {
        Move::Challenge {
            side: Side::Left,
            vertex: rng.gen_range(0..state.graph().left_count()),
        }
    }
}

/// One transcript line: the state hash *after* the response, the move, the
/// response detail, and the component count.
#[derive(Clone, Debug)]
pub struct TranscriptRecord {
    pub step: usize,
    pub state_hash: u64,
    pub mv: Option<Value>,
    pub response: Value,
    pub component_count: usize,
    pub robust_checked: bool,
}

impl TranscriptRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "step": self.step,
            "state_hash": format!("{:016x}", self.state_hash),
            "move": self.mv,
            "response": self.response,
            "component_count": self.component_count,
            "robust_checked": self.robust_checked,
        })
    }
}

/// Full game record, one JSON object per line, starting with an initial
/// state record at step 0.
#[derive(Clone, Debug, Default)]
pub struct Transcript {
    pub records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&record.to_json().to_string());
            out.push('\n');
        }
        out
    }

    pub fn cover_lost(&self) -> bool {
        self.records
            .iter()
            .any(|r| r.response.get("kind").and_then(Value::as_str) == Some("cover_loses"))
    }
}

/// Play a full game. The run ends when the adversary's script or move
/// allowance is exhausted or the cover player loses. Illegal adversary
/// moves are recorded and skipped.
pub fn play(state: GameState, adversary: &Adversary) -> Result<(Transcript, GameState), GameError> {
    let mut transcript = Transcript::default();
    let mut current = state;
    transcript.records.push(TranscriptRecord {
        step: 0,
        state_hash: current.state_hash(),
        mv: None,
        response: json!({
            "kind": "initial",
            "budget": current.budget.describe(&current.params),
            "degenerate": current.params.is_degenerate(),
        }),
        component_count: current.component_count(),
        robust_checked: current.robust_checked(),
    });
    let mut rng = match adversary {
        Adversary::Random { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let total = match adversary {
        Adversary::Scripted(moves) => moves.len(),
        Adversary::Random { moves, .. } | Adversary::Greedy { moves } => *moves,
    };
    for step in 1..=total {
        let mv = match adversary {
            Adversary::Scripted(moves) => Some(moves[step - 1].clone()),
            Adversary::Random { .. } => {
                Some(random_move(&current, rng.as_mut().expect("seeded above")))
            }
            Adversary::Greedy { .. } => greedy_move(&current),
        };
        let Some(mv) = mv else { break };
        let (response, next) = match current.cover_respond(&mv) {
            Ok(Response::Continued { state, detail }) => (detail, Some(state)),
            Ok(Response::CoverLoses { reason }) => {
                (json!({"kind": "cover_loses", "reason": reason}), None)
            }
            Err(GameError::IllegalMove(reason)) => {
                (json!({"kind": "illegal", "reason": reason}), Some(current.clone()))
            }
            Err(e) => return Err(e),
        };
        let after = next.clone().unwrap_or_else(|| current.clone());
        transcript.records.push(TranscriptRecord {
            step,
            state_hash: after.state_hash(),
            mv: Some(mv.to_json()),
            response,
            component_count: after.component_count(),
            robust_checked: after.robust_checked(),
        });
        match next {
            Some(state) => current = state,
            None => break,
        }
    }
    Ok((transcript, current))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{is_expander, ExpansionResult};

    fn eps24() -> BigRational {
        parse_ratio("1/24").unwrap()
    }

    /// A 3-left, 6-right graph with disjoint neighborhoods: expansion is
    /// maximal, so every robustness question has slack.
    fn disjoint_graph() -> BipartiteGraph {
        BipartiteGraph::new(3, 6, vec![vec![0, 1, 2], vec![3, 4, 5], vec![0, 3, 5]]).unwrap()
    }

    fn certified_params(g: &BipartiteGraph) -> GameParams {
        let delta = parse_ratio("2").unwrap() - eps24() / parse_ratio("2").unwrap();
        let s = 48 * g.right_count() as usize + g.left_count() as usize;
        assert_eq!(
            is_expander(g, g.left_count() as usize, &delta, &Limits::default()).unwrap(),
            ExpansionResult::Certified
        );
        GameParams::new(eps24(), s, g.max_right_degree().max(1) as u32).unwrap()
    }

    #[test]
    fn mu_matches_hand_evaluation() {
        assert_eq!(mu(&eps24(), 34580, 2).unwrap(), parse_ratio("8").unwrap());
        let degenerate = mu(&eps24(), 100, 2).unwrap();
        assert!(degenerate.is_negative());
        assert!(GameParams::new(eps24(), 100, 2).unwrap().is_degenerate());
    }

    #[test]
    fn mu_satisfies_the_defining_identity() {
        for (eps, s, d) in [
            (parse_ratio("1/24").unwrap(), 34580usize, 2u32),
            (parse_ratio("1/100").unwrap(), 7919, 5),
            (parse_ratio("3/1000").unwrap(), 123456, 17),
        ] {
            let m = mu(&eps, s, d).unwrap();
            let d_r = ratio_from_usize(d as usize);
            let identity = (m + &d_r)
                * (ratio_from_usize(72) * &d_r / &eps + ratio_from_usize(2));
            assert_eq!(identity, ratio_from_usize(s));
        }
    }

    #[test]
    fn epsilon_range_is_strict() {
        assert_eq!(mu(&parse_ratio("1/23").unwrap(), 10, 1), Err(GameError::EpsilonOutOfRange));
        assert_eq!(mu(&parse_ratio("1/22").unwrap(), 10, 1), Err(GameError::EpsilonOutOfRange));
        assert_eq!(mu(&parse_ratio("0").unwrap(), 10, 1), Err(GameError::EpsilonOutOfRange));
        assert!(mu(&parse_ratio("2/47").unwrap(), 10, 1).is_ok());
        assert_eq!(mu(&eps24(), 0, 1), Err(GameError::ZeroParam("s")));
        assert_eq!(mu(&eps24(), 10, 0), Err(GameError::ZeroParam("d")));
    }

    #[test]
    fn empty_pair_is_robust_on_an_expander() {
        let g = disjoint_graph();
        let result = is_robust(&g, &[], &[], 51, &Limits::default()).unwrap();
        assert_eq!(result, RobustResult::Robust);
        // A = L leaves nothing to cover.
        let all = is_robust(&g, &[0, 1, 2], &[], 51, &Limits::default()).unwrap();
        assert_eq!(all, RobustResult::Robust);
    }

    #[test]
    fn non_robust_pair_reports_smallest_counterexample() {
        // Left vertex 0 sees only rights {0,1}; deleting right 0 leaves it
        // degree 1, so C = {0} is uncoverable.
        let g = BipartiteGraph::new(2, 4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let result = is_robust(&g, &[], &[0], 10, &Limits::default()).unwrap();
        assert_eq!(result, RobustResult::Counterexample(vec![0]));
        // The minimal counterexample obeys |C| < (2/eps)|B|, and searching
        // only that window agrees with the unrestricted search.
        let bound = counterexample_size_bound(&eps24(), 1);
        assert!(ratio_from_usize(1) < bound);
        let small = is_robust_small_c(&g, &[], &[0], &eps24(), 10, &Limits::default()).unwrap();
        assert_eq!(small, result);
    }

    #[test]
    fn covering_matchings_enumerate_both_shapes() {
        // v = 0 with rights {0,1,2}; u = 1 with rights {1,3,4} shares right 1.
        let g = BipartiteGraph::new(2, 5, vec![vec![0, 1, 2], vec![1, 3, 4]]).unwrap();
        let pi = connected_covering_matchings(&g, 0).unwrap();
        // 3 one-left pairs + (pairs of v containing the shared right 1:
        // {0,1},{1,2}) x (second right of u: 3 or 4) = 3 + 4.
        assert_eq!(pi.len(), 7);
        assert!(pi.iter().all(|c| c.lefts().contains(&0)));
        let four_edge: Vec<_> = pi.iter().filter(|c| c.edges().len() == 4).collect();
        assert_eq!(four_edge.len(), 4);
        assert!(four_edge.iter().all(|c| c.lefts() == [0, 1]));
        let d = g.max_right_degree();
        assert!(pi.len() <= 12 * d);
    }

    #[test]
    fn covering_matchings_respect_the_degree_bound() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..60 {
            let left = rng.gen_range(2..6u32);
            let right = rng.gen_range(3..8u32);
            let adj: Vec<Vec<u32>> = (0..left)
                .map(|_| {
                    let mut picks = std::collections::BTreeSet::new();
                    while picks.len() < 3.min(right as usize) {
                        picks.insert(rng.gen_range(0..right));
                    }
                    picks.into_iter().collect()
                })
                .collect();
            let g = BipartiteGraph::new(left, right, adj).unwrap();
            let d = g.max_right_degree().max(1);
            for v in 0..left {
                let pi = connected_covering_matchings(&g, v).unwrap();
                assert!(
                    pi.len() <= 12 * d,
                    "|Pi({v})| = {} > 12d = {} on {:?}",
                    pi.len(),
                    12 * d,
                    g
                );
            }
        }
    }

    #[test]
    fn left_challenge_extends_and_repeat_is_a_no_op() {
        let g = disjoint_graph();
        let params = certified_params(&g);
        let state = GameState::new(
            g,
            params,
            BudgetMode::MaxComponents(3),
            true,
            Limits::default(),
        )
        .unwrap();
        let mv = Move::Challenge { side: Side::Left, vertex: 1 };
        let Response::Continued { state: s1, detail } = state.cover_respond(&mv).unwrap() else {
            panic!("cover must answer the first challenge");
        };
        assert_eq!(detail["kind"], "extended");
        assert!(s1.matching().covers_left(1));
        assert!(s1.matching().components()[0].edges().len() <= 4);
        assert_eq!(s1.strategy_invariant().unwrap(), None);
        // Challenging the same vertex changes nothing.
        let Response::Continued { state: s2, detail } = s1.cover_respond(&mv).unwrap() else {
            panic!("already covered is not a loss");
        };
        assert_eq!(detail["kind"], "already_covered");
        assert_eq!(s2.state_hash(), s1.state_hash());
        // Removing the only component re-establishes the empty robust pair.
        let Response::Continued { state: s3, .. } =
            s2.cover_respond(&Move::RemoveComponent(0)).unwrap()
        else {
            panic!("removal is always answerable");
        };
        assert!(s3.matching().is_empty());
        assert_eq!(s3.strategy_invariant().unwrap(), None);
    }

    #[test]
    fn right_challenge_covers_neighbors_then_the_vertex() {
        let g = disjoint_graph();
        let params = certified_params(&g);
        let state = GameState::new(
            g.clone(),
            params,
            BudgetMode::MaxComponents(4),
            true,
            Limits::default(),
        )
        .unwrap();
        // Right vertex 0 neighbors lefts 0 and 2.
        let mv = Move::Challenge { side: Side::Right, vertex: 0 };
        let Response::Continued { state: s1, .. } = state.cover_respond(&mv).unwrap() else {
            panic!("right challenge must succeed");
        };
        assert!(s1.matching().covers_right(0));
        assert!(s1.matching().covers_left(0));
        assert!(s1.matching().covers_left(2));
        assert_eq!(s1.strategy_invariant().unwrap(), None);
    }

    #[test]
    fn challenges_are_illegal_at_the_budget() {
        let g = disjoint_graph();
        let params = certified_params(&g);
        let state = GameState::new(
            g,
            params,
            BudgetMode::MaxComponents(1),
            false,
            Limits::default(),
        )
        .unwrap();
        let Response::Continued { state: s1, .. } = state
            .cover_respond(&Move::Challenge { side: Side::Left, vertex: 0 })
            .unwrap()
        else {
            panic!("first challenge fits the budget");
        };
        let err = s1
            .cover_respond(&Move::Challenge { side: Side::Left, vertex: 1 })
            .unwrap_err();
        assert!(matches!(err, GameError::IllegalMove(_)));
        // Degenerate mu blocks every challenge.
        let degenerate = GameState::new(
            disjoint_graph(),
            GameParams::new(eps24(), 100, 2).unwrap(),
            BudgetMode::Mu,
            false,
            Limits::default(),
        )
        .unwrap();
        assert!(!degenerate.challenge_allowed());
    }

    #[test]
    fn component_removal_preserves_robustness() {
        let g = disjoint_graph();
        let params = certified_params(&g);
        let mut state = GameState::new(
            g,
            params,
            BudgetMode::MaxComponents(3),
            true,
            Limits::default(),
        )
        .unwrap();
        for v in 0..2 {
            let Response::Continued { state: next, .. } = state
                .cover_respond(&Move::Challenge { side: Side::Left, vertex: v })
                .unwrap()
            else {
                panic!("challenge {v} must succeed");
            };
            state = next;
        }
        // Every way of peeling components keeps the pair robust.
        for first in 0..state.component_count() {
            let Response::Continued { state: peeled, .. } =
                state.cover_respond(&Move::RemoveComponent(first)).unwrap()
            else {
                panic!("removal never loses");
            };
            assert_eq!(peeled.strategy_invariant().unwrap(), None);
            for second in 0..peeled.component_count() {
                let Response::Continued { state: bare, .. } =
                    peeled.cover_respond(&Move::RemoveComponent(second)).unwrap()
                else {
                    panic!("removal never loses");
                };
                assert_eq!(bare.strategy_invariant().unwrap(), None);
            }
        }
    }

    #[test]
    fn play_is_deterministic_and_scripts_replay() {
        let g = disjoint_graph();
        let params = certified_params(&g);
        let state = GameState::new(
            g,
            params,
            BudgetMode::MaxComponents(2),
            true,
            Limits::default(),
        )
        .unwrap();
        // Empty script: initial record only.
        let (empty, _) = play(state.clone(), &Adversary::Scripted(Vec::new())).unwrap();
        assert_eq!(empty.records.len(), 1);
        assert_eq!(empty.records[0].response["kind"], "initial");
        // Scripted challenge/remove/challenge round trip.
        let script = vec![
            Move::Challenge { side: Side::Left, vertex: 0 },
            Move::RemoveComponent(0),
            Move::Challenge { side: Side::Left, vertex: 0 },
        ];
        let (replay, end) = play(state.clone(), &Adversary::Scripted(script)).unwrap();
        assert!(!replay.cover_lost());
        assert_eq!(end.component_count(), 1);
        // Random adversary with a fixed seed reproduces byte-identical
        // transcripts; illegal moves are noted, never fatal.
        let adversary = Adversary::Random { seed: 7, moves: 40 };
        let (t1, _) = play(state.clone(), &adversary).unwrap();
        let (t2, _) = play(state, &adversary).unwrap();
        assert_eq!(t1.to_jsonl(), t2.to_jsonl());
        assert!(!t1.cover_lost());
    }

    #[test]
    fn moves_round_trip_through_json() {
        for mv in [
            Move::RemoveComponent(3),
            Move::Challenge { side: Side::Left, vertex: 7 },
            Move::Challenge { side: Side::Right, vertex: 0 },
        ] {
            assert_eq!(Move::from_json(&mv.to_json()).unwrap(), mv);
        }
        assert!(Move::from_json(&json!({"kind": "dance"})).is_err());
    }
}
