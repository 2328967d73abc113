//! CNF formulas: DIMACS input/output, a seeded random 3-CNF model, the
//! clause/variable adjacency graph, and partial-assignment application.
//!
//! Variables are positive `u32` indices (DIMACS style, 1-based); a literal is
//! a nonzero `i32` whose sign is its polarity. Clause literals are kept
//! sorted by variable with the positive literal first, and input formulas may
//! not repeat a variable inside a clause (derived clauses elsewhere may).

mod assign;
mod poly;

pub use assign::{AssignError, PartialAssignment, PiecewiseAssignment};
pub use poly::{
    boolean_axioms, tr_clause, tr_cnf, tr_literal, Monomial, Polarity, PolyError, Polynomial,
    TwinVar,
};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graphs::BipartiteGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("literal 0 is not allowed")]
    ZeroLiteral,
    #[error("literal {literal} exceeds variable count {count}")]
    LiteralOutOfRange { literal: i32, count: u32 },
    #[error("variable {variable} repeats inside a clause")]
    RepeatedVariable { variable: u32 },
    #[error("random 3-CNF needs at least 3 variables, got {0}")]
    TooFewVariables(u32),
    #[error("clause count must be nonnegative and finite, got {0}")]
    BadClauseCount(String),
    #[error("DIMACS parse error at line {line}: {reason}")]
    Dimacs { line: usize, reason: String },
}

/// A disjunction of literals, sorted by variable (positive polarity first).
/// Duplicate literals collapse; opposite literals on one variable are legal
/// here (a tautology) so resolution can produce them, but [`Cnf::new`]
/// rejects them in input formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clause(Vec<i32>);

impl Clause {
    pub fn new(literals: Vec<i32>) -> Result<Self, CnfError> {
        if literals.contains(&0) {
            return Err(CnfError::ZeroLiteral);
        }
        let mut lits = literals;
        lits.sort_unstable_by_key(|&l| (l.unsigned_abs(), l < 0));
        lits.dedup();
        Ok(Clause(lits))
    }

    /// The empty clause (always false).
    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn literals(&self) -> &[i32] {
        &self.0
    }

    /// Number of literals.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, literal: i32) -> bool {
        self.0.binary_search_by_key(&(literal.unsigned_abs(), literal < 0), |&l| {
            (l.unsigned_abs(), l < 0)
        })
        .is_ok()
    }

    /// Both polarities of some variable present.
    pub fn is_tautology(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == -w[1])
    }

    /// Sorted distinct variables.
    pub fn variables(&self) -> Vec<u32> {
        let mut vars: Vec<u32> = self.0.iter().map(|l| l.unsigned_abs()).collect();
        vars.dedup();
        vars
    }

    fn check_input_clause(&self, count: u32) -> Result<(), CnfError> {
        for &l in &self.0 {
            if l.unsigned_abs() > count {
                return Err(CnfError::LiteralOutOfRange { literal: l, count });
            }
        }
        for w in self.0.windows(2) {
            if w[0].unsigned_abs() == w[1].unsigned_abs() {
                return Err(CnfError::RepeatedVariable { variable: w[0].unsigned_abs() });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let rendered: Vec<String> = self
            .0
            .iter()
            .map(|&l| if l < 0 { format!("~x{}", -l) } else { format!("x{l}") })
            .collect();
        write!(f, "({})", rendered.join(" | "))
    }
}

/// A CNF formula over variables `1..=variable_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    variable_count: u32,
    clauses: Vec<Clause>,
}

impl Cnf {
    /// Build a formula; every clause must stay within the variable range and
    /// may not repeat a variable.
    pub fn new(variable_count: u32, clauses: Vec<Vec<i32>>) -> Result<Self, CnfError> {
        let mut out = Vec::with_capacity(clauses.len());
        for lits in clauses {
            if lits.contains(&0) {
                return Err(CnfError::ZeroLiteral);
            }
            // An exact duplicate literal would be merged by `Clause::new`,
            // so catch the repeat on the raw input.
            let mut raw = lits.clone();
            raw.sort_unstable();
            if let Some(w) = raw.windows(2).find(|w| w[0] == w[1]) {
                return Err(CnfError::RepeatedVariable { variable: w[0].unsigned_abs() });
            }
            let clause = Clause::new(lits)?;
            clause.check_input_clause(variable_count)?;
            out.push(clause);
        }
        Ok(Cnf { variable_count, clauses: out })
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Serialize in DIMACS format (one clause per line, `0`-terminated).
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for clause in &self.clauses {
            for &l in clause.literals() {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parse DIMACS. Comment lines (`c ...`) are skipped; clauses may span
    /// lines; the declared clause count must match.
    pub fn from_dimacs(text: &str) -> Result<Self, CnfError> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            if trimmed.starts_with('p') {
                if header.is_some() {
                    return Err(CnfError::Dimacs {
                        line: line_no,
                        reason: "duplicate header".into(),
                    });
                }
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() != 4 || fields[1] != "cnf" {
                    return Err(CnfError::Dimacs {
                        line: line_no,
                        reason: "expected `p cnf <vars> <clauses>`".into(),
                    });
                }
                let vars = fields[2].parse::<u32>().map_err(|_| CnfError::Dimacs {
                    line: line_no,
                    reason: format!("bad variable count {:?}", fields[2]),
                })?;
                let count = fields[3].parse::<usize>().map_err(|_| CnfError::Dimacs {
                    line: line_no,
                    reason: format!("bad clause count {:?}", fields[3]),
                })?;
                header = Some((vars, count));
                continue;
            }
            if header.is_none() {
                return Err(CnfError::Dimacs {
                    line: line_no,
                    reason: "clause before header".into(),
                });
            }
            for tok in trimmed.split_whitespace() {
                let lit = tok.parse::<i32>().map_err(|_| CnfError::Dimacs {
                    line: line_no,
                    reason: format!("bad literal {tok:?}"),
                })?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        let (vars, count) = header.ok_or(CnfError::Dimacs {
            line: 1,
            reason: "missing header".into(),
        })?;
        if !current.is_empty() {
            return Err(CnfError::Dimacs {
                line: text.lines().count(),
                reason: "unterminated clause".into(),
            });
        }
        if clauses.len() != count {
            return Err(CnfError::Dimacs {
                line: text.lines().count(),
                reason: format!("declared {count} clauses, found {}", clauses.len()),
            });
        }
        Cnf::new(vars, clauses)
    }
}

/// Sample a random 3-CNF with `floor(delta * n)` clauses over `n >= 3`
/// variables: each clause picks 3 distinct variables uniformly and negates
/// each independently. The ChaCha8 generator makes output a pure function of
/// `(n, delta, seed)` on every platform.
pub fn random_3cnf(n: u32, delta: &BigRational, seed: u64) -> Result<Cnf, CnfError> {
    use num_traits::Signed;
    if n < 3 {
        return Err(CnfError::TooFewVariables(n));
    }
    if delta.is_negative() {
        return Err(CnfError::BadClauseCount(crate::ratio::format_ratio(delta)));
    }
    let clause_count = (delta * BigRational::from_integer(n.into()))
        .floor()
        .to_integer()
        .to_usize()
        .ok_or_else(|| CnfError::BadClauseCount(crate::ratio::format_ratio(delta)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(clause_count);
    for _ in 0..clause_count {
        let mut vars = [0u32; 3];
        loop {
            for slot in vars.iter_mut() {
                *slot = rng.gen_range(1..=n);
            }
            if vars[0] != vars[1] && vars[0] != vars[2] && vars[1] != vars[2] {
                break;
            }
        }
        vars.sort_unstable();
        let mut lits = Vec::with_capacity(3);
        for v in vars {
            let negate = rng.gen_range(0..2u8) == 1;
            lits.push(if negate { -(v as i32) } else { v as i32 });
        }
        clauses.push(lits);
    }
    Cnf::new(n, clauses)
}

/// The clause/variable incidence graph: left vertex = clause index, right
/// vertex = variable minus one, with printable labels for both sides.
#[derive(Clone, Debug)]
pub struct AdjacencyGraph {
    pub graph: BipartiteGraph,
    pub clause_labels: Vec<String>,
    pub variable_labels: Vec<String>,
}

pub fn adjacency_graph(phi: &Cnf) -> AdjacencyGraph {
    let adjacency: Vec<Vec<u32>> = phi
        .clauses()
        .iter()
        .map(|c| c.variables().iter().map(|&v| v - 1).collect())
        .collect();
    let graph = BipartiteGraph::new(
        phi.clause_count() as u32,
        phi.variable_count(),
        adjacency,
    )
    .expect("clause variables validated at construction");
    AdjacencyGraph {
        graph,
        clause_labels: phi.clauses().iter().map(|c| c.to_string()).collect(),
        variable_labels: (1..=phi.variable_count()).map(|v| format!("x{v}")).collect(),
    }
}

/// Status of a formula under a partial assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnfStatus {
    Satisfied,
    Falsified,
    Undetermined,
}

/// The simplified formula plus its status.
#[derive(Clone, Debug)]
pub struct AppliedCnf {
    pub cnf: Cnf,
    pub status: CnfStatus,
}

/// Apply `alpha`: satisfied clauses vanish, false literals drop out, and an
/// emptied clause marks the formula falsified.
pub fn apply_assignment(phi: &Cnf, alpha: &PartialAssignment) -> AppliedCnf {
    let mut clauses: Vec<Clause> = Vec::new();
    let mut falsified = false;
    for clause in phi.clauses() {
        if alpha.satisfies_clause(clause) {
            continue;
        }
        let remaining: Vec<i32> = clause
            .literals()
            .iter()
            .copied()
            .filter(|&l| alpha.get(l.unsigned_abs()).is_none())
            .collect();
        if remaining.is_empty() {
            falsified = true;
        }
        clauses.push(Clause::new(remaining).expect("no zero literals survive filtering"));
    }
    let status = if falsified {
        CnfStatus::Falsified
    } else if clauses.is_empty() {
        CnfStatus::Satisfied
    } else {
        CnfStatus::Undetermined
    };
    AppliedCnf { cnf: Cnf { variable_count: phi.variable_count(), clauses }, status }
}
