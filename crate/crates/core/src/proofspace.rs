//! Memory-configuration traces for refutations, and their space measures.
//!
//! A trace is an ordered list of steps applied to a memory configuration
//! that starts empty. Each step either downloads an input, infers a new
//! entry from entries already in memory, or erases part of memory. Two
//! systems share the machinery:
//!
//! * clause traces — entries are clauses; the inference rule resolves two
//!   clauses on a pivot variable; a refutation ends with the empty clause
//!   in memory;
//! * polynomial traces — entries are twin-variable polynomials; the rules
//!   are exact linear combination and multiplication by a literal; a
//!   refutation ends with the constant polynomial `1` in memory.
//!
//! Configurations are *sets*: downloading an entry twice leaves one copy.
//! Step references (`a`, `b`, `keep`) index the previous configuration in
//! its canonical sorted order; the empty clause sorts first. Checking is a
//! running fold, so memory usage tracks configuration size rather than
//! trace length, and the serialized form is JSON lines (one step per
//! line) for the same reason.
//!
//! Measures are maxima over all reconstructed configurations: total space
//! sums entry widths (a clause's width is its literal count, with the
//! empty clause contributing 0; a polynomial's width is its term count),
//! and monomial space counts distinct monomials, where the constant
//! monomial counts like any other.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cnf::{Cnf, PolyError, Polynomial, TwinVar};
use crate::ratio::{format_ratio, parse_ratio};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("step {step}: download index {index} out of range ({count} inputs)")]
    DownloadOutOfRange { step: usize, index: usize, count: usize },
    #[error("step {step}: reference {reference} outside the previous configuration of {size} entries")]
    ReferenceOutOfRange {
        step: usize,
        reference: usize,
        size: usize,
    },
    #[error("step {step}: pivot variable {pivot} does not occur {polarity} in premise {premise}")]
    PivotMissing {
        step: usize,
        pivot: u32,
        premise: usize,
        polarity: &'static str,
    },
    #[error("step {step}: erasure is not a subset of the previous configuration")]
    EraseNotSubset { step: usize },
    #[error("step {step}: multiplying by {var} exceeds the exponent cap")]
    ExponentOverflow { step: usize, var: String },
    #[error("final configuration lacks the empty clause")]
    NoEmptyClause,
    #[error("final configuration lacks the constant 1")]
    NoConstantOne,
}

/// One step of a clause trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResStep {
    /// Copy input clause `index` into memory.
    Download { index: usize },
    /// Resolve premise `a` (containing the pivot positively) with premise
    /// `b` (containing it negatively) and add the resolvent.
    Resolve { a: usize, b: usize, pivot: u32 },
    /// Keep exactly the listed entries of the previous configuration.
    Erase { keep: Vec<usize> },
}

/// One step of a polynomial trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PcrStep {
    /// Copy input polynomial `index` into memory.
    Download { index: usize },
    /// Add `alpha * entry(a) + beta * entry(b)` to memory.
    Linear {
        a: usize,
        b: usize,
        alpha: BigRational,
        beta: BigRational,
    },
    /// Add `entry(a)` multiplied by a twin-variable literal to memory.
    Multiply { a: usize, var: TwinVar },
    /// Keep exactly the listed entries of the previous configuration.
    Erase { keep: Vec<usize> },
}

fn get_usize(map: &serde_json::Map<String, Value>, field: &str) -> Result<usize, String> {
    map.get(field)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| format!("missing or non-integer field '{field}'"))
}

fn get_keep(map: &serde_json::Map<String, Value>) -> Result<Vec<usize>, String> {
    let arr = map
        .get("keep")
        .and_then(Value::as_array)
        .ok_or_else(|| "missing or non-array field 'keep'".to_string())?;
    arr.iter()
        .map(|v| {
            v.as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| "non-integer entry in 'keep'".to_string())
        })
        .collect()
}

fn step_object(value: &Value) -> Result<(&serde_json::Map<String, Value>, &str), String> {
    let map = value
        .as_object()
        .ok_or_else(|| "step is not a JSON object".to_string())?;
    let op = map
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| "missing string field 'op'".to_string())?;
    Ok((map, op))
}

impl ResStep {
    pub fn to_json(&self) -> Value {
        match self {
            ResStep::Download { index } => json!({"op": "download", "idx": index}),
            ResStep::Resolve { a, b, pivot } => {
                json!({"op": "res", "a": a, "b": b, "pivot": pivot})
            }
            ResStep::Erase { keep } => json!({"op": "erase", "keep": keep}),
        }
    }

    pub fn from_json(value: &Value) -> Result<ResStep, String> {
        let (map, op) = step_object(value)?;
        match op {
            "download" => Ok(ResStep::Download {
                index: get_usize(map, "idx")?,
            }),
            "res" => {
                let pivot = get_usize(map, "pivot")?;
                if pivot == 0 || pivot > u32::MAX as usize {
                    return Err(format!("pivot {pivot} is not a variable"));
                }
                Ok(ResStep::Resolve {
                    a: get_usize(map, "a")?,
                    b: get_usize(map, "b")?,
                    pivot: pivot as u32,
                })
            }
            "erase" => Ok(ResStep::Erase {
                keep: get_keep(map)?,
            }),
            "lin" | "mul" => Err(format!("'{op}' is a polynomial-trace step")),
            other => Err(format!("unknown op '{other}'")),
        }
    }
}

impl PcrStep {
    pub fn to_json(&self) -> Value {
        match self {
            PcrStep::Download { index } => json!({"op": "download", "idx": index}),
            PcrStep::Linear { a, b, alpha, beta } => json!({
                "op": "lin", "a": a, "b": b,
                "alpha": format_ratio(alpha), "beta": format_ratio(beta),
            }),
            PcrStep::Multiply { a, var } => json!({"op": "mul", "a": a, "var": var.to_string()}),
            PcrStep::Erase { keep } => json!({"op": "erase", "keep": keep}),
        }
    }

    pub fn from_json(value: &Value) -> Result<PcrStep, String> {
        let (map, op) = step_object(value)?;
        let ratio_field = |field: &str| -> Result<BigRational, String> {
            let raw = map
                .get(field)
                .and_then(Value::as_str)
                .ok_or_else(|| format!("missing or non-string field '{field}'"))?;
            parse_ratio(raw).map_err(|e| format!("field '{field}': {e}"))
        };
        match op {
            "download" => Ok(PcrStep::Download {
                index: get_usize(map, "idx")?,
            }),
            "lin" => Ok(PcrStep::Linear {
                a: get_usize(map, "a")?,
                b: get_usize(map, "b")?,
                alpha: ratio_field("alpha")?,
                beta: ratio_field("beta")?,
            }),
            "mul" => {
                let raw = map
                    .get("var")
                    .and_then(Value::as_str)
                    .ok_or_else(|| "missing or non-string field 'var'".to_string())?;
                let var = TwinVar::parse(raw).map_err(|e| e.to_string())?;
                Ok(PcrStep::Multiply {
                    a: get_usize(map, "a")?,
                    var,
                })
            }
            "erase" => Ok(PcrStep::Erase {
                keep: get_keep(map)?,
            }),
            "res" => Err("'res' is a clause-trace step".to_string()),
            other => Err(format!("unknown op '{other}'")),
        }
    }
}

fn parse_lines<T>(
    text: &str,
    parse: impl Fn(&Value) -> Result<T, String>,
) -> Result<Vec<T>, TraceError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).map_err(|e| TraceError::Malformed {
            line: i + 1,
            detail: e.to_string(),
        })?;
        out.push(parse(&value).map_err(|detail| TraceError::Malformed {
            line: i + 1,
            detail,
        })?);
    }
    Ok(out)
}

pub fn parse_res_trace(text: &str) -> Result<Vec<ResStep>, TraceError> {
    parse_lines(text, ResStep::from_json)
}

pub fn parse_pcr_trace(text: &str) -> Result<Vec<PcrStep>, TraceError> {
    parse_lines(text, PcrStep::from_json)
}

pub fn res_trace_to_jsonl(steps: &[ResStep]) -> String {
    steps.iter().map(|s| s.to_json().to_string() + "\n").collect()
}

pub fn pcr_trace_to_jsonl(steps: &[PcrStep]) -> String {
    steps.iter().map(|s| s.to_json().to_string() + "\n").collect()
}

/// Space measures of a checked trace, each a maximum over all
/// reconstructed configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceReport {
    pub steps: usize,
    /// Sum of entry widths within one configuration, maximized.
    pub total_space: usize,
    /// Largest single entry width seen in any configuration.
    pub max_width: usize,
    /// The pair `(c, w)` — some configuration holds `c` entries of width
    /// at least `w` — maximizing `min(c, w)`, ties broken toward larger `c`.
    pub best_config_profile: (usize, usize),
    /// Distinct monomials within one configuration, maximized; polynomial
    /// traces only.
    pub monomial_space: Option<usize>,
}

impl SpaceReport {
    pub fn to_json(&self) -> Value {
        json!({
            "steps": self.steps,
            "total_space": self.total_space,
            "max_width": self.max_width,
            "best_config_profile": {
                "entries": self.best_config_profile.0,
                "min_width": self.best_config_profile.1,
            },
            "monomial_space": self.monomial_space,
        })
    }
}

/// Running maxima over configurations, fed once per step.
#[derive(Default)]
struct Measures {
    total_space: usize,
    max_width: usize,
    best_value: usize,
    best_profile: (usize, usize),
}

impl Measures {
    fn observe(&mut self, mut widths: Vec<usize>) {
        let sum: usize = widths.iter().sum();
        self.total_space = self.total_space.max(sum);
        self.max_width = self.max_width.max(widths.iter().copied().max().unwrap_or(0));
        widths.sort_unstable_by(|a, b| b.cmp(a));
        for (i, &w) in widths.iter().enumerate() {
            let c = i + 1;
            let value = c.min(w);
            if value > self.best_value || (value == self.best_value && c > self.best_profile.0) {
                self.best_value = value;
                self.best_profile = (c, w);
            }
        }
    }
}

fn check_erase<T: Ord + Clone>(
    step: usize,
    config: &BTreeSet<T>,
    keep: &[usize],
) -> Result<BTreeSet<T>, TraceError> {
    let ordered: Vec<&T> = config.iter().collect();
    let mut chosen = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for &i in keep {
        if i >= ordered.len() || !seen.insert(i) {
            return Err(TraceError::EraseNotSubset { step });
        }
        chosen.insert(ordered[i].clone());
    }
    Ok(chosen)
}

fn lookup<'a, T>(step: usize, ordered: &'a [&T], reference: usize) -> Result<&'a T, TraceError> {
    ordered
        .get(reference)
        .copied()
        .ok_or(TraceError::ReferenceOutOfRange {
            step,
            reference,
            size: ordered.len(),
        })
}

/// Streaming checker for clause traces: feed steps in order, then call
/// [`ResChecker::finish`].
pub struct ResChecker {
    inputs: Vec<Vec<i32>>,
    config: BTreeSet<Vec<i32>>,
    steps: usize,
    measures: Measures,
}

impl ResChecker {
    pub fn new(phi: &Cnf) -> ResChecker {
        let inputs = phi
            .clauses()
            .iter()
            .map(|c| {
                let mut lits = c.literals().to_vec();
                lits.sort_unstable();
                lits
            })
            .collect();
        ResChecker {
            inputs,
            config: BTreeSet::new(),
            steps: 0,
            measures: Measures::default(),
        }
    }

    /// The current configuration in canonical order.
    pub fn configuration(&self) -> Vec<Vec<i32>> {
        self.config.iter().cloned().collect()
    }

    pub fn apply(&mut self, step: &ResStep) -> Result<(), TraceError> {
        let at = self.steps;
        match step {
            ResStep::Download { index } => {
                let clause = self.inputs.get(*index).ok_or(TraceError::DownloadOutOfRange {
                    step: at,
                    index: *index,
                    count: self.inputs.len(),
                })?;
                self.config.insert(clause.clone());
            }
            ResStep::Resolve { a, b, pivot } => {
                let ordered: Vec<&Vec<i32>> = self.config.iter().collect();
                let ca = lookup(at, &ordered, *a)?;
                let cb = lookup(at, &ordered, *b)?;
                let pos = *pivot as i32;
                if !ca.contains(&pos) {
                    return Err(TraceError::PivotMissing {
                        step: at,
                        pivot: *pivot,
                        premise: *a,
                        polarity: "positively",
                    });
                }
                if !cb.contains(&-pos) {
                    return Err(TraceError::PivotMissing {
                        step: at,
                        pivot: *pivot,
                        premise: *b,
                        polarity: "negatively",
                    });
                }
                let resolvent: BTreeSet<i32> = ca
                    .iter()
                    .filter(|&&l| l != pos)
                    .chain(cb.iter().filter(|&&l| l != -pos))
                    .copied()
                    .collect();
                self.config.insert(resolvent.into_iter().collect());
            }
            ResStep::Erase { keep } => {
                self.config = check_erase(at, &self.config, keep)?;
            }
        }
        self.steps += 1;
        self.measures
            .observe(self.config.iter().map(Vec::len).collect());
        Ok(())
    }

    pub fn finish(self) -> Result<SpaceReport, TraceError> {
        if !self.config.contains(&Vec::new()) {
            return Err(TraceError::NoEmptyClause);
        }
        Ok(SpaceReport {
            steps: self.steps,
            total_space: self.measures.total_space,
            max_width: self.measures.max_width,
            best_config_profile: self.measures.best_profile,
            monomial_space: None,
        })
    }
}

/// Validate a whole clause trace and measure its space.
pub fn check_res_trace(phi: &Cnf, steps: &[ResStep]) -> Result<SpaceReport, TraceError> {
    let mut checker = ResChecker::new(phi);
    for step in steps {
        checker.apply(step)?;
    }
    checker.finish()
}

/// Count distinct monomials across a set of polynomials; the constant
/// monomial counts like any other.
pub fn distinct_monomials<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> usize {
    polys
        .into_iter()
        .flat_map(|p| p.monomials())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Streaming checker for polynomial traces: feed steps in order, then
/// call [`PcrChecker::finish`].
pub struct PcrChecker {
    inputs: Vec<Polynomial>,
    config: BTreeSet<Polynomial>,
    steps: usize,
    measures: Measures,
    monomial_space: usize,
}

impl PcrChecker {
    pub fn new(inputs: &[Polynomial]) -> PcrChecker {
        PcrChecker {
            inputs: inputs.to_vec(),
            config: BTreeSet::new(),
            steps: 0,
            measures: Measures::default(),
            monomial_space: 0,
        }
    }

    /// The current configuration in canonical order.
    pub fn configuration(&self) -> Vec<Polynomial> {
        self.config.iter().cloned().collect()
    }

    pub fn apply(&mut self, step: &PcrStep) -> Result<(), TraceError> {
        let at = self.steps;
        match step {
            PcrStep::Download { index } => {
                let poly = self.inputs.get(*index).ok_or(TraceError::DownloadOutOfRange {
                    step: at,
                    index: *index,
                    count: self.inputs.len(),
                })?;
                self.config.insert(poly.clone());
            }
            PcrStep::Linear { a, b, alpha, beta } => {
                let ordered: Vec<&Polynomial> = self.config.iter().collect();
                let pa = lookup(at, &ordered, *a)?;
                let pb = lookup(at, &ordered, *b)?;
                let result = Polynomial::linear_combine(alpha, pa, beta, pb);
                self.config.insert(result);
            }
            PcrStep::Multiply { a, var } => {
                let ordered: Vec<&Polynomial> = self.config.iter().collect();
                let pa = lookup(at, &ordered, *a)?;
                let result = pa.mul_twin(*var).map_err(|e| match e {
                    PolyError::ExponentCap(_) => TraceError::ExponentOverflow {
                        step: at,
                        var: var.to_string(),
                    },
                    PolyError::Json(detail) => TraceError::Malformed { line: at, detail },
                })?;
                self.config.insert(result);
            }
            PcrStep::Erase { keep } => {
                self.config = check_erase(at, &self.config, keep)?;
            }
        }
        self.steps += 1;
        self.measures
            .observe(self.config.iter().map(Polynomial::term_count).collect());
        self.monomial_space = self.monomial_space.max(distinct_monomials(&self.config));
        Ok(())
    }

    pub fn finish(self) -> Result<SpaceReport, TraceError> {
        if !self.config.iter().any(Polynomial::is_one) {
            return Err(TraceError::NoConstantOne);
        }
        Ok(SpaceReport {
            steps: self.steps,
            total_space: self.measures.total_space,
            max_width: self.measures.max_width,
            best_config_profile: self.measures.best_profile,
            monomial_space: Some(self.monomial_space),
        })
    }
}

/// Validate a whole polynomial trace and measure its space.
pub fn check_pcr_trace(inputs: &[Polynomial], steps: &[PcrStep]) -> Result<SpaceReport, TraceError> {
    let mut checker = PcrChecker::new(inputs);
    for step in steps {
        checker.apply(step)?;
    }
    checker.finish()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefuteError {
    #[error("saturation exceeded the cap of {cap} clauses")]
    CapExceeded { cap: usize },
}

/// Result of the naive refuter: either a checkable trace or a report
/// that saturation closed without the empty clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationOutcome {
    Refuted(Vec<ResStep>),
    Satisfiable,
}

/// Derive the empty clause by brute-force saturation, then emit a trace
/// that downloads the used inputs and replays the needed resolutions in
/// dependency order. The trace never erases and makes no attempt at
/// space economy — it exists to exercise the checker. `cap` bounds the
/// number of distinct clauses kept during saturation.
pub fn naive_res_refuter(phi: &Cnf, cap: usize) -> Result<RefutationOutcome, RefuteError> {
    let inputs: Vec<Vec<i32>> = phi
        .clauses()
        .iter()
        .map(|c| {
            let mut lits = c.literals().to_vec();
            lits.sort_unstable();
            lits
        })
        .collect();

    let mut known: BTreeSet<Vec<i32>> = inputs.iter().cloned().collect();
    let mut parents: BTreeMap<Vec<i32>, (Vec<i32>, Vec<i32>, u32)> = BTreeMap::new();
    let empty: Vec<i32> = Vec::new();

    while !known.contains(&empty) {
        if known.len() > cap {
            return Err(RefuteError::CapExceeded { cap });
        }
        let snapshot: Vec<Vec<i32>> = known.iter().cloned().collect();
        let mut fresh: Vec<(Vec<i32>, Vec<i32>, Vec<i32>, u32)> = Vec::new();
        for ca in &snapshot {
            for cb in &snapshot {
                for &lit in ca.iter().filter(|&&l| l > 0) {
                    if !cb.contains(&-lit) {
                        continue;
                    }
                    let resolvent: BTreeSet<i32> = ca
                        .iter()
                        .filter(|&&l| l != lit)
                        .chain(cb.iter().filter(|&&l| l != -lit))
                        .copied()
                        .collect();
                    if resolvent.iter().any(|&l| resolvent.contains(&-l)) {
                        continue; // tautologies never help
                    }
                    let resolvent: Vec<i32> = resolvent.into_iter().collect();
                    if known.contains(&resolvent) {
                        continue;
                    }
                    fresh.push((resolvent, ca.clone(), cb.clone(), lit as u32));
                }
            }
        }
        if fresh.is_empty() {
            return Ok(RefutationOutcome::Satisfiable);
        }
        for (resolvent, ca, cb, pivot) in fresh {
            if known.insert(resolvent.clone()) {
                parents.insert(resolvent, (ca, cb, pivot));
            }
        }
    }

    // Walk back from the empty clause, collecting the inputs and derived
    // clauses it depends on, children after parents.
    let mut needed_inputs: BTreeSet<usize> = BTreeSet::new();
    let mut order: Vec<Vec<i32>> = Vec::new();
    let mut done: BTreeSet<Vec<i32>> = BTreeSet::new();
    let mut stack: Vec<(Vec<i32>, bool)> = vec![(empty.clone(), false)];
    while let Some((clause, expanded)) = stack.pop() {
        if done.contains(&clause) {
            continue;
        }
        if expanded {
            done.insert(clause.clone());
            order.push(clause);
            continue;
        }
        if let Some(idx) = inputs.iter().position(|c| *c == clause) {
            needed_inputs.insert(idx);
            done.insert(clause);
            continue;
        }
        let (ca, cb, _) = parents
            .get(&clause)
            .expect("derived clause has a parent record");
        stack.push((clause.clone(), true));
        stack.push((ca.clone(), false));
        stack.push((cb.clone(), false));
    }

    let mut steps: Vec<ResStep> = Vec::new();
    let mut config: BTreeSet<Vec<i32>> = BTreeSet::new();
    for idx in &needed_inputs {
        steps.push(ResStep::Download { index: *idx });
        config.insert(inputs[*idx].clone());
    }
    for clause in order {
        if config.contains(&clause) {
            continue;
        }
        let (ca, cb, pivot) = &parents[&clause];
        let ordered: Vec<&Vec<i32>> = config.iter().collect();
        let a = ordered.iter().position(|c| *c == ca).expect("premise present");
        let b = ordered.iter().position(|c| *c == cb).expect("premise present");
        steps.push(ResStep::Resolve {
            a,
            b,
            pivot: *pivot,
        });
        config.insert(clause);
    }
    Ok(RefutationOutcome::Refuted(steps))
}
