//! Polynomials over twin variables.
//!
//! Each boolean variable `x` owns two ring variables: plain `x` and barred
//! `~x`, linked by the axioms `x^2 - x` (booleanity) and `x + ~x - 1`
//! (complementarity). A clause translates to the product of its literals'
//! *opposite* twins — `tr(x) = ~x`, `tr(¬x) = x` — so an assignment satisfies
//! a clause exactly when the translated monomial evaluates to 0 (reading
//! plain `x` as the assigned bit and `~x` as its flip).
//!
//! Monomials cap per-variable exponents at 2, which is all the axioms need;
//! a multiplication that would exceed the cap is an error surfaced to trace
//! checking as a violation.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ratio::{format_ratio, parse_ratio};

use super::{Clause, Cnf, PartialAssignment};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("exponent cap exceeded on variable {0}")]
    ExponentCap(String),
    #[error("polynomial JSON malformed: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Polarity {
    Plain,
    Barred,
}

/// One of the two ring variables attached to a boolean variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TwinVar {
    pub variable: u32,
    pub polarity: Polarity,
}

impl TwinVar {
    pub fn plain(variable: u32) -> Self {
        TwinVar { variable, polarity: Polarity::Plain }
    }

    pub fn barred(variable: u32) -> Self {
        TwinVar { variable, polarity: Polarity::Barred }
    }

    /// Parse `x3` or `~x3`.
    pub fn parse(s: &str) -> Result<Self, PolyError> {
        let (polarity, rest) = match s.strip_prefix('~') {
            Some(rest) => (Polarity::Barred, rest),
            None => (Polarity::Plain, s),
        };
        let idx = rest
            .strip_prefix('x')
            .and_then(|d| d.parse::<u32>().ok())
            .filter(|&v| v > 0)
            .ok_or_else(|| PolyError::Json(format!("bad variable name {s:?}")))?;
        Ok(TwinVar { variable: idx, polarity })
    }
}

impl std::fmt::Display for TwinVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.polarity {
            Polarity::Plain => write!(f, "x{}", self.variable),
            Polarity::Barred => write!(f, "~x{}", self.variable),
        }
    }
}

/// A product of twin variables with exponents in `{1, 2}`, sorted by
/// variable then polarity. The empty product is the constant monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    factors: Vec<(TwinVar, u8)>,
}

impl Monomial {
    pub fn constant() -> Self {
        Self::default()
    }

    pub fn var(tv: TwinVar) -> Self {
        Monomial { factors: vec![(tv, 1)] }
    }

    pub fn from_factors(mut factors: Vec<(TwinVar, u8)>) -> Result<Self, PolyError> {
        factors.sort_unstable();
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(PolyError::Json(format!("repeated factor {}", w[0].0)));
            }
        }
        for &(tv, exp) in &factors {
            if exp == 0 || exp > 2 {
                return Err(PolyError::ExponentCap(tv.to_string()));
            }
        }
        Ok(Monomial { factors })
    }

    pub fn factors(&self) -> &[(TwinVar, u8)] {
        &self.factors
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiply by one twin variable, capping exponents at 2.
    pub fn times(&self, tv: TwinVar) -> Result<Monomial, PolyError> {
        let mut factors = self.factors.clone();
        match factors.binary_search_by_key(&tv, |&(v, _)| v) {
            Ok(i) => {
                if factors[i].1 >= 2 {
                    return Err(PolyError::ExponentCap(tv.to_string()));
                }
                factors[i].1 += 1;
            }
            Err(i) => factors.insert(i, (tv, 1)),
        }
        Ok(Monomial { factors })
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(tv, exp)| if exp == 1 { tv.to_string() } else { format!("{tv}^{exp}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A polynomial with exact rational coefficients; zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::constant(), c);
        }
        Polynomial { terms }
    }

    pub fn var(tv: TwinVar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(tv), BigRational::one());
        Polynomial { terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        Polynomial { terms }
    }

    pub fn from_terms(pairs: Vec<(Monomial, BigRational)>) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in pairs {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::constant())
                .is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// `alpha * a + beta * b`, exactly.
    pub fn linear_combine(
        alpha: &BigRational,
        a: &Polynomial,
        beta: &BigRational,
        b: &Polynomial,
    ) -> Polynomial {
        a.scale(alpha).add(&b.scale(beta))
    }

    /// Multiply by a twin variable; fails if any monomial would exceed the
    /// exponent cap.
    pub fn mul_twin(&self, tv: TwinVar) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.times(tv)?, c.clone());
        }
        Ok(out)
    }

    /// Substitute assigned variables: plain `x` reads the assigned bit,
    /// barred `~x` its flip. Zero factors kill their terms; unassigned
    /// factors survive.
    pub fn apply(&self, alpha: &PartialAssignment) -> Polynomial {
        let mut out = Polynomial::zero();
        'terms: for (m, c) in &self.terms {
            let mut rest = Vec::new();
            for &(tv, exp) in m.factors() {
                match alpha.get(tv.variable) {
                    None => rest.push((tv, exp)),
                    Some(bit) => {
                        let value = match tv.polarity {
                            Polarity::Plain => bit,
                            Polarity::Barred => !bit,
                        };
                        if !value {
                            continue 'terms; // factor is 0
                        }
                        // factor is 1: drop it
                    }
                }
            }
            out.add_term(Monomial { factors: rest }, c.clone());
        }
        out
    }

    /// Reduce modulo the boolean axioms: substitute `~x := 1 - x` and clamp
    /// `x^2 := x`. The result is multilinear in plain variables and agrees
    /// with `self` on every 0/1 point.
    pub fn reduce_boolean(&self) -> Polynomial {
        // Multilinear intermediate: monomial = sorted set of plain variables.
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut partial: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
            partial.insert(Vec::new(), c.clone());
            for &(tv, _exp) in m.factors() {
                // x^e = x and (1-x)^e = (1-x) on the boolean cube.
                let mut next: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
                let bump = |set: &[u32], v: u32, coeff: BigRational, out: &mut BTreeMap<Vec<u32>, BigRational>| {
                    let mut grown = set.to_vec();
                    if let Err(pos) = grown.binary_search(&v) {
                        grown.insert(pos, v);
                    }
                    let entry = out.entry(grown).or_insert_with(BigRational::zero);
                    *entry += coeff;
                };
                for (set, coeff) in &partial {
                    match tv.polarity {
                        Polarity::Plain => bump(set, tv.variable, coeff.clone(), &mut next),
                        Polarity::Barred => {
                            let entry = next.entry(set.clone()).or_insert_with(BigRational::zero);
                            *entry += coeff;
                            bump(set, tv.variable, -coeff.clone(), &mut next);
                        }
                    }
                }
                partial = next;
            }
            for (set, coeff) in partial {
                let entry = acc.entry(set).or_insert_with(BigRational::zero);
                *entry += coeff;
            }
        }
        let mut out = Polynomial::zero();
        for (set, coeff) in acc {
            let factors = set.into_iter().map(|v| (TwinVar::plain(v), 1)).collect();
            out.add_term(Monomial { factors }, coeff);
        }
        out
    }

    /// JSON: a list of `{"coeff": "p/q", "monomial": [[name, polarity, exp]]}`
    /// term objects in canonical monomial order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let factors: Vec<Value> = m
                    .factors()
                    .iter()
                    .map(|&(tv, exp)| {
                        let name = format!("x{}", tv.variable);
                        let pol = match tv.polarity {
                            Polarity::Plain => "plain",
                            Polarity::Barred => "barred",
                        };
                        json!([name, pol, exp])
                    })
                    .collect();
                json!({ "coeff": format_ratio(c), "monomial": factors })
            })
            .collect();
        Value::Array(terms)
    }

    pub fn from_json(value: &Value) -> Result<Polynomial, PolyError> {
        let terms = value
            .as_array()
            .ok_or_else(|| PolyError::Json("polynomial must be an array of terms".into()))?;
        let mut out = Polynomial::zero();
        for term in terms {
            let coeff = term
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or_else(|| PolyError::Json("term missing string coeff".into()))?;
            let coeff =
                parse_ratio(coeff).map_err(|e| PolyError::Json(format!("bad coeff: {e}")))?;
            let factors = term
                .get("monomial")
                .and_then(Value::as_array)
                .ok_or_else(|| PolyError::Json("term missing monomial list".into()))?;
            let mut parsed = Vec::with_capacity(factors.len());
            for factor in factors {
                let triple = factor
                    .as_array()
                    .filter(|t| t.len() == 3)
                    .ok_or_else(|| PolyError::Json("factor must be [name, polarity, exp]".into()))?;
                let name = triple[0]
                    .as_str()
                    .ok_or_else(|| PolyError::Json("factor name must be a string".into()))?;
                let polarity = triple[1]
                    .as_str()
                    .ok_or_else(|| PolyError::Json("polarity must be a string".into()))?;
                let exp = triple[2]
                    .as_u64()
                    .filter(|&e| e >= 1 && e <= 2)
                    .ok_or_else(|| PolyError::Json("exponent must be 1 or 2".into()))?;
                let base = TwinVar::parse(name)?;
                let tv = match polarity {
                    "plain" => TwinVar::plain(base.variable),
                    "barred" => TwinVar::barred(base.variable),
                    other => return Err(PolyError::Json(format!("bad polarity {other:?}"))),
                };
                parsed.push((tv, exp as u8));
            }
            out.add_term(Monomial::from_factors(parsed)?, coeff);
        }
        Ok(out)
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_constant() {
                    format_ratio(c)
                } else if c.is_one() {
                    m.to_string()
                } else {
                    format!("{}*{}", format_ratio(c), m)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The twin of a literal's negation: `tr(x) = ~x`, `tr(¬x) = x`. A clause is
/// satisfied exactly when some translated factor reads 0.
pub fn tr_literal(literal: i32) -> TwinVar {
    if literal > 0 {
        TwinVar::barred(literal as u32)
    } else {
        TwinVar::plain((-literal) as u32)
    }
}

/// The product of the translated literals (the empty clause maps to the
/// constant 1, which no assignment zeroes).
pub fn tr_clause(clause: &Clause) -> Polynomial {
    let mut m = Monomial::constant();
    for &l in clause.literals() {
        m = m.times(tr_literal(l)).expect("fresh monomial stays within the cap");
    }
    Polynomial::monomial(m)
}

/// The two axioms of variable `v`: booleanity `x^2 - x` and
/// complementarity `x + ~x - 1`.
pub fn boolean_axioms(v: u32) -> [Polynomial; 2] {
    let x = TwinVar::plain(v);
    let xb = TwinVar::barred(v);
    let x_sq = Monomial::from_factors(vec![(x, 2)]).unwrap();
    let booleanity = Polynomial::from_terms(vec![
        (x_sq, BigRational::one()),
        (Monomial::var(x), -BigRational::one()),
    ]);
    let complementarity = Polynomial::from_terms(vec![
        (Monomial::var(x), BigRational::one()),
        (Monomial::var(xb), BigRational::one()),
        (Monomial::constant(), -BigRational::one()),
    ]);
    [booleanity, complementarity]
}

/// The full translation of a formula: clause polynomials in clause order,
/// then for each variable `1..=n` its booleanity and complementarity axioms.
pub fn tr_cnf(phi: &Cnf) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = phi.clauses().iter().map(tr_clause).collect();
    for v in 1..=phi.variable_count() {
        let [b, c] = boolean_axioms(v);
        out.push(b);
        out.push(c);
    }
    out
}
