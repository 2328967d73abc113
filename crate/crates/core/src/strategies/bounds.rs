//! Space lower bounds from a verified component budget.
//!
//! A verified budget `μ` yields three bounds, reported as exact rationals:
//! monomial space of any algebraic refutation of the encoded formula is at
//! least `μ/4`; the derived free family at level `μ − 1` forces some
//! resolution memory configuration to hold at least `(μ−1)/2` clauses each
//! of width at least `(μ−1)/2`; hence total space is at least `(μ−1)²/4`.
//! A nonpositive `μ` makes all three vacuous, and the report says so.

use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::cnf::Cnf;
use crate::ratio::{format_ratio, ratio_from_usize};

/// Where the budget came from: a verification run, or an unchecked claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuProvenance {
    Verified,
    Claimed,
}

impl MuProvenance {
    fn label(&self) -> &'static str {
        match self {
            MuProvenance::Verified => "verified",
            MuProvenance::Claimed => "claimed",
        }
    }
}

/// The three space bounds derived from a budget, all exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub variable_count: u32,
    pub clause_count: usize,
    pub mu: BigRational,
    pub provenance: MuProvenance,
    /// `μ ≤ 0`: every bound below is trivially true and useless.
    pub vacuous: bool,
    /// Monomial space ≥ μ/4.
    pub monomial_space: BigRational,
    /// Some configuration holds ≥ (μ−1)/2 clauses of width ≥ (μ−1)/2.
    pub clause_width_threshold: BigRational,
    /// Total space ≥ (μ−1)²/4.
    pub total_space: BigRational,
}

/// Evaluate the three bounds for a formula at budget `mu`.
pub fn lower_bound_report(phi: &Cnf, mu: &BigRational, provenance: MuProvenance) -> BoundReport {
    let four = ratio_from_usize(4);
    let two = ratio_from_usize(2);
    let one = ratio_from_usize(1);
    let r = mu - &one;
    BoundReport {
        variable_count: phi.variable_count(),
        clause_count: phi.clause_count(),
        mu: mu.clone(),
        provenance,
        vacuous: !mu.is_positive(),
        monomial_space: mu / &four,
        clause_width_threshold: &r / &two,
        total_space: &r * &r / &four,
    }
}

impl BoundReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "formula: {} variables, {} clauses\n",
            self.variable_count, self.clause_count
        ));
        out.push_str(&format!(
            "component budget mu = {} ({})\n",
            format_ratio(&self.mu),
            self.provenance.label()
        ));
        if self.vacuous {
            out.push_str(
                "mu <= 0: all bounds below are vacuous; the budget carries no information\n",
            );
        }
        out.push_str(&format!(
            "monomial space >= mu/4 = {}\n  (a budget-mu strategy forces any algebraic \
             refutation of the encoded formula to hold that many distinct monomials)\n",
            format_ratio(&self.monomial_space)
        ));
        out.push_str(&format!(
            "clause/width threshold >= (mu-1)/2 = {}\n  (the level-(mu-1) free family forces \
             some resolution memory configuration to hold at least this many clauses, each at \
             least this wide)\n",
            format_ratio(&self.clause_width_threshold)
        ));
        out.push_str(&format!(
            "total space >= (mu-1)^2/4 = {}\n  (product of the clause and width thresholds)\n",
            format_ratio(&self.total_space)
        ));
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variables": self.variable_count,
            "clauses": self.clause_count,
            "mu": format_ratio(&self.mu),
            "provenance": self.provenance.label(),
            "vacuous": self.vacuous,
            "monomial_space": format_ratio(&self.monomial_space),
            "clause_width_threshold": format_ratio(&self.clause_width_threshold),
            "total_space": format_ratio(&self.total_space),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_ratio;

    fn phi() -> Cnf {
        Cnf::new(3, vec![vec![1, 2, 3]]).unwrap()
    }

    #[test]
    fn budget_eight_gives_the_exact_rational_bounds() {
        let report =
            lower_bound_report(&phi(), &parse_ratio("8").unwrap(), MuProvenance::Verified);
        assert!(!report.vacuous);
        assert_eq!(report.monomial_space, parse_ratio("2").unwrap());
        assert_eq!(report.clause_width_threshold, parse_ratio("7/2").unwrap());
        assert_eq!(report.total_space, parse_ratio("49/4").unwrap());
        let text = report.to_text();
        assert!(text.contains("monomial space >= mu/4 = 2"));
        assert!(text.contains("(mu-1)/2 = 7/2"));
        assert!(text.contains("(mu-1)^2/4 = 49/4"));
        assert!(text.contains("(verified)"));
    }

    #[test]
    fn nonpositive_budgets_are_vacuous() {
        let report = lower_bound_report(
            &phi(),
            &parse_ratio("-191/100").unwrap(),
            MuProvenance::Claimed,
        );
        assert!(report.vacuous);
        assert!(report.to_text().contains("vacuous"));
        assert!(report.to_text().contains("(claimed)"));
        assert_eq!(report.to_json()["vacuous"], json!(true));
    }

    #[test]
    fn json_mirrors_the_exact_values() {
        let report =
            lower_bound_report(&phi(), &parse_ratio("8").unwrap(), MuProvenance::Claimed);
        let value = report.to_json();
        assert_eq!(value["mu"], "8");
        assert_eq!(value["monomial_space"], "2");
        assert_eq!(value["clause_width_threshold"], "7/2");
        assert_eq!(value["total_space"], "49/4");
        assert_eq!(value["provenance"], "claimed");
    }
}
