//! Partial and piecewise assignments.

use std::collections::BTreeMap;

use thiserror::Error;

use super::Clause;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignError {
    #[error("variable {0} assigned twice")]
    DuplicateVariable(u32),
    #[error("piece {0} is empty")]
    EmptyPiece(usize),
    #[error("pieces share variable {0}")]
    OverlappingPieces(u32),
}

/// A partial truth assignment: a finite map from variables to booleans.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialAssignment {
    values: BTreeMap<u32, bool>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(u32, bool)]) -> Result<Self, AssignError> {
        let mut values = BTreeMap::new();
        for &(v, b) in pairs {
            if values.insert(v, b).is_some() {
                return Err(AssignError::DuplicateVariable(v));
            }
        }
        Ok(PartialAssignment { values })
    }

    pub fn get(&self, variable: u32) -> Option<bool> {
        self.values.get(&variable).copied()
    }

    pub fn set(&mut self, variable: u32, value: bool) {
        self.values.insert(variable, value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted assigned variables.
    pub fn domain(&self) -> Vec<u32> {
        self.values.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.values.iter().map(|(&v, &b)| (v, b))
    }

    /// Whether the assigned variables are disjoint from `other`'s.
    pub fn disjoint_from(&self, other: &PartialAssignment) -> bool {
        self.values.keys().all(|v| !other.values.contains_key(v))
    }

    /// Union with `other`; `None` on a domain collision (even an agreeing
    /// one — pieces are meant to partition).
    pub fn disjoint_union(&self, other: &PartialAssignment) -> Option<PartialAssignment> {
        if !self.disjoint_from(other) {
            return None;
        }
        let mut values = self.values.clone();
        values.extend(other.values.iter().map(|(&v, &b)| (v, b)));
        Some(PartialAssignment { values })
    }

    /// Whether `self` extends `other` (agrees on all of `other`'s domain).
    pub fn extends(&self, other: &PartialAssignment) -> bool {
        other.iter().all(|(v, b)| self.get(v) == Some(b))
    }

    /// Some literal of the clause is true under this assignment.
    pub fn satisfies_clause(&self, clause: &Clause) -> bool {
        clause.literals().iter().any(|&l| {
            self.get(l.unsigned_abs()).is_some_and(|b| b == (l > 0))
        })
    }

    /// Every literal of the clause is assigned false.
    pub fn falsifies_clause(&self, clause: &Clause) -> bool {
        clause.literals().iter().all(|&l| {
            self.get(l.unsigned_abs()).is_some_and(|b| b != (l > 0))
        })
    }
}

impl std::fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(v, b)| format!("x{v}={}", u8::from(*b)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// An assignment split into pieces with pairwise disjoint, nonempty domains.
/// The piece structure matters: two piecewise assignments with the same
/// union but different splits are different objects. Pieces are kept sorted
/// by their smallest variable, and zero pieces (the empty assignment) is
/// legal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct PiecewiseAssignment {
    pieces: Vec<PartialAssignment>,
}

impl PiecewiseAssignment {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(mut pieces: Vec<PartialAssignment>) -> Result<Self, AssignError> {
        for (i, piece) in pieces.iter().enumerate() {
            if piece.is_empty() {
                return Err(AssignError::EmptyPiece(i));
            }
        }
        let mut seen: BTreeMap<u32, ()> = BTreeMap::new();
        for piece in &pieces {
            for v in piece.domain() {
                if seen.insert(v, ()).is_some() {
                    return Err(AssignError::OverlappingPieces(v));
                }
            }
        }
        pieces.sort_by(|a, b| a.domain().cmp(&b.domain()));
        Ok(PiecewiseAssignment { pieces })
    }

    pub fn pieces(&self) -> &[PartialAssignment] {
        &self.pieces
    }

    /// Number of pieces (the rank `‖·‖`).
    pub fn rank(&self) -> usize {
        self.pieces.len()
    }

    /// The union of all pieces as one flat assignment.
    pub fn combined(&self) -> PartialAssignment {
        let mut out = PartialAssignment::new();
        for piece in &self.pieces {
            for (v, b) in piece.iter() {
                out.set(v, b);
            }
        }
        out
    }

    /// Whether every piece of `self` is a piece of `other`.
    pub fn sub_assignment_of(&self, other: &PiecewiseAssignment) -> bool {
        self.pieces.iter().all(|p| other.pieces.contains(p))
    }

    /// All piecewise assignments formed by subsets of the pieces (including
    /// empty and full), deterministic order.
    pub fn piece_subsets(&self) -> Vec<PiecewiseAssignment> {
        let n = self.pieces.len();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let chosen: Vec<PartialAssignment> = (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| self.pieces[i].clone())
                .collect();
            out.push(PiecewiseAssignment { pieces: chosen });
        }
        out
    }
}

impl std::fmt::Display for PiecewiseAssignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}
