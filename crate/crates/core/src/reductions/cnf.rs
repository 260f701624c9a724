//! 3-CNF formulas as consumed by the SAT generators.

use std::fmt;

use crate::error::{Error, Result};

/// Largest variable count `solve_brute_force` accepts.
pub const BRUTE_FORCE_VARS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    /// Whether setting the variable to `value` makes this literal true.
    pub fn satisfied_by(&self, value: bool) -> bool {
        value == self.positive
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.satisfied_by(assignment[self.var])
    }

    /// `x_k` is `k+1`, its negation `-(k+1)`.
    pub fn from_dimacs(code: i64) -> Option<Self> {
        let var = usize::try_from(code.unsigned_abs()).ok()?.checked_sub(1)?;
        Some(Literal { var, positive: code > 0 })
    }

    pub fn to_dimacs(&self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "¬")?;
        }
        write!(f, "x{}", self.var)
    }
}

/// A formula over `x_0..x_{n-1}` whose clauses all have exactly three
/// literal slots. Shorter clauses are padded by repeating their last literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: impl IntoIterator<Item = Vec<Literal>>) -> Result<Self> {
        let mut out = Vec::new();
        for (j, clause) in clauses.into_iter().enumerate() {
            let Some(&last) = clause.last() else {
                return Err(Error::Precondition(format!("clause {} is empty", j + 1)));
            };
            if clause.len() > 3 {
                return Err(Error::Precondition(format!(
                    "clause {} has {} literals; at most 3 allowed",
                    j + 1,
                    clause.len()
                )));
            }
            if let Some(l) = clause.iter().find(|l| l.var >= num_vars) {
                return Err(Error::Precondition(format!(
                    "clause {} mentions x{} but the formula has {num_vars} variables",
                    j + 1,
                    l.var
                )));
            }
            out.push([clause[0], *clause.get(1).unwrap_or(&last), last]);
        }
        Ok(CnfFormula { num_vars, clauses: out })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// The same clauses over a larger variable set; the new variables are
    /// unconstrained.
    pub fn with_num_vars(&self, num_vars: usize) -> Self {
        assert!(num_vars >= self.num_vars, "cannot drop variables");
        CnfFormula { num_vars, clauses: self.clauses.clone() }
    }

    pub fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| !c.iter().any(|l| l.eval(assignment)))
    }

    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars && self.first_unsatisfied(assignment).is_none()
    }

    pub fn check_assignment(&self, assignment: &[bool]) -> Result<()> {
        if assignment.len() != self.num_vars {
            return Err(Error::AssignmentLength { expected: self.num_vars, got: assignment.len() });
        }
        match self.first_unsatisfied(assignment) {
            Some(j) => Err(Error::UnsatisfiedClause(j)),
            None => Ok(()),
        }
    }

    /// The first satisfying assignment in binary counting order, `x_0` being
    /// the lowest bit.
    pub fn solve_brute_force(&self) -> Result<Option<Vec<bool>>> {
        if self.num_vars > BRUTE_FORCE_VARS {
            return Err(Error::CapExceeded(format!(
                "{} variables is above the brute-force cap of {BRUTE_FORCE_VARS}",
                self.num_vars
            )));
        }
        let n = self.num_vars;
        Ok((0u64..1 << n)
            .map(|mask| (0..n).map(|k| mask >> k & 1 == 1).collect::<Vec<bool>>())
            .find(|a| self.first_unsatisfied(a).is_none()))
    }
}
