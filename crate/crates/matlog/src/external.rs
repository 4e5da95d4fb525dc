//! Subclassicality checking and the expansion of a matrix with the external
//! operator `delta1`.
//!
//! A three-valued matrix is subclassical when (i) some two-element subset of
//! its universe is closed under `and`/`or`/`neg`, behaves there exactly like
//! the two-element Boolean algebra, and meets the designated set in its top
//! element only; and (ii) `neg` is an involution. The Boolean pair is
//! searched up to isomorphism and the located pair is reported.
//!
//! The expansion `A^e` appends one unary operation: `delta1(a) = 1` when
//! `a` is the located Boolean top, `0` otherwise. The companions `delta0`
//! and `delta_mid` stay derived (`D1 ~x` and `~(D1 x | D1 ~x)`), so the
//! expanded signature is exactly the base signature plus `delta1`.

use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Matrix};
use crate::builtins::{OP_AND, OP_DELTA1, OP_NEG, OP_OR};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExternalError {
    #[error("subclassicality is defined for three-element matrices, got {0} elements")]
    WrongUniverseSize(usize),
    #[error("matrix lacks operation `{0}`")]
    MissingOperation(String),
    #[error("matrix `{0}` is not subclassical: {1}")]
    NotSubclassical(String, String),
    #[error("operation `delta1` already present with a non-canonical table")]
    ConflictingDelta1,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One check of a subclassicality report: verdict plus human-readable
/// witnesses for each failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub pass: bool,
    pub witnesses: Vec<String>,
}

impl CheckOutcome {
    fn pass() -> Self {
        CheckOutcome { pass: true, witnesses: Vec::new() }
    }
    fn fail(witnesses: Vec<String>) -> Self {
        CheckOutcome { pass: false, witnesses }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubclassicalityReport {
    pub matrix_name: String,
    /// Located Boolean pair as (bottom, top) element indices, if any.
    pub boolean_pair: Option<(usize, usize)>,
    /// Check (i): Boolean subreduct with designated trace at the top.
    pub subreduct: CheckOutcome,
    /// Check (ii): double negation is the identity.
    pub involution: CheckOutcome,
    /// Derived fact once the pair is located: the leftover middle element is
    /// a fixpoint of `neg`.
    pub middle_is_neg_fixpoint: Option<bool>,
    pub verdict: bool,
}

impl SubclassicalityReport {
    /// Flat list of everything that went wrong, for anomaly reporting.
    pub fn anomalies(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.subreduct.witnesses.iter().cloned());
        out.extend(self.involution.witnesses.iter().cloned());
        if self.middle_is_neg_fixpoint == Some(false) {
            out.push("middle element is not a negation fixpoint".into());
        }
        out
    }
}

fn required_op(algebra: &FiniteAlgebra, name: &str) -> Result<usize, ExternalError> {
    algebra
        .signature()
        .index_of(name)
        .ok_or_else(|| ExternalError::MissingOperation(name.to_string()))
}

/// Decide whether a three-element matrix is subclassical; the report carries
/// witnesses for every failed sub-check.
pub fn check_subclassical(matrix: &Matrix) -> Result<SubclassicalityReport, ExternalError> {
    let algebra = &matrix.algebra;
    if algebra.size() != 3 {
        return Err(ExternalError::WrongUniverseSize(algebra.size()));
    }
    let and = required_op(algebra, OP_AND)?;
    let or = required_op(algebra, OP_OR)?;
    let neg = required_op(algebra, OP_NEG)?;

    // check (i): search all ordered (bottom, top) pairs
    let mut boolean_pair = None;
    let mut failures = Vec::new();
    'pairs: for zero in 0..3 {
        for one in 0..3 {
            if zero == one {
                continue;
            }
            let name = |e: usize| algebra.element_name(e);
            let inside = |e: usize| e == zero || e == one;
            let mut complaints = Vec::new();
            let expect = |got: usize, want: usize, what: String, complaints: &mut Vec<String>| {
                if got != want {
                    complaints.push(format!("{what} = {}, expected {}", name(got), name(want)));
                }
            };
            for (a, b) in [(zero, zero), (zero, one), (one, zero), (one, one)] {
                let meet = algebra.apply(and, &[a, b]);
                let join = algebra.apply(or, &[a, b]);
                if !inside(meet) || !inside(join) {
                    complaints.push(format!(
                        "{{{},{}}} not closed: {}*{} gives {}",
                        name(zero),
                        name(one),
                        name(a),
                        name(b),
                        name(if inside(meet) { join } else { meet })
                    ));
                    continue;
                }
                let classical_meet = if a == one && b == one { one } else { zero };
                let classical_join = if a == zero && b == zero { zero } else { one };
                expect(meet, classical_meet, format!("and({},{})", name(a), name(b)), &mut complaints);
                expect(join, classical_join, format!("or({},{})", name(a), name(b)), &mut complaints);
            }
            expect(algebra.apply(neg, &[zero]), one, format!("neg({})", name(zero)), &mut complaints);
            expect(algebra.apply(neg, &[one]), zero, format!("neg({})", name(one)), &mut complaints);
            let trace: Vec<usize> =
                [zero, one].into_iter().filter(|e| matrix.is_designated(*e)).collect();
            if trace != [one] {
                complaints.push(format!(
                    "designated trace on {{{},{}}} is {{{}}}, expected {{{}}}",
                    name(zero),
                    name(one),
                    trace.iter().map(|&e| name(e)).collect::<Vec<_>>().join(","),
                    name(one)
                ));
            }
            if complaints.is_empty() {
                boolean_pair = Some((zero, one));
                break 'pairs;
            }
            failures.push(format!(
                "candidate (bottom={}, top={}): {}",
                name(zero),
                name(one),
                complaints.join("; ")
            ));
        }
    }
    let subreduct = match boolean_pair {
        Some(_) => CheckOutcome::pass(),
        None => CheckOutcome::fail(failures),
    };

    // check (ii): neg is an involution
    let mut involution_witnesses = Vec::new();
    for a in 0..3 {
        let nna = algebra.apply(neg, &[algebra.apply(neg, &[a])]);
        if nna != a {
            involution_witnesses.push(format!(
                "neg(neg({})) = {}",
                algebra.element_name(a),
                algebra.element_name(nna)
            ));
        }
    }
    let involution = if involution_witnesses.is_empty() {
        CheckOutcome::pass()
    } else {
        CheckOutcome::fail(involution_witnesses)
    };

    let middle_is_neg_fixpoint = boolean_pair.map(|(zero, one)| {
        let middle = (0..3).find(|&e| e != zero && e != one).unwrap();
        algebra.apply(neg, &[middle]) == middle
    });

    let verdict = subreduct.pass && involution.pass;
    Ok(SubclassicalityReport {
        matrix_name: matrix.algebra.name.clone(),
        boolean_pair,
        subreduct,
        involution,
        middle_is_neg_fixpoint,
        verdict,
    })
}

/// A subclassical matrix together with its `delta1` expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalAlgebra {
    base: Matrix,
    expanded: FiniteAlgebra,
    zero: usize,
    one: usize,
    middle: usize,
}

impl ExternalAlgebra {
    /// The expanded algebra, signature = base signature plus `delta1`.
    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.expanded
    }

    pub fn base(&self) -> &Matrix {
        &self.base
    }

    /// The expanded matrix: same designated set as the base.
    pub fn matrix(&self) -> Matrix {
        Matrix::new(self.expanded.clone(), self.base.designated().clone()).unwrap()
    }

    /// The expanded matrix with an explicit designated set over the same
    /// algebra (for the `{1}` / `{1,n}` pairs).
    pub fn matrix_with_designated(&self, designated: &[usize]) -> Matrix {
        Matrix::new(self.expanded.clone(), designated.iter().copied().collect()).unwrap()
    }

    pub fn bottom(&self) -> usize {
        self.zero
    }

    pub fn top(&self) -> usize {
        self.one
    }

    pub fn middle(&self) -> usize {
        self.middle
    }

    pub fn delta1(&self, a: usize) -> usize {
        if a == self.one {
            self.one
        } else {
            self.zero
        }
    }

    pub fn delta0(&self, a: usize) -> usize {
        let neg = self.expanded.signature().index_of(OP_NEG).unwrap();
        self.delta1(self.expanded.apply(neg, &[a]))
    }

    pub fn delta_mid(&self, a: usize) -> usize {
        let neg = self.expanded.signature().index_of(OP_NEG).unwrap();
        let or = self.expanded.signature().index_of(OP_OR).unwrap();
        let na = self.expanded.apply(neg, &[a]);
        let joined = self.expanded.apply(or, &[self.delta1(a), self.delta1(na)]);
        self.expanded.apply(neg, &[joined])
    }

    /// The Boolean-valued derived implication
    /// `D0 a | (Dm a & (Dm b | D1 b)) | (D1 a & D1 b)`.
    pub fn derived_imp(&self, a: usize, b: usize) -> usize {
        let and = self.expanded.signature().index_of(OP_AND).unwrap();
        let or = self.expanded.signature().index_of(OP_OR).unwrap();
        let d0a = self.delta0(a);
        let middle_clause = self.expanded.apply(
            and,
            &[self.delta_mid(a), self.expanded.apply(or, &[self.delta_mid(b), self.delta1(b)])],
        );
        let top_clause = self.expanded.apply(and, &[self.delta1(a), self.delta1(b)]);
        self.expanded
            .apply(or, &[self.expanded.apply(or, &[d0a, middle_clause]), top_clause])
    }
}

/// Expand a subclassical matrix with `delta1`. Rejects non-subclassical
/// inputs; applied to an already-expanded matrix it is the identity.
pub fn build_external(matrix: &Matrix) -> Result<ExternalAlgebra, ExternalError> {
    let report = check_subclassical(&strip_delta1(matrix)?)?;
    if !report.verdict {
        return Err(ExternalError::NotSubclassical(
            matrix.algebra.name.clone(),
            report.anomalies().join("; "),
        ));
    }
    let (zero, one) = report.boolean_pair.expect("verdict implies a located pair");
    let middle = (0..3).find(|&e| e != zero && e != one).unwrap();
    let table: Vec<usize> = (0..3).map(|a| if a == one { one } else { zero }).collect();

    if let Some(existing) = matrix.algebra.signature().index_of(OP_DELTA1) {
        if matrix.algebra.table(existing) != table.as_slice() {
            return Err(ExternalError::ConflictingDelta1);
        }
        return Ok(ExternalAlgebra { base: matrix.clone(), expanded: matrix.algebra.clone(), zero, one, middle });
    }

    let mut expanded = matrix.algebra.expand_with_unary(OP_DELTA1, table)?;
    expanded.name = format!("{}e", matrix.algebra.name);
    Ok(ExternalAlgebra { base: matrix.clone(), expanded, zero, one, middle })
}

/// View of the matrix without `delta1`, for re-running the subclassicality
/// check on already-expanded inputs.
fn strip_delta1(matrix: &Matrix) -> Result<Matrix, ExternalError> {
    if matrix.algebra.signature().index_of(OP_DELTA1).is_none() {
        return Ok(matrix.clone());
    }
    let keep: Vec<&str> = matrix
        .algebra
        .signature()
        .ops()
        .iter()
        .map(|o| o.name.as_str())
        .filter(|n| *n != OP_DELTA1)
        .collect();
    let reduct = matrix.algebra.reduct(&keep)?;
    Ok(Matrix::new(reduct, matrix.designated().clone())?)
}
