//! Matrix semantics: valuations, evaluation, consequence, theoremhood,
//! antitheorems, and (quasi-)equational validity — all by exhaustive sweep
//! over `|A|^n` valuations.
//!
//! Two evaluation routes exist on purpose. [`evaluate`] walks the AST
//! recursively and is the reference semantics; the sweep operations compile
//! each formula once into a flat postfix program ([`CompiledFormula`]) and
//! replay it per valuation. Agreement between the two routes is part of the
//! test suite.
//!
//! Valuations are enumerated in lexicographic base-`|A|` order over the
//! variables in first-occurrence order (first variable most significant),
//! so reported countermodels are deterministic: always the least one.

use std::fmt;

use thiserror::Error;

use crate::algebra::{FiniteAlgebra, Matrix};
use crate::syntax::{variables_of, variables_of_rule, Equation, Formula};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("variable `{0}` has no value in the valuation")]
    UnboundVariable(String),
    #[error("operation `{0}` is not in the algebra's signature")]
    UnknownOperation(String),
    #[error("operation `{op}` applied to {got} arguments, arity is {arity}")]
    ArityMismatch { op: String, got: usize, arity: usize },
    #[error("rule has {count} variables, over the cap of {cap} (raise with --var-cap or MATLOG_VAR_CAP)")]
    VariableCapExceeded { count: usize, cap: usize },
}

/// An assignment of elements to an ordered list of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    pub vars: Vec<String>,
    pub values: Vec<usize>,
}

impl Valuation {
    pub fn new(vars: Vec<String>, values: Vec<usize>) -> Self {
        debug_assert_eq!(vars.len(), values.len());
        Valuation { vars, values }
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name).map(|i| self.values[i])
    }

    /// Decode the lexicographic code of an assignment: first variable in the
    /// most significant position.
    pub fn from_code(vars: &[String], base: usize, code: usize) -> Self {
        let k = vars.len();
        let mut values = vec![0; k];
        let mut c = code;
        for i in (0..k).rev() {
            values[i] = c % base;
            c /= base;
        }
        Valuation { vars: vars.to_vec(), values }
    }

    pub fn describe(&self, algebra: &FiniteAlgebra) -> String {
        self.vars
            .iter()
            .zip(&self.values)
            .map(|(v, &e)| format!("{v}={}", algebra.element_name(e)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// A failed entailment: a valuation designating every premise but not the
/// conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub valuation: Valuation,
    pub premise_values: Vec<usize>,
    pub conclusion_value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntailVerdict {
    Valid,
    Invalid(Countermodel),
}

impl EntailVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, EntailVerdict::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AntitheoremVerdict {
    /// No valuation designates every member of the set.
    Antitheorem,
    /// Some valuation designates all members; the least one is attached.
    Designatable(Valuation),
}

impl AntitheoremVerdict {
    pub fn is_antitheorem(&self) -> bool {
        matches!(self, AntitheoremVerdict::Antitheorem)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqVerdict {
    Valid,
    /// A valuation satisfying every premise equation but not the conclusion.
    Invalid(Valuation),
}

impl EqVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, EqVerdict::Valid)
    }
}

impl fmt::Display for EntailVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntailVerdict::Valid => write!(f, "valid"),
            EntailVerdict::Invalid(_) => write!(f, "invalid"),
        }
    }
}

/// Sweep configuration.
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Reject rules with more distinct variables than this.
    pub var_cap: usize,
    /// Worker threads for the valuation sweep; 1 means sequential.
    pub threads: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { var_cap: 14, threads: 1 }
    }
}

/// Reference semantics: recursive bottom-up table lookup.
pub fn evaluate(
    f: &Formula,
    algebra: &FiniteAlgebra,
    valuation: &Valuation,
) -> Result<usize, SemanticsError> {
    match f {
        Formula::Var(name) => valuation
            .lookup(name)
            .ok_or_else(|| SemanticsError::UnboundVariable(name.clone())),
        Formula::Apply(op, args) => {
            let op_index = algebra
                .signature()
                .index_of(op)
                .ok_or_else(|| SemanticsError::UnknownOperation(op.clone()))?;
            let arity = algebra.signature().ops()[op_index].arity;
            if arity != args.len() {
                return Err(SemanticsError::ArityMismatch {
                    op: op.clone(),
                    got: args.len(),
                    arity,
                });
            }
            let values = args
                .iter()
                .map(|a| evaluate(a, algebra, valuation))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(algebra.apply(op_index, &values))
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    /// Push the value of the variable at this slot.
    Var(u32),
    /// Pop `arity` values, push a table lookup.
    Op { op: u32, arity: u8 },
}

/// A formula compiled to a flat postfix program over one algebra and one
/// variable order.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    program: Vec<Instr>,
}

impl CompiledFormula {
    pub fn compile(
        f: &Formula,
        algebra: &FiniteAlgebra,
        var_order: &[String],
    ) -> Result<Self, SemanticsError> {
        let mut program = Vec::new();
        fn walk(
            f: &Formula,
            algebra: &FiniteAlgebra,
            var_order: &[String],
            program: &mut Vec<Instr>,
        ) -> Result<(), SemanticsError> {
            match f {
                Formula::Var(name) => {
                    let slot = var_order
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| SemanticsError::UnboundVariable(name.clone()))?;
                    program.push(Instr::Var(slot as u32));
                }
                Formula::Apply(op, args) => {
                    let op_index = algebra
                        .signature()
                        .index_of(op)
                        .ok_or_else(|| SemanticsError::UnknownOperation(op.clone()))?;
                    let arity = algebra.signature().ops()[op_index].arity;
                    if arity != args.len() {
                        return Err(SemanticsError::ArityMismatch {
                            op: op.clone(),
                            got: args.len(),
                            arity,
                        });
                    }
                    for a in args {
                        walk(a, algebra, var_order, program)?;
                    }
                    program.push(Instr::Op { op: op_index as u32, arity: arity as u8 });
                }
            }
            Ok(())
        }
        walk(f, algebra, var_order, &mut program)?;
        Ok(CompiledFormula { program })
    }

    /// Replay the program against one assignment. `stack` is reused between
    /// calls to avoid reallocation in the sweep.
    pub fn eval(&self, algebra: &FiniteAlgebra, values: &[usize], stack: &mut Vec<usize>) -> usize {
        let n = algebra.size();
        stack.clear();
        for instr in &self.program {
            match *instr {
                Instr::Var(slot) => stack.push(values[slot as usize]),
                Instr::Op { op, arity } => {
                    let arity = arity as usize;
                    let base = stack.len() - arity;
                    let mut idx = 0;
                    for &v in &stack[base..] {
                        idx = idx * n + v;
                    }
                    stack.truncate(base);
                    stack.push(algebra.table(op as usize)[idx]);
                }
            }
        }
        debug_assert_eq!(stack.len(), 1);
        stack[0]
    }
}

fn check_cap(count: usize, opts: &SweepOptions) -> Result<(), SemanticsError> {
    if count > opts.var_cap {
        return Err(SemanticsError::VariableCapExceeded { count, cap: opts.var_cap });
    }
    Ok(())
}

fn total_codes(base: usize, k: usize) -> usize {
    base.pow(k as u32)
}

/// Scan a code range for the least countermodel.
fn scan_range(
    matrix: &Matrix,
    premises: &[CompiledFormula],
    conclusion: &CompiledFormula,
    k: usize,
    range: std::ops::Range<usize>,
) -> Option<usize> {
    let algebra = &matrix.algebra;
    let n = algebra.size();
    let designated: Vec<bool> =
        (0..n).map(|e| matrix.is_designated(e)).collect();
    let mut values = vec![0usize; k];
    // prime the odometer at the range start
    let mut c = range.start;
    for i in (0..k).rev() {
        values[i] = c % n;
        c /= n;
    }
    let mut stack = Vec::with_capacity(16);
    for code in range {
        let mut all_designated = true;
        for p in premises {
            if !designated[p.eval(algebra, &values, &mut stack)] {
                all_designated = false;
                break;
            }
        }
        if all_designated && !designated[conclusion.eval(algebra, &values, &mut stack)] {
            return Some(code);
        }
        // increment the odometer
        for i in (0..k).rev() {
            values[i] += 1;
            if values[i] < n {
                break;
            }
            values[i] = 0;
        }
    }
    None
}

/// Decide matrix consequence by exhaustive valuation sweep. Returns the
/// enumeration-least countermodel if there is one.
pub fn entails(
    matrix: &Matrix,
    premises: &[Formula],
    conclusion: &Formula,
    opts: &SweepOptions,
) -> Result<EntailVerdict, SemanticsError> {
    let vars = variables_of_rule(premises, conclusion);
    check_cap(vars.len(), opts)?;
    let algebra = &matrix.algebra;
    let compiled_premises = premises
        .iter()
        .map(|p| CompiledFormula::compile(p, algebra, &vars))
        .collect::<Result<Vec<_>, _>>()?;
    let compiled_conclusion = CompiledFormula::compile(conclusion, algebra, &vars)?;
    let total = total_codes(algebra.size(), vars.len());

    let hit = if opts.threads > 1 && total >= 4096 {
        let workers = opts.threads.min(total);
        let chunk = total.div_ceil(workers);
        let k = vars.len();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let start = w * chunk;
                let end = ((w + 1) * chunk).min(total);
                let premises = &compiled_premises;
                let conclusion = &compiled_conclusion;
                handles.push(scope.spawn(move || {
                    scan_range(matrix, premises, conclusion, k, start..end)
                }));
            }
            // least countermodel across chunks keeps the result deterministic
            handles.into_iter().filter_map(|h| h.join().unwrap()).min()
        })
    } else {
        scan_range(matrix, &compiled_premises, &compiled_conclusion, vars.len(), 0..total)
    };

    match hit {
        None => Ok(EntailVerdict::Valid),
        Some(code) => {
            let valuation = Valuation::from_code(&vars, algebra.size(), code);
            let premise_values = premises
                .iter()
                .map(|p| evaluate(p, algebra, &valuation))
                .collect::<Result<Vec<_>, _>>()?;
            let conclusion_value = evaluate(conclusion, algebra, &valuation)?;
            Ok(EntailVerdict::Invalid(Countermodel {
                valuation,
                premise_values,
                conclusion_value,
            }))
        }
    }
}

/// `entails` with no premises.
pub fn is_theorem(
    matrix: &Matrix,
    f: &Formula,
    opts: &SweepOptions,
) -> Result<EntailVerdict, SemanticsError> {
    entails(matrix, &[], f, opts)
}

/// True iff no valuation designates every member of `gamma`. Sound for
/// logics defined by a single characteristic matrix, which is the only kind
/// handled here.
pub fn is_antitheorem(
    matrix: &Matrix,
    gamma: &[Formula],
    opts: &SweepOptions,
) -> Result<AntitheoremVerdict, SemanticsError> {
    let mut vars = Vec::new();
    for f in gamma {
        for v in variables_of(f) {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    check_cap(vars.len(), opts)?;
    let algebra = &matrix.algebra;
    let compiled = gamma
        .iter()
        .map(|f| CompiledFormula::compile(f, algebra, &vars))
        .collect::<Result<Vec<_>, _>>()?;
    let n = algebra.size();
    let total = total_codes(n, vars.len());
    let mut values = vec![0usize; vars.len()];
    let mut stack = Vec::with_capacity(16);
    for code in 0..total {
        let ok = compiled
            .iter()
            .all(|f| matrix.is_designated(f.eval(algebra, &values, &mut stack)));
        if ok {
            return Ok(AntitheoremVerdict::Designatable(Valuation::from_code(&vars, n, code)));
        }
        for i in (0..vars.len()).rev() {
            values[i] += 1;
            if values[i] < n {
                break;
            }
            values[i] = 0;
        }
    }
    Ok(AntitheoremVerdict::Antitheorem)
}

/// Equational (and quasi-equational) consequence over a single algebra:
/// every valuation satisfying all premise equations satisfies the
/// conclusion.
pub fn eq_consequence(
    algebra: &FiniteAlgebra,
    premises: &[Equation],
    conclusion: &Equation,
    opts: &SweepOptions,
) -> Result<EqVerdict, SemanticsError> {
    let mut vars: Vec<String> = Vec::new();
    for eq in premises.iter().chain(std::iter::once(conclusion)) {
        for f in [&eq.left, &eq.right] {
            for v in variables_of(f) {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
    }
    check_cap(vars.len(), opts)?;
    let compile_eq = |eq: &Equation| -> Result<(CompiledFormula, CompiledFormula), SemanticsError> {
        Ok((
            CompiledFormula::compile(&eq.left, algebra, &vars)?,
            CompiledFormula::compile(&eq.right, algebra, &vars)?,
        ))
    };
    let compiled_premises =
        premises.iter().map(compile_eq).collect::<Result<Vec<_>, _>>()?;
    let compiled_conclusion = compile_eq(conclusion)?;
    let n = algebra.size();
    let total = total_codes(n, vars.len());
    let mut values = vec![0usize; vars.len()];
    let mut stack = Vec::with_capacity(16);
    for code in 0..total {
        let premises_hold = compiled_premises.iter().all(|(l, r)| {
            l.eval(algebra, &values, &mut stack) == r.eval(algebra, &values, &mut stack)
        });
        if premises_hold {
            let (l, r) = &compiled_conclusion;
            if l.eval(algebra, &values, &mut stack) != r.eval(algebra, &values, &mut stack) {
                return Ok(EqVerdict::Invalid(Valuation::from_code(&vars, n, code)));
            }
        }
        for i in (0..vars.len()).rev() {
            values[i] += 1;
            if values[i] < n {
                break;
            }
            values[i] = 0;
        }
    }
    Ok(EqVerdict::Valid)
}
