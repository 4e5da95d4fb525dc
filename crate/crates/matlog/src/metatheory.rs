//! Metatheory verifiers: classical recapture, algebraizability witnesses,
//! deduction-theorem witnesses, deductive equivalence of the `{1}` /
//! `{1,n}` pairs, clone generation, and term equivalence.
//!
//! The universally quantified statements (over all premise sets and
//! formulas) are not finitely enumerable, so each verifier has two stages:
//! a pointwise stage that checks the defining condition exhaustively over
//! the three-element universe, and a corpus stage that cross-checks the
//! lifted statement on a deterministic formula corpus, with both sides of
//! every instance decided by brute force.

use serde::Deserialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, Matrix};
use crate::builtins;
use crate::external::{ExternalAlgebra, ExternalError};
use crate::semantics::{
    entails, eq_consequence, evaluate, EntailVerdict, SemanticsError, SweepOptions, Valuation,
};
use crate::syntax::{
    self, and, delta1, delta_mid, derived_imp, enumerate_formulas, neg, or, substitute, var,
    variables_of, Equation, Formula, ParseContext, ParseError, Rule, Substitution,
};

#[derive(Debug, Error)]
pub enum MetatheoryError {
    #[error("rule `{0}` is not classically valid; recapture applies to classically valid rules")]
    NotClassicallyValid(String),
    #[error("malformed transformer: {0}")]
    MalformedTransformer(String),
    #[error("deduction witness must have exactly the free variables x, y; got {0:?}")]
    BadDdtVariables(Vec<String>),
    #[error("matrices are over different algebras")]
    MismatchedBases,
    #[error("universes differ; term equivalence needs a shared universe")]
    UniverseMismatch,
    #[error("clone generation supports universes up to 4 elements, got {0}")]
    UniverseTooLarge(usize),
    #[error("clone generation supports arity up to 2; `{0}` exceeds it")]
    ArityTooHigh(String),
    #[error("malformed rule corpus: {0}")]
    CorpusFile(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    External(#[from] ExternalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

fn opts() -> SweepOptions {
    SweepOptions::default()
}

// ---------------------------------------------------------------------------
// transformers (algebraizability witnesses)
// ---------------------------------------------------------------------------

/// Formula-to-equations and equation-to-formulas maps over the placeholders
/// `x` (tau) and `x`, `y` (rho).
#[derive(Debug, Clone)]
pub struct Transformer {
    pub name: String,
    pub tau: Vec<Equation>,
    pub rho: Vec<Formula>,
}

impl Transformer {
    /// `tau(phi) = { phi = phi -> phi }` for `{1}`-designated matrices,
    /// with the Boolean-valued derived implication.
    pub fn tau_one() -> Self {
        let x = var("x");
        Transformer {
            name: "tau1".into(),
            tau: vec![Equation::new(x.clone(), derived_imp(x.clone(), x.clone()))],
            rho: Self::standard_rho(),
        }
    }

    /// For `{1,n}`-designated matrices. The textbook form sets
    /// `D1 phi | Dm phi` equal to a constant top, but the language has no
    /// constants; `psi = psi | ~psi` over the Boolean-valued
    /// `psi = D1 phi | Dm phi` is equivalent (checked exhaustively in the
    /// external module tests).
    pub fn tau_half() -> Self {
        let psi = or(delta1(var("x")), delta_mid(var("x")));
        Transformer {
            name: "tau-half".into(),
            tau: vec![Equation::new(psi.clone(), or(psi.clone(), neg(psi)))],
            rho: Self::standard_rho(),
        }
    }

    fn standard_rho() -> Vec<Formula> {
        vec![derived_imp(var("x"), var("y")), derived_imp(var("y"), var("x"))]
    }

    /// Pick the transformer matching the matrix's designated set.
    pub fn for_matrix(matrix: &Matrix, ext: &ExternalAlgebra) -> Self {
        if matrix.designated().len() == 1 && matrix.is_designated(ext.top()) {
            Transformer::tau_one()
        } else {
            Transformer::tau_half()
        }
    }

    pub fn tau_at(&self, f: &Formula) -> Vec<Equation> {
        let s = Substitution::new(vec![("x", f.clone())]);
        self.tau
            .iter()
            .map(|eq| Equation::new(substitute(&eq.left, &s), substitute(&eq.right, &s)))
            .collect()
    }

    pub fn rho_at(&self, left: &Formula, right: &Formula) -> Vec<Formula> {
        let s = Substitution::new(vec![("x", left.clone()), ("y", right.clone())]);
        self.rho.iter().map(|f| substitute(f, &s)).collect()
    }

    fn validate(&self) -> Result<(), MetatheoryError> {
        if self.tau.is_empty() || self.rho.is_empty() {
            return Err(MetatheoryError::MalformedTransformer(
                "tau and rho must be non-empty".into(),
            ));
        }
        for eq in &self.tau {
            for side in [&eq.left, &eq.right] {
                if variables_of(side).iter().any(|v| v != "x") {
                    return Err(MetatheoryError::MalformedTransformer(
                        "tau may only use the placeholder x".into(),
                    ));
                }
            }
        }
        for f in &self.rho {
            if variables_of(f).iter().any(|v| v != "x" && v != "y") {
                return Err(MetatheoryError::MalformedTransformer(
                    "rho may only use the placeholders x, y".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One pointwise stage of a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointwiseCheck {
    pub pass: bool,
    pub witnesses: Vec<String>,
}

impl PointwiseCheck {
    fn from_witnesses(witnesses: Vec<String>) -> Self {
        PointwiseCheck { pass: witnesses.is_empty(), witnesses }
    }
}

/// Corpus stage outcome: instance count plus any disagreeing instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusCheck {
    pub instances: usize,
    pub discrepancies: Vec<String>,
}

impl CorpusCheck {
    pub fn pass(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct AlgebraizabilityReport {
    pub transformer: String,
    /// (a) membership in the designated set matches tau.
    pub truth: PointwiseCheck,
    /// (b) element equality matches designation of rho.
    pub equality: PointwiseCheck,
    /// (c) element equality matches tau(rho(x = y)).
    pub tau_rho: PointwiseCheck,
    /// (d) brute-force cross-check of the consequence interpretation.
    pub corpus: CorpusCheck,
}

impl AlgebraizabilityReport {
    pub fn pass(&self) -> bool {
        self.truth.pass && self.equality.pass && self.tau_rho.pass && self.corpus.pass()
    }
}

fn eval_at(
    algebra: &FiniteAlgebra,
    f: &Formula,
    assignment: &[(&str, usize)],
) -> Result<usize, SemanticsError> {
    let valuation = Valuation::new(
        assignment.iter().map(|(v, _)| v.to_string()).collect(),
        assignment.iter().map(|&(_, e)| e).collect(),
    );
    evaluate(f, algebra, &valuation)
}

fn equation_holds_at(
    algebra: &FiniteAlgebra,
    eq: &Equation,
    assignment: &[(&str, usize)],
) -> Result<bool, SemanticsError> {
    Ok(eval_at(algebra, &eq.left, assignment)? == eval_at(algebra, &eq.right, assignment)?)
}

/// Verify algebraizability witnesses pointwise and over a rule corpus.
pub fn check_alg_witnesses(
    matrix: &Matrix,
    transformer: &Transformer,
    corpus: &CorpusOptions,
) -> Result<AlgebraizabilityReport, MetatheoryError> {
    transformer.validate()?;
    let algebra = &matrix.algebra;
    let n = algebra.size();

    // (a) truth: a in F iff tau holds at a
    let mut truth = Vec::new();
    for a in 0..n {
        let mut holds = true;
        for eq in transformer.tau_at(&var("x")) {
            holds &= equation_holds_at(algebra, &eq, &[("x", a)])?;
        }
        if holds != matrix.is_designated(a) {
            truth.push(format!(
                "element {}: tau holds = {holds}, designated = {}",
                algebra.element_name(a),
                matrix.is_designated(a)
            ));
        }
    }

    // (b) equality: a = b iff rho designated at (a, b)
    let mut equality = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut designated = true;
            for f in transformer.rho_at(&var("x"), &var("y")) {
                designated &= matrix.is_designated(eval_at(algebra, &f, &[("x", a), ("y", b)])?);
            }
            if designated != (a == b) {
                equality.push(format!(
                    "pair ({},{}): rho designated = {designated}",
                    algebra.element_name(a),
                    algebra.element_name(b)
                ));
            }
        }
    }

    // (c) a = b iff tau(rho(x = y)) holds at (a, b)
    let mut tau_rho = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut holds = true;
            for chi in transformer.rho_at(&var("x"), &var("y")) {
                for eq in transformer.tau_at(&chi) {
                    holds &= equation_holds_at(algebra, &eq, &[("x", a), ("y", b)])?;
                }
            }
            if holds != (a == b) {
                tau_rho.push(format!(
                    "pair ({},{}): tau-rho holds = {holds}",
                    algebra.element_name(a),
                    algebra.element_name(b)
                ));
            }
        }
    }

    // (d) corpus: consequence matches equational consequence of the images
    let rules = rule_corpus(algebra.signature(), corpus);
    let mut discrepancies = Vec::new();
    for rule in &rules {
        let lhs = entails(matrix, &rule.premises, &rule.conclusion, &opts())?.is_valid();
        let premises: Vec<Equation> =
            rule.premises.iter().flat_map(|p| transformer.tau_at(p)).collect();
        let mut rhs = true;
        for eq in transformer.tau_at(&rule.conclusion) {
            rhs &= eq_consequence(algebra, &premises, &eq, &opts())?.is_valid();
        }
        if lhs != rhs {
            discrepancies.push(format!("{rule}: consequence {lhs}, equational image {rhs}"));
        }
    }

    Ok(AlgebraizabilityReport {
        transformer: transformer.name.clone(),
        truth: PointwiseCheck::from_witnesses(truth),
        equality: PointwiseCheck::from_witnesses(equality),
        tau_rho: PointwiseCheck::from_witnesses(tau_rho),
        corpus: CorpusCheck { instances: rules.len(), discrepancies },
    })
}

// ---------------------------------------------------------------------------
// deduction-theorem witnesses
// ---------------------------------------------------------------------------

/// A finite set of two-variable formulas internalizing entailment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdtSet {
    pub name: String,
    pub formulas: Vec<Formula>,
}

impl DdtSet {
    pub fn new(name: &str, formulas: Vec<Formula>) -> Result<Self, MetatheoryError> {
        for f in &formulas {
            let vars = variables_of(f);
            let mut sorted = vars.clone();
            sorted.sort();
            if sorted != ["x", "y"] {
                return Err(MetatheoryError::BadDdtVariables(vars));
            }
        }
        Ok(DdtSet { name: name.to_string(), formulas })
    }

    /// `~D1 x | D1 y`, the witness for `{1}`-designated external matrices.
    pub fn arrow_one() -> Self {
        DdtSet::new("to1", vec![or(neg(delta1(var("x"))), delta1(var("y")))]).unwrap()
    }

    /// `~(D1 x | Dm x) | (D1 y | Dm y)` for `{1,n}`-designated ones.
    pub fn arrow_half() -> Self {
        DdtSet::new(
            "to-half",
            vec![or(
                neg(or(delta1(var("x")), delta_mid(var("x")))),
                or(delta1(var("y")), delta_mid(var("y"))),
            )],
        )
        .unwrap()
    }

    pub fn at(&self, phi: &Formula, psi: &Formula) -> Vec<Formula> {
        let s = Substitution::new(vec![("x", phi.clone()), ("y", psi.clone())]);
        self.formulas.iter().map(|f| substitute(f, &s)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct DdtReport {
    pub witness: String,
    /// For all pairs (a,b): the witness set is designated at (a,b) exactly
    /// when designation of a implies designation of b.
    pub pointwise: PointwiseCheck,
    /// Sampled deduction-theorem instances, both sides brute-forced.
    pub corpus: CorpusCheck,
}

impl DdtReport {
    pub fn pass(&self) -> bool {
        self.pointwise.pass && self.corpus.pass()
    }
}

pub fn check_ddt_witness(
    matrix: &Matrix,
    ddt: &DdtSet,
    corpus: &CorpusOptions,
) -> Result<DdtReport, MetatheoryError> {
    let algebra = &matrix.algebra;
    let n = algebra.size();
    let mut pointwise = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut designated = true;
            for f in ddt.at(&var("x"), &var("y")) {
                designated &= matrix.is_designated(eval_at(algebra, &f, &[("x", a), ("y", b)])?);
            }
            let implication = !matrix.is_designated(a) || matrix.is_designated(b);
            if designated != implication {
                pointwise.push(format!(
                    "pair ({},{}): witness designated = {designated}, implication = {implication}",
                    algebra.element_name(a),
                    algebra.element_name(b)
                ));
            }
        }
    }

    // corpus: Gamma, phi |- psi iff Gamma |- I(phi, psi)
    let formulas = formula_corpus(algebra.signature(), corpus);
    let mut rng = ChaCha8Rng::seed_from_u64(corpus.seed ^ 0x0ddc_0de5);
    let mut discrepancies = Vec::new();
    let mut instances = 0;
    for _ in 0..corpus.rule_budget {
        let gamma_len = rng.gen_range(0..=corpus.max_premises);
        let gamma: Vec<Formula> =
            (0..gamma_len).map(|_| formulas[rng.gen_range(0..formulas.len())].clone()).collect();
        let phi = formulas[rng.gen_range(0..formulas.len())].clone();
        let psi = formulas[rng.gen_range(0..formulas.len())].clone();
        let mut with_phi = gamma.clone();
        with_phi.push(phi.clone());
        let lhs = entails(matrix, &with_phi, &psi, &opts())?.is_valid();
        let mut rhs = true;
        for i in ddt.at(&phi, &psi) {
            rhs &= entails(matrix, &gamma, &i, &opts())?.is_valid();
        }
        instances += 1;
        if lhs != rhs {
            discrepancies.push(format!(
                "Gamma={:?}, phi={phi}, psi={psi}: direct {lhs}, internalized {rhs}",
                gamma.iter().map(|f| f.to_string()).collect::<Vec<_>>()
            ));
        }
    }

    Ok(DdtReport {
        witness: ddt.name.clone(),
        pointwise: PointwiseCheck::from_witnesses(pointwise),
        corpus: CorpusCheck { instances, discrepancies },
    })
}

// ---------------------------------------------------------------------------
// deductive equivalence of the {1} / {1,n} pair
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DedeqReport {
    /// For all a: a is designated in the `{1,n}` matrix iff
    /// `D1(D1 a | Dm a)` is the top element.
    pub interpretation_pointwise: PointwiseCheck,
    /// Corpus of De-style instances: `Gamma |- phi` in the `{1}` logic iff
    /// `D1 Gamma |- D1 phi` in the `{1,n}` logic.
    pub transfer_corpus: CorpusCheck,
}

impl DedeqReport {
    pub fn pass(&self) -> bool {
        self.interpretation_pointwise.pass && self.transfer_corpus.pass()
    }
}

pub fn check_dedeq(
    ext: &ExternalAlgebra,
    corpus: &CorpusOptions,
) -> Result<DedeqReport, MetatheoryError> {
    let algebra = ext.algebra();
    let m_one = ext.matrix_with_designated(&[ext.top()]);
    let m_half = ext.matrix_with_designated(&[ext.top(), ext.middle()]);

    // pointwise: a in {1, n} iff D1(D1 a | Dm a) = 1
    let mut pointwise = Vec::new();
    for a in 0..algebra.size() {
        let inner = algebra.apply_named(builtins::OP_OR, &[ext.delta1(a), ext.delta_mid(a)]).unwrap();
        let value = ext.delta1(inner);
        let lhs = m_half.is_designated(a);
        if lhs != (value == ext.top()) {
            pointwise.push(format!(
                "element {}: designated = {lhs}, D1(D1 a | Dm a) = {}",
                algebra.element_name(a),
                algebra.element_name(value)
            ));
        }
    }

    // corpus: Gamma |- phi in L1 iff D1 Gamma |- D1 phi in L-half
    let rules = rule_corpus(algebra.signature(), corpus);
    let mut discrepancies = Vec::new();
    for rule in &rules {
        let lhs = entails(&m_one, &rule.premises, &rule.conclusion, &opts())?.is_valid();
        let image_premises: Vec<Formula> =
            rule.premises.iter().map(|p| delta1(p.clone())).collect();
        let image_conclusion = delta1(rule.conclusion.clone());
        let rhs = entails(&m_half, &image_premises, &image_conclusion, &opts())?.is_valid();
        if lhs != rhs {
            discrepancies.push(format!("{rule}: direct {lhs}, image {rhs}"));
        }
    }

    Ok(DedeqReport {
        interpretation_pointwise: PointwiseCheck::from_witnesses(pointwise),
        transfer_corpus: CorpusCheck { instances: rules.len(), discrepancies },
    })
}

// ---------------------------------------------------------------------------
// classical recapture
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RecaptureReport {
    pub original: Rule,
    pub substituted: Rule,
    /// By the recapture property this must be valid; an invalid outcome is
    /// a soundness bug and carries the countermodel.
    pub verdict: EntailVerdict,
}

/// Substitute every variable by its `delta1` image and check the rule in
/// the external matrix. The input must be classically valid (checked
/// against the two-element matrix first).
pub fn recapture(rule: &Rule, ext: &ExternalAlgebra) -> Result<RecaptureReport, MetatheoryError> {
    let classical = builtins::builtin_matrix("CL", builtins::Variant::AsPrinted).unwrap();
    if !entails(&classical, &rule.premises, &rule.conclusion, &opts())?.is_valid() {
        return Err(MetatheoryError::NotClassicallyValid(rule.to_string()));
    }
    let vars = syntax::variables_of_rule(&rule.premises, &rule.conclusion);
    let s = Substitution::new(
        vars.iter().map(|v| (v.as_str(), delta1(var(v)))).collect::<Vec<_>>(),
    );
    let substituted = Rule {
        premises: rule.premises.iter().map(|p| substitute(p, &s)).collect(),
        conclusion: substitute(&rule.conclusion, &s),
    };
    let verdict = entails(&ext.matrix(), &substituted.premises, &substituted.conclusion, &opts())?;
    Ok(RecaptureReport { original: rule.clone(), substituted, verdict })
}

#[derive(Debug, Clone, Deserialize)]
struct RuleFile {
    name: String,
    premises: Vec<String>,
    conclusion: String,
}

/// A named classical rule from the versioned corpus file.
#[derive(Debug, Clone)]
pub struct NamedRule {
    pub name: String,
    pub rule: Rule,
}

/// The fixed classical-rule corpus (20 rules over `and`, `or`, `neg`).
pub fn classical_rule_corpus() -> Result<Vec<NamedRule>, MetatheoryError> {
    let text = include_str!("../data/classical_rules.json");
    let files: Vec<RuleFile> =
        serde_json::from_str(text).map_err(|e| MetatheoryError::CorpusFile(e.to_string()))?;
    let b2 = builtins::b2();
    let ctx = ParseContext::new(b2.signature());
    let mut out = Vec::new();
    for f in files {
        let premises = f
            .premises
            .iter()
            .map(|p| syntax::parse(p, &ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let conclusion = syntax::parse(&f.conclusion, &ctx)?;
        out.push(NamedRule { name: f.name, rule: Rule { premises, conclusion } });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// formula and rule corpora
// ---------------------------------------------------------------------------

/// Bounds for the deterministic corpus stages.
#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub max_depth: usize,
    pub variables: Vec<String>,
    /// How many formulas to take from the front of the canonical
    /// enumeration.
    pub canonical_take: usize,
    /// How many extra formulas to generate pseudo-randomly (fixed seed).
    pub random_sample: usize,
    pub max_premises: usize,
    pub rule_budget: usize,
    pub seed: u64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            max_depth: 3,
            variables: vec!["p".into(), "q".into(), "r".into()],
            canonical_take: 24,
            random_sample: 36,
            max_premises: 2,
            rule_budget: 600,
            seed: 0x3a17,
        }
    }
}

/// Deterministic formula corpus: a canonical prefix of the depth-bounded
/// enumeration plus seeded random formulas, deduplicated.
pub fn formula_corpus(
    signature: &crate::algebra::Signature,
    options: &CorpusOptions,
) -> Vec<Formula> {
    let vars: Vec<&str> = options.variables.iter().map(String::as_str).collect();
    let mut out: Vec<Formula> =
        enumerate_formulas(signature, &vars, options.max_depth.min(2))
            .take(options.canonical_take)
            .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let ops: Vec<(String, usize)> =
        signature.ops().iter().map(|o| (o.name.clone(), o.arity)).collect();
    while out.len() < options.canonical_take + options.random_sample {
        let f = random_formula(&mut rng, &ops, &vars, options.max_depth);
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

fn random_formula(
    rng: &mut ChaCha8Rng,
    ops: &[(String, usize)],
    vars: &[&str],
    depth: usize,
) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return var(vars[rng.gen_range(0..vars.len())]);
    }
    let (name, arity) = &ops[rng.gen_range(0..ops.len())];
    let args = (0..*arity).map(|_| random_formula(rng, ops, vars, depth - 1)).collect();
    Formula::Apply(name.clone(), args)
}

/// Deterministic rule corpus over the formula corpus: all premise counts up
/// to the bound, instances drawn with a fixed seed.
pub fn rule_corpus(
    signature: &crate::algebra::Signature,
    options: &CorpusOptions,
) -> Vec<Rule> {
    let formulas = formula_corpus(signature, options);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(1));
    let mut out = Vec::with_capacity(options.rule_budget);
    for i in 0..options.rule_budget {
        let premise_count = i % (options.max_premises + 1);
        let premises: Vec<Formula> = (0..premise_count)
            .map(|_| formulas[rng.gen_range(0..formulas.len())].clone())
            .collect();
        let conclusion = formulas[rng.gen_range(0..formulas.len())].clone();
        out.push(Rule { premises, conclusion });
    }
    out
}

// ---------------------------------------------------------------------------
// clone generation and term equivalence
// ---------------------------------------------------------------------------

/// A term-definable operation table with a minimal-depth witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneEntry {
    /// Flat table: length `n` for unary, `n*n` row-major for binary.
    pub table: Vec<usize>,
    pub witness: Formula,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct CloneResult {
    /// Whether the saturation reached a fixpoint within the round cap.
    pub complete: bool,
    pub rounds: usize,
    pub unary: Vec<CloneEntry>,
    pub binary: Vec<CloneEntry>,
}

impl CloneResult {
    pub fn find_unary(&self, table: &[usize]) -> Option<&CloneEntry> {
        self.unary.iter().find(|e| e.table == table)
    }
    pub fn find_binary(&self, table: &[usize]) -> Option<&CloneEntry> {
        self.binary.iter().find(|e| e.table == table)
    }
}

/// Saturate the term operations of arity up to `max_arity` (1 or 2) by
/// composing basic operations over the projections, keeping a minimal-depth
/// witness per table. `cap` bounds the number of rounds; hitting it is
/// reported as an incomplete (partial) result.
///
/// Worklist saturation: a round only composes argument tuples touching at
/// least one table discovered in the previous round, so the total work is
/// on the order of (final clone size)^arity per basic operation. Universe
/// entries fit in 2 bits, so tables pack into `u64` keys.
pub fn generate_clone(
    algebra: &FiniteAlgebra,
    max_arity: usize,
    cap: usize,
) -> Result<CloneResult, MetatheoryError> {
    let n = algebra.size();
    if n > 4 {
        return Err(MetatheoryError::UniverseTooLarge(n));
    }
    if max_arity == 0 || max_arity > 2 {
        return Err(MetatheoryError::ArityTooHigh(format!("max_arity {max_arity}")));
    }
    for op in algebra.signature().ops() {
        if op.arity > 2 {
            return Err(MetatheoryError::ArityTooHigh(op.name.clone()));
        }
    }

    if max_arity == 1 {
        let seeds = vec![CloneEntry { table: (0..n).collect(), witness: var("x"), depth: 0 }];
        let (unary, rounds, complete) = saturate(algebra, n, seeds, cap);
        return Ok(CloneResult { complete, rounds, unary, binary: Vec::new() });
    }

    // binary-table space over the pair (x, y); the unary part consists of
    // the diagonals (the diagonal of any term is the term with y renamed
    // to x, and every one-variable term is its own diagonal)
    let project = |which: usize| -> Vec<usize> {
        (0..n * n).map(|idx| if which == 0 { idx / n } else { idx % n }).collect()
    };
    let seeds = vec![
        CloneEntry { table: project(0), witness: var("x"), depth: 0 },
        CloneEntry { table: project(1), witness: var("y"), depth: 0 },
    ];
    let (tables, rounds, complete) = saturate(algebra, n * n, seeds, cap);

    // unary part: diagonals, in discovery order so the first (lowest-depth)
    // witness wins
    let rename = Substitution::new(vec![("y", var("x"))]);
    let mut seen_unary = std::collections::HashSet::new();
    let mut unary: Vec<CloneEntry> = Vec::new();
    for entry in &tables {
        let diag: Vec<usize> = (0..n).map(|a| entry.table[a * n + a]).collect();
        if seen_unary.insert(pack(&diag)) {
            unary.push(CloneEntry {
                table: diag,
                witness: substitute(&entry.witness, &rename),
                depth: entry.depth,
            });
        }
    }

    Ok(CloneResult { complete, rounds, unary, binary: tables })
}

fn pack(table: &[usize]) -> u64 {
    table.iter().fold(0u64, |acc, &v| (acc << 2) | v as u64)
}

/// Close a seed set of tables (over a fixed tuple domain of `domain_size`
/// entries) under composition with the algebra's basic operations.
fn saturate(
    algebra: &FiniteAlgebra,
    domain_size: usize,
    seeds: Vec<CloneEntry>,
    cap: usize,
) -> (Vec<CloneEntry>, usize, bool) {
    let mut tables = seeds;
    let mut seen: std::collections::HashSet<u64> =
        tables.iter().map(|e| pack(&e.table)).collect();
    let ops: Vec<(usize, String, usize)> = algebra
        .signature()
        .ops()
        .iter()
        .enumerate()
        .map(|(i, o)| (i, o.name.clone(), o.arity))
        .collect();
    let mut rounds = 0;
    let mut complete = false;
    let mut prev_start = 0;
    let mut scratch = vec![0usize; domain_size];
    while rounds < cap {
        rounds += 1;
        let snapshot = tables.len();
        for &(op_index, ref op_name, k) in &ops {
            let mut idx = vec![0usize; k];
            loop {
                if idx.iter().any(|&i| i >= prev_start) {
                    match k {
                        1 => {
                            let t0 = &tables[idx[0]].table;
                            let table = algebra.table(op_index);
                            for (slot, &a) in scratch.iter_mut().zip(t0.iter()) {
                                *slot = table[a];
                            }
                        }
                        2 => {
                            let t0 = &tables[idx[0]].table;
                            let t1 = &tables[idx[1]].table;
                            let table = algebra.table(op_index);
                            let n = algebra.size();
                            for (slot, (&a, &b)) in
                                scratch.iter_mut().zip(t0.iter().zip(t1.iter()))
                            {
                                *slot = table[a * n + b];
                            }
                        }
                        _ => unreachable!("arity checked above"),
                    }
                    if seen.insert(pack(&scratch)) {
                        let witness = Formula::Apply(
                            op_name.clone(),
                            idx.iter().map(|&i| tables[i].witness.clone()).collect(),
                        );
                        tables.push(CloneEntry {
                            table: scratch.clone(),
                            witness,
                            depth: rounds,
                        });
                    }
                }
                let mut j = k;
                loop {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < snapshot {
                        break;
                    }
                    idx[j] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        if tables.len() == snapshot {
            complete = true;
            break;
        }
        prev_start = snapshot;
    }
    (tables, rounds, complete)
}

#[derive(Debug, Clone)]
pub struct TermEquivalenceReport {
    pub equivalent: bool,
    /// Definitions of the right algebra's basic operations as terms of the
    /// left one.
    pub left_defines_right: Vec<(String, Formula)>,
    pub right_defines_left: Vec<(String, Formula)>,
    /// For a NO: which operations are undefinable, with a reason when one
    /// is detectable (a diagonal constant every term preserves).
    pub missing: Vec<(String, String)>,
}

/// Mutual term-definability of two algebras over the same universe.
pub fn term_equivalent(
    left: &FiniteAlgebra,
    right: &FiniteAlgebra,
    cap: usize,
) -> Result<TermEquivalenceReport, MetatheoryError> {
    if left.universe() != right.universe() {
        return Err(MetatheoryError::UniverseMismatch);
    }
    let clone_left = generate_clone(left, 2, cap)?;
    let clone_right = generate_clone(right, 2, cap)?;

    let mut missing = Vec::new();
    let mut define = |source: &FiniteAlgebra,
                      source_clone: &CloneResult,
                      target: &FiniteAlgebra,
                      missing: &mut Vec<(String, String)>|
     -> Vec<(String, Formula)> {
        let mut out = Vec::new();
        for (i, op) in target.signature().ops().iter().enumerate() {
            let table = target.table(i);
            let hit = match op.arity {
                1 => source_clone.find_unary(table),
                2 => source_clone.find_binary(table),
                _ => None,
            };
            match hit {
                Some(entry) => out.push((op.name.clone(), entry.witness.clone())),
                None => {
                    let why = preserved_constant_explanation(source, op, table)
                        .unwrap_or_else(|| "not reached by clone saturation (fixpoint)".into());
                    missing.push((format!("{}.{}", target.name, op.name), why));
                }
            }
        }
        out
    };

    let left_defines_right = define(left, &clone_left, right, &mut missing);
    let right_defines_left = define(right, &clone_right, left, &mut missing);
    let equivalent = missing.is_empty();
    Ok(TermEquivalenceReport { equivalent, left_defines_right, right_defines_left, missing })
}

/// If every basic operation of `algebra` fixes the diagonal constant `c`
/// (`f(c,…,c) = c`), every term does too; a target with `g(c,…,c) != c` is
/// then undefinable. Returns the explanation when it applies.
fn preserved_constant_explanation(
    algebra: &FiniteAlgebra,
    target_op: &crate::algebra::OpSig,
    target_table: &[usize],
) -> Option<String> {
    let n = algebra.size();
    'candidates: for c in 0..n {
        for (i, op) in algebra.signature().ops().iter().enumerate() {
            let args = vec![c; op.arity];
            if algebra.apply(i, &args) != c {
                continue 'candidates;
            }
        }
        // c is preserved by every term of the algebra
        let diag_index = (0..target_op.arity).fold(0, |acc, _| acc * n + c);
        let image = target_table[diag_index];
        if image != c {
            return Some(format!(
                "every term operation of {} fixes {}, but {}({}) = {}",
                algebra.name,
                algebra.element_name(c),
                target_op.name,
                vec![algebra.element_name(c); target_op.arity].join(","),
                algebra.element_name(image)
            ));
        }
    }
    None
}
