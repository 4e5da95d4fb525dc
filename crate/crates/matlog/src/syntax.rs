//! Propositional formulas over a signature: text grammar, parser,
//! substitution, rule/equation containers, and a bounded enumerator.
//!
//! Surface grammar (ASCII):
//!
//! ```text
//! formula := disj ("->" formula)?
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := ("~" | "D1" | "D0" | "Dm") unary | atom
//! atom    := ident | "(" formula ")"
//! ```
//!
//! Unary binds tighter than `&`, `&` tighter than `|`, `|` tighter than
//! `->`; `->` is right-associative. Variables match `[a-z][a-zA-Z0-9_]*`.
//!
//! `D0` and `Dm` are parse-time macros (`D0 p` = `D1 ~p`, `Dm p` =
//! `~(D1 p | D1 ~p)`), so signatures stay at most `{and, or, neg, imp,
//! delta1}`. `->` binds to a signature operation named `imp` when present;
//! against a signature that has `delta1` but no `imp` it expands (when
//! enabled) to the Boolean-valued implication
//! `D0 p | (Dm p & (Dm q | D1 q)) | (D1 p & D1 q)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::Signature;
use crate::builtins::{OP_AND, OP_DELTA1, OP_IMP, OP_NEG, OP_OR};

/// Abstract syntax: a variable or an operation applied to arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    Apply(String, Vec<Formula>),
}

pub fn var(name: &str) -> Formula {
    Formula::Var(name.to_string())
}

pub fn apply(op: &str, args: Vec<Formula>) -> Formula {
    Formula::Apply(op.to_string(), args)
}

pub fn and(a: Formula, b: Formula) -> Formula {
    apply(OP_AND, vec![a, b])
}

pub fn or(a: Formula, b: Formula) -> Formula {
    apply(OP_OR, vec![a, b])
}

pub fn neg(a: Formula) -> Formula {
    apply(OP_NEG, vec![a])
}

pub fn imp(a: Formula, b: Formula) -> Formula {
    apply(OP_IMP, vec![a, b])
}

pub fn delta1(a: Formula) -> Formula {
    apply(OP_DELTA1, vec![a])
}

/// `D0 x` as a macro over `delta1` and `neg`.
pub fn delta0(a: Formula) -> Formula {
    delta1(neg(a))
}

/// `Dm x` as a macro over `delta1`, `neg` and `or`.
pub fn delta_mid(a: Formula) -> Formula {
    neg(or(delta1(a.clone()), delta1(neg(a))))
}

/// The Boolean-valued derived implication over `{and, or, neg, delta1}`.
pub fn derived_imp(a: Formula, b: Formula) -> Formula {
    or(
        or(
            delta0(a.clone()),
            and(delta_mid(a.clone()), or(delta_mid(b.clone()), delta1(b.clone()))),
        ),
        and(delta1(a), delta1(b)),
    )
}

impl Formula {
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Apply(_, args) => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }
}

/// A finitary rule: finitely many premises and one conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub left: Formula,
    pub right: Formula,
}

impl Equation {
    pub fn new(left: Formula, right: Formula) -> Self {
        Equation { left, right }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiEquation {
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

/// A total map from variables to formulas, identity off a finite support.
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    map: BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn new(pairs: Vec<(&str, Formula)>) -> Self {
        Substitution { map: pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.map.get(name)
    }

    /// `after ∘ before`: apply `before`, then `after`.
    pub fn compose(after: &Substitution, before: &Substitution) -> Substitution {
        let mut map: BTreeMap<String, Formula> = before
            .map
            .iter()
            .map(|(k, v)| (k.clone(), substitute(v, after)))
            .collect();
        for (k, v) in &after.map {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Substitution { map }
    }
}

/// Homomorphic image of a formula under a substitution.
pub fn substitute(f: &Formula, s: &Substitution) -> Formula {
    match f {
        Formula::Var(name) => s.get(name).cloned().unwrap_or_else(|| f.clone()),
        Formula::Apply(op, args) => {
            Formula::Apply(op.clone(), args.iter().map(|a| substitute(a, s)).collect())
        }
    }
}

/// Variables in left-to-right first-occurrence order.
pub fn variables_of(f: &Formula) -> Vec<String> {
    fn walk(f: &Formula, out: &mut Vec<String>) {
        match f {
            Formula::Var(name) => {
                if !out.iter().any(|v| v == name) {
                    out.push(name.clone());
                }
            }
            Formula::Apply(_, args) => args.iter().for_each(|a| walk(a, out)),
        }
    }
    let mut out = Vec::new();
    walk(f, &mut out);
    out
}

/// First-occurrence variable order across a whole rule.
pub fn variables_of_rule(premises: &[Formula], conclusion: &Formula) -> Vec<String> {
    let mut out = Vec::new();
    for f in premises.iter().chain(std::iter::once(conclusion)) {
        for v in variables_of(f) {
            if !out.iter().any(|w| *w == v) {
                out.push(v);
            }
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("bind error at column {pos}: {message}")]
    Bind { pos: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    D1,
    D0,
    Dm,
    Amp,
    Pipe,
    Tilde,
    Arrow,
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Ident(name) => return write!(f, "`{name}`"),
            Token::D1 => "`D1`",
            Token::D0 => "`D0`",
            Token::Dm => "`Dm`",
            Token::Amp => "`&`",
            Token::Pipe => "`|`",
            Token::Tilde => "`~`",
            Token::Arrow => "`->`",
            Token::LParen => "`(`",
            Token::RParen => "`)`",
        };
        write!(f, "{s}")
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '&' => {
                out.push((i, Token::Amp));
                i += 1;
            }
            '|' => {
                out.push((i, Token::Pipe));
                i += 1;
            }
            '~' => {
                out.push((i, Token::Tilde));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    out.push((i, Token::Arrow));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        pos: i,
                        message: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "D1" => Token::D1,
                    "D0" => Token::D0,
                    "Dm" => Token::Dm,
                    _ if c.is_ascii_lowercase() => Token::Ident(word.to_string()),
                    _ => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            message: format!(
                                "`{word}` is neither a variable ([a-z][a-zA-Z0-9_]*) nor D1/D0/Dm"
                            ),
                        })
                    }
                };
                out.push((start, tok));
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// How to bind surface syntax to a signature.
#[derive(Debug, Clone)]
pub struct ParseContext<'a> {
    pub signature: &'a Signature,
    /// Expand `->` into the derived Boolean-valued implication when the
    /// signature has `delta1` but no native `imp`.
    pub derive_imp: bool,
}

impl<'a> ParseContext<'a> {
    pub fn new(signature: &'a Signature) -> Self {
        // default on exactly for signatures with the external operator
        let derive_imp = signature.index_of(OP_DELTA1).is_some();
        ParseContext { signature, derive_imp }
    }

    fn require(&self, op: &str, pos: usize, surface: &str) -> Result<(), ParseError> {
        match self.signature.arity_of(op) {
            Some(_) => Ok(()),
            None => Err(ParseError::Bind {
                pos,
                message: format!("`{surface}` needs operation `{op}`, absent from the signature"),
            }),
        }
    }

    fn require_arity(&self, op: &str, arity: usize, pos: usize, surface: &str) -> Result<(), ParseError> {
        self.require(op, pos, surface)?;
        let got = self.signature.arity_of(op).unwrap();
        if got != arity {
            return Err(ParseError::Bind {
                pos,
                message: format!("`{surface}` binds `{op}` with arity {got}, expected {arity}"),
            });
        }
        Ok(())
    }
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    ctx: &'a ParseContext<'a>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.disj()?;
        if let Some((pos, Token::Arrow)) = self.peek().cloned() {
            self.next();
            let right = self.formula()?;
            return self.bind_imp(left, right, pos);
        }
        Ok(left)
    }

    fn bind_imp(&self, a: Formula, b: Formula, pos: usize) -> Result<Formula, ParseError> {
        if self.ctx.signature.index_of(OP_IMP).is_some() {
            self.ctx.require_arity(OP_IMP, 2, pos, "->")?;
            return Ok(imp(a, b));
        }
        if self.ctx.derive_imp && self.ctx.signature.index_of(OP_DELTA1).is_some() {
            self.ctx.require_arity(OP_DELTA1, 1, pos, "->")?;
            self.ctx.require_arity(OP_NEG, 1, pos, "->")?;
            self.ctx.require_arity(OP_OR, 2, pos, "->")?;
            self.ctx.require_arity(OP_AND, 2, pos, "->")?;
            return Ok(derived_imp(a, b));
        }
        Err(ParseError::Bind {
            pos,
            message: "`->` has no `imp` operation to bind to and the derived implication is unavailable"
                .into(),
        })
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conj()?;
        while let Some((pos, Token::Pipe)) = self.peek().cloned() {
            self.next();
            self.ctx.require_arity(OP_OR, 2, pos, "|")?;
            let right = self.conj()?;
            left = or(left, right);
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while let Some((pos, Token::Amp)) = self.peek().cloned() {
            self.next();
            self.ctx.require_arity(OP_AND, 2, pos, "&")?;
            let right = self.unary()?;
            left = and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some((pos, Token::Tilde)) => {
                self.next();
                self.ctx.require_arity(OP_NEG, 1, pos, "~")?;
                Ok(neg(self.unary()?))
            }
            Some((pos, Token::D1)) => {
                self.next();
                self.ctx.require_arity(OP_DELTA1, 1, pos, "D1")?;
                Ok(delta1(self.unary()?))
            }
            Some((pos, Token::D0)) => {
                self.next();
                self.ctx.require_arity(OP_DELTA1, 1, pos, "D0")?;
                self.ctx.require_arity(OP_NEG, 1, pos, "D0")?;
                Ok(delta0(self.unary()?))
            }
            Some((pos, Token::Dm)) => {
                self.next();
                self.ctx.require_arity(OP_DELTA1, 1, pos, "Dm")?;
                self.ctx.require_arity(OP_NEG, 1, pos, "Dm")?;
                self.ctx.require_arity(OP_OR, 2, pos, "Dm")?;
                Ok(delta_mid(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.next() {
            Some((_, Token::Ident(name))) => Ok(Formula::Var(name)),
            Some((pos, Token::LParen)) => {
                let inner = self.formula()?;
                match self.next() {
                    Some((_, Token::RParen)) => Ok(inner),
                    other => Err(ParseError::Syntax {
                        pos: other.map_or(self.end, |t| t.0),
                        message: format!("unclosed `(` opened at column {pos}"),
                    }),
                }
            }
            Some((pos, tok)) => Err(ParseError::Syntax {
                pos,
                message: format!("expected a variable, unary operator or `(`, found {tok}"),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse a formula and bind it to the signature in `ctx`.
pub fn parse(text: &str, ctx: &ParseContext<'_>) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, ctx, end: text.len() };
    let f = parser.formula()?;
    if let Some((pos, tok)) = parser.peek() {
        return Err(ParseError::Syntax {
            pos: *pos,
            message: format!("trailing input: {tok}"),
        });
    }
    Ok(f)
}

/// Render a formula back into the surface grammar with minimal parentheses.
///
/// Operations outside `{and, or, neg, imp, delta1}` fall back to
/// `name(arg, …)` syntax, which the grammar cannot re-read; the round-trip
/// guarantee covers the surface operations only.
pub fn render(f: &Formula) -> String {
    fn go(f: &Formula, min: u8, out: &mut String) {
        let prec = match f {
            Formula::Var(_) => 4,
            Formula::Apply(op, _) => match op.as_str() {
                OP_IMP => 0,
                OP_OR => 1,
                OP_AND => 2,
                OP_NEG | OP_DELTA1 => 3,
                _ => 4,
            },
        };
        if prec < min {
            out.push('(');
            go(f, 0, out);
            out.push(')');
            return;
        }
        match f {
            Formula::Var(name) => out.push_str(name),
            Formula::Apply(op, args) => match (op.as_str(), args.as_slice()) {
                (OP_IMP, [a, b]) => {
                    go(a, 1, out);
                    out.push_str(" -> ");
                    go(b, 0, out);
                }
                (OP_OR, [a, b]) => {
                    go(a, 1, out);
                    out.push_str(" | ");
                    go(b, 2, out);
                }
                (OP_AND, [a, b]) => {
                    go(a, 2, out);
                    out.push_str(" & ");
                    go(b, 3, out);
                }
                (OP_NEG, [a]) => {
                    out.push('~');
                    go(a, 3, out);
                }
                (OP_DELTA1, [a]) => {
                    out.push_str("D1 ");
                    go(a, 3, out);
                }
                (name, args) => {
                    out.push_str(name);
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        go(a, 0, out);
                    }
                    out.push(')');
                }
            },
        }
    }
    let mut out = String::new();
    go(f, 0, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises: Vec<String> = self.premises.iter().map(render).collect();
        write!(f, "{} |- {}", premises.join(", "), render(&self.conclusion))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", render(&self.left), render(&self.right))
    }
}

/// All formulas over `variables` with AST depth at most `max_depth`,
/// enumerated level by level in a fixed deterministic order, no duplicates.
pub fn enumerate_formulas(
    signature: &Signature,
    variables: &[&str],
    max_depth: usize,
) -> impl Iterator<Item = Formula> {
    let ops: Vec<(String, usize)> =
        signature.ops().iter().map(|o| (o.name.clone(), o.arity)).collect();
    let mut levels: Vec<Vec<Formula>> = Vec::new();
    levels.push(variables.iter().map(|v| var(v)).collect());
    for d in 1..=max_depth {
        // pool = all formulas of depth < d, in enumeration order
        let pool: Vec<Formula> = levels.iter().flatten().cloned().collect();
        let prev_start = pool.len() - levels[d - 1].len();
        let mut level = Vec::new();
        for (op, arity) in &ops {
            let mut idx = vec![0usize; *arity];
            loop {
                if idx.iter().any(|&i| i >= prev_start) {
                    let args: Vec<Formula> = idx.iter().map(|&i| pool[i].clone()).collect();
                    level.push(Formula::Apply(op.clone(), args));
                }
                let mut j = *arity;
                loop {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < pool.len() {
                        break;
                    }
                    idx[j] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        levels.push(level);
    }
    levels.into_iter().flatten()
}

/// Closed-form count of formulas with depth at most `max_depth`:
/// `c(0) = |vars|`, `c(d) = |vars| + Σ_ops c(d-1)^arity`.
pub fn count_formulas(signature: &Signature, num_variables: usize, max_depth: usize) -> u128 {
    let mut c = num_variables as u128;
    for _ in 1..=max_depth {
        let mut next = num_variables as u128;
        for op in signature.ops() {
            next += c.pow(op.arity as u32);
        }
        c = next;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn kleene_ctx_sig() -> Signature {
        builtins::sk().signature().clone()
    }

    fn external_sig() -> Signature {
        crate::external::build_external(&builtins::builtin_matrix("B", builtins::Variant::AsPrinted).unwrap())
            .unwrap()
            .algebra()
            .signature()
            .clone()
    }

    #[test]
    fn precedence_examples() {
        let sig = kleene_ctx_sig();
        let ctx = ParseContext::new(&sig);
        assert_eq!(parse("~p & q", &ctx).unwrap(), and(neg(var("p")), var("q")));
        assert_eq!(parse("p | q & r", &ctx).unwrap(), or(var("p"), and(var("q"), var("r"))));
        assert_eq!(parse("(p | q) & r", &ctx).unwrap(), and(or(var("p"), var("q")), var("r")));
    }

    #[test]
    fn recapture_tautology_parses() {
        let sig = external_sig();
        let ctx = ParseContext::new(&sig);
        let f = parse("D1 p | ~ D1 p", &ctx).unwrap();
        assert_eq!(f, or(delta1(var("p")), neg(delta1(var("p")))));
    }

    #[test]
    fn arrow_against_plain_kleene_signature_is_a_bind_error() {
        let sig = kleene_ctx_sig();
        let ctx = ParseContext::new(&sig);
        let err = parse("p -> q", &ctx).unwrap_err();
        assert!(matches!(err, ParseError::Bind { .. }), "{err}");
    }

    #[test]
    fn arrow_binds_imp_when_present() {
        let l3 = builtins::l3();
        let ctx = ParseContext::new(l3.signature());
        assert_eq!(parse("p -> q", &ctx).unwrap(), imp(var("p"), var("q")));
        // right-associative
        assert_eq!(
            parse("p -> q -> r", &ctx).unwrap(),
            imp(var("p"), imp(var("q"), var("r")))
        );
    }

    #[test]
    fn arrow_expands_in_external_signatures() {
        let sig = external_sig();
        let ctx = ParseContext::new(&sig);
        let f = parse("p -> q", &ctx).unwrap();
        assert_eq!(f, derived_imp(var("p"), var("q")));
        let off = ParseContext { signature: &sig, derive_imp: false };
        assert!(parse("p -> q", &off).is_err());
    }

    #[test]
    fn macros_expand() {
        let sig = external_sig();
        let ctx = ParseContext::new(&sig);
        assert_eq!(parse("D0 p", &ctx).unwrap(), delta1(neg(var("p"))));
        assert_eq!(
            parse("Dm p", &ctx).unwrap(),
            neg(or(delta1(var("p")), delta1(neg(var("p")))))
        );
        // macros need delta1 in the signature
        let plain = kleene_ctx_sig();
        let ctx = ParseContext::new(&plain);
        assert!(parse("D0 p", &ctx).is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let sig = kleene_ctx_sig();
        let ctx = ParseContext::new(&sig);
        assert_eq!(
            parse("p & ", &ctx).unwrap_err(),
            ParseError::Syntax { pos: 4, message: "unexpected end of input".into() }
        );
        assert!(matches!(parse("p @ q", &ctx), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("(p | q", &ctx), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("P & q", &ctx), Err(ParseError::Syntax { pos: 0, .. })));
    }

    #[test]
    fn substitution_examples() {
        let f = or(var("p"), neg(var("p")));
        let s = Substitution::new(vec![("p", delta1(var("p")))]);
        assert_eq!(substitute(&f, &s), or(delta1(var("p")), neg(delta1(var("p")))));

        let id = Substitution::default();
        assert_eq!(substitute(&f, &id), f);

        let f = and(var("p"), var("q"));
        let s = Substitution::new(vec![("p", var("q"))]);
        assert_eq!(substitute(&f, &s), and(var("q"), var("q")));
    }

    #[test]
    fn variable_order_is_first_occurrence() {
        let f = and(var("p"), or(var("q"), var("p")));
        assert_eq!(variables_of(&f), vec!["p".to_string(), "q".to_string()]);
        assert_eq!(variables_of(&delta1(var("p"))), vec!["p".to_string()]);
    }

    #[test]
    fn enumeration_small_cases() {
        let neg_only = Signature::new(vec![("neg", 1)]).unwrap();
        let fs: Vec<Formula> = enumerate_formulas(&neg_only, &["p"], 0).collect();
        assert_eq!(fs, vec![var("p")]);
        let fs: Vec<Formula> = enumerate_formulas(&neg_only, &["p"], 1).collect();
        assert_eq!(fs, vec![var("p"), neg(var("p"))]);
    }

    #[test]
    fn enumeration_count_matches_recurrence() {
        let sig = kleene_ctx_sig();
        let listed = enumerate_formulas(&sig, &["p", "q"], 2).count();
        assert_eq!(listed as u128, count_formulas(&sig, 2, 2));
        // spot value: 2 vars, depth 2, ops {and, or, neg}
        assert_eq!(count_formulas(&sig, 2, 2), 302);
        // no duplicates
        let set: std::collections::BTreeSet<Formula> =
            enumerate_formulas(&sig, &["p", "q"], 2).collect();
        assert_eq!(set.len(), 302);
    }

    #[test]
    fn golden_precedence_corpus() {
        // 30 surface strings and their fully parenthesized normal forms.
        let l3 = builtins::l3();
        let ctx = ParseContext::new(l3.signature());
        let corpus: [(&str, &str); 30] = [
            ("p", "p"),
            ("~p", "~p"),
            ("~~p", "~~p"),
            ("p & q", "p & q"),
            ("p | q", "p | q"),
            ("p -> q", "p -> q"),
            ("~p & q", "~p & q"),
            ("~(p & q)", "~(p & q)"),
            ("p & q & r", "p & q & r"),
            ("p | q | r", "p | q | r"),
            ("p & q | r", "p & q | r"),
            ("p | q & r", "p | q & r"),
            ("(p | q) & r", "(p | q) & r"),
            ("p & (q | r)", "p & (q | r)"),
            ("p -> q -> r", "p -> q -> r"),
            ("(p -> q) -> r", "(p -> q) -> r"),
            ("p & q -> r", "p & q -> r"),
            ("p -> q & r", "p -> q & r"),
            ("p | q -> r | s", "p | q -> r | s"),
            ("~p | ~q", "~p | ~q"),
            ("~(p | q)", "~(p | q)"),
            ("~p -> ~q", "~p -> ~q"),
            ("~(p -> q)", "~(p -> q)"),
            ("((p))", "p"),
            ("(p & q) & r", "p & q & r"),
            ("p & (q & r)", "p & (q & r)"),
            ("(p | q) | r", "p | q | r"),
            ("p | (q | r)", "p | (q | r)"),
            ("~ ~ p & q", "~~p & q"),
            ("p -> (q -> r)", "p -> q -> r"),
        ];
        for (input, expected) in corpus {
            let ast = parse(input, &ctx).unwrap();
            assert_eq!(render(&ast), expected, "input {input:?}");
            // reparse of the render is the same AST
            assert_eq!(parse(&render(&ast), &ctx).unwrap(), ast, "input {input:?}");
        }
    }
}
