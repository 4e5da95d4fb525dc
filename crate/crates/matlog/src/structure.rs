//! Structure theory for subalgebras of powers: the information order,
//! Boolean skeletons, conuclei, the canonical candidate map, and the
//! decision procedure for when a carrier supports the external operator.
//!
//! The base algebra is a chain in universe order (`0 < n < 1`, or `0 < 1`
//! for the two-element case); the information order on tuples is its
//! pointwise lift. A carrier `C <= A^I` supports `delta1` exactly when the
//! pointwise map `top ↦ top, else ↦ bottom` stays inside `C`; that map is
//! then the unique complete Boolean conucleus on `C`. The decision is
//! relative to the concrete carrier. A bounded search over alternative
//! embeddings `C -> A^J` (injective homomorphisms, `J <= 3`) is reported
//! alongside, labelled with its scope, since a carrier rejected in one
//! representation may embed elsewhere with a closed canonical map.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{
    all_subuniverses, AlgebraError, FiniteAlgebra, PowerAlgebra, SubalgebraOfPower,
    SubuniverseMode, SubuniverseSurvey,
};
use crate::builtins::{OP_AND, OP_DELTA1, OP_NEG, OP_OR};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("base algebra `{0}` has {1} elements; the information order needs 2 or 3")]
    UnsupportedBase(String, usize),
    #[error("tuples have different lengths: {0} vs {1}")]
    ExponentMismatch(usize, usize),
    #[error("map is not total on the carrier: no value for {0}")]
    SigmaNotTotal(String),
    #[error("map value {0} is outside the carrier")]
    SigmaNotIntoCarrier(String),
    #[error("inequality criterion gate failed on `{algebra}`: 0|n = 0 there")]
    GateFailure { algebra: String },
    #[error("base algebra lacks operation `{0}`")]
    MissingOperation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Bottom/middle/top of the base chain, by universe index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseShape {
    pub bottom: usize,
    pub top: usize,
    pub middle: Option<usize>,
}

pub fn base_shape(base: &FiniteAlgebra) -> Result<BaseShape, StructureError> {
    match base.size() {
        2 => Ok(BaseShape { bottom: 0, top: 1, middle: None }),
        3 => Ok(BaseShape { bottom: 0, top: 2, middle: Some(1) }),
        n => Err(StructureError::UnsupportedBase(base.name.clone(), n)),
    }
}

/// Pointwise information order on explicit tuples.
pub fn order_leq_tuples(a: &[usize], b: &[usize]) -> Result<bool, StructureError> {
    if a.len() != b.len() {
        return Err(StructureError::ExponentMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).all(|(x, y)| x <= y))
}

/// Pointwise information order on encoded tuples of one power.
pub fn order_leq(power: &PowerAlgebra, a: usize, b: usize) -> bool {
    (0..power.exponent()).all(|i| power.project(a, i) <= power.project(b, i))
}

fn is_boolean_tuple(power: &PowerAlgebra, shape: &BaseShape, code: usize) -> bool {
    (0..power.exponent()).all(|i| {
        let v = power.project(code, i);
        v == shape.bottom || v == shape.top
    })
}

/// The pointwise `top ↦ top, else ↦ bottom` map on an encoded tuple.
pub fn delta1_pointwise(power: &PowerAlgebra, shape: &BaseShape, code: usize) -> usize {
    let n = power.base().size();
    let mut out = 0;
    for i in 0..power.exponent() {
        let v = power.project(code, i);
        out = out * n + if v == shape.top { shape.top } else { shape.bottom };
    }
    out
}

/// Brute-force route to the same value: the maximum Boolean tuple of the
/// full power lying below `code`, found by scanning all 2^I Boolean tuples.
pub fn max_boolean_below_bruteforce(
    power: &PowerAlgebra,
    shape: &BaseShape,
    code: usize,
) -> Option<usize> {
    let exponent = power.exponent();
    let mut below: Vec<usize> = Vec::new();
    for mask in 0..(1usize << exponent) {
        let tuple: Vec<usize> = (0..exponent)
            .map(|i| if mask & (1 << i) != 0 { shape.top } else { shape.bottom })
            .collect();
        let b = power.encode(&tuple);
        if order_leq(power, b, code) {
            below.push(b);
        }
    }
    // the join must be attained by a member dominating all the others
    let max = below.iter().copied().find(|&m| below.iter().all(|&b| order_leq(power, b, m)))?;
    Some(max)
}

/// The Boolean skeleton of a carrier: members with all coordinates in
/// `{bottom, top}`. May be empty.
pub fn boolean_skeleton(sub: &SubalgebraOfPower) -> Result<Vec<usize>, StructureError> {
    let shape = base_shape(sub.power().base())?;
    Ok(sub
        .carrier()
        .iter()
        .copied()
        .filter(|&c| is_boolean_tuple(sub.power(), &shape, c))
        .collect())
}

/// A total self-map on a carrier, stored aligned with the sorted carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryMapOnCarrier {
    carrier: Vec<usize>,
    image: Vec<usize>,
}

impl UnaryMapOnCarrier {
    pub fn from_pairs(
        sub: &SubalgebraOfPower,
        pairs: &[(usize, usize)],
    ) -> Result<Self, StructureError> {
        let lookup: BTreeMap<usize, usize> = pairs.iter().copied().collect();
        let mut image = Vec::with_capacity(sub.len());
        for &c in sub.carrier() {
            let v = *lookup
                .get(&c)
                .ok_or_else(|| StructureError::SigmaNotTotal(sub.power().tuple_name(c)))?;
            if !sub.contains(v) {
                return Err(StructureError::SigmaNotIntoCarrier(sub.power().tuple_name(v)));
            }
            image.push(v);
        }
        Ok(UnaryMapOnCarrier { carrier: sub.carrier().to_vec(), image })
    }

    pub fn from_fn(
        sub: &SubalgebraOfPower,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self, StructureError> {
        let pairs: Vec<(usize, usize)> = sub.carrier().iter().map(|&c| (c, f(c))).collect();
        Self::from_pairs(sub, &pairs)
    }

    pub fn get(&self, code: usize) -> usize {
        let i = self.carrier.binary_search(&code).expect("code in carrier");
        self.image[i]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.carrier.iter().copied().zip(self.image.iter().copied())
    }

    pub fn image_set(&self) -> BTreeSet<usize> {
        self.image.iter().copied().collect()
    }
}

/// Outcome of one axiom check with offending elements (codes in the ambient
/// power; pairs are two-entry vectors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub pass: bool,
    pub witnesses: Vec<Vec<usize>>,
}

impl AxiomCheck {
    fn from_witnesses(witnesses: Vec<Vec<usize>>) -> Self {
        AxiomCheck { pass: witnesses.is_empty(), witnesses }
    }
}

/// Full report on a candidate conucleus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConucleusReport {
    pub monotone: AxiomCheck,
    /// (i) deflationary: sigma a ⪯ a.
    pub deflationary: AxiomCheck,
    /// (ii) sigma a ∧ sigma b ⪯ sigma(a ∧ b).
    pub meet_inequality: AxiomCheck,
    /// (iii) idempotent.
    pub idempotent: AxiomCheck,
    pub is_conucleus: bool,
    /// Image equals the (nonempty) Boolean skeleton.
    pub is_boolean: bool,
    pub image: Vec<usize>,
    pub skeleton: Vec<usize>,
    /// Max Boolean tuple of the full power below each element lands in the
    /// image.
    pub is_complete: bool,
    pub completeness_witnesses: Vec<Vec<usize>>,
}

impl ConucleusReport {
    pub fn is_complete_boolean_conucleus(&self) -> bool {
        self.is_conucleus && self.is_boolean && self.is_complete
    }
}

/// Check the conucleus axioms, Booleanness and completeness of a total map.
pub fn check_conucleus(
    sigma: &UnaryMapOnCarrier,
    sub: &SubalgebraOfPower,
) -> Result<ConucleusReport, StructureError> {
    let power = sub.power();
    let shape = base_shape(power.base())?;
    let and = power
        .base()
        .signature()
        .index_of(OP_AND)
        .ok_or_else(|| StructureError::MissingOperation(OP_AND.into()))?;

    let mut monotone = Vec::new();
    let mut deflationary = Vec::new();
    let mut meet = Vec::new();
    let mut idempotent = Vec::new();
    for &a in sub.carrier() {
        let sa = sigma.get(a);
        if !order_leq(power, sa, a) {
            deflationary.push(vec![a]);
        }
        if sigma.get(sa) != sa {
            idempotent.push(vec![a]);
        }
        for &b in sub.carrier() {
            let sb = sigma.get(b);
            if order_leq(power, a, b) && !order_leq(power, sa, sb) {
                monotone.push(vec![a, b]);
            }
            let lhs = power.apply(and, &[sa, sb]);
            let rhs = sigma.get(power.apply(and, &[a, b]));
            if !order_leq(power, lhs, rhs) {
                meet.push(vec![a, b]);
            }
        }
    }
    let monotone = AxiomCheck::from_witnesses(monotone);
    let deflationary = AxiomCheck::from_witnesses(deflationary);
    let meet_inequality = AxiomCheck::from_witnesses(meet);
    let idempotent = AxiomCheck::from_witnesses(idempotent);
    let is_conucleus =
        monotone.pass && deflationary.pass && meet_inequality.pass && idempotent.pass;

    let skeleton = boolean_skeleton(sub)?;
    let image: Vec<usize> = sigma.image_set().into_iter().collect();
    let is_boolean = image == skeleton && !skeleton.is_empty();

    let image_set = sigma.image_set();
    let mut completeness_witnesses = Vec::new();
    for &a in sub.carrier() {
        let join = delta1_pointwise(power, &shape, a);
        if !image_set.contains(&join) {
            completeness_witnesses.push(vec![a, join]);
        }
    }
    let is_complete = completeness_witnesses.is_empty();

    Ok(ConucleusReport {
        monotone,
        deflationary,
        meet_inequality,
        idempotent,
        is_conucleus,
        is_boolean,
        image,
        skeleton,
        is_complete,
        completeness_witnesses,
    })
}

/// The canonical candidate: pointwise `delta1` when closed, or the least
/// element whose image escapes the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalSigma {
    Total(UnaryMapOnCarrier),
    Escapes { element: usize, image: usize },
}

pub fn canonical_sigma(sub: &SubalgebraOfPower) -> Result<CanonicalSigma, StructureError> {
    let power = sub.power();
    let shape = base_shape(power.base())?;
    for &c in sub.carrier() {
        let image = delta1_pointwise(power, &shape, c);
        if !sub.contains(image) {
            return Ok(CanonicalSigma::Escapes { element: c, image });
        }
    }
    let map = UnaryMapOnCarrier::from_fn(sub, |c| delta1_pointwise(power, &shape, c))?;
    Ok(CanonicalSigma::Total(map))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SepVerdict {
    Holds,
    /// First pair (carrier order) with equal images whose negations also
    /// have equal images.
    Violation { a: usize, b: usize },
}

impl SepVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SepVerdict::Holds)
    }
}

/// The separation condition: distinct elements with equal images must have
/// negations with distinct images.
pub fn check_sep(
    sigma: &UnaryMapOnCarrier,
    sub: &SubalgebraOfPower,
) -> Result<SepVerdict, StructureError> {
    let power = sub.power();
    let neg = power
        .base()
        .signature()
        .index_of(OP_NEG)
        .ok_or_else(|| StructureError::MissingOperation(OP_NEG.into()))?;
    for &a in sub.carrier() {
        for &b in sub.carrier() {
            if a < b && sigma.get(a) == sigma.get(b) {
                let na = power.apply(neg, &[a]);
                let nb = power.apply(neg, &[b]);
                if sigma.get(na) == sigma.get(nb) {
                    return Ok(SepVerdict::Violation { a, b });
                }
            }
        }
    }
    Ok(SepVerdict::Holds)
}

/// Why a carrier was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoReason {
    EmptySkeleton,
    Escape { element: usize, image: usize },
}

/// Result of the bounded alternative-embedding search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltEmbeddingSearch {
    pub searched_exponents: Vec<usize>,
    pub generator_bound: usize,
    /// Whether a generating set within the bound was found, making the
    /// search exhaustive over the stated exponents.
    pub exhaustive: bool,
    pub found: Option<AltEmbeddingWitness>,
}

/// An injective homomorphism into another power whose image carrier is
/// closed under the canonical map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltEmbeddingWitness {
    pub exponent: usize,
    /// Pairs (carrier element, image in the target power).
    pub mapping: Vec<(usize, usize)>,
    pub image_carrier: Vec<usize>,
}

/// Full report of the expansion decision for one carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    /// Whether the concrete carrier supports the external operator.
    pub verdict: bool,
    pub canonical: CanonicalSigma,
    /// For YES: the verified conucleus report of the canonical map.
    pub conucleus: Option<ConucleusReport>,
    /// Direct closure of the carrier inside the power of the expanded base
    /// algebra (a second route to the same fact).
    pub expanded_closed: Option<bool>,
    pub no_reason: Option<NoReason>,
    /// For NO with a usable skeleton-valued candidate: the separation check
    /// on the forced candidate (max skeleton element below each point).
    pub sep_crosscheck: Option<SepVerdict>,
    /// Labeled alternative-embedding scope (run only for NO carriers small
    /// enough to search).
    pub alt_embedding: Option<AltEmbeddingSearch>,
}

/// The base algebra expanded with the canonical `delta1` table (top to top,
/// everything else to bottom). Used for the direct closure route.
pub fn external_of_base(base: &FiniteAlgebra) -> Result<FiniteAlgebra, StructureError> {
    let shape = base_shape(base)?;
    if base.signature().index_of(OP_DELTA1).is_some() {
        return Ok(base.clone());
    }
    let table: Vec<usize> = (0..base.size())
        .map(|a| if a == shape.top { shape.top } else { shape.bottom })
        .collect();
    Ok(base.expand_with_unary(OP_DELTA1, table)?)
}

/// Forced skeleton-valued candidate: maps each element to the unique
/// maximal skeleton element of the carrier below it, when that exists.
pub fn forced_skeleton_candidate(
    sub: &SubalgebraOfPower,
) -> Result<Option<UnaryMapOnCarrier>, StructureError> {
    let power = sub.power();
    let skeleton = boolean_skeleton(sub)?;
    if skeleton.is_empty() {
        return Ok(None);
    }
    let mut pairs = Vec::with_capacity(sub.len());
    for &a in sub.carrier() {
        let below: Vec<usize> =
            skeleton.iter().copied().filter(|&b| order_leq(power, b, a)).collect();
        let maxima: Vec<usize> = below
            .iter()
            .copied()
            .filter(|&b| below.iter().all(|&c| !(order_leq(power, b, c) && b != c)))
            .collect();
        match maxima.as_slice() {
            [unique] => pairs.push((a, *unique)),
            _ => return Ok(None),
        }
    }
    Ok(Some(UnaryMapOnCarrier::from_pairs(sub, &pairs)?))
}

/// Decide whether a carrier can be expanded with the external operator,
/// with certificates on both the YES and the NO side.
pub fn admits_expansion(sub: &SubalgebraOfPower) -> Result<ExpansionReport, StructureError> {
    let canonical = canonical_sigma(sub)?;
    match canonical {
        CanonicalSigma::Total(ref sigma) => {
            let report = check_conucleus(sigma, sub)?;
            debug_assert!(report.is_complete_boolean_conucleus());
            let expanded_closed = expanded_carrier_closed(sub)?;
            debug_assert!(expanded_closed);
            Ok(ExpansionReport {
                verdict: true,
                canonical,
                conucleus: Some(report),
                expanded_closed: Some(expanded_closed),
                no_reason: None,
                sep_crosscheck: None,
                alt_embedding: None,
            })
        }
        CanonicalSigma::Escapes { element, image } => {
            let skeleton = boolean_skeleton(sub)?;
            let no_reason = if skeleton.is_empty() {
                NoReason::EmptySkeleton
            } else {
                NoReason::Escape { element, image }
            };
            let sep_crosscheck = match forced_skeleton_candidate(sub)? {
                Some(candidate) => Some(check_sep(&candidate, sub)?),
                None => None,
            };
            let alt_embedding = if sub.len() <= 9 {
                Some(search_alternative_embeddings(sub, 3, 3)?)
            } else {
                None
            };
            Ok(ExpansionReport {
                verdict: false,
                canonical,
                conucleus: None,
                expanded_closed: Some(expanded_carrier_closed(sub)?),
                no_reason: Some(no_reason),
                sep_crosscheck,
                alt_embedding,
            })
        }
    }
}

/// Route (b): is the carrier closed inside the power of the expanded base?
pub fn expanded_carrier_closed(sub: &SubalgebraOfPower) -> Result<bool, StructureError> {
    let expanded = external_of_base(sub.power().base())?;
    let power = expanded.power(sub.power().exponent())?;
    let codes: BTreeSet<usize> = sub.carrier().iter().copied().collect();
    Ok(SubalgebraOfPower::is_closed_subset(&power, &codes))
}

/// Exhaustive scan of skeleton-valued deflationary maps that are complete
/// Boolean conuclei. An independent oracle for the canonical-map shortcut:
/// nonempty exactly when the canonical map is total.
pub fn complete_boolean_conuclei_scan(
    sub: &SubalgebraOfPower,
) -> Result<Vec<UnaryMapOnCarrier>, StructureError> {
    scan_candidates(sub, |report| report.is_complete_boolean_conucleus(), None)
}

/// Exhaustive scan of Boolean conuclei satisfying `x ⪯ sigma x | ~x`:
/// the inequality route to the same decision.
pub fn inequality_conuclei_scan(
    sub: &SubalgebraOfPower,
) -> Result<Vec<UnaryMapOnCarrier>, StructureError> {
    let power = sub.power().clone();
    let or = power
        .base()
        .signature()
        .index_of(OP_OR)
        .ok_or_else(|| StructureError::MissingOperation(OP_OR.into()))?;
    let neg = power
        .base()
        .signature()
        .index_of(OP_NEG)
        .ok_or_else(|| StructureError::MissingOperation(OP_NEG.into()))?;
    let extra = move |sigma: &UnaryMapOnCarrier, sub: &SubalgebraOfPower| {
        sub.carrier().iter().all(|&x| {
            let bound = power.apply(or, &[sigma.get(x), power.apply(neg, &[x])]);
            order_leq(&power, x, bound)
        })
    };
    scan_candidates(sub, |report| report.is_conucleus && report.is_boolean, Some(Box::new(extra)))
}

type ExtraFilter = Box<dyn Fn(&UnaryMapOnCarrier, &SubalgebraOfPower) -> bool>;

fn scan_candidates(
    sub: &SubalgebraOfPower,
    keep: impl Fn(&ConucleusReport) -> bool,
    extra: Option<ExtraFilter>,
) -> Result<Vec<UnaryMapOnCarrier>, StructureError> {
    let power = sub.power();
    let skeleton = boolean_skeleton(sub)?;
    if skeleton.is_empty() {
        return Ok(Vec::new());
    }
    // per-element candidate images: skeleton elements below the point
    let choices: Vec<Vec<usize>> = sub
        .carrier()
        .iter()
        .map(|&a| skeleton.iter().copied().filter(|&b| order_leq(power, b, a)).collect())
        .collect();
    if choices.iter().any(|c: &Vec<usize>| c.is_empty()) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; sub.len()];
    'outer: loop {
        let pairs: Vec<(usize, usize)> = sub
            .carrier()
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, choices[i][pick[i]]))
            .collect();
        let sigma = UnaryMapOnCarrier::from_pairs(sub, &pairs)?;
        let report = check_conucleus(&sigma, sub)?;
        if keep(&report) && extra.as_ref().is_none_or(|f| f(&sigma, sub)) {
            out.push(sigma);
        }
        for i in (0..pick.len()).rev() {
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                continue 'outer;
            }
            pick[i] = 0;
        }
        break;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thm411Report {
    /// `x ⪯ sigma x | ~x` for every carrier element.
    pub holds: bool,
    pub witness: Option<usize>,
}

/// Gate for the inequality criterion: `0 | n` must differ from `0` in the
/// base algebra. Trivially true for a two-element base.
pub fn inequality_gate(base: &FiniteAlgebra) -> Result<bool, StructureError> {
    let shape = base_shape(base)?;
    let Some(middle) = shape.middle else { return Ok(true) };
    let or = base
        .signature()
        .index_of(OP_OR)
        .ok_or_else(|| StructureError::MissingOperation(OP_OR.into()))?;
    Ok(base.apply(or, &[shape.bottom, middle]) != shape.bottom)
}

/// Check the inequality `x ⪯ sigma x | ~x` over the carrier. Errors when
/// the base fails the gate.
pub fn check_thm411(
    sub: &SubalgebraOfPower,
    sigma: &UnaryMapOnCarrier,
) -> Result<Thm411Report, StructureError> {
    let power = sub.power();
    if !inequality_gate(power.base())? {
        return Err(StructureError::GateFailure { algebra: power.base().name.clone() });
    }
    let or = power
        .base()
        .signature()
        .index_of(OP_OR)
        .ok_or_else(|| StructureError::MissingOperation(OP_OR.into()))?;
    let neg = power
        .base()
        .signature()
        .index_of(OP_NEG)
        .ok_or_else(|| StructureError::MissingOperation(OP_NEG.into()))?;
    for &x in sub.carrier() {
        let bound = power.apply(or, &[sigma.get(x), power.apply(neg, &[x])]);
        if !order_leq(power, x, bound) {
            return Ok(Thm411Report { holds: false, witness: Some(x) });
        }
    }
    Ok(Thm411Report { holds: true, witness: None })
}

/// A minimal generating set of the carrier, trying subset sizes up to
/// `bound` in lexicographic order.
fn minimal_generators(sub: &SubalgebraOfPower, bound: usize) -> Option<Vec<usize>> {
    let carrier = sub.carrier();
    let n = carrier.len();
    for size in 1..=bound.min(n) {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let gens: BTreeSet<usize> = pick.iter().map(|&i| carrier[i]).collect();
            if let Ok(closed) = crate::algebra::subalgebra_closure(sub.power(), &gens) {
                if closed.carrier() == carrier {
                    return Some(gens.into_iter().collect());
                }
            }
            // next size-combination of indices, or stop
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if pick[i] + 1 <= n - (size - i) {
                    pick[i] += 1;
                    for j in i + 1..size {
                        pick[j] = pick[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    None
}

/// Extend generator images to a homomorphism by closure; `None` when the
/// extension is inconsistent.
fn extend_homomorphism(
    sub: &SubalgebraOfPower,
    target: &PowerAlgebra,
    gens: &[usize],
    images: &[usize],
) -> Option<BTreeMap<usize, usize>> {
    let source = sub.power();
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for (&g, &t) in gens.iter().zip(images) {
        if let Some(&prev) = map.get(&g) {
            if prev != t {
                return None;
            }
        }
        map.insert(g, t);
    }
    let ops: Vec<(usize, usize)> = source
        .base()
        .signature()
        .ops()
        .iter()
        .enumerate()
        .map(|(i, o)| (i, o.arity))
        .collect();
    loop {
        let mut changed = false;
        let domain: Vec<usize> = map.keys().copied().collect();
        for &(op, arity) in &ops {
            let mut idx = vec![0usize; arity];
            loop {
                let args: Vec<usize> = idx.iter().map(|&i| domain[i]).collect();
                let src = source.apply(op, &args);
                let timgs: Vec<usize> = args.iter().map(|a| map[a]).collect();
                let tgt = target.apply(op, &timgs);
                match map.get(&src) {
                    Some(&prev) if prev != tgt => return None,
                    Some(_) => {}
                    None => {
                        map.insert(src, tgt);
                        changed = true;
                    }
                }
                let mut j = arity;
                loop {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < domain.len() {
                        break;
                    }
                    idx[j] = 0;
                }
                if idx.iter().all(|&k| k == 0) {
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if map.len() != sub.len() {
        return None;
    }
    Some(map)
}

/// Brute-force search for an injective homomorphism of the carrier into
/// `A^J`, `J <= max_exponent`, whose image is closed under the canonical
/// map. Scope is reported, not assumed: a miss here is not a global NO.
pub fn search_alternative_embeddings(
    sub: &SubalgebraOfPower,
    max_exponent: usize,
    generator_bound: usize,
) -> Result<AltEmbeddingSearch, StructureError> {
    let base = sub.power().base().clone();
    let searched_exponents: Vec<usize> = (1..=max_exponent).collect();
    let Some(gens) = minimal_generators(sub, generator_bound) else {
        return Ok(AltEmbeddingSearch {
            searched_exponents,
            generator_bound,
            exhaustive: false,
            found: None,
        });
    };
    for exponent in 1..=max_exponent {
        let target = base.power(exponent)?;
        let mut images = vec![0usize; gens.len()];
        'assignments: loop {
            if let Some(map) = extend_homomorphism(sub, &target, &gens, &images) {
                let values: BTreeSet<usize> = map.values().copied().collect();
                if values.len() == map.len() {
                    // injective; the image of a closed carrier is closed
                    let image_sub = crate::algebra::subalgebra_closure(&target, &values)?;
                    debug_assert_eq!(
                        image_sub.carrier(),
                        values.iter().copied().collect::<Vec<_>>()
                    );
                    if let CanonicalSigma::Total(_) = canonical_sigma(&image_sub)? {
                        return Ok(AltEmbeddingSearch {
                            searched_exponents,
                            generator_bound,
                            exhaustive: true,
                            found: Some(AltEmbeddingWitness {
                                exponent,
                                mapping: map.into_iter().collect(),
                                image_carrier: image_sub.carrier().to_vec(),
                            }),
                        });
                    }
                }
            }
            for i in (0..images.len()).rev() {
                images[i] += 1;
                if images[i] < target.size() {
                    continue 'assignments;
                }
                images[i] = 0;
            }
            break;
        }
    }
    Ok(AltEmbeddingSearch { searched_exponents, generator_bound, exhaustive: true, found: None })
}

/// One row of the expansion survey over the subuniverses of a power.
#[derive(Debug, Clone)]
pub struct SurveyRow {
    pub index: usize,
    pub carrier: Vec<usize>,
    pub size: usize,
    pub skeleton_size: usize,
    pub report: ExpansionReport,
}

#[derive(Debug, Clone)]
pub struct Survey {
    pub mode: SubuniverseMode,
    pub complete: bool,
    pub rows: Vec<SurveyRow>,
}

/// Run the expansion decision over every enumerated subuniverse of a power.
/// Carriers are processed in deterministic order; `threads > 1` splits the
/// carrier list and merges back in order.
pub fn survey(
    power: &PowerAlgebra,
    mode: SubuniverseMode,
    threads: usize,
) -> Result<Survey, StructureError> {
    let SubuniverseSurvey { mode, complete, carriers } = all_subuniverses(power, mode)?;
    let row_of = |index: usize, sub: &SubalgebraOfPower| -> Result<SurveyRow, StructureError> {
        let report = admits_expansion(sub)?;
        Ok(SurveyRow {
            index,
            carrier: sub.carrier().to_vec(),
            size: sub.len(),
            skeleton_size: boolean_skeleton(sub)?.len(),
            report,
        })
    };
    let rows: Result<Vec<SurveyRow>, StructureError> = if threads > 1 && carriers.len() > 1 {
        let workers = threads.min(carriers.len());
        let chunk = carriers.len().div_ceil(workers);
        let results = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (w, slice) in carriers.chunks(chunk).enumerate() {
                handles.push(scope.spawn(move || {
                    slice
                        .iter()
                        .enumerate()
                        .map(|(i, sub)| row_of(w * chunk + i, sub))
                        .collect::<Result<Vec<_>, _>>()
                }));
            }
            handles.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>()
        });
        let mut rows = Vec::with_capacity(carriers.len());
        for r in results {
            rows.extend(r?);
        }
        Ok(rows)
    } else {
        carriers.iter().enumerate().map(|(i, sub)| row_of(i, sub)).collect()
    };
    Ok(Survey { mode, complete, rows: rows? })
}
