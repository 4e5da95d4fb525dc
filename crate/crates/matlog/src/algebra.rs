//! Finite algebras as explicit operation tables, direct powers, subalgebras
//! of powers, congruences, and the Leibniz congruence of a matrix.
//!
//! Elements are `usize` indices into an ordered universe of names. Operation
//! tables are flat and row-major: for an operation of arity `k` over a
//! universe of size `n`, the entry for arguments `(a_1, …, a_k)` lives at
//! index `a_1·n^(k-1) + … + a_k`. Tuples of a direct power use the same
//! base-`n` encoding, with coordinate 0 most significant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("duplicate operation name `{0}` in signature")]
    DuplicateOperation(String),
    #[error("operation `{0}` has arity 0; constant symbols are not supported")]
    NullaryOperation(String),
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("duplicate element name `{0}` in universe")]
    DuplicateElement(String),
    #[error("table for `{op}` has {got} entries, expected {expected}")]
    TableSize { op: String, got: usize, expected: usize },
    #[error("table for `{op}` contains element index {index}, universe has {size} elements")]
    DanglingIndex { op: String, index: usize, size: usize },
    #[error("unknown element name `{0}`")]
    UnknownElement(String),
    #[error("designated set must be a subset of the universe")]
    DesignatedOutOfRange,
    #[error("power exponent must be at least 1")]
    ZeroExponent,
    #[error("generator set is empty; closures of the empty set are empty in a constant-free signature")]
    EmptyGenerators,
    #[error("generator {0} is not an element of the power")]
    GeneratorOutOfRange(usize),
    #[error("exhaustive subuniverse scan needs |A^I| <= {limit}, got {size}; use generated mode")]
    ExhaustiveTooLarge { size: usize, limit: usize },
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
}

/// An operation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSig {
    pub name: String,
    pub arity: usize,
}

/// A list of operation symbols. Names are pairwise distinct and every arity
/// is at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<OpSig>,
}

impl Signature {
    pub fn new(ops: Vec<(&str, usize)>) -> Result<Self, AlgebraError> {
        Self::from_opsigs(
            ops.into_iter()
                .map(|(name, arity)| OpSig { name: name.to_string(), arity })
                .collect(),
        )
    }

    pub fn from_opsigs(ops: Vec<OpSig>) -> Result<Self, AlgebraError> {
        let mut seen = BTreeSet::new();
        for op in &ops {
            if !seen.insert(op.name.clone()) {
                return Err(AlgebraError::DuplicateOperation(op.name.clone()));
            }
            if op.arity == 0 {
                return Err(AlgebraError::NullaryOperation(op.name.clone()));
            }
        }
        Ok(Signature { ops })
    }

    pub fn ops(&self) -> &[OpSig] {
        &self.ops
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().find(|o| o.name == name).map(|o| o.arity)
    }
}

/// A named finite universe with one total operation table per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    universe: Vec<String>,
    signature: Signature,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    /// Validated constructor: table sizes must match `|universe|^arity` and
    /// every entry must be a valid element index.
    pub fn new(
        name: &str,
        universe: Vec<String>,
        signature: Signature,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self, AlgebraError> {
        if universe.is_empty() {
            return Err(AlgebraError::EmptyUniverse);
        }
        let mut seen = BTreeSet::new();
        for e in &universe {
            if !seen.insert(e.clone()) {
                return Err(AlgebraError::DuplicateElement(e.clone()));
            }
        }
        let n = universe.len();
        if tables.len() != signature.ops().len() {
            return Err(AlgebraError::TableSize {
                op: "<table list>".into(),
                got: tables.len(),
                expected: signature.ops().len(),
            });
        }
        for (op, table) in signature.ops().iter().zip(&tables) {
            let expected = n.pow(op.arity as u32);
            if table.len() != expected {
                return Err(AlgebraError::TableSize {
                    op: op.name.clone(),
                    got: table.len(),
                    expected,
                });
            }
            for &v in table {
                if v >= n {
                    return Err(AlgebraError::DanglingIndex { op: op.name.clone(), index: v, size: n });
                }
            }
        }
        Ok(FiniteAlgebra { name: name.to_string(), universe, signature, tables })
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn element_name(&self, index: usize) -> &str {
        &self.universe[index]
    }

    pub fn element_index(&self, name: &str) -> Result<usize, AlgebraError> {
        self.universe
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| AlgebraError::UnknownElement(name.to_string()))
    }

    pub fn table(&self, op_index: usize) -> &[usize] {
        &self.tables[op_index]
    }

    /// Apply the operation at `op_index` to explicit argument indices.
    pub fn apply(&self, op_index: usize, args: &[usize]) -> usize {
        let n = self.universe.len();
        let mut idx = 0;
        for &a in args {
            idx = idx * n + a;
        }
        self.tables[op_index][idx]
    }

    pub fn apply_named(&self, op: &str, args: &[usize]) -> Result<usize, AlgebraError> {
        let i = self
            .signature
            .index_of(op)
            .ok_or_else(|| AlgebraError::UnknownOperation(op.to_string()))?;
        Ok(self.apply(i, args))
    }

    /// Append a fresh unary operation, keeping all existing tables.
    pub fn expand_with_unary(&self, op_name: &str, table: Vec<usize>) -> Result<Self, AlgebraError> {
        let mut ops: Vec<OpSig> = self.signature.ops().to_vec();
        ops.push(OpSig { name: op_name.to_string(), arity: 1 });
        let signature = Signature::from_opsigs(ops)?;
        let mut tables = self.tables.clone();
        tables.push(table);
        FiniteAlgebra::new(&self.name, self.universe.clone(), signature, tables)
    }

    /// Restrict to the operations named in `keep`, in their current order.
    pub fn reduct(&self, keep: &[&str]) -> Result<Self, AlgebraError> {
        let mut ops = Vec::new();
        let mut tables = Vec::new();
        for (op, table) in self.signature.ops().iter().zip(&self.tables) {
            if keep.contains(&op.name.as_str()) {
                ops.push(op.clone());
                tables.push(table.clone());
            }
        }
        FiniteAlgebra::new(&self.name, self.universe.clone(), Signature::from_opsigs(ops)?, tables)
    }

    pub fn power(&self, exponent: usize) -> Result<PowerAlgebra, AlgebraError> {
        if exponent == 0 {
            return Err(AlgebraError::ZeroExponent);
        }
        Ok(PowerAlgebra { base: self.clone(), exponent })
    }
}

/// An algebra together with a designated subset of its universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub algebra: FiniteAlgebra,
    designated: BTreeSet<usize>,
}

impl Matrix {
    pub fn new(algebra: FiniteAlgebra, designated: BTreeSet<usize>) -> Result<Self, AlgebraError> {
        if designated.iter().any(|&d| d >= algebra.size()) {
            return Err(AlgebraError::DesignatedOutOfRange);
        }
        Ok(Matrix { algebra, designated })
    }

    pub fn from_names(algebra: FiniteAlgebra, designated: &[&str]) -> Result<Self, AlgebraError> {
        let set = designated
            .iter()
            .map(|n| algebra.element_index(n))
            .collect::<Result<BTreeSet<_>, _>>()?;
        Matrix::new(algebra, set)
    }

    pub fn designated(&self) -> &BTreeSet<usize> {
        &self.designated
    }

    pub fn is_designated(&self, element: usize) -> bool {
        self.designated.contains(&element)
    }
}

/// A direct power `A^I`. Elements are base-`|A|` codes of tuples, with
/// coordinate 0 in the most significant position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerAlgebra {
    base: FiniteAlgebra,
    exponent: usize,
}

impl PowerAlgebra {
    pub fn base(&self) -> &FiniteAlgebra {
        &self.base
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn size(&self) -> usize {
        self.base.size().pow(self.exponent as u32)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.exponent);
        let n = self.base.size();
        tuple.iter().fold(0, |acc, &t| acc * n + t)
    }

    pub fn decode(&self, code: usize) -> Vec<usize> {
        let n = self.base.size();
        let mut out = vec![0; self.exponent];
        let mut c = code;
        for i in (0..self.exponent).rev() {
            out[i] = c % n;
            c /= n;
        }
        out
    }

    /// Coordinate `i` of the tuple encoded by `code`.
    pub fn project(&self, code: usize, i: usize) -> usize {
        let n = self.base.size();
        (code / n.pow((self.exponent - 1 - i) as u32)) % n
    }

    /// Componentwise application on encoded tuples.
    pub fn apply(&self, op_index: usize, args: &[usize]) -> usize {
        let decoded: Vec<Vec<usize>> = args.iter().map(|&a| self.decode(a)).collect();
        let mut coords = vec![0; args.len()];
        let mut out = 0;
        let n = self.base.size();
        for i in 0..self.exponent {
            for (j, d) in decoded.iter().enumerate() {
                coords[j] = d[i];
            }
            out = out * n + self.base.apply(op_index, &coords);
        }
        out
    }

    /// Render a code as a tuple of element names, e.g. `(0,n)`.
    pub fn tuple_name(&self, code: usize) -> String {
        let parts: Vec<&str> =
            self.decode(code).into_iter().map(|i| self.base.element_name(i)).collect();
        format!("({})", parts.join(","))
    }

    pub fn encode_names(&self, names: &[&str]) -> Result<usize, AlgebraError> {
        let tuple = names
            .iter()
            .map(|n| self.base.element_index(n))
            .collect::<Result<Vec<_>, _>>()?;
        if tuple.len() != self.exponent {
            return Err(AlgebraError::GeneratorOutOfRange(0));
        }
        Ok(self.encode(&tuple))
    }

    /// Materialize the power as a plain [`FiniteAlgebra`] over tuple names.
    pub fn to_finite_algebra(&self) -> FiniteAlgebra {
        let size = self.size();
        let universe: Vec<String> = (0..size).map(|c| self.tuple_name(c)).collect();
        let mut tables = Vec::new();
        for (i, op) in self.base.signature().ops().iter().enumerate() {
            let entries = size.pow(op.arity as u32);
            let mut table = vec![0; entries];
            let mut args = vec![0; op.arity];
            for (idx, slot) in table.iter_mut().enumerate() {
                let mut rem = idx;
                for j in (0..op.arity).rev() {
                    args[j] = rem % size;
                    rem /= size;
                }
                *slot = self.apply(i, &args);
            }
            tables.push(table);
        }
        FiniteAlgebra::new(
            &format!("{}^{}", self.base.name, self.exponent),
            universe,
            self.base.signature().clone(),
            tables,
        )
        .expect("power tables are total by construction")
    }
}

/// A subuniverse of a direct power, stored as a sorted set of tuple codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubalgebraOfPower {
    power: PowerAlgebra,
    carrier: Vec<usize>,
}

impl SubalgebraOfPower {
    pub fn power(&self) -> &PowerAlgebra {
        &self.power
    }

    pub fn carrier(&self) -> &[usize] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn contains(&self, code: usize) -> bool {
        self.carrier.binary_search(&code).is_ok()
    }

    /// Check closure of an arbitrary code set directly against the tables.
    pub fn is_closed_subset(power: &PowerAlgebra, codes: &BTreeSet<usize>) -> bool {
        for (i, op) in power.base().signature().ops().iter().enumerate() {
            let mut args = vec![0; op.arity];
            let members: Vec<usize> = codes.iter().copied().collect();
            let count = members.len().pow(op.arity as u32);
            for idx in 0..count {
                let mut rem = idx;
                for j in (0..op.arity).rev() {
                    args[j] = members[rem % members.len()];
                    rem /= members.len();
                }
                if !codes.contains(&power.apply(i, &args)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn tuple_names(&self) -> Vec<String> {
        self.carrier.iter().map(|&c| self.power.tuple_name(c)).collect()
    }
}

impl fmt::Display for SubalgebraOfPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.tuple_names().join(", "))
    }
}

/// Smallest subuniverse of the power containing `generators`.
pub fn subalgebra_closure(
    power: &PowerAlgebra,
    generators: &BTreeSet<usize>,
) -> Result<SubalgebraOfPower, AlgebraError> {
    if generators.is_empty() {
        return Err(AlgebraError::EmptyGenerators);
    }
    let size = power.size();
    if let Some(&g) = generators.iter().find(|&&g| g >= size) {
        return Err(AlgebraError::GeneratorOutOfRange(g));
    }
    let mut member = vec![false; size];
    let mut closure: Vec<usize> = Vec::new();
    for &g in generators {
        if !member[g] {
            member[g] = true;
            closure.push(g);
        }
    }
    // Worklist closure: combine every new element with everything seen so far.
    let ops: Vec<usize> = (0..power.base().signature().ops().len()).collect();
    let arities: Vec<usize> =
        power.base().signature().ops().iter().map(|o| o.arity).collect();
    let mut frontier = 0;
    while frontier < closure.len() {
        let snapshot = closure.len();
        for (&op, &arity) in ops.iter().zip(&arities) {
            // All argument tuples that use at least one element from the frontier.
            let mut args = vec![0usize; arity];
            let pool = closure.clone();
            let mut idx = vec![0usize; arity];
            loop {
                let mut uses_new = false;
                for j in 0..arity {
                    args[j] = pool[idx[j]];
                    if idx[j] >= frontier {
                        uses_new = true;
                    }
                }
                if uses_new {
                    let v = power.apply(op, &args);
                    if !member[v] {
                        member[v] = true;
                        closure.push(v);
                    }
                }
                // odometer over the pool
                let mut j = arity;
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
                if idx.iter().all(|&k| k == 0) {
                    break;
                }
            }
        }
        frontier = snapshot;
    }
    closure.sort_unstable();
    Ok(SubalgebraOfPower { power: power.clone(), carrier: closure })
}

/// Build a subalgebra from a carrier already known (or required) to be closed.
pub fn subalgebra_from_carrier(
    power: &PowerAlgebra,
    carrier: &BTreeSet<usize>,
) -> Result<SubalgebraOfPower, AlgebraError> {
    if carrier.is_empty() {
        return Err(AlgebraError::EmptyGenerators);
    }
    if let Some(&g) = carrier.iter().find(|&&g| g >= power.size()) {
        return Err(AlgebraError::GeneratorOutOfRange(g));
    }
    let closed = subalgebra_closure(power, carrier)?;
    Ok(closed)
}

/// How a subuniverse listing was produced, and how complete it is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubuniverseMode {
    /// Scan of all non-empty subsets; provably complete. Only allowed while
    /// `|A^I| <= 12`.
    Exhaustive,
    /// Closures of all generator sets of size up to the bound; complete only
    /// for subuniverses generated by that many elements.
    Generated(usize),
}

#[derive(Debug, Clone)]
pub struct SubuniverseSurvey {
    pub mode: SubuniverseMode,
    pub complete: bool,
    pub carriers: Vec<SubalgebraOfPower>,
}

const EXHAUSTIVE_LIMIT: usize = 12;

/// Enumerate subuniverses of a power.
pub fn all_subuniverses(
    power: &PowerAlgebra,
    mode: SubuniverseMode,
) -> Result<SubuniverseSurvey, AlgebraError> {
    let size = power.size();
    let mut carriers: Vec<Vec<usize>> = Vec::new();
    match mode {
        SubuniverseMode::Exhaustive => {
            if size > EXHAUSTIVE_LIMIT {
                return Err(AlgebraError::ExhaustiveTooLarge { size, limit: EXHAUSTIVE_LIMIT });
            }
            for mask in 1u32..(1u32 << size) {
                let codes: BTreeSet<usize> =
                    (0..size).filter(|&c| mask & (1 << c) != 0).collect();
                if SubalgebraOfPower::is_closed_subset(power, &codes) {
                    carriers.push(codes.into_iter().collect());
                }
            }
        }
        SubuniverseMode::Generated(max_generators) => {
            let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
            let mut gens: Vec<usize> = Vec::new();
            collect_generated(power, 0, max_generators, &mut gens, &mut seen)?;
            carriers.extend(seen);
        }
    }
    carriers.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
    carriers.dedup();
    let complete = matches!(mode, SubuniverseMode::Exhaustive);
    Ok(SubuniverseSurvey {
        mode,
        complete,
        carriers: carriers
            .into_iter()
            .map(|carrier| SubalgebraOfPower { power: power.clone(), carrier })
            .collect(),
    })
}

fn collect_generated(
    power: &PowerAlgebra,
    start: usize,
    budget: usize,
    gens: &mut Vec<usize>,
    seen: &mut BTreeSet<Vec<usize>>,
) -> Result<(), AlgebraError> {
    if !gens.is_empty() {
        let set: BTreeSet<usize> = gens.iter().copied().collect();
        let closed = subalgebra_closure(power, &set)?;
        seen.insert(closed.carrier);
    }
    if budget == 0 {
        return Ok(());
    }
    for g in start..power.size() {
        gens.push(g);
        collect_generated(power, g + 1, budget - 1, gens, seen)?;
        gens.pop();
    }
    Ok(())
}

/// A congruence, stored as a normalized block index per element (block ids
/// numbered by first occurrence).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Congruence {
    block_of: Vec<usize>,
}

impl Congruence {
    pub fn identity(n: usize) -> Self {
        Congruence { block_of: (0..n).collect() }
    }

    pub fn total(n: usize) -> Self {
        Congruence { block_of: vec![0; n] }
    }

    fn normalize(mut block_of: Vec<usize>) -> Self {
        let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
        for b in block_of.iter_mut() {
            let next = relabel.len();
            let id = *relabel.entry(*b).or_insert(next);
            *b = id;
        }
        Congruence { block_of }
    }

    pub fn from_block_of(block_of: Vec<usize>) -> Self {
        Self::normalize(block_of)
    }

    pub fn size(&self) -> usize {
        self.block_of.len()
    }

    pub fn relates(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (e, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(e);
        }
        blocks
    }

    pub fn is_identity(&self) -> bool {
        self.block_count() == self.size()
    }

    pub fn is_total(&self) -> bool {
        self.block_count() <= 1
    }

    /// Containment as relations: every block of `self` inside a block of `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        let n = self.size();
        for a in 0..n {
            for b in (a + 1)..n {
                if self.relates(a, b) && !other.relates(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether a subset is a union of blocks.
    pub fn saturates(&self, set: &BTreeSet<usize>) -> bool {
        let n = self.size();
        for a in 0..n {
            for b in 0..n {
                if self.relates(a, b) && set.contains(&a) != set.contains(&b) {
                    return false;
                }
            }
        }
        true
    }

    /// Compatibility with every operation of the algebra, checked one
    /// coordinate at a time (sufficient by transitivity).
    pub fn is_congruence_of(&self, algebra: &FiniteAlgebra) -> bool {
        let n = algebra.size();
        for (i, op) in algebra.signature().ops().iter().enumerate() {
            let k = op.arity;
            let count = n.pow(k as u32);
            let mut args = vec![0; k];
            for idx in 0..count {
                let mut rem = idx;
                for j in (0..k).rev() {
                    args[j] = rem % n;
                    rem /= n;
                }
                let v = algebra.apply(i, &args);
                for j in 0..k {
                    let orig = args[j];
                    for b in 0..n {
                        if self.relates(orig, b) && b != orig {
                            args[j] = b;
                            let w = algebra.apply(i, &args);
                            if !self.relates(v, w) {
                                return false;
                            }
                        }
                    }
                    args[j] = orig;
                }
            }
        }
        true
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
    fn to_congruence(&mut self) -> Congruence {
        let n = self.parent.len();
        let block_of: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        Congruence::from_block_of(block_of)
    }
}

/// Congruence generated by a set of pairs on top of a base congruence:
/// single-coordinate replacement closure until fixpoint.
fn congruence_closure(
    algebra: &FiniteAlgebra,
    base: &Congruence,
    extra: &[(usize, usize)],
) -> Congruence {
    let n = algebra.size();
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in (a + 1)..n {
            if base.relates(a, b) {
                uf.union(a, b);
            }
        }
    }
    for &(a, b) in extra {
        uf.union(a, b);
    }
    loop {
        let mut changed = false;
        for (i, op) in algebra.signature().ops().iter().enumerate() {
            let k = op.arity;
            let count = n.pow(k as u32);
            let mut args = vec![0; k];
            for idx in 0..count {
                let mut rem = idx;
                for j in (0..k).rev() {
                    args[j] = rem % n;
                    rem /= n;
                }
                let v = algebra.apply(i, &args);
                for j in 0..k {
                    let orig = args[j];
                    for b in 0..n {
                        if b != orig && uf.find(b) == uf.find(orig) {
                            args[j] = b;
                            let w = algebra.apply(i, &args);
                            if uf.union(v, w) {
                                changed = true;
                            }
                        }
                    }
                    args[j] = orig;
                }
            }
        }
        if !changed {
            break;
        }
    }
    uf.to_congruence()
}

/// All congruences of the algebra.
///
/// Small universes go through direct partition enumeration; larger ones
/// through breadth-first joins of principal congruences. The two agree
/// wherever both are feasible (tested).
pub fn congruences(algebra: &FiniteAlgebra) -> Vec<Congruence> {
    let mut out = if algebra.size() <= 6 {
        congruences_by_partitions(algebra)
    } else {
        congruences_by_principal_joins(algebra)
    };
    out.sort();
    out
}

/// Enumerate all set partitions (restricted growth strings) and keep the
/// compatible ones.
pub fn congruences_by_partitions(algebra: &FiniteAlgebra) -> Vec<Congruence> {
    let n = algebra.size();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let cand = Congruence::from_block_of(rgs.clone());
        if cand.is_congruence_of(algebra) {
            out.push(cand);
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                out.sort();
                out.dedup();
                return out;
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            rgs[i] = 0;
        }
    }
}

/// Breadth-first closure of the congruence lattice under joins with
/// principal congruences, starting from the identity.
pub fn congruences_by_principal_joins(algebra: &FiniteAlgebra) -> Vec<Congruence> {
    let n = algebra.size();
    let identity = Congruence::identity(n);
    let mut seen: BTreeSet<Congruence> = BTreeSet::new();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(theta) = frontier.pop() {
        for a in 0..n {
            for b in (a + 1)..n {
                if !theta.relates(a, b) {
                    let bigger = congruence_closure(algebra, &theta, &[(a, b)]);
                    if seen.insert(bigger.clone()) {
                        frontier.push(bigger);
                    }
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// The largest congruence under which the designated set is a union of
/// blocks. Computed by joining every compatible congruence; the result is
/// checked to contain each of them.
pub fn leibniz_congruence(matrix: &Matrix) -> Congruence {
    let algebra = &matrix.algebra;
    let compatible: Vec<Congruence> = congruences(algebra)
        .into_iter()
        .filter(|c| c.saturates(matrix.designated()))
        .collect();
    let mut best = Congruence::identity(algebra.size());
    for c in &compatible {
        let pairs: Vec<(usize, usize)> = (0..algebra.size())
            .flat_map(|a| (0..algebra.size()).map(move |b| (a, b)))
            .filter(|&(a, b)| a < b && c.relates(a, b))
            .collect();
        best = congruence_closure(algebra, &best, &pairs);
    }
    debug_assert!(best.saturates(matrix.designated()));
    debug_assert!(compatible.iter().all(|c| c.refines(&best)));
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    #[test]
    fn rejects_wrong_table_size() {
        // binary op on 3 elements needs 9 entries, not 8
        let sig = Signature::new(vec![("and", 2)]).unwrap();
        let err = FiniteAlgebra::new(
            "bad",
            vec!["0".into(), "n".into(), "1".into()],
            sig,
            vec![vec![0; 8]],
        )
        .unwrap_err();
        assert_eq!(err, AlgebraError::TableSize { op: "and".into(), got: 8, expected: 9 });
    }

    #[test]
    fn rejects_dangling_index_and_duplicates() {
        let sig = Signature::new(vec![("neg", 1)]).unwrap();
        let err =
            FiniteAlgebra::new("bad", vec!["0".into(), "1".into()], sig.clone(), vec![vec![0, 2]])
                .unwrap_err();
        assert!(matches!(err, AlgebraError::DanglingIndex { .. }));

        let err = Signature::new(vec![("and", 2), ("and", 2)]).unwrap_err();
        assert_eq!(err, AlgebraError::DuplicateOperation("and".into()));

        let err = FiniteAlgebra::new(
            "bad",
            vec!["0".into(), "0".into()],
            Signature::new(vec![("neg", 1)]).unwrap(),
            vec![vec![0, 1]],
        )
        .unwrap_err();
        assert_eq!(err, AlgebraError::DuplicateElement("0".into()));
    }

    #[test]
    fn sk_and_wk_fig1_entries() {
        let sk = builtins::sk();
        let half = sk.element_index("n").unwrap();
        let one = sk.element_index("1").unwrap();
        assert_eq!(sk.apply_named("and", &[half, one]).unwrap(), half);
        let wk = builtins::wk();
        assert_eq!(wk.apply_named("or", &[half, one]).unwrap(), half);
    }

    #[test]
    fn power_componentwise() {
        let sk = builtins::sk();
        let p1 = sk.power(1).unwrap();
        assert_eq!(p1.size(), 3);
        // A^1 behaves exactly like A
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(
                    p1.apply(sk.signature().index_of("and").unwrap(), &[a, b]),
                    sk.apply_named("and", &[a, b]).unwrap()
                );
            }
        }
        let p2 = sk.power(2).unwrap();
        assert_eq!(p2.size(), 9);
        let a = p2.encode_names(&["n", "0"]).unwrap();
        let b = p2.encode_names(&["1", "1"]).unwrap();
        let and = sk.signature().index_of("and").unwrap();
        assert_eq!(p2.apply(and, &[a, b]), p2.encode_names(&["n", "0"]).unwrap());
        assert!(sk.power(0).is_err());
    }

    #[test]
    fn encode_decode_roundtrip_sk3() {
        let p3 = builtins::sk().power(3).unwrap();
        for code in 0..27 {
            assert_eq!(p3.encode(&p3.decode(code)), code);
        }
    }

    #[test]
    fn closure_of_half_diagonal() {
        let p2 = builtins::sk().power(2).unwrap();
        let g = p2.encode_names(&["n", "n"]).unwrap();
        let sub = subalgebra_closure(&p2, &BTreeSet::from([g])).unwrap();
        assert_eq!(sub.carrier(), &[g]);
    }

    /// Smallest closed subset of SK^2 containing all of `gens`, by scanning
    /// all 2^9 subsets. Independent of the worklist closure.
    fn smallest_closed_superset(p2: &PowerAlgebra, gens: &[usize]) -> Vec<usize> {
        let mut best: Option<BTreeSet<usize>> = None;
        for mask in 1u32..(1 << 9) {
            if gens.iter().any(|&g| mask & (1 << g) == 0) {
                continue;
            }
            let codes: BTreeSet<usize> = (0..9).filter(|&c| mask & (1 << c) != 0).collect();
            if SubalgebraOfPower::is_closed_subset(p2, &codes)
                && best.as_ref().is_none_or(|b| codes.len() < b.len())
            {
                best = Some(codes);
            }
        }
        best.unwrap().into_iter().collect()
    }

    #[test]
    fn closure_of_0n_alone_is_a_two_element_carrier() {
        // Every unary SK term fixes n coordinatewise, so the closure of the
        // single tuple (0,n) cannot reach any Boolean tuple: it is exactly
        // {(0,n), (1,n)}.
        let p2 = builtins::sk().power(2).unwrap();
        let g = p2.encode_names(&["0", "n"]).unwrap();
        let sub = subalgebra_closure(&p2, &BTreeSet::from([g])).unwrap();
        let expected =
            vec![g, p2.encode_names(&["1", "n"]).unwrap()];
        assert_eq!(sub.carrier(), expected.as_slice());
        assert_eq!(sub.carrier(), smallest_closed_superset(&p2, &[g]).as_slice());
    }

    #[test]
    fn closure_of_0n_and_11_is_the_four_chain() {
        let p2 = builtins::sk().power(2).unwrap();
        let a = p2.encode_names(&["0", "n"]).unwrap();
        let top = p2.encode_names(&["1", "1"]).unwrap();
        let sub = subalgebra_closure(&p2, &BTreeSet::from([a, top])).unwrap();
        let mut expected: Vec<usize> = [["0", "0"], ["0", "n"], ["1", "n"], ["1", "1"]]
            .iter()
            .map(|names| p2.encode_names(&[names[0], names[1]]).unwrap())
            .collect();
        expected.sort_unstable();
        assert_eq!(sub.carrier(), expected.as_slice());
        assert_eq!(sub.carrier(), smallest_closed_superset(&p2, &[a, top]).as_slice());
    }

    #[test]
    fn closure_of_full_universe_is_full() {
        let p2 = builtins::wk().power(2).unwrap();
        let all: BTreeSet<usize> = (0..9).collect();
        let sub = subalgebra_closure(&p2, &all).unwrap();
        assert_eq!(sub.len(), 9);
    }

    #[test]
    fn empty_generators_rejected() {
        let p1 = builtins::sk().power(1).unwrap();
        assert_eq!(
            subalgebra_closure(&p1, &BTreeSet::new()).unwrap_err(),
            AlgebraError::EmptyGenerators
        );
    }

    #[test]
    fn sk1_has_exactly_three_subuniverses() {
        let p1 = builtins::sk().power(1).unwrap();
        let survey = all_subuniverses(&p1, SubuniverseMode::Exhaustive).unwrap();
        assert!(survey.complete);
        let carriers: Vec<Vec<usize>> =
            survey.carriers.iter().map(|c| c.carrier().to_vec()).collect();
        assert_eq!(carriers, vec![vec![1], vec![0, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn b2_has_exactly_one_subuniverse() {
        let p1 = builtins::b2().power(1).unwrap();
        let survey = all_subuniverses(&p1, SubuniverseMode::Exhaustive).unwrap();
        assert_eq!(survey.carriers.len(), 1);
        assert_eq!(survey.carriers[0].carrier(), &[0, 1]);
    }

    #[test]
    fn generated_mode_contains_k4() {
        // K4 is 2-generated (no single generator reaches its Boolean ends),
        // so it shows up at bound 2 and not at bound 1.
        let p2 = builtins::sk().power(2).unwrap();
        let a = p2.encode_names(&["0", "n"]).unwrap();
        let top = p2.encode_names(&["1", "1"]).unwrap();
        let k4 = subalgebra_closure(&p2, &BTreeSet::from([a, top])).unwrap();

        let survey1 = all_subuniverses(&p2, SubuniverseMode::Generated(1)).unwrap();
        assert!(!survey1.complete);
        assert!(!survey1.carriers.iter().any(|c| c.carrier() == k4.carrier()));

        let survey2 = all_subuniverses(&p2, SubuniverseMode::Generated(2)).unwrap();
        assert!(survey2.carriers.iter().any(|c| c.carrier() == k4.carrier()));
    }

    #[test]
    fn exhaustive_mode_rejected_on_oversized_power() {
        let p3 = builtins::sk().power(3).unwrap();
        assert!(matches!(
            all_subuniverses(&p3, SubuniverseMode::Exhaustive),
            Err(AlgebraError::ExhaustiveTooLarge { size: 27, .. })
        ));
    }

    #[test]
    fn exhaustive_carriers_are_exactly_the_closed_subsets() {
        let p2 = builtins::sk().power(2).unwrap();
        let survey = all_subuniverses(&p2, SubuniverseMode::Exhaustive).unwrap();
        let mut direct = Vec::new();
        for mask in 1u32..(1 << 9) {
            let codes: BTreeSet<usize> = (0..9).filter(|&c| mask & (1 << c) != 0).collect();
            if SubalgebraOfPower::is_closed_subset(&p2, &codes) {
                direct.push(codes.into_iter().collect::<Vec<_>>());
            }
        }
        direct.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
        let got: Vec<Vec<usize>> = survey.carriers.iter().map(|c| c.carrier().to_vec()).collect();
        assert_eq!(got, direct);
    }

    #[test]
    fn congruences_of_small_algebras() {
        let b2 = builtins::b2();
        let cs = congruences(&b2);
        assert_eq!(cs, vec![Congruence::total(2), Congruence::identity(2)]);

        let sk = builtins::sk();
        let cs = congruences(&sk);
        assert!(cs.contains(&Congruence::identity(3)));
        assert!(cs.contains(&Congruence::total(3)));
        // oracle: partition enumeration (5 partitions of a 3-set)
        assert_eq!(cs, congruences_by_partitions(&sk));

        let one = FiniteAlgebra::new(
            "one",
            vec!["*".into()],
            Signature::new(vec![("neg", 1)]).unwrap(),
            vec![vec![0]],
        )
        .unwrap();
        assert_eq!(congruences(&one).len(), 1);
    }

    #[test]
    fn principal_join_route_agrees_with_partition_route() {
        for alg in [builtins::b2(), builtins::sk(), builtins::wk(), builtins::s3_printed()] {
            assert_eq!(congruences_by_partitions(&alg), congruences_by_principal_joins(&alg));
        }
    }

    #[test]
    fn leibniz_examples() {
        let sk1 = Matrix::from_names(builtins::sk(), &["1"]).unwrap();
        assert!(leibniz_congruence(&sk1).is_identity());

        let full = Matrix::from_names(builtins::sk(), &["0", "n", "1"]).unwrap();
        assert!(leibniz_congruence(&full).is_total());

        let b2 = Matrix::from_names(builtins::b2(), &["1"]).unwrap();
        assert!(leibniz_congruence(&b2).is_identity());
    }

    #[test]
    fn leibniz_is_maximal_on_small_algebras() {
        for matrix in [
            Matrix::from_names(builtins::sk(), &["1"]).unwrap(),
            Matrix::from_names(builtins::sk(), &["1", "n"]).unwrap(),
            Matrix::from_names(builtins::wk(), &["1"]).unwrap(),
            Matrix::from_names(builtins::b2(), &["1"]).unwrap(),
        ] {
            let leibniz = leibniz_congruence(&matrix);
            for c in congruences(&matrix.algebra) {
                if c.saturates(matrix.designated()) {
                    assert!(c.refines(&leibniz));
                }
            }
        }
    }
}
