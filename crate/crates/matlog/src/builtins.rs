//! The stock three-valued algebras and the nine built-in matrices.
//!
//! Universe order is fixed as `["0", "n", "1"]` ("n" is the non-classical
//! middle value, kept ASCII). Tables are flat row-major over that order.
//!
//! `S3` ships in two variants. The `AsPrinted` tables carry an `or` entry
//! `0|0 = 1` that breaks the two-element Boolean subreduct; the `Demorgan`
//! variant rebuilds `or` as `~(~x & ~y)` from the printed `and`. For `Z3`
//! the two variants coincide, since its printed `or` already equals its
//! De Morgan reconstruction. Nothing is corrected silently: the difference
//! between variants is reported by [`variant_diff`].

use crate::algebra::{FiniteAlgebra, Matrix, Signature};

pub const OP_AND: &str = "and";
pub const OP_OR: &str = "or";
pub const OP_NEG: &str = "neg";
pub const OP_IMP: &str = "imp";
pub const OP_DELTA1: &str = "delta1";

/// Which table set to use for the algebras whose printed tables are
/// internally suspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    AsPrinted,
    Demorgan,
}

fn three_universe() -> Vec<String> {
    vec!["0".into(), "n".into(), "1".into()]
}

fn kleene_signature() -> Signature {
    Signature::new(vec![(OP_AND, 2), (OP_OR, 2), (OP_NEG, 1)]).unwrap()
}

fn imp_signature() -> Signature {
    Signature::new(vec![(OP_AND, 2), (OP_OR, 2), (OP_NEG, 1), (OP_IMP, 2)]).unwrap()
}

const NEG3: [usize; 3] = [2, 1, 0];

/// Strong Kleene: meet/join over the chain 0 < n < 1.
pub fn sk() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "SK",
        three_universe(),
        kleene_signature(),
        vec![
            vec![0, 0, 0, 0, 1, 1, 0, 1, 2],
            vec![0, 1, 2, 1, 1, 2, 2, 2, 2],
            NEG3.to_vec(),
        ],
    )
    .unwrap()
}

/// Weak Kleene: the middle value contaminates every operation.
pub fn wk() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "WK",
        three_universe(),
        kleene_signature(),
        vec![
            vec![0, 1, 0, 1, 1, 1, 0, 1, 2],
            vec![0, 1, 2, 1, 1, 1, 2, 1, 2],
            NEG3.to_vec(),
        ],
    )
    .unwrap()
}

/// The three-element Lukasiewicz chain: SK plus the residuated implication.
pub fn l3() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "L3",
        three_universe(),
        imp_signature(),
        vec![
            vec![0, 0, 0, 0, 1, 1, 0, 1, 2],
            vec![0, 1, 2, 1, 1, 2, 2, 2, 2],
            NEG3.to_vec(),
            vec![2, 2, 2, 1, 2, 2, 0, 1, 2],
        ],
    )
    .unwrap()
}

/// Sobocinski tables exactly as printed, including `0|0 = 1`.
pub fn s3_printed() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "S3",
        three_universe(),
        kleene_signature(),
        vec![
            vec![0, 0, 0, 0, 1, 2, 0, 2, 2],
            vec![2, 0, 2, 0, 1, 2, 2, 2, 2],
            NEG3.to_vec(),
        ],
    )
    .unwrap()
}

/// Sobocinski tables with `or` rebuilt as `~(~x & ~y)` from the printed `and`.
pub fn s3_demorgan() -> FiniteAlgebra {
    demorgan_or(&s3_printed())
}

/// The RM3 algebra as printed: Kleene lattice operations plus the
/// Sobocinski implication.
pub fn z3_printed() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "Z3",
        three_universe(),
        imp_signature(),
        vec![
            vec![0, 0, 0, 0, 1, 1, 0, 1, 2],
            vec![0, 1, 2, 1, 1, 2, 2, 2, 2],
            NEG3.to_vec(),
            vec![2, 2, 2, 0, 1, 2, 0, 0, 2],
        ],
    )
    .unwrap()
}

/// De Morgan variant of Z3. Coincides with the printed tables.
pub fn z3_demorgan() -> FiniteAlgebra {
    demorgan_or(&z3_printed())
}

/// The two-element Boolean algebra over `["0", "1"]`.
pub fn b2() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "B2",
        vec!["0".into(), "1".into()],
        kleene_signature(),
        vec![vec![0, 0, 0, 1], vec![0, 1, 1, 1], vec![1, 0]],
    )
    .unwrap()
}

/// Replace the `or` table by `~(~x & ~y)` computed from the algebra's own
/// `and` and `neg`.
pub fn demorgan_or(algebra: &FiniteAlgebra) -> FiniteAlgebra {
    let n = algebra.size();
    let and = algebra.signature().index_of(OP_AND).expect("and present");
    let neg = algebra.signature().index_of(OP_NEG).expect("neg present");
    let or = algebra.signature().index_of(OP_OR).expect("or present");
    let mut table = vec![0; n * n];
    for (idx, slot) in table.iter_mut().enumerate() {
        let (x, y) = (idx / n, idx % n);
        let nx = algebra.apply(neg, &[x]);
        let ny = algebra.apply(neg, &[y]);
        *slot = algebra.apply(neg, &[algebra.apply(and, &[nx, ny])]);
    }
    let mut tables: Vec<Vec<usize>> =
        (0..algebra.signature().ops().len()).map(|i| algebra.table(i).to_vec()).collect();
    tables[or] = table;
    FiniteAlgebra::new(&algebra.name, algebra.universe().to_vec(), algebra.signature().clone(), tables)
        .unwrap()
}

/// One entry where two same-signature algebras disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDiff {
    pub op: String,
    pub args: Vec<String>,
    pub left: String,
    pub right: String,
}

/// All pointwise table disagreements between two algebras over the same
/// universe and signature.
pub fn variant_diff(left: &FiniteAlgebra, right: &FiniteAlgebra) -> Vec<TableDiff> {
    assert_eq!(left.universe(), right.universe());
    assert_eq!(left.signature(), right.signature());
    let n = left.size();
    let mut out = Vec::new();
    for (i, op) in left.signature().ops().iter().enumerate() {
        let count = n.pow(op.arity as u32);
        let mut args = vec![0; op.arity];
        for idx in 0..count {
            let mut rem = idx;
            for j in (0..op.arity).rev() {
                args[j] = rem % n;
                rem /= n;
            }
            let l = left.apply(i, &args);
            let r = right.apply(i, &args);
            if l != r {
                out.push(TableDiff {
                    op: op.name.clone(),
                    args: args.iter().map(|&a| left.element_name(a).to_string()).collect(),
                    left: left.element_name(l).to_string(),
                    right: right.element_name(r).to_string(),
                });
            }
        }
    }
    out
}

/// Names of the nine built-in logics, in presentation order.
pub const LOGIC_NAMES: [&str; 9] = ["K3", "LP", "B", "PWK", "RM3", "S", "St", "L3", "J3"];

/// Look up a built-in logic's defining matrix.
///
/// `variant` selects the table set for the S3- and Z3-based logics and is
/// ignored by the others. `CL` (classical logic over `B2`) is also available.
pub fn builtin_matrix(name: &str, variant: Variant) -> Option<Matrix> {
    let pick3 = |printed: FiniteAlgebra, demorgan: FiniteAlgebra| match variant {
        Variant::AsPrinted => printed,
        Variant::Demorgan => demorgan,
    };
    let m = match name {
        "K3" => Matrix::from_names(sk(), &["1"]),
        "LP" => Matrix::from_names(sk(), &["1", "n"]),
        "B" => Matrix::from_names(wk(), &["1"]),
        "PWK" => Matrix::from_names(wk(), &["1", "n"]),
        "RM3" => Matrix::from_names(pick3(z3_printed(), z3_demorgan()), &["1", "n"]),
        "S" => Matrix::from_names(pick3(s3_printed(), s3_demorgan()), &["1", "n"]),
        "St" => Matrix::from_names(pick3(s3_printed(), s3_demorgan()), &["1"]),
        "L3" => Matrix::from_names(l3(), &["1"]),
        "J3" => Matrix::from_names(l3(), &["1", "n"]),
        "CL" => Matrix::from_names(b2(), &["1"]),
        _ => return None,
    };
    Some(m.expect("built-in designated sets are valid"))
}

/// The default table variant for a built-in logic: the one under which the
/// logic is actually subclassical (De Morgan for S/St; printed otherwise).
pub fn default_variant(name: &str) -> Variant {
    match name {
        "S" | "St" => Variant::Demorgan,
        _ => Variant::AsPrinted,
    }
}
