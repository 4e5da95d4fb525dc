//! On-disk JSON format for algebras and matrices.
//!
//! ```json
//! {
//!   "name": "SK",
//!   "universe": ["0", "n", "1"],
//!   "operations": [
//!     {"name": "and", "arity": 2, "table": ["0","0","0","0","n","n","0","n","1"]}
//!   ],
//!   "designated": ["1"]
//! }
//! ```
//!
//! Tables are flat row-major arrays of element names: for a binary `f`, the
//! entry for `f(a_i, a_j)` sits at index `i·|A| + j`. The canonical textual
//! form is two-space-indented pretty JSON with a trailing newline; the
//! built-in matrices serialize to the canonical files shipped under
//! `data/matrices/` byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Matrix, OpSig, Signature};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperationFile {
    pub name: String,
    pub arity: usize,
    pub table: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixFile {
    pub name: String,
    pub universe: Vec<String>,
    pub operations: Vec<OperationFile>,
    pub designated: Vec<String>,
}

impl MatrixFile {
    pub fn from_matrix(matrix: &Matrix) -> Self {
        let algebra = &matrix.algebra;
        let operations = algebra
            .signature()
            .ops()
            .iter()
            .enumerate()
            .map(|(i, op)| OperationFile {
                name: op.name.clone(),
                arity: op.arity,
                table: algebra
                    .table(i)
                    .iter()
                    .map(|&e| algebra.element_name(e).to_string())
                    .collect(),
            })
            .collect();
        MatrixFile {
            name: algebra.name.clone(),
            universe: algebra.universe().to_vec(),
            operations,
            designated: matrix
                .designated()
                .iter()
                .map(|&e| algebra.element_name(e).to_string())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix, FileError> {
        let signature = Signature::from_opsigs(
            self.operations
                .iter()
                .map(|o| OpSig { name: o.name.clone(), arity: o.arity })
                .collect(),
        )?;
        let index_of = |name: &str| -> Result<usize, AlgebraError> {
            self.universe
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| AlgebraError::UnknownElement(name.to_string()))
        };
        let tables = self
            .operations
            .iter()
            .map(|o| o.table.iter().map(|e| index_of(e)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let algebra =
            FiniteAlgebra::new(&self.name, self.universe.clone(), signature, tables)?;
        let designated = self
            .designated
            .iter()
            .map(|e| index_of(e))
            .collect::<Result<std::collections::BTreeSet<_>, _>>()?;
        Ok(Matrix::new(algebra, designated)?)
    }

    /// Canonical textual form: pretty JSON plus a trailing newline.
    pub fn canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn save_matrix(matrix: &Matrix, path: &Path) -> Result<(), FileError> {
    std::fs::write(path, MatrixFile::from_matrix(matrix).canonical_string())?;
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<Matrix, FileError> {
    let text = std::fs::read_to_string(path)?;
    let file: MatrixFile = serde_json::from_str(&text)?;
    file.to_matrix()
}

/// Path of the canonical file shipped for a built-in logic (its default
/// table variant), e.g. `data/matrices/k3.json` inside this crate.
pub fn canonical_matrix_path(logic_name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/matrices")
        .join(format!("{}.json", logic_name.to_lowercase()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{self, Variant};

    #[test]
    fn matrix_file_roundtrip() {
        for name in builtins::LOGIC_NAMES {
            let m = builtins::builtin_matrix(name, builtins::default_variant(name)).unwrap();
            let file = MatrixFile::from_matrix(&m);
            let back = file.to_matrix().unwrap();
            assert_eq!(back, m, "{name}");
            // canonical text reparses to the same wire struct
            let reparsed: MatrixFile = serde_json::from_str(&file.canonical_string()).unwrap();
            assert_eq!(reparsed, file);
        }
    }

    #[test]
    fn row_major_convention() {
        let m = builtins::builtin_matrix("K3", Variant::AsPrinted).unwrap();
        let file = MatrixFile::from_matrix(&m);
        let and = file.operations.iter().find(|o| o.name == "and").unwrap();
        // and(n, 1) lives at index 1*3 + 2 = 5 and is n
        assert_eq!(and.table[5], "n");
    }

    #[test]
    #[ignore = "rewrites the canonical files under data/matrices; run by hand after a deliberate table change"]
    fn regenerate_canonical_files() {
        std::fs::create_dir_all(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/matrices"),
        )
        .unwrap();
        for name in builtins::LOGIC_NAMES {
            let m = builtins::builtin_matrix(name, builtins::default_variant(name)).unwrap();
            save_matrix(&m, &canonical_matrix_path(name)).unwrap();
        }
    }

    #[test]
    fn canonical_files_are_bit_exact() {
        for name in builtins::LOGIC_NAMES {
            let m = builtins::builtin_matrix(name, builtins::default_variant(name)).unwrap();
            let expected = MatrixFile::from_matrix(&m).canonical_string();
            let on_disk = std::fs::read_to_string(canonical_matrix_path(name)).unwrap();
            assert_eq!(on_disk, expected, "canonical file for {name} is stale");
            assert_eq!(load_matrix(&canonical_matrix_path(name)).unwrap(), m);
        }
    }

    #[test]
    fn bad_files_are_rejected() {
        let mut file = MatrixFile::from_matrix(
            &builtins::builtin_matrix("K3", Variant::AsPrinted).unwrap(),
        );
        file.operations[0].table.pop();
        assert!(matches!(
            file.to_matrix(),
            Err(FileError::Algebra(AlgebraError::TableSize { .. }))
        ));

        let mut file2 = MatrixFile::from_matrix(
            &builtins::builtin_matrix("K3", Variant::AsPrinted).unwrap(),
        );
        file2.designated = vec!["2".into()];
        assert!(file2.to_matrix().is_err());
    }
}
