//! JSON matrix files: `{"rows": n, "cols": m, "entries": [[re, im], ...]}`,
//! entries row-major.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HackError, Result};
use crate::limits::check_elements;
use crate::tensor::{ComplexMatrix, C64};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = HackError;

    fn try_from(f: MatrixFile) -> Result<Self> {
        check_elements("matrix file", f.rows as u128 * f.cols as u128)?;
        if f.entries.len() != f.rows * f.cols {
            return Err(HackError::Shape(format!(
                "matrix file declares {}x{} but holds {} entries",
                f.rows,
                f.cols,
                f.entries.len()
            )));
        }
        let data = f.entries.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::new(f.rows, f.cols, data)
    }
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| HackError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.try_into()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixFile::from(m)).expect("matrix serialization is infallible")
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_wrong_counts() {
        let m = matrix_from_json(r#"{"rows":1,"cols":2,"entries":[[1,0],[0.5,-2]]}"#).unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.5, -2.0));
        let err = matrix_from_json(r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#).unwrap_err();
        assert!(matches!(err, HackError::Shape(_)));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = matrix_from_json("{\n  \"rows\": 1,\n  \"cols\": x }").unwrap_err();
        match err {
            HackError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(0.1 * i as f64 + 1e-17, -(j as f64) / 3.0));
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
    }
}
