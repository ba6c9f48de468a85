//! Matrix file format: `{"dim": n, "re": [[...]], "im": [[...]]}`, row-major,
//! with `im` omitted for real matrices. The loader tolerates Hermiticity
//! violations up to `1e-10` on the raw entries and hands back the symmetrized
//! operator; anything worse is rejected with the offending entry named.

use super::matrix::{CMatrix, Complex, HermitianOperator};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Hermiticity slack accepted from files (looser than the in-memory
/// constructor, which sees only already-symmetrized data).
pub const FILE_HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

fn check_shape(name: &str, grid: &[Vec<f64>], dim: usize) -> Result<()> {
    if grid.len() != dim || grid.iter().any(|row| row.len() != dim) {
        return Err(Error::MatrixFormat {
            reason: format!("'{name}' must be a {dim} x {dim} grid"),
        });
    }
    Ok(())
}

/// Parses a matrix document into a validated Hermitian operator.
pub fn parse_hermitian(text: &str) -> Result<HermitianOperator> {
    let file: MatrixFile = serde_json::from_str(text)?;
    if file.dim == 0 {
        return Err(Error::MatrixFormat {
            reason: "'dim' must be at least 1".into(),
        });
    }
    check_shape("re", &file.re, file.dim)?;
    if let Some(im) = &file.im {
        check_shape("im", im, file.dim)?;
    }
    let m = CMatrix::from_fn(file.dim, |i, j| {
        let im = file.im.as_ref().map_or(0.0, |g| g[i][j]);
        Complex::new(file.re[i][j], im)
    });
    HermitianOperator::new_with_tolerance(m, FILE_HERMITICITY_TOL)
}

/// Loads a Hermitian operator from a matrix file on disk.
pub fn load_hermitian(path: &Path) -> Result<HermitianOperator> {
    parse_hermitian(&std::fs::read_to_string(path)?)
}

/// Serializes an operator in the matrix file format. The `im` block is
/// dropped when every entry is real, so real matrices round-trip compactly.
pub fn to_json_string(h: &HermitianOperator) -> String {
    let n = h.dim();
    let re: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| h.get(i, j).re).collect())
        .collect();
    let any_imag = (0..n).any(|i| (0..n).any(|j| h.get(i, j).im != 0.0));
    let im = any_imag.then(|| {
        (0..n)
            .map(|i| (0..n).map(|j| h.get(i, j).im).collect())
            .collect()
    });
    serde_json::to_string(&MatrixFile { dim: n, re, im }).expect("plain floats serialize")
}
