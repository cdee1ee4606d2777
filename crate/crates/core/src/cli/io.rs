//! Matrix files: JSON `{"dim": n, "rows": [[…]]}` or plain CSV rows, chosen by
//! extension. Numbers are written with 17 significant digits so that reading
//! the output back reproduces every value exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use super::CliError;

/// `x` with 17 significant digits, e.g. `1.7320508075688772e0`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn fmt_row(row: impl IntoIterator<Item = f64>, sep: &str) -> String {
    row.into_iter().map(fmt_num).collect::<Vec<_>>().join(sep)
}

/// Compact one-line JSON `{"dim":n,"rows":[[…],…]}`.
pub fn matrix_json(m: &DMatrix<f64>) -> String {
    let mut s = format!("{{\"dim\":{},\"rows\":[", m.nrows());
    for (i, row) in m.row_iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "[{}]", fmt_row(row.iter().copied(), ","));
    }
    s.push_str("]}");
    s
}

pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    m.row_iter()
        .map(|row| fmt_row(row.iter().copied(), ",") + "\n")
        .collect()
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

#[derive(Deserialize)]
struct MatrixFile {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

fn square(rows: Vec<Vec<f64>>, path: &Path) -> Result<DMatrix<f64>, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input(format!("{}: expected a nonempty square matrix", path.display())));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let io_err = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", path.display()));
    if is_csv(path) {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| io_err(&e))?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| io_err(&e))?;
            let row = record
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| io_err(&format!("{f:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        square(rows, path)
    } else {
        let text = fs::read_to_string(path).map_err(|e| io_err(&e))?;
        let file: MatrixFile = serde_json::from_str(&text).map_err(|e| io_err(&e))?;
        if file.dim != file.rows.len() {
            return Err(io_err(&format!("dim is {} but there are {} rows", file.dim, file.rows.len())));
        }
        square(file.rows, path)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes a matrix to `path` in the format its extension implies.
pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<(), CliError> {
    let body = if is_csv(path) {
        matrix_csv(m)
    } else {
        matrix_json(m) + "\n"
    };
    fs::write(path, body).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
