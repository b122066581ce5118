use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;

use crate::diffusion::EpsilonScan;
use crate::error::{Error, Result};

/// Formats a double with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Format(format!("{}: {other:?}", path.display())),
    }
}

pub(crate) fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

/// Writes a matrix as CSV with header `c0,c1,...`, one row per line.
pub fn write_matrix_csv(m: &DMatrix<f64>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let header: Vec<String> = (0..m.ncols()).map(|j| format!("c{j}")).collect();
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for row in m.row_iter() {
        w.write_record(row.iter().map(|v| format_f64(*v))).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a matrix written by [`write_matrix_csv`] (any header is skipped).
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let ncols = r.headers().map_err(|e| csv_err(path, e))?.len();
    let mut values = Vec::new();
    let mut nrows = 0;
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != ncols {
            return Err(Error::Format(format!("{}: row {} has {} fields, expected {ncols}", path.display(), i + 1, rec.len())));
        }
        for field in rec.iter() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("{}: row {}: cannot parse {field:?}", path.display(), i + 1)))?;
            values.push(v);
        }
        nrows += 1;
    }
    if nrows == 0 || ncols == 0 {
        return Err(Error::Format(format!("{}: no data rows", path.display())));
    }
    Ok(DMatrix::from_row_slice(nrows, ncols, &values))
}

/// Writes the scan as `log_eps,log_S,slope`; the last row has no slope and
/// holds `NaN`.
pub fn write_epsilon_scan(scan: &EpsilonScan, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["log_eps", "log_S", "slope"]).map_err(|e| csv_err(path, e))?;
    for i in 0..scan.log_eps.len() {
        let slope = scan.slopes.get(i).copied().unwrap_or(f64::NAN);
        w.write_record([format_f64(scan.log_eps[i]), format_f64(scan.log_s[i]), format_f64(slope)])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
