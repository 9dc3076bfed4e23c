//! CSV ingestion and emission, and the JSON selection report.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Deserialize;
use thiserror::Error;

use crate::evidence::EvidenceCurve;
use crate::linalg::DataMatrix;
use crate::selection::SelectionReport;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: io::Error },

    #[error("input contains no data rows")]
    Empty,

    /// `row` counts physical lines from 1, header included.
    #[error("row {row} has {found} fields, expected {expected}")]
    Ragged { row: u64, expected: usize, found: usize },

    #[error("row {row}, column {column}: '{value}' is not a finite number")]
    NonNumeric { row: u64, column: usize, value: String },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Data(#[from] crate::Error),
}

impl IoError {
    /// Stable identifier for each failure kind.
    pub fn code(&self) -> &'static str {
        match self {
            IoError::File { .. } => "io",
            IoError::Empty => "empty",
            IoError::Ragged { .. } => "ragged",
            IoError::NonNumeric { .. } => "non_numeric",
            IoError::Csv(_) => "csv",
            IoError::Json(_) => "json",
            IoError::Data(_) => "data",
        }
    }
}

fn file_error(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::File { path: path.to_path_buf(), source }
}

pub fn read_csv(path: &Path, has_header: bool) -> Result<DataMatrix, IoError> {
    let file = File::open(path).map_err(file_error(path))?;
    read_csv_from(file, has_header)
}

/// Parses a rectangular numeric CSV, one observation per row. Numbers use
/// `.` as the decimal point regardless of locale.
pub fn read_csv_from<R: Read>(reader: R, has_header: bool) -> Result<DataMatrix, IoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(has_header).flexible(true).from_reader(reader);
    let mut values = Vec::new();
    let mut width = None;
    let mut nrows = 0;
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(IoError::Ragged { row, expected, found: record.len() });
        }
        for (j, cell) in record.iter().enumerate() {
            match cell.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(IoError::NonNumeric { row, column: j + 1, value: cell.to_owned() }),
            }
        }
        nrows += 1;
    }
    let Some(p) = width else { return Err(IoError::Empty) };
    Ok(DataMatrix::new(DMatrix::from_row_slice(nrows, p, &values))?)
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-5, 1e16)` so that tiny values stay short.
fn fmt_float(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn write_matrix_csv<W: Write>(x: &DMatrix<f64>, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    for row in x.row_iter() {
        let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}

/// One row per `(φ, d)`: `phi,d,log_evidence,a`.
pub fn write_curves_csv<W: Write>(curves: &[EvidenceCurve], out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "phi,d,log_evidence,a")?;
    for c in curves {
        for ((d, l), a) in c.d_values().iter().zip(c.log_evidence()).zip(c.a_used()) {
            writeln!(out, "{},{d},{},{}", fmt_float(c.phi()), fmt_float(*l), fmt_float(*a))?;
        }
    }
    out.flush()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PosteriorEntry {
    pub d: usize,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CurveEntry {
    pub d: usize,
    pub log_evidence: f64,
    pub a: f64,
}

/// The serialized form of a [`SelectionReport`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReportDocument {
    pub chosen_d: usize,
    pub phi_star: f64,
    pub posterior: Vec<PosteriorEntry>,
    pub curve: Vec<CurveEntry>,
    pub warnings: Vec<String>,
}

impl From<&SelectionReport> for ReportDocument {
    fn from(r: &SelectionReport) -> Self {
        let d = r.curve.d_values();
        ReportDocument {
            chosen_d: r.chosen_d,
            phi_star: r.phi_star,
            posterior: d.iter().zip(&r.posterior).map(|(&d, &prob)| PosteriorEntry { d, prob }).collect(),
            curve: d
                .iter()
                .zip(r.curve.log_evidence())
                .zip(r.curve.a_used())
                .map(|((&d, &log_evidence), &a)| CurveEntry { d, log_evidence, a })
                .collect(),
            warnings: r.warnings.clone(),
        }
    }
}

// 17 significant digits; JSON has no non-finite numbers.
fn num17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{{");
        let _ = writeln!(s, "  \"chosen_d\": {},", self.chosen_d);
        let _ = writeln!(s, "  \"phi_star\": {},", num17(self.phi_star));
        let post: Vec<String> =
            self.posterior.iter().map(|e| format!("    {{\"d\": {}, \"prob\": {}}}", e.d, num17(e.prob))).collect();
        let _ = writeln!(s, "  \"posterior\": [\n{}\n  ],", post.join(",\n"));
        let curve: Vec<String> = self
            .curve
            .iter()
            .map(|e| format!("    {{\"d\": {}, \"log_evidence\": {}, \"a\": {}}}", e.d, num17(e.log_evidence), num17(e.a)))
            .collect();
        let _ = writeln!(s, "  \"curve\": [\n{}\n  ],", curve.join(",\n"));
        let warnings: Vec<String> =
            self.warnings.iter().map(|w| serde_json::to_string(w).expect("strings serialize")).collect();
        let _ = writeln!(s, "  \"warnings\": [{}]", warnings.join(", "));
        s.push_str("}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn write_report(report: &SelectionReport, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, ReportDocument::from(report).to_json()).map_err(file_error(path))
}

pub fn read_report(path: &Path) -> Result<ReportDocument, IoError> {
    ReportDocument::from_json(&std::fs::read_to_string(path).map_err(file_error(path))?)
}
