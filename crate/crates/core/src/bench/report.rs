use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::experiment::{ExperimentConfig, RatioEstimate, Shape};
use super::instances::FamilyKind;
use crate::error::{Error, Result};

/// One line of a report. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub algorithm: String,
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k_or_l: usize,
    pub trials: u64,
    pub seed: u64,
    pub mean_ratio: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub const CSV_HEADER: [&str; 12] = [
    "algorithm",
    "family",
    "n",
    "m",
    "d",
    "k_or_l",
    "trials",
    "seed",
    "mean_ratio",
    "stderr",
    "ci_lo",
    "ci_hi",
];

impl ReportRow {
    pub(crate) fn new(cfg: &ExperimentConfig, shape: Option<Shape>, est: &RatioEstimate) -> Self {
        // resampled runs have no single instance; report the family parameters
        let shape = shape.unwrap_or_else(|| {
            let f = &cfg.family;
            let (n, m, d) = match f.kind {
                FamilyKind::HypergraphRandom => (f.r, f.m, f.d),
                FamilyKind::PaddedTriangle => (3 + f.m_aux, 1, 2),
                _ => (f.n, 0, 2),
            };
            Shape {
                n,
                m,
                d,
                k_or_l: cfg.k_or_l.unwrap_or(n / 2),
            }
        });
        ReportRow {
            algorithm: cfg.algorithm.name().to_string(),
            family: cfg.family.kind.name().to_string(),
            n: shape.n,
            m: shape.m,
            d: shape.d,
            k_or_l: shape.k_or_l,
            trials: est.trials,
            seed: cfg.seed,
            mean_ratio: est.mean,
            stderr: est.stderr,
            ci_lo: est.ci_lo,
            ci_hi: est.ci_hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::input(format!(
                "unknown format '{s}' (expected csv or json)"
            ))),
        }
    }
}

/// Serialize rows to any writer. Floats use Rust's shortest round-trip
/// formatting, so equal inputs give equal bytes.
pub fn write_rows<W: Write>(rows: &[ReportRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n").map_err(|e| Error::io("<report>", e))?;
        }
    }
    Ok(())
}

pub fn write_report(rows: &[ReportRow], format: Format, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_rows(rows, format, &mut buf).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Read back a CSV report.
pub fn read_csv_report(path: &Path) -> Result<Vec<ReportRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<ReportRow>, _>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ReportRow {
        ReportRow {
            algorithm: "edge".into(),
            family: "star".into(),
            n: 5,
            m: 4,
            d: 2,
            k_or_l: 2,
            trials: 10,
            seed: 7,
            mean_ratio: 0.5,
            stderr: 0.01,
            ci_lo: 0.4804,
            ci_hi: 0.5196,
        }
    }

    fn csv_of(rows: &[ReportRow]) -> String {
        let mut buf = Vec::new();
        write_rows(rows, Format::Csv, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(csv_of(&[]), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn one_row_has_twelve_fields() {
        let s = csv_of(&[row()]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].split(',').count(), 12);
        assert_eq!(lines[1], "edge,star,5,4,2,2,10,7,0.5,0.01,0.4804,0.5196");
    }

    #[test]
    fn csv_round_trips_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_report(&[row(), row()], Format::Csv, &path).unwrap();
        assert_eq!(read_csv_report(&path).unwrap(), vec![row(), row()]);
    }

    #[test]
    fn json_mirrors_fields() {
        let mut buf = Vec::new();
        write_rows(&[row()], Format::Json, &mut buf).unwrap();
        let back: Vec<ReportRow> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, vec![row()]);
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let err = write_report(&[], Format::Csv, Path::new("/nonexistent/dir/r.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/r.csv"));
    }
}
