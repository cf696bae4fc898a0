//! File formats: CSV data matrices, label files, dataset sidecars.
//!
//! CSV files are comma separated with one observation per row. A first row
//! containing any non-numeric field is treated as a header. Values are
//! written in Rust's shortest round-trip notation, so a written matrix reads
//! back bit for bit.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{DataMatrix, LabelVector};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] crate::Error),
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IoError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn is_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

/// Parses a CSV data matrix. Structural problems are [`IoError::Parse`];
/// a well-formed table that violates [`DataMatrix`] invariants (too few
/// rows, non-finite values) is [`IoError::Invalid`].
pub fn read_data_csv<R: Read>(reader: R) -> Result<(DataMatrix, Option<Vec<String>>), IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut header = None;
    let mut values = Vec::new();
    let mut n_rows = 0;
    let mut n_cols = None;
    for (idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| IoError::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        if idx == 0 && !record.iter().all(is_numeric) {
            header = Some(record.iter().map(str::to_owned).collect());
            n_cols = Some(record.len());
            continue;
        }
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let expected = *n_cols.get_or_insert(record.len());
        if record.len() != expected {
            return Err(IoError::Parse {
                line: idx + 1,
                msg: format!("{} fields, expected {expected}", record.len()),
            });
        }
        for field in record.iter() {
            values.push(field.parse::<f64>().map_err(|_| IoError::Parse {
                line: idx + 1,
                msg: format!("not a number: {field:?}"),
            })?);
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(IoError::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    let x = DataMatrix::new(n_rows, n_cols.unwrap_or(0), values)?;
    Ok((x, header))
}

pub fn read_data_file(path: &Path) -> Result<DataMatrix, IoError> {
    read_data_csv(open(path)?).map(|(x, _)| x)
}

pub fn write_data_csv<W: Write>(mut w: W, x: &DataMatrix) -> std::io::Result<()> {
    let mut line = String::new();
    for row in x.rows() {
        line.clear();
        for (s, v) in row.iter().enumerate() {
            if s > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

/// Dataset sidecar written next to an exported CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub generator: String,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub spec: serde_json::Value,
    pub realized_rho: Option<Vec<f64>>,
    pub rejections: u64,
    /// 1-based true labels.
    pub truth: Vec<usize>,
}

/// Reads 1-based labels from a sidecar JSON (its `truth` field) or from a
/// text file of integers separated by commas or whitespace. A non-numeric
/// first token is skipped as a header.
pub fn read_labels_file(path: &Path) -> Result<LabelVector, IoError> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| IoError::Io {
            path: path.display().to_string(),
            source,
        })?;
    let labels = if path.extension().is_some_and(|e| e == "json") {
        let meta: DatasetMetadata = serde_json::from_str(&text).map_err(|e| IoError::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        meta.truth
    } else {
        parse_labels(&text)?
    };
    Ok(LabelVector::from_one_based(&labels)?)
}

fn parse_labels(text: &str) -> Result<Vec<usize>, IoError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            match tok.parse::<usize>() {
                Ok(v) => out.push(v),
                Err(_) if out.is_empty() && lineno == 0 => {}
                Err(_) => {
                    return Err(IoError::Parse {
                        line: lineno + 1,
                        msg: format!("not a label: {tok:?}"),
                    })
                }
            }
        }
    }
    Ok(out)
}

pub fn write_labels<W: Write>(mut w: W, labels: &LabelVector) -> std::io::Result<()> {
    for l in labels.to_one_based() {
        writeln!(w, "{l}")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_header() {
        let (x, header) = read_data_csv("g1,g2\n1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(header.unwrap(), vec!["g1", "g2"]);
        assert_eq!(x.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        let (x, header) = read_data_csv("1, 2\n3,4.5e1\n".as_bytes()).unwrap();
        assert!(header.is_none());
        assert_eq!(x.as_slice(), &[1.0, 2.0, 3.0, 45.0]);
    }

    #[test]
    fn parse_failures() {
        assert!(matches!(read_data_csv("1,2\n3,x\n".as_bytes()), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(read_data_csv("1,2\n3\n".as_bytes()), Err(IoError::Parse { .. })));
        assert!(matches!(read_data_csv("".as_bytes()), Err(IoError::Parse { .. })));
        assert!(matches!(read_data_csv("1,2\n".as_bytes()), Err(IoError::Invalid(_))));
        assert!(matches!(read_data_csv("1,2\n3,NaN\n".as_bytes()), Err(IoError::Invalid(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        let x = DataMatrix::new(2, 3, vec![0.1, -1e-300, std::f64::consts::PI, 1e300, 5e-324, -0.0])
            .unwrap();
        let mut buf = Vec::new();
        write_data_csv(&mut buf, &x).unwrap();
        let (y, _) = read_data_csv(buf.as_slice()).unwrap();
        assert_eq!(
            x.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            y.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn label_text() {
        assert_eq!(parse_labels("label\n1\n2\n2\n").unwrap(), vec![1, 2, 2]);
        assert_eq!(parse_labels("1,1,2 3").unwrap(), vec![1, 1, 2, 3]);
        assert!(parse_labels("1\nx\n").is_err());
    }
}
