//! Space file ingestion and emission. Two formats carry the same data: a
//! JSON object `{"labels": [...], "matrix": [["0","1/2"],...]}` and a CSV
//! file whose first row is the labels. Matrix entries are rational
//! strings (`"3/4"`, `"2"`, or exact decimals); emission always uses the
//! canonical `p/q` form.

use crate::metric::{FiniteMetricSpace, MetricError};
use crate::rat::{format_rational, parse_rational, ParseRationalError, Rat};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpaceFileError {
    #[error("unsupported file extension: {0} (expected .json or .csv)")]
    UnknownFormat(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("entry ({row},{col}): {source}")]
    BadEntry {
        row: usize,
        col: usize,
        source: ParseRationalError,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct SpaceFileJson {
    labels: Vec<String>,
    matrix: Vec<Vec<String>>,
}

pub fn parse_space_json(text: &str) -> Result<FiniteMetricSpace, SpaceFileError> {
    let file: SpaceFileJson = serde_json::from_str(text)?;
    build(file.labels, file.matrix)
}

pub fn parse_space_csv(text: &str) -> Result<FiniteMetricSpace, SpaceFileError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = reader
        .headers()?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut matrix = Vec::new();
    for record in reader.records() {
        let record = record?;
        matrix.push(record.iter().map(|s| s.to_string()).collect());
    }
    build(labels, matrix)
}

fn build(labels: Vec<String>, matrix: Vec<Vec<String>>) -> Result<FiniteMetricSpace, SpaceFileError> {
    let mut parsed: Vec<Vec<Rat>> = Vec::with_capacity(matrix.len());
    for (i, row) in matrix.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (j, entry) in row.iter().enumerate() {
            out.push(parse_rational(entry).map_err(|source| SpaceFileError::BadEntry {
                row: i,
                col: j,
                source,
            })?);
        }
        parsed.push(out);
    }
    Ok(FiniteMetricSpace::validate(parsed, labels)?)
}

/// Canonical JSON emission; `parse(emit(x)) == x` entrywise.
pub fn emit_space_json(space: &FiniteMetricSpace) -> String {
    let file = SpaceFileJson {
        labels: space.labels().to_vec(),
        matrix: space
            .matrix()
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn emit_space_csv(space: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    out.push_str(&space.labels().join(","));
    out.push('\n');
    for row in space.matrix() {
        let cells: Vec<String> = row.iter().map(format_rational).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Loads a space from a path, dispatching on the extension.
pub fn load_space(path: &std::path::Path) -> Result<FiniteMetricSpace, SpaceFileError> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_space_json(&text),
        Some("csv") => parse_space_csv(&text),
        other => Err(SpaceFileError::UnknownFormat(
            other.unwrap_or("<none>").to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces;

    #[test]
    fn json_round_trip_preserves_entries() {
        let s = spaces::grid(4);
        let text = emit_space_json(&s);
        let back = parse_space_json(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_and_json_ingest_identically() {
        let s = spaces::random_space(5, 11);
        let from_json = parse_space_json(&emit_space_json(&s)).unwrap();
        let from_csv = parse_space_csv(&emit_space_csv(&s)).unwrap();
        assert_eq!(from_json, from_csv);
        assert_eq!(from_json, s);
    }

    #[test]
    fn decimals_parse_exactly() {
        let text = r#"{"labels": ["a", "b"], "matrix": [["0", "0.25"], ["1/4", "0"]]}"#;
        let s = parse_space_json(text).unwrap();
        assert_eq!(*s.dist(0, 1), crate::rat::rat(1, 4));
    }

    #[test]
    fn bad_entries_are_located() {
        let text = r#"{"labels": ["a", "b"], "matrix": [["0", "x"], ["1", "0"]]}"#;
        match parse_space_json(text) {
            Err(SpaceFileError::BadEntry { row: 0, col: 1, .. }) => {}
            other => panic!("expected BadEntry, got {other:?}"),
        }
    }

    #[test]
    fn metric_violations_surface_through_parsing() {
        let text = r#"{"labels": ["a", "b"], "matrix": [["0", "1"], ["2", "0"]]}"#;
        assert!(matches!(
            parse_space_json(text),
            Err(SpaceFileError::Metric(MetricError::Asymmetric { .. }))
        ));
    }
}
