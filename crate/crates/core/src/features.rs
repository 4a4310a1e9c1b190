//! Engineered features and the numeric feature matrix.
//!
//! Base columns, in order: hour, month, district, day_of_week, longitude,
//! latitude, street_no, block. Principal component scores, when requested,
//! are appended after `block` as `pca_1..pca_k`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{RawIncident, Weekday};
use crate::matrix::{Matrix, ShapeError};
use crate::pca::{PcaError, PcaModel};

pub const BASE_COLUMNS: [&str; 8] = [
    "hour",
    "month",
    "district",
    "day_of_week",
    "longitude",
    "latitude",
    "street_no",
    "block",
];

/// Name of the optional trailing label column in exported feature CSVs.
pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("unknown district `{0}`")]
    UnknownDistrict(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("no categories to encode")]
    NoCategories,
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("feature CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("feature CSV line {line}: {message}")]
    BadValue { line: u64, message: String },
    #[error("encodings document: {0}")]
    Json(#[from] serde_json::Error),
}

fn street_number_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*([0-9]+)\s+block\s+of\b").expect("valid regex"))
}

fn block_word_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bblock\b").expect("valid regex"))
}

/// Leading number of a `"<N> Block of <street>"` address, otherwise 0.
///
/// Bare leading integers outside the block form are not recognized, and
/// numbers too large for `u64` yield 0.
pub fn extract_street_number(address: &str) -> u64 {
    street_number_pattern()
        .captures(address)
        .and_then(|c| c[1].parse().ok())
        .unwrap_or(0)
}

/// 1 when the address contains the whole word "block" in any case.
pub fn extract_block_flag(address: &str) -> u8 {
    u8::from(block_word_pattern().is_match(address))
}

/// Integer codes for the categorical columns and the label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMaps {
    pub district_index: BTreeMap<String, usize>,
    pub weekday_index: BTreeMap<String, usize>,
    pub category_index: BTreeMap<String, usize>,
}

fn alphabetical_index<'a>(names: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, usize> {
    let mut names: Vec<&str> = names.into_iter().collect();
    names.sort_unstable();
    names.dedup();
    names
        .into_iter()
        .enumerate()
        .map(|(i, n)| (n.to_string(), i))
        .collect()
}

/// Weekdays in alphabetical order, Friday = 0 through Wednesday = 6.
pub fn weekday_codes() -> BTreeMap<String, usize> {
    alphabetical_index(Weekday::ALL.iter().map(|d| d.name()))
}

/// Pretty-printed JSON form of the encodings, newline terminated.
pub fn encodings_to_json(maps: &EncodingMaps) -> String {
    let mut s = serde_json::to_string_pretty(maps).expect("string maps serialize");
    s.push('\n');
    s
}

pub fn encodings_from_json(text: &str) -> Result<EncodingMaps, FeatureError> {
    Ok(serde_json::from_str(text)?)
}

/// Builds alphabetical codes for districts and categories seen in `rows`.
/// Weekday codes are fixed and do not depend on the rows.
pub fn fit_encodings(rows: &[RawIncident]) -> Result<EncodingMaps, FeatureError> {
    let category_index = alphabetical_index(rows.iter().filter_map(|r| r.category.as_deref()));
    if category_index.is_empty() {
        return Err(FeatureError::NoCategories);
    }
    Ok(EncodingMaps {
        district_index: alphabetical_index(rows.iter().map(|r| r.district.as_str())),
        weekday_index: weekday_codes(),
        category_index,
    })
}

impl EncodingMaps {
    pub fn n_classes(&self) -> usize {
        self.category_index.len()
    }

    /// Category names ordered by their code.
    pub fn category_names(&self) -> Vec<String> {
        let mut names: Vec<_> = self.category_index.iter().collect();
        names.sort_by_key(|(_, &i)| i);
        names.into_iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn district_code(&self, district: &str) -> Result<usize, FeatureError> {
        self.district_index
            .get(district)
            .copied()
            .ok_or_else(|| FeatureError::UnknownDistrict(district.to_string()))
    }

    pub fn category_code(&self, category: &str) -> Result<usize, FeatureError> {
        self.category_index
            .get(category)
            .copied()
            .ok_or_else(|| FeatureError::UnknownCategory(category.to_string()))
    }

    fn weekday_code(&self, day: Weekday) -> usize {
        self.weekday_index[day.name()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub values: Matrix,
    pub column_names: Vec<String>,
    /// Category codes, present when every input row carried a category.
    pub labels: Option<Vec<usize>>,
}

impl FeatureMatrix {
    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values.select_rows(indices),
            column_names: self.column_names.clone(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }

    /// The eight base columns, dropping any appended component scores.
    pub fn base_values(&self) -> Matrix {
        self.values.leading_columns(BASE_COLUMNS.len())
    }

    /// Appends PCA score columns computed with `pca` from the base columns.
    pub fn with_pca(&self, pca: &PcaModel) -> Result<FeatureMatrix, FeatureError> {
        let scores = pca.transform(&self.base_values())?;
        let mut column_names: Vec<String> = self.column_names[..BASE_COLUMNS.len()].to_vec();
        column_names.extend((1..=scores.cols()).map(|i| format!("pca_{i}")));
        Ok(FeatureMatrix {
            values: self.base_values().hstack(&scores)?,
            column_names,
            labels: self.labels.clone(),
        })
    }

    /// Writes the matrix as CSV; a trailing `label` column is added when
    /// labels are present.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), FeatureError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header: Vec<&str> = self.column_names.iter().map(String::as_str).collect();
        if self.labels.is_some() {
            header.push(LABEL_COLUMN);
        }
        w.write_record(&header)?;
        let mut buf = Vec::with_capacity(header.len());
        for (i, row) in self.values.iter_rows().enumerate() {
            buf.clear();
            buf.extend(row.iter().map(|v| v.to_string()));
            if let Some(labels) = &self.labels {
                buf.push(labels[i].to_string());
            }
            w.write_record(&buf)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<FeatureMatrix, FeatureError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut column_names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let has_labels = column_names.last().map(String::as_str) == Some(LABEL_COLUMN);
        if has_labels {
            column_names.pop();
        }
        let cols = column_names.len();
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = |message: String| FeatureError::BadValue { line, message };
            for field in record.iter().take(cols) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| bad(format!("not a number: `{field}`")))?;
                data.push(v);
            }
            if has_labels {
                let field = record.get(cols).unwrap_or("");
                labels.push(
                    field
                        .parse()
                        .map_err(|_| bad(format!("not a label: `{field}`")))?,
                );
            }
        }
        let rows = if cols == 0 { 0 } else { data.len() / cols };
        Ok(FeatureMatrix {
            values: Matrix::new(rows, cols, data)?,
            column_names,
            labels: has_labels.then_some(labels),
        })
    }
}

fn base_row(row: &RawIncident, maps: &EncodingMaps) -> Result<[f64; 8], FeatureError> {
    Ok([
        f64::from(row.timestamp.hour),
        f64::from(row.timestamp.month),
        maps.district_code(&row.district)? as f64,
        maps.weekday_code(row.day_of_week) as f64,
        row.longitude,
        row.latitude,
        extract_street_number(&row.address) as f64,
        f64::from(extract_block_flag(&row.address)),
    ])
}

/// Assembles the feature matrix; when `pca` is given its scores are appended.
pub fn build_feature_matrix(
    rows: &[RawIncident],
    maps: &EncodingMaps,
    pca: Option<&PcaModel>,
) -> Result<FeatureMatrix, FeatureError> {
    let base: Vec<[f64; 8]> = rows
        .par_iter()
        .map(|r| base_row(r, maps))
        .collect::<Result<_, _>>()?;
    let labels = if !rows.is_empty() && rows.iter().all(|r| r.category.is_some()) {
        Some(
            rows.iter()
                .map(|r| maps.category_code(r.category.as_deref().unwrap_or_default()))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let fm = FeatureMatrix {
        values: Matrix::new(rows.len(), BASE_COLUMNS.len(), base.concat())?,
        column_names: BASE_COLUMNS.iter().map(|s| s.to_string()).collect(),
        labels,
    };
    match pca {
        Some(model) => fm.with_pca(model),
        None => Ok(fm),
    }
}
