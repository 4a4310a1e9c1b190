//! Reading the SF crime train/test CSV files.
//!
//! Train header: `Dates,Category,Descript,DayOfWeek,PdDistrict,Resolution,Address,X,Y`.
//! Test header: `Id,Dates,DayOfWeek,PdDistrict,Address,X,Y`.
//!
//! Columns are located by name, so extra or reordered columns are tolerated.
//! Quoted fields (the `Descript` column contains commas) follow RFC 4180.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use log::warn;
use thiserror::Error;

use crate::features::{extract_block_flag, extract_street_number};

/// Latitude at or above which a row is treated as a coordinate artifact.
pub const OUTLIER_LATITUDE: f64 = 38.0;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema error: missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("schema error: unexpected column `{0}`")]
    UnexpectedColumn(&'static str),
    #[error("line {line}, column {column}: {message}")]
    Row {
        line: u64,
        column: &'static str,
        message: String,
    },
    #[error("line {line}: duplicate Id {id}")]
    DuplicateId { line: u64, id: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid timestamp `{text}`: {reason}")]
pub struct TimestampError {
    pub text: String,
    pub reason: &'static str,
}

/// A calendar timestamp in the `YYYY-mm-dd hh:MM:ss` layout used by the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub hour: u32,
    pub minute: u32,
    pub second: u32,
}

impl Timestamp {
    pub fn date(&self) -> NaiveDate {
        // validated on construction
        NaiveDate::from_ymd_opt(self.year, self.month, self.day).expect("validated date")
    }

    pub fn weekday(&self) -> Weekday {
        Weekday::from_chrono(self.date().weekday())
    }
}

pub fn parse_timestamp(text: &str) -> Result<Timestamp, TimestampError> {
    let err = |reason| TimestampError {
        text: text.to_string(),
        reason,
    };
    let b = text.as_bytes();
    if b.len() != 19 {
        return Err(err("expected 19 characters"));
    }
    if b[4] != b'-' || b[7] != b'-' || b[10] != b' ' || b[13] != b':' || b[16] != b':' {
        return Err(err("bad separators"));
    }
    let num = |range: std::ops::Range<usize>| -> Result<u32, TimestampError> {
        let digits = &b[range];
        if !digits.iter().all(u8::is_ascii_digit) {
            return Err(err("non-digit in numeric field"));
        }
        Ok(digits.iter().fold(0u32, |acc, d| acc * 10 + u32::from(d - b'0')))
    };
    let year = num(0..4)? as i32;
    let month = num(5..7)?;
    let day = num(8..10)?;
    let hour = num(11..13)?;
    let minute = num(14..16)?;
    let second = num(17..19)?;
    if !(1..=12).contains(&month) {
        return Err(err("month out of range"));
    }
    if NaiveDate::from_ymd_opt(year, month, day).is_none() {
        return Err(err("day out of range"));
    }
    if hour > 23 {
        return Err(err("hour out of range"));
    }
    if minute > 59 {
        return Err(err("minute out of range"));
    }
    if second > 59 {
        return Err(err("second out of range"));
    }
    Ok(Timestamp {
        year,
        month,
        day,
        hour,
        minute,
        second,
    })
}

impl FromStr for Timestamp {
    type Err = TimestampError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_timestamp(s)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:04}-{:02}-{:02} {:02}:{:02}:{:02}",
            self.year, self.month, self.day, self.hour, self.minute, self.second
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weekday {
    Monday,
    Tuesday,
    Wednesday,
    Thursday,
    Friday,
    Saturday,
    Sunday,
}

impl Weekday {
    /// Calendar order, Monday first.
    pub const ALL: [Weekday; 7] = [
        Weekday::Monday,
        Weekday::Tuesday,
        Weekday::Wednesday,
        Weekday::Thursday,
        Weekday::Friday,
        Weekday::Saturday,
        Weekday::Sunday,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Weekday::Monday => "Monday",
            Weekday::Tuesday => "Tuesday",
            Weekday::Wednesday => "Wednesday",
            Weekday::Thursday => "Thursday",
            Weekday::Friday => "Friday",
            Weekday::Saturday => "Saturday",
            Weekday::Sunday => "Sunday",
        }
    }

    pub fn from_name(name: &str) -> Option<Weekday> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }

    /// Position in calendar order (Monday = 0).
    pub fn calendar_index(self) -> usize {
        self as usize
    }

    fn from_chrono(day: chrono::Weekday) -> Weekday {
        Self::ALL[day.num_days_from_monday() as usize]
    }
}

impl fmt::Display for Weekday {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One data row of either CSV schema.
#[derive(Debug, Clone, PartialEq)]
pub struct RawIncident {
    pub timestamp: Timestamp,
    /// Present in train rows only.
    pub category: Option<String>,
    pub day_of_week: Weekday,
    pub district: String,
    pub resolution: Option<String>,
    pub address: String,
    pub longitude: f64,
    pub latitude: f64,
    /// Present in test rows only.
    pub id: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Drop rows with latitude >= [`OUTLIER_LATITUDE`].
    pub filter_outliers: bool,
}

pub fn load_train(path: impl AsRef<Path>) -> Result<Vec<RawIncident>, IngestError> {
    load_train_with(path, LoadOptions::default())
}

pub fn load_train_with(
    path: impl AsRef<Path>,
    options: LoadOptions,
) -> Result<Vec<RawIncident>, IngestError> {
    read_train(open(path.as_ref())?, options)
}

pub fn load_test(path: impl AsRef<Path>) -> Result<Vec<RawIncident>, IngestError> {
    load_test_with(path, LoadOptions::default())
}

pub fn load_test_with(
    path: impl AsRef<Path>,
    options: LoadOptions,
) -> Result<Vec<RawIncident>, IngestError> {
    read_test(open(path.as_ref())?, options)
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })
}

struct Columns {
    id: Option<usize>,
    dates: usize,
    category: Option<usize>,
    day_of_week: usize,
    district: usize,
    resolution: Option<usize>,
    address: usize,
    x: usize,
    y: usize,
}

fn find(headers: &csv::StringRecord, name: &'static str) -> Option<usize> {
    headers.iter().position(|h| h.trim() == name)
}

fn require(headers: &csv::StringRecord, name: &'static str) -> Result<usize, IngestError> {
    find(headers, name).ok_or(IngestError::MissingColumn(name))
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(reader)
}

/// Parses train rows from any reader.
pub fn read_train<R: Read>(
    reader: R,
    options: LoadOptions,
) -> Result<Vec<RawIncident>, IngestError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols = Columns {
        id: None,
        dates: require(&headers, "Dates")?,
        category: Some(require(&headers, "Category")?),
        day_of_week: require(&headers, "DayOfWeek")?,
        district: require(&headers, "PdDistrict")?,
        resolution: Some(require(&headers, "Resolution")?),
        address: require(&headers, "Address")?,
        x: require(&headers, "X")?,
        y: require(&headers, "Y")?,
    };
    // Descript is part of the schema but never used.
    require(&headers, "Descript")?;
    read_rows(rdr, &cols, options)
}

/// Parses test rows from any reader.
pub fn read_test<R: Read>(
    reader: R,
    options: LoadOptions,
) -> Result<Vec<RawIncident>, IngestError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    if find(&headers, "Category").is_some() {
        return Err(IngestError::UnexpectedColumn("Category"));
    }
    let cols = Columns {
        id: Some(require(&headers, "Id")?),
        dates: require(&headers, "Dates")?,
        category: None,
        day_of_week: require(&headers, "DayOfWeek")?,
        district: require(&headers, "PdDistrict")?,
        resolution: None,
        address: require(&headers, "Address")?,
        x: require(&headers, "X")?,
        y: require(&headers, "Y")?,
    };
    read_rows(rdr, &cols, options)
}

fn read_rows<R: Read>(
    mut rdr: csv::Reader<R>,
    cols: &Columns,
    options: LoadOptions,
) -> Result<Vec<RawIncident>, IngestError> {
    let mut out = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut weekday_mismatches = 0usize;
    let mut dropped = 0usize;
    let mut record = csv::StringRecord::new();

    while rdr.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let row_err = |column, message: String| IngestError::Row {
            line,
            column,
            message,
        };

        let timestamp =
            parse_timestamp(field(cols.dates)).map_err(|e| row_err("Dates", e.to_string()))?;
        let day_text = field(cols.day_of_week);
        let day_of_week = Weekday::from_name(day_text)
            .ok_or_else(|| row_err("DayOfWeek", format!("unknown weekday `{day_text}`")))?;
        if day_of_week != timestamp.weekday() {
            weekday_mismatches += 1;
            if weekday_mismatches <= 5 {
                warn!(
                    "line {line}: DayOfWeek {day_of_week} disagrees with date {timestamp} ({})",
                    timestamp.weekday()
                );
            }
        }
        let longitude = parse_coord(field(cols.x)).map_err(|m| row_err("X", m))?;
        let latitude = parse_coord(field(cols.y)).map_err(|m| row_err("Y", m))?;
        let id = match cols.id {
            Some(i) => {
                let text = field(i);
                let id: u64 = text
                    .trim()
                    .parse()
                    .map_err(|_| row_err("Id", format!("invalid Id `{text}`")))?;
                if !seen_ids.insert(id) {
                    return Err(IngestError::DuplicateId { line, id });
                }
                Some(id)
            }
            None => None,
        };

        if options.filter_outliers && latitude >= OUTLIER_LATITUDE {
            dropped += 1;
            continue;
        }

        out.push(RawIncident {
            timestamp,
            category: cols.category.map(|i| field(i).to_string()),
            day_of_week,
            district: field(cols.district).to_string(),
            resolution: cols.resolution.map(|i| field(i).to_string()),
            address: field(cols.address).to_string(),
            longitude,
            latitude,
            id,
        });
    }

    if weekday_mismatches > 5 {
        warn!("{weekday_mismatches} rows in total have a DayOfWeek that disagrees with the date");
    }
    if dropped > 0 {
        log::info!("dropped {dropped} rows with latitude >= {OUTLIER_LATITUDE}");
    }
    Ok(out)
}

fn parse_coord(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("invalid coordinate `{text}`")),
    }
}

/// Counts reported by the `summarize` command.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetSummary {
    pub row_count: usize,
    pub category_counts: BTreeMap<String, usize>,
    pub district_counts: BTreeMap<String, usize>,
    pub unique_address_count: usize,
    pub block_count: usize,
    pub non_block_count: usize,
    /// Indexed by hour of day.
    pub hour_histogram: [usize; 24],
    /// Calendar order, Monday first.
    pub weekday_histogram: [usize; 7],
    pub zero_street_number_count: usize,
    pub distinct_street_numbers: usize,
}

pub fn summarize(rows: &[RawIncident]) -> DatasetSummary {
    let mut s = DatasetSummary {
        row_count: rows.len(),
        ..DatasetSummary::default()
    };
    let mut addresses = HashSet::new();
    let mut street_numbers = HashSet::new();
    for row in rows {
        if let Some(c) = &row.category {
            *s.category_counts.entry(c.clone()).or_default() += 1;
        }
        *s.district_counts.entry(row.district.clone()).or_default() += 1;
        addresses.insert(row.address.as_str());
        if extract_block_flag(&row.address) == 1 {
            s.block_count += 1;
        } else {
            s.non_block_count += 1;
        }
        match extract_street_number(&row.address) {
            0 => s.zero_street_number_count += 1,
            n => {
                street_numbers.insert(n);
            }
        }
        s.hour_histogram[row.timestamp.hour as usize] += 1;
        s.weekday_histogram[row.day_of_week.calendar_index()] += 1;
    }
    s.unique_address_count = addresses.len();
    s.distinct_street_numbers = street_numbers.len();
    s
}

fn by_descending_count(map: &BTreeMap<String, usize>) -> Vec<(&str, usize)> {
    let mut v: Vec<_> = map.iter().map(|(k, &n)| (k.as_str(), n)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    v
}

/// Formats an integer with comma thousands separators.
pub fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn render_table(out: &mut String, title: &str, label: &str, rows: &[(&str, usize)]) {
    let width = rows
        .iter()
        .map(|r| r.0.len())
        .chain([label.len()])
        .max()
        .unwrap_or(0);
    out.push_str(&format!("{title}\n"));
    out.push_str(&format!("{label:<width$}  {:>9}\n", "Count"));
    out.push_str(&format!("{}\n", "-".repeat(width + 11)));
    for (name, n) in rows {
        out.push_str(&format!("{name:<width$}  {:>9}\n", group_thousands(*n)));
    }
    out.push('\n');
}

fn render_histogram(out: &mut String, title: &str, rows: &[(String, usize)]) {
    const BAR: usize = 50;
    let max = rows.iter().map(|r| r.1).max().unwrap_or(0).max(1);
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    out.push_str(&format!("{title}\n"));
    for (name, n) in rows {
        let bar = "#".repeat(n * BAR / max);
        out.push_str(&format!(
            "{name:<width$}  {:>9}  {bar}\n",
            group_thousands(*n)
        ));
    }
    out.push('\n');
}

impl DatasetSummary {
    /// Plain-text report: district and category tables sorted by descending
    /// count, hour and weekday histograms, then address statistics.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Rows: {}\n\n", group_thousands(self.row_count)));
        render_table(
            &mut out,
            "Crimes per district",
            "District",
            &by_descending_count(&self.district_counts),
        );
        if !self.category_counts.is_empty() {
            render_table(
                &mut out,
                &format!("Crimes per category ({} categories)", self.category_counts.len()),
                "Category",
                &by_descending_count(&self.category_counts),
            );
        }
        let hours: Vec<_> = self
            .hour_histogram
            .iter()
            .enumerate()
            .map(|(h, &n)| (format!("{h:02}"), n))
            .collect();
        render_histogram(&mut out, "Crimes per hour", &hours);
        let days: Vec<_> = Weekday::ALL
            .iter()
            .map(|d| (d.name().to_string(), self.weekday_histogram[d.calendar_index()]))
            .collect();
        render_histogram(&mut out, "Crimes per day of week", &days);
        out.push_str("Addresses\n");
        out.push_str(&format!(
            "unique addresses          {:>9}\n",
            group_thousands(self.unique_address_count)
        ));
        out.push_str(&format!(
            "block addresses           {:>9}\n",
            group_thousands(self.block_count)
        ));
        out.push_str(&format!(
            "non-block addresses       {:>9}\n",
            group_thousands(self.non_block_count)
        ));
        out.push_str(&format!(
            "street number zero        {:>9}\n",
            group_thousands(self.zero_street_number_count)
        ));
        out.push_str(&format!(
            "distinct street numbers   {:>9}\n",
            group_thousands(self.distinct_street_numbers)
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TRAIN_HEADER: &str = "Dates,Category,Descript,DayOfWeek,PdDistrict,Resolution,Address,X,Y\n";
    const TEST_HEADER: &str = "Id,Dates,DayOfWeek,PdDistrict,Address,X,Y\n";

    fn train(body: &str) -> Result<Vec<RawIncident>, IngestError> {
        read_train(format!("{TRAIN_HEADER}{body}").as_bytes(), LoadOptions::default())
    }

    #[test]
    fn parses_timestamps() {
        let t = parse_timestamp("2015-05-13 23:53:00").unwrap();
        assert_eq!(
            (t.year, t.month, t.day, t.hour, t.minute, t.second),
            (2015, 5, 13, 23, 53, 0)
        );
        let t = parse_timestamp("2003-01-06 00:01:00").unwrap();
        assert_eq!(
            (t.year, t.month, t.day, t.hour, t.minute, t.second),
            (2003, 1, 6, 0, 1, 0)
        );
        assert_eq!(t.weekday(), Weekday::Monday);
    }

    #[test]
    fn rejects_bad_timestamps() {
        for bad in [
            "2015-13-01 00:00:00",
            "2015-02-30 00:00:00",
            "2015-01-01 24:00:00",
            "2015-01-01 00:60:00",
            "2015-01-01T00:00:00",
            "2015-1-01 00:00:00",
            "",
        ] {
            assert!(parse_timestamp(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn quoted_descript_with_commas() {
        let rows = train(
            "2015-05-13 23:53:00,WARRANTS,\"WARRANT ARREST, MISDEMEANOR\",Wednesday,NORTHERN,\"ARREST, BOOKED\",OAK ST / LAGUNA ST,-122.425891675136,37.7745985956747\n",
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.category.as_deref(), Some("WARRANTS"));
        assert_eq!(r.resolution.as_deref(), Some("ARREST, BOOKED"));
        assert_eq!(r.day_of_week, Weekday::Wednesday);
        assert_eq!(r.district, "NORTHERN");
        assert_eq!(r.id, None);
        assert!((r.latitude - 37.7745985956747).abs() < 1e-12);
    }

    #[test]
    fn header_only_is_empty() {
        assert!(train("").unwrap().is_empty());
    }

    #[test]
    fn missing_category_is_schema_error() {
        let csv = "Dates,Descript,DayOfWeek,PdDistrict,Resolution,Address,X,Y\n";
        match read_train(csv.as_bytes(), LoadOptions::default()) {
            Err(IngestError::MissingColumn("Category")) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_row_names_line_and_column() {
        let err = train(
            "2015-05-13 23:53:00,A,d,Wednesday,NORTHERN,NONE,X ST,-122.4,37.7\n2015-13-13 23:53:00,A,d,Wednesday,NORTHERN,NONE,X ST,-122.4,37.7\n",
        )
        .unwrap_err();
        match err {
            IngestError::Row { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "Dates");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weekday_mismatch_is_not_an_error() {
        let rows =
            train("2015-05-13 23:53:00,A,d,Sunday,NORTHERN,NONE,X ST,-122.4,37.7\n").unwrap();
        assert_eq!(rows[0].day_of_week, Weekday::Sunday);
    }

    #[test]
    fn test_rows_carry_id() {
        let body = "0,2015-05-10 23:59:00,Sunday,BAYVIEW,2000 Block of THOMAS AV,-122.39958,37.73505\n";
        let rows = read_test(format!("{TEST_HEADER}{body}").as_bytes(), LoadOptions::default())
            .unwrap();
        assert_eq!(rows[0].id, Some(0));
        assert_eq!(rows[0].category, None);
        assert_eq!(rows[0].address, "2000 Block of THOMAS AV");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let body = "0,2015-05-10 23:59:00,Sunday,BAYVIEW,A ST,-122.39958,37.73505\n0,2015-05-10 23:59:00,Sunday,BAYVIEW,A ST,-122.39958,37.73505\n";
        let err = read_test(format!("{TEST_HEADER}{body}").as_bytes(), LoadOptions::default())
            .unwrap_err();
        assert!(matches!(err, IngestError::DuplicateId { id: 0, .. }));
    }

    #[test]
    fn test_header_with_category_rejected() {
        let csv = "Id,Dates,Category,DayOfWeek,PdDistrict,Address,X,Y\n";
        assert!(matches!(
            read_test(csv.as_bytes(), LoadOptions::default()),
            Err(IngestError::UnexpectedColumn("Category"))
        ));
    }

    #[test]
    fn outlier_filter() {
        let body = "2015-05-13 23:53:00,A,d,Wednesday,NORTHERN,NONE,X ST,-120.5,90.0\n2015-05-13 23:53:00,A,d,Wednesday,NORTHERN,NONE,X ST,-122.4,37.7\n";
        assert_eq!(train(body).unwrap().len(), 2);
        let csv = format!("{TRAIN_HEADER}{body}");
        let kept = read_train(
            csv.as_bytes(),
            LoadOptions {
                filter_outliers: true,
            },
        )
        .unwrap();
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn summary_counts_addresses() {
        let rows = train(
            "2015-05-13 23:53:00,A,d,Wednesday,NORTHERN,NONE,800 Block of BRYANT ST,-122.4,37.7\n2015-05-13 22:53:00,B,d,Wednesday,SOUTHERN,NONE,800 Block of BRYANT ST,-122.4,37.7\n",
        )
        .unwrap();
        let s = summarize(&rows);
        assert_eq!(s.unique_address_count, 1);
        assert_eq!(s.block_count, 2);
        assert_eq!(s.non_block_count, 0);
        assert_eq!(s.distinct_street_numbers, 1);
        assert_eq!(s.hour_histogram[23], 1);
        assert_eq!(s.weekday_histogram[2], 2);
        assert_eq!(s.category_counts.values().sum::<usize>(), 2);
        assert_eq!(summarize(&[]), DatasetSummary::default());
    }

    #[test]
    fn render_sorts_descending() {
        let mut s = DatasetSummary::default();
        s.district_counts.insert("PARK".into(), 49_313);
        s.district_counts.insert("SOUTHERN".into(), 157_182);
        let text = s.render_text();
        let south = text.find("SOUTHERN").unwrap();
        let park = text.find("PARK").unwrap();
        assert!(south < park);
        assert!(text.contains("157,182"));
    }

    #[test]
    fn thousands() {
        assert_eq!(group_thousands(0), "0");
        assert_eq!(group_thousands(999), "999");
        assert_eq!(group_thousands(878_049), "878,049");
        assert_eq!(group_thousands(1_000_000), "1,000,000");
    }

    fn arb_timestamp() -> impl Strategy<Value = Timestamp> {
        (1900i32..2100, 1u32..=12, 1u32..=28, 0u32..24, 0u32..60, 0u32..60).prop_map(
            |(year, month, day, hour, minute, second)| Timestamp {
                year,
                month,
                day,
                hour,
                minute,
                second,
            },
        )
    }

    proptest! {
        #[test]
        fn timestamp_round_trips(t in arb_timestamp()) {
            let text = t.to_string();
            let back = parse_timestamp(&text).unwrap();
            prop_assert_eq!(back, t);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn summary_is_permutation_invariant(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let rows = crate::synth::incidents(60, 7, true);
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = summarize(&rows);
            prop_assert_eq!(&a, &summarize(&shuffled));
            prop_assert_eq!(a.block_count + a.non_block_count, a.row_count);
        }
    }
}
