//! Seeded synthetic data shaped like the real incident files.
//!
//! Used by tests, benches and the acceptance suite when the real data is not
//! available. Categories depend weakly on district, hour and location so that
//! models have something to learn.

use std::io::Write;

use chrono::{Duration, NaiveDate, NaiveDateTime, Timelike, Datelike};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::ingest::{RawIncident, Timestamp};
use crate::matrix::Matrix;

/// The 39 crime categories, alphabetical.
pub const CATEGORIES: [&str; 39] = [
    "ARSON",
    "ASSAULT",
    "BAD CHECKS",
    "BRIBERY",
    "BURGLARY",
    "DISORDERLY CONDUCT",
    "DRIVING UNDER THE INFLUENCE",
    "DRUG/NARCOTIC",
    "DRUNKENNESS",
    "EMBEZZLEMENT",
    "EXTORTION",
    "FAMILY OFFENSES",
    "FORGERY/COUNTERFEITING",
    "FRAUD",
    "GAMBLING",
    "KIDNAPPING",
    "LARCENY/THEFT",
    "LIQUOR LAWS",
    "LOITERING",
    "MISSING PERSON",
    "NON-CRIMINAL",
    "OTHER OFFENSES",
    "PORNOGRAPHY/OBSCENE MAT",
    "PROSTITUTION",
    "RECOVERED VEHICLE",
    "ROBBERY",
    "RUNAWAY",
    "SECONDARY CODES",
    "SEX OFFENSES FORCIBLE",
    "SEX OFFENSES NON FORCIBLE",
    "STOLEN PROPERTY",
    "SUICIDE",
    "SUSPICIOUS OCC",
    "TREA",
    "TRESPASS",
    "VANDALISM",
    "VEHICLE THEFT",
    "WARRANTS",
    "WEAPON LAWS",
];

/// Police districts with a rough centre (longitude, latitude).
pub const DISTRICTS: [(&str, f64, f64); 10] = [
    ("BAYVIEW", -122.393, 37.735),
    ("CENTRAL", -122.410, 37.797),
    ("INGLESIDE", -122.436, 37.724),
    ("MISSION", -122.419, 37.759),
    ("NORTHERN", -122.428, 37.782),
    ("PARK", -122.446, 37.767),
    ("RICHMOND", -122.479, 37.780),
    ("SOUTHERN", -122.405, 37.780),
    ("TARAVAL", -122.482, 37.742),
    ("TENDERLOIN", -122.413, 37.784),
];

const STREETS: [&str; 12] = [
    "MISSION ST",
    "MARKET ST",
    "BRYANT ST",
    "GEARY BL",
    "VALENCIA ST",
    "TURK ST",
    "POLK ST",
    "03RD ST",
    "OFARRELL ST",
    "JONES ST",
    "EDDY ST",
    "HYDE ST",
];

const RESOLUTIONS: [&str; 4] = [
    "NONE",
    "ARREST, BOOKED",
    "ARREST, CITED",
    "PSYCHOPATHIC CASE",
];

/// Relative category frequencies, loosely following the real skew.
fn base_weights() -> [f64; 39] {
    let mut w = [1.0; 39];
    for (name, weight) in [
        ("LARCENY/THEFT", 60.0),
        ("OTHER OFFENSES", 40.0),
        ("NON-CRIMINAL", 30.0),
        ("ASSAULT", 26.0),
        ("DRUG/NARCOTIC", 18.0),
        ("VEHICLE THEFT", 18.0),
        ("VANDALISM", 15.0),
        ("WARRANTS", 14.0),
        ("BURGLARY", 12.0),
        ("SUSPICIOUS OCC", 10.0),
    ] {
        let i = CATEGORIES.iter().position(|c| *c == name).expect("known category");
        w[i] = weight;
    }
    w
}

/// `n` incidents from a fixed seed.
///
/// The first 39 rows cycle through every category so any sample of at least
/// 39 rows covers all classes. Test-style rows (`with_category == false`)
/// carry sequential ids starting at 0 instead of a category.
pub fn incidents(n: usize, seed: u64, with_category: bool) -> Vec<RawIncident> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2003, 1, 6)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid start");
    let span_minutes = 12 * 365 * 24 * 60;
    let jitter = Normal::new(0.0, 0.008).expect("valid sd");
    let base = base_weights();

    (0..n)
        .map(|i| {
            let district = rng.gen_range(0..DISTRICTS.len());
            let (name, lon0, lat0) = DISTRICTS[district];
            let at: NaiveDateTime = start + Duration::minutes(rng.gen_range(0..span_minutes));
            let timestamp = Timestamp {
                year: at.year(),
                month: at.month(),
                day: at.day(),
                hour: at.hour(),
                minute: at.minute(),
                second: 0,
            };
            let street = STREETS[(district + rng.gen_range(0..3)) % STREETS.len()];
            let address = if rng.gen_bool(0.7) {
                format!("{} Block of {street}", 100 * rng.gen_range(0..40))
            } else {
                format!("{street} / {}", STREETS[rng.gen_range(0..STREETS.len())])
            };

            let category = if i < CATEGORIES.len() {
                i
            } else {
                // shift mass toward a few categories per district and hour
                let mut w = base;
                w[(district * 4) % 39] *= 4.0;
                w[(timestamp.hour as usize + 13) % 39] *= 2.0;
                if timestamp.hour < 6 {
                    w[37] *= 3.0;
                }
                WeightedIndex::new(w).expect("positive weights").sample(&mut rng)
            };
            let skew = (category as f64 - 19.0) * 0.0004;

            RawIncident {
                timestamp,
                category: with_category.then(|| CATEGORIES[category].to_string()),
                day_of_week: timestamp.weekday(),
                district: name.to_string(),
                resolution: with_category
                    .then(|| RESOLUTIONS[rng.gen_range(0..RESOLUTIONS.len())].to_string()),
                address,
                longitude: lon0 + jitter.sample(&mut rng) + skew,
                latitude: lat0 + jitter.sample(&mut rng) - skew,
                id: (!with_category).then_some(i as u64),
            }
        })
        .collect()
}

/// Writes rows in the train-file layout.
pub fn write_train_csv<W: Write>(rows: &[RawIncident], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "Dates",
        "Category",
        "Descript",
        "DayOfWeek",
        "PdDistrict",
        "Resolution",
        "Address",
        "X",
        "Y",
    ])?;
    for r in rows {
        let category = r.category.as_deref().unwrap_or("OTHER OFFENSES");
        w.write_record([
            r.timestamp.to_string(),
            category.to_string(),
            format!("{category}, SYNTHETIC"),
            r.day_of_week.to_string(),
            r.district.clone(),
            r.resolution.clone().unwrap_or_else(|| "NONE".into()),
            r.address.clone(),
            r.longitude.to_string(),
            r.latitude.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes rows in the test-file layout. Rows without an id are numbered.
pub fn write_test_csv<W: Write>(rows: &[RawIncident], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["Id", "Dates", "DayOfWeek", "PdDistrict", "Address", "X", "Y"])?;
    for (i, r) in rows.iter().enumerate() {
        w.write_record([
            r.id.unwrap_or(i as u64).to_string(),
            r.timestamp.to_string(),
            r.day_of_week.to_string(),
            r.district.clone(),
            r.address.clone(),
            r.longitude.to_string(),
            r.latitude.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Gaussian blobs: one random centre per class in `[-3, 3]^d`, unit noise.
pub fn classification_dataset(
    n: usize,
    d: usize,
    n_classes: usize,
    seed: u64,
) -> (Matrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();
    let noise = Normal::new(0.0, 1.0).expect("valid sd");
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = if i < n_classes { i } else { rng.gen_range(0..n_classes) };
        labels.push(c);
        data.extend(centres[c].iter().map(|m| m + noise.sample(&mut rng)));
    }
    (Matrix::new(n, d, data).expect("consistent shape"), labels)
}
