use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::EvalError;
use crate::matrix::Matrix;

/// Number of probability columns in a submission file.
pub const SUBMISSION_CLASSES: usize = 39;

/// Writes `Id,<category...>` followed by one row per id.
///
/// Probabilities use Rust's shortest round-trip formatting, so the values
/// read back are bit-identical. Lines end in `\n`.
pub fn write_submission(
    ids: &[u64],
    probabilities: &Matrix,
    category_names: &[String],
    path: &Path,
) -> Result<(), EvalError> {
    let io = |source| EvalError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_submission_to(ids, probabilities, category_names, &mut w)?;
    w.flush().map_err(io)
}

pub(crate) fn write_submission_to<W: Write>(
    ids: &[u64],
    probabilities: &Matrix,
    category_names: &[String],
    writer: W,
) -> Result<(), EvalError> {
    if category_names.len() != SUBMISSION_CLASSES {
        return Err(EvalError::ColumnCount {
            expected: SUBMISSION_CLASSES,
            got: category_names.len(),
        });
    }
    if probabilities.cols() != SUBMISSION_CLASSES {
        return Err(EvalError::ColumnCount {
            expected: SUBMISSION_CLASSES,
            got: probabilities.cols(),
        });
    }
    if ids.len() != probabilities.rows() {
        return Err(EvalError::LengthMismatch {
            rows: probabilities.rows(),
            labels: ids.len(),
        });
    }
    let mut seen = HashSet::with_capacity(ids.len());
    for &id in ids {
        if !seen.insert(id) {
            return Err(EvalError::DuplicateId(id));
        }
    }
    if let Some(row) = probabilities
        .iter_rows()
        .position(|r| r.iter().any(|p| !p.is_finite()))
    {
        return Err(EvalError::NonFinite(row));
    }

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let mut header = Vec::with_capacity(SUBMISSION_CLASSES + 1);
    header.push("Id");
    header.extend(category_names.iter().map(String::as_str));
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(SUBMISSION_CLASSES + 1);
    for (id, row) in ids.iter().zip(probabilities.iter_rows()) {
        record.clear();
        record.push(id.to_string());
        record.extend(row.iter().map(|p| p.to_string()));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        crate::synth::CATEGORIES.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn uniform_row() {
        let p = Matrix::new(1, 39, vec![1.0 / 39.0; 39]).unwrap();
        let mut buf = Vec::new();
        write_submission_to(&[7], &p, &names(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 40);
        assert!(header.starts_with("Id,ARSON,ASSAULT,BAD CHECKS,"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "7");
        for v in &row[1..] {
            assert_eq!(v.parse::<f64>().unwrap(), 1.0 / 39.0);
        }
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert!(!text.lines().any(|l| l.ends_with(',')));
    }

    #[test]
    fn wrong_shapes_and_values() {
        let p = Matrix::new(1, 38, vec![1.0 / 38.0; 38]).unwrap();
        assert!(matches!(
            write_submission_to(&[0], &p, &names(), Vec::new()),
            Err(EvalError::ColumnCount { got: 38, .. })
        ));
        let p = Matrix::new(2, 39, vec![1.0 / 39.0; 78]).unwrap();
        assert!(matches!(
            write_submission_to(&[1, 1], &p, &names(), Vec::new()),
            Err(EvalError::DuplicateId(1))
        ));
        assert!(write_submission_to(&[1], &p, &names(), Vec::new()).is_err());
        let mut bad = p.clone();
        bad.set(1, 3, f64::NAN);
        assert!(matches!(
            write_submission_to(&[1, 2], &bad, &names(), Vec::new()),
            Err(EvalError::NonFinite(1))
        ));
    }
}
