//! CSV ingestion for frequency samples and count vectors.

use std::fs::File;
use std::path::Path;

use simplex_priors::{CountVector, FrequencySample, SimplexPoint};

use crate::error::{CliError, CliResult};

/// Frequency rows may miss 1 by at most this much before being rejected.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Frequencies,
    Counts,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub frequencies: Option<FrequencySample>,
    pub counts: Option<CountVector>,
    pub source_path: String,
    pub m: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        match (&self.frequencies, &self.counts) {
            (Some(f), _) => f.len(),
            (_, Some(_)) => 1,
            _ => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn read_records(path: &Path) -> CliResult<Vec<(u64, Vec<String>)>> {
    let file = File::open(path).map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn is_header(fields: &[String]) -> bool {
    fields.iter().all(|f| f.parse::<f64>().is_err())
}

fn parse_real(field: &str, line: u64) -> CliResult<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| CliError::data(format!("row {line}: '{field}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::data(format!("row {line}: '{field}' is not finite")));
    }
    Ok(v)
}

/// Validates one frequency row: nonnegative, interior, summing to 1 within
/// [`SUM_TOLERANCE`]; the accepted row is renormalized.
pub fn parse_frequency_row(fields: &[String], line: u64, m: usize) -> CliResult<SimplexPoint> {
    if fields.len() != m {
        return Err(CliError::data(format!("row {line}: expected {m} fields, found {}", fields.len())));
    }
    let values = fields.iter().map(|f| parse_real(f, line)).collect::<CliResult<Vec<f64>>>()?;
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(CliError::data(format!("row {line}: negative entry {v}")));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(CliError::data(format!("row {line}: frequencies sum to {sum}, not 1")));
    }
    if values.iter().any(|v| *v == 0.0) {
        return Err(CliError::data(format!("row {line}: zero entry puts the point on the simplex boundary")));
    }
    SimplexPoint::new(values.iter().map(|v| v / sum).collect())
        .map_err(|e| CliError::data(format!("row {line}: {e}")))
}

pub fn ingest_frequencies(path: &Path) -> CliResult<Dataset> {
    let mut records = read_records(path)?;
    if records.first().is_some_and(|(_, f)| is_header(f)) {
        records.remove(0);
    }
    let Some((_, first)) = records.first() else {
        return Err(CliError::data(format!("{}: no observations", path.display())));
    };
    let m = first.len();
    if m < 2 {
        return Err(CliError::data(format!("{}: need at least 2 columns, found {m}", path.display())));
    }
    let points = records
        .iter()
        .map(|(line, fields)| parse_frequency_row(fields, *line, m))
        .collect::<CliResult<Vec<_>>>()?;
    let sample = FrequencySample::new(points)?;
    Ok(Dataset {
        kind: DatasetKind::Frequencies,
        frequencies: Some(sample),
        counts: None,
        source_path: path.display().to_string(),
        m,
    })
}

pub fn parse_count(field: &str, line: u64) -> CliResult<u64> {
    field.parse::<u64>().map_err(|_| {
        if field.parse::<f64>().is_ok_and(|v| v < 0.0) {
            CliError::data(format!("row {line}: negative count {field}"))
        } else {
            CliError::data(format!("row {line}: '{field}' is not a nonnegative integer count"))
        }
    })
}

pub fn ingest_counts(path: &Path) -> CliResult<Dataset> {
    let mut records = read_records(path)?;
    if records.first().is_some_and(|(_, f)| is_header(f)) {
        records.remove(0);
    }
    let (line, fields) = match records.as_slice() {
        [one] => one,
        [] => return Err(CliError::data(format!("{}: no counts", path.display()))),
        [_, (line, _), ..] => {
            return Err(CliError::data(format!("row {line}: counts file must hold a single line")))
        }
    };
    if fields.len() < 2 {
        return Err(CliError::data(format!("row {line}: need at least 2 counts, found {}", fields.len())));
    }
    let counts = fields.iter().map(|f| parse_count(f, *line)).collect::<CliResult<Vec<u64>>>()?;
    let m = counts.len();
    Ok(Dataset {
        kind: DatasetKind::Counts,
        frequencies: None,
        counts: Some(CountVector::new(counts)),
        source_path: path.display().to_string(),
        m,
    })
}

pub fn ingest(path: &Path, kind: DatasetKind) -> CliResult<Dataset> {
    match kind {
        DatasetKind::Frequencies => ingest_frequencies(path),
        DatasetKind::Counts => ingest_counts(path),
    }
}
