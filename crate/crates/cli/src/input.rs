//! CSV and series ingestion.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use covreg::Dataset;

use crate::error::CliError;

/// A loaded dataset together with the column names it came from, so the
/// JSON output can echo its inputs.
#[derive(Debug)]
pub struct Loaded {
    pub data: Dataset,
    pub response: String,
    pub predictors: Vec<String>,
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    let mut f = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => CliError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let mut s = String::new();
    f.read_to_string(&mut s).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(s)
}

/// Resolves a column by header name, falling back to a one-based index.
fn resolve(headers: &[String], key: &str) -> Result<usize, CliError> {
    if let Some(i) = headers.iter().position(|h| h == key) {
        return Ok(i);
    }
    match key.parse::<usize>() {
        Ok(i) if (1..=headers.len()).contains(&i) => Ok(i - 1),
        _ => Err(CliError::ColumnNotFound(key.to_string())),
    }
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64, CliError> {
    let v: f64 = raw.trim().parse().map_err(|_| CliError::Parse {
        row,
        column: column.to_string(),
        message: format!("cannot parse {raw:?} as a number"),
    })?;
    if !v.is_finite() {
        return Err(CliError::Parse {
            row,
            column: column.to_string(),
            message: format!("{raw:?} is not finite"),
        });
    }
    Ok(v)
}

struct Table {
    headers: Vec<String>,
    records: Vec<csv::StringRecord>,
}

fn read_table(text: &str) -> Result<Table, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Parse {
            row: 0,
            column: String::new(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        records.push(rec.map_err(|e| CliError::Parse {
            row: i + 1,
            column: String::new(),
            message: e.to_string(),
        })?);
    }
    Ok(Table { headers, records })
}

/// Reads a headed CSV. `predictors` defaults to every column other than
/// the response.
pub fn load_csv(path: &Path, response: &str, predictors: &[String]) -> Result<Loaded, CliError> {
    let table = read_table(&read_to_string(path)?)?;
    let yi = resolve(&table.headers, response)?;
    let xi: Vec<usize> = if predictors.is_empty() {
        (0..table.headers.len()).filter(|&i| i != yi).collect()
    } else {
        predictors
            .iter()
            .map(|k| resolve(&table.headers, k))
            .collect::<Result<_, _>>()?
    };
    if xi.is_empty() {
        return Err(CliError::Usage("no predictor columns selected".into()));
    }

    let mut y = Vec::with_capacity(table.records.len());
    let mut rows = Vec::with_capacity(table.records.len());
    for (r, rec) in table.records.iter().enumerate() {
        let cell = |c: usize| parse_cell(rec.get(c).unwrap_or(""), r + 1, &table.headers[c]);
        y.push(cell(yi)?);
        rows.push(xi.iter().map(|&c| cell(c)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(Loaded {
        data: Dataset::from_rows(&y, &rows)?,
        response: table.headers[yi].clone(),
        predictors: xi.iter().map(|&c| table.headers[c].clone()).collect(),
    })
}

/// Reads a series: either one bare number per line, or a headed CSV whose
/// `column` (required when there is more than one) holds the values.
pub fn load_series(path: &Path, column: Option<&str>) -> Result<Vec<f64>, CliError> {
    let text = read_to_string(path)?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    let headerless = first.is_some_and(|l| l.parse::<f64>().is_ok());
    if headerless {
        return text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, l)| parse_cell(l, i + 1, "1"))
            .collect();
    }
    let table = read_table(&text)?;
    let c = match column {
        Some(k) => resolve(&table.headers, k)?,
        None if table.headers.len() == 1 => 0,
        None => {
            return Err(CliError::Usage(
                "series file has several columns; choose one with --response".into(),
            ))
        }
    };
    table
        .records
        .iter()
        .enumerate()
        .map(|(r, rec)| parse_cell(rec.get(c).unwrap_or(""), r + 1, &table.headers[c]))
        .collect()
}
