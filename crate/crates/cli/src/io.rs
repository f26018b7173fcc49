//! Data file ingestion: delimiter-separated numeric columns with an
//! auto-detected header row.

use crate::error::{CliError, Result};
use madtest::Sample;
use std::path::Path;

/// How to pick the column to analyze.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    /// A digit-only selector is an index, anything else a column name.
    pub fn parse(raw: &str) -> ColumnSelector {
        match raw.trim().parse::<usize>() {
            Ok(index) => ColumnSelector::Index(index),
            Err(_) => ColumnSelector::Name(raw.trim().to_string()),
        }
    }
}

fn split_line(line: &str, delimiter: Option<char>) -> Vec<String> {
    match delimiter {
        Some(d) => line.split(d).map(|c| c.trim().to_string()).collect(),
        None => line.split_whitespace().map(str::to_string).collect(),
    }
}

fn detect_delimiter(line: &str) -> Option<char> {
    [',', '\t', ';'].into_iter().find(|d| line.contains(*d))
}

/// Read the selected column of a delimiter-separated file as a sample.
///
/// The delimiter (comma, tab, semicolon, or whitespace) is detected from the
/// first row. The first row is treated as a header when the selected cell
/// does not parse as a number; selecting a column by name requires one.
/// Decimal points only; no locale-dependent parsing.
pub fn read_sample(path: &Path, selector: Option<&ColumnSelector>) -> Result<Sample> {
    let display = path.display().to_string();
    let content = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        action: "read",
        path: display.clone(),
        source,
    })?;

    // Keep original row numbers (1-based) for error messages.
    let rows: Vec<(usize, &str)> = content
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r')))
        .filter(|(_, line)| !line.trim().is_empty())
        .collect();
    if rows.is_empty() {
        return Err(CliError::Invalid(format!(
            "{display}: file contains no data"
        )));
    }

    let delimiter = detect_delimiter(rows[0].1);
    let first = split_line(rows[0].1, delimiter);

    let (column, column_label, header_rows) = match selector {
        Some(ColumnSelector::Name(name)) => {
            let index = first.iter().position(|cell| cell == name).ok_or_else(|| {
                CliError::Invalid(format!(
                    "{display}: column '{name}' not found in header row [{}]",
                    first.join(", ")
                ))
            })?;
            (index, name.clone(), 1)
        }
        Some(ColumnSelector::Index(index)) => {
            if *index >= first.len() {
                return Err(CliError::Invalid(format!(
                    "{display}: column index {index} out of range; rows have {} columns",
                    first.len()
                )));
            }
            let header = first[*index].parse::<f64>().is_err();
            (*index, index.to_string(), usize::from(header))
        }
        None => {
            if first.len() > 1 {
                return Err(CliError::Invalid(format!(
                    "{display}: file has {} columns; pick one with --column",
                    first.len()
                )));
            }
            let header = first[0].parse::<f64>().is_err();
            (0, "0".to_string(), usize::from(header))
        }
    };

    let mut values = Vec::with_capacity(rows.len());
    for (row_number, line) in rows.iter().skip(header_rows) {
        let cells = split_line(line, delimiter);
        let cell = cells.get(column).ok_or_else(|| CliError::Parse {
            path: display.clone(),
            row: *row_number,
            column: column_label.clone(),
            message: format!("row has only {} columns", cells.len()),
        })?;
        let value = cell.parse::<f64>().map_err(|_| CliError::Parse {
            path: display.clone(),
            row: *row_number,
            column: column_label.clone(),
            message: format!("cannot parse '{cell}' as a number"),
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::Invalid(format!(
            "{display}: selection contains no data rows"
        )));
    }

    Sample::new(values).map_err(CliError::Core)
}
