//! Dataset file parsing: two numeric columns, comma- or whitespace-
//! delimited, with an optional single header line.

use std::fmt;
use std::fs;
use std::path::Path;

use eiv_core::Dataset;

/// A malformed input file, pointing at the offending line.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse_input(path: &Path) -> Result<Dataset, ParseError> {
    let content = fs::read_to_string(path).map_err(|e| ParseError {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_str(&content)
}

/// Parse file content; row order is preserved. The first non-empty line
/// may be a header: if it does not parse as two numbers it is skipped.
pub fn parse_str(content: &str) -> Result<Dataset, ParseError> {
    let mut pairs = Vec::new();
    let mut saw_first = false;
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match parse_row(line) {
            Ok(pair) => {
                saw_first = true;
                pairs.push(pair);
            }
            Err(message) => {
                if !saw_first && pairs.is_empty() && line_no == first_nonempty_line(content) {
                    // Header line, skipped.
                    saw_first = true;
                    continue;
                }
                return Err(ParseError { line: line_no, message });
            }
        }
    }
    if pairs.is_empty() {
        return Err(ParseError {
            line: 0,
            message: "no data rows found".to_string(),
        });
    }
    Ok(Dataset::from_pairs(pairs))
}

fn first_nonempty_line(content: &str) -> usize {
    for (idx, raw) in content.lines().enumerate() {
        if !raw.trim().is_empty() {
            return idx + 1;
        }
    }
    0
}

fn parse_row(line: &str) -> Result<(f64, f64), String> {
    let fields: Vec<&str> = if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    };
    if fields.len() != 2 {
        return Err(format!("expected 2 columns, found {}", fields.len()));
    }
    let y1: f64 = fields[0]
        .parse()
        .map_err(|_| format!("cannot parse '{}' as a number", fields[0]))?;
    let y2: f64 = fields[1]
        .parse()
        .map_err(|_| format!("cannot parse '{}' as a number", fields[1]))?;
    if !y1.is_finite() || !y2.is_finite() {
        return Err("values must be finite".to_string());
    }
    Ok((y1, y2))
}
