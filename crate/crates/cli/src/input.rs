//! Value files: decimal text, one per line, or raw little-endian u64.

use std::fs;
use std::path::Path;

use crate::args::Format;
use crate::{CliError, CliResult};

/// Parsed values with the 1-based line (text) or record (binary) each came from.
pub struct Input {
    pub values: Vec<u64>,
    pub lines: Vec<usize>,
}

pub fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn parse(bytes: &[u8], format: Format) -> CliResult<Input> {
    match format {
        Format::Binary => {
            if bytes.len() % 8 != 0 {
                return Err(CliError::Invalid(format!(
                    "binary input of {} bytes is not a whole number of 64-bit values",
                    bytes.len()
                )));
            }
            let values: Vec<u64> = bytes
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            let lines = (1..=values.len()).collect();
            Ok(Input { values, lines })
        }
        Format::Text => {
            let text = std::str::from_utf8(bytes).map_err(|e| CliError::Invalid(format!("text input: {e}")))?;
            let mut values = Vec::new();
            let mut lines = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let t = line.trim();
                if t.is_empty() {
                    continue;
                }
                let v = t
                    .parse::<u64>()
                    .map_err(|e| CliError::Invalid(format!("line {}: {t:?}: {e}", i + 1)))?;
                values.push(v);
                lines.push(i + 1);
            }
            Ok(Input { values, lines })
        }
    }
}

pub fn read_values(path: &Path, format: Format) -> CliResult<Input> {
    parse(&read_file(path)?, format)
}

impl Input {
    /// Fails at the first value that does not exceed its predecessor.
    pub fn check_increasing(&self) -> CliResult<()> {
        for i in 1..self.values.len() {
            if self.values[i] <= self.values[i - 1] {
                return Err(CliError::Invalid(format!(
                    "line {}: {} does not exceed the previous value {}",
                    self.lines[i],
                    self.values[i],
                    self.values[i - 1]
                )));
            }
        }
        Ok(())
    }

    pub fn check_universe(&self, m: u64) -> CliResult<()> {
        match self.values.iter().position(|&v| v > m) {
            Some(i) => Err(CliError::Invalid(format!(
                "line {}: {} exceeds the universe bound {m}",
                self.lines[i], self.values[i]
            ))),
            None => Ok(()),
        }
    }
}

/// Values as text, one per line.
pub fn to_text(values: &[u64]) -> String {
    let mut s = String::with_capacity(values.len() * 8);
    for v in values {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

pub fn to_binary(values: &[u64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}
