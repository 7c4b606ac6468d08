use std::io::Write;

use serde::Serialize;

use crate::CliResult;

/// One row of a space or bench report.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub structure: String,
    pub n: u64,
    pub m: u64,
    pub op: String,
    pub count: u64,
    pub total_ns: u64,
    pub ns_per_op: f64,
    pub measured_bits: u64,
    pub ef_bits: u64,
    pub b_bits: u64,
    pub redundancy_per_n: f64,
}

impl BenchRecord {
    /// `ef_bits` and `b_bits` are recomputed from `(n, m)` here.
    pub fn new(structure: &str, n: u64, m: u64, op: &str, count: u64, total_ns: u64, measured_bits: u64) -> Self {
        let ef_bits = efset::ef_bits(n, m);
        Self {
            structure: structure.to_string(),
            n,
            m,
            op: op.to_string(),
            count,
            total_ns,
            ns_per_op: if count == 0 { 0.0 } else { total_ns as f64 / count as f64 },
            measured_bits,
            ef_bits,
            b_bits: efset::b_bits(n, m),
            redundancy_per_n: if n == 0 {
                0.0
            } else {
                (measured_bits as f64 - ef_bits as f64) / n as f64
            },
        }
    }
}

/// CSV with a header row, or one JSON object per line.
pub fn write_records(records: &[BenchRecord], json: bool, out: &mut dyn Write) -> CliResult<()> {
    if json {
        for r in records {
            serde_json::to_writer(&mut *out, r).map_err(|e| crate::CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
    } else {
        let mut w = csv::Writer::from_writer(&mut *out);
        for r in records {
            w.serialize(r).map_err(|e| crate::CliError::Io(e.to_string()))?;
        }
        w.flush()?;
    }
    Ok(())
}
