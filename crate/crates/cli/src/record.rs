//! Row formats shared by the commands. Every CSV file starts with a
//! `#schema=` comment line, then a mandatory header row.

use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use markoff_core::classify::{zariski_flag, ClassificationRecord};
use markoff_core::{class_number, Triple};

pub const RECORD_SCHEMA: &str = "markoff-record/1";
pub const SCAN_SCHEMA: &str = "markoff-scan/1";
pub const DENSITY_SCHEMA: &str = "markoff-density/1";
pub const FAMILY_SCHEMA: &str = "markoff-families/1";
pub const AGGREGATE_SCHEMA: &str = "markoff-census/1";
pub const STATS_SCHEMA: &str = "markoff-stats/1";
pub const ORACLE_SCHEMA: &str = "markoff-oracle/1";

/// One classified level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub k: i64,
    pub verdict: String,
    pub h: Option<u64>,
    /// `u1,u2,u3` triples joined by `;`, ascending.
    pub reps: String,
    pub hasse_failure: bool,
    /// `key=value` pairs joined by `;`.
    pub flags: String,
}

pub fn join_reps(reps: &[Triple]) -> String {
    reps.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";")
}

impl OutputRecord {
    pub fn from_classification(rec: &ClassificationRecord) -> Self {
        let mut flags = vec![format!("zariski={:?}", zariski_flag(rec.k, rec))];
        if let Some(hp) = rec.h_plus {
            flags.push(format!("h_plus={hp}"));
        }
        if let Ok(c) = class_number(rec.k) {
            flags.push(format!("class_number={c}"));
        }
        OutputRecord {
            k: rec.k,
            verdict: rec.verdict.label(),
            h: rec.h,
            reps: join_reps(&rec.reps),
            hasse_failure: rec.hasse_failure,
            flags: flags.join(";"),
        }
    }
}

pub fn schema_line(w: &mut impl Write, schema: &str) -> std::io::Result<()> {
    writeln!(w, "#schema={schema}")
}

pub fn csv_writer<W: Write>(mut w: W, schema: &str) -> Result<csv::Writer<W>> {
    schema_line(&mut w, schema)?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w))
}

/// Reads a CSV file written by [`csv_writer`], checking the schema line.
pub fn csv_reader<R: BufRead>(mut r: R, schema: &str) -> Result<csv::Reader<R>> {
    let mut first = String::new();
    r.read_line(&mut first).context("reading schema line")?;
    let got = first.trim_end().strip_prefix("#schema=").unwrap_or("");
    if got != schema {
        bail!("expected schema {schema}, found {:?}", first.trim_end());
    }
    Ok(csv::Reader::from_reader(r))
}

pub fn write_records<W: Write>(w: W, records: &[OutputRecord]) -> Result<()> {
    let mut out = csv_writer(w, RECORD_SCHEMA)?;
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
