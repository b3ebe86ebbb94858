use std::io::{Read, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, Result};

pub const HEADER: [&str; 6] = ["tau", "h", "dof", "iter", "cpu_s", "error"];
pub const EXCEEDED: &str = "exceeded";

/// Iteration count, or the sentinel for a solve that hit `max_iter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Iterations {
    Count(usize),
    Exceeded,
}

impl std::fmt::Display for Iterations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Iterations::Count(k) => write!(f, "{k}"),
            Iterations::Exceeded => f.write_str(EXCEEDED),
        }
    }
}

impl std::str::FromStr for Iterations {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s == EXCEEDED {
            return Ok(Iterations::Exceeded);
        }
        s.parse()
            .map(Iterations::Count)
            .map_err(|_| CliError::Config(format!("bad iteration entry '{s}'")))
    }
}

impl Serialize for Iterations {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Iterations::Count(k) => s.serialize_u64(*k as u64),
            Iterations::Exceeded => s.serialize_str(EXCEEDED),
        }
    }
}

impl<'de> Deserialize<'de> for Iterations {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(k) => Ok(Iterations::Count(k)),
            Raw::Text(s) if s == EXCEEDED => Ok(Iterations::Exceeded),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("bad iteration entry '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub tau: f64,
    pub h: f64,
    pub dof: usize,
    pub iter: Iterations,
    pub cpu_s: f64,
    pub error: Option<f64>,
}

/// Scientific notation with the fewest digits (at least 7 significant) that
/// parse back to the same value.
pub fn sci(x: f64) -> String {
    for prec in 6..=16 {
        let s = format!("{x:.prec$e}");
        if s.parse::<f64>().ok() == Some(x) {
            return s;
        }
    }
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(out: W, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            sci(r.tau),
            sci(r.h),
            r.dof.to_string(),
            r.iter.to_string(),
            sci(r.cpu_s),
            r.error.map(sci).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| CliError::Config(format!("bad '{}' entry '{raw}'", HEADER[i])))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(CliError::Config(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let error = match rec.get(5).unwrap_or("") {
            "" => None,
            _ => Some(field(&rec, 5)?),
        };
        rows.push(TableRow {
            tau: field(&rec, 0)?,
            h: field(&rec, 1)?,
            dof: field(&rec, 2)?,
            iter: rec.get(3).unwrap_or("").parse()?,
            cpu_s: field(&rec, 4)?,
            error,
        });
    }
    Ok(rows)
}

pub fn write_json<W: Write>(mut out: W, rows: &[TableRow]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}
