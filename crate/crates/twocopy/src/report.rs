//! Output plumbing shared by the subcommands.
//!
//! Every run produces an artifact (JSON document or CSV table) and a one-line
//! JSON summary listing each checked invariant.

use std::io::Write;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub fn hex32(code: u32) -> String {
    format!("{code:#010x}")
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, Relation::AtMost, bound, value <= bound)
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, Relation::AtLeast, bound, value >= bound)
    }

    pub fn equal(name: &str, value: f64, expected: f64) -> Self {
        Self::new(name, value, Relation::Equal, expected, value == expected)
    }

    /// A yes/no property, recorded as `1 == 1`.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Relation::Equal, 1.0, ok)
    }

    fn new(name: &str, value: f64, relation: Relation, bound: f64, pass: bool) -> Self {
        Self {
            name: name.to_owned(),
            value,
            relation,
            bound,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub subcommand: &'static str,
    pub status: &'static str,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn new(subcommand: &'static str, checks: Vec<Check>) -> Self {
        let status = if checks.iter().all(|c| c.pass) { "pass" } else { "fail" };
        Self {
            schema_version: SCHEMA_VERSION,
            subcommand,
            status,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }
}
