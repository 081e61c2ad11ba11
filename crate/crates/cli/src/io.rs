//! Table CSV and report JSON/text encodings.
//!
//! Table CSV: header `x,y,z,grundy,nim_sum,outcome`, rows in lexicographic
//! `(x, y, z)` order, `\n` line endings. JSON is compact with sorted keys.

use std::fmt::Write as _;
use std::io::{Read, Write};

use choco_core::grundy::GrundyError;
use choco_core::{Bounds, GrundyTable, Outcome, Position, RuleSet, VerificationReport};
use serde_json::{json, Map, Value};

pub const CSV_HEADER: [&str; 6] = ["x", "y", "z", "grundy", "nim_sum", "outcome"];

#[derive(Debug, thiserror::Error)]
pub enum TableIoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected CSV header {0:?}")]
    Header(Vec<String>),
    #[error("line {line}: {msg}")]
    Row { line: u64, msg: String },
    #[error(transparent)]
    Table(#[from] GrundyError),
}

pub fn write_table_csv<W: Write>(table: &GrundyTable, w: W) -> Result<(), TableIoError> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(CSV_HEADER)?;
    for (p, g) in table.iter() {
        out.write_record([
            p.x.to_string(),
            p.y.to_string(),
            p.z.to_string(),
            g.to_string(),
            p.nim_sum().to_string(),
            Outcome::from_grundy(g).as_str().to_string(),
        ])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a table written by [`write_table_csv`].
///
/// Rows must cover the valid positions inside `bounds` exactly once, and the
/// `nim_sum` and `outcome` columns must agree with the coordinates and value.
pub fn read_table_csv<R: Read>(rules: RuleSet, bounds: Bounds, r: R) -> Result<GrundyTable, TableIoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(TableIoError::Header(header));
    }
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |msg: String| TableIoError::Row { line, msg };
        if rec.len() != CSV_HEADER.len() {
            return Err(bad(format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len())));
        }
        let num = |i: usize| -> Result<u64, TableIoError> {
            rec[i].parse::<u64>().map_err(|e| bad(format!("{}: {e}", CSV_HEADER[i])))
        };
        let p = Position::new(num(0)?, num(1)?, num(2)?);
        let g = u32::try_from(num(3)?).map_err(|_| bad("grundy value out of range".into()))?;
        if num(4)? != p.nim_sum() {
            return Err(bad(format!("nim_sum column disagrees with {p}")));
        }
        if &rec[5] != Outcome::from_grundy(g).as_str() {
            return Err(bad(format!("outcome column disagrees with grundy value {g}")));
        }
        entries.push((p, g));
    }
    Ok(GrundyTable::from_entries(rules, bounds, entries)?)
}

fn triple(p: Position) -> Value {
    json!([p.x, p.y, p.z])
}

pub fn positions_json(ps: &[Position]) -> Value {
    Value::Array(ps.iter().copied().map(triple).collect())
}

pub fn rules_name(rules: RuleSet) -> &'static str {
    match rules {
        RuleSet::Rectangular => "rect",
        RuleSet::Triangular(_) => "tri",
    }
}

pub fn report_json(report: &VerificationReport) -> Value {
    let mut obj = Map::new();
    obj.insert("check".into(), report.check.name().into());
    obj.insert("rules".into(), rules_name(report.rules).into());
    obj.insert("k".into(), report.rules.k().map_or(Value::Null, Value::from));
    let b = report.bounds;
    obj.insert("bounds".into(), json!([b.x, b.y, b.z]));
    obj.insert("passed".into(), report.passed.into());
    obj.insert(
        "counts".into(),
        Value::Object(report.counts.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect()),
    );
    obj.insert("discrepancies".into(), positions_json(&report.positions()));
    if report.listings.values().any(|l| !l.is_empty()) {
        obj.insert(
            "listings".into(),
            Value::Object(report.listings.iter().map(|(k, v)| (k.clone(), positions_json(v))).collect()),
        );
    }
    Value::Object(obj)
}

pub fn report_text(report: &VerificationReport) -> String {
    let mut s = String::new();
    let b = report.bounds;
    let _ = writeln!(s, "check: {}", report.check.name());
    let _ = writeln!(s, "rules: {}", report.rules);
    let _ = writeln!(s, "bounds: {},{},{}", b.x, b.y, b.z);
    let _ = writeln!(s, "passed: {}", report.passed);
    for (k, v) in &report.counts {
        let _ = writeln!(s, "count {k}: {v}");
    }
    for d in &report.discrepancies {
        let _ = writeln!(s, "discrepancy {} {}", d.position, d.reason.tag());
    }
    for (name, list) in &report.listings {
        for p in list {
            let _ = writeln!(s, "{name} {p}");
        }
    }
    s
}
