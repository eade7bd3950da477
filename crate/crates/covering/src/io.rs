//! Stream files and report serialization.
//!
//! A stream file is JSON Lines: one header object, then one job per line in
//! arrival order. Sizes are exact "num/den" strings, never floats. Jobs that
//! are part of a pre-placed prefix carry a "machine" field:
//!
//! ```text
//! {"machines": 2, "name": "demo", "push_rule": "lowest-index"}
//! {"id": 0, "machine": 1, "size": "7/2"}
//! {"id": 1, "size": "1/2"}
//! ```
//!
//! Reports render to CSV with a fixed column set, or to JSON mirroring the
//! same rows. Both are byte-deterministic for identical inputs.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::generators::StreamSpec;
use crate::jump::PushRule;
use crate::oracle::StreamReport;
use crate::rational::{format_rational, parse_rational, Rational};

pub fn push_rule_label(rule: &PushRule) -> &'static str {
    match rule {
        PushRule::LowestIndex => "lowest-index",
        PushRule::LargestSmallerOccupant => "largest-smaller-occupant",
    }
}

pub fn parse_push_rule(s: &str) -> Result<PushRule> {
    match s {
        "lowest-index" => Ok(PushRule::LowestIndex),
        "largest-smaller-occupant" => Ok(PushRule::LargestSmallerOccupant),
        other => Err(Error::Parse(format!(
            "unknown push rule {:?}, expected lowest-index or largest-smaller-occupant",
            other
        ))),
    }
}

/// Renders a stream spec to the JSON Lines format.
pub fn write_stream(spec: &StreamSpec) -> String {
    let mut header = Map::new();
    header.insert("machines".into(), json!(spec.machines));
    header.insert("name".into(), json!(spec.name));
    header.insert("push_rule".into(), json!(push_rule_label(&spec.push_rule)));
    if let Some(ub) = &spec.ub_override {
        header.insert("ub_override".into(), json!(format_rational(ub)));
    }
    let mut out = String::new();
    out.push_str(&Value::Object(header).to_string());
    out.push('\n');
    for (id, size, machine) in &spec.prefix {
        let line = json!({"id": id, "machine": machine, "size": format_rational(size)});
        out.push_str(&line.to_string());
        out.push('\n');
    }
    for (id, size) in &spec.arrivals {
        let line = json!({"id": id, "size": format_rational(size)});
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing field {:?}", key)))
}

fn as_object(line: &str, lineno: usize) -> Result<Map<String, Value>> {
    let value: Value = serde_json::from_str(line)
        .map_err(|e| Error::Parse(format!("line {}: {}", lineno, e)))?;
    match value {
        Value::Object(obj) => Ok(obj),
        _ => Err(Error::Parse(format!("line {}: expected a JSON object", lineno))),
    }
}

fn as_usize(value: &Value) -> Result<usize> {
    value
        .as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| Error::Parse(format!("expected a non-negative integer, got {}", value)))
}

fn as_size(value: &Value) -> Result<Rational> {
    let s = value
        .as_str()
        .ok_or_else(|| Error::Parse(format!("expected a \"num/den\" string, got {}", value)))?;
    parse_rational(s)
}

/// Parses the JSON Lines stream format back into a spec.
pub fn read_stream(text: &str) -> Result<StreamSpec> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (lineno, header_line) =
        lines.next().ok_or_else(|| Error::Parse("empty stream file".into()))?;
    let header = as_object(header_line, lineno + 1)?;
    let machines = as_usize(field(&header, "machines")?)?;
    let name = match header.get("name") {
        Some(v) => v
            .as_str()
            .ok_or_else(|| Error::Parse("name must be a string".into()))?
            .to_string(),
        None => "stream".to_string(),
    };
    let push_rule = match header.get("push_rule") {
        Some(v) => parse_push_rule(
            v.as_str().ok_or_else(|| Error::Parse("push_rule must be a string".into()))?,
        )?,
        None => PushRule::LowestIndex,
    };
    let ub_override = match header.get("ub_override") {
        Some(v) => Some(as_size(v)?),
        None => None,
    };

    let mut prefix = Vec::new();
    let mut arrivals = Vec::new();
    for (lineno, line) in lines {
        let obj = as_object(line, lineno + 1)?;
        let id = field(&obj, "id")?
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("line {}: bad id", lineno + 1)))?;
        let size = as_size(field(&obj, "size")?)?;
        match obj.get("machine") {
            Some(machine) => prefix.push((id, size, as_usize(machine)?)),
            None => arrivals.push((id, size)),
        }
    }
    Ok(StreamSpec { name, machines, prefix, arrivals, push_rule, ub_override })
}

pub const REPORT_COLUMNS: &str = "arrival_id,arrival_size,arrival_rounded,ub,min_load_rounded,\
min_load_original,migrated_rounded,migrated_original,migration_factor,moves,opt_original,ratio,\
phase_rows,rebalance_moves";

fn opt_rational(value: &Option<Rational>) -> String {
    value.as_ref().map(format_rational).unwrap_or_default()
}

fn opt_count(value: &Option<usize>) -> String {
    value.map(|n| n.to_string()).unwrap_or_default()
}

/// Renders a replay report as CSV, one row per arrival.
pub fn report_csv(report: &StreamReport) -> String {
    let mut out = String::new();
    out.push_str(REPORT_COLUMNS);
    out.push('\n');
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.arrival,
            format_rational(&row.size),
            format_rational(&row.rounded),
            format_rational(&row.ub),
            format_rational(&row.min_load_rounded),
            format_rational(&row.min_load_original),
            format_rational(&row.migrated_rounded),
            format_rational(&row.migrated_original),
            format_rational(&row.migration_factor),
            row.moves,
            opt_rational(&row.opt_original),
            opt_rational(&row.ratio),
            opt_count(&row.phase_rows),
            opt_count(&row.rebalance_moves),
        )
        .expect("writing to a string cannot fail");
    }
    out
}

fn json_rational(value: &Option<Rational>) -> Value {
    match value {
        Some(r) => Value::String(format_rational(r)),
        None => Value::Null,
    }
}

/// Renders a replay report as a single JSON document mirroring the CSV rows.
pub fn report_json(report: &StreamReport) -> String {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            json!({
                "arrival_id": row.arrival,
                "arrival_size": format_rational(&row.size),
                "arrival_rounded": format_rational(&row.rounded),
                "ub": format_rational(&row.ub),
                "min_load_rounded": format_rational(&row.min_load_rounded),
                "min_load_original": format_rational(&row.min_load_original),
                "migrated_rounded": format_rational(&row.migrated_rounded),
                "migrated_original": format_rational(&row.migrated_original),
                "migration_factor": format_rational(&row.migration_factor),
                "moves": row.moves,
                "opt_original": json_rational(&row.opt_original),
                "ratio": json_rational(&row.ratio),
                "phase_rows": row.phase_rows,
                "rebalance_moves": row.rebalance_moves,
            })
        })
        .collect();
    let assignment: Map<String, Value> = report
        .final_assignment
        .iter()
        .map(|(id, machine)| (id.to_string(), json!(machine)))
        .collect();
    let doc = json!({
        "algorithm": report.algorithm.label(),
        "epsilon": format_rational(&report.epsilon),
        "machines": report.machines,
        "rows": rows,
        "max_migration_factor": format_rational(&report.max_migration_factor),
        "max_ratio": json_rational(&report.max_ratio),
        "final_min_load_rounded": format_rational(&report.final_min_load_rounded),
        "final_min_load_original": format_rational(&report.final_min_load_original),
        "final_assignment": Value::Object(assignment),
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("valid document");
    out.push('\n');
    out
}
