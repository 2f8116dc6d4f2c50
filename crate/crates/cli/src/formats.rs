//! Edge and group files.
//!
//! Edge rows are `from, to, weight[, frame]`. The semicolon dialect writes
//! weights with a decimal comma, the tab dialect with a decimal point.
//! Weights are rounded to four decimals when read. Group rows are
//! tab-separated `group, node, frame`.

use std::io::{Read, Write};
use std::str::FromStr;

use ged_core::{Group, Grouping, Interaction, NodeId, WeightedEdge};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeDialect {
    /// `4376;27588;0,0019`
    Semicolon,
    /// `4376\t27588\t0.0019`
    Tab,
}

impl EdgeDialect {
    fn delimiter(self) -> u8 {
        match self {
            EdgeDialect::Semicolon => b';',
            EdgeDialect::Tab => b'\t',
        }
    }
}

impl FromStr for EdgeDialect {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semicolon" | "semicolon-comma" => Ok(EdgeDialect::Semicolon),
            "tab" | "tab-point" => Ok(EdgeDialect::Tab),
            other => Err(CliError::Config(format!("unknown edge dialect '{other}' (expected semicolon or tab)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFileRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
    pub frame: Option<u32>,
}

impl EdgeFileRecord {
    pub fn edge(&self) -> WeightedEdge {
        WeightedEdge::new(self.from, self.to, self.weight)
    }
}

/// Rounds to four decimal places.
pub fn round_weight(w: f64) -> f64 {
    (w * 1e4).round() / 1e4
}

fn reader(input: impl Read, delimiter: u8) -> csv::Reader<impl Read> {
    csv::ReaderBuilder::new().delimiter(delimiter).has_headers(false).flexible(true).from_reader(input)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn field<T: FromStr>(record: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let raw = record.get(i).unwrap_or("").trim();
    raw.parse().map_err(|_| CliError::Input(format!("line {}: invalid {what} '{raw}'", line_of(record))))
}

fn is_blank(record: &csv::StringRecord) -> bool {
    record.iter().all(|f| f.trim().is_empty())
}

pub fn parse_edges(input: impl Read, dialect: EdgeDialect) -> Result<Vec<EdgeFileRecord>> {
    let mut out = Vec::new();
    for row in reader(input, dialect.delimiter()).records() {
        let row = row.map_err(|e| CliError::Input(e.to_string()))?;
        if is_blank(&row) {
            continue;
        }
        if !(3..=4).contains(&row.len()) {
            return Err(CliError::Input(format!(
                "line {}: expected 3 or 4 fields, found {}",
                line_of(&row),
                row.len()
            )));
        }
        let raw_weight = row[2].trim();
        let text = match dialect {
            EdgeDialect::Semicolon => raw_weight.replace(',', "."),
            EdgeDialect::Tab => raw_weight.to_owned(),
        };
        let weight: f64 = text
            .parse()
            .map_err(|_| CliError::Input(format!("line {}: invalid weight '{raw_weight}'", line_of(&row))))?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(CliError::Input(format!("line {}: negative or non-finite weight {weight}", line_of(&row))));
        }
        out.push(EdgeFileRecord {
            from: NodeId(field(&row, 0, "node id")?),
            to: NodeId(field(&row, 1, "node id")?),
            weight: round_weight(weight),
            frame: if row.len() == 4 { Some(field(&row, 3, "frame index")?) } else { None },
        });
    }
    Ok(out)
}

pub fn write_edges(mut out: impl Write, records: &[EdgeFileRecord], dialect: EdgeDialect) -> Result<()> {
    let sep = dialect.delimiter() as char;
    for r in records {
        let mut weight = format!("{:.4}", r.weight);
        if dialect == EdgeDialect::Semicolon {
            weight = weight.replace('.', ",");
        }
        write!(out, "{}{sep}{}{sep}{weight}", r.from, r.to)?;
        if let Some(frame) = r.frame {
            write!(out, "{sep}{frame}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Timestamped interactions: tab-separated `from, to, weight, timestamp`.
pub fn parse_interactions(input: impl Read) -> Result<Vec<Interaction>> {
    let mut out = Vec::new();
    for row in reader(input, b'\t').records() {
        let row = row.map_err(|e| CliError::Input(e.to_string()))?;
        if is_blank(&row) {
            continue;
        }
        if row.len() != 4 {
            return Err(CliError::Input(format!("line {}: expected 4 fields, found {}", line_of(&row), row.len())));
        }
        let weight: f64 = field(&row, 2, "weight")?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(CliError::Input(format!("line {}: negative or non-finite weight {weight}", line_of(&row))));
        }
        out.push(Interaction::new(
            field::<u64>(&row, 0, "node id")?,
            field::<u64>(&row, 1, "node id")?,
            round_weight(weight),
            field(&row, 3, "timestamp")?,
        ));
    }
    Ok(out)
}

pub fn parse_groups(input: impl Read) -> Result<Grouping> {
    let mut rows = Vec::new();
    for row in reader(input, b'\t').records() {
        let row = row.map_err(|e| CliError::Input(e.to_string()))?;
        if is_blank(&row) {
            continue;
        }
        if row.len() != 3 {
            return Err(CliError::Input(format!("line {}: expected 3 fields, found {}", line_of(&row), row.len())));
        }
        rows.push((field(&row, 0, "group id")?, NodeId(field(&row, 1, "node id")?), field(&row, 2, "frame index")?));
    }
    Ok(Grouping::from_memberships(rows))
}

pub fn write_groups(mut out: impl Write, grouping: &Grouping) -> Result<()> {
    for group in grouping.iter() {
        write_group(&mut out, group)?;
    }
    Ok(())
}

fn write_group(out: &mut impl Write, group: &Group) -> Result<()> {
    for node in group.members() {
        writeln!(out, "{}\t{}\t{}", group.id, node, group.frame)?;
    }
    Ok(())
}
