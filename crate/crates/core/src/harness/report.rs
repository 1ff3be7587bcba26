//! CSV and markdown tables of run reports, and parsing them back.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::examples::{ExampleId, Method};
use crate::harness::run::RunReport;

pub const COLUMNS: [&str; 10] = [
    "example",
    "method",
    "grid",
    "shape",
    "precision_digits",
    "max_abs_err",
    "rel_err",
    "cond_A",
    "cond_AL",
    "seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(Error::InvalidProblem(format!("unknown format `{s}` (csv or markdown)"))),
        }
    }
}

pub fn grid_label(counts: &[usize]) -> String {
    counts.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x")
}

/// Parses `N`, `NxM` or `NxMxK`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    s.trim()
        .split(['x', 'X'])
        .map(|t| t.trim().parse::<usize>().ok().filter(|&n| n > 0))
        .collect::<Option<Vec<_>>>()
        .filter(|v| (1..=3).contains(&v.len()))
        .ok_or_else(|| Error::InvalidProblem(format!("bad grid `{s}` (expected N, NxM or NxMxK)")))
}

fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

fn cells(r: &RunReport) -> [String; 10] {
    [
        r.example.to_string(),
        r.method.to_string(),
        grid_label(&r.grid),
        r.shape.to_string(),
        r.precision_digits.to_string(),
        sci(r.max_abs_err),
        sci(r.rel_err),
        sci(r.cond_a),
        sci(r.cond_al),
        format!("{:.3}", r.seconds),
    ]
}

pub fn emit(reports: &[RunReport], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&COLUMNS.join(","));
            out.push('\n');
            for r in reports {
                out.push_str(&cells(r).join(","));
                out.push('\n');
            }
        }
        Format::Markdown => {
            let _ = writeln!(out, "| {} |", COLUMNS.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(COLUMNS.len()));
            for r in reports {
                let _ = writeln!(out, "| {} |", cells(r).join(" | "));
            }
        }
    }
    out
}

fn bad(line: &str) -> Error {
    Error::InvalidProblem(format!("malformed report row `{line}`"))
}

fn parse_row(fields: &[&str], line: &str) -> Result<RunReport> {
    if fields.len() != COLUMNS.len() {
        return Err(bad(line));
    }
    let num = |i: usize| fields[i].trim().parse::<f64>().map_err(|_| bad(line));
    let max_abs_err = num(5)?;
    Ok(RunReport {
        example: fields[0].parse()?,
        method: fields[1].parse()?,
        grid: parse_grid(fields[2])?,
        shape: num(3)?,
        precision_digits: fields[4].trim().parse().map_err(|_| bad(line))?,
        max_abs_err,
        rel_err: num(6)?,
        cond_a: num(7)?,
        cond_al: num(8)?,
        seconds: num(9)?,
        failure: max_abs_err.is_nan().then(|| "failed".to_string()),
    })
}

/// Reads rows written by [`emit`] in either format. Values come back at
/// the printed precision; failed rows get a placeholder message.
pub fn parse(text: &str) -> Result<Vec<RunReport>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let Some(header) = lines.next() else {
        return Ok(Vec::new());
    };
    let markdown = header.starts_with('|');
    let split = |l: &str| -> Vec<String> {
        if markdown {
            l.trim_matches('|').split('|').map(|c| c.trim().to_string()).collect()
        } else {
            l.split(',').map(str::to_string).collect()
        }
    };
    if split(header) != COLUMNS {
        return Err(bad(header));
    }
    lines
        .filter(|l| !(markdown && l.starts_with("|-")))
        .map(|l| {
            let fields = split(l);
            let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
            parse_row(&refs, l)
        })
        .collect()
}

/// Rows for a quick look at the reference table of an example.
pub fn reference_lines(id: ExampleId) -> Vec<String> {
    use crate::harness::examples::Source;
    id.references()
        .iter()
        .map(|r| {
            let who = match r.source {
                Source::Method(Method::Constrained) => "constrained".to_string(),
                Source::Method(Method::Kansa) => "kansa".to_string(),
                Source::Prior => "prior".to_string(),
            };
            let mut line = format!("{:<9} {:<12} {}", grid_label(&r.grid), who, sci(r.value));
            if let Some(c) = r.shape {
                let _ = write!(line, "  c={c}");
            }
            if let Some(e) = r.eps {
                let _ = write!(line, "  eps={e}");
            }
            line
        })
        .collect()
}
