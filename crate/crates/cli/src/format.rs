//! Plain-text instance files and JSON solution files.
//!
//! ```text
//! KTC 1
//! # comment
//! N 2
//! K 2
//! DEPOT 0 0
//! 1 0
//! 2 0
//! ```
//!
//! `DEPOT` is optional and defaults to the origin. Coordinates are written
//! in the shortest decimal form that parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ktc_core::pipeline::{BaseKind, Provenance};
use ktc_core::{Instance, Point, Solution, Tour};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, word: Option<&str>, what: &str) -> Result<T, ParseError> {
    let word = word.ok_or_else(|| err(line, format!("missing {what}")))?;
    word.parse()
        .map_err(|_| err(line, format!("invalid {what} '{word}'")))
}

fn coordinate(line: usize, word: Option<&str>, what: &str) -> Result<f64, ParseError> {
    let v: f64 = number(line, word, what)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err(line, format!("{what} is not finite")))
    }
}

fn expect_end<'a>(line: usize, mut words: impl Iterator<Item = &'a str>) -> Result<(), ParseError> {
    match words.next() {
        None => Ok(()),
        Some(w) => Err(err(line, format!("unexpected trailing '{w}'"))),
    }
}

/// Parses an instance file; errors carry 1-based line numbers.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let last_line = text.lines().count().max(1);

    let (no, header) = lines.next().ok_or_else(|| err(1, "empty file, expected 'KTC 1'"))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["KTC", "1"] {
        return Err(err(no, format!("expected 'KTC 1', found '{header}'")));
    }

    let mut keyed = |key: &str| -> Result<(usize, Vec<&str>), ParseError> {
        let (no, l) = lines
            .next()
            .ok_or_else(|| err(last_line, format!("missing '{key}' line")))?;
        let mut words = l.split_whitespace();
        if words.next() != Some(key) {
            return Err(err(no, format!("expected '{key}', found '{l}'")));
        }
        Ok((no, words.collect()))
    };
    let (no, n_words) = keyed("N")?;
    let n: usize = number(no, n_words.first().copied(), "point count")?;
    expect_end(no, n_words.into_iter().skip(1))?;
    let (no, k_words) = keyed("K")?;
    let k: usize = number(no, k_words.first().copied(), "capacity")?;
    expect_end(no, k_words.into_iter().skip(1))?;
    if k == 0 {
        return Err(err(no, "capacity must be at least 1"));
    }

    let mut depot = Point::ORIGIN;
    if let Some(&(no, l)) = lines.peek() {
        if l.starts_with("DEPOT") {
            lines.next();
            let mut words = l.split_whitespace().skip(1);
            depot = Point::new(
                coordinate(no, words.next(), "depot x")?,
                coordinate(no, words.next(), "depot y")?,
            );
            expect_end(no, words)?;
        }
    }

    let mut points = Vec::with_capacity(n);
    for (no, l) in lines {
        if points.len() == n {
            return Err(err(no, format!("more than the declared {n} points")));
        }
        let mut words = l.split_whitespace();
        points.push(Point::new(
            coordinate(no, words.next(), "x")?,
            coordinate(no, words.next(), "y")?,
        ));
        expect_end(no, words)?;
    }
    if points.len() != n {
        return Err(err(
            last_line,
            format!("declared {n} points, found {}", points.len()),
        ));
    }
    Instance::new(depot, points, k).map_err(|e| err(last_line, e.to_string()))
}

/// Writes an instance file, with optional leading comment lines.
pub fn emit_instance(instance: &Instance, comments: &[String]) -> String {
    let mut out = String::from("KTC 1\n");
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "N {}", instance.len());
    let _ = writeln!(out, "K {}", instance.k());
    let o = instance.origin();
    if o != Point::ORIGIN {
        let _ = writeln!(out, "DEPOT {} {}", o.x, o.y);
    }
    for p in instance.points() {
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    out
}

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_instance(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line,
        message: e.message,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub base: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub segment_bases: Vec<BaseKind>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

/// A solution with the parameters and reduction data that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub cost: f64,
    pub tours: Vec<Vec<usize>>,
    pub meta: SolutionMeta,
}

impl SolutionFile {
    pub fn new(solution: &Solution, meta: SolutionMeta) -> Self {
        SolutionFile {
            cost: solution.cost,
            tours: solution.tours.iter().map(|t| t.0.clone()).collect(),
            meta,
        }
    }

    pub fn tours(&self) -> Vec<Tour> {
        self.tours.iter().cloned().map(Tour::new).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }
}

pub fn read_solution(path: &Path) -> CliResult<SolutionFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}
