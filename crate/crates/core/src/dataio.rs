//! Point files in and run reports out.
//!
//! Two input formats are read: TSPLIB node-coordinate files (`EUC_2D` or
//! `CEIL_2D`) and plain CSV. Reports are line-oriented text: `key: value`
//! lines followed by tab-separated blocks, each introduced by a `[name]` line
//! and a column header. Floats are written in Rust's shortest round-trip
//! form, so parsing a report gives back exactly the values that were written.

use std::fmt::Write as _;
use std::path::Path;

use crate::continuation::{ModelKind, SolveReport};
use crate::error::{Error, Result};
use crate::matrix::{DataSet, Matrix};
use crate::postprocess::SnappedSolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Tsplib,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointFile {
    pub format: Format,
    /// `NAME` from a TSPLIB header.
    pub name: Option<String>,
    pub points: DataSet,
}

const ACCEPTED_WEIGHTS: [&str; 2] = ["EUC_2D", "CEIL_2D"];

/// Parses a TSPLIB file with a `NODE_COORD_SECTION` of `index x y` lines.
///
/// Indices must run `1, 2, …` without gaps, and the node count must match
/// `DIMENSION` when that key is present.
pub fn parse_tsplib(text: &str) -> Result<PointFile> {
    let mut name = None;
    let mut dimension: Option<usize> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut section_line = None;

    for (no, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if line == "NODE_COORD_SECTION" {
            section_line = Some(no);
            break;
        }
        if line == "EOF" {
            break;
        }
        let Some((key, value)) = line.split_once(':') else {
            if line.ends_with("_SECTION") {
                return Err(Error::parse(no, format!("unsupported section {line}, only NODE_COORD_SECTION is read")));
            }
            return Err(Error::parse(no, format!("expected `KEY : value`, found {line:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "NAME" => name = Some(value.to_string()),
            "DIMENSION" => {
                dimension = Some(
                    value
                        .parse()
                        .map_err(|_| Error::parse(no, format!("DIMENSION is not an integer: {value:?}")))?,
                )
            }
            "EDGE_WEIGHT_TYPE" if !ACCEPTED_WEIGHTS.contains(&value) => {
                return Err(Error::parse(
                    no,
                    format!("EDGE_WEIGHT_TYPE {value} is not supported, expected EUC_2D node coordinates"),
                ));
            }
            "NODE_COORD_TYPE" if value != "TWOD_COORDS" => {
                return Err(Error::parse(no, format!("NODE_COORD_TYPE {value} is not supported")));
            }
            _ => {}
        }
    }

    let Some(section_line) = section_line else {
        return Err(Error::parse(text.lines().count().max(1), "missing NODE_COORD_SECTION"));
    };

    let mut coords = Vec::new();
    let mut count = 0usize;
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(no, format!("expected `index x y`, found {line:?}")));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(no, format!("node index is not an integer: {:?}", fields[0])))?;
        if index != count + 1 {
            return Err(Error::parse(no, format!("node index {index} out of sequence, expected {}", count + 1)));
        }
        for f in &fields[1..] {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(no, format!("coordinate is not a number: {f:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(no, format!("coordinate is not finite: {f:?}")));
            }
            coords.push(v);
        }
        count += 1;
    }

    if count == 0 {
        return Err(Error::parse(section_line, "NODE_COORD_SECTION holds no nodes"));
    }
    if let Some(d) = dimension {
        if d != count {
            return Err(Error::parse(section_line, format!("DIMENSION says {d} nodes but the section holds {count}")));
        }
    }
    Ok(PointFile {
        format: Format::Tsplib,
        name,
        points: Matrix::from_vec(count, 2, coords)?,
    })
}

/// Parses comma-separated rows of numbers. A first line that does not parse
/// as numbers is taken as a header; blank lines are skipped.
pub fn parse_csv(text: &str) -> Result<PointFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut data = Vec::new();
    let mut cols = None;
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => {
                let bad = record.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or_default();
                return Err(Error::parse(line, format!("field is not a number: {bad:?}")));
            }
        };
        first = false;
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::parse(line, format!("value is not finite: {bad}")));
        }
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::parse(line, format!("row has {} fields, expected {c}", row.len())));
            }
            _ => {}
        }
        data.extend(row);
    }
    let Some(cols) = cols else {
        return Err(Error::parse(1, "no numeric rows"));
    };
    Ok(PointFile {
        format: Format::Csv,
        name: None,
        points: Matrix::from_vec(data.len() / cols, cols, data)?,
    })
}

/// Chooses the parser from the content: TSPLIB when a `NODE_COORD_SECTION`
/// line is present, CSV otherwise.
pub fn parse_points(text: &str) -> Result<PointFile> {
    if text.lines().any(|l| l.trim() == "NODE_COORD_SECTION") {
        parse_tsplib(text)
    } else {
        parse_csv(text)
    }
}

pub fn read_points(path: &Path) -> Result<PointFile> {
    parse_points(&read_text(path)?)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv(points: &DataSet) -> String {
    let mut out = String::new();
    for row in points.iter_rows() {
        let mut sep = "";
        for v in row {
            let _ = write!(out, "{sep}{v}");
            sep = ",";
        }
        out.push('\n');
    }
    out
}

/// A parsed report: the solve result plus the radial-search profile when
/// the report carried one.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportFile {
    pub report: SolveReport,
    pub profile: Option<Vec<(f64, Option<f64>)>>,
}

const HEADER: &str = "# hiclust report v1";

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Serialises a report. Keys and blocks always appear in the same order.
pub fn emit_report(report: &SolveReport, profile: Option<&[(f64, Option<f64>)]>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    let _ = writeln!(s, "model: {}", report.model);
    let _ = writeln!(s, "k: {}", report.k);
    let _ = writeln!(s, "seed: {}", report.seed.map_or("-".to_string(), |v| v.to_string()));
    let _ = writeln!(s, "outer_iterations: {}", report.parameter_trace.len());
    let _ = writeln!(s, "total_inner_iterations: {}", report.total_inner_iterations);
    let _ = writeln!(s, "continuous_cost: {}", report.continuous_cost);
    let _ = writeln!(s, "snapped_cost: {}", report.snapped.cost);
    let _ = writeln!(s, "cluster_centers: {}", join(&report.snapped.cluster_centers));
    let _ = writeln!(s, "total_center: {}", report.snapped.total_center);
    let _ = writeln!(s, "assignment: {}", join(&report.snapped.assignment));
    if let Some(t) = report.wall_time {
        let _ = writeln!(s, "wall_time: {t}");
    }

    let _ = writeln!(s, "\n[final_centers]");
    let header: Vec<String> = (1..=report.final_centers.cols()).map(|j| format!("x{j}")).collect();
    let _ = writeln!(s, "{}", header.join("\t"));
    for row in report.final_centers.iter_rows() {
        let _ = writeln!(s, "{}", row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\t"));
    }

    let _ = writeln!(s, "\n[outer]");
    let _ = writeln!(s, "outer\tlambda\tmu\tsmoothed_cost\tinner_iterations");
    for (i, (&(lambda, mu), (&cost, &iters))) in report
        .parameter_trace
        .iter()
        .zip(report.smoothed_cost_trace.iter().zip(&report.inner_iterations))
        .enumerate()
    {
        let _ = writeln!(s, "{i}\t{lambda}\t{mu}\t{cost}\t{iters}");
    }

    let _ = writeln!(s, "\n[inner_objectives]");
    let _ = writeln!(s, "outer\tstep\tobjective");
    for (i, trace) in report.inner_objectives.iter().enumerate() {
        for (j, v) in trace.iter().enumerate() {
            let _ = writeln!(s, "{i}\t{j}\t{v}");
        }
    }

    if let Some(profile) = profile {
        s.push('\n');
        s.push_str(&emit_profile(profile));
    }
    s
}

/// The `[profile]` block alone: one `(probe, multiplier, cost)` row per
/// radial-search probe, `failed` in place of the cost of a failed probe.
pub fn emit_profile(profile: &[(f64, Option<f64>)]) -> String {
    let mut s = String::from("[profile]\nprobe\tmultiplier\tcost\n");
    for (i, (mult, cost)) in profile.iter().enumerate() {
        let cost = cost.map_or("failed".to_string(), |c| c.to_string());
        let _ = writeln!(s, "{}\t{mult}\t{cost}", i + 1);
    }
    s
}

pub fn write_report(path: &Path, report: &SolveReport, profile: Option<&[(f64, Option<f64>)]>) -> Result<()> {
    write_text(path, &emit_report(report, profile))
}

struct Cursor<'t> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'t>>>,
}

impl<'t> Cursor<'t> {
    fn next(&mut self) -> Option<(usize, &'t str)> {
        self.lines.next().map(|(i, l)| (i + 1, l))
    }

    fn peek_line(&mut self) -> Option<&'t str> {
        self.lines.peek().map(|(_, l)| *l)
    }
}

fn num<T: std::str::FromStr>(no: usize, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(no, format!("cannot read value {field:?}")))
}

fn list<T: std::str::FromStr>(no: usize, value: &str) -> Result<Vec<T>> {
    value.split_whitespace().map(|f| num(no, f)).collect()
}

/// A `[name]` block: its name, header line number and numbered rows.
type Block<'t> = (String, usize, Vec<(usize, Vec<&'t str>)>);

/// Reads a report written by [`emit_report`].
pub fn parse_report(text: &str) -> Result<ReportFile> {
    let mut cur = Cursor {
        lines: text.lines().enumerate().peekable(),
    };
    match cur.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        _ => return Err(Error::parse(1, format!("missing `{HEADER}` header"))),
    }

    let mut keys = std::collections::BTreeMap::new();
    while let Some(line) = cur.peek_line() {
        if line.starts_with('[') {
            break;
        }
        let (no, line) = cur.next().expect("peeked");
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(no, format!("expected `key: value`, found {line:?}")))?;
        keys.insert(k.trim().to_string(), (no, v.trim().to_string()));
    }
    let key = |name: &str| {
        keys.get(name)
            .map(|(no, v)| (*no, v.as_str()))
            .ok_or_else(|| Error::parse(0, format!("missing key `{name}`")))
    };

    let (no, v) = key("model")?;
    let model: ModelKind = v.parse().map_err(|_| Error::parse(no, format!("unknown model {v:?}")))?;
    let (no, v) = key("k")?;
    let k: usize = num(no, v)?;
    let (no, v) = key("seed")?;
    let seed = if v == "-" { None } else { Some(num(no, v)?) };
    let (no, v) = key("total_inner_iterations")?;
    let total_inner_iterations = num(no, v)?;
    let (no, v) = key("continuous_cost")?;
    let continuous_cost = num(no, v)?;
    let (no, v) = key("snapped_cost")?;
    let cost = num(no, v)?;
    let (no, v) = key("cluster_centers")?;
    let cluster_centers = list(no, v)?;
    let (no, v) = key("total_center")?;
    let total_center = num(no, v)?;
    let (no, v) = key("assignment")?;
    let assignment = list(no, v)?;
    let wall_time = match keys.get("wall_time") {
        Some((no, v)) => Some(num(*no, v)?),
        None => None,
    };

    let mut blocks: Vec<Block> = Vec::new();
    while let Some((no, line)) = cur.next() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            cur.next().ok_or_else(|| Error::parse(no, "block without column header"))?;
            blocks.push((name.to_string(), no, Vec::new()));
        } else {
            let block = blocks
                .last_mut()
                .ok_or_else(|| Error::parse(no, "row outside a block"))?;
            block.2.push((no, line.split('\t').collect()));
        }
    }
    let block = |name: &str| blocks.iter().find(|b| b.0 == name);

    let (_, centers_line, rows) = block("final_centers").ok_or_else(|| Error::parse(0, "missing [final_centers] block"))?;
    let mut data = Vec::new();
    let mut cols = None;
    for (no, fields) in rows {
        if *cols.get_or_insert(fields.len()) != fields.len() {
            return Err(Error::parse(*no, "ragged [final_centers] row"));
        }
        for f in fields {
            data.push(num(*no, f)?);
        }
    }
    let final_centers = match cols {
        Some(c) => Matrix::from_vec(rows.len(), c, data)?,
        None => return Err(Error::parse(*centers_line, "[final_centers] is empty")),
    };

    let mut parameter_trace = Vec::new();
    let mut smoothed_cost_trace = Vec::new();
    let mut inner_iterations = Vec::new();
    if let Some((_, _, rows)) = block("outer") {
        for (no, f) in rows {
            if f.len() != 5 {
                return Err(Error::parse(*no, "[outer] rows have 5 columns"));
            }
            parameter_trace.push((num(*no, f[1])?, num(*no, f[2])?));
            smoothed_cost_trace.push(num(*no, f[3])?);
            inner_iterations.push(num(*no, f[4])?);
        }
    }

    let mut inner_objectives: Vec<Vec<f64>> = vec![Vec::new(); parameter_trace.len()];
    if let Some((_, _, rows)) = block("inner_objectives") {
        for (no, f) in rows {
            if f.len() != 3 {
                return Err(Error::parse(*no, "[inner_objectives] rows have 3 columns"));
            }
            let outer: usize = num(*no, f[0])?;
            let slot = inner_objectives
                .get_mut(outer)
                .ok_or_else(|| Error::parse(*no, format!("outer index {outer} has no [outer] row")))?;
            slot.push(num(*no, f[2])?);
        }
    }

    let profile = match block("profile") {
        Some((_, _, rows)) => Some(
            rows.iter()
                .map(|(no, f)| {
                    if f.len() != 3 {
                        return Err(Error::parse(*no, "[profile] rows have 3 columns"));
                    }
                    let cost = if f[2] == "failed" { None } else { Some(num(*no, f[2])?) };
                    Ok((num(*no, f[1])?, cost))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    Ok(ReportFile {
        report: SolveReport {
            model,
            k,
            seed,
            final_centers,
            parameter_trace,
            smoothed_cost_trace,
            inner_iterations,
            inner_objectives,
            total_inner_iterations,
            continuous_cost,
            snapped: SnappedSolution {
                cluster_centers,
                total_center,
                assignment,
                cost,
            },
            wall_time,
        },
        profile,
    })
}
