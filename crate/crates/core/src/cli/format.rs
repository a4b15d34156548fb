//! Plain-text file formats: filtrations, point clouds and diagrams.
//!
//! Filtration files start with `# simpfilt v1` and contain one op per line:
//!
//! ```text
//! # simpfilt v1
//! t 0.5
//! i 0
//! i 1
//! i 0 1
//! t 1
//! c 0 1
//! ```
//!
//! `t g` sets the grade of the ops that follow; grades never decrease. Ops
//! before the first `t` line are graded 1, 2, 3, ... in order. Lines
//! starting with `#` are comments.

use std::fmt::Write as _;

use thiserror::Error;

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::engine::{ElementaryOp, Filtration, OpKind};
use crate::simplex::{Simplex, VertexId};
use crate::tda::PointCloud;

pub const FILTRATION_HEADER: &str = "# simpfilt v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn perr(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        msg: msg.into(),
    }
}

fn parse_vertex(tok: &str, line: usize) -> Result<VertexId, ParseError> {
    tok.parse()
        .map_err(|_| perr(line, format!("bad vertex id {tok:?}")))
}

fn parse_real(tok: &str, line: usize) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(perr(line, format!("bad number {tok:?}"))),
    }
}

pub fn parse_filtration(text: &str) -> Result<Filtration, ParseError> {
    let mut ops = Vec::new();
    let mut grade: Option<f64> = None;
    let mut auto = 0u64;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let mut toks = l.split_whitespace();
        let head = toks.next().expect("line is not empty");
        let rest: Vec<&str> = toks.collect();
        let mut next_grade = || match grade {
            Some(g) => g,
            None => {
                auto += 1;
                auto as f64
            }
        };
        match head {
            "t" => {
                let [tok] = rest[..] else {
                    return Err(perr(line, "`t` takes exactly one grade"));
                };
                let t = parse_real(tok, line)?;
                // auto-graded ops already used grades up to `auto`
                let floor = grade.unwrap_or(auto as f64);
                if t < floor {
                    return Err(perr(
                        line,
                        format!("grade {t} is below the previous grade {floor}"),
                    ));
                }
                grade = Some(t);
            }
            "i" => {
                if rest.is_empty() {
                    return Err(perr(line, "`i` needs at least one vertex"));
                }
                let vs = rest
                    .iter()
                    .map(|t| parse_vertex(t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                let s = Simplex::new(vs).map_err(|e| perr(line, e.to_string()))?;
                ops.push(ElementaryOp::insert(s, next_grade()));
            }
            "c" => {
                let [a, b] = rest[..] else {
                    return Err(perr(line, "`c` takes exactly two vertices"));
                };
                let (u, v) = (parse_vertex(a, line)?, parse_vertex(b, line)?);
                if u == v {
                    return Err(perr(line, "cannot collapse a vertex onto itself"));
                }
                ops.push(ElementaryOp::collapse(u, v, next_grade()));
            }
            other => return Err(perr(line, format!("unknown op {other:?}"))),
        }
    }
    Ok(Filtration::new(ops))
}

/// Writes `f` with an explicit `t` line before every change of grade.
/// Grades use the shortest representation that parses back exactly.
pub fn write_filtration(f: &Filtration) -> String {
    let mut out = format!("{FILTRATION_HEADER}\n");
    let mut current: Option<f64> = None;
    for op in f.ops() {
        if current != Some(op.grade) {
            let _ = writeln!(out, "t {}", op.grade);
            current = Some(op.grade);
        }
        match &op.kind {
            OpKind::Insert(s) => {
                let _ = writeln!(out, "i {s}");
            }
            OpKind::Collapse { keep, remove } => {
                let _ = writeln!(out, "c {keep} {remove}");
            }
        }
    }
    out
}

/// One point per line, whitespace-separated coordinates.
pub fn parse_points(text: &str) -> Result<PointCloud, ParseError> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let p = l
            .split_whitespace()
            .map(|t| parse_real(t, i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = pts.first() {
            if first.len() != p.len() {
                return Err(perr(
                    i + 1,
                    format!("expected {} coordinates, found {}", first.len(), p.len()),
                ));
            }
        }
        pts.push(p);
        lines.push(i + 1);
    }
    PointCloud::new(pts).map_err(|e| perr(lines.first().copied().unwrap_or(0), e.to_string()))
}

/// `printf("%.9g")`: nine significant digits, trailing zeros removed.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `dim birth death` per line, `inf` for essential deaths, sorted.
pub fn write_diagram(d: &PersistenceDiagram) -> String {
    let mut out = String::new();
    for p in d.points() {
        let _ = writeln!(
            out,
            "{} {} {}",
            p.dim,
            format_g9(p.birth),
            format_g9(p.death)
        );
    }
    out
}

pub fn parse_diagram(text: &str) -> Result<PersistenceDiagram, ParseError> {
    let mut pts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        let [d, b, e] = f[..] else {
            return Err(perr(line, "expected `dim birth death`"));
        };
        let dim: usize = d
            .parse()
            .map_err(|_| perr(line, format!("bad dimension {d:?}")))?;
        let birth = parse_real(b, line)?;
        let point = if e == "inf" {
            DiagramPoint::essential(dim, birth)
        } else {
            let death = parse_real(e, line)?;
            if death < birth {
                return Err(perr(line, "death precedes birth"));
            }
            DiagramPoint::finite(dim, birth, death)
        };
        pts.push(point);
    }
    Ok(PersistenceDiagram::new(pts))
}
