//! Flat-file formats: graph JSON, point and polyline CSV, complex text.

use std::fmt::Write as _;

use thiserror::Error;

use crate::complexes::SimplicialComplex2;
use crate::curve::ClosedPolyline;
use crate::geometry::Point;
use crate::graph::{GraphPoint, GraphSpec};
use crate::sampling::Sample;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Other(String),
}

fn line_err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line { line, msg: msg.into() }
}

/// Parses graph JSON. Structural mistakes (missing fields, wrong types,
/// unknown keys) are reported with their line and column; geometric
/// validity is left to [`GraphSpec::validate`].
pub fn parse_graph(text: &str) -> Result<GraphSpec, ParseError> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_graph(spec: &GraphSpec) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("graph spec serializes");
    s.push('\n');
    s
}

fn parse_coords(body: &str, line: usize) -> Result<Vec<f64>, ParseError> {
    let coords = body
        .split(',')
        .enumerate()
        .map(|(k, f)| {
            let f = f.trim();
            f.parse::<f64>().map_err(|_| line_err(line, format!("field {}: cannot parse {f:?} as a number", k + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() < 2 {
        return Err(line_err(line, format!("expected at least 2 coordinates, found {}", coords.len())));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(line_err(line, "non-finite coordinate"));
    }
    Ok(coords)
}

fn parse_provenance(comment: &str, line: usize) -> Result<Option<GraphPoint>, ParseError> {
    let mut edge = None;
    let mut t = None;
    for tok in comment.split_whitespace() {
        if let Some(v) = tok.strip_prefix("edge=") {
            edge = Some(v.parse::<usize>().map_err(|_| line_err(line, format!("bad edge index {v:?}")))?);
        } else if let Some(v) = tok.strip_prefix("t=") {
            t = Some(v.parse::<f64>().map_err(|_| line_err(line, format!("bad arclength {v:?}")))?);
        }
    }
    match (edge, t) {
        (Some(edge), Some(t)) => Ok(Some(GraphPoint { edge, t })),
        (None, None) => Ok(None),
        _ => Err(line_err(line, "provenance needs both edge= and t=")),
    }
}

/// Parses point CSV. Blank lines and lines starting with `#` are skipped;
/// a trailing `# edge=<i> t=<v>` comment records provenance.
pub fn parse_points(text: &str) -> Result<Sample, ParseError> {
    let mut points = Vec::new();
    let mut provenance = Vec::new();
    let mut dim = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (body, comment) = match trimmed.split_once('#') {
            Some((b, c)) => (b.trim(), Some(c)),
            None => (trimmed, None),
        };
        let coords = parse_coords(body, line)?;
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(line_err(line, format!("expected {d} coordinates, found {}", coords.len())));
            }
            _ => {}
        }
        provenance.push(match comment {
            Some(c) => parse_provenance(c, line)?,
            None => None,
        });
        points.push(Point::new(coords).map_err(|e| line_err(line, e.to_string()))?);
    }
    if provenance.iter().all(Option::is_none) {
        provenance.clear();
    }
    Ok(Sample { points, provenance, seed: None })
}

fn coord_line(p: &Point) -> String {
    p.coords().iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",")
}

pub fn write_points(s: &Sample) -> String {
    let mut out = String::new();
    for (i, p) in s.points.iter().enumerate() {
        out.push_str(&coord_line(p));
        if let Some(gp) = s.provenance_of(i) {
            let _ = write!(out, " # edge={} t={}", gp.edge, gp.t);
        }
        out.push('\n');
    }
    out
}

/// Polylines in the point format, each preceded by a `# polyline closed=true`
/// header line.
pub fn write_polylines(loops: &[ClosedPolyline]) -> String {
    let mut out = String::new();
    for p in loops {
        out.push_str("# polyline closed=true\n");
        for v in p.vertices() {
            out.push_str(&coord_line(v));
            out.push('\n');
        }
    }
    out
}

/// Reads back [`write_polylines`] output. Text without headers is one loop.
pub fn parse_polylines(text: &str) -> Result<Vec<Vec<Point>>, ParseError> {
    let mut loops: Vec<Vec<Point>> = Vec::new();
    let mut current: Option<Vec<Point>> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with("# polyline") {
            loops.extend(current.take());
            current = Some(Vec::new());
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let body = trimmed.split('#').next().unwrap_or("").trim();
        let p = Point::new(parse_coords(body, line)?).map_err(|e| line_err(line, e.to_string()))?;
        current.get_or_insert_with(Vec::new).push(p);
    }
    loops.extend(current);
    Ok(loops)
}

/// `v`, `e` and `t` lines, each block in increasing index order.
pub fn write_complex(k: &SimplicialComplex2) -> String {
    let mut out = String::new();
    for v in 0..k.n_vertices() {
        let _ = writeln!(out, "v {v}");
    }
    for [a, b] in k.edges() {
        let _ = writeln!(out, "e {a} {b}");
    }
    for [a, b, c] in k.triangles() {
        let _ = writeln!(out, "t {a} {b} {c}");
    }
    out
}

pub fn parse_complex(text: &str) -> Result<SimplicialComplex2, ParseError> {
    let mut n = 0;
    let mut edges = Vec::new();
    let mut tris = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let mut it = raw.split_whitespace();
        let Some(tag) = it.next() else { continue };
        if tag.starts_with('#') {
            continue;
        }
        let idx = it
            .map(|f| f.parse::<usize>().map_err(|_| line_err(line, format!("bad index {f:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let want = match tag {
            "v" => 1,
            "e" => 2,
            "t" => 3,
            _ => return Err(line_err(line, format!("unknown record {tag:?}"))),
        };
        if idx.len() != want {
            return Err(line_err(line, format!("{tag} record needs {want} indices, found {}", idx.len())));
        }
        match want {
            1 => n = n.max(idx[0] + 1),
            2 => edges.push([idx[0], idx[1]]),
            _ => tris.push([idx[0], idx[1], idx[2]]),
        }
    }
    SimplicialComplex2::new(n, edges, tris).map_err(|e| ParseError::Other(e.to_string()))
}
