//! Text formats for graphs and group tables.
//!
//! Edge lists hold one `u v` or `u v w` line per edge with 0-indexed
//! vertices; blank lines and `#` comments are skipped. The vertex count is
//! one past the largest index, unless a `# vertices N` comment raises it.
//!
//! Group tables are CSV: the order `m`, then `m` rows of `m` element
//! indices, then optionally one row of `m` weights.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Graph, GroupTable};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut weighted = false;
    let mut declared = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("vertices") {
                if let Some(n) = words.next().and_then(|w| w.parse().ok()) {
                    declared = n;
                }
            }
            continue;
        }
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected 2 or 3 columns, found {}", fields.len())));
        }
        let vertex = |s: &str| s.parse::<usize>().map_err(|e| parse_err(line_no, format!("bad vertex {s:?}: {e}")));
        let (u, v) = (vertex(fields[0])?, vertex(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => {
                weighted = true;
                s.parse::<f64>().map_err(|e| parse_err(line_no, format!("bad weight {s:?}: {e}")))?
            }
            None => 1.0,
        };
        edges.push((u, v, w));
    }
    let n = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0).max(declared);
    if n == 0 {
        return Err(parse_err(0, "edge list defines no vertices"));
    }
    if weighted {
        Graph::from_weighted_edges(n, &edges)
    } else {
        let pairs: Vec<_> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        Graph::from_edges(n, &pairs)
    }
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &Graph, mut out: impl Write) -> Result<()> {
    writeln!(out, "# vertices {}", g.vertex_count())?;
    for (u, v, w) in g.edges() {
        if g.is_weighted() {
            writeln!(out, "{u} {v} {w}")?;
        } else {
            writeln!(out, "{u} {v}")?;
        }
    }
    Ok(())
}

pub fn parse_group_table(text: &str) -> Result<GroupTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;
    let first = rows.first().ok_or_else(|| parse_err(1, "missing group order"))?;
    let m: usize = first
        .get(0)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(1, "first line must hold the group order"))?;
    if rows.len() < m + 1 || rows.len() > m + 2 {
        return Err(parse_err(rows.len(), format!("expected {} or {} rows, found {}", m + 1, m + 2, rows.len())));
    }
    let mut mult = Vec::with_capacity(m);
    for (i, rec) in rows[1..=m].iter().enumerate() {
        let row: Vec<usize> = rec
            .iter()
            .map(|s| s.parse().map_err(|_| parse_err(i + 2, format!("bad index {s:?}"))))
            .collect::<Result<_>>()?;
        if row.len() != m {
            return Err(parse_err(i + 2, format!("row has {} entries, expected {m}", row.len())));
        }
        mult.push(row);
    }
    let weight = match rows.get(m + 1) {
        Some(rec) => {
            let w: Vec<f64> = rec
                .iter()
                .map(|s| s.parse().map_err(|_| parse_err(m + 2, format!("bad weight {s:?}"))))
                .collect::<Result<_>>()?;
            if w.len() != m {
                return Err(parse_err(m + 2, "weight row length differs from order"));
            }
            w
        }
        None => vec![0.0; m],
    };
    GroupTable::new(mult, weight)
}

pub fn write_group_table(g: &GroupTable, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).has_headers(false).from_writer(out);
    w.write_record([g.order().to_string()])?;
    for row in g.table() {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.write_record(g.weight().iter().map(|x| x.to_string()))?;
    w.flush()?;
    Ok(())
}
