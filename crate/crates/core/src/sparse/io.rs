//! Text readers: SNAP-style edge lists, Matrix Market coordinate files and
//! point clouds with comma- or whitespace-separated coordinates.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Graph, SparseMatrix};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Reads `u v` pairs, one per line; `#` starts a comment and extra columns are
/// ignored. The vertex count is `max id + 1` unless `n` is given.
pub fn read_edge_list<R: BufRead>(reader: R, n: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id = None::<usize>;
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut fields = body.split_whitespace();
        let mut vertex = || -> Result<usize> {
            let tok = fields
                .next()
                .ok_or_else(|| parse_err(k + 1, "expected two vertex ids"))?;
            tok.parse::<usize>()
                .map_err(|_| parse_err(k + 1, format!("invalid vertex id '{tok}'")))
        };
        let (u, v) = (vertex()?, vertex()?);
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let n = match n {
        Some(n) if n < inferred => return Err(parse_err(0, format!("vertex id {} exceeds n = {n}", inferred - 1))),
        Some(n) => n,
        None => inferred,
    };
    Graph::from_edges(n, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

/// Reads `%%MatrixMarket matrix coordinate {real|integer|pattern} {general|symmetric}`.
/// Indices are 1-based; symmetric files store the lower triangle and are mirrored.
pub fn read_matrix_market<T: Scalar, R: BufRead>(reader: R) -> Result<SparseMatrix<T>> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported layout '{}'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size = None;
    let mut triplets = Vec::new();
    let mut declared_nnz = 0usize;
    let mut seen = 0usize;
    for (k, line) in lines {
        let line = line?;
        let lineno = k + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let Some((n_rows, n_cols)) = size else {
            if fields.len() != 3 {
                return Err(parse_err(lineno, "size line must be 'rows cols nnz'"));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(lineno, format!("invalid size field '{s}'")))
            };
            size = Some((parse(fields[0])?, parse(fields[1])?));
            declared_nnz = parse(fields[2])?;
            continue;
        };
        let want = if field == Field::Pattern { 2 } else { 3 };
        if fields.len() < want {
            return Err(parse_err(lineno, format!("expected {want} fields")));
        }
        let index = |s: &str, bound: usize| -> Result<usize> {
            let i = s
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("invalid index '{s}'")))?;
            if i == 0 || i > bound {
                return Err(parse_err(lineno, format!("index {i} outside 1..={bound}")));
            }
            Ok(i - 1)
        };
        let r = index(fields[0], n_rows)?;
        let c = index(fields[1], n_cols)?;
        let v = match field {
            Field::Pattern => 1.0,
            _ => fields[2]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(lineno, format!("invalid value '{}'", fields[2])))?,
        };
        let v = T::of(v);
        triplets.push((r, c, v));
        if symmetry == Symmetry::Symmetric && r != c {
            triplets.push((c, r, v));
        }
        seen += 1;
    }
    let (n_rows, n_cols) = size.ok_or_else(|| parse_err(0, "missing size line"))?;
    if seen != declared_nnz {
        return Err(parse_err(0, format!("declared {declared_nnz} entries, found {seen}")));
    }
    if symmetry == Symmetry::Symmetric && n_rows != n_cols {
        return Err(parse_err(1, "symmetric matrix must be square"));
    }
    SparseMatrix::from_triplets(n_rows, n_cols, triplets)
}

/// One point per line, coordinates separated by commas or whitespace. Blank lines and `#` comments are skipped.
pub fn read_points_csv<T: Scalar, R: BufRead>(reader: R) -> Result<Vec<Vec<T>>> {
    let mut points: Vec<Vec<T>> = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let point = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::of)
                    .ok_or_else(|| parse_err(k + 1, format!("invalid coordinate '{}'", tok.trim())))
            })
            .collect::<Result<Vec<T>>>()?;
        if let Some(first) = points.first() {
            if first.len() != point.len() {
                return Err(parse_err(
                    k + 1,
                    format!("expected {} coordinates, found {}", first.len(), point.len()),
                ));
            }
        }
        points.push(point);
    }
    Ok(points)
}
