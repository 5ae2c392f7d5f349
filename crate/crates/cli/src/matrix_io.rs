//! Plain-text matrix blocks: whitespace-separated rows, one matrix per block,
//! blocks separated by blank lines. Lines starting with `#` are ignored.

use std::path::Path;

use nalgebra::DMatrix;

use spdgeo::{SpdMatrix, SymMatrix};

#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parses all blocks; the dimension is set by the first block.
pub fn parse_blocks(text: &str) -> Result<Vec<DMatrix<f64>>, ParseError> {
    let mut blocks: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut current: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ParseError(format!("line {}: bad number '{tok}'", lineno + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        current.push(row);
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    let n = match blocks.first() {
        Some(b) => b.len(),
        None => return Err(ParseError("no matrices found".into())),
    };
    blocks
        .iter()
        .enumerate()
        .map(|(k, rows)| {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(ParseError(format!("block {}: expected a {n}x{n} matrix", k + 1)));
            }
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        })
        .collect()
}

pub fn read_blocks(path: &Path) -> Result<Vec<DMatrix<f64>>, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError(format!("{}: {e}", path.display())))?;
    parse_blocks(&text).map_err(|e| ParseError(format!("{}: {e}", path.display())))
}

pub fn read_sym(path: &Path) -> Result<Vec<SymMatrix>, ParseError> {
    Ok(read_blocks(path)?.into_iter().map(SymMatrix::new).collect())
}

/// Symmetrizes then checks positive definiteness.
pub fn read_spd(path: &Path) -> Result<Vec<spdgeo::Result<SpdMatrix>>, ParseError> {
    Ok(read_sym(path)?.into_iter().map(SpdMatrix::new).collect())
}

pub fn format_scalar(v: f64, precision: usize) -> String {
    // avoid printing "-0.000…"
    let s = format!("{v:.precision$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn format_matrix(m: &DMatrix<f64>, precision: usize) -> String {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| format_scalar(m[(i, j)], precision))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}
