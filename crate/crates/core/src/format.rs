//! Embedding files: an 8-byte magic `CSEMB001`, little-endian `u64` row and
//! column counts, then the rows as little-endian `f64`.

use std::io::{BufRead, Read, Write};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::sparse::DenseBlock;

pub const MAGIC: &[u8; 8] = b"CSEMB001";
pub const HEADER_LEN: usize = 24;

pub fn write_embedding<T: Scalar, W: Write>(out: &mut W, block: &DenseBlock<T>) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(block.n_rows() as u64).to_le_bytes())?;
    out.write_all(&(block.n_cols() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(block.n_cols() * 8);
    for row in block.rows() {
        buf.clear();
        for v in row {
            buf.extend_from_slice(&v.as_f64().to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_embedding<R: Read>(input: &mut R) -> Result<DenseBlock<f64>> {
    let mut header = [0u8; HEADER_LEN];
    input
        .read_exact(&mut header)
        .map_err(|_| parse("file is shorter than the header"))?;
    if &header[..8] != MAGIC {
        return Err(parse("missing CSEMB001 magic"));
    }
    let word = |k: usize| u64::from_le_bytes(header[k..k + 8].try_into().expect("8 bytes"));
    let (n_rows, d) = (word(8), word(16));
    let len = n_rows
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| parse("header dimensions overflow"))?;
    let mut payload = Vec::new();
    input.read_to_end(&mut payload)?;
    if payload.len() != len {
        return Err(parse(&format!(
            "payload holds {} bytes, header promises {len}",
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseBlock::new(n_rows as usize, d as usize, values).map_err(|_| parse("payload contains non-finite values"))
}

fn parse(msg: &str) -> Error {
    Error::Parse {
        line: 0,
        msg: msg.to_string(),
    }
}

/// One row per line: optional label column, then the embedding values.
pub fn write_embedding_csv<T: Scalar, W: Write>(
    out: &mut W,
    block: &DenseBlock<T>,
    labels: Option<&[u64]>,
) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != block.n_rows() {
            return Err(invalid("one label per row is required"));
        }
    }
    for (i, row) in block.rows().enumerate() {
        let mut line = match labels {
            Some(l) => l[i].to_string(),
            None => i.to_string(),
        };
        for v in row {
            line.push(',');
            line.push_str(&v.as_f64().to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Reads the CSV written by [`write_embedding_csv`], dropping the id column.
pub fn read_embedding_csv<R: BufRead>(input: R) -> Result<DenseBlock<f64>> {
    let mut rows = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .skip(1)
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: k + 1,
                msg: e.to_string(),
            })?;
        rows.push(row);
    }
    DenseBlock::from_rows(&rows)
}
