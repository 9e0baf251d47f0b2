//! Matrix file formats: headerless CSV (one row per observation) and the
//! `HNM1` binary layout (magic, little-endian u64 rows, u64 cols, then
//! row-major little-endian f64 data).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"HNM1";

pub fn read_csv_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let file = File::open(path)?;
    parse_csv_matrix(BufReader::new(file))
}

pub fn parse_csv_matrix<R: Read>(reader: R) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, s)| {
                s.parse::<f64>()
                    .map_err(|_| Error::Format(format!("row {i}, column {j}: cannot parse {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_csv_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let file = File::create(path)?;
    write_csv_matrix_to(BufWriter::new(file), m)
}

pub fn write_csv_matrix_to<W: Write>(writer: W, m: &DenseMatrix) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for i in 0..m.rows() {
        wtr.write_record(m.row(i).iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a vector stored as a single CSV column (or a single row).
pub fn read_csv_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = read_csv_matrix(path)?;
    match m.shape() {
        (_, 1) | (1, _) => Ok(m.into_data()),
        (r, c) => Err(Error::Format(format!("expected a vector, found a {r}x{c} table"))),
    }
}

pub fn write_csv_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    write_csv_matrix(path, &DenseMatrix::new(v.len(), 1, v.to_vec())?)
}

pub fn encode_binary(m: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 8 * m.data().len());
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < 20 || &bytes[..4] != BINARY_MAGIC {
        return Err(Error::Format("missing HNM1 header".into()));
    }
    let rows = u64::from_le_bytes(bytes[4..12].try_into().expect("8 bytes")) as usize;
    let cols = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
    let body = &bytes[20..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|k| k.checked_mul(8))
        .ok_or_else(|| Error::Format("matrix size overflows".into()))?;
    if body.len() != expected {
        return Err(Error::Format(format!(
            "{rows}x{cols} matrix needs {expected} data bytes, found {}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseMatrix::new(rows, cols, data)
}

pub fn write_binary_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    std::fs::write(path, encode_binary(m))?;
    Ok(())
}

pub fn read_binary_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    decode_binary(&std::fs::read(path)?)
}

/// Reads a matrix, picking the format from the file contents.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        decode_binary(&bytes)
    } else {
        parse_csv_matrix(bytes.as_slice())
    }
}
