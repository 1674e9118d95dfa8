//! Output formats: CSV tables, JSON-lines records and the binary field
//! layout.
//!
//! Floats are written in shortest round-trip form, so identical runs give
//! byte-identical files.
//!
//! # Binary field layout
//!
//! All integers and floats little-endian:
//!
//! | offset | size        | content                                   |
//! |--------|-------------|-------------------------------------------|
//! | 0      | 8           | magic `KDSFLD01`                          |
//! | 8      | 8           | `n1` (u64), nodes along `q1` (r or x)     |
//! | 16     | 8           | `n2` (u64), nodes along `q2` (θ or y)     |
//! | 24     | 4           | `m` (i32), azimuthal mode                 |
//! | 28     | 4           | reserved, zero                            |
//! | 32     | 8           | time (f64)                                |
//! | 40     | 8·n1        | `q1` node coordinates (f64)               |
//! |        | 8·n2        | `q2` node coordinates (f64)               |
//! |        | 16·n1·n2    | `u` as `(re, im)` pairs, row-major        |
//! |        | 16·n1·n2    | `v = ∂_τ u`, same order                   |
//!
//! Row-major means node `(i, j)` is at index `i·n2 + j`: `q2` varies fastest.

use std::io::{self, Read, Write};

use kds_core::solver::{Grid2D, WaveState};
use kds_core::C64;
use serde::Serialize;

pub const FIELD_MAGIC: &[u8; 8] = b"KDSFLD01";

/// A column-oriented table written as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("writing to memory");
        }
        w.into_inner().expect("writing to memory")
    }
}

/// Reads two named float columns of a CSV file with a header row.
pub fn read_columns(input: impl Read, x: &str, y: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or(format!("no column named `{name}`"));
    let (ix, iy) = (col(x)?, col(y)?);
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let parse = |i: usize| -> Result<f64, String> {
            let s = rec.get(i).unwrap_or("");
            s.trim().parse().map_err(|_| format!("row {}: `{s}` is not a number", n + 2))
        };
        out.push((parse(ix)?, parse(iy)?));
    }
    Ok(out)
}

/// One JSON object per line.
pub fn json_lines<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("serializable record");
        out.push(b'\n');
    }
    out
}

pub fn json_pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable report");
    out.push(b'\n');
    out
}

/// A decoded binary field file.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub m: i32,
    pub time: f64,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

pub fn write_field(mut w: impl Write, grid: &Grid2D, state: &WaveState) -> io::Result<()> {
    let (n1, n2) = (grid.q1.n, grid.q2.n);
    if state.u.len() != n1 * n2 || state.v.len() != n1 * n2 {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "state does not match the grid"));
    }
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(n1 as u64).to_le_bytes())?;
    w.write_all(&(n2 as u64).to_le_bytes())?;
    w.write_all(&state.m.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    w.write_all(&state.time.to_le_bytes())?;
    for x in grid.q1.nodes().chain(grid.q2.nodes()) {
        w.write_all(&x.to_le_bytes())?;
    }
    for z in state.u.iter().chain(&state.v) {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn field_bytes(grid: &Grid2D, state: &WaveState) -> Vec<u8> {
    let mut out = Vec::with_capacity(40 + 8 * (grid.q1.n + grid.q2.n) + 32 * grid.len());
    write_field(&mut out, grid, state).expect("writing to memory");
    out
}

pub fn read_field(mut r: impl Read) -> io::Result<FieldFile> {
    let bad = |why: &str| io::Error::new(io::ErrorKind::InvalidData, why.to_string());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(bad("not a field file (bad magic)"));
    }
    let mut b8 = [0u8; 8];
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b8)?;
    let n1 = u64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let n2 = u64::from_le_bytes(b8);
    let len = n1.checked_mul(n2).filter(|&n| n <= 1 << 32).ok_or_else(|| bad("dimensions too large"))? as usize;
    r.read_exact(&mut b4)?;
    let m = i32::from_le_bytes(b4);
    r.read_exact(&mut b4)?;
    r.read_exact(&mut b8)?;
    let time = f64::from_le_bytes(b8);
    let mut floats = |n: usize| -> io::Result<Vec<f64>> {
        let mut buf = vec![0u8; 8 * n];
        r.read_exact(&mut buf)?;
        Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    };
    let q1 = floats(n1 as usize)?;
    let q2 = floats(n2 as usize)?;
    let complex = |f: Vec<f64>| f.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect::<Vec<_>>();
    let u = complex(floats(2 * len)?);
    let v = complex(floats(2 * len)?);
    Ok(FieldFile { m, time, q1, q2, u, v })
}
