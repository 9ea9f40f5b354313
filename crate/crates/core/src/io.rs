//! Field and kernel files.
//!
//! Field CSV: header `index0[,index1[,index2]],x[,y[,z]],re,im`, one row per
//! sample in row-major order. Field JSON: `{"grid": {...}, "values": [[re, im], ...]}`.
//! Kernel CSV: `rho,re,im`. Floats are written in shortest round-trip form,
//! so values survive a write/read cycle bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::field::Field;
use crate::grid::Grid;
use crate::operator::Kernel1D;

const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

/// File encodings for fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    Csv,
    Json,
}

impl FieldFormat {
    /// `.json` selects JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => FieldFormat::Json,
            _ => FieldFormat::Csv,
        }
    }
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes.
fn float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn csv_header(dims: usize) -> Vec<String> {
    let mut header: Vec<String> = (0..dims).map(|d| format!("index{d}")).collect();
    header.extend(AXIS_NAMES[..dims].iter().map(|s| s.to_string()));
    header.push("re".into());
    header.push("im".into());
    header
}

pub fn write_field_csv<W: Write>(field: &Field, writer: W) -> Result<(), IoError> {
    let grid = field.grid();
    let dims = grid.dims();
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(csv_header(dims))?;
    let mut record = Vec::with_capacity(2 * dims + 2);
    for (flat, v) in field.values().iter().enumerate() {
        record.clear();
        let idx = grid.unravel(flat);
        let p = grid.point(flat);
        record.extend(idx[..dims].iter().map(|i| i.to_string()));
        record.extend(p[..dims].iter().map(|&x| float(x)));
        record.push(float(v.re));
        record.push(float(v.im));
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a field CSV. The grid is recovered from the index and coordinate
/// columns: `n` from the largest index, `origin` from the first coordinate,
/// `spacing` from the coordinate span.
pub fn read_field_csv<R: Read>(reader: R) -> Result<Field, IoError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    let dims = (1..=3)
        .find(|&d| header == csv_header(d))
        .ok_or_else(|| IoError::Format(format!("unrecognised header {header:?}")))?;

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let mut idx = [0usize; 3];
        let mut pos = [0f64; 3];
        for d in 0..dims {
            idx[d] = parse_field(&record, d)?;
            pos[d] = parse_field(&record, dims + d)?;
        }
        let re: f64 = parse_field(&record, 2 * dims)?;
        let im: f64 = parse_field(&record, 2 * dims + 1)?;
        rows.push((idx, pos, Complex64::new(re, im)));
    }
    if rows.is_empty() {
        return Err(IoError::Format("no data rows".into()));
    }

    let mut n = vec![0usize; dims];
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for (idx, pos, _) in &rows {
        for d in 0..dims {
            n[d] = n[d].max(idx[d] + 1);
            lo[d] = lo[d].min(pos[d]);
            hi[d] = hi[d].max(pos[d]);
        }
    }
    let spacing: Vec<f64> = (0..dims)
        .map(|d| {
            if n[d] > 1 {
                (hi[d] - lo[d]) / (n[d] - 1) as f64
            } else {
                0.0
            }
        })
        .collect();
    let grid = Grid::new(dims, &n, &spacing, &lo)?;
    if rows.len() != grid.len() {
        return Err(IoError::Format(format!(
            "expected {} rows, found {}",
            grid.len(),
            rows.len()
        )));
    }

    let mut values = vec![None; grid.len()];
    for (idx, pos, v) in rows {
        for d in 0..dims {
            let want = lo[d] + idx[d] as f64 * spacing[d];
            if (pos[d] - want).abs() > 1e-9 * (spacing[d] + want.abs()) {
                return Err(IoError::Format(format!(
                    "coordinate {} at index {:?} is off the uniform grid",
                    pos[d],
                    &idx[..dims]
                )));
            }
        }
        let flat = grid.ravel(&idx[..dims]);
        if values[flat].replace(v).is_some() {
            return Err(IoError::Format(format!(
                "duplicate index {:?}",
                &idx[..dims]
            )));
        }
    }
    let values = values
        .into_iter()
        .map(|v| v.expect("every index filled"))
        .collect();
    Ok(Field::new(grid, values)?)
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, col: usize) -> Result<T, IoError> {
    let text = record
        .get(col)
        .ok_or_else(|| IoError::Format(format!("missing column {col}")))?;
    text.trim()
        .parse()
        .map_err(|_| IoError::Format(format!("cannot parse `{text}` in column {col}")))
}

#[derive(Serialize, Deserialize)]
struct FieldDocument {
    grid: Grid,
    values: Vec<[f64; 2]>,
}

pub fn write_field_json<W: Write>(field: &Field, mut writer: W) -> Result<(), IoError> {
    let doc = FieldDocument {
        grid: field.grid().clone(),
        values: field.values().iter().map(|v| [v.re, v.im]).collect(),
    };
    serde_json::to_writer(&mut writer, &doc)?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn read_field_json<R: Read>(reader: R) -> Result<Field, IoError> {
    let doc: FieldDocument = serde_json::from_reader(reader)?;
    let values = doc
        .values
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    Ok(Field::new(doc.grid, values)?)
}

pub fn write_field(field: &Field, path: &Path, format: FieldFormat) -> Result<(), IoError> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        FieldFormat::Csv => write_field_csv(field, file),
        FieldFormat::Json => write_field_json(field, file),
    }
}

/// Reads a field, choosing the format from the file extension.
pub fn read_field(path: &Path) -> Result<Field, IoError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    match FieldFormat::from_path(path) {
        FieldFormat::Csv => read_field_csv(file),
        FieldFormat::Json => read_field_json(file),
    }
}

pub fn write_kernel_csv<W: Write>(kernel: &Kernel1D, writer: W) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["rho", "re", "im"])?;
    for (rho, v) in kernel.offsets().iter().zip(kernel.values()) {
        out.write_record([float(*rho), float(v.re), float(v.im)])?;
    }
    out.flush()?;
    Ok(())
}
