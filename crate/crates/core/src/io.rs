//! File formats: signal CSV (`x,re,im`), coefficient-field CSV, JSON.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CoefficientField, FieldGrid};
use crate::hilbert::{Space, Vector};

/// Relative tolerance on the spacing of signal abscissae.
const SPACING_RTOL: f64 = 1e-6;

#[derive(Debug, Serialize, Deserialize)]
struct SignalRow {
    x: f64,
    re: f64,
    im: f64,
}

/// Parses a signal CSV with header `x,re,im` and strictly increasing,
/// uniformly spaced `x`. The resulting space is `[x_0, x_0 + n dx)`.
pub fn read_signal<R: Read>(reader: R) -> Result<Vector> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != ["x", "re", "im"] {
        return Err(Error::Parse(format!("expected header x,re,im, found {}", header.join(","))));
    }
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<SignalRow>, _>>()?;
    if rows.len() < 2 {
        return Err(Error::Parse("signal needs at least two rows".into()));
    }
    let n = rows.len();
    let x0 = rows[0].x;
    let dx = (rows[n - 1].x - x0) / (n - 1) as f64;
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::Parse("x must be strictly increasing".into()));
    }
    for (j, r) in rows.iter().enumerate() {
        if (r.x - (x0 + j as f64 * dx)).abs() > SPACING_RTOL * dx {
            return Err(Error::Parse(format!("row {} breaks the uniform spacing (x = {})", j + 1, r.x)));
        }
    }
    let space = Space::sampled(x0, x0 + n as f64 * dx, n)?;
    Vector::new(space, rows.iter().map(|r| Complex64::new(r.re, r.im)).collect())
}

pub fn read_signal_file(path: &Path) -> Result<Vector> {
    read_signal(std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
}

pub fn write_signal<W: Write>(writer: W, f: &Vector) -> Result<()> {
    if !f.space().is_sampled() {
        return Err(Error::WrongSpaceKind { expected: "sampled" });
    }
    let mut w = csv::Writer::from_writer(writer);
    for (j, z) in f.as_slice().iter().enumerate() {
        w.serialize(SignalRow { x: f.space().point(j), re: z.re, im: z.im })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_signal_file(path: &Path, f: &Vector) -> Result<()> {
    write_signal(std::fs::File::create(path)?, f)
}

/// One row per node, rows of the field outermost: `<c1>,<c2>,re,im`.
pub fn write_field<W: Write, G: FieldGrid>(writer: W, field: &CoefficientField<G>) -> Result<()> {
    let grid = field.grid();
    let mut w = csv::Writer::from_writer(writer);
    let [h1, h2] = grid.csv_header();
    w.write_record([h1, h2, "re", "im"])?;
    for i in 0..grid.rows() {
        for l in 0..grid.cols() {
            let [c1, c2] = grid.csv_coords(i, l);
            let z = field.get(i, l);
            w.write_record([c1.to_string(), c2.to_string(), z.re.to_string(), z.im.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_file<G: FieldGrid>(path: &Path, field: &CoefficientField<G>) -> Result<()> {
    write_field(std::fs::File::create(path)?, field)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
