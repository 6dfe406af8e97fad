//! Tabular surface serialization used for checkpoints and initial data.
//!
//! Format (plain text, whitespace-separated):
//!
//! ```text
//! starflow-surface v1
//! center <x> <y> <z>
//! grid <n_lat> <n_lon>
//! <lat index> <lon index> <radius>
//! ...
//! ```
//!
//! Radii are written in full double precision; a file round-trips
//! bit-identically.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::{RadialSurface, SphereGrid};

const MAGIC: &str = "starflow-surface v1";

pub fn write_surface<T: Real, W: Write>(s: &RadialSurface<T>, mut w: W) -> Result<()> {
    let c = s.center();
    writeln!(w, "{MAGIC}")?;
    writeln!(
        w,
        "center {:.17e} {:.17e} {:.17e}",
        c[0].f64(),
        c[1].f64(),
        c[2].f64()
    )?;
    writeln!(w, "grid {} {}", s.grid().n_lat(), s.grid().n_lon())?;
    for i in 0..s.grid().n_lat() {
        for j in 0..s.grid().n_lon() {
            writeln!(w, "{i} {j} {:.17e}", s.radii()[[i, j]].f64())?;
        }
    }
    Ok(())
}

pub fn save_surface<T: Real>(s: &RadialSurface<T>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut buf = std::io::BufWriter::new(file);
    write_surface(s, &mut buf)?;
    buf.flush()?;
    Ok(())
}

pub fn read_surface<T: Real, R: Read>(r: R) -> Result<RadialSurface<T>> {
    let mut lines = BufReader::new(r).lines();
    let magic = next_line(&mut lines)?;
    if magic.trim() != MAGIC {
        return Err(Error::Parse(format!("unexpected header {magic:?}")));
    }
    let center_line = next_line(&mut lines)?;
    let mut it = center_line.split_whitespace();
    if it.next() != Some("center") {
        return Err(Error::Parse("missing center line".into()));
    }
    let mut center = [T::zero(); 3];
    for slot in center.iter_mut() {
        *slot = parse_scalar(
            it.next()
                .ok_or_else(|| Error::Parse("short center line".into()))?,
        )?;
    }
    let grid_line = next_line(&mut lines)?;
    let mut it = grid_line.split_whitespace();
    if it.next() != Some("grid") {
        return Err(Error::Parse("missing grid line".into()));
    }
    let n_lat: usize = parse_index(
        it.next()
            .ok_or_else(|| Error::Parse("short grid line".into()))?,
    )?;
    let n_lon: usize = parse_index(
        it.next()
            .ok_or_else(|| Error::Parse("short grid line".into()))?,
    )?;
    let grid = SphereGrid::new(n_lat, n_lon)?;

    let mut radii = Array2::from_elem((n_lat, n_lon), T::nan());
    let mut rows = 0usize;
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let i: usize = parse_index(it.next().unwrap_or(""))?;
        let j: usize = parse_index(
            it.next()
                .ok_or_else(|| Error::Parse(format!("short row {trimmed:?}")))?,
        )?;
        let f: T = parse_scalar(
            it.next()
                .ok_or_else(|| Error::Parse(format!("short row {trimmed:?}")))?,
        )?;
        if i >= n_lat || j >= n_lon {
            return Err(Error::Parse(format!("node index ({i}, {j}) outside grid")));
        }
        radii[[i, j]] = f;
        rows += 1;
    }
    if rows != n_lat * n_lon || radii.iter().any(|v| v.is_nan()) {
        return Err(Error::Parse(format!(
            "surface file covers {rows} of {} nodes",
            n_lat * n_lon
        )));
    }
    RadialSurface::new(center, radii, grid)
}

pub fn load_surface<T: Real>(path: &Path) -> Result<RadialSurface<T>> {
    let file = std::fs::File::open(path)?;
    read_surface(file)
}

fn next_line(lines: &mut std::io::Lines<impl BufRead>) -> Result<String> {
    match lines.next() {
        Some(line) => Ok(line?),
        None => Err(Error::Parse("unexpected end of surface file".into())),
    }
}

fn parse_scalar<T: Real>(tok: &str) -> Result<T> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad numeric token {tok:?}")))?;
    Ok(T::of(v))
}

fn parse_index(tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("bad index token {tok:?}")))
}
