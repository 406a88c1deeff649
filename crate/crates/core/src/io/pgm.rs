//! ASCII portable graymap (P2). 0 is occupied, `maxval` is free, anything
//! in between is unknown. Image row 0 is the top of the map.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::IoError;
use crate::geometry::Point2;
use crate::potential::{GridGeometry, Occupancy, OccupancyGrid};

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
}

/// Parses P2 text into an occupancy grid placed at `origin` with cells of
/// `resolution` metres.
pub fn parse_pgm(text: &str, origin: Point2, resolution: f64) -> Result<OccupancyGrid, String> {
    let mut it = tokens(text);
    match it.next() {
        Some("P2") => {}
        Some(m) => return Err(format!("unsupported magic {m:?}, expected P2")),
        None => return Err("empty file".into()),
    }
    let mut header = |what: &str| -> Result<usize, String> {
        let tok = it.next().ok_or_else(|| format!("missing {what}"))?;
        tok.parse::<usize>()
            .map_err(|_| format!("bad {what} {tok:?}"))
    };
    let width = header("width")?;
    let height = header("height")?;
    let maxval = header("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maxval {maxval} out of range"));
    }
    let geometry = GridGeometry::new(resolution, origin, width, height).map_err(|e| e.to_string())?;
    let mut cells = vec![Occupancy::Unknown; geometry.len()];
    for row in 0..height {
        let iy = height - 1 - row;
        for ix in 0..width {
            let tok = it.next().ok_or_else(|| {
                format!(
                    "truncated data: expected {} values, got {}",
                    width * height,
                    row * width + ix
                )
            })?;
            let v: usize = tok.parse().map_err(|_| format!("bad pixel value {tok:?}"))?;
            if v > maxval {
                return Err(format!("pixel value {v} exceeds maxval {maxval}"));
            }
            cells[geometry.index(ix, iy)] = if v == 0 {
                Occupancy::Occupied
            } else if v == maxval {
                Occupancy::Free
            } else {
                Occupancy::Unknown
            };
        }
    }
    if it.next().is_some() {
        return Err(format!("more than {} pixel values", width * height));
    }
    OccupancyGrid::new(geometry, cells).map_err(|e| e.to_string())
}

pub fn load_occupancy(
    path: impl AsRef<Path>,
    origin: Point2,
    resolution: f64,
) -> Result<OccupancyGrid, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| IoError::parse(path, format!("cannot read grid file: {e}")))?;
    parse_pgm(&text, origin, resolution).map_err(|m| IoError::parse(path, m))
}

/// Writes P2 with maxval 1 (unknown cells are not representable and are
/// written as occupied).
pub fn write_pgm(grid: &OccupancyGrid, mut w: impl Write) -> std::io::Result<()> {
    let g = grid.geometry;
    writeln!(w, "P2")?;
    writeln!(w, "{} {}", g.width, g.height)?;
    writeln!(w, "1")?;
    let mut line = String::with_capacity(2 * g.width);
    for row in 0..g.height {
        let iy = g.height - 1 - row;
        line.clear();
        for ix in 0..g.width {
            if ix > 0 {
                line.push(' ');
            }
            line.push(if grid.get(ix, iy) == Occupancy::Free { '1' } else { '0' });
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}
