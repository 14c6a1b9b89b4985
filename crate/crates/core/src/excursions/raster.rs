//! Plain-text label rasters.
//!
//! ```text
//! P2
//! # cluster labels: 0 = none, k = k-th cluster in canonical order
//! width height
//! maxlabel
//! <height rows of width labels, top row first>
//! ```
//! The grid covers the bounding box of the interior vertices; cells outside
//! the domain hold 0.

use std::io::{self, BufRead, Write};

use super::Decomposition;
use crate::lattice::Site;

pub fn write_raster<W: Write>(dec: &Decomposition, mut out: W) -> io::Result<()> {
    let domain = dec.domain();
    let sites = domain.interior_vertices();
    let (mut i0, mut j0, mut i1, mut j1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
    for s in sites {
        i0 = i0.min(s.i);
        i1 = i1.max(s.i);
        j0 = j0.min(s.j);
        j1 = j1.max(s.j);
    }
    let width = (i1 - i0 + 1) as usize;
    let height = (j1 - j0 + 1) as usize;
    writeln!(out, "P2")?;
    writeln!(out, "# cluster labels: 0 = none, k = k-th cluster in canonical order")?;
    writeln!(out, "{width} {height}")?;
    writeln!(out, "{}", dec.len())?;
    let mut line = String::new();
    for j in (j0..=j1).rev() {
        line.clear();
        for i in i0..=i1 {
            let label = domain.index_of(Site::new(i, j)).and_then(|v| dec.label(v)).map_or(0, |k| k + 1);
            if i > i0 {
                line.push(' ');
            }
            line.push_str(&label.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parse a raster written by [`write_raster`]: `(width, height, maxlabel,
/// rows top first)`.
pub fn read_raster<R: BufRead>(input: R) -> io::Result<(usize, usize, usize, Vec<Vec<usize>>)> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut tokens = Vec::new();
    for line in input.lines() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        tokens.extend(content.split_whitespace().map(str::to_owned));
    }
    let mut it = tokens.into_iter();
    if it.next().as_deref() != Some("P2") {
        return Err(bad("missing P2 magic"));
    }
    let mut num = || -> io::Result<usize> {
        it.next().ok_or_else(|| bad("truncated raster"))?.parse().map_err(|_| bad("not an integer"))
    };
    let (w, h, max) = (num()?, num()?, num()?);
    let mut rows = Vec::with_capacity(h);
    for _ in 0..h {
        let row = (0..w).map(|_| num()).collect::<io::Result<Vec<_>>>()?;
        if row.iter().any(|&x| x > max) {
            return Err(bad("label above maxlabel"));
        }
        rows.push(row);
    }
    Ok((w, h, max, rows))
}
