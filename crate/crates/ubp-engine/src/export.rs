//! Snapshot formats.
//!
//! PBM: binary `P4`. Header is the ASCII text `P4\n<width> <height>\n`. Then
//! `height` rows follow, top row first. The top row is grid row `height-1`,
//! so larger y appears higher in the image. Each row packs its columns
//! left to right into bytes, most significant bit first, and the last byte
//! is zero-padded. A set bit means infected. Grid column/row `(0,0)` is
//! lattice point `(0,0)` on a torus and `-origin` on a rectangle.
//!
//! RLE JSON: the object
//! `{"width":W,"height":H,"origin":[ox,oy],"rows":[[[start,len],...],...]}`
//! serialised by serde_json with no whitespace. `rows[r]` lists the maximal
//! runs of infected columns in grid row `r`, bottom row first, ordered by
//! `start`. `origin` is the grid cell of lattice point `(0,0)` and is `[0,0]`
//! on a torus.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Boundary, Lattice, Mode};

pub fn to_pbm(lat: &Lattice) -> Vec<u8> {
    let (w, h) = (lat.width(), lat.height());
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let bytes_per_row = w.div_ceil(8);
    for row in (0..h).rev() {
        let mut buf = vec![0u8; bytes_per_row];
        for col in 0..w {
            if lat.get_cell(col, row) {
                buf[col / 8] |= 0x80 >> (col % 8);
            }
        }
        out.extend_from_slice(&buf);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleSnapshot {
    pub width: usize,
    pub height: usize,
    pub origin: [i64; 2],
    pub rows: Vec<Vec<[usize; 2]>>,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("malformed snapshot JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("run {start}+{len} in row {row} leaves the {width}-column grid")]
    RunOutOfBounds {
        row: usize,
        start: usize,
        len: usize,
        width: usize,
    },
    #[error("snapshot has {rows} rows but declares height {height}")]
    RowCount { rows: usize, height: usize },
}

pub fn to_rle(lat: &Lattice) -> RleSnapshot {
    let origin = match lat.mode() {
        Mode::Torus(_) => [0, 0],
        Mode::Rect { origin, .. } => [origin.0, origin.1],
    };
    let rows = (0..lat.height())
        .map(|row| {
            let mut runs = Vec::new();
            let mut col = 0;
            while col < lat.width() {
                if lat.get_cell(col, row) {
                    let start = col;
                    while col < lat.width() && lat.get_cell(col, row) {
                        col += 1;
                    }
                    runs.push([start, col - start]);
                } else {
                    col += 1;
                }
            }
            runs
        })
        .collect();
    RleSnapshot {
        width: lat.width(),
        height: lat.height(),
        origin,
        rows,
    }
}

pub fn to_rle_json(lat: &Lattice) -> String {
    serde_json::to_string(&to_rle(lat)).expect("snapshot serialises")
}

/// Rebuilds a lattice. A square snapshot with origin `[0,0]` becomes a torus,
/// anything else a hard-empty rectangle.
pub fn from_rle_json(text: &str) -> Result<Lattice, SnapshotError> {
    let snap: RleSnapshot = serde_json::from_str(text)?;
    if snap.rows.len() != snap.height {
        return Err(SnapshotError::RowCount {
            rows: snap.rows.len(),
            height: snap.height,
        });
    }
    let mut lat = if snap.width == snap.height && snap.origin == [0, 0] {
        Lattice::torus(snap.width)
    } else {
        Lattice::rect_with_origin(
            snap.width,
            snap.height,
            Boundary::HardEmpty,
            (snap.origin[0], snap.origin[1]),
        )
    };
    for (row, runs) in snap.rows.iter().enumerate() {
        for &[start, len] in runs {
            if start + len > snap.width {
                return Err(SnapshotError::RunOutOfBounds {
                    row,
                    start,
                    len,
                    width: snap.width,
                });
            }
            for col in start..start + len {
                lat.set_cell(col, row, true);
            }
        }
    }
    Ok(lat)
}
