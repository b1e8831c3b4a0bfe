//! Binary serialization and raster export of grid sets.
//!
//! The `GSET` format is: magic `GSET`, one byte dimension, one byte level, then the
//! occupancy bitmask as little-endian 64-bit words in row-major cell order.
//! Raster exports put the row of largest `y` at the top of the image.

use std::io::{Read, Write};

use super::{GeometryError, GridSet};

const MAGIC: &[u8; 4] = b"GSET";

pub fn write_gset<W: Write>(set: &GridSet, mut out: W) -> Result<(), GeometryError> {
    out.write_all(MAGIC)?;
    out.write_all(&[set.dim, set.level])?;
    for w in &set.bits {
        out.write_all(&w.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_gset<R: Read>(mut input: R) -> Result<GridSet, GeometryError> {
    let mut head = [0u8; 6];
    input.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(GeometryError::Format("missing GSET magic".into()));
    }
    let mut set = GridSet::empty(head[4], head[5])?;
    let mut buf = [0u8; 8];
    for w in set.bits.iter_mut() {
        input.read_exact(&mut buf)?;
        *w = u64::from_le_bytes(buf);
    }
    let cells = set.side() * set.rows();
    if cells % 64 != 0 {
        let last = set.bits.len() - 1;
        if set.bits[last] >> (cells % 64) != 0 {
            return Err(GeometryError::Format("bits set beyond the last cell".into()));
        }
    }
    Ok(set)
}

/// Binary PBM (P4) of a planar set; occupied cells are black.
pub fn to_pbm(set: &GridSet) -> Result<Vec<u8>, GeometryError> {
    if set.dim != 2 {
        return Err(GeometryError::InvalidDimension(set.dim));
    }
    let side = set.side();
    let mut out = format!("P4\n{side} {side}\n").into_bytes();
    let stride = side.div_ceil(8);
    for y in (0..side).rev() {
        let mut row = vec![0u8; stride];
        for x in 0..side {
            if set.contains_cell(x, y) {
                row[x / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend(row);
    }
    Ok(out)
}

/// Binary PGM (P5). Planar sets map one cell to one pixel (occupied = 0, free = 255).
/// Line sets become a bar strip of `strip_height` rows, at most `max_width` pixels wide,
/// each pixel shaded by the occupied fraction of the cells it spans.
pub fn to_pgm(set: &GridSet, max_width: usize, strip_height: usize) -> Vec<u8> {
    if set.dim == 2 {
        let side = set.side();
        let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
        for y in (0..side).rev() {
            for x in 0..side {
                out.push(if set.contains_cell(x, y) { 0 } else { 255 });
            }
        }
        return out;
    }
    let side = set.side();
    let width = side.min(max_width.max(1));
    let per = side / width;
    let row: Vec<u8> = (0..width)
        .map(|p| {
            let filled = (p * per..(p + 1) * per).filter(|&x| set.contains_cell(x, 0)).count();
            (255.0 * (1.0 - filled as f64 / per as f64)).round() as u8
        })
        .collect();
    let height = strip_height.max(1);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    for _ in 0..height {
        out.extend(&row);
    }
    out
}

/// Binary PPM (P6) of planar layers drawn in order over a white background.
pub fn to_ppm(layers: &[(&GridSet, [u8; 3])]) -> Result<Vec<u8>, GeometryError> {
    let Some((first, _)) = layers.first() else {
        return Err(GeometryError::EmptySet);
    };
    if first.dim != 2 {
        return Err(GeometryError::InvalidDimension(first.dim));
    }
    for (g, _) in layers {
        first.compatible(g)?;
    }
    let side = first.side();
    let mut out = format!("P6\n{side} {side}\n255\n").into_bytes();
    for y in (0..side).rev() {
        for x in 0..side {
            let mut rgb = [255u8; 3];
            for (g, color) in layers {
                if g.contains_cell(x, y) {
                    rgb = *color;
                }
            }
            out.extend(rgb);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gset_roundtrip() {
        let g = GridSet::from_box(2, 5, [0.1, 0.2], [0.7, 0.4]).unwrap();
        let mut buf = Vec::new();
        write_gset(&g, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"GSET");
        assert_eq!(buf.len(), 6 + 8 * (1024 / 64));
        assert_eq!(read_gset(buf.as_slice()).unwrap(), g);
        let h = GridSet::from_box(1, 3, [0.0, 0.0], [0.4, 0.0]).unwrap();
        let mut buf = Vec::new();
        write_gset(&h, &mut buf).unwrap();
        assert_eq!(read_gset(buf.as_slice()).unwrap(), h);
    }

    #[test]
    fn gset_rejects_garbage() {
        assert!(read_gset(&b"NOPE\x02\x04"[..]).is_err());
        let mut buf = Vec::new();
        write_gset(&GridSet::empty(1, 3).unwrap(), &mut buf).unwrap();
        buf[6] = 0xff;
        buf[7] = 0xff;
        assert!(read_gset(buf.as_slice()).is_err());
    }

    #[test]
    fn raster_headers_and_orientation() {
        let mut g = GridSet::empty(2, 3).unwrap();
        g.insert_cell(0, 7);
        let pbm = to_pbm(&g).unwrap();
        assert!(pbm.starts_with(b"P4\n8 8\n"));
        assert_eq!(pbm[7], 0x80);
        let pgm = to_pgm(&g, 1024, 8);
        assert!(pgm.starts_with(b"P5\n8 8\n255\n"));
        let ppm = to_ppm(&[(&g, [255, 0, 0])]).unwrap();
        assert_eq!(&ppm[11..14], &[255, 0, 0]);
        let line = GridSet::from_box(1, 12, [0.0, 0.0], [0.5, 0.0]).unwrap();
        let strip = to_pgm(&line, 1024, 4);
        assert!(strip.starts_with(b"P5\n1024 4\n255\n"));
    }
}
