//! The `.kpgrid` binary format.
//!
//! Layout (all integers little-endian): magic "KPGR", version u16 = 1,
//! n u16, R u64, count u64, then count×n cell indices as u64 in strict
//! lexicographic order, then a u32 length-prefixed UTF-8 metadata string.
//! Readers reject unsorted, duplicate or out-of-bounds input.

use crate::error::{Error, Result};
use crate::setgen::grid::rows_sorted_unique;
use crate::setgen::SparseGrid;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"KPGR";
const VERSION: u16 = 1;

pub fn write_kpgrid<W: Write>(mut w: W, grid: &SparseGrid) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u16).to_le_bytes())?;
    w.write_all(&grid.cells_per_axis().to_le_bytes())?;
    w.write_all(&(grid.len() as u64).to_le_bytes())?;
    for &c in grid.flat_cells() {
        w.write_all(&c.to_le_bytes())?;
    }
    let meta = grid.metadata().as_bytes();
    if meta.len() > u32::MAX as usize {
        return Err(Error::format("metadata longer than u32::MAX"));
    }
    w.write_all(&(meta.len() as u32).to_le_bytes())?;
    w.write_all(meta)?;
    Ok(())
}

pub fn write_kpgrid_file(path: impl AsRef<Path>, grid: &SparseGrid) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    write_kpgrid(&mut w, grid)?;
    w.flush()?;
    Ok(())
}

pub fn read_kpgrid<R: Read>(mut r: R) -> Result<SparseGrid> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::format("bad magic; not a .kpgrid file"));
    }
    let version = read_u16(&mut r)?;
    if version != VERSION {
        return Err(Error::format(format!("unsupported version {version}")));
    }
    let n = read_u16(&mut r)? as usize;
    if n == 0 || n > crate::geometry::MAX_DIM {
        return Err(Error::format(format!("dimension {n} out of range 1..=8")));
    }
    let cells_per_axis = read_u64(&mut r)?;
    if cells_per_axis == 0 {
        return Err(Error::format("cells_per_axis must be positive"));
    }
    let count = read_u64(&mut r)?;
    let words = count
        .checked_mul(n as u64)
        .ok_or_else(|| Error::format("cell count overflows"))?;
    if count > super::grid::MAX_CELLS {
        return Err(Error::resource(format!("file holds {count} cells (cap exceeded)")));
    }
    let mut flat = vec![0u64; words as usize];
    let mut buf = [0u8; 8];
    for c in flat.iter_mut() {
        r.read_exact(&mut buf)?;
        *c = u64::from_le_bytes(buf);
        if *c >= cells_per_axis {
            return Err(Error::format("cell index out of bounds"));
        }
    }
    if !rows_sorted_unique(&flat, n) {
        return Err(Error::format("cell indices are not strictly lex-sorted"));
    }
    let meta_len = read_u32(&mut r)? as usize;
    let mut meta = vec![0u8; meta_len];
    r.read_exact(&mut meta)?;
    let metadata =
        String::from_utf8(meta).map_err(|_| Error::format("metadata is not valid UTF-8"))?;
    Ok(SparseGrid::from_sorted_unchecked(n, cells_per_axis, flat, metadata))
}

pub fn read_kpgrid_file(path: impl AsRef<Path>) -> Result<SparseGrid> {
    let file = std::fs::File::open(&path)?;
    read_kpgrid(BufReader::new(file))
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setgen::{gen_cantor, CantorSpec};

    #[test]
    fn round_trip() {
        let g = gen_cantor(&CantorSpec::new(1.0 / 3.0, 3).unwrap(), 27).unwrap();
        let mut buf = Vec::new();
        write_kpgrid(&mut buf, &g).unwrap();
        let back = read_kpgrid(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_unsorted_and_out_of_bounds() {
        let g = SparseGrid::from_cells(2, 4, vec![0, 1, 2, 3], "m").unwrap();
        let mut buf = Vec::new();
        write_kpgrid(&mut buf, &g).unwrap();

        // swap the two rows in place: bytes of rows start after 4+2+2+8+8 = 24
        let mut bad = buf.clone();
        for i in 0..16 {
            bad.swap(24 + i, 24 + 16 + i);
        }
        assert!(read_kpgrid(bad.as_slice()).is_err());

        // out-of-bounds index
        let mut oob = buf.clone();
        oob[24] = 9;
        assert!(read_kpgrid(oob.as_slice()).is_err());

        // bad magic
        let mut nm = buf.clone();
        nm[0] = b'X';
        assert!(read_kpgrid(nm.as_slice()).is_err());
    }
}
