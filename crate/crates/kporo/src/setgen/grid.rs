use crate::error::{Error, Result};

/// Hard cap on stored cells; keeps products and dense grids from exhausting
/// memory before the CLI-level guards can report a friendlier error.
pub(crate) const MAX_CELLS: u64 = 200_000_000;

/// Sparse occupancy representation of a compact set A ⊂ [0,1]^n.
///
/// Cell `c` represents the closed cube Π_i [c_i/R, (c_i+1)/R]. Indices are
/// unique, lexicographically sorted and within bounds; storage is a flat
/// row-major `Vec<u64>` so fractal-sparse 3D grids at R=1024 stay compact.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseGrid {
    dim: usize,
    cells_per_axis: u64,
    cells: Vec<u64>,
    metadata: String,
}

impl SparseGrid {
    /// Builds a grid from raw cell rows, sorting and deduplicating.
    pub fn from_cells(
        dim: usize,
        cells_per_axis: u64,
        mut cells: Vec<u64>,
        metadata: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 || dim > crate::geometry::MAX_DIM {
            return Err(Error::input(format!("grid dimension {dim} out of range 1..=8")));
        }
        if cells_per_axis == 0 {
            return Err(Error::input("cells_per_axis must be positive"));
        }
        if cells.len() % dim != 0 {
            return Err(Error::input("flat cell buffer length is not a multiple of dim"));
        }
        if cells.iter().any(|&c| c >= cells_per_axis) {
            return Err(Error::input("cell index out of bounds"));
        }
        if (cells.len() / dim) as u64 > MAX_CELLS {
            return Err(Error::resource(format!(
                "grid would hold {} cells (cap {MAX_CELLS})",
                cells.len() / dim
            )));
        }
        sort_rows(&mut cells, dim);
        dedup_rows(&mut cells, dim);
        Ok(SparseGrid {
            dim,
            cells_per_axis,
            cells,
            metadata: metadata.into(),
        })
    }

    /// Internal constructor for rows already sorted, unique and in bounds.
    pub(crate) fn from_sorted_unchecked(
        dim: usize,
        cells_per_axis: u64,
        cells: Vec<u64>,
        metadata: String,
    ) -> Self {
        debug_assert!(rows_sorted_unique(&cells, dim));
        SparseGrid {
            dim,
            cells_per_axis,
            cells,
            metadata,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> u64 {
        self.cells_per_axis
    }

    pub fn len(&self) -> usize {
        self.cells.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn metadata(&self) -> &str {
        &self.metadata
    }

    pub fn flat_cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn cell(&self, row: usize) -> &[u64] {
        &self.cells[row * self.dim..(row + 1) * self.dim]
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = &[u64]> {
        self.cells.chunks_exact(self.dim)
    }

    pub fn contains_cell(&self, cell: &[u64]) -> bool {
        if cell.len() != self.dim {
            return false;
        }
        let n = self.len();
        let mut lo = 0usize;
        let mut hi = n;
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.cell(mid).cmp(cell) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Center of a cell in [0,1]^n coordinates.
    pub fn cell_center(&self, cell: &[u64]) -> Vec<f64> {
        cell.iter()
            .map(|&c| (c as f64 + 0.5) / self.cells_per_axis as f64)
            .collect()
    }

    /// The cell containing a point of [0,1]^n (upper faces clamp inward).
    pub fn cell_of_point(&self, point: &[f64]) -> Option<Vec<u64>> {
        if point.len() != self.dim {
            return None;
        }
        let r = self.cells_per_axis;
        let mut out = Vec::with_capacity(self.dim);
        for &p in point {
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return None;
            }
            let c = (p * r as f64).floor().clamp(0.0, (r - 1) as f64) as u64;
            out.push(c);
        }
        Some(out)
    }

    /// Half of the cell diagonal, √n/(2R).
    pub fn half_diagonal(&self) -> f64 {
        (self.dim as f64).sqrt() / (2.0 * self.cells_per_axis as f64)
    }

    pub fn with_metadata(mut self, metadata: impl Into<String>) -> Self {
        self.metadata = metadata.into();
        self
    }
}

pub(crate) fn sort_rows(flat: &mut Vec<u64>, dim: usize) {
    let count = flat.len() / dim;
    if count < 2 {
        return;
    }
    let mut order: Vec<u32> = (0..count as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        let ra = &flat[a as usize * dim..a as usize * dim + dim];
        let rb = &flat[b as usize * dim..b as usize * dim + dim];
        ra.cmp(rb)
    });
    let mut out = Vec::with_capacity(flat.len());
    for &i in &order {
        out.extend_from_slice(&flat[i as usize * dim..i as usize * dim + dim]);
    }
    *flat = out;
}

pub(crate) fn dedup_rows(flat: &mut Vec<u64>, dim: usize) {
    let count = flat.len() / dim;
    if count < 2 {
        return;
    }
    let mut write = 1usize;
    for read in 1..count {
        let (head, tail) = flat.split_at_mut(read * dim);
        let prev = &head[(write - 1) * dim..write * dim];
        let cur = &tail[..dim];
        if prev != cur {
            if write != read {
                let row: Vec<u64> = cur.to_vec();
                flat[write * dim..(write + 1) * dim].copy_from_slice(&row);
            }
            write += 1;
        }
    }
    flat.truncate(write * dim);
}

pub(crate) fn rows_sorted_unique(flat: &[u64], dim: usize) -> bool {
    flat.chunks_exact(dim)
        .zip(flat.chunks_exact(dim).skip(1))
        .all(|(a, b)| a < b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_cells_sorts_and_dedups() {
        let g = SparseGrid::from_cells(2, 4, vec![3, 1, 0, 2, 3, 1, 0, 0], "t").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.flat_cells(), &[0, 0, 0, 2, 3, 1]);
        assert!(g.contains_cell(&[3, 1]));
        assert!(!g.contains_cell(&[1, 1]));
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(SparseGrid::from_cells(2, 4, vec![4, 0], "t").is_err());
        assert!(SparseGrid::from_cells(0, 4, vec![], "t").is_err());
        assert!(SparseGrid::from_cells(2, 4, vec![1], "t").is_err());
    }

    #[test]
    fn cell_point_round_trip() {
        let g = SparseGrid::from_cells(2, 8, vec![3, 4], "t").unwrap();
        let center = g.cell_center(&[3, 4]);
        assert_eq!(center, vec![3.5 / 8.0, 4.5 / 8.0]);
        assert_eq!(g.cell_of_point(&center).unwrap(), vec![3, 4]);
        assert_eq!(g.cell_of_point(&[1.0, 1.0]).unwrap(), vec![7, 7]);
        assert!(g.cell_of_point(&[1.5, 0.0]).is_none());
    }
}
