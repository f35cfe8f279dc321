use crate::error::{Error, Result};
use crate::setgen::SparseGrid;

/// Cap on padded field size (elements), ~640 MB of f64.
const MAX_FIELD_CELLS: u128 = 80_000_000;

/// Exact per-cell Euclidean distance to the nearest occupied cell center,
/// in units of the [0,1] side length.
///
/// The field is computed on a grid padded by ⌈R/4⌉+2 cells per side so that
/// distances remain evaluable for query points up to 1/4 outside the unit
/// cube (hole centers near the boundary land there). The public per-cell
/// contract covers the core grid; padded values are an implementation
/// detail used by [`DistanceField::eval_lower`].
#[derive(Clone, Debug)]
pub struct DistanceField {
    dim: usize,
    cells_per_axis: u64,
    pad: u64,
    ext: u64,
    /// squared center-to-center distances in cell units; integer-valued f64
    sq: Vec<f64>,
}

impl DistanceField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> u64 {
        self.cells_per_axis
    }

    pub fn pad(&self) -> u64 {
        self.pad
    }

    fn index_of(&self, padded: &[u64]) -> usize {
        let mut idx = 0usize;
        for &c in padded {
            idx = idx * self.ext as usize + c as usize;
        }
        idx
    }

    /// Distance at a core grid cell; zero exactly on occupied cells.
    pub fn value_at(&self, cell: &[u64]) -> Result<f64> {
        if cell.len() != self.dim || cell.iter().any(|&c| c >= self.cells_per_axis) {
            return Err(Error::input("distance field: cell out of bounds"));
        }
        let padded: Vec<u64> = cell.iter().map(|&c| c + self.pad).collect();
        let sq = self.sq[self.index_of(&padded)];
        Ok(sq.sqrt() / self.cells_per_axis as f64)
    }

    /// Certified lower bound on the distance from an arbitrary point to the
    /// set of occupied cell centers: D(cell containing z) − |z − cell center|,
    /// clamped at 0. Points beyond the padded domain clamp to the nearest
    /// padded cell, which keeps the bound valid (just more conservative).
    pub fn eval_lower(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim);
        let r = self.cells_per_axis as f64;
        let mut off_sq = 0.0f64;
        let mut idx = 0usize;
        for &p in point {
            let raw = (p * r).floor() + self.pad as f64;
            let c = raw.clamp(0.0, (self.ext - 1) as f64);
            let center = (c - self.pad as f64 + 0.5) / r;
            let d = p - center;
            off_sq += d * d;
            idx = idx * self.ext as usize + c as usize;
        }
        let d = self.sq[idx].sqrt() / r;
        (d - off_sq.sqrt()).max(0.0)
    }
}

/// Exact Euclidean distance transform with the default boundary padding.
pub fn distance_transform(grid: &SparseGrid) -> Result<DistanceField> {
    let pad = grid.cells_per_axis().div_ceil(4) + 2;
    distance_transform_padded(grid, pad)
}

/// Exact Euclidean distance transform via the separable lower-envelope
/// (parabola) method on squared integer cell distances. Not a chamfer
/// approximation: the result equals the brute-force all-pairs minimum
/// bitwise (both reduce to sqrt(integer)/R).
pub fn distance_transform_padded(grid: &SparseGrid, pad: u64) -> Result<DistanceField> {
    if grid.is_empty() {
        return Err(Error::input("distance transform of an empty set is undefined"));
    }
    let n = grid.dim();
    let r = grid.cells_per_axis();
    let ext = r + 2 * pad;
    let total = (ext as u128).pow(n as u32);
    if total > MAX_FIELD_CELLS {
        return Err(Error::resource(format!(
            "distance field would hold {total} cells (cap {MAX_FIELD_CELLS}); lower R or the padding"
        )));
    }
    let total = total as usize;
    let mut sq = vec![f64::INFINITY; total];
    for cell in grid.iter_cells() {
        let mut idx = 0usize;
        for &c in cell {
            idx = idx * ext as usize + (c + pad) as usize;
        }
        sq[idx] = 0.0;
    }

    let ext = ext as usize;
    // Per-axis 1D transforms; axis `a` has stride ext^(n-1-a).
    let mut f = vec![0.0f64; ext];
    let mut out = vec![0.0f64; ext];
    let mut v = vec![0usize; ext];
    let mut z = vec![0.0f64; ext + 1];
    for axis in 0..n {
        let stride = ext.pow((n - 1 - axis) as u32);
        let block = stride * ext;
        let lines = total / ext;
        for line in 0..lines {
            let base = (line / stride) * block + (line % stride);
            for (i, fi) in f.iter_mut().enumerate() {
                *fi = sq[base + i * stride];
            }
            dt_1d(&f, &mut out, &mut v, &mut z);
            for (i, &oi) in out.iter().enumerate() {
                sq[base + i * stride] = oi;
            }
        }
    }

    Ok(DistanceField {
        dim: n,
        cells_per_axis: r,
        pad,
        ext: ext as u64,
        sq,
    })
}

/// 1D squared-distance transform: out[p] = min_q ((p−q)² + f[q]).
///
/// All finite values are integers below 2^40, so the parabola evaluations are
/// exact in f64; envelope boundary rounding can only reassign exact ties.
fn dt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        if f[q].is_infinite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = if f[p].is_infinite() {
                f64::NEG_INFINITY
            } else {
                ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * q - 2 * p) as f64
            };
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_force(grid: &SparseGrid, cell: &[u64]) -> f64 {
        let mut best = u64::MAX;
        for occ in grid.iter_cells() {
            let sq: u64 = occ
                .iter()
                .zip(cell)
                .map(|(&a, &b)| {
                    let d = a.abs_diff(b);
                    d * d
                })
                .sum();
            best = best.min(sq);
        }
        (best as f64).sqrt() / grid.cells_per_axis() as f64
    }

    #[test]
    fn simple_1d_line() {
        let g = SparseGrid::from_cells(1, 4, vec![0], "t").unwrap();
        let d = distance_transform(&g).unwrap();
        for (c, want) in [(0u64, 0.0), (1, 0.25), (2, 0.5), (3, 0.75)] {
            assert_eq!(d.value_at(&[c]).unwrap(), want);
        }
    }

    #[test]
    fn corner_2d() {
        let g = SparseGrid::from_cells(2, 4, vec![0, 0], "t").unwrap();
        let d = distance_transform(&g).unwrap();
        let got = d.value_at(&[3, 3]).unwrap();
        assert_eq!(got, (18.0f64).sqrt() / 4.0);
        assert!((got - 1.0606601717798212).abs() < 1e-15);
    }

    #[test]
    fn occupied_cells_are_zero() {
        let g = SparseGrid::from_cells(2, 8, vec![1, 2, 5, 7], "t").unwrap();
        let d = distance_transform(&g).unwrap();
        assert_eq!(d.value_at(&[1, 2]).unwrap(), 0.0);
        assert_eq!(d.value_at(&[5, 7]).unwrap(), 0.0);
        assert!(d.value_at(&[0, 0]).unwrap() > 0.0);
    }

    #[test]
    fn empty_set_errors() {
        let g = SparseGrid::from_cells(2, 8, vec![], "t").unwrap();
        assert!(distance_transform(&g).is_err());
    }

    #[test]
    fn matches_brute_force_bitwise_2d_and_3d() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..12 {
            let (n, r) = if trial % 2 == 0 { (2usize, 32u64) } else { (3usize, 16u64) };
            let count = rng.gen_range(1..60);
            let mut cells = Vec::new();
            for _ in 0..count {
                for _ in 0..n {
                    cells.push(rng.gen_range(0..r));
                }
            }
            let g = SparseGrid::from_cells(n, r, cells, "rand").unwrap();
            let d = distance_transform(&g).unwrap();
            let mut cell = vec![0u64; n];
            loop {
                let got = d.value_at(&cell).unwrap();
                let want = brute_force(&g, &cell);
                assert!(
                    got.to_bits() == want.to_bits(),
                    "mismatch at {cell:?}: {got} vs {want}"
                );
                let mut axis = n;
                while axis > 0 {
                    axis -= 1;
                    cell[axis] += 1;
                    if cell[axis] < r {
                        break;
                    }
                    cell[axis] = 0;
                    if axis == 0 {
                        axis = usize::MAX;
                        break;
                    }
                }
                if axis == usize::MAX {
                    break;
                }
            }
        }
    }

    #[test]
    fn eval_lower_is_a_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = SparseGrid::from_cells(2, 16, vec![3, 4, 9, 2, 12, 13], "t").unwrap();
        let d = distance_transform(&g).unwrap();
        for _ in 0..2000 {
            let p = [rng.gen_range(-0.25..1.25), rng.gen_range(-0.25..1.25)];
            let exact = g
                .iter_cells()
                .map(|c| {
                    let ctr = g.cell_center(c);
                    ((p[0] - ctr[0]).powi(2) + (p[1] - ctr[1]).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            let lower = d.eval_lower(&p);
            assert!(
                lower <= exact + 1e-12,
                "eval_lower {lower} exceeds exact {exact} at {p:?}"
            );
            // and it is reasonably tight inside the padded domain
            assert!(lower >= exact - g.half_diagonal() * 2.0 - 1e-12);
        }
    }
}
