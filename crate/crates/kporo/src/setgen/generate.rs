use crate::error::{Error, Result};
use crate::setgen::distance::distance_transform;
use crate::setgen::grid::MAX_CELLS;
use crate::setgen::SparseGrid;
use std::collections::BTreeSet;

/// Overlaps shorter than this many cell widths count as boundary touching
/// and do not occupy a cell. This absorbs float snapping noise (e.g. a
/// nominal λ=0.333333 producing 1-cell-minus-5e-5 intervals) while keeping
/// every interval covered by its occupied cells.
const OVERLAP_TOL_CELLS: f64 = 1e-3;

const MAX_INTERVALS: usize = 1 << 24;

/// λ-Cantor prefractal parameters: at depth d the set is 2^d intervals of
/// length λ^d, the attractor iterates of t ↦ λt and t ↦ λt + (1−λ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CantorSpec {
    pub lambda: f64,
    pub depth: u32,
}

impl CantorSpec {
    pub fn new(lambda: f64, depth: u32) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 0.5) {
            return Err(Error::input(format!("cantor lambda {lambda} outside (0, 1/2)")));
        }
        if depth == 0 {
            return Err(Error::input("cantor depth must be ≥ 1"));
        }
        Ok(CantorSpec { lambda, depth })
    }
}

/// One similarity map x ↦ scale·x + offset of the unit cube into itself.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsMap {
    pub scale: f64,
    pub offset: Vec<f64>,
}

/// Rasterizes the depth-d λ-Cantor prefractal onto a 1D grid.
///
/// A cell is occupied iff its overlap with some depth-d interval has length
/// above the boundary-touch tolerance; the union of occupied closed cells
/// still covers the prefractal, so box counts upper-bound the true counts.
pub fn gen_cantor(spec: &CantorSpec, cells_per_axis: u64) -> Result<SparseGrid> {
    CantorSpec::new(spec.lambda, spec.depth)?;
    if spec.depth as u64 >= 24 {
        return Err(Error::resource("cantor depth ≥ 24 would enumerate 2^24 intervals"));
    }
    let maps = [
        IfsMap { scale: spec.lambda, offset: vec![0.0] },
        IfsMap { scale: spec.lambda, offset: vec![1.0 - spec.lambda] },
    ];
    let grid = gen_ifs(&maps, 1, spec.depth, cells_per_axis)?;
    Ok(grid.with_metadata(format!(
        "cantor(lambda={},depth={},R={})",
        spec.lambda, spec.depth, cells_per_axis
    )))
}

/// Cartesian product of grids sharing the same resolution.
pub fn gen_product(factors: &[&SparseGrid]) -> Result<SparseGrid> {
    if factors.is_empty() {
        return Err(Error::input("product of zero factors"));
    }
    let r = factors[0].cells_per_axis();
    if factors.iter().any(|f| f.cells_per_axis() != r) {
        return Err(Error::input("product factors must share cells_per_axis"));
    }
    let dim: usize = factors.iter().map(|f| f.dim()).sum();
    if dim > crate::geometry::MAX_DIM {
        return Err(Error::input(format!("product dimension {dim} exceeds 8")));
    }
    let mut count: u64 = 1;
    for f in factors {
        count = count
            .checked_mul(f.len() as u64)
            .ok_or_else(|| Error::resource("product cell count overflows"))?;
    }
    if count > MAX_CELLS {
        return Err(Error::resource(format!(
            "product would hold {count} cells (cap {MAX_CELLS})"
        )));
    }
    let mut flat: Vec<u64> = Vec::with_capacity((count as usize) * dim);
    let mut row = vec![0u64; dim];
    fill_product(factors, 0, 0, &mut row, &mut flat);
    let meta = format!(
        "product({})",
        factors.iter().map(|f| f.metadata()).collect::<Vec<_>>().join(" x ")
    );
    // factor-major iteration over sorted factors emits rows in lex order
    Ok(SparseGrid::from_sorted_unchecked(dim, r, flat, meta))
}

fn fill_product(factors: &[&SparseGrid], fi: usize, offset: usize, row: &mut [u64], out: &mut Vec<u64>) {
    if fi == factors.len() {
        out.extend_from_slice(row);
        return;
    }
    let f = factors[fi];
    for cell in f.iter_cells() {
        row[offset..offset + f.dim()].copy_from_slice(cell);
        fill_product(factors, fi + 1, offset + f.dim(), row, out);
    }
}

/// Cells meeting the m-plane {x : x_{m+1} = … = x_n = 1/2}.
///
/// The plane sits on a cell boundary when R is even, so both adjacent layers
/// are occupied there; odd R gives a single layer. m = n gives the full grid.
pub fn gen_kplane(n: usize, m: usize, cells_per_axis: u64) -> Result<SparseGrid> {
    if n == 0 || n > crate::geometry::MAX_DIM {
        return Err(Error::input(format!("kplane dimension {n} out of range 1..=8")));
    }
    if m > n {
        return Err(Error::input(format!("kplane m={m} exceeds n={n}")));
    }
    let r = cells_per_axis;
    if r == 0 {
        return Err(Error::input("cells_per_axis must be positive"));
    }
    let layers: Vec<u64> = if r % 2 == 0 {
        vec![r / 2 - 1, r / 2]
    } else {
        vec![(r - 1) / 2]
    };
    let mut count: u64 = 1;
    for axis in 0..n {
        let options = if axis < m { r } else { layers.len() as u64 };
        count = count
            .checked_mul(options)
            .ok_or_else(|| Error::resource("kplane cell count overflows"))?;
    }
    if count > MAX_CELLS {
        return Err(Error::resource(format!(
            "kplane would hold {count} cells (cap {MAX_CELLS})"
        )));
    }
    let mut flat = Vec::with_capacity(count as usize * n);
    let mut row = vec![0u64; n];
    fill_kplane(n, m, r, &layers, 0, &mut row, &mut flat);
    Ok(SparseGrid::from_sorted_unchecked(
        n,
        r,
        flat,
        format!("kplane(n={n},m={m},R={r})"),
    ))
}

fn fill_kplane(n: usize, m: usize, r: u64, layers: &[u64], axis: usize, row: &mut [u64], out: &mut Vec<u64>) {
    if axis == n {
        out.extend_from_slice(row);
        return;
    }
    if axis < m {
        for c in 0..r {
            row[axis] = c;
            fill_kplane(n, m, r, layers, axis + 1, row, out);
        }
    } else {
        for &c in layers {
            row[axis] = c;
            fill_kplane(n, m, r, layers, axis + 1, row, out);
        }
    }
}

/// Rasterizes the depth-d image union of the unit cube under all depth-d
/// compositions of axis-aligned similarity maps.
pub fn gen_ifs(maps: &[IfsMap], n: usize, depth: u32, cells_per_axis: u64) -> Result<SparseGrid> {
    if n == 0 || n > crate::geometry::MAX_DIM {
        return Err(Error::input(format!("ifs dimension {n} out of range 1..=8")));
    }
    let r = cells_per_axis;
    if r == 0 {
        return Err(Error::input("cells_per_axis must be positive"));
    }
    for (i, m) in maps.iter().enumerate() {
        if !(m.scale > 0.0 && m.scale < 1.0) {
            return Err(Error::input(format!("ifs map {i}: scale {} outside (0,1)", m.scale)));
        }
        if m.offset.len() != n {
            return Err(Error::input(format!("ifs map {i}: offset dimension mismatch")));
        }
        for &o in &m.offset {
            if o < -1e-12 || o + m.scale > 1.0 + 1e-12 {
                return Err(Error::input(format!(
                    "ifs map {i}: image of the unit cube escapes [0,1]^n"
                )));
            }
        }
    }
    if maps.is_empty() {
        return Ok(SparseGrid::from_sorted_unchecked(
            n,
            r,
            Vec::new(),
            format!("ifs(maps=0,depth={depth},R={r})"),
        ));
    }
    if (maps.len() as f64).powi(depth as i32) > MAX_INTERVALS as f64 {
        return Err(Error::resource(format!(
            "ifs would enumerate {}^{depth} boxes (cap {MAX_INTERVALS})",
            maps.len()
        )));
    }

    // boxes as (origin per axis, side); sides propagate multiplicatively so
    // deep compositions keep exact self-similar widths
    let mut boxes: Vec<(Vec<f64>, f64)> = vec![(vec![0.0; n], 1.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(boxes.len() * maps.len());
        for (o, s) in &boxes {
            for m in maps {
                let no: Vec<f64> = o
                    .iter()
                    .zip(&m.offset)
                    .map(|(&oj, &mj)| m.scale * oj + mj)
                    .collect();
                next.push((no, m.scale * s));
            }
        }
        boxes = next;
    }

    let mut cells: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut scratch: Vec<(u64, u64)> = Vec::with_capacity(n);
    for (o, s) in &boxes {
        scratch.clear();
        let mut empty = false;
        for &oj in o {
            match raster_interval(oj, oj + s, r) {
                Some(range) => scratch.push(range),
                None => {
                    empty = true;
                    break;
                }
            }
        }
        if empty {
            continue;
        }
        let mut cur: Vec<u64> = scratch.iter().map(|&(lo, _)| lo).collect();
        loop {
            cells.insert(cur.clone());
            if cells.len() as u64 > MAX_CELLS {
                return Err(Error::resource("ifs rasterization exceeds the cell cap"));
            }
            let mut axis = n;
            loop {
                if axis == 0 {
                    axis = usize::MAX;
                    break;
                }
                axis -= 1;
                if cur[axis] < scratch[axis].1 {
                    cur[axis] += 1;
                    for (j, cj) in cur.iter_mut().enumerate().skip(axis + 1) {
                        *cj = scratch[j].0;
                    }
                    break;
                }
            }
            if axis == usize::MAX {
                break;
            }
        }
    }

    let mut flat = Vec::with_capacity(cells.len() * n);
    for c in cells {
        flat.extend_from_slice(&c);
    }
    Ok(SparseGrid::from_sorted_unchecked(
        n,
        r,
        flat,
        format!("ifs(maps={},depth={depth},R={r})", maps.len()),
    ))
}

/// Cells [lo, hi] with positive-measure overlap with [a, b] ⊂ [0,1].
fn raster_interval(a: f64, b: f64, r: u64) -> Option<(u64, u64)> {
    let ar = a * r as f64;
    let br = b * r as f64;
    let mut lo = ar.floor();
    if (lo + 1.0) - ar <= OVERLAP_TOL_CELLS {
        lo += 1.0;
    }
    let mut hi = br.floor();
    if br - hi <= OVERLAP_TOL_CELLS {
        hi -= 1.0;
    }
    let lo = lo.max(0.0) as u64;
    let hi = hi.min((r - 1) as f64);
    if hi < 0.0 || (hi as u64) < lo {
        return None;
    }
    Some((lo, hi as u64))
}

/// Outer approximation of the closed neighborhood A(r): cells whose center
/// lies within r + half-diagonal of some occupied cell center.
pub fn dilate(grid: &SparseGrid, radius: f64) -> Result<SparseGrid> {
    if radius < 0.0 {
        return Err(Error::input("dilate radius must be ≥ 0"));
    }
    if grid.is_empty() {
        return Ok(grid.clone());
    }
    let field = distance_transform(grid)?;
    let threshold = radius + grid.half_diagonal() + 1e-12;
    let n = grid.dim();
    let r = grid.cells_per_axis();
    let mut flat = Vec::new();
    let mut cell = vec![0u64; n];
    loop {
        if field.value_at(&cell)? <= threshold {
            flat.extend_from_slice(&cell);
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                axis = usize::MAX;
                break;
            }
            axis -= 1;
            cell[axis] += 1;
            if cell[axis] < r {
                break;
            }
            cell[axis] = 0;
        }
        if axis == usize::MAX {
            break;
        }
    }
    Ok(SparseGrid::from_sorted_unchecked(
        n,
        r,
        flat,
        format!("dilate({}, r={radius})", grid.metadata()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells1d(g: &SparseGrid) -> Vec<u64> {
        g.flat_cells().to_vec()
    }

    #[test]
    fn cantor_examples() {
        let g = gen_cantor(&CantorSpec::new(1.0 / 3.0, 1).unwrap(), 3).unwrap();
        assert_eq!(cells1d(&g), vec![0, 2]);

        let g = gen_cantor(&CantorSpec::new(1.0 / 3.0, 2).unwrap(), 9).unwrap();
        assert_eq!(cells1d(&g), vec![0, 2, 6, 8]);

        let g = gen_cantor(&CantorSpec::new(0.25, 1).unwrap(), 4).unwrap();
        assert_eq!(cells1d(&g), vec![0, 3]);

        assert!(CantorSpec::new(0.5, 1).is_err());
        assert!(CantorSpec::new(0.0, 1).is_err());
    }

    #[test]
    fn cantor_depth6_is_exactly_aligned() {
        let g = gen_cantor(&CantorSpec::new(1.0 / 3.0, 6).unwrap(), 729).unwrap();
        assert_eq!(g.len(), 64);
    }

    #[test]
    fn cantor_cell_count_band() {
        for (lam, d, r) in [(0.3, 3u32, 128u64), (0.4, 4, 256), (0.1, 2, 400)] {
            let g = gen_cantor(&CantorSpec::new(lam, d).unwrap(), r).unwrap();
            let lo = 1u64 << d;
            let hi = (1u64 << d) * ((lam.powi(d as i32) * r as f64) as u64 + 2);
            assert!(
                (g.len() as u64) >= lo && (g.len() as u64) <= hi,
                "count {} outside [{lo},{hi}] for lambda={lam} d={d} R={r}",
                g.len()
            );
        }
    }

    #[test]
    fn ifs_reproduces_cantor_exactly() {
        let spec = CantorSpec::new(0.31, 5).unwrap();
        let via_cantor = gen_cantor(&spec, 1000).unwrap();
        let maps = [
            IfsMap { scale: 0.31, offset: vec![0.0] },
            IfsMap { scale: 0.31, offset: vec![1.0 - 0.31] },
        ];
        let via_ifs = gen_ifs(&maps, 1, 5, 1000).unwrap();
        assert_eq!(via_cantor.flat_cells(), via_ifs.flat_cells());
    }

    #[test]
    fn ifs_corner_squares() {
        let maps: Vec<IfsMap> = [[0.0, 0.0], [0.75, 0.0], [0.0, 0.75], [0.75, 0.75]]
            .iter()
            .map(|&o| IfsMap { scale: 0.25, offset: o.to_vec() })
            .collect();
        let g = gen_ifs(&maps, 2, 1, 4).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.contains_cell(&[0, 0]) && g.contains_cell(&[3, 3]));
    }

    #[test]
    fn ifs_edge_cases() {
        assert!(gen_ifs(&[], 2, 3, 8).unwrap().is_empty());
        let escaping = [IfsMap { scale: 0.5, offset: vec![0.6] }];
        assert!(gen_ifs(&escaping, 1, 1, 8).is_err());
    }

    #[test]
    fn kplane_examples() {
        let g = gen_kplane(2, 1, 8).unwrap();
        let mut want = Vec::new();
        for i in 0..8u64 {
            want.push(vec![i, 3]);
            want.push(vec![i, 4]);
        }
        want.sort();
        let got: Vec<Vec<u64>> = g.iter_cells().map(|c| c.to_vec()).collect();
        assert_eq!(got, want);

        let g = gen_kplane(1, 0, 9).unwrap();
        assert_eq!(g.flat_cells(), &[4]);

        let g = gen_kplane(2, 2, 4).unwrap();
        assert_eq!(g.len(), 16);
    }

    #[test]
    fn product_examples() {
        let c = gen_cantor(&CantorSpec::new(1.0 / 3.0, 1).unwrap(), 3).unwrap();
        let full = gen_kplane(1, 1, 3).unwrap();
        let p = gen_product(&[&c, &full]).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.len(), 6);

        let s1 = SparseGrid::from_cells(1, 3, vec![1], "s").unwrap();
        let s2 = SparseGrid::from_cells(1, 3, vec![2], "s").unwrap();
        let p = gen_product(&[&s1, &s2]).unwrap();
        assert_eq!(p.flat_cells(), &[1, 2]);

        let other = gen_kplane(1, 1, 4).unwrap();
        assert!(gen_product(&[&c, &other]).is_err());
    }

    #[test]
    fn product_counts_multiply() {
        let a = gen_cantor(&CantorSpec::new(0.3, 2).unwrap(), 100).unwrap();
        let b = gen_cantor(&CantorSpec::new(0.2, 2).unwrap(), 100).unwrap();
        let p = gen_product(&[&a, &b]).unwrap();
        assert_eq!(p.len(), a.len() * b.len());
    }

    #[test]
    fn dilate_examples() {
        let single = SparseGrid::from_cells(2, 8, vec![3, 3], "s").unwrap();
        let d0 = dilate(&single, 0.0).unwrap();
        assert_eq!(d0.flat_cells(), single.flat_cells());

        let a = SparseGrid::from_cells(1, 8, vec![4], "s").unwrap();
        let d = dilate(&a, 2.0 / 8.0).unwrap();
        assert_eq!(d.flat_cells(), &[2, 3, 4, 5, 6]);
    }

    #[test]
    fn dilate_monotone() {
        let a = SparseGrid::from_cells(2, 16, vec![4, 4], "a").unwrap();
        let b = SparseGrid::from_cells(2, 16, vec![4, 4, 9, 9], "b").unwrap();
        let da = dilate(&a, 0.1).unwrap();
        let db = dilate(&b, 0.1).unwrap();
        for cell in da.iter_cells() {
            assert!(db.contains_cell(cell), "dilate not monotone in A");
        }
        let da2 = dilate(&a, 0.2).unwrap();
        for cell in da.iter_cells() {
            assert!(da2.contains_cell(cell), "dilate not monotone in r");
        }
    }
}
