//! Numerical estimation of k-porosity on sparse grids.
//!
//! The sup over hole centers z_1,…,z_k in the k-porosity definition is
//! searched as: choice of an orthonormal frame × one radial offset per
//! direction. This is exactly faithful — mutually orthogonal displacements
//! are precisely the rays of an orthonormal frame with independent radii —
//! and for a fixed frame the per-direction searches decouple, because the
//! directions interact only through the shared hole radius ϱ.
//!
//! Hole emptiness is tested against the distance field through a certified
//! lower bound (see [`DistanceField::eval_lower`]), so every reported
//! estimate is one-sided: the witnessed hole balls genuinely avoid all
//! occupied cell centers, and the discretization loss is folded into an
//! explicit additive `error_bound` rather than hidden.

use crate::error::{Error, Result};
use crate::geometry::{add_scaled, complete_for_search, frame_grid, Frame, Point};
use crate::setgen::{distance_transform, DistanceField, SparseGrid};
use rayon::prelude::*;
use serde::Serialize;

/// Search-family and discretization parameters for porosity estimation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PorosityParams {
    /// frame_grid resolution (n=2: angles per quadrant; n=3: cube root of
    /// rotation count; n>3: number of random frames)
    pub frame_resolution: usize,
    /// radial offsets per direction
    pub t_steps: usize,
    pub seed: u64,
}

impl Default for PorosityParams {
    fn default() -> Self {
        PorosityParams { frame_resolution: 32, t_steps: 64, seed: 0 }
    }
}

impl PorosityParams {
    /// The completed search family (grid closed under basis completion and
    /// sign flips — required to reach holes in every orientation).
    pub fn search_frames(&self, n: usize, k: usize) -> Result<Vec<Frame>> {
        let grid = frame_grid(n, k, self.frame_resolution, self.seed)?;
        complete_for_search(&grid, k)
    }
}

/// A lower-bound estimate of por_k(A, x, r) with its witness.
#[derive(Clone, Debug, Serialize)]
pub struct PorosityEstimate {
    /// estimated porosity, clamped to [0, 1/2]
    pub rho_hat: f64,
    /// index of the maximizing frame in the search family
    pub frame_id: usize,
    /// the maximizing frame
    pub frame: Frame,
    /// hole center distances from x, in units of r
    pub hole_offsets: Vec<f64>,
    /// additive discretization slack: (√n/R + r/t_steps)/r
    pub error_bound: f64,
}

/// Per-point porosity across a dyadic scale ladder; the liminf proxy is the
/// minimum over retained scales.
#[derive(Clone, Debug, Serialize)]
pub struct PorosityProfile {
    pub point: Point,
    pub scales: Vec<f64>,
    pub estimates: Vec<PorosityEstimate>,
    pub liminf_proxy: f64,
    /// true when scales below 8 cell widths were dropped from the ladder
    pub truncated: bool,
}

/// Result of the sampled inf over occupied cells.
#[derive(Clone, Debug, Serialize)]
pub struct SetPorosity {
    /// min of liminf proxies over the sample; an upper bound for the
    /// sampled inf (and for por_k(A) when the sample is exhaustive)
    pub value: f64,
    /// sampled occupied-cell rows (sorted)
    pub sample_rows: Vec<usize>,
    pub profiles: Vec<PorosityProfile>,
    /// true when every occupied cell was visited
    pub exhaustive: bool,
}

fn check_center(grid: &SparseGrid, x: &Point) -> Result<Vec<u64>> {
    let cell = grid
        .cell_of_point(x.coords())
        .ok_or_else(|| Error::input("x lies outside the unit cube"))?;
    let center = grid.cell_center(&cell);
    for (a, b) in x.coords().iter().zip(&center) {
        if (a - b).abs() > 1e-9 {
            return Err(Error::input("x is not an occupied cell center"));
        }
    }
    if !grid.contains_cell(&cell) {
        return Err(Error::input("x is not the center of an occupied cell"));
    }
    Ok(cell)
}

/// Estimates por_k(A, x, r) by searching the frame family.
///
/// `field` must be the distance transform of `grid`. The estimate is
/// ϱ̂ = max over frames and per-direction offsets t ∈ {r j/t_steps} of
/// min_i min(dist(x + t_i θ_i), r − t_i)/r, clamped to [0, 1/2].
pub fn por_k_at(
    grid: &SparseGrid,
    field: &DistanceField,
    x: &Point,
    r: f64,
    k: usize,
    frames: &[Frame],
    t_steps: usize,
) -> Result<PorosityEstimate> {
    let n = grid.dim();
    if x.dim() != n {
        return Err(Error::input("por_k_at: point dimension mismatch"));
    }
    if field.dim() != n || field.cells_per_axis() != grid.cells_per_axis() {
        return Err(Error::input("por_k_at: distance field does not match the grid"));
    }
    if k == 0 || k > n {
        return Err(Error::input(format!("por_k_at: k={k} outside 1..={n}")));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::input("por_k_at: r must lie in (0, 1]"));
    }
    if t_steps == 0 || frames.is_empty() {
        return Err(Error::input("por_k_at: need t_steps ≥ 1 and a nonempty frame list"));
    }
    let cell = check_center(grid, x)?;
    if field.value_at(&cell)? != 0.0 {
        return Err(Error::input("por_k_at: field is nonzero at an occupied cell (A/D mismatch)"));
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_frame = 0usize;
    let mut best_offsets = vec![0usize; k];
    let mut offsets = vec![0usize; k];
    let mut z = vec![0.0f64; n];
    for (fi, frame) in frames.iter().enumerate() {
        if frame.dim() != n || frame.k() != k {
            return Err(Error::input("por_k_at: frame family shape mismatch"));
        }
        let mut frame_min = f64::INFINITY;
        let mut live = true;
        for (i, dir) in frame.directions.iter().enumerate() {
            let mut best_i = f64::NEG_INFINITY;
            let mut best_j = 1usize;
            for j in 1..=t_steps {
                let t = r * j as f64 / t_steps as f64;
                for (zi, (xi, di)) in z.iter_mut().zip(x.coords().iter().zip(dir.coords())) {
                    *zi = xi + t * di;
                }
                let v = field.eval_lower(&z).min(r - t);
                if v > best_i {
                    best_i = v;
                    best_j = j;
                }
            }
            offsets[i] = best_j;
            frame_min = frame_min.min(best_i);
            if frame_min <= best_value {
                live = false;
                break;
            }
        }
        if live && frame_min > best_value {
            best_value = frame_min;
            best_frame = fi;
            best_offsets.copy_from_slice(&offsets);
        }
    }

    let rho_hat = (best_value / r).clamp(0.0, 0.5);
    let error_bound = ((n as f64).sqrt() / grid.cells_per_axis() as f64 + r / t_steps as f64) / r;
    Ok(PorosityEstimate {
        rho_hat,
        frame_id: best_frame,
        frame: frames[best_frame].clone(),
        hole_offsets: best_offsets.iter().map(|&j| j as f64 / t_steps as f64).collect(),
        error_bound,
    })
}

/// Brute-force ground truth for small instances (n = 1, or n = 2 with
/// R ≤ 64): 720 angular steps, radial offsets at every multiple of 1/(4R),
/// hole emptiness verified against every occupied cell center directly.
pub fn por_k_oracle(grid: &SparseGrid, x: &Point, r: f64, k: usize) -> Result<f64> {
    let n = grid.dim();
    let ok = n == 1 || (n == 2 && grid.cells_per_axis() <= 64);
    if !ok {
        return Err(Error::input("por_k_oracle: instance too large (need n=1 or n=2 with R ≤ 64)"));
    }
    if k == 0 || k > n {
        return Err(Error::input(format!("por_k_oracle: k={k} outside 1..={n}")));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::input("por_k_oracle: r must lie in (0, 1]"));
    }
    check_center(grid, x)?;
    if grid.is_empty() {
        return Err(Error::input("por_k_oracle: empty set"));
    }

    let centers: Vec<Vec<f64>> = grid.iter_cells().map(|c| grid.cell_center(c)).collect();
    let rr = grid.cells_per_axis() as f64;
    let steps = (4.0 * rr * r).floor() as usize;
    if steps == 0 {
        return Err(Error::input("por_k_oracle: r below the radial step"));
    }

    let best_along = |dir: &[f64]| -> f64 {
        let mut best = f64::NEG_INFINITY;
        for j in 1..=steps {
            let t = j as f64 / (4.0 * rr);
            if t > r {
                break;
            }
            let z = add_scaled(x.coords(), t, dir);
            let mut d = f64::INFINITY;
            for c in &centers {
                let mut s = 0.0;
                for (zi, ci) in z.iter().zip(c) {
                    let e = zi - ci;
                    s += e * e;
                }
                d = d.min(s);
            }
            let v = d.sqrt().min(r - t);
            if v > best {
                best = v;
            }
        }
        best
    };

    let value = match n {
        1 => {
            let left = best_along(&[-1.0]);
            let right = best_along(&[1.0]);
            left.max(right)
        }
        _ => {
            let angles = 720usize;
            let per: Vec<f64> = (0..angles)
                .map(|a| {
                    let phi = std::f64::consts::TAU * a as f64 / angles as f64;
                    best_along(&[phi.cos(), phi.sin()])
                })
                .collect();
            if k == 1 {
                per.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            } else {
                (0..angles)
                    .map(|a| per[a].min(per[(a + angles / 4) % angles]))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        }
    };
    Ok((value / r).clamp(0.0, 0.5))
}

/// Porosity profile at one point over the dyadic ladder r_j = 2^{−j}/4,
/// truncated below 8 cell widths where grid noise dominates.
pub fn por_k_profile(
    grid: &SparseGrid,
    field: &DistanceField,
    x: &Point,
    k: usize,
    scale_count: usize,
    frames: &[Frame],
    params: &PorosityParams,
) -> Result<PorosityProfile> {
    if scale_count == 0 {
        return Err(Error::input("por_k_profile: scale_count must be ≥ 1"));
    }
    let min_scale = 8.0 / grid.cells_per_axis() as f64;
    let mut scales = Vec::new();
    for j in 0..scale_count {
        let r = 0.25 * 0.5_f64.powi(j as i32);
        if r > min_scale {
            scales.push(r);
        }
    }
    let truncated = scales.len() < scale_count;
    if scales.is_empty() {
        return Err(Error::input(format!(
            "por_k_profile: no scale in the ladder exceeds 8 cell widths ({min_scale})"
        )));
    }
    let mut estimates = Vec::with_capacity(scales.len());
    for &r in &scales {
        estimates.push(por_k_at(grid, field, x, r, k, frames, params.t_steps)?);
    }
    let liminf_proxy = estimates.iter().map(|e| e.rho_hat).fold(f64::INFINITY, f64::min);
    Ok(PorosityProfile {
        point: x.clone(),
        scales,
        estimates,
        liminf_proxy,
        truncated,
    })
}

/// Sampled inf over occupied cell centers: min of per-point liminf proxies
/// over a deterministic seeded sample (all cells when the set is small).
pub fn por_k_set(
    grid: &SparseGrid,
    k: usize,
    sample_points: usize,
    seed: u64,
    scale_count: usize,
    params: &PorosityParams,
) -> Result<SetPorosity> {
    if grid.is_empty() {
        return Err(Error::input("por_k_set: empty set"));
    }
    if sample_points == 0 {
        return Err(Error::input("por_k_set: sample_points must be ≥ 1"));
    }
    let field = distance_transform(grid)?;
    let frames = params.search_frames(grid.dim(), k)?;

    let total = grid.len();
    let (rows, exhaustive) = if total <= sample_points {
        ((0..total).collect::<Vec<_>>(), true)
    } else {
        (sample_rows(total, sample_points, seed), false)
    };

    let profiles: Vec<PorosityProfile> = rows
        .par_iter()
        .map(|&row| {
            let cell = grid.cell(row);
            let x = Point::new(grid.cell_center(cell))?;
            por_k_profile(grid, &field, &x, k, scale_count, &frames, params)
        })
        .collect::<Result<Vec<_>>>()?;

    let value = profiles
        .iter()
        .map(|p| p.liminf_proxy)
        .fold(f64::INFINITY, f64::min);
    Ok(SetPorosity {
        value,
        sample_rows: rows,
        profiles,
        exhaustive,
    })
}

/// Deterministic sample of `want` distinct rows out of `total`, sorted.
fn sample_rows(total: usize, want: usize, seed: u64) -> Vec<usize> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // Floyd's algorithm: uniform distinct indices without a full shuffle
    let mut chosen = std::collections::BTreeSet::new();
    for j in (total - want)..total {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setgen::{gen_kplane, SparseGrid};

    fn center_point(grid: &SparseGrid, cell: &[u64]) -> Point {
        Point::new(grid.cell_center(cell)).unwrap()
    }

    fn plane_params() -> PorosityParams {
        PorosityParams { frame_resolution: 64, t_steps: 128, seed: 0 }
    }

    #[test]
    fn full_grid_has_zero_porosity() {
        let g = gen_kplane(2, 2, 32).unwrap();
        let d = distance_transform(&g).unwrap();
        let p = PorosityParams::default();
        let frames = p.search_frames(2, 1).unwrap();
        let x = center_point(&g, &[16, 16]);
        let est = por_k_at(&g, &d, &x, 0.25, 1, &frames, p.t_steps).unwrap();
        assert_eq!(est.rho_hat, 0.0);
    }

    #[test]
    fn plane_k1_approaches_half() {
        let g = gen_kplane(2, 1, 256).unwrap();
        let d = distance_transform(&g).unwrap();
        let p = plane_params();
        let frames = p.search_frames(2, 1).unwrap();
        let x = center_point(&g, &[128, 127]);
        let est = por_k_at(&g, &d, &x, 0.25, 1, &frames, p.t_steps).unwrap();
        assert!(est.rho_hat >= 0.45, "plane k=1 estimate {}", est.rho_hat);
        assert!(est.rho_hat <= 0.5);
    }

    #[test]
    fn plane_k2_hits_sqrt2_minus_1() {
        let g = gen_kplane(2, 1, 256).unwrap();
        let d = distance_transform(&g).unwrap();
        let p = plane_params();
        let frames = p.search_frames(2, 2).unwrap();
        let x = center_point(&g, &[128, 127]);
        let est = por_k_at(&g, &d, &x, 0.25, 2, &frames, p.t_steps).unwrap();
        let want = std::f64::consts::SQRT_2 - 1.0;
        assert!(
            (est.rho_hat - want).abs() <= 0.03,
            "plane k=2 estimate {} vs {}",
            est.rho_hat,
            want
        );
    }

    #[test]
    fn witnessed_holes_avoid_all_centers() {
        let g = SparseGrid::from_cells(2, 64, vec![10, 12, 40, 33, 22, 50, 31, 31], "t").unwrap();
        let d = distance_transform(&g).unwrap();
        let p = PorosityParams::default();
        let frames = p.search_frames(2, 2).unwrap();
        let x = center_point(&g, &[31, 31]);
        let r = 0.25;
        let est = por_k_at(&g, &d, &x, r, 2, &frames, p.t_steps).unwrap();
        assert!(est.rho_hat <= 0.5 + est.error_bound);
        for (dir, &toff) in est.frame.directions.iter().zip(&est.hole_offsets) {
            let z = add_scaled(x.coords(), toff * r, dir.coords());
            for c in g.iter_cells() {
                let ctr = g.cell_center(c);
                let dist: f64 = z
                    .iter()
                    .zip(&ctr)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    dist >= est.rho_hat * r - 1e-12,
                    "hole ball of radius {} contains center {ctr:?} (dist {dist})",
                    est.rho_hat * r
                );
            }
            // hole ball stays inside B(x, r(1+error_bound))
            let zdist: f64 = z
                .iter()
                .zip(x.coords())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(zdist + est.rho_hat * r <= r * (1.0 + est.error_bound) + 1e-12);
        }
    }

    #[test]
    fn antimonotone_in_k_for_nested_families() {
        let g = SparseGrid::from_cells(2, 32, vec![5, 6, 20, 9, 11, 25, 16, 15], "t").unwrap();
        let d = distance_transform(&g).unwrap();
        let p = PorosityParams::default();
        let frames2 = p.search_frames(2, 2).unwrap();
        // nested k=1 family: first direction of every k=2 frame
        let frames1: Vec<Frame> = frames2
            .iter()
            .map(|f| Frame::new(f.origin.clone(), vec![f.directions[0].clone()]).unwrap())
            .collect();
        let x = center_point(&g, &[16, 15]);
        let e1 = por_k_at(&g, &d, &x, 0.25, 1, &frames1, p.t_steps).unwrap();
        let e2 = por_k_at(&g, &d, &x, 0.25, 2, &frames2, p.t_steps).unwrap();
        assert!(e2.rho_hat <= e1.rho_hat + 1e-12);
    }

    #[test]
    fn monotone_in_the_set() {
        let a = SparseGrid::from_cells(2, 32, vec![16, 16, 4, 4], "a").unwrap();
        let b = SparseGrid::from_cells(2, 32, vec![16, 16, 4, 4, 20, 10, 9, 22], "b").unwrap();
        let da = distance_transform(&a).unwrap();
        let db = distance_transform(&b).unwrap();
        let p = PorosityParams::default();
        let frames = p.search_frames(2, 1).unwrap();
        let x = center_point(&a, &[16, 16]);
        let ea = por_k_at(&a, &da, &x, 0.25, 1, &frames, p.t_steps).unwrap();
        let eb = por_k_at(&b, &db, &x, 0.25, 1, &frames, p.t_steps).unwrap();
        assert!(eb.rho_hat <= ea.rho_hat + 1e-15);
    }

    #[test]
    fn frame_refinement_never_decreases() {
        let g = SparseGrid::from_cells(2, 32, vec![16, 16, 10, 20], "t").unwrap();
        let d = distance_transform(&g).unwrap();
        let coarse = PorosityParams { frame_resolution: 4, t_steps: 64, seed: 0 }
            .search_frames(2, 1)
            .unwrap();
        let mut fine = coarse.clone();
        fine.extend(
            PorosityParams { frame_resolution: 16, t_steps: 64, seed: 0 }
                .search_frames(2, 1)
                .unwrap(),
        );
        let x = center_point(&g, &[16, 16]);
        let ec = por_k_at(&g, &d, &x, 0.25, 1, &coarse, 64).unwrap();
        let ef = por_k_at(&g, &d, &x, 0.25, 1, &fine, 64).unwrap();
        assert!(ef.rho_hat >= ec.rho_hat - 1e-15);
    }

    #[test]
    fn axis_permutation_equivariance() {
        let cells = vec![16u64, 16, 3, 20, 25, 7, 11, 30];
        let swapped: Vec<u64> = cells.chunks(2).flat_map(|c| vec![c[1], c[0]]).collect();
        let a = SparseGrid::from_cells(2, 32, cells, "a").unwrap();
        let b = SparseGrid::from_cells(2, 32, swapped, "b").unwrap();
        let da = distance_transform(&a).unwrap();
        let db = distance_transform(&b).unwrap();
        let p = PorosityParams::default();
        let frames = p.search_frames(2, 1).unwrap();
        let xa = center_point(&a, &[16, 16]);
        let ea = por_k_at(&a, &da, &xa, 0.25, 1, &frames, p.t_steps).unwrap();
        let eb = por_k_at(&b, &db, &xa, 0.25, 1, &frames, p.t_steps).unwrap();
        assert!((ea.rho_hat - eb.rho_hat).abs() < 1e-12);
    }

    #[test]
    fn input_errors() {
        let g = gen_kplane(2, 1, 32).unwrap();
        let d = distance_transform(&g).unwrap();
        let p = PorosityParams::default();
        let frames = p.search_frames(2, 1).unwrap();
        // not an occupied center
        let off = Point::new(vec![0.51, 0.51]).unwrap();
        assert!(por_k_at(&g, &d, &off, 0.25, 1, &frames, 64).is_err());
        // mismatched field
        let other = gen_kplane(2, 1, 64).unwrap();
        let dother = distance_transform(&other).unwrap();
        let x = Point::new(g.cell_center(&[16, 15])).unwrap();
        assert!(por_k_at(&g, &dother, &x, 0.25, 1, &frames, 64).is_err());
        // k out of range
        assert!(por_k_at(&g, &d, &x, 0.25, 3, &frames, 64).is_err());
    }

    #[test]
    fn oracle_examples() {
        // singleton: holes just off-center give ≈ 1/2
        let g = SparseGrid::from_cells(2, 32, vec![16, 16], "s").unwrap();
        let x = center_point(&g, &[16, 16]);
        let v = por_k_oracle(&g, &x, 0.25, 2).unwrap();
        assert!(v >= 0.45, "singleton oracle {v}");

        // full grid: at cell-center resolution the oracle sees at most the
        // half-diagonal gap between centers
        let full = gen_kplane(2, 2, 32).unwrap();
        let xf = center_point(&full, &[16, 16]);
        let slack = (full.half_diagonal() + 1.0 / (4.0 * 32.0)) / 0.25;
        assert!(por_k_oracle(&full, &xf, 0.25, 1).unwrap() <= slack);

        // line grid, k=2 ≈ √2−1
        let plane = gen_kplane(2, 1, 64).unwrap();
        let xp = center_point(&plane, &[32, 31]);
        let v = por_k_oracle(&plane, &xp, 0.25, 2).unwrap();
        assert!((v - (std::f64::consts::SQRT_2 - 1.0)).abs() < 0.02, "plane oracle {v}");

        // too large
        let big = gen_kplane(2, 1, 128).unwrap();
        let xb = center_point(&big, &[64, 63]);
        assert!(por_k_oracle(&big, &xb, 0.25, 1).is_err());
    }

    #[test]
    fn profile_and_set_level() {
        let plane = gen_kplane(2, 1, 256).unwrap();
        let sp = por_k_set(&plane, 1, 16, 7, 2, &plane_params()).unwrap();
        assert!(sp.value >= 0.45, "plane set porosity {}", sp.value);
        assert!(!sp.exhaustive);

        let full = gen_kplane(2, 2, 64).unwrap();
        let sf = por_k_set(&full, 1, 16, 7, 2, &PorosityParams::default()).unwrap();
        assert_eq!(sf.value, 0.0);

        // profile truncation: R=64 keeps only r = 1/4 from a 4-scale ladder
        // (the 8-cell floor is strict: r must exceed 8/R)
        let d = distance_transform(&full).unwrap();
        let frames = PorosityParams::default().search_frames(2, 1).unwrap();
        let x = center_point(&full, &[32, 32]);
        let prof =
            por_k_profile(&full, &d, &x, 1, 4, &frames, &PorosityParams::default()).unwrap();
        assert!(prof.truncated);
        assert_eq!(prof.scales.len(), 1);

        // no valid scales at tiny R
        let tiny = gen_kplane(2, 2, 16).unwrap();
        let dt = distance_transform(&tiny).unwrap();
        let xt = center_point(&tiny, &[8, 8]);
        assert!(por_k_profile(&tiny, &dt, &xt, 1, 4, &frames, &PorosityParams::default()).is_err());
    }

    #[test]
    fn sample_rows_is_deterministic_and_distinct() {
        let a = sample_rows(1000, 50, 42);
        let b = sample_rows(1000, 50, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|&r| r < 1000));
    }
}
