//! Vector, half-space, cone and subspace primitives with planarity predicates.
//!
//! Everything here is plain 64-bit arithmetic on low-dimensional vectors
//! (ambient dimension 1..=8). Types are immutable after construction and all
//! operations are pure, so they can be used freely across threads.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Unit-norm tolerance for [`UnitDirection`] and [`Subspace`] bases.
pub const UNIT_TOL: f64 = 1e-12;
/// Pairwise orthogonality tolerance for [`Frame`] directions.
pub const FRAME_ORTHO_TOL: f64 = 1e-10;

pub const MAX_DIM: usize = 8;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::input(format!(
            "ambient dimension must be in 1..={MAX_DIM}, got {n}"
        )));
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_scaled(a: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    a.iter().zip(d).map(|(x, y)| x + t * y).collect()
}

/// A point of R^n, 1 ≤ n ≤ 8.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_dim(coords.len())?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("point coordinates must be finite"));
        }
        Ok(Point { coords })
    }

    pub fn origin(n: usize) -> Result<Self> {
        Point::new(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dist(&self, other: &Point) -> f64 {
        norm(&sub(&self.coords, &other.coords))
    }
}

/// A direction on the unit sphere S^{n−1}; norm 1 within `UNIT_TOL`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitDirection {
    coords: Vec<f64>,
}

impl UnitDirection {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_dim(coords.len())?;
        let n = norm(&coords);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::input(format!(
                "direction norm {n} is not 1 within {UNIT_TOL:e}"
            )));
        }
        Ok(UnitDirection { coords })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(v: &[f64]) -> Result<Self> {
        check_dim(v.len())?;
        let n = norm(v);
        if n < 1e-300 || !n.is_finite() {
            return Err(Error::input("cannot normalize a zero vector"));
        }
        Ok(UnitDirection {
            coords: v.iter().map(|c| c / n).collect(),
        })
    }

    pub fn axis(n: usize, i: usize) -> Result<Self> {
        check_dim(n)?;
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Ok(UnitDirection { coords: v })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn negated(&self) -> UnitDirection {
        UnitDirection {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// Open half-space H(anchor, θ) = { y : (y − anchor)·θ > 0 }.
#[derive(Clone, Debug, Serialize)]
pub struct HalfSpace {
    pub anchor: Point,
    pub direction: UnitDirection,
}

impl HalfSpace {
    pub fn new(anchor: Point, direction: UnitDirection) -> Result<Self> {
        if anchor.dim() != direction.dim() {
            return Err(Error::input("half-space anchor/direction dimension mismatch"));
        }
        Ok(HalfSpace { anchor, direction })
    }

    /// Strict membership, matching the defining inequality.
    pub fn contains(&self, y: &Point) -> bool {
        self.signed_depth(y.coords()) > 0.0
    }

    /// (y − anchor)·θ; positive inside.
    pub fn signed_depth(&self, y: &[f64]) -> f64 {
        dot(&sub(y, self.anchor.coords()), self.direction.coords())
    }
}

/// An m-dimensional linear subspace of R^n given by an orthonormal basis.
#[derive(Clone, Debug, Serialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(ambient_dim)?;
        if basis.len() > ambient_dim {
            return Err(Error::input("subspace dimension exceeds ambient dimension"));
        }
        for b in &basis {
            if b.len() != ambient_dim {
                return Err(Error::input("basis vector dimension mismatch"));
            }
            if (norm(b) - 1.0).abs() > UNIT_TOL {
                return Err(Error::input("basis vector is not unit within 1e-12"));
            }
        }
        for i in 0..basis.len() {
            for j in 0..i {
                if dot(&basis[i], &basis[j]).abs() > UNIT_TOL {
                    return Err(Error::input("basis vectors are not orthogonal within 1e-12"));
                }
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    /// The zero subspace {0} ⊂ R^n.
    pub fn zero(ambient_dim: usize) -> Result<Self> {
        Subspace::new(ambient_dim, Vec::new())
    }

    /// Span of the first m coordinate axes.
    pub fn axis_span(ambient_dim: usize, m: usize) -> Result<Self> {
        check_dim(ambient_dim)?;
        if m > ambient_dim {
            return Err(Error::input("span dimension exceeds ambient dimension"));
        }
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            let mut v = vec![0.0; ambient_dim];
            v[i] = 1.0;
            basis.push(v);
        }
        Subspace::new(ambient_dim, basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Orthogonal projection of a raw vector onto the subspace.
    pub fn project_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim];
        for b in &self.basis {
            let c = dot(y, b);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// Coordinates of proj_V(y) in the basis of V.
    pub fn local_coords(&self, y: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(y, b)).collect()
    }

    /// Embeds local basis coordinates back into R^n.
    pub fn embed(&self, local: &[f64]) -> Vec<f64> {
        debug_assert_eq!(local.len(), self.basis.len());
        let mut out = vec![0.0; self.ambient_dim];
        for (c, b) in local.iter().zip(&self.basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// |proj_{V⊥}(y)|, computed via Pythagoras with clamping.
    pub fn perp_norm(&self, y: &[f64]) -> f64 {
        let total = dot(y, y);
        let p = self.project_vec(y);
        (total - dot(&p, &p)).max(0.0).sqrt()
    }
}

/// Orthogonal projection proj_V(y) as a point.
pub fn project(v: &Subspace, y: &Point) -> Result<Point> {
    if v.ambient_dim() != y.dim() {
        return Err(Error::input("project: dimension mismatch"));
    }
    Point::new(v.project_vec(y.coords()))
}

/// Cone X(apex, V, α) = { y : |proj_{V⊥}(y − apex)| ≤ α|y − apex| }.
#[derive(Clone, Debug, Serialize)]
pub struct Cone {
    pub apex: Point,
    pub subspace: Subspace,
    pub aperture: f64,
}

impl Cone {
    pub fn new(apex: Point, subspace: Subspace, aperture: f64) -> Result<Self> {
        if apex.dim() != subspace.ambient_dim() {
            return Err(Error::input("cone apex/subspace dimension mismatch"));
        }
        if !(aperture > 0.0 && aperture < 1.0) {
            return Err(Error::input("cone aperture must lie in (0,1)"));
        }
        Ok(Cone { apex, subspace, aperture })
    }
}

/// Membership in the defining inequality; the apex itself is always inside.
pub fn cone_contains(c: &Cone, y: &Point) -> Result<bool> {
    if c.apex.dim() != y.dim() {
        return Err(Error::input("cone_contains: dimension mismatch"));
    }
    let w = sub(y.coords(), c.apex.coords());
    let perp = c.subspace.perp_norm(&w);
    Ok(perp <= c.aperture * norm(&w))
}

/// A set is (V,α)-planar when every point sees every other inside the cone.
///
/// O(N²) pairwise check; the empty and singleton cases are vacuously true.
pub fn is_planar(points: &[Point], v: &Subspace, alpha: f64) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::input("is_planar: alpha must lie in (0,1)"));
    }
    for p in points {
        if p.dim() != v.ambient_dim() {
            return Err(Error::input("is_planar: dimension mismatch"));
        }
    }
    for x in points {
        for y in points {
            let w = sub(y.coords(), x.coords());
            let perp = v.perp_norm(&w);
            if perp > alpha * norm(&w) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks that the sample is the graph of a Lipschitz map over V:
/// proj_V injective (separation > 1e−12) and the induced slopes bounded by
/// α/√(1−α²) + 1e−9.
pub fn planar_graph_check(points: &[Point], v: &Subspace, alpha: f64) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::input("planar_graph_check: alpha must lie in (0,1)"));
    }
    let lip = alpha / (1.0 - alpha * alpha).sqrt() + 1e-9;
    for p in points {
        if p.dim() != v.ambient_dim() {
            return Err(Error::input("planar_graph_check: dimension mismatch"));
        }
    }
    for (i, x) in points.iter().enumerate() {
        for y in points.iter().skip(i + 1) {
            let w = sub(y.coords(), x.coords());
            let base = norm(&v.project_vec(&w));
            if base <= 1e-12 {
                return Ok(false);
            }
            let height = v.perp_norm(&w);
            if height > lip * base {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Completes V's basis to an orthonormal basis of R^n and returns the new part.
///
/// Convention for identifying R^n with V ⊕ V⊥: Gram-Schmidt against the
/// standard basis in order, keeping directions whose residual is non-negligible.
pub fn orthogonal_complement(v: &Subspace) -> Subspace {
    let n = v.ambient_dim();
    let mut acc: Vec<Vec<f64>> = v.basis().to_vec();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n - v.dim());
    for i in 0..n {
        if acc.len() == n {
            break;
        }
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        // two rounds of orthogonalization for numerical robustness
        for _ in 0..2 {
            for b in &acc {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let r = norm(&w);
        if r > 1e-8 {
            let unit: Vec<f64> = w.iter().map(|c| c / r).collect();
            acc.push(unit.clone());
            out.push(unit);
        }
    }
    debug_assert_eq!(out.len(), n - v.dim());
    Subspace::new(n, out).expect("completion produces an orthonormal basis")
}

/// k mutually orthogonal unit directions anchored at a point.
#[derive(Clone, Debug, Serialize)]
pub struct Frame {
    pub origin: Point,
    pub directions: Vec<UnitDirection>,
}

impl Frame {
    pub fn new(origin: Point, directions: Vec<UnitDirection>) -> Result<Self> {
        if directions.is_empty() || directions.len() > origin.dim() {
            return Err(Error::input("frame must hold 1..=n directions"));
        }
        for d in &directions {
            if d.dim() != origin.dim() {
                return Err(Error::input("frame direction dimension mismatch"));
            }
        }
        for i in 0..directions.len() {
            for j in 0..i {
                let d = dot(directions[i].coords(), directions[j].coords());
                if d.abs() > FRAME_ORTHO_TOL {
                    return Err(Error::input(format!(
                        "frame directions {i},{j} not orthogonal: inner product {d:e}"
                    )));
                }
            }
        }
        Ok(Frame { origin, directions })
    }

    pub fn dim(&self) -> usize {
        self.origin.dim()
    }

    pub fn k(&self) -> usize {
        self.directions.len()
    }
}

/// Deterministic covering of S^{n−1} by caps of the given chordal radius.
///
/// n=2 uses the angular grid with step 2·asin(radius/2); n=3 uses a Fibonacci
/// point set grown until a dense probe certifies the covering radius; n>3
/// grows a seeded random center set the same way. The spec only needs a
/// finite verified cover, not an optimal one.
pub fn sphere_cover(n: usize, radius: f64, seed: u64) -> Result<Vec<UnitDirection>> {
    check_dim(n)?;
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::input("sphere_cover: radius must lie in (0,1]"));
    }
    match n {
        1 => Ok(vec![UnitDirection::axis(1, 0)?, UnitDirection::new(vec![-1.0])?]),
        2 => {
            let m = (std::f64::consts::TAU / (2.0 * (radius / 2.0).asin())).ceil() as usize;
            let mut out = Vec::with_capacity(m);
            for j in 0..m {
                let a = std::f64::consts::TAU * j as f64 / m as f64;
                out.push(UnitDirection::new(vec![a.cos(), a.sin()])?);
            }
            Ok(out)
        }
        3 => {
            // Golden-angle spiral; density raised until the probe certifies
            // max gap ≤ 0.93·radius, leaving slack for unprobed directions.
            let mut m = ((14.0 / (radius * radius)).ceil() as usize).max(8);
            for _ in 0..24 {
                let centers = fibonacci_sphere(m);
                if verify_cover_3d(&centers, radius * 0.93, seed) {
                    return centers
                        .into_iter()
                        .map(UnitDirection::new)
                        .collect::<Result<Vec<_>>>();
                }
                m = m * 4 / 3 + 1;
            }
            Err(Error::input("sphere_cover: failed to certify a 3D cover"))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut centers: Vec<Vec<f64>> = Vec::new();
            // greedy absorption: keep random directions that are not yet covered
            let budget = ((4.0 / radius).powi(n as i32 - 1) * 40.0) as usize;
            for _ in 0..budget.max(4000) {
                let v = random_unit(&mut rng, n);
                let covered = centers
                    .iter()
                    .any(|c| norm(&sub(&v, c)) <= radius * 0.5);
                if !covered {
                    centers.push(v);
                }
            }
            centers.into_iter().map(UnitDirection::new).collect()
        }
    }
}

fn fibonacci_sphere(m: usize) -> Vec<Vec<f64>> {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    (0..m)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = std::f64::consts::TAU * (i as f64 / golden).fract();
            let v = vec![r * phi.cos(), r * phi.sin(), z];
            let nn = norm(&v);
            v.into_iter().map(|c| c / nn).collect()
        })
        .collect()
}

fn verify_cover_3d(centers: &[Vec<f64>], radius: f64, seed: u64) -> bool {
    // probe with a 16x finer spiral plus seeded random directions
    let probes = fibonacci_sphere(centers.len() * 16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let ok = |p: &Vec<f64>| centers.iter().any(|c| norm(&sub(p, c)) <= radius);
    if !probes.iter().all(|p| ok(p)) {
        return false;
    }
    (0..4096).all(|_| ok(&random_unit(&mut rng, 3)))
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let r = norm(&v);
        if r > 1e-9 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; only rough isotropy is needed here
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Deterministic families of orthonormal k-frames used as porosity search grids.
///
/// n=2: angles {jπ/(2·resolution)}. n=3: a quasi-uniform rotation sample of
/// size resolution³. n>3: `resolution` seeded Gaussian frames. The n=2 grid
/// spans a fundamental domain; searches close it under sign flips and basis
/// completion (see [`complete_for_search`]).
pub fn frame_grid(n: usize, k: usize, resolution: usize, seed: u64) -> Result<Vec<Frame>> {
    check_dim(n)?;
    if k == 0 || k > n {
        return Err(Error::input(format!("frame_grid: k={k} out of range 1..={n}")));
    }
    if resolution == 0 {
        return Err(Error::input("frame_grid: resolution must be positive"));
    }
    let origin = Point::origin(n)?;
    match n {
        1 => Ok(vec![
            Frame::new(origin.clone(), vec![UnitDirection::new(vec![1.0])?])?,
            Frame::new(origin, vec![UnitDirection::new(vec![-1.0])?])?,
        ]),
        2 => {
            let mut out = Vec::with_capacity(resolution);
            for j in 0..resolution {
                let a = std::f64::consts::FRAC_PI_2 * j as f64 / resolution as f64;
                let d0 = UnitDirection::new(vec![a.cos(), a.sin()])?;
                let dirs = if k == 1 {
                    vec![d0]
                } else {
                    vec![d0, UnitDirection::new(vec![-a.sin(), a.cos()])?]
                };
                out.push(Frame::new(origin.clone(), dirs)?);
            }
            Ok(out)
        }
        3 => {
            let mut out = Vec::with_capacity(resolution.pow(3));
            for a in 0..resolution {
                for b in 0..resolution {
                    for c in 0..resolution {
                        let phi = std::f64::consts::TAU * (a as f64 + 0.5) / resolution as f64;
                        let ct = 1.0 - 2.0 * (b as f64 + 0.5) / resolution as f64;
                        let psi = std::f64::consts::TAU * (c as f64 + 0.5) / resolution as f64;
                        let rot = euler_zyz(phi, ct.clamp(-1.0, 1.0).acos(), psi);
                        let dirs = (0..k)
                            .map(|col| UnitDirection::normalize(&[rot[0][col], rot[1][col], rot[2][col]]))
                            .collect::<Result<Vec<_>>>()?;
                        out.push(Frame::new(origin.clone(), dirs)?);
                    }
                }
            }
            Ok(out)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(resolution);
            while out.len() < resolution {
                if let Some(frame) = random_frame(&mut rng, n, k, &origin) {
                    out.push(frame);
                }
            }
            Ok(out)
        }
    }
}

fn euler_zyz(phi: f64, theta: f64, psi: f64) -> [[f64; 3]; 3] {
    let (c1, s1) = (phi.cos(), phi.sin());
    let (c2, s2) = (theta.cos(), theta.sin());
    let (c3, s3) = (psi.cos(), psi.sin());
    [
        [c1 * c2 * c3 - s1 * s3, -c1 * c2 * s3 - s1 * c3, c1 * s2],
        [s1 * c2 * c3 + c1 * s3, -s1 * c2 * s3 + c1 * c3, s1 * s2],
        [-s2 * c3, s2 * s3, c2],
    ]
}

fn random_frame(rng: &mut ChaCha8Rng, n: usize, k: usize, origin: &Point) -> Option<Frame> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let r = norm(&v);
        if r < 1e-6 {
            return None;
        }
        basis.push(v.into_iter().map(|c| c / r).collect());
    }
    let dirs = basis
        .into_iter()
        .map(UnitDirection::new)
        .collect::<Result<Vec<_>>>()
        .ok()?;
    Frame::new(origin.clone(), dirs).ok()
}

/// Closes a frame family under basis completion and sign flips.
///
/// Each grid frame is completed to a full orthonormal basis of R^n; the
/// returned family contains every k-subset of the completed basis with every
/// sign pattern. This is what makes the search faithful to the sup over
/// arbitrary orthogonal hole directions.
pub fn complete_for_search(frames: &[Frame], k: usize) -> Result<Vec<Frame>> {
    let mut out = Vec::new();
    for frame in frames {
        let n = frame.dim();
        let span = Subspace::new(
            n,
            frame.directions.iter().map(|d| d.coords().to_vec()).collect(),
        )?;
        let mut basis: Vec<Vec<f64>> = span.basis().to_vec();
        basis.extend(orthogonal_complement(&span).basis().iter().cloned());
        let idxs: Vec<usize> = (0..n).collect();
        for subset in k_subsets(&idxs, k) {
            for signs in 0..(1u32 << k) {
                let dirs = subset
                    .iter()
                    .enumerate()
                    .map(|(pos, &bi)| {
                        let mut v = basis[bi].clone();
                        if signs >> pos & 1 == 1 {
                            for c in v.iter_mut() {
                                *c = -*c;
                            }
                        }
                        UnitDirection::new(v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(Frame::new(frame.origin.clone(), dirs)?);
            }
        }
    }
    Ok(out)
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in k_subsets(&items[i + 1..], k - 1) {
            let mut s = vec![first];
            s.append(&mut rest);
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn project_axis_and_identity() {
        let v = Subspace::axis_span(2, 1).unwrap();
        let p = project(&v, &pt(&[3.0, 4.0])).unwrap();
        assert_eq!(p.coords(), &[3.0, 0.0]);

        let full = Subspace::axis_span(2, 2).unwrap();
        let q = project(&full, &pt(&[3.0, 4.0])).unwrap();
        assert!((q.coords()[0] - 3.0).abs() < 1e-15 && (q.coords()[1] - 4.0).abs() < 1e-15);
    }

    #[test]
    fn project_diagonal() {
        let s = 1.0 / 2.0_f64.sqrt();
        let v = Subspace::new(2, vec![vec![s, s]]).unwrap();
        let p = project(&v, &pt(&[1.0, 0.0])).unwrap();
        assert!((p.coords()[0] - 0.5).abs() < 1e-12);
        assert!((p.coords()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn project_dimension_mismatch() {
        let v = Subspace::axis_span(2, 1).unwrap();
        assert!(project(&v, &pt(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn cone_membership_cases() {
        let v = Subspace::axis_span(2, 1).unwrap();
        let c = Cone::new(pt(&[0.0, 0.0]), v, 0.5).unwrap();
        assert!(cone_contains(&c, &pt(&[1.0, 0.0])).unwrap());
        assert!(!cone_contains(&c, &pt(&[0.0, 1.0])).unwrap());
        // |perp| = 1 ≤ 0.5·√5 ≈ 1.118
        assert!(cone_contains(&c, &pt(&[2.0, 1.0])).unwrap());
        // apex is always inside
        assert!(cone_contains(&c, &pt(&[0.0, 0.0])).unwrap());
    }

    #[test]
    fn planarity_examples() {
        let v = Subspace::axis_span(2, 1).unwrap();
        // two points on a line parallel to V
        let line = [pt(&[0.0, 0.3]), pt(&[1.0, 0.3])];
        assert!(is_planar(&line, &v, 0.05).unwrap());
        // diagonal pair: |perp Δ| = 1 > 0.5·√2
        let diag = [pt(&[0.0, 0.0]), pt(&[1.0, 1.0])];
        assert!(!is_planar(&diag, &v, 0.5).unwrap());
        // singleton and empty are vacuous
        assert!(is_planar(&[pt(&[0.4, 0.7])], &v, 0.1).unwrap());
        assert!(is_planar(&[], &v, 0.1).unwrap());
    }

    #[test]
    fn planar_monotone_in_alpha() {
        let v = Subspace::axis_span(2, 1).unwrap();
        let pts = [pt(&[0.0, 0.0]), pt(&[1.0, 0.4]), pt(&[2.0, 0.6])];
        let mut planar_at = Vec::new();
        for a in [0.1, 0.3, 0.5, 0.7, 0.9] {
            planar_at.push(is_planar(&pts, &v, a).unwrap());
        }
        for w in planar_at.windows(2) {
            assert!(!w[0] || w[1], "planarity must be monotone in alpha");
        }
    }

    #[test]
    fn graph_check_examples() {
        let v = Subspace::axis_span(2, 1).unwrap();
        let flat = [pt(&[0.0, 0.0]), pt(&[0.5, 0.0]), pt(&[1.0, 0.0])];
        assert!(planar_graph_check(&flat, &v, 0.3).unwrap());
        // slope 1 vs limit 0.8/0.6 ≈ 1.333
        let slope1 = [pt(&[0.0, 0.0]), pt(&[1.0, 1.0])];
        assert!(planar_graph_check(&slope1, &v, 0.8).unwrap());
        // stacked points share the projection
        let stacked = [pt(&[0.5, 0.0]), pt(&[0.5, 1.0])];
        assert!(!planar_graph_check(&stacked, &v, 0.8).unwrap());
    }

    #[test]
    fn complement_examples() {
        let v = Subspace::axis_span(3, 1).unwrap();
        let c = orthogonal_complement(&v);
        assert_eq!(c.dim(), 2);
        for b in c.basis() {
            assert!(b[0].abs() < 1e-12);
        }

        let full = Subspace::axis_span(2, 2).unwrap();
        assert_eq!(orthogonal_complement(&full).dim(), 0);

        let s = 1.0 / 2.0_f64.sqrt();
        let diag = Subspace::new(2, vec![vec![s, s]]).unwrap();
        let cd = orthogonal_complement(&diag);
        assert_eq!(cd.dim(), 1);
        let b = &cd.basis()[0];
        assert!((b[0] + b[1]).abs() < 1e-12, "complement of the diagonal is anti-diagonal");
    }

    #[test]
    fn sphere_cover_counts() {
        assert_eq!(sphere_cover(2, 1.0, 0).unwrap().len(), 6);
        assert_eq!(sphere_cover(2, 0.1, 0).unwrap().len(), 63);
        assert!(sphere_cover(2, 1.5, 0).is_err());
    }

    #[test]
    fn sphere_cover_covering_property() {
        for (n, radius) in [(2usize, 0.35), (3usize, 0.4)] {
            let cover = sphere_cover(n, radius, 9).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(123);
            for _ in 0..10_000 {
                let v = random_unit(&mut rng, n);
                let best = cover
                    .iter()
                    .map(|c| norm(&sub(&v, c.coords())))
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= radius, "direction {v:?} not covered at {n}D");
            }
        }
    }

    #[test]
    fn frame_grid_examples() {
        let axes = frame_grid(2, 2, 1, 0).unwrap();
        assert_eq!(axes.len(), 1);
        assert_eq!(axes[0].directions[0].coords(), &[1.0, 0.0]);
        assert!((axes[0].directions[1].coords()[1] - 1.0).abs() < 1e-15);

        let dirs = frame_grid(2, 1, 4, 0).unwrap();
        assert_eq!(dirs.len(), 4);
        for (j, f) in dirs.iter().enumerate() {
            let want = std::f64::consts::FRAC_PI_2 * j as f64 / 4.0;
            let got = f.directions[0].coords()[1].atan2(f.directions[0].coords()[0]);
            assert!((got - want).abs() < 1e-12);
        }

        assert!(frame_grid(2, 3, 4, 0).is_err());
    }

    #[test]
    fn frame_grid_orthogonality_everywhere() {
        for (n, k, res) in [(2, 2, 7), (3, 2, 3), (3, 3, 3), (4, 3, 20)] {
            for f in frame_grid(n, k, res, 42).unwrap() {
                for i in 0..f.k() {
                    for j in 0..i {
                        let d = dot(f.directions[i].coords(), f.directions[j].coords());
                        assert!(d.abs() <= FRAME_ORTHO_TOL);
                    }
                }
            }
        }
    }

    #[test]
    fn completed_family_reaches_all_quadrants() {
        let fam = complete_for_search(&frame_grid(2, 1, 4, 0).unwrap(), 1).unwrap();
        let has = |x: f64, y: f64| {
            fam.iter().any(|f| {
                let c = f.directions[0].coords();
                (c[0] - x).abs() < 1e-9 && (c[1] - y).abs() < 1e-9
            })
        };
        assert!(has(1.0, 0.0) && has(-1.0, 0.0) && has(0.0, 1.0) && has(0.0, -1.0));
    }
}
