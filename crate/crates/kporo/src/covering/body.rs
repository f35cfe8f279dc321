use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, Point, UnitDirection};

/// A bounded convex body kept as an intersection of half-space complements
/// { y : (y − a_j)·θ_j ≤ 0 } inside a bounding ball around an interior point.
///
/// The boundary sampler ray-shoots from the interior point: n=2 uses an
/// angular sweep, n=3 a Fibonacci direction set. Each sample carries the
/// outward normal of the constraint it hits (the bounding sphere contributes
/// the ray direction itself), which is exactly the supporting half-space
/// map θ(x) the decomposition lemma needs.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    dim: usize,
    interior: Point,
    bound_radius: f64,
    /// complement constraints: body ⊂ { (y − anchor)·direction ≤ 0 }
    constraints: Vec<(Point, UnitDirection)>,
}

impl ConvexBody {
    pub fn new(interior: Point, bound_radius: f64) -> Result<Self> {
        if !(bound_radius > 0.0 && bound_radius.is_finite()) {
            return Err(Error::input("convex body: bound radius must be positive"));
        }
        Ok(ConvexBody {
            dim: interior.dim(),
            interior,
            bound_radius,
            constraints: Vec::new(),
        })
    }

    /// Adds the complement of H(anchor, direction) as a constraint.
    pub fn exclude_halfspace(&mut self, anchor: Point, direction: UnitDirection) -> Result<()> {
        if anchor.dim() != self.dim || direction.dim() != self.dim {
            return Err(Error::input("convex body: constraint dimension mismatch"));
        }
        self.constraints.push((anchor, direction));
        Ok(())
    }

    /// Convex polygon from vertices (n = 2), via the monotone chain hull;
    /// edges become half-space complements, the centroid the interior point.
    pub fn polygon(vertices: &[Point]) -> Result<Self> {
        if vertices.len() < 3 || vertices.iter().any(|v| v.dim() != 2) {
            return Err(Error::input("polygon: need ≥ 3 vertices in R^2"));
        }
        let mut pts: Vec<(f64, f64)> = vertices.iter().map(|p| (p.coords()[0], p.coords()[1])).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let hull = monotone_chain(&pts);
        if hull.len() < 3 {
            return Err(Error::input("polygon: vertices are collinear"));
        }
        let cx = hull.iter().map(|p| p.0).sum::<f64>() / hull.len() as f64;
        let cy = hull.iter().map(|p| p.1).sum::<f64>() / hull.len() as f64;
        let radius = hull
            .iter()
            .map(|p| ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt())
            .fold(0.0f64, f64::max)
            * 1.5
            + 1e-9;
        let mut body = ConvexBody::new(Point::new(vec![cx, cy])?, radius)?;
        for i in 0..hull.len() {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            // hull is counterclockwise; outward normal of edge a→b
            let nx = b.1 - a.1;
            let ny = a.0 - b.0;
            body.exclude_halfspace(
                Point::new(vec![a.0, a.1])?,
                UnitDirection::normalize(&[nx, ny])?,
            )?;
        }
        Ok(body)
    }

    /// A ball: no half-space constraints, boundary is the bounding sphere.
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        ConvexBody::new(center, radius)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior_point(&self) -> &Point {
        &self.interior
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[(Point, UnitDirection)] {
        &self.constraints
    }

    pub fn contains(&self, y: &Point) -> bool {
        if y.dim() != self.dim {
            return false;
        }
        if y.dist(&self.interior) > self.bound_radius + 1e-12 {
            return false;
        }
        self.constraints
            .iter()
            .all(|(a, d)| dot(&sub(y.coords(), a.coords()), d.coords()) <= 1e-12)
    }

    /// Distance from the interior point to the boundary along `dir`, with the
    /// outward normal of the first constraint attained there.
    fn shoot(&self, dir: &[f64]) -> (f64, UnitDirection) {
        let p = self.interior.coords();
        let mut t_min = self.bound_radius;
        let mut normal: Option<UnitDirection> = None;
        for (a, d) in &self.constraints {
            let denom = dot(dir, d.coords());
            if denom > 1e-12 {
                let t = dot(&sub(a.coords(), p), d.coords()) / denom;
                if t >= 0.0 && t < t_min - 1e-12 {
                    t_min = t;
                    normal = Some(d.clone());
                }
            }
        }
        let normal = normal.unwrap_or_else(|| {
            UnitDirection::normalize(dir).expect("ray directions are unit vectors")
        });
        (t_min.max(0.0), normal)
    }

    /// Deterministic boundary samples with outward normals.
    pub fn sample_boundary(&self, samples: usize) -> Result<Vec<(Point, UnitDirection)>> {
        if samples == 0 {
            return Err(Error::input("sample_boundary: need ≥ 1 sample"));
        }
        let dirs: Vec<Vec<f64>> = match self.dim {
            1 => vec![vec![1.0], vec![-1.0]],
            2 => (0..samples)
                .map(|j| {
                    let a = std::f64::consts::TAU * j as f64 / samples as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect(),
            3 => fibonacci_dirs(samples),
            _ => {
                return Err(Error::input(
                    "sample_boundary: only ambient dimensions 1..=3 are supported",
                ))
            }
        };
        let p = self.interior.coords();
        let mut out = Vec::with_capacity(dirs.len());
        for dir in &dirs {
            let (t, normal) = self.shoot(dir);
            if t <= 1e-12 {
                // interior point sits on the boundary along this ray
                continue;
            }
            let q: Vec<f64> = p.iter().zip(dir).map(|(pi, di)| pi + t * di).collect();
            out.push((Point::new(q)?, normal));
        }
        if out.is_empty() {
            return Err(Error::input("sample_boundary: no boundary point found"));
        }
        Ok(out)
    }
}

fn monotone_chain(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn fibonacci_dirs(m: usize) -> Vec<Vec<f64>> {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn square_boundary_normals() {
        let square = ConvexBody::polygon(&[
            pt(&[0.0, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[1.0, 1.0]),
            pt(&[0.0, 1.0]),
        ])
        .unwrap();
        assert_eq!(square.constraint_count(), 4);
        let samples = square.sample_boundary(64).unwrap();
        assert_eq!(samples.len(), 64);
        for (q, normal) in &samples {
            // boundary points lie on the unit square's edges
            let (x, y) = (q.coords()[0], q.coords()[1]);
            let on_edge = (x.abs() < 1e-9 || (x - 1.0).abs() < 1e-9) && (-1e-9..=1.0 + 1e-9).contains(&y)
                || (y.abs() < 1e-9 || (y - 1.0).abs() < 1e-9) && (-1e-9..=1.0 + 1e-9).contains(&x);
            assert!(on_edge, "sample {q:?} not on the square boundary");
            // normals are axis directions
            let c = normal.coords();
            assert!(c[0].abs() < 1e-9 || c[1].abs() < 1e-9);
            // supporting half-space property: H(q, normal) misses the body
            let probe = pt(&[0.5, 0.5]);
            assert!(dot(&sub(probe.coords(), q.coords()), c) <= 0.0);
        }
    }

    #[test]
    fn ball_boundary() {
        let ball = ConvexBody::ball(pt(&[0.2, 0.3]), 0.5).unwrap();
        for (q, normal) in ball.sample_boundary(32).unwrap() {
            assert!((q.dist(&pt(&[0.2, 0.3])) - 0.5).abs() < 1e-12);
            let radial = sub(q.coords(), &[0.2, 0.3]);
            let cosang = dot(&radial, normal.coords()) / norm(&radial);
            assert!((cosang - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn halfspace_bounded_body_in_3d() {
        let mut body = ConvexBody::new(pt(&[0.0, 0.0, 0.0]), 2.0).unwrap();
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut a = vec![0.0; 3];
                a[axis] = sign * 0.5;
                let mut d = vec![0.0; 3];
                d[axis] = sign;
                body.exclude_halfspace(Point::new(a).unwrap(), UnitDirection::new(d).unwrap())
                    .unwrap();
            }
        }
        for (q, _) in body.sample_boundary(200).unwrap() {
            let m = q.coords().iter().fold(0.0f64, |acc, &c| acc.max(c.abs()));
            assert!((m - 0.5).abs() < 1e-9, "cube boundary point {q:?}");
        }
        assert!(body.contains(&pt(&[0.1, 0.2, -0.3])));
        assert!(!body.contains(&pt(&[0.7, 0.0, 0.0])));
    }

    #[test]
    fn degenerate_polygon_rejected() {
        let line = [pt(&[0.0, 0.0]), pt(&[0.5, 0.5]), pt(&[1.0, 1.0])];
        assert!(ConvexBody::polygon(&line).is_err());
    }
}
