use crate::covering::ConvexBody;
use crate::error::{Error, Result};
use crate::geometry::{
    is_planar, norm, orthogonal_complement, sphere_cover, sub, Point, Subspace, UnitDirection,
};
use serde::Serialize;

/// A boundary piece that is (V,α)-planar, witnessed by its sample points.
#[derive(Clone, Debug, Serialize)]
pub struct PlanarPiece {
    pub points: Vec<Point>,
    pub subspace: Subspace,
    pub alpha: f64,
    /// index of the sphere-cover cap that produced the piece
    pub cap_id: usize,
}

/// Decomposes sampled boundary points of a convex body into planar pieces by
/// clustering outward normals into spherical caps of radius α/3.
///
/// Buckets use the first matching cap (deterministic cap order); each
/// nonempty bucket with cap center θ̃ forms a piece with V = θ̃⊥, and every
/// piece is verified (V,α)-planar before returning. The piece count is at
/// most the sphere-cover size.
pub fn decompose_boundary(
    body: &ConvexBody,
    alpha: f64,
    samples: usize,
) -> Result<Vec<PlanarPiece>> {
    let n = body.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::input("decompose_boundary: ambient dimension must be 2 or 3"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::input("decompose_boundary: alpha must lie in (0,1)"));
    }
    let caps = sphere_cover(n, alpha / 3.0, 0)?;
    let boundary = body.sample_boundary(samples)?;
    decompose_samples(&boundary, &caps, alpha)
}

/// Bucket-and-verify on explicit (point, outward normal) samples.
pub(crate) fn decompose_samples(
    boundary: &[(Point, UnitDirection)],
    caps: &[UnitDirection],
    alpha: f64,
) -> Result<Vec<PlanarPiece>> {
    let mut buckets: Vec<Vec<Point>> = vec![Vec::new(); caps.len()];
    for (q, normal) in boundary {
        let mut assigned = usize::MAX;
        for (ci, cap) in caps.iter().enumerate() {
            if norm(&sub(normal.coords(), cap.coords())) <= alpha / 3.0 {
                assigned = ci;
                break;
            }
        }
        if assigned == usize::MAX {
            // the cover is verified, so this is float noise at a cap rim;
            // fall back to the nearest cap
            let mut best = 0usize;
            let mut bd = f64::INFINITY;
            for (ci, cap) in caps.iter().enumerate() {
                let d = norm(&sub(normal.coords(), cap.coords()));
                if d < bd {
                    bd = d;
                    best = ci;
                }
            }
            assigned = best;
        }
        buckets[assigned].push(q.clone());
    }

    let mut pieces = Vec::new();
    for (ci, bucket) in buckets.into_iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        let cap_span = Subspace::new(
            caps[0].dim(),
            vec![caps[ci].coords().to_vec()],
        )?;
        let v = orthogonal_complement(&cap_span);
        if !is_planar(&bucket, &v, alpha)? {
            return Err(Error::Verification(format!(
                "decomposition piece from cap {ci} failed the (V,alpha)-planarity check"
            )));
        }
        pieces.push(PlanarPiece {
            points: bucket,
            subspace: v,
            alpha,
            cap_id: ci,
        });
    }
    Ok(pieces)
}
