use crate::dimension::const_cprime;
use crate::error::{Error, Result};
use crate::geometry::{
    add_scaled, dot, is_planar, norm, orthogonal_complement, sub, Point, Subspace, UnitDirection,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Verifies the half-space translation inclusion on sampled points of P(β):
/// every sampled point of H(x + c′βθ′, θ′) ∩ P(β) must lie in H(x + δθ, θ),
/// with c′ = c′(α,c) and θ′ = proj_V(θ)/|proj_V(θ)|.
///
/// Preconditions are enforced: P is (V,α)-planar, 0 < δ ≤ β,
/// |proj_V(θ)| ≥ c, α < sin(π/2 − arccos c), and x ∈ P(β).
#[allow(clippy::too_many_arguments)]
pub fn check_translation_lemma(
    planar_points: &[Point],
    v: &Subspace,
    alpha: f64,
    beta: f64,
    delta: f64,
    c: f64,
    x: &Point,
    theta: &UnitDirection,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let n = v.ambient_dim();
    if planar_points.is_empty() {
        return Err(Error::input("translation lemma: P must be nonempty"));
    }
    if x.dim() != n || theta.dim() != n {
        return Err(Error::input("translation lemma: dimension mismatch"));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::input("translation lemma: c must lie in (0,1)"));
    }
    let alpha_limit = (std::f64::consts::FRAC_PI_2 - c.acos()).sin();
    if !(alpha > 0.0 && alpha < alpha_limit) {
        return Err(Error::input(format!(
            "translation lemma: alpha {alpha} outside (0, sin(π/2 − arccos c) = {alpha_limit})"
        )));
    }
    if !(delta > 0.0 && delta <= beta) {
        return Err(Error::input("translation lemma: need 0 < delta ≤ beta"));
    }
    if !is_planar(planar_points, v, alpha)? {
        return Err(Error::input("translation lemma: P is not (V,alpha)-planar"));
    }
    let proj_theta = v.project_vec(theta.coords());
    let proj_len = norm(&proj_theta);
    if proj_len < c - 1e-12 {
        return Err(Error::input(format!(
            "translation lemma: |proj_V(theta)| = {proj_len} below c = {c}"
        )));
    }
    let dist_to_p = planar_points
        .iter()
        .map(|p| p.dist(x))
        .fold(f64::INFINITY, f64::min);
    if dist_to_p > beta + 1e-9 {
        return Err(Error::input("translation lemma: x is not in P(beta)"));
    }
    if trials == 0 {
        return Err(Error::input("translation lemma: trials must be ≥ 1"));
    }

    let cprime = const_cprime(alpha, c)?;
    let theta_prime: Vec<f64> = proj_theta.iter().map(|t| t / proj_len).collect();
    let tilted_anchor = add_scaled(x.coords(), cprime * beta, &theta_prime);
    let straight_anchor = add_scaled(x.coords(), delta, theta.coords());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let base = &planar_points[rng.gen_range(0..planar_points.len())];
        let q = add_scaled(base.coords(), 1.0, &random_ball_offset(&mut rng, n, beta));
        let in_tilted = dot(&sub(&q, &tilted_anchor), &theta_prime) > 0.0;
        if in_tilted {
            let in_straight = dot(&sub(&q, &straight_anchor), theta.coords()) > 0.0;
            if !in_straight {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn random_ball_offset(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if dot(&v, &v) <= 1.0 {
            return v.into_iter().map(|c| c * radius).collect();
        }
    }
}

/// A randomized precondition-satisfying instance for the campaign: a sampled
/// Lipschitz graph over a random subspace plus admissible (α, c, β, δ, x, θ).
#[derive(Clone, Debug)]
pub struct TranslationInstance {
    pub points: Vec<Point>,
    pub v: Subspace,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub c: f64,
    pub x: Point,
    pub theta: UnitDirection,
}

impl TranslationInstance {
    /// Draws an instance in ambient dimension n ∈ {2, 3}.
    ///
    /// P is the graph of a random function over V with Lipschitz constant
    /// strictly below α/√(1−α²), hence (V,α)-planar; θ is constructed with
    /// |proj_V(θ)| ≥ c, and x is drawn from P(β).
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = if n == 2 { 1 } else { rng.gen_range(1..n) };

        // random orthonormal basis for V
        let v = loop {
            let mut basis: Vec<Vec<f64>> = Vec::new();
            let mut ok = true;
            for _ in 0..m {
                let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for b in &basis {
                    let cproj = dot(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= cproj * bi;
                    }
                }
                let r = norm(&w);
                if r < 1e-3 {
                    ok = false;
                    break;
                }
                basis.push(w.into_iter().map(|c| c / r).collect());
            }
            if ok {
                break Subspace::new(n, basis)?;
            }
        };
        let vperp = orthogonal_complement(&v);

        let c: f64 = rng.gen_range(0.15..0.95);
        let alpha_limit = (std::f64::consts::FRAC_PI_2 - c.acos()).sin();
        let alpha = rng.gen_range(0.02..alpha_limit * 0.9);
        let lip = alpha / (1.0 - alpha * alpha).sqrt() * 0.95;

        // Lipschitz graph: height field is a sum of slope-bounded ridge
        // functions |a_j|·tanh(w_j·u + b_j) with Σ|a_j||w_j| ≤ lip
        let ridges = 3usize;
        let mut ridge_w: Vec<Vec<f64>> = Vec::new();
        let mut ridge_b: Vec<f64> = Vec::new();
        let mut ridge_a: Vec<Vec<f64>> = Vec::new();
        let mut budget = lip;
        for j in 0..ridges {
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let wn = norm(&w).max(1e-9);
            let share = if j + 1 == ridges { budget } else { rng.gen_range(0.0..budget) };
            budget -= share;
            let dir: Vec<f64> = (0..(n - m)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dn = norm(&dir).max(1e-9);
            ridge_w.push(w.iter().map(|c| c / wn).collect());
            ridge_b.push(rng.gen_range(-0.5..0.5));
            ridge_a.push(dir.iter().map(|c| c / dn * share).collect());
        }
        let height = |u: &[f64]| -> Vec<f64> {
            let mut h = vec![0.0; n - m];
            for j in 0..ridges {
                let s = (dot(u, &ridge_w[j]) + ridge_b[j]).tanh();
                for (hi, ai) in h.iter_mut().zip(&ridge_a[j]) {
                    *hi += ai * s;
                }
            }
            h
        };

        let count = rng.gen_range(12..30);
        let mut points = Vec::with_capacity(count);
        for _ in 0..count {
            let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let h = height(&u);
            let mut p = v.embed(&u);
            let lift = vperp.embed(&h);
            for (pi, li) in p.iter_mut().zip(&lift) {
                *pi += li;
            }
            points.push(Point::new(p)?);
        }

        let beta = rng.gen_range(0.02..0.5);
        let delta = rng.gen_range(1e-6..beta);

        // theta with |proj_V(theta)| ≥ c: mix a unit vector of V with one of V⊥
        let cv = rng.gen_range(c.min(0.999)..1.0);
        let tv = random_unit_in(&mut rng, &v);
        let theta = if n - m > 0 {
            let tp = random_unit_in(&mut rng, &vperp);
            let s = (1.0 - cv * cv).sqrt();
            let mixed: Vec<f64> = tv.iter().zip(&tp).map(|(a, b)| cv * a + s * b).collect();
            UnitDirection::normalize(&mixed)?
        } else {
            UnitDirection::normalize(&tv)?
        };

        let base = points[rng.gen_range(0..count)].clone();
        let x = Point::new(add_scaled(
            base.coords(),
            1.0,
            &random_ball_offset(&mut rng, n, beta * 0.999),
        ))?;

        Ok(TranslationInstance {
            points,
            v,
            alpha,
            beta,
            delta,
            c,
            x,
            theta,
        })
    }

    pub fn check(&self, trials: usize, seed: u64) -> Result<bool> {
        check_translation_lemma(
            &self.points,
            &self.v,
            self.alpha,
            self.beta,
            self.delta,
            self.c,
            &self.x,
            &self.theta,
            trials,
            seed,
        )
    }
}

fn random_unit_in(rng: &mut ChaCha8Rng, v: &Subspace) -> Vec<f64> {
    if v.dim() == 0 {
        return vec![0.0; v.ambient_dim()];
    }
    loop {
        let u: Vec<f64> = (0..v.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&u);
        if r > 1e-6 {
            let unit: Vec<f64> = u.iter().map(|c| c / r).collect();
            return v.embed(&unit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_case_holds_trivially() {
        // P along V = span{e1}, theta in V, delta = beta: c' > 1 pushes the
        // tilted half-space deeper than the straight one
        let v = Subspace::axis_span(2, 1).unwrap();
        let points: Vec<Point> = (0..9)
            .map(|i| Point::new(vec![i as f64 / 4.0 - 1.0, 0.0]).unwrap())
            .collect();
        let theta = UnitDirection::new(vec![1.0, 0.0]).unwrap();
        let x = Point::new(vec![0.05, 0.1]).unwrap();
        let ok = check_translation_lemma(
            &points, &v, 0.2, 0.3, 0.3, 0.9, &x, &theta, 4000, 7,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn precondition_violations_are_input_errors() {
        let v = Subspace::axis_span(2, 1).unwrap();
        let points = vec![Point::new(vec![0.0, 0.0]).unwrap()];
        let theta_perp = UnitDirection::new(vec![0.0, 1.0]).unwrap();
        let x = Point::new(vec![0.0, 0.1]).unwrap();
        // |proj_V theta| = 0 < c
        assert!(check_translation_lemma(
            &points, &v, 0.2, 0.3, 0.2, 0.9, &x, &theta_perp, 10, 0
        )
        .is_err());
        // delta > beta
        let theta = UnitDirection::new(vec![1.0, 0.0]).unwrap();
        assert!(
            check_translation_lemma(&points, &v, 0.2, 0.3, 0.4, 0.9, &x, &theta, 10, 0).is_err()
        );
        // alpha ≥ limit
        assert!(
            check_translation_lemma(&points, &v, 0.95, 0.3, 0.2, 0.9, &x, &theta, 10, 0).is_err()
        );
        // x far from P
        let far = Point::new(vec![5.0, 5.0]).unwrap();
        assert!(
            check_translation_lemma(&points, &v, 0.2, 0.3, 0.2, 0.9, &far, &theta, 10, 0).is_err()
        );
    }

    #[test]
    fn random_instances_hold() {
        for seed in 0..300 {
            let n = if seed % 2 == 0 { 2 } else { 3 };
            let inst = TranslationInstance::random(n, seed).unwrap();
            assert!(
                inst.check(20, seed ^ 0xABCD).unwrap(),
                "inclusion violated for seed {seed}"
            );
        }
    }
}
