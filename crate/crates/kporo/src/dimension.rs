//! Box counting, upper Minkowski dimension fits, and the closed-form
//! constants behind the dimension bound for k-porous sets.
//!
//! Box counts use origin-aligned boxes of side δ^i with δ a reciprocal of a
//! small integer dividing R, so level-i boxes are exact unions of grid cells
//! and the counts carry no rasterization ambiguity. The dimension estimate
//! realizes the limsup as a max of per-level ratios over a reported window;
//! the least-squares slope is emitted as a diagnostic only. Logs are natural
//! throughout.

use crate::error::{Error, Result};
use crate::setgen::SparseGrid;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Denominators q with δ = 1/q admitted by box_count.
pub const ALLOWED_DENOMS: [u64; 4] = [2, 3, 4, 5];

fn denom_of_delta(delta: f64) -> Result<u64> {
    for q in ALLOWED_DENOMS {
        if (delta - 1.0 / q as f64).abs() <= 1e-12 {
            return Ok(q);
        }
    }
    Err(Error::input(format!(
        "delta {delta} must be one of 1/2, 1/3, 1/4, 1/5"
    )))
}

/// Number of level-i boxes (side δ^i, origin-aligned) containing an occupied cell.
pub fn box_count(grid: &SparseGrid, delta: f64, level: u32) -> Result<u64> {
    box_count_q(grid, denom_of_delta(delta)?, level)
}

/// `box_count` with δ = 1/q given exactly.
pub fn box_count_q(grid: &SparseGrid, q: u64, level: u32) -> Result<u64> {
    if !ALLOWED_DENOMS.contains(&q) {
        return Err(Error::input(format!("denominator {q} must be one of 2,3,4,5")));
    }
    let r = grid.cells_per_axis();
    let boxes_per_axis = q
        .checked_pow(level)
        .ok_or_else(|| Error::input(format!("q^i overflows at i={level}")))?;
    if boxes_per_axis > r || r % boxes_per_axis != 0 {
        return Err(Error::input(format!(
            "delta^-i = {boxes_per_axis} must divide R = {r}"
        )));
    }
    let cells_per_box = r / boxes_per_axis;
    let n = grid.dim();
    let mut mapped: Vec<u64> = grid.flat_cells().iter().map(|&c| c / cells_per_box).collect();
    crate::setgen::grid_sort_rows(&mut mapped, n);
    let mut count = 0u64;
    let mut prev: Option<&[u64]> = None;
    for row in mapped.chunks_exact(n) {
        if prev != Some(row) {
            count += 1;
        }
        prev = Some(row);
    }
    Ok(count)
}

/// Box counts N(A, δ, i) over a contiguous range of levels.
#[derive(Clone, Debug, Serialize)]
pub struct BoxCountLadder {
    pub delta: f64,
    pub denom: u64,
    pub levels: Vec<(u32, u64)>,
}

impl BoxCountLadder {
    /// Builds counts for every admissible level i = 1..=i_max (capped by
    /// divisibility into R).
    pub fn build(grid: &SparseGrid, delta: f64, i_max: u32) -> Result<Self> {
        let q = denom_of_delta(delta)?;
        let mut levels = Vec::new();
        for i in 1..=i_max {
            match q.checked_pow(i) {
                Some(b) if b <= grid.cells_per_axis() && grid.cells_per_axis() % b == 0 => {
                    levels.push((i, box_count_q(grid, q, i)?));
                }
                _ => break,
            }
        }
        if levels.is_empty() {
            return Err(Error::input("no admissible box-count level; check divisibility"));
        }
        Ok(BoxCountLadder { delta: 1.0 / q as f64, denom: q, levels })
    }

    /// Builds counts only for the listed levels (each must divide R).
    pub fn build_levels(grid: &SparseGrid, delta: f64, levels: &[u32]) -> Result<Self> {
        let q = denom_of_delta(delta)?;
        let mut out = Vec::new();
        for &i in levels {
            out.push((i, box_count_q(grid, q, i)?));
        }
        if out.is_empty() {
            return Err(Error::input("empty level list"));
        }
        Ok(BoxCountLadder { delta: 1.0 / q as f64, denom: q, levels: out })
    }

    /// Synthesizes the ladder of a Cartesian product from factor ladders
    /// taken at the same δ and levels (counts multiply level-wise).
    pub fn product(factors: &[&BoxCountLadder]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::input("product of zero ladders"));
        }
        let q = factors[0].denom;
        if factors.iter().any(|f| f.denom != q) {
            return Err(Error::input("product ladders must share delta"));
        }
        let levels0: Vec<u32> = factors[0].levels.iter().map(|&(i, _)| i).collect();
        for f in factors {
            let li: Vec<u32> = f.levels.iter().map(|&(i, _)| i).collect();
            if li != levels0 {
                return Err(Error::input("product ladders must share levels"));
            }
        }
        let mut levels = Vec::with_capacity(levels0.len());
        for (idx, &i) in levels0.iter().enumerate() {
            let mut n: u64 = 1;
            for f in factors {
                n = n
                    .checked_mul(f.levels[idx].1)
                    .ok_or_else(|| Error::input("product count overflows u64"))?;
            }
            levels.push((i, n));
        }
        Ok(BoxCountLadder { delta: 1.0 / q as f64, denom: q, levels })
    }

    /// The ladder of the full interval factor [0,1]: N(i) = q^i exactly.
    pub fn full_axis(&self) -> BoxCountLadder {
        BoxCountLadder {
            delta: self.delta,
            denom: self.denom,
            levels: self
                .levels
                .iter()
                .map(|&(i, _)| (i, self.denom.pow(i)))
                .collect(),
        }
    }

    pub fn count_at(&self, level: u32) -> Option<u64> {
        self.levels.iter().find(|&&(i, _)| i == level).map(|&(_, n)| n)
    }
}

/// A dimension fit: per-level ratios, their max over the window, and the
/// least-squares slope diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionFit {
    pub ladder: BoxCountLadder,
    pub window: (u32, u32),
    pub dim_hat: f64,
    pub per_level: Vec<(u32, f64)>,
    pub ls_slope: f64,
}

/// dim_hat = max over the window of log N(i) / (i log(1/δ)).
pub fn dim_estimate(ladder: &BoxCountLadder, window: (u32, u32)) -> Result<DimensionFit> {
    let (lo, hi) = window;
    if lo < 2 {
        return Err(Error::input("window must start at i ≥ 2 (skip transient levels)"));
    }
    if lo > hi {
        return Err(Error::input("empty window"));
    }
    let log_inv_delta = (ladder.denom as f64).ln();
    let mut per_level = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(i, n) in &ladder.levels {
        if i < lo || i > hi {
            continue;
        }
        let ratio = (n as f64).ln() / (i as f64 * log_inv_delta);
        per_level.push((i, ratio));
        xs.push(i as f64 * log_inv_delta);
        ys.push((n as f64).ln());
    }
    if per_level.is_empty() {
        return Err(Error::input("window contains no ladder levels"));
    }
    let dim_hat = per_level.iter().map(|&(_, r)| r).fold(f64::NEG_INFINITY, f64::max);
    let ls_slope = if xs.len() >= 2 {
        least_squares_slope(&xs, &ys)
    } else {
        per_level[0].1
    };
    Ok(DimensionFit {
        ladder: ladder.clone(),
        window,
        dim_hat,
        per_level,
        ls_slope,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// t(ϱ) = 1/√(1−2ϱ), the working-scale factor.
///
/// The covering argument uses it for √2−1 < ϱ < 1/2; the closed form is
/// evaluated on all of [0, 1/2) (e.g. t(3/8) = 2).
pub fn const_t(rho: f64) -> Result<f64> {
    if !(rho >= 0.0 && rho < 0.5) {
        return Err(Error::input(format!("t(rho): rho {rho} outside [0, 1/2)")));
    }
    Ok(1.0 / (1.0 - 2.0 * rho).sqrt())
}

/// δ(ϱ) = (1−ϱ−√(ϱ²+2ϱ−1))/√(1−2ϱ); requires √2−1 ≤ ϱ < 1/2.
///
/// Satisfies 0 < δ(ϱ) < 4√(1−2ϱ) strictly inside the interval; at the left
/// boundary δ = √2 and the upper strict inequality degenerates by design.
pub fn const_delta(rho: f64) -> Result<f64> {
    if !(rho >= SQRT_2 - 1.0 - 1e-15 && rho < 0.5) {
        return Err(Error::input(format!("delta(rho): rho {rho} outside [√2−1, 1/2)")));
    }
    // the discriminant vanishes at ϱ = √2−1; clamp float residue so the
    // boundary value is √2 to machine precision
    let mut disc = rho * rho + 2.0 * rho - 1.0;
    if disc.abs() < 1e-15 {
        disc = 0.0;
    }
    Ok((1.0 - rho - disc.max(0.0).sqrt()) / (1.0 - 2.0 * rho).sqrt())
}

/// c′(α,c) of the half-space translation lemma; requires 0 < c ≤ 1 and
/// 0 < α < sin(π/2 − arccos c) = c. (c = 1 arises as 1/√k for k = 1 and the
/// formula stays finite there.)
pub fn const_cprime(alpha: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::input(format!("cprime: c {c} outside (0,1]")));
    }
    let limit = (std::f64::consts::FRAC_PI_2 - c.acos()).sin();
    if !(alpha > 0.0 && alpha < limit) {
        return Err(Error::input(format!(
            "cprime: alpha {alpha} outside (0, sin(π/2 − arccos c) = {limit})"
        )));
    }
    let gamma = c.acos() + alpha.asin();
    let denom = (std::f64::consts::FRAC_PI_2 - gamma).sin();
    if denom <= 0.0 {
        return Err(Error::input("cprime: denominator vanished"));
    }
    Ok((2.0 / gamma.sin() + 1.0) / denom)
}

/// α_m = 2^{(n−k−m+1)/2}·α for n−k ≤ m ≤ n−1.
pub fn const_alpha_m(n: usize, k: usize, m: usize, alpha: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::input(format!("alpha_m: k {k} outside 1..={n}")));
    }
    if m + k < n || m >= n {
        return Err(Error::input(format!("alpha_m: m {m} outside [n−k, n−1] = [{}, {}]", n - k, n - 1)));
    }
    let e = (n as f64 - k as f64 - m as f64 + 1.0) / 2.0;
    Ok(2.0_f64.powf(e) * alpha)
}

/// c₂ = 1 + (c₁+1)/√(1−α²).
pub fn const_c2(alpha: f64, c1: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha < 1.0) {
        return Err(Error::input(format!("c2: alpha {alpha} outside [0,1)")));
    }
    if c1 <= 0.0 {
        return Err(Error::input("c2: c1 must be positive"));
    }
    Ok(1.0 + (c1 + 1.0) / (1.0 - alpha * alpha).sqrt())
}

/// The dimension bound n − k + c/log(1/(1−2ϱ)); natural log.
pub fn bound_theorem(n: usize, k: usize, rho: f64, c: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::input(format!("bound: k {k} outside 1..={n}")));
    }
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::input(format!("bound: rho {rho} outside (0, 1/2)")));
    }
    if c <= 0.0 {
        return Err(Error::input("bound: c must be positive"));
    }
    Ok((n - k) as f64 + c / (1.0 / (1.0 - 2.0 * rho)).ln())
}

/// All closed-form constants of the covering argument for one (n, k, ϱ, α).
#[derive(Clone, Debug, Serialize)]
pub struct PaperConstants {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub alpha: f64,
    pub t: f64,
    pub delta_rho: f64,
    /// c′(α, 1/√k)
    pub c1: f64,
    pub c2: f64,
    pub alpha_m: BTreeMap<usize, f64>,
}

impl PaperConstants {
    pub fn derive(n: usize, k: usize, rho: f64, alpha: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::input(format!("constants: k {k} outside 1..={n}")));
        }
        let c = 1.0 / (k as f64).sqrt();
        if !(alpha > 0.0 && alpha < c && alpha < 1.0 / SQRT_2) {
            return Err(Error::input(format!(
                "constants: alpha {alpha} must lie in (0, min(1/√k, 1/√2)) for k = {k}"
            )));
        }
        let t = const_t(rho)?;
        let delta_rho = const_delta(rho)?;
        let c1 = const_cprime(alpha, c)?;
        let c2 = const_c2(alpha, c1)?;
        let mut alpha_m = BTreeMap::new();
        for m in (n - k)..n {
            let am = const_alpha_m(n, k, m, alpha)?;
            if am >= 1.0 {
                return Err(Error::input(format!(
                    "constants: alpha_{m} = {am} ≥ 1; lower alpha"
                )));
            }
            alpha_m.insert(m, am);
        }
        let out = PaperConstants { n, k, rho, alpha, t, delta_rho, c1, c2, alpha_m };
        for v in [out.t, out.delta_rho, out.c1, out.c2] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::input("constants: derived value not finite positive"));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setgen::{gen_cantor, gen_kplane, gen_product, CantorSpec, SparseGrid};

    #[test]
    fn box_count_examples() {
        let full = gen_kplane(1, 1, 8).unwrap();
        assert_eq!(box_count(&full, 0.5, 3).unwrap(), 8);

        let c = gen_cantor(&CantorSpec::new(1.0 / 3.0, 6).unwrap(), 729).unwrap();
        assert_eq!(box_count(&c, 1.0 / 3.0, 3).unwrap(), 8);
        for i in 1..=6 {
            assert_eq!(box_count(&c, 1.0 / 3.0, i).unwrap(), 1 << i);
        }

        let single = SparseGrid::from_cells(2, 16, vec![5, 9], "s").unwrap();
        for i in 1..=4 {
            assert_eq!(box_count(&single, 0.5, i).unwrap(), 1);
        }

        // divisibility violations
        assert!(box_count(&full, 1.0 / 3.0, 1).is_err());
        assert!(box_count(&full, 0.5, 4).is_err());
        assert!(box_count(&full, 0.37, 1).is_err());
    }

    #[test]
    fn box_count_monotone_in_level_and_set() {
        let c = gen_cantor(&CantorSpec::new(0.3, 4).unwrap(), 256).unwrap();
        let mut prev = 0;
        for i in 1..=8 {
            let n = box_count(&c, 0.5, i).unwrap();
            assert!(n >= prev);
            prev = n;
        }
        let full = gen_kplane(1, 1, 256).unwrap();
        for i in 1..=8 {
            assert!(box_count(&c, 0.5, i).unwrap() <= box_count(&full, 0.5, i).unwrap());
        }
    }

    #[test]
    fn dim_estimate_examples() {
        // N(i) = 2^i at delta = 1/2 → dim 1
        let ladder = BoxCountLadder {
            delta: 0.5,
            denom: 2,
            levels: (1..=8).map(|i| (i, 1u64 << i)).collect(),
        };
        let fit = dim_estimate(&ladder, (2, 8)).unwrap();
        assert!((fit.dim_hat - 1.0).abs() < 1e-12);
        assert!((fit.ls_slope - 1.0).abs() < 1e-12);

        // N(i) = 8^i at delta = 1/3 → log8/log3
        let ladder = BoxCountLadder {
            delta: 1.0 / 3.0,
            denom: 3,
            levels: (1..=6).map(|i| (i, 8u64.pow(i))).collect(),
        };
        let fit = dim_estimate(&ladder, (2, 6)).unwrap();
        assert!((fit.dim_hat - 8.0_f64.ln() / 3.0_f64.ln()).abs() < 1e-12);

        // constant N = 1 → dim 0
        let ladder = BoxCountLadder {
            delta: 0.5,
            denom: 2,
            levels: (1..=6).map(|i| (i, 1)).collect(),
        };
        assert_eq!(dim_estimate(&ladder, (2, 6)).unwrap().dim_hat, 0.0);

        assert!(dim_estimate(&ladder, (1, 6)).is_err());
        assert!(dim_estimate(&ladder, (4, 3)).is_err());
    }

    #[test]
    fn cantor_third_dim_exact_at_aligned_levels() {
        let c = gen_cantor(&CantorSpec::new(1.0 / 3.0, 6).unwrap(), 729).unwrap();
        let ladder = BoxCountLadder::build(&c, 1.0 / 3.0, 6).unwrap();
        let fit = dim_estimate(&ladder, (2, 6)).unwrap();
        let want = 2.0_f64.ln() / 3.0_f64.ln();
        assert!((fit.dim_hat - want).abs() < 1e-12);
        for &(_, ratio) in &fit.per_level {
            assert!((ratio - want).abs() < 1e-12);
        }
    }

    #[test]
    fn product_ladder_adds_dimensions() {
        let c = gen_cantor(&CantorSpec::new(1.0 / 3.0, 5).unwrap(), 729).unwrap();
        let full = gen_kplane(1, 1, 729).unwrap();
        let prod = gen_product(&[&c, &full]).unwrap();
        let lc = BoxCountLadder::build(&c, 1.0 / 3.0, 5).unwrap();
        let lf = BoxCountLadder::build(&full, 1.0 / 3.0, 5).unwrap();
        let lp = BoxCountLadder::build(&prod, 1.0 / 3.0, 5).unwrap();
        let synth = BoxCountLadder::product(&[&lc, &lf]).unwrap();
        assert_eq!(lp.levels, synth.levels);
        let dp = dim_estimate(&lp, (2, 5)).unwrap().dim_hat;
        let dc = dim_estimate(&lc, (2, 5)).unwrap().dim_hat;
        let df = dim_estimate(&lf, (2, 5)).unwrap().dim_hat;
        assert!((dp - (dc + df)).abs() < 1e-12);
    }

    #[test]
    fn const_t_examples() {
        assert_eq!(const_t(3.0 / 8.0).unwrap(), 2.0);
        assert!(const_t(0.49999).unwrap() > 223.0);
        // at √2−1: 1/√(3−2√2) = 1/(√2−1) = √2+1
        let at_boundary = const_t(SQRT_2 - 1.0).unwrap();
        assert!((at_boundary - (SQRT_2 + 1.0)).abs() < 1e-9);
        assert!(const_t(0.5).is_err());
        assert!(const_t(-0.1).is_err());
    }

    #[test]
    fn const_delta_examples() {
        assert!((const_delta(SQRT_2 - 1.0).unwrap() - SQRT_2).abs() < 1e-12);
        assert!((const_delta(0.45).unwrap() - 0.7268298765267793).abs() < 1e-12);
        assert!(4.0 * (1.0f64 - 0.9).sqrt() > const_delta(0.45).unwrap());
        // paper formula at 0.49 (the value, evaluated exactly)
        assert!((const_delta(0.49).unwrap() - 0.28886610097171839).abs() < 1e-12);
        assert!(const_delta(0.39).is_err());
    }

    #[test]
    fn eq_2_3_sampled() {
        let lo = SQRT_2 - 1.0 + 1e-6;
        let hi = 0.5 - 1e-6;
        for j in 0..1000 {
            let rho = lo + (hi - lo) * j as f64 / 999.0;
            let d = const_delta(rho).unwrap();
            assert!(d > 0.0, "delta({rho}) = {d} not positive");
            assert!(
                d < 4.0 * (1.0 - 2.0 * rho).sqrt(),
                "delta({rho}) = {d} violates the upper bound"
            );
        }
        assert!(const_delta(0.4999).unwrap() < 0.06);
    }

    #[test]
    fn log_condition_threshold() {
        // log(1/(4√u)) > (1/3)log(1/u) ⟺ u < 4^−6
        let check = |rho: f64| {
            let u: f64 = 1.0 - 2.0 * rho;
            (1.0 / (4.0 * u.sqrt())).ln() > (1.0 / 3.0) * (1.0 / u).ln()
        };
        let crossover = (1.0 - 4.0_f64.powi(-6)) / 2.0;
        assert!(!check(0.47), "condition must fail well below the crossover");
        assert!(!check(crossover - 1e-7));
        assert!(check(crossover + 1e-7));
        for j in 1..100 {
            let rho = crossover + (0.5 - crossover) * j as f64 / 101.0;
            assert!(check(rho), "condition fails at {rho} above the crossover");
        }
    }

    #[test]
    fn const_cprime_examples() {
        let c = 1.0 / SQRT_2;
        let limit = const_cprime(1e-9, c).unwrap();
        assert!((limit - (4.0 + SQRT_2)).abs() < 1e-6);
        let tilted = const_cprime(0.1, c).unwrap();
        assert!(tilted > limit);
        assert!(const_cprime(c, c).is_err());
        assert!(const_cprime(0.9, c).is_err());
        assert!(limit > 1.0);
    }

    #[test]
    fn const_alpha_m_examples() {
        let a = 0.2;
        assert!((const_alpha_m(3, 2, 1, a).unwrap() - SQRT_2 * a).abs() < 1e-15);
        assert!((const_alpha_m(3, 2, 2, a).unwrap() - a).abs() < 1e-15);
        assert!((const_alpha_m(2, 1, 1, a).unwrap() - SQRT_2 * a).abs() < 1e-15);
        assert!(const_alpha_m(3, 2, 0, a).is_err());
        assert!(const_alpha_m(3, 2, 3, a).is_err());
    }

    #[test]
    fn const_c2_examples() {
        assert!((const_c2(1e-300, 1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((const_c2(0.1, 4.0 + SQRT_2).unwrap() - 7.446536).abs() < 1e-5);
        assert!(const_c2(0.1, 5.0).unwrap() < const_c2(0.2, 5.0).unwrap());
        assert!(const_c2(0.1, 5.0).unwrap() < const_c2(0.1, 6.0).unwrap());
        assert!(const_c2(0.3, 2.0).unwrap() > 2.0);
    }

    #[test]
    fn bound_examples() {
        let b = bound_theorem(2, 1, 0.45, 1.0).unwrap();
        assert!((b - (1.0 + 1.0 / 10.0_f64.ln())).abs() < 1e-12);
        assert!((bound_theorem(2, 1, 0.4999995, 1.0).unwrap() - 1.0).abs() < 0.08);
        assert!(bound_theorem(2, 1, 1e-9, 1.0).unwrap() > 1e8);
        assert!(bound_theorem(2, 1, 0.5, 1.0).is_err());
    }

    #[test]
    fn derive_constants() {
        let c = PaperConstants::derive(2, 2, 0.45, 0.2).unwrap();
        assert!(c.c1 > 1.0 && c.c2 > 2.0);
        assert_eq!(c.alpha_m.len(), 2);
        assert!(PaperConstants::derive(2, 2, 0.45, 0.8).is_err());
        assert!(PaperConstants::derive(2, 1, 0.3, 0.2).is_err());
    }
}
