//! Sector counts `r_a(k)`, their sum `b_A(k)` over `a` in `[√A, A]`, and the
//! variance of `b_A` against the local-density prediction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::isqrt;
use crate::error::{MarkoffError, Result};
use crate::local::{delta_truncated, to_f64};

/// Largest `K` for the sector experiment.
pub const SECTOR_LIMIT: u64 = 10_000_000;
/// Smallest prime cutoff used for the truncated density.
pub const CUTOFF_FLOOR: u64 = 13;

/// Sector volume constant `(1/4) log(3/2)`.
pub fn sector_constant() -> f64 {
    0.25 * 1.5f64.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceConfig {
    pub k_max: u64,
    /// The secondary parameter `A`.
    pub a_param: u64,
    /// `⌈√A⌉`
    pub a_lo: u64,
    pub a_hi: u64,
    /// `Φ(A) = log log A`
    pub phi: f64,
    /// Prime cutoff `L`, floored at 13.
    pub cutoff: u64,
    /// Exponent `B = log log A / Φ(A)^2`.
    pub b_exp: f64,
}

impl VarianceConfig {
    /// Checks `(log K)^2 < A <= √K` and `K <= 10^7`.
    pub fn new(k_max: u64, a_param: u64) -> Result<Self> {
        let lk = (k_max as f64).ln();
        if (a_param as f64) <= lk * lk {
            return Err(MarkoffError::ConfigViolation(format!("A = {a_param} must exceed (log K)^2 = {:.2}", lk * lk)));
        }
        if a_param * a_param > k_max {
            return Err(MarkoffError::ConfigViolation(format!("A = {a_param} must be at most √K")));
        }
        Self::unchecked(k_max, a_param)
    }

    /// Same parameters without the `(log K)^2 < A <= √K` window, for trend runs.
    pub fn unchecked(k_max: u64, a_param: u64) -> Result<Self> {
        if k_max > SECTOR_LIMIT {
            return Err(MarkoffError::ConfigViolation(format!("K = {k_max} exceeds {SECTOR_LIMIT}")));
        }
        if a_param < 9 {
            return Err(MarkoffError::ConfigViolation("A must be at least 9 so that a >= 3".into()));
        }
        let la = (a_param as f64).ln();
        let phi = la.ln();
        let cutoff = ((la / la.ln() * phi).floor() as u64).max(CUTOFF_FLOOR);
        let r = isqrt(a_param as u128) as u64;
        let a_lo = if r * r == a_param { r } else { r + 1 };
        Ok(VarianceConfig { k_max, a_param, a_lo, a_hi: a_param, phi, cutoff, b_exp: la.ln() / (phi * phi) })
    }
}

/// Adds `r_a(k)` into `out[k]` for `k <= K`.
fn add_sector(a: u64, k_max: u64, out: &mut [u32]) {
    let (a, kk) = (a as u128, k_max as u128);
    if a * a > kk {
        return;
    }
    let room = kk - a * a;
    let d = a * a - 4;
    let g = |x1: u128, x2: u128| x1 * x1 + x2 * x2 + a * x1 * x2;
    // x2 = 0 forces x1 = 0
    out[(a * a) as usize] += 1;
    let mut x2: u128 = 1;
    loop {
        // 2 x1 + a x2 >= 2√d x2 and 2 x1 + a x2 <= 3√d x2
        let lo_sq = 4 * d * x2 * x2;
        let mut s_lo = isqrt(lo_sq);
        if s_lo * s_lo < lo_sq {
            s_lo += 1;
        }
        let s_hi = isqrt(9 * d * x2 * x2);
        let x1_lo = (s_lo - a * x2).div_ceil(2);
        let x1_hi = (s_hi - a * x2) / 2;
        if g(x1_lo, x2) > room {
            break;
        }
        let mut x1 = x1_lo;
        while x1 <= x1_hi {
            let v = g(x1, x2);
            if v > room {
                break;
            }
            out[(v + a * a) as usize] += 1;
            x1 += 1;
        }
        x2 += 1;
    }
}

/// `b_A(k)` for `0 <= k <= K`, with `a` ranging over `[a_lo, a_hi]`.
pub fn sector_counts(k_max: u64, a_lo: u64, a_hi: u64) -> Result<Vec<u32>> {
    if k_max > SECTOR_LIMIT {
        return Err(MarkoffError::ConfigViolation(format!("K = {k_max} exceeds {SECTOR_LIMIT}")));
    }
    if a_lo < 3 {
        return Err(MarkoffError::ConfigViolation("a must be at least 3".into()));
    }
    let mut out = vec![0u32; k_max as usize + 1];
    for a in a_lo..=a_hi {
        add_sector(a, k_max, &mut out);
    }
    Ok(out)
}

/// `r_a(k)` for a single `a` and `k`.
pub fn sector_count_at(k_max: u64, a: u64, k: u64) -> Result<u32> {
    Ok(sector_counts(k_max, a, a)?.get(k as usize).copied().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub config: VarianceConfig,
    /// `Σ_{k <= K} b_A(k)`
    pub total: u64,
    /// `C K log A`
    pub main_term: f64,
    /// `total / main_term`
    pub ratio: f64,
    /// `Σ b_A(k) / (K log A)`
    pub mean_normalized: f64,
    /// `(1/K) Σ_k (b_A(k) - C log A δ(k))^2`, level 4 omitted
    pub variance: f64,
    /// `variance / (log A)^2`
    pub variance_over_log2: f64,
}

/// Only the mean value, without the density pass.
pub fn sector_mean(cfg: &VarianceConfig) -> Result<(u64, f64)> {
    let b = sector_counts(cfg.k_max, cfg.a_lo, cfg.a_hi)?;
    let total: u64 = b[1..].iter().map(|&x| x as u64).sum();
    let main = sector_constant() * cfg.k_max as f64 * (cfg.a_param as f64).ln();
    Ok((total, main))
}

/// `δ^(m)(k)` as floats for `1 <= k <= K` (index `k - 1`); NaN at level 4.
pub fn truncated_densities(k_max: u64, cutoff: u64) -> Result<Vec<f64>> {
    (1..=k_max as i64)
        .into_par_iter()
        .map(|k| {
            if k == 4 {
                return Ok(f64::NAN);
            }
            Ok(to_f64(&delta_truncated(k, cutoff)?.truncated_product))
        })
        .collect()
}

pub fn variance_experiment(cfg: &VarianceConfig) -> Result<VarianceReport> {
    let dens = truncated_densities(cfg.k_max, cfg.cutoff)?;
    variance_with_densities(cfg, &dens)
}

/// [`variance_experiment`] with densities from [`truncated_densities`], so
/// several `A` can share one density pass.
pub fn variance_with_densities(cfg: &VarianceConfig, dens: &[f64]) -> Result<VarianceReport> {
    if dens.len() as u64 != cfg.k_max {
        return Err(MarkoffError::ConfigViolation("density table does not match K".into()));
    }
    let b = sector_counts(cfg.k_max, cfg.a_lo, cfg.a_hi)?;
    let la = (cfg.a_param as f64).ln();
    let scale = sector_constant() * la;
    let mut sq = 0.0;
    for (i, d) in dens.iter().enumerate() {
        if d.is_nan() {
            continue;
        }
        let e = b[i + 1] as f64 - scale * d;
        sq += e * e;
    }
    let total: u64 = b[1..].iter().map(|&x| x as u64).sum();
    let k = cfg.k_max as f64;
    let main_term = scale * k;
    let variance = sq / k;
    Ok(VarianceReport {
        config: cfg.clone(),
        total,
        main_term,
        ratio: total as f64 / main_term,
        mean_normalized: total as f64 / (k * la),
        variance,
        variance_over_log2: variance / (la * la),
    })
}
