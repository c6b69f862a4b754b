//! Exact lattice counts against their main terms.

use serde::{Deserialize, Serialize};

use crate::arith::isqrt;
use crate::error::{MarkoffError, Result};

/// Number of `a <= m <= n` with `a^2 + m^2 + n^2 + a m n <= K`.
pub fn count_na(a: u64, k_max: u64) -> u64 {
    let (a, kk) = (a as u128, k_max as u128);
    let f = |m: u128, n: u128| a * a + m * m + n * n + a * m * n;
    let mut total = 0u64;
    let mut m = a;
    while f(m, m) <= kk {
        // largest n with f(m, n) <= K
        let b = a * m;
        let c = a * a + m * m;
        let disc = b * b + 4 * (kk - c);
        let mut n = (isqrt(disc) - b) / 2;
        while f(m, n + 1) <= kk {
            n += 1;
        }
        while f(m, n) > kk {
            n -= 1;
        }
        total += (n + 1 - m) as u64;
        m += 1;
    }
    total
}

/// Main term `log((√(a-2) + √(a+2))/2) (K - a^2) / √(a^2 - 4)`.
pub fn na_main_term(a: u64, k_max: u64) -> f64 {
    let a = a as f64;
    let k = k_max as f64;
    (((a - 2.0).sqrt() + (a + 2.0).sqrt()) / 2.0).ln() * (k - a * a) / (a * a - 4.0).sqrt()
}

/// Points `3 <= x1 <= x2 <= x3` with `x1^2 + x2^2 + x3^2 + x1 x2 x3 <= K`.
pub fn count_r_plus(k_max: u64) -> u64 {
    let mut a = 3u64;
    let mut total = 0;
    while a * a * a + 3 * a * a <= k_max {
        total += count_na(a, k_max);
        a += 1;
    }
    total
}

/// Points `3 <= x1 <= x2 <= x3 <= x1 x2 / 2` with `1 <= x1 x2 x3 - x1^2 - x2^2 - x3^2 <= K`.
pub fn count_r_minus(k_max: u64) -> u64 {
    let kk = k_max as i128;
    let g = |u1: i128, u2: i128, t: i128| u1 * u2 * t - u1 * u1 - u2 * u2 - t * t;
    let mut total = 0u64;
    let mut u1: i128 = 3;
    while u1 * u1 * u1 - 3 * u1 * u1 <= kk {
        let mut u2 = u1;
        while (u1 - 2) * u2 * u2 - u1 * u1 <= kk {
            let b = u1 * u2;
            let top = b / 2;
            // g is increasing on [u2, b/2]; locate g >= 1 and g <= K by bisection
            let first = partition(u2, top + 1, |t| g(u1, u2, t) < 1);
            let past = partition(u2, top + 1, |t| g(u1, u2, t) <= kk);
            if past > first {
                total += (past - first) as u64;
            }
            u2 += 1;
        }
        u1 += 1;
    }
    total
}

/// First `t` in `[lo, hi)` where `pred` fails, for `pred` true then false.
fn partition(mut lo: i128, mut hi: i128, pred: impl Fn(i128) -> bool) -> i128 {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaRow {
    pub a: u64,
    pub exact: u64,
    pub main: f64,
    pub residual: f64,
    /// `residual / √K`
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub k_max: u64,
    pub rows: Vec<NaRow>,
    pub r_plus: u64,
    /// `K (log K)^2 / 36`
    pub r_plus_main: f64,
    pub r_minus: u64,
    /// `K (log K)^2 / 48`
    pub r_minus_main: f64,
}

pub fn exact_counts_vs_asymptotics(k_max: u64, samples: &[u64]) -> Result<AsymptoticsReport> {
    if k_max < 1000 {
        return Err(MarkoffError::ConfigViolation(format!("K = {k_max} is below 1000")));
    }
    let sk = (k_max as f64).sqrt();
    let mut rows = Vec::new();
    for &a in samples {
        if a < 3 || a * a > k_max {
            return Err(MarkoffError::ConfigViolation(format!("sample a = {a} outside [3, √K]")));
        }
        let exact = count_na(a, k_max);
        let main = na_main_term(a, k_max);
        let residual = exact as f64 - main;
        rows.push(NaRow { a, exact, main, residual, c: residual / sk });
    }
    let lk = (k_max as f64).ln();
    Ok(AsymptoticsReport {
        k_max,
        rows,
        r_plus: count_r_plus(k_max),
        r_plus_main: k_max as f64 * lk * lk / 36.0,
        r_minus: count_r_minus(k_max),
        r_minus_main: k_max as f64 * lk * lk / 48.0,
    })
}
