//! One pass over the fundamental-domain lattice, bucketing by level.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::isqrt;
use crate::classify::memory_budget;
use crate::error::{MarkoffError, Result};
use crate::point::Triple;

/// Largest `K` accepted by [`sweep_class_numbers`].
pub const SWEEP_LIMIT: u64 = 100_000_000;

fn plus_value(u1: u128, u2: u128, u3: u128) -> u128 {
    u1 * u1 + u2 * u2 + u3 * u3 + u1 * u2 * u3
}

/// Calls `f(k, u1, u2, u3)` for every `3 <= u1 <= u2 <= u3` with
/// `u1^2 + u2^2 + u3^2 + u1 u2 u3 = k`, `kmin <= k <= kmax`.
pub fn for_each_plus(kmin: u64, kmax: u64, mut f: impl FnMut(u64, u64, u64, u64)) {
    let (lo, hi) = (kmin as u128, kmax as u128);
    let mut u1: u128 = 3;
    while u1 * u1 * u1 + 3 * u1 * u1 <= hi {
        let mut u2 = u1;
        while plus_value(u1, u2, u2) <= hi {
            let b = u1 * u2;
            let c = u1 * u1 + u2 * u2;
            // first u3 >= u2 with value >= kmin
            let mut t = u2;
            if c + u2 * u2 + b * u2 < lo {
                let disc = b * b + 4 * (lo - c);
                t = ((isqrt(disc) - b) / 2).max(u2);
                while t > u2 && plus_value(u1, u2, t - 1) >= lo {
                    t -= 1;
                }
                while plus_value(u1, u2, t) < lo {
                    t += 1;
                }
            }
            loop {
                let v = plus_value(u1, u2, t);
                if v > hi {
                    break;
                }
                f(v as u64, u1 as u64, u2 as u64, t as u64);
                t += 1;
            }
            u2 += 1;
        }
        u1 += 1;
    }
}

/// `u1 u2 u3 - u1^2 - u2^2 - u3^2`, which is `-k` on the level `k < 0`.
fn minus_value(u1: i128, u2: i128, u3: i128) -> i128 {
    u1 * u2 * u3 - u1 * u1 - u2 * u2 - u3 * u3
}

/// Calls `f(|k|, u1, u2, u3)` for every minus-box point `3 <= u1 <= u2 <= u3 <= u1 u2 / 2`
/// on a level `k < 0` with `amin <= |k| <= amax`.
pub fn for_each_minus(amin: u64, amax: u64, mut f: impl FnMut(u64, u64, u64, u64)) {
    let amin = amin.max(1) as i128;
    let amax = amax as i128;
    if amin > amax {
        return;
    }
    let mut u1: i128 = 3;
    while u1 * u1 * u1 - 3 * u1 * u1 <= amax {
        let mut u2 = u1;
        while (u1 - 2) * u2 * u2 - u1 * u1 <= amax {
            let b = u1 * u2;
            let c = u1 * u1 + u2 * u2;
            let disc = b * b - 4 * (c + amin);
            if disc >= 0 {
                let mut t = ((b - isqrt(disc as u128) as i128) / 2).max(u2);
                while t > u2 && minus_value(u1, u2, t - 1) >= amin {
                    t -= 1;
                }
                while 2 * t <= b && minus_value(u1, u2, t) < amin {
                    t += 1;
                }
                while 2 * t <= b {
                    let v = minus_value(u1, u2, t);
                    if v > amax {
                        break;
                    }
                    f(v as u64, u1 as u64, u2 as u64, t as u64);
                    t += 1;
                }
            }
            u2 += 1;
        }
        u1 += 1;
    }
}

/// Plus-box representatives for every level in `[kmin, kmax]` that has any.
pub fn sweep_reps_range(kmin: u64, kmax: u64) -> HashMap<u64, Vec<Triple>> {
    let mut out: HashMap<u64, Vec<Triple>> = HashMap::new();
    for_each_plus(kmin, kmax, |k, a, b, c| {
        out.entry(k).or_default().push(Triple::new(a as i128, b as i128, c as i128));
    });
    out
}

/// Minus-box representatives keyed by `|k|` for `amin <= |k| <= amax`.
pub fn sweep_reps_range_negative(amin: u64, amax: u64) -> HashMap<u64, Vec<Triple>> {
    let mut out: HashMap<u64, Vec<Triple>> = HashMap::new();
    for_each_minus(amin, amax, |a, x, y, z| {
        out.entry(a).or_default().push(Triple::new(x as i128, y as i128, z as i128));
    });
    out
}

/// Plus-box counts indexed by `k - kmin`.
pub fn sweep_counts_range(kmin: u64, kmax: u64) -> Vec<u32> {
    if kmin > kmax {
        return Vec::new();
    }
    let mut out = vec![0u32; (kmax - kmin + 1) as usize];
    for_each_plus(kmin, kmax, |k, _, _, _| out[(k - kmin) as usize] += 1);
    out
}

/// Box counts for `5 <= k <= K` and `-K <= k < 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNumberSweep {
    pub k_max: u64,
    /// Indexed by `k`; entries below 5 are unused.
    pub plus: Vec<u32>,
    /// Indexed by `|k|`.
    pub minus: Vec<u32>,
}

impl ClassNumberSweep {
    /// Box count at `k`, or `None` outside the swept range and for `0 <= k <= 4`.
    pub fn get(&self, k: i64) -> Option<u64> {
        let a = k.unsigned_abs();
        if a > self.k_max || (0..5).contains(&k) {
            return None;
        }
        Some(if k > 0 { self.plus[a as usize] } else { self.minus[a as usize] } as u64)
    }

    pub fn total_plus(&self) -> u64 {
        self.plus.iter().map(|&x| x as u64).sum()
    }

    pub fn total_minus(&self) -> u64 {
        self.minus.iter().map(|&x| x as u64).sum()
    }
}

pub fn sweep_class_numbers(k_max: u64) -> Result<ClassNumberSweep> {
    sweep_class_numbers_with_budget(k_max, memory_budget())
}

pub fn sweep_class_numbers_with_budget(k_max: u64, budget: u64) -> Result<ClassNumberSweep> {
    let needed = (k_max + 1).saturating_mul(8);
    if k_max > SWEEP_LIMIT || needed > budget {
        return Err(MarkoffError::RangeTooLarge { needed, budget: budget.min(SWEEP_LIMIT * 8) });
    }
    let mut plus = vec![0u32; k_max as usize + 1];
    let mut minus = vec![0u32; k_max as usize + 1];
    for_each_plus(5, k_max, |k, _, _, _| plus[k as usize] += 1);
    for_each_minus(1, k_max, |a, _, _, _| minus[a as usize] += 1);
    Ok(ClassNumberSweep { k_max, plus, minus })
}
