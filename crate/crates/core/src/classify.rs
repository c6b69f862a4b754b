//! Per-level classification: congruence obstructions, exceptional levels,
//! class numbers and Hasse failures, one level at a time or sieved over a range.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{exact_sqrt, isqrt};
use crate::error::{MarkoffError, Result};
use crate::point::{enumerate_fundamental, evaluate, special_reps, Triple};

/// Default memory budget for range classification (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Environment variable overriding [`DEFAULT_MEMORY_BUDGET`], in bytes.
pub const MEMORY_BUDGET_ENV: &str = "MARKOFF_MEMORY_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Obstruction {
    Mod4,
    Mod9,
}

/// `None` when admissible, otherwise the congruence that rules the level out
/// (mod 4 is reported first when both apply).
pub fn is_admissible(k: i64) -> Option<Obstruction> {
    if k.rem_euclid(4) == 3 {
        Some(Obstruction::Mod4)
    } else if matches!(k.rem_euclid(9), 3 | 6) {
        Some(Obstruction::Mod9)
    } else {
        None
    }
}

/// Solutions of the three representation problems that make a level exceptional.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    /// `k = u^2 + v^2`
    pub sum_two_squares: Option<(u64, u64)>,
    /// `4(k-1) = u^2 + 3v^2`
    pub four_k_minus_1: Option<(u64, u64)>,
    /// `k - 4 = u^2`
    pub k_minus_4_square: Option<u64>,
}

impl Witnesses {
    pub fn any(&self) -> bool {
        self.sum_two_squares.is_some() || self.four_k_minus_1.is_some() || self.k_minus_4_square.is_some()
    }

    /// Points on the level with a coordinate in `{0, 1, 2}`, one per witness.
    pub fn points(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        if let Some((u, v)) = self.sum_two_squares {
            out.push(Triple::new(0, u as i128, v as i128));
        }
        if let Some((u, v)) = self.four_k_minus_1 {
            out.push(Triple::new(1, (u as i128 + v as i128) / 2, v as i128));
        }
        if let Some(w) = self.k_minus_4_square {
            out.push(Triple::new(2, 0, w as i128));
        }
        out
    }

    pub fn labels(&self) -> Vec<&'static str> {
        shape_labels(self.bits())
    }

    /// Same bit layout as [`exceptional_sieve`].
    pub fn bits(&self) -> u8 {
        self.sum_two_squares.is_some() as u8
            | (self.four_k_minus_1.is_some() as u8) << 1
            | (self.k_minus_4_square.is_some() as u8) << 2
    }
}

/// Names of the exceptional shapes, indexed by sieve bit.
pub const SHAPE_LABELS: [&str; 3] = ["SumTwoSquares", "FourKminus1Form", "KMinus4Square"];

pub fn shape_labels(bits: u8) -> Vec<&'static str> {
    (0..3).filter(|i| bits & (1 << i) != 0).map(|i| SHAPE_LABELS[i]).collect()
}

/// Direct O(sqrt k) search for the three representations. Negative levels
/// have none.
pub fn is_exceptional(k: i64) -> Witnesses {
    let mut w = Witnesses::default();
    if k < 0 {
        return w;
    }
    let k = k as i128;
    let mut u: i128 = 0;
    while 2 * u * u <= k {
        if let Some(v) = exact_sqrt(k - u * u) {
            w.sum_two_squares = Some((u as u64, v as u64));
            break;
        }
        u += 1;
    }
    if k >= 1 {
        let n = 4 * (k - 1);
        let mut v: i128 = 0;
        while 3 * v * v <= n {
            if let Some(u) = exact_sqrt(n - 3 * v * v) {
                w.four_k_minus_1 = Some((u as u64, v as u64));
                break;
            }
            v += 1;
        }
    }
    w.k_minus_4_square = exact_sqrt(k - 4).map(|r| r as u64);
    w
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NonAdmissible(Obstruction),
    Exceptional(Witnesses),
    Generic,
    /// Levels 0, 1, 2 and 4, settled by hand.
    Special,
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::NonAdmissible(o) => format!("NonAdmissible({o:?})"),
            Verdict::Exceptional(w) => format!("Exceptional({})", w.labels().join("+")),
            Verdict::Generic => "Generic".into(),
            Verdict::Special => "Special".into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub k: i64,
    pub verdict: Verdict,
    /// Class number; present for generic, negative admissible and the finite special levels.
    pub h: Option<u64>,
    /// Plus-box count for exceptional levels; misses orbits through small coordinates.
    pub h_plus: Option<u64>,
    pub hasse_failure: bool,
    pub reps: Vec<Triple>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Bound on `a` for the Cayley representatives `(2,a,a)` at k = 4.
    pub cayley_bound: Option<u64>,
}

pub fn classify(k: i64) -> Result<ClassificationRecord> {
    classify_with(k, &ClassifyOptions::default())
}

pub fn classify_with(k: i64, opts: &ClassifyOptions) -> Result<ClassificationRecord> {
    if let Some(o) = is_admissible(k) {
        return Ok(record(k, Verdict::NonAdmissible(o), None, None, Vec::new()));
    }
    if (0..=4).contains(&k) {
        let fs = enumerate_fundamental(k, opts.cayley_bound)?;
        let h = (k != 4).then_some(fs.reps.len() as u64);
        return Ok(record(k, Verdict::Special, h, None, fs.reps));
    }
    let reps = enumerate_fundamental(k, None)?.reps;
    let n = reps.len() as u64;
    if k >= 5 {
        let w = is_exceptional(k);
        if w.any() {
            return Ok(record(k, Verdict::Exceptional(w), None, Some(n), reps));
        }
    }
    Ok(record(k, Verdict::Generic, Some(n), None, reps))
}

fn record(k: i64, verdict: Verdict, h: Option<u64>, h_plus: Option<u64>, reps: Vec<Triple>) -> ClassificationRecord {
    let hasse_failure = verdict == Verdict::Generic && h == Some(0);
    ClassificationRecord { k, verdict, h, h_plus, hasse_failure, reps }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZariskiFlag {
    Empty,
    FiniteOrbitOnly,
    ZariskiDense,
}

/// Whether the integral points are empty, a single finite orbit, or dense.
///
/// A finite orbit can only be the orbit of `(0,0,s)` on a square level `s^2`.
/// Every orbit descends to a plus-box point or to a point with a
/// coordinate in `{0, ±1, ±2}`, so the level is `FiniteOrbitOnly` exactly
/// when the plus box is empty and every small-coordinate point is a signed
/// permutation of `(0,0,s)`.
pub fn zariski_flag(k: i64, rec: &ClassificationRecord) -> ZariskiFlag {
    match &rec.verdict {
        Verdict::NonAdmissible(_) => return ZariskiFlag::Empty,
        Verdict::Generic if rec.h == Some(0) => return ZariskiFlag::Empty,
        _ => {}
    }
    let s = match exact_sqrt(k as i128) {
        Some(s) if k >= 1 && k != 4 => s as i128,
        _ => return ZariskiFlag::ZariskiDense,
    };
    if k >= 5 && rec.h_plus.unwrap_or(0) + rec.h.unwrap_or(0) > 0 {
        return ZariskiFlag::ZariskiDense;
    }
    let trivial = |p: &Triple| {
        let mut a: Vec<i128> = p.0.iter().map(|x| x.abs()).collect();
        a.sort();
        a == [0, 0, s]
    };
    if small_coordinate_points(k).iter().all(trivial) {
        ZariskiFlag::FiniteOrbitOnly
    } else {
        ZariskiFlag::ZariskiDense
    }
}

/// All points with `x1` in `{0, ±1, ±2}` on a level that is not `4 + w^2`
/// (where `x1 = ±2` would give a whole line).
fn small_coordinate_points(k: i64) -> Vec<Triple> {
    let k = k as i128;
    let mut out = Vec::new();
    for x1 in -2i128..=2 {
        // x2^2 + x3^2 - x1 x2 x3 = k - x1^2; bounded for |x1| <= 1
        if x1.abs() == 2 {
            if exact_sqrt(k - 4).is_some() {
                panic!("level 4 + w^2 carries a line");
            }
            continue;
        }
        let rhs = k - x1 * x1;
        if rhs < 0 {
            continue;
        }
        let b = isqrt((4 * rhs) as u128) as i128 + 1;
        for x2 in -b..=b {
            // x3^2 - x1 x2 x3 + (x2^2 - rhs) = 0
            let disc = x1 * x1 * x2 * x2 - 4 * (x2 * x2 - rhs);
            if let Some(r) = exact_sqrt(disc) {
                let r = r as i128;
                for num in [x1 * x2 + r, x1 * x2 - r] {
                    if num % 2 == 0 {
                        let p = Triple::new(x1, x2, num / 2);
                        debug_assert_eq!(evaluate(&p).unwrap(), k);
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Memory budget from the environment, falling back to the default.
pub fn memory_budget() -> u64 {
    std::env::var(MEMORY_BUDGET_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_MEMORY_BUDGET)
}

/// Marks for the three exceptional shapes on `[kmin, kmax]`, bit 0/1/2 per shape.
pub fn exceptional_sieve(kmin: u64, kmax: u64) -> Vec<u8> {
    let len = (kmax - kmin + 1) as usize;
    let mut marks = vec![0u8; len];
    let mut mark = |k: u64, bit: u8| {
        if k >= kmin && k <= kmax {
            marks[(k - kmin) as usize] |= bit;
        }
    };
    // u^2 + v^2, u <= v
    let mut u = 0u64;
    while 2 * u * u <= kmax {
        let lo = kmin.saturating_sub(u * u);
        let mut v = (isqrt(lo as u128) as u64).max(u);
        while u * u + v * v <= kmax {
            mark(u * u + v * v, 1);
            v += 1;
        }
        u += 1;
    }
    // (u^2 + 3v^2)/4 + 1 with u = v mod 2
    if kmax >= 1 {
        let nmax = 4 * (kmax - 1);
        let nmin = 4 * kmin.saturating_sub(1);
        let mut v = 0u64;
        while 3 * v * v <= nmax {
            let lo = nmin.saturating_sub(3 * v * v);
            let mut u = isqrt(lo as u128) as u64;
            if u % 2 != v % 2 {
                u = if u == 0 { 1 } else { u - 1 };
            }
            while u * u + 3 * v * v <= nmax {
                mark((u * u + 3 * v * v) / 4 + 1, 2);
                u += 2;
            }
            v += 1;
        }
    }
    // u^2 + 4
    let mut u = isqrt(kmin.saturating_sub(4) as u128) as u64;
    while u * u + 4 <= kmax {
        mark(u * u + 4, 4);
        u += 1;
    }
    marks
}

/// Batch form of [`classify_with`] over `[kmin, kmax]`, using representation
/// sieves and one lattice sweep instead of per-level searches.
pub fn sieve_classify_range(kmin: u64, kmax: u64, opts: &ClassifyOptions) -> Result<Vec<ClassificationRecord>> {
    sieve_classify_range_with_budget(kmin, kmax, opts, memory_budget())
}

pub fn sieve_classify_range_with_budget(
    kmin: u64,
    kmax: u64,
    opts: &ClassifyOptions,
    budget: u64,
) -> Result<Vec<ClassificationRecord>> {
    if kmin > kmax {
        return Ok(Vec::new());
    }
    let len = kmax - kmin + 1;
    let needed = len.saturating_mul(std::mem::size_of::<ClassificationRecord>() as u64 + 64);
    if needed > budget {
        return Err(MarkoffError::RangeTooLarge { needed, budget });
    }
    let marks = exceptional_sieve(kmin, kmax);
    let reps = crate::scan::sweep_reps_range(kmin.max(5), kmax);
    let mut out = Vec::with_capacity(len as usize);
    for k in kmin..=kmax {
        let ki = k as i64;
        if let Some(o) = is_admissible(ki) {
            out.push(record(ki, Verdict::NonAdmissible(o), None, None, Vec::new()));
            continue;
        }
        if k <= 4 {
            let r = if k == 4 {
                crate::point::cayley_reps(opts.cayley_bound.unwrap_or(0))
            } else {
                special_reps(ki).unwrap()
            };
            let h = (k != 4).then_some(r.len() as u64);
            let r = if k == 4 && opts.cayley_bound.is_none() { Vec::new() } else { r };
            out.push(record(ki, Verdict::Special, h, None, r));
            continue;
        }
        let r = reps.get(&k).cloned().unwrap_or_default();
        let n = r.len() as u64;
        let m = marks[(k - kmin) as usize];
        if m != 0 {
            // the sieve says which shapes occur; witnesses come from the direct search
            let w = is_exceptional(ki);
            debug_assert_eq!(m & 1 != 0, w.sum_two_squares.is_some());
            debug_assert_eq!(m & 2 != 0, w.four_k_minus_1.is_some());
            debug_assert_eq!(m & 4 != 0, w.k_minus_4_square.is_some());
            out.push(record(ki, Verdict::Exceptional(w), None, Some(n), r));
        } else {
            out.push(record(ki, Verdict::Generic, Some(n), None, r));
        }
    }
    Ok(out)
}
