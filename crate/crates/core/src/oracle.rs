//! Slow, independent ground truth: exhaustive point search in boxes, orbit
//! decomposition by breadth-first search, and naive counts.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::arith::{exact_sqrt, isqrt};
use crate::error::{MarkoffError, Result};
use crate::point::{canonicalize, delta, evaluate, reduce, Move, Triple};

pub const BRUTE_BOUND_LIMIT: u64 = 5000;
pub const ORACLE_MODULUS_LIMIT: u64 = 512;

/// Box size that covers both fundamental boxes at level `k`.
pub fn default_bound(k: i64) -> u64 {
    let r = isqrt(k.unsigned_abs() as u128 + 9) as u64;
    let r = if r * r < k.unsigned_abs() + 9 { r + 1 } else { r };
    3 * r + 20
}

/// Every solution with `max |x_j| <= bound`, sorted.
pub fn brute_points(k: i64, bound: u64) -> Result<Vec<Triple>> {
    if bound > BRUTE_BOUND_LIMIT {
        return Err(MarkoffError::BoundTooLarge(bound));
    }
    let b = bound as i128;
    let k = k as i128;
    let mut out = Vec::new();
    for x1 in -b..=b {
        for x2 in -b..=b {
            // x3^2 - x1 x2 x3 + (x1^2 + x2^2 - k) = 0
            let s = x1 * x2;
            let disc = s * s - 4 * (x1 * x1 + x2 * x2 - k);
            let Some(r) = exact_sqrt(disc) else { continue };
            let r = r as i128;
            let mut roots = vec![s + r];
            if r != 0 {
                roots.push(s - r);
            }
            for num in roots {
                if num % 2 == 0 && (num / 2).abs() <= b {
                    out.push(Triple::new(x1, x2, num / 2));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Indices into [`OrbitDecomposition::points`].
    pub members: Vec<usize>,
    /// Δ-minimal point met by the search, in canonical embedding.
    pub representative: Triple,
    /// Number of points visited inside the working box.
    pub visited: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDecomposition {
    pub k: i64,
    pub bound: u64,
    pub working_box: u64,
    pub points: Vec<Triple>,
    pub orbits: Vec<Orbit>,
}

const GENERATORS: [Move; 9] = [
    Move::Permute([1, 0, 2]),
    Move::Permute([0, 2, 1]),
    Move::Permute([2, 1, 0]),
    Move::DoubleSign(0, 1),
    Move::DoubleSign(0, 2),
    Move::DoubleSign(1, 2),
    Move::Vieta(0),
    Move::Vieta(1),
    Move::Vieta(2),
];

/// Partition of the points in the box into orbits of the group generated by
/// permutations, double sign changes and Vieta moves, searching only
/// through points inside a working box four times larger.
///
/// The search is certified against descent: two components that reduce to
/// the same representative are one orbit whose connecting path left the
/// working box, and that is reported as an error rather than as two orbits.
pub fn orbit_decompose(k: i64, bound: u64) -> Result<OrbitDecomposition> {
    let points = brute_points(k, bound)?;
    let working = 4 * bound as u128;
    let index: HashMap<Triple, usize> = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut orbit_of = vec![usize::MAX; points.len()];
    let mut orbits: Vec<Orbit> = Vec::new();
    let mut seen_reps: HashMap<Triple, usize> = HashMap::new();
    for start in 0..points.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut visited: HashSet<Triple> = HashSet::new();
        let mut queue = VecDeque::new();
        visited.insert(points[start]);
        queue.push_back(points[start]);
        let mut members = Vec::new();
        let mut best: Option<(i128, crate::point::CanonicalPoint)> = None;
        while let Some(p) = queue.pop_front() {
            if let Some(&i) = index.get(&p) {
                orbit_of[i] = id;
                members.push(i);
            }
            let key = (delta(&p)?, canonicalize(&p)?.0);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
            for g in GENERATORS {
                let q = g.apply(&p)?;
                if q.height() <= working && visited.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        members.sort();
        let representative = best.unwrap().1.embed();
        // descent certificate
        let (r, _) = reduce(&points[start])?;
        if let Some(&other) = seen_reps.get(&r) {
            if other != id {
                return Err(MarkoffError::WorkingBoxExceeded(working as u64));
            }
        }
        seen_reps.insert(r, id);
        orbits.push(Orbit { members, representative, visited: visited.len() });
    }
    Ok(OrbitDecomposition { k, bound, working_box: working as u64, points, orbits })
}

/// Triple loop over `(Z/q)^3`.
pub fn oracle_count_mod(q: u64, k: i64) -> Result<u64> {
    if q == 0 || q > ORACLE_MODULUS_LIMIT {
        return Err(MarkoffError::BoundTooLarge(q));
    }
    let q = q as i64;
    let kr = k.rem_euclid(q);
    let mut count = 0;
    for a in 0..q {
        for b in 0..q {
            let base = (a * a + b * b) % q;
            let ab = a * b % q;
            for c in 0..q {
                if (base + c * c - ab * c % q).rem_euclid(q) == kr {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Every non-negative solution of the three exceptional representation problems.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub k: i64,
    /// `u^2 + v^2 = k`, `u <= v`
    pub sum_two_squares: Vec<(u64, u64)>,
    /// `u^2 + 3 v^2 = 4(k - 1)`
    pub four_k_minus_1: Vec<(u64, u64)>,
    /// `u^2 = k - 4`
    pub k_minus_4_square: Option<u64>,
}

pub fn oracle_representations(k: i64) -> Result<RepresentationReport> {
    if k.unsigned_abs() > 1 << 40 {
        return Err(MarkoffError::BoundTooLarge(k.unsigned_abs()));
    }
    let mut rep = RepresentationReport { k, ..Default::default() };
    if k < 0 {
        return Ok(rep);
    }
    let k = k as u64;
    let mut u = 0u64;
    while u * u <= k {
        let mut v = u;
        while u * u + v * v <= k {
            if u * u + v * v == k {
                rep.sum_two_squares.push((u, v));
            }
            v += 1;
        }
        u += 1;
    }
    if k >= 1 {
        let n = 4 * (k - 1);
        let mut v = 0u64;
        while 3 * v * v <= n {
            let mut u = 0u64;
            while u * u + 3 * v * v <= n {
                if u * u + 3 * v * v == n {
                    rep.four_k_minus_1.push((u, v));
                }
                u += 1;
            }
            v += 1;
        }
    }
    if k >= 4 {
        let mut u = 0u64;
        while u * u <= k - 4 {
            if u * u == k - 4 {
                rep.k_minus_4_square = Some(u);
            }
            u += 1;
        }
    }
    Ok(rep)
}

/// Histogram count of `f_{a1}(x) = f_{a2}(y)` over `(Z/q)^4`:
/// `Σ_c H1[c] H2[c]` with `H_a[c] = #{x : f_a(x) = c}`.
pub fn oracle_pair_count(q: u64, a1: i64, a2: i64) -> Result<u128> {
    if q == 0 || q > 4096 {
        return Err(MarkoffError::BoundTooLarge(q));
    }
    let hist = |a: i64| {
        let q = q as i64;
        let mut h = vec![0u64; q as usize];
        let (am, a2m) = (a.rem_euclid(q), (a * a).rem_euclid(q));
        for x in 0..q {
            for y in 0..q {
                let v = (x * x + y * y + am * (x * y % q) + a2m) % q;
                h[v as usize] += 1;
            }
        }
        h
    };
    let (h1, h2) = (hist(a1), hist(a2));
    Ok(h1.iter().zip(&h2).map(|(&x, &y)| x as u128 * y as u128).sum())
}

/// Checks that every listed point is on the level (used by callers as a sanity guard).
pub fn all_on_level(points: &[Triple], k: i64) -> bool {
    points.iter().all(|p| evaluate(p).ok() == Some(k as i128))
}
