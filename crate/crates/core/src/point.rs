//! Exact arithmetic on Markoff points: evaluation, the group moves, the
//! discriminant `Δ`, canonical forms and descent to fundamental representatives.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{add, exact_sqrt, mul, sq, sub};
use crate::error::{MarkoffError, Result};

/// Hard cap on descent steps; reaching it means something is wrong.
pub const DESCENT_STEP_LIMIT: u64 = 1_000_000;

/// Levels are kept below this bound so descent intermediates always fit.
pub const LEVEL_LIMIT: i128 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple(pub [i128; 3]);

impl Triple {
    pub const fn new(x1: i128, x2: i128, x3: i128) -> Self {
        Triple([x1, x2, x3])
    }
    pub fn x1(&self) -> i128 {
        self.0[0]
    }
    pub fn x2(&self) -> i128 {
        self.0[1]
    }
    pub fn x3(&self) -> i128 {
        self.0[2]
    }
    /// Largest absolute coordinate.
    pub fn height(&self) -> u128 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

impl std::str::FromStr for Triple {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated integers, got {s:?}"));
        }
        let mut x = [0i128; 3];
        for (slot, part) in x.iter_mut().zip(&parts) {
            *slot = part.parse().map_err(|e| format!("bad coordinate {part:?}: {e}"))?;
        }
        Ok(Triple(x))
    }
}

/// `x1^2 + x2^2 + x3^2 - x1 x2 x3`, exactly.
pub fn evaluate(p: &Triple) -> Result<i128> {
    let [a, b, c] = p.0;
    let s = add(add(sq(a)?, sq(b)?)?, sq(c)?)?;
    sub(s, mul(mul(a, b)?, c)?)
}

/// Vieta involution on coordinate `j` (0-based): `x_j -> x_k x_l - x_j`.
pub fn vieta(p: &Triple, j: usize) -> Result<Triple> {
    assert!(j < 3, "coordinate index out of range");
    let mut x = p.0;
    let (k, l) = others(j);
    x[j] = sub(mul(x[k], x[l])?, x[j])?;
    Ok(Triple(x))
}

fn others(j: usize) -> (usize, usize) {
    match j {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// The common discriminant of the three Bhargava forms, in factored form.
pub fn delta(p: &Triple) -> Result<i128> {
    let [x1, x2, x3] = p.0;
    let f1 = add(add(add(1, x1)?, x2)?, x3)?;
    let f2 = sub(sub(add(1, x2)?, x1)?, x3)?;
    let f3 = sub(sub(add(1, x3)?, x1)?, x2)?;
    let f4 = sub(sub(add(1, x1)?, x2)?, x3)?;
    mul(mul(f1, f2)?, mul(f3, f4)?)
}

/// `(1 + x2^2 - x1^2 - x3^2)^2 - 4 (x1 x3 - x2)^2`; equal to [`delta`].
pub fn delta_expanded(p: &Triple) -> Result<i128> {
    let [x1, x2, x3] = p.0;
    let b = sub(sub(add(1, sq(x2)?)?, sq(x1)?)?, sq(x3)?)?;
    let c = sub(mul(x1, x3)?, x2)?;
    sub(sq(b)?, mul(4, sq(c)?)?)
}

/// Binary quadratic form `a u^2 + b uv + c v^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl QuadForm {
    pub fn discriminant(&self) -> Result<i128> {
        sub(sq(self.b)?, mul(4, mul(self.a, self.c)?)?)
    }
}

/// The three forms `Q_i = (x_j x_k - x_i) u^2 + (1 + x_i^2 - x_j^2 - x_k^2) uv + (x_j x_k - x_i) v^2`.
pub fn bhargava_forms(p: &Triple) -> Result<[QuadForm; 3]> {
    let x = p.0;
    let mut out = [QuadForm { a: 0, b: 0, c: 0 }; 3];
    for (i, form) in out.iter_mut().enumerate() {
        let (j, k) = others(i);
        let a = sub(mul(x[j], x[k])?, x[i])?;
        let b = sub(sub(add(1, sq(x[i])?)?, sq(x[j])?)?, sq(x[k])?)?;
        *form = QuadForm { a, b, c: a };
    }
    Ok(out)
}

/// One generator of the Markoff group. Indices are 0-based internally and
/// printed 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// `new[i] = old[sigma[i]]`
    Permute([u8; 3]),
    /// Negate coordinates `i` and `j`.
    DoubleSign(u8, u8),
    Vieta(u8),
}

impl Move {
    pub fn apply(&self, p: &Triple) -> Result<Triple> {
        let x = p.0;
        match *self {
            Move::Permute(s) => Ok(Triple([x[s[0] as usize], x[s[1] as usize], x[s[2] as usize]])),
            Move::DoubleSign(i, j) => {
                let mut y = x;
                for idx in [i as usize, j as usize] {
                    y[idx] = y[idx].checked_neg().ok_or(MarkoffError::Overflow)?;
                }
                Ok(Triple(y))
            }
            Move::Vieta(j) => vieta(p, j as usize),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Permute(s) => write!(f, "P({},{},{})", s[0] + 1, s[1] + 1, s[2] + 1),
            Move::DoubleSign(i, j) => write!(f, "S({},{})", i + 1, j + 1),
            Move::Vieta(j) => write!(f, "V{}", j + 1),
        }
    }
}

/// A sequence of moves together with the point it starts from and the point it reaches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaWord {
    pub start: Triple,
    pub moves: Vec<Move>,
    pub end: Triple,
}

impl GammaWord {
    pub fn identity(p: Triple) -> Self {
        GammaWord { start: p, moves: Vec::new(), end: p }
    }

    pub fn replay(&self, from: &Triple) -> Result<Triple> {
        let mut cur = *from;
        for m in &self.moves {
            cur = m.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Replaying from `start` lands on `end`.
    pub fn is_consistent(&self) -> bool {
        matches!(self.replay(&self.start), Ok(e) if e == self.end)
    }

    pub fn vieta_steps(&self) -> usize {
        self.moves.iter().filter(|m| matches!(m, Move::Vieta(_))).count()
    }

    fn push(&mut self, m: Move) -> Result<()> {
        self.end = m.apply(&self.end)?;
        self.moves.push(m);
        Ok(())
    }

    fn extend(&mut self, other: GammaWord) {
        debug_assert_eq!(self.end, other.start);
        self.moves.extend(other.moves);
        self.end = other.end;
    }
}

impl fmt::Display for GammaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moves.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    AllNonNegative,
    OneNegative,
}

/// Sorted absolute values plus the sign class that double flips cannot remove.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalPoint {
    pub a: [i128; 3],
    pub sign: Sign,
}

impl CanonicalPoint {
    /// `(a1,a2,a3)` or `(-a1,a2,a3)`.
    pub fn embed(&self) -> Triple {
        let [a1, a2, a3] = self.a;
        match self.sign {
            Sign::AllNonNegative => Triple([a1, a2, a3]),
            Sign::OneNegative => Triple([-a1, a2, a3]),
        }
    }
}

/// Normal form under permutations and double sign changes.
///
/// The only failure is a coordinate equal to `i128::MIN`, whose absolute
/// value does not fit.
pub fn canonicalize(p: &Triple) -> Result<(CanonicalPoint, GammaWord)> {
    if p.0.contains(&i128::MIN) {
        return Err(MarkoffError::Overflow);
    }
    let mut word = GammaWord::identity(*p);
    // stable sort of positions by absolute value; ties keep original order
    let mut idx = [0usize, 1, 2];
    idx.sort_by_key(|&i| p.0[i].unsigned_abs());
    if idx != [0, 1, 2] {
        word.push(Move::Permute([idx[0] as u8, idx[1] as u8, idx[2] as u8]))?;
    }
    let x = word.end.0;
    let neg: Vec<u8> = (0..3u8).filter(|&i| x[i as usize] < 0).collect();
    let has_zero = x[0] == 0;
    match neg.len() {
        0 => {}
        1 => {
            let i = neg[0];
            if i != 0 {
                // position 0 is either zero or the smallest absolute value
                word.push(Move::DoubleSign(0, i))?;
            }
        }
        2 => word.push(Move::DoubleSign(neg[0], neg[1]))?,
        _ => word.push(Move::DoubleSign(1, 2))?,
    }
    let y = word.end.0;
    let sign = if y[0] < 0 && !has_zero { Sign::OneNegative } else { Sign::AllNonNegative };
    let c = CanonicalPoint { a: [y[0].abs(), y[1], y[2]], sign };
    debug_assert_eq!(c.embed(), word.end);
    Ok((c, word))
}

fn check_level(k: i128) -> Result<()> {
    if k.abs() >= LEVEL_LIMIT {
        return Err(MarkoffError::LevelOutOfRange(k));
    }
    Ok(())
}

/// Descends `p` to its fundamental representative.
///
/// Works on the sorted triple: a positive node `(a1,a2,a3)` with
/// `0 < a1 a2 < 2 a3` is moved by the Vieta involution on the largest
/// coordinate, which strictly shrinks it; every other move grows the
/// triple. Negative nodes are terminal.
pub fn reduce(p: &Triple) -> Result<(Triple, GammaWord)> {
    let k = evaluate(p)?;
    check_level(k)?;
    let mut word = GammaWord::identity(*p);
    let mut steps = 0u64;
    loop {
        let (c, w) = canonicalize(&word.end)?;
        word.extend(w);
        let [a1, a2, a3] = c.a;
        let descend = c.sign == Sign::AllNonNegative && a1 > 0 && mul(a1, a2)? < mul(2, a3)?;
        if !descend {
            if k == 4 && c.sign == Sign::OneNegative {
                // only (-1,1,1) is negative on the Cayley cubic; report its (2,1,1) image
                debug_assert_eq!(c.a, [1, 1, 1]);
                word.push(Move::Vieta(0))?;
                let (_, w) = canonicalize(&word.end)?;
                word.extend(w);
            }
            break;
        }
        steps += 1;
        if steps > DESCENT_STEP_LIMIT {
            return Err(MarkoffError::DescentLimit(DESCENT_STEP_LIMIT));
        }
        word.push(Move::Vieta(2))?;
    }
    Ok((word.end, word))
}

/// The set of representatives for a level together with its truncation flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalSet {
    pub k: i64,
    pub reps: Vec<Triple>,
    pub cayley_truncated: bool,
}

/// Representatives for the levels not covered by the two boxes.
pub fn special_reps(k: i64) -> Option<Vec<Triple>> {
    match k {
        0 => Some(vec![Triple::new(0, 0, 0), Triple::new(3, 3, 3)]),
        1 => Some(vec![Triple::new(0, 0, 1)]),
        2 => Some(vec![Triple::new(0, 1, 1)]),
        3 => Some(vec![]),
        _ => None,
    }
}

/// Cayley cubic representatives `sorted(2,a,a)` for `0 <= a <= bound`.
pub fn cayley_reps(bound: u64) -> Vec<Triple> {
    let mut reps: Vec<Triple> = (0..=bound as i128)
        .map(|a| {
            let mut v = [2, a, a];
            v.sort();
            Triple(v)
        })
        .collect();
    reps.sort();
    reps.dedup();
    reps
}

/// All `3 <= u1 <= u2 <= u3` on the level (plus-box for `k >= 5`, minus-box for `k < 0`).
pub fn enumerate_fundamental(k: i64, cayley_bound: Option<u64>) -> Result<FundamentalSet> {
    check_level(k as i128)?;
    let mut out = FundamentalSet { k, reps: Vec::new(), cayley_truncated: false };
    if k == 4 {
        let b = cayley_bound.ok_or(MarkoffError::CayleyUnbounded)?;
        out.reps = cayley_reps(b);
        out.cayley_truncated = true;
        return Ok(out);
    }
    if let Some(r) = special_reps(k) {
        out.reps = r;
        return Ok(out);
    }
    let kk = k as i128;
    if k >= 5 {
        let mut u1: i128 = 3;
        while 3 * u1 * u1 + u1 * u1 * u1 <= kk {
            let mut u2 = u1;
            while u1 * u1 + 2 * u2 * u2 + u1 * u2 * u2 <= kk {
                let b = u1 * u2;
                let disc = b * b + 4 * (kk - u1 * u1 - u2 * u2);
                if let Some(r) = exact_sqrt(disc) {
                    let r = r as i128;
                    if (r - b) % 2 == 0 && (r - b) / 2 >= u2 {
                        out.reps.push(Triple::new(u1, u2, (r - b) / 2));
                    }
                }
                u2 += 1;
            }
            u1 += 1;
        }
    } else {
        let kabs = -kk;
        let mut u1: i128 = 3;
        while u1 * u1 * u1 - 3 * u1 * u1 <= kabs {
            let mut u2 = u1;
            while (u1 - 2) * u2 * u2 - u1 * u1 <= kabs {
                let b = u1 * u2;
                let disc = b * b - 4 * (u1 * u1 + u2 * u2 + kabs);
                if let Some(r) = exact_sqrt(disc) {
                    let r = r as i128;
                    if (b - r) % 2 == 0 && (b - r) / 2 >= u2 {
                        out.reps.push(Triple::new(u1, u2, (b - r) / 2));
                    }
                }
                u2 += 1;
            }
            u1 += 1;
        }
    }
    debug_assert!(out.reps.windows(2).all(|w| w[0] < w[1]));
    Ok(out)
}

/// Class number with the qualifiers the levels need.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassNumber {
    Exact(u64),
    /// Exceptional levels: the plus-box count `h+`. Orbits through a coordinate
    /// in `{0, ±1, ±2}` are not in the box (3685 has six box orbits and a seventh
    /// through `(-1,32,38)`), so this is not the full orbit count.
    PlusBox(u64),
    /// k = 1: a single finite orbit.
    FiniteOrbit(u64),
    /// k = 4.
    Infinite,
}

impl ClassNumber {
    pub fn value(&self) -> Option<u64> {
        match *self {
            ClassNumber::Exact(h) | ClassNumber::PlusBox(h) | ClassNumber::FiniteOrbit(h) => Some(h),
            ClassNumber::Infinite => None,
        }
    }
}

impl fmt::Display for ClassNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassNumber::Exact(h) => write!(f, "{h}"),
            ClassNumber::PlusBox(h) => write!(f, "{h} (plus box)"),
            ClassNumber::FiniteOrbit(h) => write!(f, "{h} (finite orbit)"),
            ClassNumber::Infinite => write!(f, "infinite"),
        }
    }
}

pub fn class_number(k: i64) -> Result<ClassNumber> {
    Ok(match k {
        4 => ClassNumber::Infinite,
        1 => ClassNumber::FiniteOrbit(1),
        0..=3 => ClassNumber::Exact(special_reps(k).unwrap().len() as u64),
        _ => {
            let h = enumerate_fundamental(k, None)?.reps.len() as u64;
            if k >= 5 && crate::classify::is_exceptional(k).any() {
                ClassNumber::PlusBox(h)
            } else {
                ClassNumber::Exact(h)
            }
        }
    })
}

/// The line `(2, t, t + w)` on levels `k = 4 + w^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametricLine {
    pub k: i64,
    pub w: u64,
}

impl ParametricLine {
    pub fn point(&self, t: i128) -> Result<Triple> {
        Ok(Triple::new(2, t, add(t, self.w as i128)?))
    }
}

impl fmt::Display for ParametricLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(2, t, t + {})", self.w)
    }
}

pub fn parametric_line(k: i64) -> Option<ParametricLine> {
    let w = exact_sqrt(k as i128 - 4)?;
    Some(ParametricLine { k, w: w as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i128, b: i128, c: i128) -> Triple {
        Triple::new(a, b, c)
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&t(0, 0, 0)).unwrap(), 0);
        assert_eq!(evaluate(&t(3, 3, 3)).unwrap(), 0);
        assert_eq!(evaluate(&t(3, 3, 4)).unwrap(), -2);
        assert_eq!(evaluate(&t(1 << 60, 1 << 60, 1 << 60)), Err(MarkoffError::Overflow));
    }

    #[test]
    fn vieta_examples() {
        assert_eq!(vieta(&t(3, 3, 3), 2).unwrap(), t(3, 3, 6));
        assert_eq!(vieta(&t(0, 1, 1), 0).unwrap(), t(1, 1, 1));
        assert_eq!(evaluate(&t(0, 1, 1)).unwrap(), 2);
        assert_eq!(evaluate(&t(1, 1, 1)).unwrap(), 2);
        for a in 0..20 {
            assert_eq!(vieta(&t(2, a, a), 1).unwrap(), t(2, a, a));
            assert_eq!(vieta(&t(2, a, a), 2).unwrap(), t(2, a, a));
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&t(0, 0, 0)).unwrap(), 1);
        assert_eq!(delta(&t(3, 3, 3)).unwrap(), -80);
        assert_eq!(delta(&t(2, 5, 5)).unwrap(), 9 - 4 * 25);
        assert_eq!(delta_expanded(&t(2, 5, 5)).unwrap(), -91);
    }

    #[test]
    fn bhargava_examples() {
        let f = bhargava_forms(&t(0, 0, 0)).unwrap();
        assert!(f.iter().all(|q| *q == QuadForm { a: 0, b: 1, c: 0 }));
        let f = bhargava_forms(&t(3, 3, 3)).unwrap();
        assert!(f.iter().all(|q| *q == QuadForm { a: 6, b: -8, c: 6 }));
        assert!(f.iter().all(|q| q.discriminant().unwrap() == -80));
        let p = t(1, 2, 3);
        let d = delta(&p).unwrap();
        assert!(bhargava_forms(&p).unwrap().iter().all(|q| q.discriminant().unwrap() == d));
    }

    #[test]
    fn canonical_examples() {
        let (c, w) = canonicalize(&t(-3, -3, 3)).unwrap();
        assert_eq!(c, CanonicalPoint { a: [3, 3, 3], sign: Sign::AllNonNegative });
        assert!(w.is_consistent());
        let (c, w) = canonicalize(&t(3, -5, 4)).unwrap();
        assert_eq!(c, CanonicalPoint { a: [3, 4, 5], sign: Sign::OneNegative });
        assert_eq!(w.end, t(-3, 4, 5));
        let (c, _) = canonicalize(&t(0, -1, 2)).unwrap();
        assert_eq!(c, CanonicalPoint { a: [0, 1, 2], sign: Sign::AllNonNegative });
        // the surviving minus sits on the earliest of tied smallest entries
        let (c, w) = canonicalize(&t(4, 4, -4)).unwrap();
        assert_eq!(c.sign, Sign::OneNegative);
        assert_eq!(w.end, t(-4, 4, 4));
    }

    #[test]
    fn reduce_examples() {
        let (r, w) = reduce(&t(3, 3, 6)).unwrap();
        assert_eq!(r, t(3, 3, 3));
        assert_eq!(w.to_string(), "V3");
        let (r, w) = reduce(&t(-3, 4, 5)).unwrap();
        assert_eq!(r, t(-3, 4, 5));
        assert!(w.moves.is_empty());
        assert_eq!(reduce(&t(3, 3, 4)).unwrap().0, t(3, 3, 4));
        assert_eq!(reduce(&t(0, 0, 0)).unwrap().0, t(0, 0, 0));
        // Cayley cubic: (-1,1,1) is reported as (1,1,2)
        let (r, w) = reduce(&t(-1, 1, 1)).unwrap();
        assert_eq!(r, t(1, 1, 2));
        assert!(w.is_consistent());
        assert_eq!(reduce(&t(2, 7, 7)).unwrap().0, t(2, 7, 7));
    }

    #[test]
    fn fundamental_examples() {
        assert_eq!(enumerate_fundamental(54, None).unwrap().reps, vec![t(3, 3, 3)]);
        assert_eq!(enumerate_fundamental(329, None).unwrap().reps, vec![t(3, 8, 8), t(4, 4, 11)]);
        assert!(enumerate_fundamental(46, None).unwrap().reps.is_empty());
        assert_eq!(enumerate_fundamental(-2, None).unwrap().reps, vec![t(3, 3, 4)]);
        assert!(enumerate_fundamental(-4, None).unwrap().reps.is_empty());
        assert_eq!(enumerate_fundamental(4, None), Err(MarkoffError::CayleyUnbounded));
        let c = enumerate_fundamental(4, Some(3)).unwrap();
        assert!(c.cayley_truncated);
        assert_eq!(c.reps, vec![t(0, 0, 2), t(1, 1, 2), t(2, 2, 2), t(2, 3, 3)]);
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number(0).unwrap(), ClassNumber::Exact(2));
        assert_eq!(class_number(-2).unwrap(), ClassNumber::Exact(1));
        assert_eq!(class_number(9454).unwrap(), ClassNumber::Exact(11));
        assert_eq!(class_number(4).unwrap(), ClassNumber::Infinite);
        assert_eq!(class_number(1).unwrap(), ClassNumber::FiniteOrbit(1));
        assert_eq!(class_number(3).unwrap(), ClassNumber::Exact(0));
        // 5 = 1 + 4 is exceptional
        assert!(matches!(class_number(5).unwrap(), ClassNumber::PlusBox(_)));
    }

    #[test]
    fn parametric_examples() {
        assert_eq!(parametric_line(4).unwrap().w, 0);
        let l = parametric_line(13).unwrap();
        assert_eq!(l.w, 3);
        for s in [-5, 0, 17] {
            assert_eq!(evaluate(&l.point(s).unwrap()).unwrap(), 13);
        }
        assert!(parametric_line(46).is_none());
        assert!(parametric_line(3).is_none());
    }

    #[test]
    fn triple_parse_roundtrip() {
        let p: Triple = "3,-5, 4".parse().unwrap();
        assert_eq!(p, t(3, -5, 4));
        assert_eq!(p.to_string().parse::<Triple>().unwrap(), p);
        assert!("1,2".parse::<Triple>().is_err());
    }
}
