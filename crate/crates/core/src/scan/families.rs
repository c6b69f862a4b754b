//! Explicit Hasse-failure families and the strong-approximation congruence check.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime};
use crate::error::{MarkoffError, Result};
use crate::local::kronecker;
use crate::point::{evaluate, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `4 + 2ν²`, prime factors of ν in ±1 mod 8, ν in {0, ±3, ±4} mod 9
    Hf1PlusNu,
    /// `4 - 2ν²`, same hypotheses
    Hf1MinusNu,
    /// `4 + 2ℓ²`, ℓ >= 13 prime, ℓ ≡ ±4 mod 9
    Hf1Ell,
    /// Union of the two positive HF1 shapes, in increasing k.
    Hf1,
    /// `4 + 12ν²`, ν² ≡ 25 mod 32, prime factors ±1 mod 12
    F12,
    /// `4 + 20ν²`, ν ≡ ±4 mod 9, prime factors ±1 mod 20
    F20,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Hf1, Family::Hf1PlusNu, Family::Hf1MinusNu, Family::Hf1Ell, Family::F12, Family::F20];

    pub fn id(&self) -> &'static str {
        match self {
            Family::Hf1PlusNu => "hf1-plus",
            Family::Hf1MinusNu => "hf1-minus",
            Family::Hf1Ell => "hf1-ell",
            Family::Hf1 => "hf1",
            Family::F12 => "f12",
            Family::F20 => "f20",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown family {s:?}; expected one of hf1, hf1-plus, hf1-minus, hf1-ell, f12, f20"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub k: i64,
    /// ν or ℓ
    pub param: u64,
    /// Which hypotheses were checked, with the factorization used.
    pub proof: String,
}

fn factor_string(n: u64) -> String {
    if n == 1 {
        return "1".into();
    }
    factorize(n)
        .iter()
        .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn primes_in(n: u64, m: u64, classes: &[u64]) -> bool {
    factorize(n).iter().all(|(p, _)| classes.contains(&(p % m)))
}

fn member(family: Family, nu: u64) -> Option<FamilyMember> {
    let n2 = (nu as i64) * (nu as i64);
    let f = factor_string(nu);
    match family {
        Family::Hf1PlusNu | Family::Hf1MinusNu => {
            if !(primes_in(nu, 8, &[1, 7]) && [0, 3, 4, 5, 6].contains(&(nu % 9))) {
                return None;
            }
            let (k, s) = if family == Family::Hf1PlusNu { (4 + 2 * n2, '+') } else { (4 - 2 * n2, '-') };
            Some(FamilyMember {
                k,
                param: nu,
                proof: format!("HF1(i){s}: nu={f}, primes = ±1 mod 8, nu = {} mod 9", nu % 9),
            })
        }
        Family::Hf1Ell => {
            if !(nu >= 13 && is_prime(nu) && [4, 5].contains(&(nu % 9))) {
                return None;
            }
            Some(FamilyMember {
                k: 4 + 2 * n2,
                param: nu,
                proof: format!("HF1(ii): l={nu} prime, l = {} mod 9", nu % 9),
            })
        }
        Family::Hf1 => member(Family::Hf1Ell, nu).or_else(|| member(Family::Hf1PlusNu, nu)),
        Family::F12 => {
            if !((nu * nu) % 32 == 25 && primes_in(nu, 12, &[1, 11])) {
                return None;
            }
            Some(FamilyMember {
                k: 4 + 12 * n2,
                param: nu,
                proof: format!("F12: nu={f}, nu^2 = 25 mod 32, primes = ±1 mod 12"),
            })
        }
        Family::F20 => {
            if !([4, 5].contains(&(nu % 9)) && primes_in(nu, 20, &[1, 19])) {
                return None;
            }
            Some(FamilyMember {
                k: 4 + 20 * n2,
                param: nu,
                proof: format!("F20: nu={f}, nu = {} mod 9, primes = ±1 mod 20", nu % 9),
            })
        }
    }
}

/// The first `limit` members of a family in increasing `|k|`.
pub fn family_generators(family: Family, limit: usize) -> Vec<FamilyMember> {
    (1u64..).filter_map(|nu| member(family, nu)).take(limit).collect()
}

/// Members with `|k| <= k_max`, capped at `limit`.
pub fn family_members_below(family: Family, k_max: u64, limit: usize) -> Vec<FamilyMember> {
    (1u64..)
        .map_while(|nu| {
            let m = 2 * nu * nu;
            (m <= k_max + 4).then(|| member(family, nu))
        })
        .flatten()
        .filter(|m| m.k.unsigned_abs() <= k_max)
        .take(limit)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub x: i128,
    /// `x^2 - 4`
    pub n: i128,
    /// Kronecker symbol `(4d / n)`; for `n < 0` the positive representative mod `4|d|` is used.
    pub symbol: i8,
    pub in_s: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongApproxReport {
    pub point: Triple,
    pub k: i128,
    pub d: i128,
    pub modulus: i128,
    /// `2 x3 - x1 x2`
    pub w: i128,
    /// `w^2 - 4d = (x1^2 - 4)(x2^2 - 4)`
    pub identity_holds: bool,
    pub memberships: Vec<Membership>,
}

impl StrongApproxReport {
    pub fn all_in_s(&self) -> bool {
        self.memberships.iter().all(|m| m.in_s)
    }
}

/// Checks the factorization identity and the `S_d` congruences for a point on `4 + d`.
pub fn strong_approx_obstruction(p: &Triple) -> Result<StrongApproxReport> {
    let k = evaluate(p)?;
    let d = k - 4;
    if d == 0 {
        return Err(MarkoffError::NotOnCayleyShiftedSurface);
    }
    let [x1, x2, x3] = p.0;
    let big = |x: i128| x.checked_mul(x).and_then(|v| v.checked_sub(4)).ok_or(MarkoffError::Overflow);
    let w = 2 * x3 - x1 * x2;
    let lhs = w.checked_mul(w).and_then(|v| v.checked_sub(4 * d)).ok_or(MarkoffError::Overflow)?;
    let rhs = big(x1)?.checked_mul(big(x2)?).ok_or(MarkoffError::Overflow)?;
    let modulus = 4 * d.abs();
    let memberships =
        p.0.iter()
            .map(|&x| {
                let n = big(x)?;
                let m = if n >= 0 { n } else { n.rem_euclid(modulus) };
                let symbol = kronecker(4 * d, m);
                Ok(Membership { x, n, symbol, in_s: symbol >= 0 })
            })
            .collect::<Result<Vec<_>>>()?;
    Ok(StrongApproxReport { point: *p, k, d, modulus, w, identity_holds: lhs == rhs, memberships })
}
