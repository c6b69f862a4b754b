//! Exact point counts modulo prime powers.
//!
//! Counting goes through Hensel's lemma: a solution mod `p` with non-vanishing
//! gradient lifts to exactly `p^((n-1)(E-1))` solutions mod `p^E`; at a
//! singular residue `x0` the polynomial `f(x0 + p y)` is divided by its
//! content and counted recursively.

use std::collections::BTreeMap;

use crate::arith::{factorize, pow_u128};
use crate::error::{MarkoffError, Result};
use crate::local::chars::legendre_unchecked;

/// Largest modulus accepted by [`count_mod`].
pub const COUNT_MOD_LIMIT: u64 = 1_000_000;

/// Sparse polynomial in at most four variables with coefficients reduced
/// modulo some `p^E < 2^62`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub nvars: usize,
    pub terms: Vec<([u8; 4], i128)>,
}

impl Poly {
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = ([u8; 4], i128)>, modulus: i128) -> Self {
        assert!(nvars <= 4);
        let mut acc: BTreeMap<[u8; 4], i128> = BTreeMap::new();
        for (e, c) in terms {
            let slot = acc.entry(e).or_insert(0);
            *slot = (*slot + c).rem_euclid(modulus);
        }
        Poly { nvars, terms: acc.into_iter().filter(|&(_, c)| c != 0).collect() }
    }

    /// `x1^2 + x2^2 + x3^2 - x1 x2 x3 - k`.
    pub fn markoff(k: i128, modulus: i128) -> Self {
        Poly::new(
            3,
            [([2, 0, 0, 0], 1), ([0, 2, 0, 0], 1), ([0, 0, 2, 0], 1), ([1, 1, 1, 0], -1), ([0, 0, 0, 0], -k)],
            modulus,
        )
    }

    /// `f_{a1}(x1,x2) - f_{a2}(y1,y2)` with `f_a(x1,x2) = x1^2 + x2^2 + a x1 x2 + a^2`.
    pub fn pair(a1: i128, a2: i128, modulus: i128) -> Self {
        Poly::new(
            4,
            [
                ([2, 0, 0, 0], 1),
                ([0, 2, 0, 0], 1),
                ([1, 1, 0, 0], a1),
                ([0, 0, 2, 0], -1),
                ([0, 0, 0, 2], -1),
                ([0, 0, 1, 1], -a2),
                ([0, 0, 0, 0], a1 * a1 - a2 * a2),
            ],
            modulus,
        )
    }

    fn eval_mod(&self, x: &[i128; 4], p: i128) -> i128 {
        let mut s = 0i128;
        for (e, c) in &self.terms {
            let mut t = c % p;
            for i in 0..self.nvars {
                for _ in 0..e[i] {
                    t = t * x[i] % p;
                }
            }
            s = (s + t) % p;
        }
        s
    }

    fn grad_nonzero_mod(&self, x: &[i128; 4], p: i128) -> bool {
        (0..self.nvars).any(|i| {
            let mut s = 0i128;
            for (e, c) in &self.terms {
                if e[i] == 0 {
                    continue;
                }
                let mut t = c % p * (e[i] as i128) % p;
                for j in 0..self.nvars {
                    let d = if j == i { e[j] - 1 } else { e[j] };
                    for _ in 0..d {
                        t = t * x[j] % p;
                    }
                }
                s = (s + t) % p;
            }
            s != 0
        })
    }

    /// `f(x0 + p y)` reduced modulo `modulus`.
    fn shift_scale(&self, x0: &[i128; 4], p: i128, modulus: i128) -> Poly {
        let mut cur: BTreeMap<[u8; 4], i128> = self.terms.iter().cloned().collect();
        for i in 0..self.nvars {
            let mut next: BTreeMap<[u8; 4], i128> = BTreeMap::new();
            for (e, c) in &cur {
                let d = e[i] as usize;
                // (x0 + p y)^d = sum_j C(d,j) x0^(d-j) p^j y^j
                let mut binom = 1i128;
                for j in 0..=d {
                    let mut t = c * (binom % modulus) % modulus;
                    for _ in 0..(d - j) {
                        t = t * x0[i] % modulus;
                    }
                    for _ in 0..j {
                        t = t * p % modulus;
                    }
                    let mut ne = *e;
                    ne[i] = j as u8;
                    let slot = next.entry(ne).or_insert(0);
                    *slot = (*slot + t) % modulus;
                    binom = binom * (d - j) as i128 / (j as i128 + 1);
                }
            }
            cur = next;
        }
        Poly { nvars: self.nvars, terms: cur.into_iter().filter(|&(_, c)| c != 0).collect() }
    }

    fn content_valuation(&self, p: i128, cap: u32) -> u32 {
        self.terms
            .iter()
            .map(|&(_, c)| {
                let mut c = c;
                let mut v = 0;
                while c != 0 && c % p == 0 && v < cap {
                    c /= p;
                    v += 1;
                }
                if c == 0 {
                    cap
                } else {
                    v
                }
            })
            .min()
            .unwrap_or(cap)
            .min(cap)
    }

    fn degree_mod(&self, p: i128) -> u32 {
        self.terms
            .iter()
            .filter(|&&(_, c)| c % p != 0)
            .map(|(e, _)| e.iter().map(|&d| d as u32).sum())
            .max()
            .unwrap_or(0)
    }
}

/// Number of zeros of `f` in `(Z/p^E)^n`. `f` must have coefficients reduced mod `p^E`.
pub fn count_zeros(f: &Poly, p: u64, e: u32) -> Result<u128> {
    if e == 0 {
        return Ok(1);
    }
    let n = f.nvars as u32;
    let pi = p as i128;
    let pw = |x: u32| pow_u128(p as u128, x);
    let c = f.content_valuation(pi, e);
    if c >= e {
        return pw(n * e);
    }
    if c > 0 {
        let scale = pw(c)? as i128;
        let m2 = pw(e - c)? as i128;
        let g = Poly::new(f.nvars, f.terms.iter().map(|&(ex, a)| (ex, (a / scale) % m2)), m2);
        return Ok(count_zeros(&g, p, e - c)? * pw(n * c)?);
    }
    match f.degree_mod(pi) {
        // a unit constant has no zeros
        0 => return Ok(0),
        // every zero mod p is nonsingular
        1 => return pw((n - 1) * e),
        _ => {}
    }
    let mut total: u128 = 0;
    let npts = pw(n)?;
    let mut x = [0i128; 4];
    for idx in 0..npts {
        let mut r = idx;
        for slot in x.iter_mut().take(f.nvars) {
            *slot = (r % p as u128) as i128;
            r /= p as u128;
        }
        if f.eval_mod(&x, pi) != 0 {
            continue;
        }
        if f.grad_nonzero_mod(&x, pi) {
            total += pw((n - 1) * (e - 1))?;
            continue;
        }
        total += singular_lift(f, &x, p, e)?;
    }
    Ok(total)
}

/// Lifts of a singular residue `x0` to solutions mod `p^e`.
fn singular_lift(f: &Poly, x0: &[i128; 4], p: u64, e: u32) -> Result<u128> {
    let n = f.nvars as u32;
    let pi = p as i128;
    let modulus = pow_u128(p as u128, e)? as i128;
    let g = f.shift_scale(x0, pi, modulus);
    let c = g.content_valuation(pi, e);
    if c >= e {
        return pow_u128(p as u128, n * (e - 1));
    }
    let scale = pow_u128(p as u128, c)? as i128;
    let m2 = pow_u128(p as u128, e - c)? as i128;
    let g2 = Poly::new(f.nvars, g.terms.iter().map(|&(ex, a)| (ex, (a / scale) % m2)), m2);
    Ok(count_zeros(&g2, p, e - c)? * pow_u128(p as u128, n * (c - 1))?)
}

/// `|V_k(Z/p)|` for an odd prime, in O(p): for fixed `x1` the inner sum over
/// `x2` of `1 + (D/p)`, `D = (x1^2 - 4) x2^2 + 4(k - x1^2)`, is a quadratic
/// character sum with a closed value.
pub fn count_markoff_prime(p: u64, k: i128) -> u128 {
    assert!(p % 2 == 1);
    let pi = p as i128;
    let mut total: i128 = 0;
    for x1 in 0..pi {
        let a = (x1 * x1 - 4).rem_euclid(pi);
        let b = (4 * (k - x1 * x1)).rem_euclid(pi);
        let s = if a == 0 {
            pi * legendre_unchecked(b, p) as i128
        } else if b == 0 {
            legendre_unchecked(a, p) as i128 * (pi - 1)
        } else {
            -(legendre_unchecked(a, p) as i128)
        };
        total += pi + s;
    }
    total as u128
}

/// `|V_k(Z/p^e)|` with no size guard.
pub fn count_markoff_prime_power(p: u64, e: u32, k: i128) -> Result<u128> {
    if e == 0 {
        return Ok(1);
    }
    let modulus = pow_u128(p as u128, e)?;
    if modulus >= 1 << 62 {
        return Err(MarkoffError::ModulusTooLarge(u64::MAX));
    }
    if p == 2 || p < 64 {
        return count_zeros(&Poly::markoff(k, modulus as i128), p, e);
    }
    // Large odd p: nonsingular residues from the O(p) count, and the only
    // singular residues are (0,0,0) and the even sign patterns of (2,2,2).
    let pi = p as i128;
    let n1 = count_markoff_prime(p, k);
    if e == 1 {
        return Ok(n1);
    }
    let f = Poly::markoff(k, modulus as i128);
    let mut singular = vec![[0i128, 0, 0, 0]];
    for s in [[2i128, 2, 2], [2, -2, -2], [-2, 2, -2], [-2, -2, 2]] {
        singular.push([s[0].rem_euclid(pi), s[1].rem_euclid(pi), s[2].rem_euclid(pi), 0]);
    }
    let mut total: u128 = 0;
    let mut nsing: u128 = 0;
    for x0 in &singular {
        if f.eval_mod(x0, pi) == 0 {
            debug_assert!(!f.grad_nonzero_mod(x0, pi));
            nsing += 1;
            total += singular_lift(&f, x0, p, e)?;
        }
    }
    total += (n1 - nsing) * pow_u128(p as u128, 2 * (e - 1))?;
    Ok(total)
}

/// `|V_k(Z/q)|` for `1 <= q <= 10^6`, assembled prime power by prime power.
pub fn count_mod(q: u64, k: i128) -> Result<u128> {
    if q == 0 || q > COUNT_MOD_LIMIT {
        return Err(MarkoffError::ModulusTooLarge(q));
    }
    let mut total: u128 = 1;
    for (p, e) in factorize(q) {
        total *= count_markoff_prime_power(p, e, k)?;
    }
    Ok(total)
}

/// Number of `(x, y)` mod `p^l` with `f_{a1}(x) = f_{a2}(y)`.
pub fn count_pair_prime_power(p: u64, l: u32, a1: i128, a2: i128) -> Result<u128> {
    let modulus = pow_u128(p as u128, l)?;
    if modulus >= 1 << 62 {
        return Err(MarkoffError::ModulusTooLarge(u64::MAX));
    }
    count_zeros(&Poly::pair(a1, a2, modulus as i128), p, l)
}
