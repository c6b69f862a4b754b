//! Closed-form local densities `δ_p(k)` and the terms `N_l(k)` of their series.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{is_prime, mod_inv, primes_up_to, unit_part, val};
use crate::error::{MarkoffError, Result};
use crate::local::chars::{chi4, chi4_chi8, chi8, legendre_unchecked};
use crate::point::Triple;

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `p^e` as a rational, `e` of either sign.
pub(crate) fn ppow(p: u64, e: i64) -> BigRational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

fn odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(MarkoffError::InvalidPrime(p as i64));
    }
    Ok(())
}

/// `N_p(α, β)`: the number of `x mod p` with `x1^2 + x2^2 + x3^2 - α x1 x2 x3 = β`.
pub fn np_closed(p: u64, alpha: i128, beta: i128) -> Result<i128> {
    odd_prime(p)?;
    let pi = p as i128;
    let chi = |a: i128| legendre_unchecked(a, p) as i128;
    Ok(if alpha.rem_euclid(pi) == 0 {
        pi * pi + pi * chi(-beta)
    } else {
        pi * pi + 1 + chi(alpha * alpha * beta - 4) * (3 + chi(beta)) * pi
    })
}

/// No congruence obstruction at `p`.
pub fn local_solvable(p: u64, k: i64) -> bool {
    match p {
        2 => k.rem_euclid(4) != 3,
        3 => !matches!(k.rem_euclid(9), 3 | 6),
        _ => true,
    }
}

/// A solution of `M(x) = k mod p^n` for `p >= 5`, built from `e = 2`, `f = 1/2`:
/// `x1 = 2 - (k-4)c`, `x2 = e + f`, `x3 = e - f + f x1` with `c (e-f)^2 = 1`.
pub fn explicit_solution_mod(p: u64, n: u32, k: i64) -> Result<Triple> {
    if p < 5 || !is_prime(p) {
        return Err(MarkoffError::InvalidPrime(p as i64));
    }
    let m = (p as i128).checked_pow(n).filter(|m| *m < 1 << 62).ok_or(MarkoffError::Overflow)?;
    let md = |a: i128| a.rem_euclid(m);
    let e = 2i128;
    let f = mod_inv(2, m).expect("2 is a unit");
    let d = md(e - f);
    let c = mod_inv(md(d * d), m).expect("3/2 is a unit for p >= 5");
    let x1 = md(2 - md(md(k as i128 - 4) * c));
    let x2 = md(e + f);
    let x3 = md(d + md(f * x1));
    let t = Triple::new(x1, x2, x3);
    let lhs = md(md(x1 * x1) + md(x2 * x2) + md(x3 * x3) - md(md(x1 * x2) * x3));
    if lhs != md(k as i128) {
        return Err(MarkoffError::ConfigViolation(format!("construction failed for p={p} n={n} k={k}")));
    }
    Ok(t)
}

fn unsupported(k: i64) -> Result<()> {
    if k == 0 || k == 4 {
        return Err(MarkoffError::UnsupportedLevel(k));
    }
    Ok(())
}

/// `δ_p(k)` for odd `p`, with `μ = v_p(k(k-4))`.
///
/// In the even-`μ` branches the character is taken of the unit part of `-k`
/// (when `p | k`) and of `k-4` (when `p | k-4`); the exact counts require it.
pub fn delta_p_odd(p: u64, k: i64) -> Result<BigRational> {
    odd_prime(p)?;
    unsupported(k)?;
    let kk = k as i128;
    let chi = |a: i128| BigRational::from_integer(BigInt::from(legendre_unchecked(a, p)));
    let one = BigRational::one();
    let ip = ppow(p, -1);
    let ip2 = ppow(p, -2);
    let mu = val(p, kk * (kk - 4)) as i64;
    if mu == 0 {
        return Ok(&one + chi(kk - 4) * (chi(kk) + rat(3, 1)) * &ip + &ip2);
    }
    let at_k = kk % p as i128 == 0;
    if mu == 1 {
        return Ok(if at_k { &one + chi(-1) * rat(3, 1) * &ip } else { &one - rat(3, 1) * &ip2 });
    }
    let (lead, weight, unit) = if at_k {
        (rat(1, 1) + chi(-1) * rat(3, 1), rat(1, 1), unit_part(p, -kk))
    } else {
        (rat(4, 1), rat(4, 1), unit_part(p, kk - 4))
    };
    let base = &one + lead * &ip + &ip2;
    Ok(if mu % 2 == 1 {
        base - &weight * (ppow(p, -(mu + 1) / 2) + ppow(p, -(mu + 3) / 2))
    } else {
        base - &weight * ppow(p, -mu / 2 - 1) * (&one - chi(unit))
    })
}

/// `δ_2(k)`, split by the 2-adic shape of `k` and `k - 4`.
pub fn delta_2(k: i64) -> Result<BigRational> {
    unsupported(k)?;
    let kk = k as i128;
    let h = |e: i64| ppow(2, -e);
    let c = |x: i8| rat(x as i64, 1);
    if kk % 2 != 0 {
        return Ok(rat(3, 8) * c(1 + chi4(kk)) * c(2 - chi8(kk)));
    }
    let v = val(2, kk) as i64;
    if v == 1 {
        return Ok(rat(1, 1));
    }
    if v == 2 {
        let e = val(2, kk - 4) as i64;
        let w = (4 - kk) >> e;
        return Ok(match e {
            3 => rat(1, 1),
            4 => rat(7, 4) + c((w.rem_euclid(8) == 7) as i8),
            5 => rat(7, 4),
            _ if e % 2 == 0 => {
                rat(13, 4) - h((e - 6) / 2) - c(chi4(w)) * h((e - 4) / 2) + c(chi8(w) - chi4_chi8(w)) * h((e - 2) / 2)
            }
            _ => rat(13, 4) - h((e - 7) / 2) - h((e - 5) / 2),
        });
    }
    let w = kk >> v;
    let w8 = w.rem_euclid(8);
    Ok(match v {
        3 => rat(7, 4) + rat(3, 4) * c(chi4(w)),
        4 => match w8 {
            1 | 5 => rat(11, 8),
            3 => rat(1, 1),
            _ => rat(5, 4),
        },
        _ if v % 2 == 1 => rat(1, 1) + rat(3, 1) * h((v + 1) / 2),
        _ => match w8 {
            1 | 5 => rat(1, 1) + rat(3, 1) * h((v + 2) / 2),
            3 => rat(1, 1) + h(v / 2),
            _ => rat(1, 1),
        },
    })
}

/// `δ_p(k)` for any prime.
pub fn delta_p(p: u64, k: i64) -> Result<BigRational> {
    if p == 2 {
        delta_2(k)
    } else {
        delta_p_odd(p, k)
    }
}

/// The `l`-th term of `δ_p(k) = 1 + Σ_l N_l(k)`.
pub fn nl_terms(p: u64, k: i64, l: u32) -> Result<BigRational> {
    if l == 0 {
        return Ok(BigRational::one());
    }
    if p == 2 {
        return Ok(nl_two(k as i128, l));
    }
    odd_prime(p)?;
    let kk = k as i128;
    let chi = |a: i128| rat(legendre_unchecked(a, p) as i64, 1);
    let pl = |e: u32| (p as i128).pow(e);
    let divides = |e: u32, m: i128| m % pl(e) == 0;
    let li = l as i64;
    if l == 1 {
        return Ok(chi(kk - 4) * (chi(kk) + rat(3, 1)) * ppow(p, -1) + ppow(p, -2));
    }
    if l % 2 == 1 {
        let top = (li + 1) / 2;
        return Ok(if divides(l - 1, kk - 4) {
            rat(4, 1) * ppow(p, -top) * chi((kk - 4) / pl(l - 1))
        } else if divides(l - 1, kk) {
            ppow(p, -top) * chi(-kk / pl(l - 1))
        } else {
            BigRational::zero()
        });
    }
    let eta = |e: u32, m: i128| if divides(e, m) { 1 } else { 0 };
    let prod = kk * (kk - 4);
    Ok(if divides(l, prod) {
        ppow(p, -li / 2) * (rat(1, 1) - ppow(p, -1)) * rat(4 * eta(l, kk - 4) + eta(l, kk), 1)
    } else if divides(l - 1, prod) {
        -ppow(p, -(li + 2) / 2) * rat(4 * eta(l - 1, kk - 4) + eta(l - 1, kk), 1)
    } else {
        BigRational::zero()
    })
}

/// `cos((j+1)π/4) (1 + (-1)^(l+j))` scaled so the result is rational:
/// returns `2^(-(l+1)/2)` times that product.
fn lb_cos_term(j: i128, l: u32) -> BigRational {
    if (l as i128 + j) % 2 != 0 {
        return BigRational::zero();
    }
    let li = l as i64;
    if j.rem_euclid(2) == 0 {
        // cos = chi8(j+1)/sqrt 2, times 2 and 2^(-(l+1)/2)
        rat(chi8(j + 1) as i64, 1) * ppow(2, -li / 2)
    } else {
        let c = match (j + 1).rem_euclid(8) {
            0 => 1,
            4 => -1,
            _ => 0,
        };
        rat(c, 1) * ppow(2, -(li - 1) / 2)
    }
}

fn nl_two(k: i128, l: u32) -> BigRational {
    let r = |n: i64, d: i64| rat(n, d);
    match l {
        1 => r(if k % 2 == 0 { 1 } else { -1 }, 4),
        2 => match k.rem_euclid(4) {
            0 => r(1, 4),
            1 => r(3, 4),
            2 => r(-1, 4),
            _ => r(-3, 4),
        },
        3 => {
            if k.rem_euclid(4) == 1 {
                r(if ((k + 3) / 4).rem_euclid(2) == 0 { 3 } else { -3 }, 4)
            } else {
                BigRational::zero()
            }
        }
        _ if k % 2 != 0 => BigRational::zero(),
        4 => {
            if k % 8 == 0 {
                r(if (k / 8).rem_euclid(2) == 0 { -1 } else { 1 }, 4)
            } else if k % 4 == 0 {
                r(chi4(k / 4) as i64, 2)
            } else {
                BigRational::zero()
            }
        }
        5 => {
            if k % 8 == 0 {
                r(3 * chi4(k / 8) as i64, 4)
            } else {
                BigRational::zero()
            }
        }
        _ => {
            let m = 1i128 << (l - 3);
            if k % m == 0 {
                let t = lb_cos_term(k / m, l);
                // the l = 7 term carries the opposite sign to its neighbours
                if l == 7 {
                    t
                } else {
                    -t
                }
            } else if (k - 4) % m == 0 {
                ppow(2, (l as i64 - 5).min(3)) * lb_cos_term((4 - k) / m, l)
            } else {
                BigRational::zero()
            }
        }
    }
}

/// Local factors for `p <= L` and their product.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDensityProfile {
    pub k: i64,
    pub cutoff: u64,
    pub factors: Vec<(u64, BigRational)>,
    pub truncated_product: BigRational,
}

pub fn delta_truncated(k: i64, cutoff: u64) -> Result<LocalDensityProfile> {
    if cutoff < 2 {
        return Err(MarkoffError::ConfigViolation("prime cutoff must be at least 2".into()));
    }
    unsupported(k)?;
    let mut factors = Vec::new();
    let mut prod = BigRational::one();
    for p in primes_up_to(cutoff) {
        let d = delta_p(p, k)?;
        prod *= &d;
        factors.push((p, d));
    }
    Ok(LocalDensityProfile { k, cutoff, factors, truncated_product: prod })
}

/// Floating value for reporting only.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
