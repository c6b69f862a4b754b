//! Local densities of the pair surfaces `f_{a1}(x) = f_{a2}(y)`,
//! `f_a(x1,x2) = x1^2 + x2^2 + a x1 x2 + a^2`, with `D_a = a^2 - 4`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{is_prime, val};
use crate::error::{MarkoffError, Result};
use crate::local::chars::legendre_unchecked;
use crate::local::count::count_pair_prime_power;
use crate::local::density::{ppow, rat};

fn check_pair(a1: i64, a2: i64) -> Result<()> {
    if a1 == a2 || a1 == -a2 || a1.abs() == 2 || a2.abs() == 2 {
        return Err(MarkoffError::DegeneratePair(a1, a2));
    }
    Ok(())
}

fn disc(a: i64) -> i128 {
    a as i128 * a as i128 - 4
}

/// `δ_p(a1, a2)` for an odd prime `p`.
pub fn delta_pair_odd(p: u64, a1: i64, a2: i64) -> Result<BigRational> {
    if p < 3 || !is_prime(p) {
        return Err(MarkoffError::InvalidPrime(p as i64));
    }
    check_pair(a1, a2)?;
    let (d1, d2) = (disc(a1), disc(a2));
    let pi = p as i128;
    let chi = |a: i128| rat(legendre_unchecked(a, p) as i64, 1);
    let one = BigRational::one();
    let ip = ppow(p, -1);
    let divides = |m: i128| m % pi == 0;
    let (p1, p2, p12) = (divides(d1), divides(d2), divides(d1 - d2));
    if !p1 && !p2 && !p12 {
        return Ok(&one - chi(d1 * d2) * ppow(p, -2));
    }
    if !p1 && !p2 {
        let mu = val(p, d1 - d2) as i64;
        return Ok((&one + &ip) * (&one - ppow(p, -mu - 1)));
    }
    if !p12 {
        return Ok(&one + &ip);
    }
    // p divides both discriminants
    let (e1, e2) = (val(p, d1) as i64, val(p, d2) as i64);
    let eta = e1.min(e2);
    let mu = val(p, d1 - d2) as i64;
    let base = rat(1 + eta, 1);
    Ok(if e1 != e2 {
        base - rat(eta - 1, 1) * &ip
    } else if mu == eta {
        let u1 = d1 / pi.pow(eta as u32);
        let u2 = d2 / pi.pow(eta as u32);
        base - rat(eta, 1) * &ip - chi(u1) * chi(u2) * ppow(p, -2)
    } else {
        base - rat(eta - 1, 1) * &ip - (&one + &ip) * ppow(p, -(mu - eta + 1))
    })
}

/// 2-adic data of an even `a`: `A = a^2/4 - 1 = 2^θ C` with `C` odd.
fn even_shape(a: i64) -> (i128, u32, i128) {
    let big_a = (a as i128 / 2).pow(2) - 1;
    let th = val(2, big_a);
    (big_a, th, big_a >> th)
}

/// The term `N_l(a1, a2)` of `δ_2(a1, a2) = 1 + Σ_l N_l`.
pub fn pair_nl_two(a1: i64, a2: i64, l: u32) -> Result<BigRational> {
    check_pair(a1, a2)?;
    let h = |e: i64| ppow(2, -e);
    let zero = BigRational::zero;
    let li = l as i64;
    if l == 0 {
        return Ok(BigRational::one());
    }
    match (a1 % 2 != 0, a2 % 2 != 0) {
        (true, true) => {
            let eta = val(2, disc(a1) - disc(a2)) as i64;
            Ok(if li <= eta {
                h(li + 1)
            } else if li == eta + 1 {
                -h(li + 1)
            } else {
                zero()
            })
        }
        (true, false) | (false, true) => {
            let even = if a1 % 2 == 0 { a1 } else { a2 };
            let (_, th, _) = even_shape(even);
            Ok(if l == 2 || (l == 3 && th >= 3) { rat(1, 4) } else { zero() })
        }
        (false, false) => both_even_nl(a1, a2, l),
    }
}

/// Both `a` even: the closed form's case split does not reproduce the counts,
/// so the term is the exact difference of normalized counts mod `2^l` and `2^{l-1}`.
fn both_even_nl(a1: i64, a2: i64, l: u32) -> Result<BigRational> {
    Ok(pair_density_at_level(2, l, a1, a2)? - pair_density_at_level(2, l - 1, a1, a2)?)
}

/// `δ_2(a1, a2)`, summing the nonzero terms `N_l`.
pub fn delta_pair_two(a1: i64, a2: i64) -> Result<BigRational> {
    check_pair(a1, a2)?;
    let top = pair_two_top(a1, a2);
    let mut s = BigRational::one();
    for l in 1..=top {
        s += pair_nl_two(a1, a2, l)?;
    }
    Ok(s)
}

/// Index beyond which every `N_l(a1, a2)` vanishes.
pub fn pair_two_top(a1: i64, a2: i64) -> u32 {
    let mut top = val(2, disc(a1) - disc(a2)) + 2;
    for a in [a1, a2] {
        if a % 2 == 0 {
            top = top.max(even_shape(a).1 + 2);
        }
    }
    top + 6
}

/// Normalized count `|{f_{a1}(x) = f_{a2}(y) mod p^l}| / p^{3l}`.
pub fn pair_density_at_level(p: u64, l: u32, a1: i64, a2: i64) -> Result<BigRational> {
    let c = count_pair_prime_power(p, l, a1 as i128, a2 as i128)?;
    Ok(BigRational::new(BigInt::from(c), BigInt::from(p).pow(3 * l)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_examples() {
        // 7 does not divide 5 * 12 * (5 - 12)... it divides 5 - 12, so this is case (b)
        let v = delta_pair_odd(7, 3, 4).unwrap();
        assert_eq!(v, (rat(1, 1) + rat(1, 7)) * (rat(1, 1) - rat(1, 49)));
        let v = delta_pair_odd(11, 3, 4).unwrap();
        assert_eq!(v, rat(1, 1) - rat(legendre_unchecked(60, 11) as i64, 121));
        assert_eq!(delta_pair_odd(5, 3, 3), Err(MarkoffError::DegeneratePair(3, 3)));
        assert_eq!(delta_pair_odd(5, 3, -3), Err(MarkoffError::DegeneratePair(3, -3)));
        assert_eq!(delta_pair_odd(5, 2, 7), Err(MarkoffError::DegeneratePair(2, 7)));
        assert!(delta_pair_odd(2, 3, 5).is_err());
    }

    #[test]
    fn two_adic_against_counts() {
        for a1 in 3..=20i64 {
            for a2 in a1 + 1..=22 {
                if check_pair(a1, a2).is_err() {
                    continue;
                }
                let top = pair_two_top(a1, a2);
                let counted = pair_density_at_level(2, top + 2, a1, a2).unwrap();
                assert_eq!(delta_pair_two(a1, a2).unwrap(), counted, "({a1}, {a2})");
            }
        }
    }

    #[test]
    fn two_adic_examples() {
        // both odd, v2(21 - 5) = 4
        assert_eq!(delta_pair_two(3, 5).unwrap(), rat(3, 2) * (rat(1, 1) - rat(1, 32)));
        assert_eq!(delta_pair_two(3, 5).unwrap(), rat(93, 64));
    }
}
