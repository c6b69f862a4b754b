//! Quadratic characters.

use crate::arith::mod_pow;
use crate::error::{MarkoffError, Result};

/// Legendre symbol `(a/p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i128, p: u64) -> Result<i8> {
    if p < 3 || p % 2 == 0 || !crate::arith::is_prime(p) {
        return Err(MarkoffError::InvalidPrime(p as i64));
    }
    Ok(legendre_unchecked(a, p))
}

/// Legendre symbol without the primality check; `p` must be an odd prime.
pub fn legendre_unchecked(a: i128, p: u64) -> i8 {
    let r = a.rem_euclid(p as i128) as u128;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p as u128 - 1) / 2, p as u128) == 1 {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u128) -> i8 {
    assert!(n % 2 == 1, "jacobi needs an odd modulus");
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)` for any integer `n`.
pub fn kronecker(a: i128, n: i128) -> i8 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut t = 1i8;
    let mut m = n;
    if m < 0 {
        m = -m;
        if a < 0 {
            t = -t;
        }
    }
    let tz = m.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a/2) = chi8(a)
        if tz % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            t = -t;
        }
        m >>= tz;
    }
    t * jacobi(a, m as u128)
}

/// The character mod 4.
pub fn chi4(x: i128) -> i8 {
    match x.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// The character mod 8 that is 1 on `±1`.
pub fn chi8(x: i128) -> i8 {
    match x.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// `(-8/x)`, i.e. `chi4 * chi8`.
pub fn chi4_chi8(x: i128) -> i8 {
    chi4(x) * chi8(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(legendre(2, 5).unwrap(), -1);
        assert_eq!(legendre(4, 5).unwrap(), 1);
        assert_eq!(legendre(10, 5).unwrap(), 0);
        assert!(legendre(3, 9).is_err());
        assert!(legendre(3, 2).is_err());
        assert_eq!(chi4(3), -1);
        assert_eq!(chi8(7), 1);
        assert_eq!(chi8(-1), 1);
        assert_eq!(chi4(-1), -1);
    }

    #[test]
    fn jacobi_matches_legendre() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -50i128..50 {
                assert_eq!(jacobi(a, p as u128), legendre_unchecked(a, p));
            }
        }
        // multiplicative in the modulus
        for a in -30i128..30 {
            assert_eq!(jacobi(a, 15), jacobi(a, 3) * jacobi(a, 5));
        }
    }

    #[test]
    fn kronecker_at_two() {
        for a in -40i128..40 {
            let expect = if a % 2 == 0 { 0 } else { chi8(a) };
            assert_eq!(kronecker(a, 2), expect);
            assert_eq!(kronecker(a, 8), expect);
            assert_eq!(kronecker(a, 4), if a % 2 == 0 { 0 } else { 1 });
        }
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(5, 12), kronecker(5, 4) * kronecker(5, 3));
    }
}
