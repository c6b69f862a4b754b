//! Small exact integer helpers shared by every module.

use crate::error::{MarkoffError, Result};

#[inline]
pub fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(MarkoffError::Overflow)
}

#[inline]
pub fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(MarkoffError::Overflow)
}

#[inline]
pub fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(MarkoffError::Overflow)
}

#[inline]
pub fn sq(a: i128) -> Result<i128> {
    mul(a, a)
}

/// Floor square root of a non-negative integer, checked so that
/// `r^2 <= n < (r+1)^2` holds.
pub fn isqrt(n: u128) -> u128 {
    let r = n.isqrt();
    debug_assert!(r * r <= n);
    debug_assert!(match (r + 1).checked_mul(r + 1) {
        Some(s) => s > n,
        None => true,
    });
    r
}

/// Square root of `n` if `n` is a perfect square.
pub fn exact_sqrt(n: i128) -> Option<u128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128);
    (r * r == n as u128).then_some(r)
}

pub fn is_square(n: i128) -> bool {
    exact_sqrt(n).is_some()
}

/// Exponent of the prime `p` in `n`. `n` must be non-zero.
pub fn val(p: u64, n: i128) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as i128;
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// `n` with every factor of `p` removed.
pub fn unit_part(p: u64, n: i128) -> i128 {
    let p = p as i128;
    let mut n = n;
    while n != 0 && n % p == 0 {
        n /= p;
    }
    n
}

/// Trial-division factorization, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes up to and including `n` (Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter_map(|(i, &b)| b.then_some(i as u64)).collect()
}

pub fn pow_u128(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp).ok_or(MarkoffError::Overflow)
}

/// Least non-negative residue.
#[inline]
pub fn modulo(a: i128, m: i128) -> i128 {
    a.rem_euclid(m)
}

pub fn mod_pow(mut b: u128, mut e: u128, m: u128) -> u128 {
    // m stays below 2^63 in every caller, so products fit
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (modulo(a, m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| modulo(s0, m))
}
