//! Small integer helpers: trial-division factoring, prime stripping, squares.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Trial division bound; cofactors below its square are known to be prime.
pub const TRIAL_LIMIT: u64 = 10_000_000;

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    trial_division(n as u128, None)
        .expect("unbounded trial division always finishes")
        .into_iter()
        .map(|(p, e)| (p as u64, e))
        .collect()
}

/// Full factorization of `n >= 1`, or `None` when a cofactor is too large to
/// certify by trial division up to [`TRIAL_LIMIT`].
pub fn factor_u128(n: u128) -> Option<Vec<(u128, u32)>> {
    trial_division(n, Some(TRIAL_LIMIT as u128))
}

fn trial_division(mut n: u128, limit: Option<u128>) -> Option<Vec<(u128, u32)>> {
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p <= n {
        if limit.is_some_and(|l| p > l) {
            return None;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Some(out)
}

pub fn factor_bigint(n: &BigInt) -> Option<Vec<(u128, u32)>> {
    factor_u128(n.magnitude().to_u128()?)
}

pub fn is_squarefree(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// `|n|` with every factor of the given primes removed.
pub fn strip_primes(n: &BigInt, primes: &[u64]) -> BigInt {
    let mut m = BigInt::from_biguint(Sign::Plus, n.magnitude().clone());
    if m.is_zero() {
        return m;
    }
    for &p in primes {
        let p = BigInt::from(p);
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            m = q;
        }
    }
    m
}

/// True if every prime factor of `n` (nonzero) lies in `primes`.
pub fn is_smooth_over(n: &BigInt, primes: &[u64]) -> bool {
    !n.is_zero() && strip_primes(n, primes).is_one()
}

pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r: BigUint = n.magnitude().sqrt();
    if &r * &r == *n.magnitude() {
        Some(BigInt::from(r))
    } else {
        None
    }
}

/// Inverse of `a` modulo `m > 0`, if it exists, in `[0, m)`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Distinct prime divisors of `n >= 1`.
pub fn prime_divisors(n: u128) -> Option<Vec<u128>> {
    Some(factor_u128(n)?.into_iter().map(|(p, _)| p).collect())
}
