//! Seeded random elements, units and matrices for experiments and test suites.

use num_bigint::BigInt;
use rand::Rng;

use crate::rings::{infinite_order_unit, RingDescriptor, RingElement};
use crate::sl2::Mat2;

/// Integer, or `a + b sqrt(d)`, with coordinates in `[-bound, bound]`.
pub fn small_element<R: Rng>(ring: RingDescriptor, rng: &mut R, bound: i64) -> RingElement {
    let a = rng.gen_range(-bound..=bound);
    if ring.is_quadratic() {
        let b = rng.gen_range(-bound..=bound);
        RingElement::from_quadratic(ring, BigInt::from(a), BigInt::from(b)).expect("quadratic ring")
    } else {
        RingElement::from_int(ring, a)
    }
}

pub fn small_nonzero<R: Rng>(ring: RingDescriptor, rng: &mut R, bound: i64) -> RingElement {
    loop {
        let x = small_element(ring, rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

/// A nonzero non-unit with coordinates in `[-bound, bound]`.
pub fn small_non_unit<R: Rng>(ring: RingDescriptor, rng: &mut R, bound: i64) -> RingElement {
    loop {
        let x = small_nonzero(ring, rng, bound);
        if !x.is_unit() {
            return x;
        }
    }
}

/// `num / m^e` for `Z[1/m]` with `|num| <= bound` and `e <= max_exp`; plain
/// [`small_element`] elsewhere.
pub fn small_fraction<R: Rng>(ring: RingDescriptor, rng: &mut R, bound: i64, max_exp: u32) -> RingElement {
    match ring {
        RingDescriptor::Localized { m } => {
            let num = BigInt::from(rng.gen_range(-bound..=bound));
            let den = BigInt::from(m).pow(rng.gen_range(0..=max_exp));
            RingElement::from_fraction(ring, num, den).expect("m-power denominator")
        }
        _ => small_element(ring, rng, bound),
    }
}

/// `+-` a product of inverted primes, or `+-v^k` for the fundamental unit,
/// with every exponent in `[-max_exp, max_exp]`.
pub fn random_unit<R: Rng>(ring: RingDescriptor, rng: &mut R, max_exp: i64) -> RingElement {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut u = RingElement::from_int(ring, sign);
    match ring {
        RingDescriptor::Integers => {}
        RingDescriptor::Localized { .. } => {
            for p in ring.inverted_primes() {
                let e = rng.gen_range(-max_exp..=max_exp);
                let p = RingElement::from_int(ring, p as i64);
                u = u * p.pow_signed(e).expect("inverted primes are units");
            }
        }
        RingDescriptor::Quadratic { .. } => {
            let v = infinite_order_unit(ring).expect("real quadratic rings have a fundamental unit");
            let e = rng.gen_range(-max_exp..=max_exp);
            u = u * v.pow_signed(e).expect("fundamental unit");
        }
    }
    u
}

/// A product of `1..=max_len` elementary matrices with arguments drawn by `arg`.
pub fn elementary_product<R: Rng>(
    ring: RingDescriptor,
    rng: &mut R,
    max_len: usize,
    mut arg: impl FnMut(&mut R) -> RingElement,
) -> Mat2 {
    let len = rng.gen_range(1..=max_len);
    let mut m = Mat2::identity(ring);
    for _ in 0..len {
        let x = arg(rng);
        let e = if rng.gen_bool(0.5) { Mat2::upper(x) } else { Mat2::lower(x) };
        m = &m * &e;
    }
    m
}
