use num_bigint::BigInt;

use super::factor;
use super::{RingDescriptor, RingElement, RingError};

/// Default bound on `b` in the Pell search.
pub const PELL_SEARCH_CAP: u64 = 1_000_000;

/// A unit of infinite order: the smallest inverted prime of `Z[1/m]`, or the
/// fundamental unit of `Z[sqrt d]`.
pub fn infinite_order_unit(ring: RingDescriptor) -> Result<RingElement, RingError> {
    infinite_order_unit_with_cap(ring, PELL_SEARCH_CAP)
}

/// Like [`infinite_order_unit`]; the Pell search tries `b = 1..=cap` and
/// takes the first `b` for which `d b^2 - 1` or `d b^2 + 1` is a square.
pub fn infinite_order_unit_with_cap(ring: RingDescriptor, cap: u64) -> Result<RingElement, RingError> {
    match ring {
        RingDescriptor::Integers => Err(RingError::NoInfiniteOrderUnit(ring)),
        RingDescriptor::Localized { .. } => {
            let p = ring.inverted_primes()[0];
            Ok(RingElement::from_int(ring, p as i64))
        }
        RingDescriptor::Quadratic { d } => {
            let d_big = BigInt::from(d);
            for b in 1..=cap {
                let b = BigInt::from(b);
                let db2 = &d_big * &b * &b;
                for candidate in [&db2 - 1u32, &db2 + 1u32] {
                    if let Some(a) = factor::exact_sqrt(&candidate) {
                        return Ok(RingElement::from_quadratic(ring, a, b).expect("quadratic ring"));
                    }
                }
            }
            Err(RingError::PellSearchExhausted { d, cap })
        }
    }
}
