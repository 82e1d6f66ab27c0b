use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::factor;
use super::lattice::Hnf2;
use super::{PrincipalIdeal, RingDescriptor, RingElement, RingError};

/// Hard ceiling on the iterated-multiplication fallback of [`QuotientRing::unit_order`].
pub const BRUTE_FORCE_ORDER_CAP: u64 = 100_000_000;

/// A canonical coset representative of `R / gR`.
///
/// The coordinates live in the box `[0, alpha) x [0, gamma)` of the
/// quotient's Hermite basis; for `Z` and `Z[1/m]` the second coordinate is
/// always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    x: BigInt,
    y: BigInt,
}

impl Residue {
    pub fn coordinates(&self) -> (&BigInt, &BigInt) {
        (&self.x, &self.y)
    }
}

/// The finite ring `R / gR`.
///
/// For `Z[1/m]` this is `Z / c0 Z` where `c0` is the generator's numerator
/// with the inverted primes stripped. For `Z[sqrt d]` the ideal is the
/// lattice spanned by `g` and `g sqrt(d)`, and representatives are taken in
/// the box below its Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientRing {
    modulus: PrincipalIdeal,
    basis: Hnf2,
}

impl QuotientRing {
    pub fn new(modulus: PrincipalIdeal) -> Self {
        let g = modulus.generator();
        let basis = match g.ring() {
            RingDescriptor::Quadratic { d } => {
                let (a, b) = g.as_quadratic().expect("quadratic ring");
                Hnf2::from_generators(&[(a.clone(), b.clone()), (b * BigInt::from(d), a.clone())])
                    .expect("nonzero ideal has full rank")
            }
            ring => {
                let (num, _) = g.as_fraction().expect("rational ring");
                Hnf2 {
                    alpha: factor::strip_primes(num, &ring.inverted_primes()),
                    beta: BigInt::zero(),
                    gamma: BigInt::one(),
                }
            }
        };
        QuotientRing { modulus, basis }
    }

    pub fn of(generator: RingElement) -> Result<Self, RingError> {
        Ok(Self::new(PrincipalIdeal::new(generator)?))
    }

    pub fn ring(&self) -> RingDescriptor {
        self.modulus.ring()
    }

    pub fn modulus(&self) -> &PrincipalIdeal {
        &self.modulus
    }

    pub fn basis(&self) -> &Hnf2 {
        &self.basis
    }

    /// `|R / gR|`
    pub fn index(&self) -> BigInt {
        self.basis.determinant()
    }

    fn d(&self) -> BigInt {
        match self.ring() {
            RingDescriptor::Quadratic { d } => BigInt::from(d),
            _ => BigInt::zero(),
        }
    }

    fn make(&self, x: BigInt, y: BigInt) -> Residue {
        let (x, y) = self.basis.reduce(&x, &y);
        Residue { x, y }
    }

    pub fn reduce(&self, value: &RingElement) -> Result<Residue, RingError> {
        self.ring().ensure_same(&value.ring())?;
        if let Some((a, b)) = value.as_quadratic() {
            return Ok(self.make(a.clone(), b.clone()));
        }
        let (num, den) = value.as_fraction().expect("rational ring");
        let modulus = &self.basis.alpha;
        if modulus.is_one() {
            return Ok(self.zero());
        }
        let inv = factor::mod_inverse(den, modulus).expect("denominators are units modulo c0");
        Ok(self.make(num * inv, BigInt::zero()))
    }

    pub fn lift(&self, r: &Residue) -> RingElement {
        RingElement::from_quadratic(self.ring(), r.x.clone(), r.y.clone()).expect("residue belongs to this ring")
    }

    pub fn zero(&self) -> Residue {
        Residue { x: BigInt::zero(), y: BigInt::zero() }
    }

    pub fn one(&self) -> Residue {
        self.make(BigInt::one(), BigInt::zero())
    }

    pub fn add(&self, r: &Residue, s: &Residue) -> Residue {
        self.make(&r.x + &s.x, &r.y + &s.y)
    }

    pub fn sub(&self, r: &Residue, s: &Residue) -> Residue {
        self.make(&r.x - &s.x, &r.y - &s.y)
    }

    pub fn neg(&self, r: &Residue) -> Residue {
        self.make(-&r.x, -&r.y)
    }

    pub fn mul(&self, r: &Residue, s: &Residue) -> Residue {
        let x = &r.x * &s.x + self.d() * &r.y * &s.y;
        let y = &r.x * &s.y + &r.y * &s.x;
        self.make(x, y)
    }

    pub fn pow(&self, r: &Residue, e: &BigUint) -> Residue {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, r);
            }
        }
        acc
    }

    pub fn is_unit(&self, r: &Residue) -> bool {
        match self.ring() {
            RingDescriptor::Quadratic { d } => {
                let b = &self.basis;
                let span = [
                    (b.alpha.clone(), b.beta.clone()),
                    (BigInt::zero(), b.gamma.clone()),
                    (r.x.clone(), r.y.clone()),
                    (&r.y * BigInt::from(d), r.x.clone()),
                ];
                Hnf2::from_generators(&span).is_some_and(|h| h.determinant().is_one())
            }
            _ => r.x.gcd(&self.basis.alpha).is_one(),
        }
    }

    /// All residues in canonical order (lazy; the quotient may be large).
    pub fn residues(&self) -> impl Iterator<Item = Residue> + '_ {
        let alpha = self.basis.alpha.clone();
        let gamma = self.basis.gamma.clone();
        let upto = |end: BigInt| std::iter::successors(Some(BigInt::zero()), |v| Some(v + 1u32)).take_while(move |v| *v < end);
        upto(alpha).flat_map(move |x| upto(gamma.clone()).map(move |y| Residue { x: x.clone(), y }))
    }

    /// Position of `r` in [`QuotientRing::residues`] order.
    pub fn residue_position(&self, r: &Residue) -> Option<usize> {
        (&r.x * &self.basis.gamma + &r.y).to_usize()
    }

    pub fn residue_at(&self, position: usize) -> Residue {
        let (x, y) = BigInt::from(position).div_rem(&self.basis.gamma);
        Residue { x, y }
    }

    /// A multiple of the exponent of `(R/gR)*` together with the primes that
    /// may divide it, computed from the factorization of the generator's norm.
    fn unit_group_multiple(&self) -> Option<(BigUint, BTreeSet<u128>)> {
        let mut total = BigUint::one();
        let mut primes = BTreeSet::new();
        match self.ring() {
            RingDescriptor::Quadratic { d } => {
                // gR contains N(g)R, and (R/nR)* maps onto (R/gR)*
                let n = self.modulus.generator().norm();
                for (p, e) in factor::factor_bigint(&n)? {
                    let pb = BigUint::from(p);
                    let local = if p == 2 || (d as u128).is_multiple_of(p) {
                        &pb * (&pb - 1u32)
                    } else if BigUint::from(d).modpow(&((&pb - 1u32) / 2u32), &pb).is_one() {
                        (&pb - 1u32) * (&pb - 1u32)
                    } else {
                        &pb * &pb - 1u32
                    };
                    total *= pb.pow(2 * (e - 1)) * local;
                    primes.insert(p);
                    primes.extend(factor::prime_divisors(p - 1)?);
                    primes.extend(factor::prime_divisors(p + 1)?);
                }
            }
            _ => {
                for (p, e) in factor::factor_bigint(&self.basis.alpha)? {
                    let pb = BigUint::from(p);
                    total *= pb.pow(e - 1) * (&pb - 1u32);
                    primes.insert(p);
                    primes.extend(factor::prime_divisors(p - 1)?);
                }
            }
        }
        Some((total, primes))
    }

    /// Multiplicative order of `x` modulo the ideal.
    ///
    /// Starts from a multiple of the unit group's exponent and strips prime
    /// factors; if the generator cannot be factored it falls back to
    /// iterated multiplication capped at the index (and at
    /// [`BRUTE_FORCE_ORDER_CAP`]).
    pub fn unit_order(&self, x: &RingElement) -> Result<u64, RingError> {
        let r = self.reduce(x)?;
        if self.index().is_one() {
            return Ok(1);
        }
        if !self.is_unit(&r) {
            return Err(RingError::NotUnitInQuotient(format!("{x} mod {}", self.modulus)));
        }
        let one = self.one();
        let Some((multiple, primes)) = self.unit_group_multiple() else {
            return self.unit_order_by_iteration(&r);
        };
        if self.pow(&r, &multiple) != one {
            return Err(RingError::OrderSearchExhausted(format!(
                "{x} mod {}: x^{multiple} != 1",
                self.modulus
            )));
        }
        let mut k = multiple;
        for p in primes {
            let p = BigUint::from(p);
            while (&k % &p).is_zero() {
                let smaller = &k / &p;
                if self.pow(&r, &smaller) != one {
                    break;
                }
                k = smaller;
            }
        }
        k.to_u64()
            .ok_or_else(|| RingError::OrderSearchExhausted(format!("order {k} does not fit in 64 bits")))
    }

    fn unit_order_by_iteration(&self, r: &Residue) -> Result<u64, RingError> {
        let cap = self.index().to_u64().unwrap_or(u64::MAX).min(BRUTE_FORCE_ORDER_CAP);
        let one = self.one();
        let mut acc = r.clone();
        for k in 1..=cap {
            if acc == one {
                return Ok(k);
            }
            acc = self.mul(&acc, r);
        }
        Err(RingError::OrderSearchExhausted(format!("{cap} multiplications")))
    }

    pub fn residue_text(&self, r: &Residue) -> String {
        self.lift(r).to_string()
    }
}

impl fmt::Display for QuotientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.ring(), self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(r: &str, s: &str) -> RingElement {
        RingElement::parse(r.parse().unwrap(), s).unwrap()
    }
    fn q(r: &str, g: &str) -> QuotientRing {
        QuotientRing::of(el(r, g)).unwrap()
    }

    #[test]
    fn indices() {
        assert_eq!(q("Z[1/2]", "3").index(), BigInt::from(3));
        assert_eq!(q("Z[1/2]", "9").index(), BigInt::from(9));
        assert_eq!(q("Z[1/2]", "12").index(), BigInt::from(3));
        assert_eq!(q("Z[1/2]", "1/8").index(), BigInt::from(1));
        assert_eq!(q("Z", "-12").index(), BigInt::from(12));
        assert_eq!(q("Z[sqrt2]", "3").index(), BigInt::from(9));
        assert_eq!(q("Z[sqrt2]", "1+sqrt(2)").index(), BigInt::from(1));
        assert_eq!(q("Z[sqrt2]", "2+sqrt(2)").index(), BigInt::from(2));
        assert_eq!(QuotientRing::of(el("Z", "0")).unwrap_err(), RingError::ZeroIdeal);
    }

    #[test]
    fn residue_enumeration_matches_index() {
        for (r, g) in [("Z[1/2]", "9"), ("Z[sqrt2]", "3"), ("Z[sqrt3]", "1+2*sqrt(3)"), ("Z[1/6]", "35/6")] {
            let quo = q(r, g);
            let all: Vec<_> = quo.residues().collect();
            assert_eq!(BigInt::from(all.len()), quo.index());
            for (i, res) in all.iter().enumerate() {
                assert_eq!(quo.residue_position(res), Some(i));
                assert_eq!(&quo.residue_at(i), res);
                assert_eq!(&quo.reduce(&quo.lift(res)).unwrap(), res);
            }
        }
    }

    #[test]
    fn reduction_respects_ideal() {
        let quo = q("Z[1/2]", "9");
        let x = el("Z[1/2]", "5/4");
        let shifted = &x + &el("Z[1/2]", "27/2");
        assert_eq!(quo.reduce(&x).unwrap(), quo.reduce(&shifted).unwrap());
        // 1/4 = 7 mod 9 since 4 * 7 = 28
        assert_eq!(quo.residue_text(&quo.reduce(&el("Z[1/2]", "1/4")).unwrap()), "7");
    }

    #[test]
    fn orders_of_units() {
        assert_eq!(q("Z[1/2]", "9").unit_order(&el("Z[1/2]", "2")).unwrap(), 6);
        assert_eq!(q("Z[1/2]", "9").unit_order(&el("Z[1/2]", "1")).unwrap(), 1);
        assert_eq!(q("Z[sqrt2]", "3").unit_order(&el("Z[sqrt2]", "1+sqrt(2)")).unwrap(), 8);
        assert_eq!(q("Z[1/2]", "1").unit_order(&el("Z[1/2]", "2")).unwrap(), 1);
    }

    #[test]
    fn non_units_are_rejected() {
        let err = q("Z[1/2]", "9").unit_order(&el("Z[1/2]", "3")).unwrap_err();
        assert_eq!(err.name(), "NotUnitInQuotient");
        let err = q("Z[sqrt2]", "7").unit_order(&el("Z[sqrt2]", "3+sqrt(2)")).unwrap_err();
        assert_eq!(err.name(), "NotUnitInQuotient");
    }

    #[test]
    fn iteration_fallback_agrees() {
        let quo = q("Z[sqrt2]", "15");
        let r = quo.reduce(&el("Z[sqrt2]", "1+sqrt(2)")).unwrap();
        assert_eq!(quo.unit_order_by_iteration(&r).unwrap(), quo.unit_order(&quo.lift(&r)).unwrap());
    }
}
