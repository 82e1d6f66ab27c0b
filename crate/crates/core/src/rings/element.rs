use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::factor;
use super::{RingDescriptor, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// `num / den`, reduced, `den > 0` and smooth over the inverted primes.
    Frac { num: BigInt, den: BigInt },
    /// `a + b sqrt(d)`
    Quad { a: BigInt, b: BigInt },
}

/// An exact element of a [`RingDescriptor`] ring in canonical form.
///
/// Equal values always have identical representations, so the derived
/// `PartialEq`/`Hash` are value equality. The arithmetic operators panic when
/// the operands come from different rings; the `checked_*` methods report
/// [`RingError::MixedRings`] instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: RingDescriptor,
    repr: Repr,
}

impl RingElement {
    pub fn zero(ring: RingDescriptor) -> Self {
        Self::from_bigint(ring, BigInt::zero())
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::from_bigint(ring, BigInt::one())
    }

    pub fn from_int(ring: RingDescriptor, n: i64) -> Self {
        Self::from_bigint(ring, BigInt::from(n))
    }

    pub fn from_bigint(ring: RingDescriptor, n: BigInt) -> Self {
        let repr = match ring {
            RingDescriptor::Quadratic { .. } => Repr::Quad { a: n, b: BigInt::zero() },
            _ => Repr::Frac { num: n, den: BigInt::one() },
        };
        RingElement { ring, repr }
    }

    /// `num / den` in `Z` or `Z[1/m]`; `None` if the fraction is not in the ring.
    pub fn from_fraction(ring: RingDescriptor, num: BigInt, den: BigInt) -> Option<Self> {
        if ring.is_quadratic() {
            if den.is_one() {
                return Some(Self::from_bigint(ring, num));
            }
            return None;
        }
        Self::frac_checked(ring, num, den)
    }

    /// `a + b sqrt(d)`; `None` unless the ring is quadratic (or `b = 0`).
    pub fn from_quadratic(ring: RingDescriptor, a: BigInt, b: BigInt) -> Option<Self> {
        match ring {
            RingDescriptor::Quadratic { .. } => Some(RingElement { ring, repr: Repr::Quad { a, b } }),
            _ if b.is_zero() => Some(Self::from_bigint(ring, a)),
            _ => None,
        }
    }

    fn frac_checked(ring: RingDescriptor, num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / &g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if !den.is_one() && !factor::is_smooth_over(&den, &ring.inverted_primes()) {
            return None;
        }
        Some(RingElement { ring, repr: Repr::Frac { num, den } })
    }

    fn frac_unchecked(ring: RingDescriptor, num: BigInt, den: BigInt) -> Self {
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / &g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        RingElement { ring, repr: Repr::Frac { num, den } }
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    /// `(numerator, denominator)` for the integer and localized rings.
    pub fn as_fraction(&self) -> Option<(&BigInt, &BigInt)> {
        match &self.repr {
            Repr::Frac { num, den } => Some((num, den)),
            Repr::Quad { .. } => None,
        }
    }

    /// `(a, b)` with value `a + b sqrt(d)` for quadratic rings.
    pub fn as_quadratic(&self) -> Option<(&BigInt, &BigInt)> {
        match &self.repr {
            Repr::Quad { a, b } => Some((a, b)),
            Repr::Frac { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Frac { num, .. } => num.is_zero(),
            Repr::Quad { a, b } => a.is_zero() && b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.ring)
    }

    fn d(&self) -> BigInt {
        match self.ring {
            RingDescriptor::Quadratic { d } => BigInt::from(d),
            _ => BigInt::zero(),
        }
    }

    /// Field norm `a^2 - d b^2` for quadratic rings; the element itself
    /// (as a rational `num/den`, numerator returned) otherwise.
    pub fn norm(&self) -> BigInt {
        match &self.repr {
            Repr::Quad { a, b } => a * a - self.d() * b * b,
            Repr::Frac { num, .. } => num.clone(),
        }
    }

    /// Galois conjugate `a - b sqrt(d)`; identity on the rational rings.
    pub fn conjugate(&self) -> Self {
        match &self.repr {
            Repr::Quad { a, b } => RingElement { ring: self.ring, repr: Repr::Quad { a: a.clone(), b: -b } },
            Repr::Frac { .. } => self.clone(),
        }
    }

    /// Size used for the height bounds in randomized suites.
    pub fn height(&self) -> BigInt {
        match &self.repr {
            Repr::Frac { num, den } => num.abs().max(den.clone()),
            Repr::Quad { a, b } => a.abs().max(b.abs()),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.ring.ensure_same(&other.ring)?;
        Ok(self.add_same(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.ring.ensure_same(&other.ring)?;
        Ok(self.add_same(&other.neg_ref()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.ring.ensure_same(&other.ring)?;
        Ok(self.mul_same(other))
    }

    fn add_same(&self, other: &Self) -> Self {
        match (&self.repr, &other.repr) {
            (Repr::Frac { num: n1, den: d1 }, Repr::Frac { num: n2, den: d2 }) => {
                if d1 == d2 {
                    Self::frac_unchecked(self.ring, n1 + n2, d1.clone())
                } else {
                    Self::frac_unchecked(self.ring, n1 * d2 + n2 * d1, d1 * d2)
                }
            }
            (Repr::Quad { a: a1, b: b1 }, Repr::Quad { a: a2, b: b2 }) => RingElement {
                ring: self.ring,
                repr: Repr::Quad { a: a1 + a2, b: b1 + b2 },
            },
            _ => unreachable!("representation matches ring"),
        }
    }

    fn mul_same(&self, other: &Self) -> Self {
        match (&self.repr, &other.repr) {
            (Repr::Frac { num: n1, den: d1 }, Repr::Frac { num: n2, den: d2 }) => {
                Self::frac_unchecked(self.ring, n1 * n2, d1 * d2)
            }
            (Repr::Quad { a: a1, b: b1 }, Repr::Quad { a: a2, b: b2 }) => RingElement {
                ring: self.ring,
                repr: Repr::Quad { a: a1 * a2 + self.d() * b1 * b2, b: a1 * b2 + a2 * b1 },
            },
            _ => unreachable!("representation matches ring"),
        }
    }

    fn neg_ref(&self) -> Self {
        let repr = match &self.repr {
            Repr::Frac { num, den } => Repr::Frac { num: -num, den: den.clone() },
            Repr::Quad { a, b } => Repr::Quad { a: -a, b: -b },
        };
        RingElement { ring: self.ring, repr }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_same(&base);
            }
        }
        acc
    }

    /// `self^e` for any integer `e`; `None` if `e < 0` and `self` is not a unit.
    pub fn pow_signed(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            Some(self.unit_inverse()?.pow(e.unsigned_abs()))
        }
    }

    /// The inverse if `self` is a unit of the ring.
    pub fn unit_inverse(&self) -> Option<Self> {
        match &self.repr {
            Repr::Frac { num, den } => {
                if num.is_zero() || !factor::strip_primes(num, &self.ring.inverted_primes()).is_one() {
                    return None;
                }
                Some(Self::frac_unchecked(self.ring, den.clone(), num.clone()))
            }
            Repr::Quad { a, b } => {
                let n = self.norm();
                if n.abs().is_one() {
                    Some(RingElement { ring: self.ring, repr: Repr::Quad { a: a * &n, b: -b * &n } })
                } else {
                    None
                }
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        self.unit_inverse().is_some()
    }

    /// `self / divisor` if the quotient lies in the ring.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Option<Self>, RingError> {
        self.ring.ensure_same(&divisor.ring)?;
        if divisor.is_zero() {
            return Ok(if self.is_zero() { Some(Self::zero(self.ring)) } else { None });
        }
        Ok(match (&self.repr, &divisor.repr) {
            (Repr::Frac { num: n1, den: d1 }, Repr::Frac { num: n2, den: d2 }) => {
                Self::frac_checked(self.ring, n1 * d2, d1 * n2)
            }
            (Repr::Quad { .. }, Repr::Quad { .. }) => {
                let n = divisor.norm();
                let Repr::Quad { a, b } = self.mul_same(&divisor.conjugate()).repr else {
                    unreachable!()
                };
                let (qa, ra) = a.div_rem(&n);
                let (qb, rb) = b.div_rem(&n);
                if ra.is_zero() && rb.is_zero() {
                    Some(RingElement { ring: self.ring, repr: Repr::Quad { a: qa, b: qb } })
                } else {
                    None
                }
            }
            _ => unreachable!("representation matches ring"),
        })
    }

    /// Parses the text syntax: `7`, `-3/4`, `5/2^3`, `1+2*sqrt(2)`, `-sqrt(2)`.
    pub fn parse(ring: RingDescriptor, text: &str) -> Result<Self, RingError> {
        let err = || RingError::Parse { ring, text: text.to_string() };
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        match ring {
            RingDescriptor::Quadratic { d } => parse_quadratic(ring, d, &s).ok_or_else(err),
            _ => {
                let (num, den) = match s.split_once('/') {
                    None => (parse_int(&s).ok_or_else(err)?, BigInt::one()),
                    Some((n, rest)) => (parse_int(n).ok_or_else(err)?, parse_power(rest).ok_or_else(err)?),
                };
                Self::frac_checked(ring, num, den).ok_or_else(err)
            }
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    let body = digits.strip_prefix('-').unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// `b` or `b^k` with nonnegative `k`.
fn parse_power(s: &str) -> Option<BigInt> {
    match s.split_once('^') {
        None => parse_int(s),
        Some((base, exp)) => {
            let exp: u32 = exp.parse().ok()?;
            Some(num_traits::pow(parse_int(base)?, exp as usize))
        }
    }
}

fn parse_quadratic(ring: RingDescriptor, d: u64, s: &str) -> Option<RingElement> {
    let root = format!("sqrt({d})");
    let Some(pos) = s.find(&root) else {
        return RingElement::from_quadratic(ring, parse_int(s)?, BigInt::zero());
    };
    if pos + root.len() != s.len() {
        return None;
    }
    let head = &s[..pos];
    // split `head` = "<a><sign><b>*" at the last sign that is not leading
    let head = head.strip_suffix('*').unwrap_or(head);
    let split = head
        .char_indices()
        .rev()
        .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i);
    let (a_text, b_text) = match split {
        Some(i) => (&head[..i], &head[i..]),
        None => ("0", head),
    };
    let b = match b_text {
        "" | "+" => BigInt::one(),
        "-" => -BigInt::one(),
        t => parse_int(t)?,
    };
    // `2sqrt(2)` without `*` is accepted, but a trailing `*` with no coefficient is not
    if s[..pos].ends_with('*') && matches!(b_text, "" | "+" | "-") {
        return None;
    }
    RingElement::from_quadratic(ring, parse_int(a_text)?, b)
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Frac { num, den } if den.is_one() => write!(f, "{num}"),
            Repr::Frac { num, den } => write!(f, "{num}/{den}"),
            Repr::Quad { a, b } => {
                let d = self.d();
                if b.is_zero() {
                    write!(f, "{a}")
                } else if a.is_zero() {
                    write!(f, "{b}*sqrt({d})")
                } else if b.is_negative() {
                    write!(f, "{a}-{}*sqrt({d})", -b)
                } else {
                    write!(f, "{a}+{b}*sqrt({d})")
                }
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&RingElement> for &RingElement {
            type Output = RingElement;
            fn $method(self, rhs: &RingElement) -> RingElement {
                assert_eq!(self.ring, rhs.ring, "arithmetic across different rings");
                $body(self, rhs)
            }
        }
        impl $trait<RingElement> for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: RingElement) -> RingElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RingElement> for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: &RingElement) -> RingElement {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x: &RingElement, y: &RingElement| x.add_same(y));
forward_binop!(Sub, sub, |x: &RingElement, y: &RingElement| x.add_same(&y.neg_ref()));
forward_binop!(Mul, mul, |x: &RingElement, y: &RingElement| x.mul_same(y));

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.neg_ref()
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.neg_ref()
    }
}
