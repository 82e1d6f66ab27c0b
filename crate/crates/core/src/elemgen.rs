//! Writing `SL_2(R)` matrices as products of elementary matrices.
//!
//! [`decompose`] runs a Euclidean reduction of the first column with
//! per-ring division rules and falls back to a bounded breadth-first search
//! over small elementary moves when a division step fails to shrink the
//! column. Word lengths are measured, not bounded.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rings::{factor, PrincipalIdeal, QuotientRing, RingDescriptor, RingElement};
use crate::sl2::{Factor, GroupWord, Mat2, Position, Sl2Error};

pub const DEFAULT_BFS_DEPTH: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElemGenError {
    #[error(transparent)]
    Sl2(#[from] Sl2Error),
    #[error("{0} is not a unit")]
    NonUnit(String),
    #[error("no Euclidean strategy for {0}")]
    UnsupportedRing(RingDescriptor),
    #[error("breadth-first fallback found nothing within depth {0}")]
    SearchExhausted(usize),
}

impl ElemGenError {
    pub fn name(&self) -> &'static str {
        match self {
            ElemGenError::Sl2(e) => e.name(),
            ElemGenError::NonUnit(_) => "NonUnit",
            ElemGenError::UnsupportedRing(_) => "UnsupportedRing",
            ElemGenError::SearchExhausted(_) => "SearchExhausted",
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            ElemGenError::Sl2(e) => e.module(),
            _ => "elemgen",
        }
    }
}

impl From<crate::rings::RingError> for ElemGenError {
    fn from(e: crate::rings::RingError) -> Self {
        ElemGenError::Sl2(e.into())
    }
}

/// A verified factorization of `input` into elementary matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    input: Mat2,
    word: GroupWord,
}

impl Decomposition {
    /// Checks that `word` is purely elementary and evaluates to `input`.
    pub fn new(input: Mat2, word: GroupWord) -> Result<Self, ElemGenError> {
        assert!(word.is_elementary(), "decomposition words contain only elementary factors");
        let value = word.evaluate(input.ring())?;
        assert_eq!(value, input, "decomposition does not evaluate to its input");
        Ok(Decomposition { input, word })
    }

    pub fn input(&self) -> &Mat2 {
        &self.input
    }

    pub fn word(&self) -> &GroupWord {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }
}

fn elem(position: Position, x: RingElement) -> Factor {
    Factor::Elem { position, x }
}

/// The six-factor word `E12(u) E21(-1/u) E12(u) . E12(-1) E21(1) E12(-1)`
/// for `h(u)`, i.e. `w(u) w(1)^-1` with `w(u) = E12(u) E21(-1/u) E12(u)`.
pub fn h_decomposition(u: &RingElement) -> Result<Decomposition, ElemGenError> {
    let inv = u.unit_inverse().ok_or_else(|| ElemGenError::NonUnit(u.to_string()))?;
    let ring = u.ring();
    let one = RingElement::one(ring);
    let word = GroupWord::from_factors(vec![
        elem(Position::Upper, u.clone()),
        elem(Position::Lower, -inv),
        elem(Position::Upper, u.clone()),
        elem(Position::Upper, -&one),
        elem(Position::Lower, one.clone()),
        elem(Position::Upper, -&one),
    ]);
    Decomposition::new(Mat2::diagonal(u)?, word)
}

/// Per-ring Euclidean size and division.
trait Euclid {
    fn size(&self, x: &RingElement) -> BigInt;
    /// `q` with `size(a - q c) < size(c)` (for `c` a nonzero non-unit).
    fn quotient(&self, a: &RingElement, c: &RingElement) -> RingElement;
}

/// `n / m` rounded to the nearest integer, halves toward positive infinity.
fn round_div(n: &BigInt, m: &BigInt) -> BigInt {
    let (n, m) = if m.is_negative() { (-n, -m) } else { (n.clone(), m.clone()) };
    (BigInt::from(2) * n + &m).div_floor(&(BigInt::from(2) * m))
}

/// `Z` and `Z[1/m]`: the size is the numerator with the inverted primes
/// removed, so units have size 1 and are divided out exactly.
struct RationalEuclid {
    primes: Vec<u64>,
}

impl RationalEuclid {
    /// `(core, unit)` with `x = core * unit`, `core` an integer free of inverted primes.
    fn split(&self, x: &RingElement) -> (BigInt, RingElement) {
        let (num, _) = x.as_fraction().expect("rational ring");
        let mut core = factor::strip_primes(num, &self.primes);
        if num.is_negative() {
            core = -core;
        }
        let unit = x
            .divide_exact(&RingElement::from_bigint(x.ring(), core.clone()))
            .expect("same ring")
            .expect("core divides x");
        (core, unit)
    }
}

impl Euclid for RationalEuclid {
    fn size(&self, x: &RingElement) -> BigInt {
        factor::strip_primes(x.as_fraction().expect("rational ring").0, &self.primes)
    }

    fn quotient(&self, a: &RingElement, c: &RingElement) -> RingElement {
        let (a_core, a_unit) = self.split(a);
        let (c_core, c_unit) = self.split(c);
        let r = RingElement::from_bigint(a.ring(), round_div(&a_core, &c_core));
        r * a_unit * c_unit.unit_inverse().expect("unit part")
    }
}

/// Norm-Euclidean `Z[sqrt 2]` and `Z[sqrt 3]`: round `a conj(c) / N(c)` coordinatewise.
struct QuadraticEuclid;

impl Euclid for QuadraticEuclid {
    fn size(&self, x: &RingElement) -> BigInt {
        x.norm().abs()
    }

    fn quotient(&self, a: &RingElement, c: &RingElement) -> RingElement {
        let n = c.norm();
        let prod = a * &c.conjugate();
        let (x, y) = prod.as_quadratic().expect("quadratic ring");
        RingElement::from_quadratic(a.ring(), round_div(x, &n), round_div(y, &n)).expect("quadratic ring")
    }
}

fn strategy_for(ring: RingDescriptor) -> Result<Box<dyn Euclid>, ElemGenError> {
    match ring {
        RingDescriptor::Integers | RingDescriptor::Localized { .. } => {
            Ok(Box::new(RationalEuclid { primes: ring.inverted_primes() }))
        }
        RingDescriptor::Quadratic { d: 2 | 3 } => Ok(Box::new(QuadraticEuclid)),
        _ => Err(ElemGenError::UnsupportedRing(ring)),
    }
}

/// Row operations applied so far, and the current matrix.
struct Reduction {
    current: Mat2,
    ops: Vec<(Position, RingElement)>,
}

impl Reduction {
    /// Left-multiplies by `E_pos(q)`: row1 += q row2 (upper) or row2 += q row1 (lower).
    fn apply(&mut self, position: Position, q: RingElement) {
        if q.is_zero() {
            return;
        }
        let e = match position {
            Position::Upper => Mat2::upper(q.clone()),
            Position::Lower => Mat2::lower(q.clone()),
        };
        self.current = &e * &self.current;
        self.ops.push((position, q));
    }

    fn a(&self) -> &RingElement {
        self.current.a11()
    }

    fn c(&self) -> &RingElement {
        self.current.a21()
    }
}

/// Decomposes with the default breadth-first depth cap.
pub fn decompose(a: &Mat2) -> Result<Decomposition, ElemGenError> {
    decompose_with(a, DEFAULT_BFS_DEPTH)
}

pub fn decompose_with(a: &Mat2, bfs_depth: usize) -> Result<Decomposition, ElemGenError> {
    let ring = a.ring();
    let euclid = strategy_for(ring)?;
    let one = RingElement::one(ring);
    let mut red = Reduction { current: a.clone(), ops: Vec::new() };

    loop {
        let (a, c) = (red.a().clone(), red.c().clone());
        if c.is_zero() {
            // a is a unit; make c = 1 so the unit-corner branch can finish
            if a.is_one() {
                break;
            }
            red.apply(Position::Lower, a.unit_inverse().expect("a unit when c = 0"));
        } else if let Some(c_inv) = c.unit_inverse() {
            red.apply(Position::Upper, (&one - &a) * &c_inv);
            let c = red.c().clone();
            red.apply(Position::Lower, -c);
            break;
        } else if a.is_zero() {
            unreachable!("a = 0 forces c to be a unit");
        } else if let Some(a_inv) = a.unit_inverse() {
            if a.is_one() {
                red.apply(Position::Lower, -c);
                break;
            }
            red.apply(Position::Lower, (&one - &c) * &a_inv);
        } else {
            let (sa, sc) = (euclid.size(&a), euclid.size(&c));
            let before = sa.clone().min(sc.clone());
            let (position, q) = if sa >= sc {
                (Position::Upper, -euclid.quotient(&a, &c))
            } else {
                (Position::Lower, -euclid.quotient(&c, &a))
            };
            let (saved, applied) = (red.current.clone(), red.ops.len());
            red.apply(position, q);
            let after = column_size(euclid.as_ref(), red.a(), red.c());
            if after >= before {
                red.current = saved;
                red.ops.truncate(applied);
                for (position, q) in bfs_moves(euclid.as_ref(), &red.current, bfs_depth)? {
                    red.apply(position, q);
                }
            }
        }
    }

    // A = L1^-1 ... Lk^-1 E12(b)
    let mut word = GroupWord::new();
    for (position, q) in &red.ops {
        word.push(elem(*position, -q));
    }
    let b = red.current.a12().clone();
    if !b.is_zero() {
        word.push(elem(Position::Upper, b));
    }
    Decomposition::new(a.clone(), word)
}

/// Smallest size among the nonzero entries of the first column.
fn column_size(euclid: &dyn Euclid, a: &RingElement, c: &RingElement) -> BigInt {
    [a, c]
        .into_iter()
        .filter(|x| !x.is_zero())
        .map(|x| euclid.size(x))
        .min()
        .unwrap_or_else(BigInt::zero)
}

fn small_arguments(ring: RingDescriptor) -> Vec<RingElement> {
    let mut out: Vec<RingElement> = [-1, 1, -2, 2].iter().map(|&n| RingElement::from_int(ring, n)).collect();
    if ring.is_quadratic() {
        for b in [-1, 1] {
            out.push(RingElement::from_quadratic(ring, BigInt::zero(), BigInt::from(b)).expect("quadratic"));
        }
    }
    out
}

/// Breadth-first search for a sequence of small row operations after which
/// the first column has a unit entry or a strictly smaller Euclidean size.
///
/// Moves are tried upper before lower, arguments in the fixed order of
/// [`small_arguments`], so the result is deterministic.
fn bfs_moves(euclid: &dyn Euclid, start: &Mat2, depth: usize) -> Result<Vec<(Position, RingElement)>, ElemGenError> {
    let ring = start.ring();
    let target = column_size(euclid, start.a11(), start.a21());
    let args = small_arguments(ring);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((start.a11().clone(), start.a21().clone()));
    queue.push_back((start.a11().clone(), start.a21().clone(), Vec::new()));
    while let Some((a, c, path)) = queue.pop_front() {
        if path.len() >= depth {
            continue;
        }
        for position in [Position::Upper, Position::Lower] {
            for q in &args {
                let (na, nc) = match position {
                    Position::Upper => (&a + &(q * &c), c.clone()),
                    Position::Lower => (a.clone(), &c + &(q * &a)),
                };
                let mut next: Vec<(Position, RingElement)> = path.clone();
                next.push((position, q.clone()));
                if na.is_unit() || nc.is_unit() || column_size(euclid, &na, &nc) < target {
                    return Ok(next);
                }
                if seen.insert((na.clone(), nc.clone())) {
                    queue.push_back((na, nc, next));
                }
            }
        }
    }
    Err(ElemGenError::SearchExhausted(depth))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthStats {
    pub count: usize,
    pub max: usize,
    pub mean: f64,
}

/// Decomposes every matrix and summarizes the word lengths. The maximum is
/// an empirical lower bound for the bounded-generation constant.
pub fn length_stats(sample: &[Mat2]) -> Result<LengthStats, ElemGenError> {
    let mut lengths = Vec::with_capacity(sample.len());
    for m in sample {
        lengths.push(decompose(m)?.length());
    }
    let max = lengths.iter().copied().max().unwrap_or(0);
    let mean = if lengths.is_empty() { 0.0 } else { lengths.iter().sum::<usize>() as f64 / lengths.len() as f64 };
    Ok(LengthStats { count: lengths.len(), max, mean })
}

/// Whether `a` maps to the identity in `SL_2(R / I)`.
///
/// Necessary, not sufficient, for membership in the normal closure
/// `E(2, R, I)`.
pub fn reduces_to_identity(a: &Mat2, ideal: &PrincipalIdeal) -> Result<bool, ElemGenError> {
    let q = QuotientRing::new(ideal.clone());
    Ok(a.reduce(&q)?.is_identity(&q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> RingDescriptor {
        s.parse().unwrap()
    }
    fn el(r: &str, s: &str) -> RingElement {
        RingElement::parse(ring(r), s).unwrap()
    }
    fn m(r: &str, s: &str) -> Mat2 {
        Mat2::parse(ring(r), s).unwrap()
    }

    #[test]
    fn rounding() {
        let r = |n: i64, m: i64| round_div(&BigInt::from(n), &BigInt::from(m));
        assert_eq!(r(7, 2), BigInt::from(4));
        assert_eq!(r(-7, 2), BigInt::from(-3));
        assert_eq!(r(5, -3), BigInt::from(-2));
        assert_eq!(r(1, 3), BigInt::from(0));
    }

    #[test]
    fn h_words() {
        let d = h_decomposition(&el("Z[1/2]", "1")).unwrap();
        assert_eq!(d.length(), 6);
        assert!(d.word().evaluate(ring("Z[1/2]")).unwrap().is_identity());
        let d = h_decomposition(&el("Z[1/2]", "2")).unwrap();
        assert_eq!(d.input(), &m("Z[1/2]", "[[2,0],[0,1/2]]"));
        let d = h_decomposition(&el("Z", "-1")).unwrap();
        assert_eq!(d.word().evaluate(ring("Z")).unwrap(), m("Z", "[[-1,0],[0,-1]]"));
        assert_eq!(h_decomposition(&el("Z[1/2]", "3")).unwrap_err().name(), "NonUnit");
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose(&m("Z", "[[1,7],[0,1]]")).unwrap();
        assert_eq!(d.word(), &GroupWord::upper(el("Z", "7")));
        let d = decompose(&m("Z", "[[1,1],[1,2]]")).unwrap();
        assert_eq!(d.word(), &GroupWord::lower(el("Z", "1")).concat(&GroupWord::upper(el("Z", "1"))));
        let d = decompose(&m("Z", "[[2,1],[3,2]]")).unwrap();
        assert!(d.length() <= 4, "{:?}", d.word());
        assert_eq!(decompose(&Mat2::identity(ring("Z"))).unwrap().length(), 0);
    }

    #[test]
    fn decomposes_units_and_fractions() {
        for (r, s) in [
            ("Z", "[[-1,0],[0,-1]]"),
            ("Z[1/2]", "[[2,0],[0,1/2]]"),
            ("Z[1/6]", "[[1/6,5],[0,6]]"),
            ("Z[1/6]", "[[1,3/2],[5/3,7/2]]"),
            ("Z[sqrt2]", "[[1+sqrt(2),0],[0,-1+sqrt(2)]]"),
            ("Z[sqrt2]", "[[3,sqrt(2)],[sqrt(2),1]]"),
            ("Z[sqrt3]", "[[2,sqrt(3)],[sqrt(3),2]]"),
        ] {
            let a = m(r, s);
            let d = decompose(&a).unwrap();
            assert_eq!(d.word().evaluate(a.ring()).unwrap(), a);
        }
    }

    #[test]
    fn unsupported_quadratic_ring() {
        let a = Mat2::identity(ring("Z[sqrt5]"));
        assert_eq!(decompose(&a).unwrap_err().name(), "UnsupportedRing");
    }

    #[test]
    fn bfs_fallback_finds_progress() {
        let euclid = RationalEuclid { primes: vec![] };
        let start = m("Z", "[[5,3],[3,2]]");
        let moves = bfs_moves(&euclid, &start, 3).unwrap();
        assert_eq!(moves, vec![(Position::Upper, el("Z", "-1"))]);
        assert_eq!(bfs_moves(&euclid, &start, 0).unwrap_err().name(), "SearchExhausted");
    }

    #[test]
    fn stats() {
        let z = ring("Z");
        assert_eq!(length_stats(&[Mat2::identity(z)]).unwrap().max, 0);
        let shears: Vec<_> = (1..=10).map(|x| Mat2::upper(RingElement::from_int(z, x))).collect();
        let s = length_stats(&shears).unwrap();
        assert_eq!((s.count, s.max), (10, 1));
    }

    #[test]
    fn identity_reduction_check() {
        let three = PrincipalIdeal::new(el("Z[1/2]", "3")).unwrap();
        assert!(reduces_to_identity(&Mat2::upper(el("Z[1/2]", "15/4")), &three).unwrap());
        assert!(reduces_to_identity(&Mat2::diagonal(&el("Z[1/2]", "64")).unwrap(), &three).unwrap());
        assert!(!reduces_to_identity(&Mat2::upper(el("Z[1/2]", "1")), &three).unwrap());
    }
}
