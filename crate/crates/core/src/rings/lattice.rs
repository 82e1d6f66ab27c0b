//! Hermite normal form of full-rank sublattices of `Z^2`.
//!
//! A quadratic ring element `x + y sqrt(d)` is the lattice point `(x, y)`, so
//! an ideal `cR` is the lattice spanned by `c` and `c sqrt(d)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Row basis `(alpha, beta), (0, gamma)` with `alpha, gamma > 0` and
/// `0 <= beta < gamma`. Every full-rank lattice has exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hnf2 {
    pub alpha: BigInt,
    pub beta: BigInt,
    pub gamma: BigInt,
}

impl Hnf2 {
    /// HNF of the lattice spanned by `generators`; `None` if they do not
    /// span a rank-2 lattice.
    pub fn from_generators(generators: &[(BigInt, BigInt)]) -> Option<Self> {
        // current basis: (alpha, beta) and (0, gamma); zeros mean "absent"
        let mut alpha = BigInt::zero();
        let mut beta = BigInt::zero();
        let mut gamma = BigInt::zero();
        for (x, y) in generators {
            if x.is_zero() {
                gamma = gamma.gcd(y);
                continue;
            }
            if alpha.is_zero() {
                alpha = x.clone();
                beta = y.clone();
                continue;
            }
            let e = alpha.extended_gcd(x);
            let g = e.gcd;
            let new_beta = &e.x * &beta + &e.y * y;
            // (x/g)(alpha, beta) - (alpha/g)(x, y) has first coordinate 0
            let k = (x / &g) * &beta - (&alpha / &g) * y;
            gamma = gamma.gcd(&k);
            alpha = g;
            beta = new_beta;
        }
        if alpha.is_zero() || gamma.is_zero() {
            return None;
        }
        if alpha.is_negative() {
            alpha = -alpha;
            beta = -beta;
        }
        let beta = beta.mod_floor(&gamma);
        Some(Hnf2 { alpha, beta, gamma })
    }

    pub fn determinant(&self) -> BigInt {
        &self.alpha * &self.gamma
    }

    /// Canonical representative of `(x, y)` in the box `[0, alpha) x [0, gamma)`.
    pub fn reduce(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        let (q, rx) = x.div_mod_floor(&self.alpha);
        let ry = (y - q * &self.beta).mod_floor(&self.gamma);
        (rx, ry)
    }

    pub fn contains(&self, x: &BigInt, y: &BigInt) -> bool {
        let (rx, ry) = self.reduce(x, y);
        rx.is_zero() && ry.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> (BigInt, BigInt) {
        (BigInt::from(x), BigInt::from(y))
    }

    #[test]
    fn ideal_of_three_in_root_two() {
        // 3 and 3*sqrt(2)
        let h = Hnf2::from_generators(&[v(3, 0), v(0, 3)]).unwrap();
        assert_eq!(h, Hnf2 { alpha: 3.into(), beta: 0.into(), gamma: 3.into() });
        assert_eq!(h.determinant(), BigInt::from(9));
    }

    #[test]
    fn ideal_of_one_plus_root_two_squared() {
        // c = 3 + 2 sqrt(2): lattice spanned by (3, 2) and (4, 3); unit, so index 1
        let h = Hnf2::from_generators(&[v(3, 2), v(4, 3)]).unwrap();
        assert_eq!(h.determinant(), BigInt::from(1));
    }

    #[test]
    fn determinant_matches_brute_force_count() {
        // basis (4, 1), (2, 3): membership by Cramer's rule, classes by counting
        let (a, b, c, d) = (4_i64, 1_i64, 2_i64, 3_i64);
        let det = a * d - b * c;
        let in_lattice = |x: i64, y: i64| (x * d - y * c) % det == 0 && (a * y - b * x) % det == 0;
        let h = Hnf2::from_generators(&[v(a, b), v(c, d)]).unwrap();
        assert_eq!(h.determinant(), BigInt::from(det));
        let mut classes = std::collections::BTreeSet::new();
        for x in -15..15_i64 {
            for y in -15..15_i64 {
                let (rx, ry) = h.reduce(&BigInt::from(x), &BigInt::from(y));
                let (rx, ry): (i64, i64) = (rx.try_into().unwrap(), ry.try_into().unwrap());
                assert!(in_lattice(x - rx, y - ry));
                assert_eq!(h.contains(&BigInt::from(x), &BigInt::from(y)), in_lattice(x, y));
                classes.insert((rx, ry));
            }
        }
        assert_eq!(classes.len() as i64, det);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(Hnf2::from_generators(&[v(1, 2), v(2, 4)]).is_none());
        assert!(Hnf2::from_generators(&[]).is_none());
        let h = Hnf2::from_generators(&[v(0, 5), v(-4, 7), v(6, 1)]).unwrap();
        assert!(h.alpha > BigInt::zero() && h.beta < h.gamma);
        for (x, y) in [v(0, 5), v(-4, 7), v(6, 1)] {
            assert!(h.contains(&x, &y));
        }
    }
}
