use std::fmt;
use std::ops::Mul;

use crate::rings::{QuotientRing, RingDescriptor, RingElement};

use super::{split_matrix_text, QMat2, Sl2Error};

/// An element of `SL_2(R)`. The determinant is checked on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    ring: RingDescriptor,
    // row-major: a11, a12, a21, a22
    entries: [RingElement; 4],
}

impl Mat2 {
    pub fn new(a11: RingElement, a12: RingElement, a21: RingElement, a22: RingElement) -> Result<Self, Sl2Error> {
        let ring = a11.ring();
        for e in [&a12, &a21, &a22] {
            ring.ensure_same(&e.ring())?;
        }
        let det = &a11 * &a22 - &a12 * &a21;
        let m = Mat2 { ring, entries: [a11, a12, a21, a22] };
        if !det.is_one() {
            return Err(Sl2Error::DeterminantNotOne(m.to_string()));
        }
        Ok(m)
    }

    /// Assembles a product of `SL_2` matrices, whose determinant is 1 already.
    fn from_product(ring: RingDescriptor, entries: [RingElement; 4]) -> Self {
        let m = Mat2 { ring, entries };
        debug_assert!(m.determinant().is_one(), "determinant drifted: {m}");
        m
    }

    pub fn identity(ring: RingDescriptor) -> Self {
        let (z, o) = (RingElement::zero(ring), RingElement::one(ring));
        Mat2 { ring, entries: [o.clone(), z.clone(), z, o] }
    }

    /// `E12(x)`
    pub fn upper(x: RingElement) -> Self {
        let ring = x.ring();
        let (z, o) = (RingElement::zero(ring), RingElement::one(ring));
        Mat2 { ring, entries: [o.clone(), x, z, o] }
    }

    /// `E21(x)`
    pub fn lower(x: RingElement) -> Self {
        let ring = x.ring();
        let (z, o) = (RingElement::zero(ring), RingElement::one(ring));
        Mat2 { ring, entries: [o.clone(), z, x, o] }
    }

    /// `h(u) = diag(u, 1/u)`
    pub fn diagonal(u: &RingElement) -> Result<Self, Sl2Error> {
        let inv = u.unit_inverse().ok_or_else(|| Sl2Error::NonUnitDiagonal(u.to_string()))?;
        let z = RingElement::zero(u.ring());
        Ok(Mat2 { ring: u.ring(), entries: [u.clone(), z.clone(), z, inv] })
    }

    /// Upper triangular `[[a, b], [0, 1/a]]` for a unit `a`.
    pub fn upper_triangular(a: &RingElement, b: RingElement) -> Result<Self, Sl2Error> {
        let inv = a.unit_inverse().ok_or_else(|| Sl2Error::NonUnitDiagonal(a.to_string()))?;
        Mat2::new(a.clone(), b, RingElement::zero(a.ring()), inv)
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn entries(&self) -> &[RingElement; 4] {
        &self.entries
    }

    pub fn a11(&self) -> &RingElement {
        &self.entries[0]
    }
    pub fn a12(&self) -> &RingElement {
        &self.entries[1]
    }
    pub fn a21(&self) -> &RingElement {
        &self.entries[2]
    }
    pub fn a22(&self) -> &RingElement {
        &self.entries[3]
    }

    pub fn determinant(&self) -> RingElement {
        let [a, b, c, d] = &self.entries;
        a * d - b * c
    }

    pub fn mul(&self, other: &Mat2) -> Result<Mat2, Sl2Error> {
        self.ring.ensure_same(&other.ring)?;
        Ok(self.mul_same(other))
    }

    fn mul_same(&self, other: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &other.entries;
        Mat2::from_product(self.ring, [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    /// Adjugate `[[d, -b], [-c, a]]`.
    pub fn inverse(&self) -> Mat2 {
        let [a, b, c, d] = &self.entries;
        Mat2 { ring: self.ring, entries: [d.clone(), -b, -c, a.clone()] }
    }

    /// `g A g^-1`
    pub fn conjugate(g: &Mat2, a: &Mat2) -> Result<Mat2, Sl2Error> {
        Ok(g.mul(a)?.mul_same(&g.inverse()))
    }

    /// `g A g^-1 A^-1`
    pub fn commutator(g: &Mat2, a: &Mat2) -> Result<Mat2, Sl2Error> {
        Ok(Mat2::conjugate(g, a)?.mul_same(&a.inverse()))
    }

    pub fn pow(&self, e: u64) -> Mat2 {
        (0..e).fold(Mat2::identity(self.ring), |acc, _| acc.mul_same(self))
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity(self.ring)
    }

    /// `a12 = a21 = 0` and `a11 = a22`.
    pub fn is_scalar(&self) -> bool {
        let [a, b, c, d] = &self.entries;
        b.is_zero() && c.is_zero() && a == d
    }

    pub fn reduce(&self, q: &QuotientRing) -> Result<QMat2, Sl2Error> {
        let [a, b, c, d] = &self.entries;
        Ok(QMat2::from_entries([q.reduce(a)?, q.reduce(b)?, q.reduce(c)?, q.reduce(d)?]))
    }

    /// Parses `[[a,b],[c,d]]`.
    pub fn parse(ring: RingDescriptor, text: &str) -> Result<Mat2, Sl2Error> {
        let parts = split_matrix_text(text).ok_or_else(|| Sl2Error::Parse(text.to_string()))?;
        let [a, b, c, d] = parts.map(|p| RingElement::parse(ring, &p));
        Mat2::new(a?, b?, c?, d?)
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    /// Panics if the factors come from different rings.
    fn mul(self, rhs: &Mat2) -> Mat2 {
        assert_eq!(self.ring, rhs.ring, "matrix product across different rings");
        self.mul_same(rhs)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
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
    fn determinant_is_enforced() {
        let err = Mat2::parse(ring("Z"), "[[1,1],[1,1]]").unwrap_err();
        assert_eq!(err.name(), "DeterminantNotOne");
        assert!(Mat2::parse(ring("Z[1/2]"), "[[2,0],[0,1/2]]").is_ok());
        assert_eq!(Mat2::parse(ring("Z"), "[[1,2],[3]]").unwrap_err().name(), "Parse");
    }

    #[test]
    fn shears_compose_additively() {
        let x = el("Z[1/2]", "3/4");
        let y = el("Z[1/2]", "-5");
        assert_eq!(&Mat2::upper(x.clone()) * &Mat2::upper(y.clone()), Mat2::upper(&x + &y));
    }

    #[test]
    fn small_products() {
        let z = ring("Z");
        let p = &Mat2::lower(RingElement::one(z)) * &Mat2::upper(RingElement::one(z));
        assert_eq!(p, m("Z", "[[1,1],[1,2]]"));
        assert_eq!(p.inverse(), m("Z", "[[2,-1],[-1,1]]"));
        assert!((&p * &p.inverse()).is_identity());
        let a = m("Z[sqrt2]", "[[3,sqrt(2)],[sqrt(2),1]]");
        assert_eq!(&a * &Mat2::identity(a.ring()), a);
    }

    #[test]
    fn inverses_of_generators() {
        let x = el("Z[1/2]", "7/2");
        assert_eq!(Mat2::upper(x.clone()).inverse(), Mat2::upper(-&x));
        let u = el("Z[1/2]", "4");
        assert_eq!(Mat2::diagonal(&u).unwrap().inverse(), Mat2::diagonal(&u.unit_inverse().unwrap()).unwrap());
        assert_eq!(Mat2::diagonal(&el("Z[1/2]", "3")).unwrap_err().name(), "NonUnitDiagonal");
    }

    #[test]
    fn conjugation_by_diagonal_scales_shears() {
        let u = el("Z[1/2]", "2");
        let x = el("Z[1/2]", "5");
        let h = Mat2::diagonal(&u).unwrap();
        assert_eq!(Mat2::conjugate(&h, &Mat2::upper(x.clone())).unwrap(), Mat2::upper(&u * &u * &x));
        let one = RingElement::one(u.ring());
        assert_eq!(
            Mat2::commutator(&h, &Mat2::upper(one.clone())).unwrap(),
            Mat2::upper(&u * &u - &one)
        );
        assert!(Mat2::conjugate(&h, &Mat2::identity(u.ring())).unwrap().is_identity());
        let other = Mat2::identity(ring("Z"));
        assert_eq!(Mat2::conjugate(&h, &other).unwrap_err().name(), "MixedRings");
    }

    #[test]
    fn scalar_detection() {
        let z = ring("Z");
        assert!(Mat2::identity(z).is_scalar());
        assert!(m("Z", "[[-1,0],[0,-1]]").is_scalar());
        assert!(!Mat2::upper(RingElement::one(z)).is_scalar());
        assert!(!m("Z[1/2]", "[[2,0],[0,1/2]]").is_scalar());
    }

    #[test]
    fn text_round_trip() {
        for s in ["[[1,0],[3,1]]", "[[2,1/2],[0,1/2]]"] {
            assert_eq!(m("Z[1/2]", s).to_string(), s);
        }
        let a = m("Z[sqrt2]", "[[ 1+sqrt(2), 0 ],[ 0, -1+sqrt(2) ]]");
        assert_eq!(a.to_string(), "[[1+1*sqrt(2),0],[0,-1+1*sqrt(2)]]");
        assert_eq!(m("Z[sqrt2]", &a.to_string()), a);
    }
}
