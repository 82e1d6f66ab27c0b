use crate::rings::{QuotientRing, Residue};

/// A 2x2 matrix over a finite quotient `R / gR`.
///
/// Values carry no ring handle; every operation takes the quotient
/// explicitly. Determinant 1 holds whenever the matrix is the reduction of
/// a genuine `SL_2(R)` element, but is not enforced here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMat2 {
    entries: [Residue; 4],
}

impl QMat2 {
    pub fn from_entries(entries: [Residue; 4]) -> Self {
        QMat2 { entries }
    }

    pub fn entries(&self) -> &[Residue; 4] {
        &self.entries
    }

    pub fn identity(q: &QuotientRing) -> Self {
        QMat2 { entries: [q.one(), q.zero(), q.zero(), q.one()] }
    }

    pub fn upper(q: &QuotientRing, x: Residue) -> Self {
        QMat2 { entries: [q.one(), x, q.zero(), q.one()] }
    }

    pub fn lower(q: &QuotientRing, x: Residue) -> Self {
        QMat2 { entries: [q.one(), q.zero(), x, q.one()] }
    }

    pub fn mul(&self, other: &QMat2, q: &QuotientRing) -> QMat2 {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &other.entries;
        QMat2 {
            entries: [
                q.add(&q.mul(a, e), &q.mul(b, g)),
                q.add(&q.mul(a, f), &q.mul(b, h)),
                q.add(&q.mul(c, e), &q.mul(d, g)),
                q.add(&q.mul(c, f), &q.mul(d, h)),
            ],
        }
    }

    /// Adjugate; the inverse when the determinant is 1.
    pub fn inverse(&self, q: &QuotientRing) -> QMat2 {
        let [a, b, c, d] = &self.entries;
        QMat2 { entries: [d.clone(), q.neg(b), q.neg(c), a.clone()] }
    }

    pub fn conjugate(g: &QMat2, a: &QMat2, q: &QuotientRing) -> QMat2 {
        g.mul(a, q).mul(&g.inverse(q), q)
    }

    pub fn determinant(&self, q: &QuotientRing) -> Residue {
        let [a, b, c, d] = &self.entries;
        q.sub(&q.mul(a, d), &q.mul(b, c))
    }

    pub fn is_identity(&self, q: &QuotientRing) -> bool {
        *self == QMat2::identity(q)
    }

    pub fn to_text(&self, q: &QuotientRing) -> String {
        let [a, b, c, d] = self.entries.each_ref().map(|r| q.residue_text(r));
        format!("[[{a},{b}],[{c},{d}]]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::RingElement;
    use crate::sl2::Mat2;

    fn q(r: &str, g: &str) -> QuotientRing {
        QuotientRing::of(RingElement::parse(r.parse().unwrap(), g).unwrap()).unwrap()
    }

    #[test]
    fn reduction_examples() {
        let nine = q("Z[1/2]", "9");
        let ring = nine.ring();
        let e = Mat2::upper(RingElement::from_int(ring, 9));
        assert!(e.reduce(&nine).unwrap().is_identity(&nine));
        let h = Mat2::diagonal(&RingElement::from_int(ring, 64)).unwrap();
        assert!(h.reduce(&nine).unwrap().is_identity(&nine));
        let three = q("Z[1/2]", "3");
        let e1 = Mat2::upper(RingElement::one(ring)).reduce(&three).unwrap();
        assert_eq!(e1.to_text(&three), "[[1,1],[0,1]]");
    }

    #[test]
    fn reduction_is_multiplicative() {
        let quo = q("Z[sqrt2]", "2+sqrt(2)");
        let a = Mat2::parse(quo.ring(), "[[3,sqrt(2)],[sqrt(2),1]]").unwrap();
        let b = Mat2::parse(quo.ring(), "[[1,0],[1+sqrt(2),1]]").unwrap();
        let lhs = (&a * &b).reduce(&quo).unwrap();
        let rhs = a.reduce(&quo).unwrap().mul(&b.reduce(&quo).unwrap(), &quo);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.determinant(&quo), quo.one());
    }
}
