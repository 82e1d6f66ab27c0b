use std::fmt;

use super::{RingDescriptor, RingElement, RingError};

/// A nonzero principal ideal `gR`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrincipalIdeal {
    generator: RingElement,
}

impl PrincipalIdeal {
    pub fn new(generator: RingElement) -> Result<Self, RingError> {
        if generator.is_zero() {
            return Err(RingError::ZeroIdeal);
        }
        Ok(PrincipalIdeal { generator })
    }

    pub fn generator(&self) -> &RingElement {
        &self.generator
    }

    pub fn ring(&self) -> RingDescriptor {
        self.generator.ring()
    }

    /// `x in gR`, i.e. `x / g` lies in `R`.
    pub fn contains(&self, x: &RingElement) -> Result<bool, RingError> {
        Ok(x.divide_exact(&self.generator)?.is_some())
    }

    /// `x / g` when `x` is a member.
    pub fn cofactor(&self, x: &RingElement) -> Result<Option<RingElement>, RingError> {
        x.divide_exact(&self.generator)
    }
}

impl fmt::Display for PrincipalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(r: &str, s: &str) -> RingElement {
        RingElement::parse(r.parse().unwrap(), s).unwrap()
    }

    #[test]
    fn membership_examples() {
        let nine = PrincipalIdeal::new(el("Z[1/2]", "9")).unwrap();
        assert!(nine.contains(&el("Z[1/2]", "63")).unwrap());
        let three = PrincipalIdeal::new(el("Z[1/2]", "3")).unwrap();
        assert!(!three.contains(&el("Z[1/2]", "1")).unwrap());
        assert!(three.contains(&el("Z[1/2]", "3/4")).unwrap());
        let three_q = PrincipalIdeal::new(el("Z[sqrt2]", "3")).unwrap();
        assert!(three_q.contains(&el("Z[sqrt2]", "3*sqrt(2)")).unwrap());
        assert!(!three_q.contains(&el("Z[sqrt2]", "3+sqrt(2)")).unwrap());
    }

    #[test]
    fn zero_generator_is_rejected() {
        assert_eq!(PrincipalIdeal::new(el("Z", "0")).unwrap_err(), RingError::ZeroIdeal);
    }
}
