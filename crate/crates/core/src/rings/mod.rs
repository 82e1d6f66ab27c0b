//! Exact arithmetic for the ambient ring `R`: the integers, the localizations
//! `Z[1/m]`, and real quadratic orders `Z[sqrt d]`, together with principal
//! ideals, their finite quotients, and unit search.

mod element;
pub mod factor;
mod ideal;
pub mod lattice;
mod quotient;
mod units;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use element::RingElement;
pub use ideal::PrincipalIdeal;
pub use quotient::{QuotientRing, Residue};
pub use units::{infinite_order_unit, infinite_order_unit_with_cap, PELL_SEARCH_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operands belong to different rings ({0} and {1})")]
    MixedRings(RingDescriptor, RingDescriptor),
    #[error("the zero ideal has no finite quotient")]
    ZeroIdeal,
    #[error("{0} is not a unit in the quotient")]
    NotUnitInQuotient(String),
    #[error("order search exhausted after {0} steps")]
    OrderSearchExhausted(String),
    #[error("{0} has no unit of infinite order")]
    NoInfiniteOrderUnit(RingDescriptor),
    #[error("no Pell solution for d = {d} with b <= {cap}")]
    PellSearchExhausted { d: u64, cap: u64 },
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("cannot parse ring element {text:?} over {ring}")]
    Parse { ring: RingDescriptor, text: String },
}

impl RingError {
    /// Stable variant name used in machine-readable error reports.
    pub fn name(&self) -> &'static str {
        match self {
            RingError::MixedRings(..) => "MixedRings",
            RingError::ZeroIdeal => "ZeroIdeal",
            RingError::NotUnitInQuotient(_) => "NotUnitInQuotient",
            RingError::OrderSearchExhausted(_) => "OrderSearchExhausted",
            RingError::NoInfiniteOrderUnit(_) => "NoInfiniteOrderUnit",
            RingError::PellSearchExhausted { .. } => "PellSearchExhausted",
            RingError::InvalidDescriptor(_) => "InvalidDescriptor",
            RingError::Parse { .. } => "Parse",
        }
    }
}

/// Which ring an element lives in.
///
/// Build values through [`RingDescriptor::localized`] and
/// [`RingDescriptor::quadratic`] (or by parsing) so that `m >= 2` and
/// `d >= 2` squarefree always hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    Integers,
    /// `Z[1/m]`
    Localized { m: u64 },
    /// `Z[sqrt d]`, real quadratic
    Quadratic { d: u64 },
}

impl RingDescriptor {
    pub fn localized(m: u64) -> Result<Self, RingError> {
        if m < 2 {
            return Err(RingError::InvalidDescriptor(format!("Z[1/{m}] needs m >= 2")));
        }
        Ok(RingDescriptor::Localized { m })
    }

    pub fn quadratic(d: u64) -> Result<Self, RingError> {
        if d < 2 || !factor::is_squarefree(d) {
            return Err(RingError::InvalidDescriptor(format!(
                "Z[sqrt{d}] needs a squarefree d >= 2"
            )));
        }
        Ok(RingDescriptor::Quadratic { d })
    }

    /// Primes made invertible by the localization (empty for the other variants).
    pub fn inverted_primes(&self) -> Vec<u64> {
        match *self {
            RingDescriptor::Localized { m } => factor::factor_u64(m).into_iter().map(|(p, _)| p).collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, RingDescriptor::Quadratic { .. })
    }

    pub(crate) fn ensure_same(&self, other: &RingDescriptor) -> Result<(), RingError> {
        if self == other {
            Ok(())
        } else {
            Err(RingError::MixedRings(*self, *other))
        }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Integers => write!(f, "Z"),
            RingDescriptor::Localized { m } => write!(f, "Z[1/{m}]"),
            RingDescriptor::Quadratic { d } => write!(f, "Z[sqrt{d}]"),
        }
    }
}

impl FromStr for RingDescriptor {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || RingError::InvalidDescriptor(s.to_string());
        if compact == "Z" {
            return Ok(RingDescriptor::Integers);
        }
        let inner = compact
            .strip_prefix("Z[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        if let Some(m) = inner.strip_prefix("1/") {
            return RingDescriptor::localized(m.parse().map_err(|_| bad())?);
        }
        if let Some(d) = inner.strip_prefix("sqrt") {
            let d = d.trim_start_matches('(').trim_end_matches(')');
            return RingDescriptor::quadratic(d.parse().map_err(|_| bad())?);
        }
        Err(bad())
    }
}
