//! Exact `SL_2(R)` matrices, formal generator words, and reduction of both
//! to finite quotients `SL_2(R / gR)`.

mod mat;
mod quotient_mat;
mod word;

use thiserror::Error;

use crate::rings::RingError;

pub use mat::Mat2;
pub use quotient_mat::QMat2;
pub use word::{Factor, GroupWord, Position};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("determinant of {0} is not 1")]
    DeterminantNotOne(String),
    #[error("diagonal entry {0} is not a unit")]
    NonUnitDiagonal(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

impl Sl2Error {
    pub fn name(&self) -> &'static str {
        match self {
            Sl2Error::Ring(e) => e.name(),
            Sl2Error::DeterminantNotOne(_) => "DeterminantNotOne",
            Sl2Error::NonUnitDiagonal(_) => "NonUnitDiagonal",
            Sl2Error::Parse(_) => "Parse",
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            Sl2Error::Ring(_) => "rings",
            _ => "sl2",
        }
    }
}

/// Splits `[[a,b],[c,d]]` into its four entry strings.
pub(crate) fn split_matrix_text(text: &str) -> Option<[String; 4]> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = s.strip_prefix("[[")?.strip_suffix("]]")?;
    let (top, bottom) = inner.split_once("],[")?;
    let (a, b) = top.split_once(',')?;
    let (c, d) = bottom.split_once(',')?;
    if [a, b, c, d].iter().any(|e| e.is_empty() || e.contains([',', '[', ']'])) {
        return None;
    }
    Some([a.to_string(), b.to_string(), c.to_string(), d.to_string()])
}
