//! Exact arithmetic in `SL_2` over `Z`, `Z[1/m]` and real quadratic rings,
//! with checkable certificates for elementary decompositions, the
//! four-conjugate expression of elementary matrices, and word norms on
//! finite quotients.

pub mod certificate;
pub mod cli;
pub mod elemgen;
pub mod lemma;
pub mod norms;
pub mod rings;
pub mod sample;
pub mod sl2;
