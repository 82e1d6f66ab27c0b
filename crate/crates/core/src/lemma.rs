//! Many-units certificates and the four-conjugate expression for elementary
//! matrices.
//!
//! Given `A = [[a, b], [c, d]]` in `SL_2(R)` with `c != 0` and a unit `u`
//! with `u = 1 mod c^2 R`, every `E12((u^4 - u^-4) z)` with `z` in `cR` is a
//! product of four conjugates of `A` and `A^-1`, each conjugator lying in
//! the principal congruence subgroup of level `cR`. [`lemma2_witness`]
//! builds those four factors explicitly and checks the identity exactly.

use thiserror::Error;

use crate::elemgen::{self, ElemGenError};
use crate::rings::{infinite_order_unit_with_cap, PrincipalIdeal, QuotientRing, RingElement, RingError, PELL_SEARCH_CAP};
use crate::sl2::{GroupWord, Mat2, Sl2Error};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LemmaError {
    #[error(transparent)]
    Sl2(#[from] Sl2Error),
    #[error(transparent)]
    ElemGen(#[from] ElemGenError),
    #[error("the (2,1) entry of the matrix is zero")]
    ZeroCorner,
    #[error("u - 1 = {u_minus_one} is not divisible by c^2 = {c_squared}")]
    UnitCongruenceViolated { u_minus_one: String, c_squared: String },
    #[error("{0} is not in the ideal generated by the (2,1) entry")]
    ZNotInIdeal(String),
    #[error("{0} is scalar")]
    ScalarInput(String),
    #[error("internal check failed: {0}")]
    FormCheckFailed(String),
}

impl From<RingError> for LemmaError {
    fn from(e: RingError) -> Self {
        LemmaError::Sl2(e.into())
    }
}

impl LemmaError {
    pub fn name(&self) -> &'static str {
        match self {
            LemmaError::Sl2(e) => e.name(),
            LemmaError::ElemGen(e) => e.name(),
            LemmaError::ZeroCorner => "ZeroCorner",
            LemmaError::UnitCongruenceViolated { .. } => "UnitCongruenceViolated",
            LemmaError::ZNotInIdeal(_) => "ZNotInIdeal",
            LemmaError::ScalarInput(_) => "ScalarInput",
            LemmaError::FormCheckFailed(_) => "FormCheckFailed",
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            LemmaError::Sl2(e) => e.module(),
            LemmaError::ElemGen(e) => e.module(),
            _ => "lemma",
        }
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), LemmaError> {
    if ok {
        Ok(())
    } else {
        Err(LemmaError::FormCheckFailed(what()))
    }
}

/// Evidence that `c` admits a unit `u = v^k` with `u - 1 = c^2 y` and `u^8 != 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManyUnitsCertificate {
    pub c: RingElement,
    /// Base unit of infinite order.
    pub v: RingElement,
    pub k: u64,
    pub u: RingElement,
    pub y: RingElement,
}

impl ManyUnitsCertificate {
    /// `u^8 != 1`
    pub fn check_u8(&self) -> bool {
        !self.u.pow(8).is_one()
    }

    /// Re-checks every recorded relation without searching for anything.
    pub fn verify(&self) -> Result<(), LemmaError> {
        let ring = self.c.ring();
        for e in [&self.v, &self.u, &self.y] {
            ring.ensure_same(&e.ring())?;
        }
        check(!self.c.is_zero(), || "c is zero".into())?;
        check(self.k >= 1, || "k must be positive".into())?;
        check(self.v.is_unit(), || format!("v = {} is not a unit", self.v))?;
        check(self.v.pow(self.k) == self.u, || "u != v^k".into())?;
        check(&self.u - &RingElement::one(ring) == &self.c * &self.c * &self.y, || "u - 1 != c^2 y".into())?;
        check(self.check_u8(), || "u^8 = 1".into())
    }
}

/// Finds `u = v^k` for the ring's infinite-order unit `v`, with `k` the exact
/// order of `v` modulo `c^2`.
pub fn find_unit(c: &RingElement) -> Result<ManyUnitsCertificate, LemmaError> {
    find_unit_with_cap(c, PELL_SEARCH_CAP)
}

pub fn find_unit_with_cap(c: &RingElement, pell_cap: u64) -> Result<ManyUnitsCertificate, LemmaError> {
    let ring = c.ring();
    let v = infinite_order_unit_with_cap(ring, pell_cap)?;
    let c_squared = c * c;
    let k = QuotientRing::of(c_squared.clone())?.unit_order(&v)?;
    let u = v.pow(k);
    let y = (&u - &RingElement::one(ring))
        .divide_exact(&c_squared)?
        .ok_or_else(|| LemmaError::FormCheckFailed(format!("c^2 does not divide v^{k} - 1")))?;
    let cert = ManyUnitsCertificate { c: c.clone(), v, k, u, y };
    cert.verify()?;
    Ok(cert)
}

/// The ideal `(u^8 - 1) c R`, nonzero because `u^8 != 1` in a domain.
pub fn epsilon_ideal(cert: &ManyUnitsCertificate) -> PrincipalIdeal {
    let generator = (cert.u.pow(8) - RingElement::one(cert.u.ring())) * &cert.c;
    PrincipalIdeal::new(generator).expect("u^8 != 1 and c != 0")
}

/// The intermediate matrix `Y = E12(t) A^-1 E12(-t) h(u^2) A h(u^-2)` and
/// the ring elements that produce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YData {
    pub y_matrix: Mat2,
    /// Upper-right entry of `Y`, a member of `cR`.
    pub q: RingElement,
    /// `t = a x`
    pub t: RingElement,
    /// `u^4 - 1 = c x`
    pub x: RingElement,
    /// `u - 1 = c^2 y`
    pub y: RingElement,
}

pub fn compute_y(a: &Mat2, u: &RingElement) -> Result<YData, LemmaError> {
    let ring = a.ring();
    ring.ensure_same(&u.ring())?;
    let c = a.a21().clone();
    if c.is_zero() {
        return Err(LemmaError::ZeroCorner);
    }
    let one = RingElement::one(ring);
    let c_squared = &c * &c;
    let u_minus_one = u - &one;
    let y = u_minus_one.divide_exact(&c_squared)?.ok_or_else(|| LemmaError::UnitCongruenceViolated {
        u_minus_one: u_minus_one.to_string(),
        c_squared: c_squared.to_string(),
    })?;
    let u_inv = u.unit_inverse().ok_or_else(|| Sl2Error::NonUnitDiagonal(u.to_string()))?;
    let u2 = u * u;
    let u4 = &u2 * &u2;
    let x = (&u4 - &one)
        .divide_exact(&c)?
        .ok_or_else(|| LemmaError::FormCheckFailed("c does not divide u^4 - 1".into()))?;
    let geometric = &u2 * u + &u2 + u + &one;
    check(x == &c * &y * &geometric, || "x != c y (u^3 + u^2 + u + 1)".into())?;
    let c_ideal = PrincipalIdeal::new(c.clone())?;
    check(c_ideal.contains(&x)?, || "x is not in cR".into())?;
    let t = a.a11() * &x;

    let shear = Mat2::upper(t.clone());
    let h2 = Mat2::diagonal(&u2)?;
    let h2_inv = Mat2::diagonal(&(&u_inv * &u_inv))?;
    let y_matrix = &(&(&(&(&shear * &a.inverse()) * &shear.inverse()) * &h2) * a) * &h2_inv;

    let u4_inv = u4.unit_inverse().expect("power of a unit");
    check(y_matrix.a21().is_zero(), || format!("Y = {y_matrix} is not upper triangular"))?;
    check(*y_matrix.a11() == u4_inv && *y_matrix.a22() == u4, || format!("Y = {y_matrix} has the wrong diagonal"))?;
    let q = y_matrix.a12().clone();
    check(c_ideal.contains(&q)?, || format!("q = {q} is not in cR"))?;
    Ok(YData { y_matrix, q, t, x, y })
}

/// Which of `A`, `A^-1` a conjugate factor wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Core {
    A,
    AInverse,
}

impl Core {
    pub fn label(self) -> &'static str {
        match self {
            Core::A => "A",
            Core::AInverse => "A^-1",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "A" => Some(Core::A),
            "A^-1" => Some(Core::AInverse),
            _ => None,
        }
    }
}

/// `g C g^-1` with `C` one of `A`, `A^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateFactor {
    pub conjugator: GroupWord,
    pub core: Core,
}

/// Four conjugates of `A^{+-1}` whose product is `target = E12((u^4 - u^-4) z)`.
///
/// The upper-triangular middle matrix `B = [[u^4, p], [0, u^-4]]` equals
/// `h(u^4) E12(p u^-4)`, and `Y B Y^-1 B^-1` regroups as
/// `C1 . C2 . (B C2^-1 B^-1) . (B C1^-1 B^-1)` where
/// `C1 = E12(t) A^-1 E12(-t)` and `C2 = h(u^2) A h(u^-2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateWitness {
    pub a: Mat2,
    pub u: RingElement,
    pub z: RingElement,
    pub t: RingElement,
    pub q: RingElement,
    /// `p = -q - z`, so that the product targets `+ (u^4 - u^-4) z`.
    pub p: RingElement,
    pub x: RingElement,
    pub y: RingElement,
    pub y_matrix: Mat2,
    pub factors: Vec<ConjugateFactor>,
    pub target: Mat2,
}

/// Options for [`lemma2_witness_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct WitnessOptions {
    /// Expand every `h(w)` in the conjugators into six elementary factors.
    pub elementary_conjugators: bool,
}

pub fn lemma2_witness(a: &Mat2, u: &RingElement, z: &RingElement) -> Result<ConjugateWitness, LemmaError> {
    lemma2_witness_with(a, u, z, WitnessOptions::default())
}

pub fn lemma2_witness_with(
    a: &Mat2,
    u: &RingElement,
    z: &RingElement,
    options: WitnessOptions,
) -> Result<ConjugateWitness, LemmaError> {
    let ring = a.ring();
    ring.ensure_same(&z.ring())?;
    let data = compute_y(a, u)?;
    if !PrincipalIdeal::new(a.a21().clone())?.contains(z)? {
        return Err(LemmaError::ZNotInIdeal(z.to_string()));
    }
    let p = -(&data.q + z);
    let u2 = u * u;
    let u4 = &u2 * &u2;
    let u4_inv = u4.unit_inverse().expect("power of a unit");

    let diag = |w: &RingElement| -> Result<GroupWord, LemmaError> {
        if options.elementary_conjugators {
            Ok(elemgen::h_decomposition(w)?.word().clone())
        } else {
            Ok(GroupWord::diag(w.clone()))
        }
    };
    let shear_t = GroupWord::upper(data.t.clone());
    let middle = diag(&u4)?.concat(&GroupWord::upper(&p * &u4_inv));
    let factors = vec![
        ConjugateFactor { conjugator: shear_t.clone(), core: Core::AInverse },
        ConjugateFactor { conjugator: diag(&u2)?, core: Core::A },
        ConjugateFactor { conjugator: middle.clone().concat(&diag(&u2)?), core: Core::AInverse },
        ConjugateFactor { conjugator: middle.concat(&shear_t), core: Core::A },
    ];
    let target = Mat2::upper((&u4 - &u4_inv) * z);
    let witness = ConjugateWitness {
        a: a.clone(),
        u: u.clone(),
        z: z.clone(),
        t: data.t,
        q: data.q,
        p,
        x: data.x,
        y: data.y,
        y_matrix: data.y_matrix,
        factors,
        target,
    };
    witness.verify()?;
    Ok(witness)
}

impl ConjugateWitness {
    /// Left-to-right product of the four conjugates.
    pub fn product(&self) -> Result<Mat2, LemmaError> {
        let ring = self.a.ring();
        let a_inv = self.a.inverse();
        let mut acc = Mat2::identity(ring);
        for f in &self.factors {
            let g = f.conjugator.evaluate(ring)?;
            let core = match f.core {
                Core::A => &self.a,
                Core::AInverse => &a_inv,
            };
            acc = acc.mul(&Mat2::conjugate(&g, core)?)?;
        }
        Ok(acc)
    }

    /// Re-checks every invariant from the recorded values alone.
    pub fn verify(&self) -> Result<(), LemmaError> {
        let ring = self.a.ring();
        for e in [&self.u, &self.z, &self.t, &self.q, &self.p, &self.x, &self.y] {
            ring.ensure_same(&e.ring())?;
        }
        let c = self.a.a21();
        if c.is_zero() {
            return Err(LemmaError::ZeroCorner);
        }
        let c_ideal = PrincipalIdeal::new(c.clone())?;
        let one = RingElement::one(ring);
        let u_inv = self.u.unit_inverse().ok_or_else(|| Sl2Error::NonUnitDiagonal(self.u.to_string()))?;
        let u4 = self.u.pow(4);
        let u4_inv = u_inv.pow(4);

        check(&self.u - &one == c * c * &self.y, || "u - 1 != c^2 y".into())?;
        check(&u4 - &one == c * &self.x, || "u^4 - 1 != c x".into())?;
        check(self.t == self.a.a11() * &self.x, || "t != a x".into())?;
        if !c_ideal.contains(&self.z)? {
            return Err(LemmaError::ZNotInIdeal(self.z.to_string()));
        }
        for (name, value) in [("x", &self.x), ("t", &self.t), ("q", &self.q)] {
            check(c_ideal.contains(value)?, || format!("{name} = {value} is not in cR"))?;
        }
        check(self.p == -(&self.q + &self.z), || "p != -q - z".into())?;

        let y = &self.y_matrix;
        check(y.a21().is_zero() && *y.a11() == u4_inv && *y.a22() == u4 && *y.a12() == self.q, || {
            format!("Y = {y} does not have the form [[u^-4, q], [0, u^4]]")
        })?;
        let shear = Mat2::upper(self.t.clone());
        let h2 = Mat2::diagonal(&(&self.u * &self.u))?;
        let expected_y = &(&(&(&(&shear * &self.a.inverse()) * &shear.inverse()) * &h2) * &self.a) * &h2.inverse();
        check(expected_y == *y, || "Y != E12(t) A^-1 E12(-t) h(u^2) A h(u^-2)".into())?;

        check(self.factors.len() == 4, || format!("{} factors instead of 4", self.factors.len()))?;
        let level = QuotientRing::new(c_ideal);
        for (i, f) in self.factors.iter().enumerate() {
            let g = f.conjugator.evaluate(ring)?;
            check(g.reduce(&level)?.is_identity(&level), || format!("conjugator {i} is not 1 mod cR"))?;
        }

        let expected_target = Mat2::upper((&u4 - &u4_inv) * &self.z);
        check(self.target == expected_target, || "target != E12((u^4 - u^-4) z)".into())?;
        let product = self.product()?;
        check(product == self.target, || format!("product {product} != target {}", self.target))
    }
}

/// How [`ensure_nonzero_corner`] obtained its matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Unchanged,
    /// `g A g^-1`
    Conjugate(Box<Mat2>),
    /// `A g A^-1 g^-1`, then optionally conjugated by `then`.
    Commutator { g: Box<Mat2>, then: Option<Box<Mat2>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonzeroCorner {
    pub matrix: Mat2,
    pub provenance: Provenance,
    /// Worst-case factor by which any conjugation-invariant norm can grow.
    pub norm_factor: u32,
}

/// `w(1) = E12(1) E21(-1) E12(1) = [[0, 1], [-1, 0]]`
fn w_one(ring: crate::rings::RingDescriptor) -> Mat2 {
    let one = RingElement::one(ring);
    &(&Mat2::upper(one.clone()) * &Mat2::lower(-&one)) * &Mat2::upper(one)
}

/// Replaces a non-scalar `A` by a conjugate or commutator whose (2,1) entry
/// is nonzero. Conjugation keeps every conjugation-invariant norm; the
/// commutator `[A, g]` at most doubles it.
pub fn ensure_nonzero_corner(a: &Mat2) -> Result<NonzeroCorner, LemmaError> {
    if a.is_scalar() {
        return Err(LemmaError::ScalarInput(a.to_string()));
    }
    if !a.a21().is_zero() {
        return Ok(NonzeroCorner { matrix: a.clone(), provenance: Provenance::Unchanged, norm_factor: 1 });
    }
    let w = w_one(a.ring());
    if !a.a12().is_zero() {
        let matrix = Mat2::conjugate(&w, a)?;
        return Ok(NonzeroCorner { matrix, provenance: Provenance::Conjugate(Box::new(w)), norm_factor: 1 });
    }
    // non-scalar diagonal: [A, E21(1)] = E21(a^-2 - 1) with a^2 != 1
    let g = Mat2::lower(RingElement::one(a.ring()));
    let comm = Mat2::commutator(a, &g)?;
    let (matrix, then) = if comm.a21().is_zero() {
        (Mat2::conjugate(&w, &comm)?, Some(w))
    } else {
        (comm, None)
    };
    check(!matrix.a21().is_zero(), || format!("{matrix} still has a zero corner"))?;
    Ok(NonzeroCorner { matrix, provenance: Provenance::Commutator { g: Box::new(g), then: then.map(Box::new) }, norm_factor: 2 })
}
