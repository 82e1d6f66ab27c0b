//! Word norms on finite groups `SL_2(R/NR)`.
//!
//! Elements of a [`FiniteGroupTable`] are plain indices; residues are
//! replaced by small integers with precomputed addition and multiplication
//! tables so that exhaustive checks stay cheap.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lemma::{self, Core, LemmaError, ManyUnitsCertificate};
use crate::rings::{PrincipalIdeal, QuotientRing, RingElement, RingError};
use crate::sl2::{Mat2, QMat2, Sl2Error};

/// Largest `|SL_2(R/NR)|` built by default.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;
/// Largest quotient index accepted; enumeration is quartic in it.
pub const MAX_QUOTIENT_INDEX: usize = 128;
/// The bound certified by the four-conjugate witness.
pub const LEMMA_BOUND: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormError {
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error("generating set is not symmetric and conjugation-closed")]
    GeneratorsNotClosed,
    #[error("quotient too large: {0}")]
    QuotientTooLarge(String),
    #[error("every element of J_eps maps to the identity modulo {0}")]
    DegenerateQuotient(String),
}

impl From<RingError> for NormError {
    fn from(e: RingError) -> Self {
        NormError::Lemma(e.into())
    }
}

impl From<Sl2Error> for NormError {
    fn from(e: Sl2Error) -> Self {
        NormError::Lemma(e.into())
    }
}

impl NormError {
    pub fn name(&self) -> &'static str {
        match self {
            NormError::Lemma(e) => e.name(),
            NormError::GeneratorsNotClosed => "GeneratorsNotClosed",
            NormError::QuotientTooLarge(_) => "QuotientTooLarge",
            NormError::DegenerateQuotient(_) => "DegenerateQuotient",
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            NormError::Lemma(e) => e.module(),
            _ => "norms",
        }
    }
}

pub type GroupElement = usize;

enum ElementIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

/// `SL_2(R/NR)` enumerated in full.
pub struct FiniteGroupTable {
    quotient: QuotientRing,
    n: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    elements: Vec<[u16; 4]>,
    index: ElementIndex,
    identity: GroupElement,
}

impl FiniteGroupTable {
    pub fn new(quotient: QuotientRing) -> Result<Self, NormError> {
        Self::with_cap(quotient, DEFAULT_GROUP_CAP)
    }

    /// `SL_2(Z/nZ)`
    pub fn sl2_mod(n: i64) -> Result<Self, NormError> {
        let ring = crate::rings::RingDescriptor::Integers;
        Self::new(QuotientRing::of(RingElement::from_int(ring, n))?)
    }

    pub fn with_cap(quotient: QuotientRing, cap: usize) -> Result<Self, NormError> {
        let n = quotient
            .index()
            .to_usize()
            .filter(|&n| n <= MAX_QUOTIENT_INDEX)
            .ok_or_else(|| NormError::QuotientTooLarge(format!("index of {quotient} exceeds {MAX_QUOTIENT_INDEX}")))?;
        let residues: Vec<_> = quotient.residues().collect();
        let pos = |r| quotient.residue_position(&r).expect("canonical residue") as u16;
        let mut add = vec![0u16; n * n];
        let mut mul = vec![0u16; n * n];
        for (i, r) in residues.iter().enumerate() {
            for (j, s) in residues.iter().enumerate() {
                add[i * n + j] = pos(quotient.add(r, s));
                mul[i * n + j] = pos(quotient.mul(r, s));
            }
        }
        let neg = residues.iter().map(|r| pos(quotient.neg(r))).collect::<Vec<_>>();
        let one = pos(quotient.one()) as usize;
        let zero = pos(quotient.zero());

        let mut elements = Vec::new();
        for a in 0..n {
            for d in 0..n {
                let ad = mul[a * n + d] as usize;
                for b in 0..n {
                    for c in 0..n {
                        if ad == add[one * n + mul[b * n + c] as usize] as usize {
                            if elements.len() == cap {
                                return Err(NormError::QuotientTooLarge(format!("|SL_2({quotient})| exceeds {cap}")));
                            }
                            elements.push([a as u16, b as u16, c as u16, d as u16]);
                        }
                    }
                }
            }
        }
        elements.sort_unstable();
        let key = |e: &[u16; 4]| e.iter().fold(0u64, |k, &x| k * n as u64 + x as u64);
        let index = if n.pow(4) <= 1 << 22 {
            let mut dense = vec![u32::MAX; n.pow(4)];
            for (i, e) in elements.iter().enumerate() {
                dense[key(e) as usize] = i as u32;
            }
            ElementIndex::Dense(dense)
        } else {
            ElementIndex::Sparse(elements.iter().enumerate().map(|(i, e)| (key(e), i as u32)).collect())
        };
        let mut table = FiniteGroupTable { quotient, n, add, mul, neg, elements, index, identity: 0 };
        table.identity = table.lookup(&[one as u16, zero, zero, one as u16]).expect("identity is in SL_2");
        Ok(table)
    }

    fn lookup(&self, e: &[u16; 4]) -> Option<GroupElement> {
        let key = e.iter().fold(0u64, |k, &x| k * self.n as u64 + x as u64);
        match &self.index {
            ElementIndex::Dense(v) => v.get(key as usize).copied().filter(|&i| i != u32::MAX).map(|i| i as usize),
            ElementIndex::Sparse(m) => m.get(&key).map(|&i| i as usize),
        }
    }

    pub fn quotient(&self) -> &QuotientRing {
        &self.quotient
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> GroupElement {
        self.identity
    }

    pub fn iter(&self) -> std::ops::Range<GroupElement> {
        0..self.order()
    }

    pub fn mul(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        let n = self.n;
        let [a, b, c, d] = self.elements[g].map(usize::from);
        let [e, f, x, y] = self.elements[h].map(usize::from);
        let m = |i: usize, j: usize| self.mul[i * n + j] as usize;
        let s = |i: usize, j: usize| self.add[i * n + j];
        let product = [s(m(a, e), m(b, x)), s(m(a, f), m(b, y)), s(m(c, e), m(d, x)), s(m(c, f), m(d, y))];
        self.lookup(&product).expect("SL_2 is closed under multiplication")
    }

    pub fn inverse(&self, g: GroupElement) -> GroupElement {
        let [a, b, c, d] = self.elements[g];
        self.lookup(&[d, self.neg[b as usize], self.neg[c as usize], a]).expect("SL_2 is closed under inverses")
    }

    /// `g a g^-1`
    pub fn conjugate(&self, g: GroupElement, a: GroupElement) -> GroupElement {
        self.mul(self.mul(g, a), self.inverse(g))
    }

    pub fn matrix(&self, g: GroupElement) -> QMat2 {
        QMat2::from_entries(self.elements[g].map(|i| self.quotient.residue_at(i as usize)))
    }

    pub fn element_of(&self, m: &QMat2) -> Option<GroupElement> {
        let mut e = [0u16; 4];
        for (slot, r) in e.iter_mut().zip(m.entries()) {
            *slot = self.quotient.residue_position(r)?.to_u16()?;
        }
        self.lookup(&e)
    }

    /// Image of a matrix over `R`.
    pub fn image(&self, m: &Mat2) -> Result<GroupElement, NormError> {
        let q = m.reduce(&self.quotient)?;
        Ok(self.element_of(&q).expect("reduction of an SL_2(R) matrix"))
    }

    pub fn text(&self, g: GroupElement) -> String {
        self.matrix(g).to_text(&self.quotient)
    }
}

impl std::fmt::Debug for FiniteGroupTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroupTable").field("quotient", &self.quotient).field("order", &self.order()).finish()
    }
}

/// Smallest symmetric, conjugation-closed set containing `generators`,
/// sorted ascending.
pub fn conjugation_closure(group: &FiniteGroupTable, generators: &[GroupElement]) -> Vec<GroupElement> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<_> = generators.iter().copied().collect();
    while let Some(s) = queue.pop_front() {
        if !seen.insert(s) {
            continue;
        }
        queue.push_back(group.inverse(s));
        for g in group.iter() {
            let c = group.conjugate(g, s);
            if !seen.contains(&c) {
                queue.push_back(c);
            }
        }
    }
    seen.into_iter().collect()
}

pub fn is_conjugation_closed(group: &FiniteGroupTable, set: &[GroupElement]) -> bool {
    let members: BTreeSet<_> = set.iter().copied().collect();
    members.iter().all(|&s| {
        members.contains(&group.inverse(s)) && group.iter().all(|g| members.contains(&group.conjugate(g, s)))
    })
}

/// Word lengths with respect to a generating set; `None` is infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormTable {
    pub generating_set: Vec<GroupElement>,
    pub lengths: Vec<Option<u32>>,
}

impl NormTable {
    pub fn length(&self, g: GroupElement) -> Option<u32> {
        self.lengths[g]
    }

    /// Number of elements at each finite length.
    pub fn histogram(&self) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for l in self.lengths.iter().flatten() {
            *h.entry(*l).or_default() += 1;
        }
        h
    }

    pub fn unreachable(&self) -> usize {
        self.lengths.iter().filter(|l| l.is_none()).count()
    }

    pub fn max_length(&self) -> Option<u32> {
        self.lengths.iter().flatten().copied().max()
    }
}

/// Breadth-first distances from the identity in the Cayley graph on `generators`.
pub fn bfs_table(group: &FiniteGroupTable, generators: &[GroupElement]) -> Result<NormTable, NormError> {
    let mut set: Vec<_> = generators.to_vec();
    set.sort_unstable();
    set.dedup();
    if !is_conjugation_closed(group, &set) {
        return Err(NormError::GeneratorsNotClosed);
    }
    let mut lengths = vec![None; group.order()];
    lengths[group.identity()] = Some(0);
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        let next = lengths[g].expect("queued elements are labelled") + 1;
        for &s in &set {
            let h = group.mul(g, s);
            if lengths[h].is_none() {
                lengths[h] = Some(next);
                queue.push_back(h);
            }
        }
    }
    Ok(NormTable { generating_set: set, lengths })
}

pub fn bfs_norm(group: &FiniteGroupTable, generators: &[GroupElement], g: GroupElement) -> Result<Option<u32>, NormError> {
    Ok(bfs_table(group, generators)?.length(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// `n(g) = 0` exactly when `g = 1`
    Separation,
    /// `n(g^-1) = n(g)`
    Symmetry,
    /// `n(gh) <= n(g) + n(h)`
    Triangle,
    /// `n(a b a^-1) = n(b)`
    ConjugationInvariance,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [Axiom::Separation, Axiom::Symmetry, Axiom::Triangle, Axiom::ConjugationInvariance];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::Separation => "separation",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle",
            Axiom::ConjugationInvariance => "conjugation-invariance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    /// Elements witnessing a failure: `[g]`, `[g]`, `[g, h]` or `[a, b]`.
    pub counterexample: Option<Vec<GroupElement>>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).expect("every axiom is checked")
    }
}

/// Exhaustive check of the four norm axioms, `None` read as infinity.
///
/// # Panics
///
/// If `lengths` does not have one entry per group element.
pub fn check_norm_axioms(group: &FiniteGroupTable, lengths: &[Option<u32>]) -> AxiomReport {
    assert_eq!(lengths.len(), group.order(), "one length per group element");
    let e = group.identity();
    let separation = group.iter().find(|&g| (lengths[g] == Some(0)) != (g == e)).map(|g| vec![g]);
    let symmetry = group.iter().find(|&g| lengths[g] != lengths[group.inverse(g)]).map(|g| vec![g]);
    let mut triangle = None;
    let mut conjugation = None;
    for g in group.iter() {
        for h in group.iter() {
            if triangle.is_none() {
                if let (Some(a), Some(b)) = (lengths[g], lengths[h]) {
                    if lengths[group.mul(g, h)].is_none_or(|l| l > a + b) {
                        triangle = Some(vec![g, h]);
                    }
                }
            }
            if conjugation.is_none() && lengths[group.conjugate(g, h)] != lengths[h] {
                conjugation = Some(vec![g, h]);
            }
        }
        if triangle.is_some() && conjugation.is_some() {
            break;
        }
    }
    let checks = Axiom::ALL
        .into_iter()
        .zip([separation, symmetry, triangle, conjugation])
        .map(|(axiom, counterexample)| AxiomCheck { axiom, counterexample })
        .collect();
    AxiomReport { checks }
}

/// One sampled `j` in `J_eps` with a nontrivial image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundSample {
    /// `j = (u^8 - 1) c r`
    pub multiplier: RingElement,
    pub j: RingElement,
    pub image: GroupElement,
    pub norm: Option<u32>,
    /// The witness conjugators over `R`, with the core each one wraps.
    pub conjugators: Vec<(Mat2, Core)>,
    /// The reduced four-conjugate product equals the image of `E12(j)`.
    pub witness_reduces: bool,
}

impl BoundSample {
    pub fn passed(&self) -> bool {
        self.witness_reduces && self.norm.is_some_and(|n| n <= LEMMA_BOUND)
    }
}

#[derive(Debug)]
pub struct LemmaBoundReport {
    pub group: FiniteGroupTable,
    pub a: Mat2,
    pub certificate: ManyUnitsCertificate,
    /// Size of the conjugation closure of the images of `A` and `A^-1`.
    pub generating_set_size: usize,
    pub requested: usize,
    pub samples: Vec<BoundSample>,
    /// Draws discarded because their image was the identity.
    pub excluded_trivial: usize,
}

impl LemmaBoundReport {
    pub fn histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for s in &self.samples {
            let key = s.norm.map_or_else(|| "inf".to_string(), |n| n.to_string());
            *h.entry(key).or_default() += 1;
        }
        h
    }

    pub fn max_norm(&self) -> Option<Option<u32>> {
        self.samples.iter().map(|s| s.norm.map_or(u32::MAX, |n| n)).max().map(|m| (m != u32::MAX).then_some(m))
    }

    pub fn pass_count(&self) -> usize {
        self.samples.iter().filter(|s| s.passed()).count()
    }

    pub fn passed(&self) -> bool {
        self.samples.len() == self.requested && self.pass_count() == self.requested
    }
}

/// Multiplier range for sampled elements of `J_eps`.
const MULTIPLIER_BOUND: i64 = 1000;

/// Samples `j` in `J_eps = (u^8 - 1) c R`, keeps those with a nontrivial
/// image in `SL_2(R/NR)`, and measures `E12(j)` in the word norm generated
/// by the conjugacy classes of the images of `A` and `A^-1`.
pub fn lemma_bound_experiment(
    a: &Mat2,
    certificate: &ManyUnitsCertificate,
    modulus: &PrincipalIdeal,
    sample_size: usize,
    seed: u64,
) -> Result<LemmaBoundReport, NormError> {
    let ring = a.ring();
    ring.ensure_same(&modulus.ring())?;
    certificate.verify()?;
    let c = a.a21();
    if c.is_zero() {
        return Err(LemmaError::ZeroCorner.into());
    }
    let epsilon = lemma::epsilon_ideal(certificate);
    if modulus.contains(epsilon.generator())? {
        return Err(NormError::DegenerateQuotient(modulus.to_string()));
    }
    let group = FiniteGroupTable::new(QuotientRing::new(modulus.clone()))?;
    let a_bar = group.image(a)?;
    let generators = conjugation_closure(&group, &[a_bar, group.inverse(a_bar)]);
    let norms = bfs_table(&group, &generators)?;

    let u = &certificate.u;
    let u4 = u.pow(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(sample_size);
    let mut excluded_trivial = 0;
    let max_draws = 50 * sample_size.max(1);
    for _ in 0..max_draws {
        if samples.len() == sample_size {
            break;
        }
        let multiplier = crate::sample::small_element(ring, &mut rng, MULTIPLIER_BOUND);
        let j = epsilon.generator() * &multiplier;
        let image = group.image(&Mat2::upper(j.clone()))?;
        if image == group.identity() {
            excluded_trivial += 1;
            continue;
        }
        // (u^4 - u^-4) u^4 c r = (u^8 - 1) c r
        let z = &u4 * c * &multiplier;
        let witness = lemma::lemma2_witness(a, u, &z)?;
        debug_assert_eq!(witness.target, Mat2::upper(j.clone()));
        let conjugators = witness
            .factors
            .iter()
            .map(|f| Ok((f.conjugator.evaluate(ring)?, f.core)))
            .collect::<Result<Vec<_>, Sl2Error>>()?;
        let product = reduced_product(&group, a_bar, &conjugators)?;
        samples.push(BoundSample {
            multiplier,
            j,
            image,
            norm: norms.length(image),
            conjugators,
            witness_reduces: product == image,
        });
    }
    Ok(LemmaBoundReport {
        group,
        a: a.clone(),
        certificate: certificate.clone(),
        generating_set_size: generators.len(),
        requested: sample_size,
        samples,
        excluded_trivial,
    })
}

/// Product of `g_i A^{+-1} g_i^-1` in the finite group.
pub fn reduced_product(
    group: &FiniteGroupTable,
    a_bar: GroupElement,
    conjugators: &[(Mat2, Core)],
) -> Result<GroupElement, NormError> {
    let a_inv = group.inverse(a_bar);
    let mut acc = group.identity();
    for (g, core) in conjugators {
        let core = match core {
            Core::A => a_bar,
            Core::AInverse => a_inv,
        };
        acc = group.mul(acc, group.conjugate(group.image(g)?, core));
    }
    Ok(acc)
}
