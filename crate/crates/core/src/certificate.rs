//! JSON certificates and their verifiers.
//!
//! A certificate is `{kind, ring, payload, verified, tool_version}`. Every
//! verifier works from the payload alone: it parses the recorded values and
//! checks the claimed relations, never repeating a search.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::elemgen::{Decomposition, ElemGenError};
use crate::lemma::{ConjugateFactor, ConjugateWitness, Core, LemmaError, ManyUnitsCertificate};
use crate::norms::{self, Axiom, AxiomReport, FiniteGroupTable, LemmaBoundReport, NormError, NormTable};
use crate::rings::{factor, PrincipalIdeal, QuotientRing, RingDescriptor, RingElement, RingError};
use crate::sl2::{split_matrix_text, GroupWord, Mat2, QMat2, Sl2Error};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("certificate rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Sl2(#[from] Sl2Error),
    #[error(transparent)]
    ElemGen(#[from] ElemGenError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error(transparent)]
    Norm(#[from] NormError),
}

impl CertificateError {
    pub fn name(&self) -> &'static str {
        match self {
            CertificateError::Malformed(_) => "MalformedCertificate",
            CertificateError::Rejected(_) => "CertificateRejected",
            CertificateError::Ring(e) => e.name(),
            CertificateError::Sl2(e) => e.name(),
            CertificateError::ElemGen(e) => e.name(),
            CertificateError::Lemma(e) => e.name(),
            CertificateError::Norm(e) => e.name(),
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            CertificateError::Malformed(_) | CertificateError::Rejected(_) => "cli",
            CertificateError::Ring(_) => "rings",
            CertificateError::Sl2(e) => e.module(),
            CertificateError::ElemGen(e) => e.module(),
            CertificateError::Lemma(e) => e.module(),
            CertificateError::Norm(e) => e.module(),
        }
    }
}

fn reject(ok: bool, what: impl FnOnce() -> String) -> Result<(), CertificateError> {
    if ok {
        Ok(())
    } else {
        Err(CertificateError::Rejected(what()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    ManyUnits,
    Lemma2Witness,
    HDecomposition,
    Decomposition,
    NormExperiment,
    AxiomReport,
}

impl CertificateKind {
    pub const ALL: [CertificateKind; 6] = [
        CertificateKind::ManyUnits,
        CertificateKind::Lemma2Witness,
        CertificateKind::HDecomposition,
        CertificateKind::Decomposition,
        CertificateKind::NormExperiment,
        CertificateKind::AxiomReport,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CertificateKind::ManyUnits => "many-units",
            CertificateKind::Lemma2Witness => "lemma2-witness",
            CertificateKind::HDecomposition => "h-decomposition",
            CertificateKind::Decomposition => "decomposition",
            CertificateKind::NormExperiment => "norm-experiment",
            CertificateKind::AxiomReport => "axiom-report",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub ring: RingDescriptor,
    pub payload: Value,
    pub verified: bool,
    pub tool_version: String,
}

impl Certificate {
    /// Wraps a payload and sets `verified` by checking its own serialized form.
    fn seal(kind: CertificateKind, ring: RingDescriptor, payload: Value) -> Certificate {
        let mut cert = Certificate { kind, ring, payload, verified: false, tool_version: TOOL_VERSION.to_string() };
        cert.verified = Certificate::parse(&cert.to_json_string()).and_then(|c| verify(&c)).is_ok();
        cert
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.label(),
            "ring": self.ring.to_string(),
            "payload": self.payload,
            "verified": self.verified,
            "tool_version": self.tool_version,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize")
    }

    pub fn from_json(value: &Value) -> Result<Certificate, CertificateError> {
        let kind = CertificateKind::from_label(str_field(value, "kind")?)
            .ok_or_else(|| malformed("unknown kind"))?;
        let ring = str_field(value, "ring")?.parse()?;
        let payload = value.get("payload").filter(|p| p.is_object()).cloned().ok_or_else(|| malformed("payload"))?;
        let verified = value.get("verified").and_then(Value::as_bool).ok_or_else(|| malformed("verified"))?;
        let tool_version = str_field(value, "tool_version")?.to_string();
        Ok(Certificate { kind, ring, payload, verified, tool_version })
    }

    pub fn parse(text: &str) -> Result<Certificate, CertificateError> {
        let value: Value = serde_json::from_str(text).map_err(|e| malformed(&e.to_string()))?;
        Certificate::from_json(&value)
    }
}

fn malformed(what: &str) -> CertificateError {
    CertificateError::Malformed(what.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CertificateError> {
    v.get(key).ok_or_else(|| malformed(&format!("missing field {key}")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str, CertificateError> {
    field(v, key)?.as_str().ok_or_else(|| malformed(&format!("{key} is not a string")))
}

fn u64_field(v: &Value, key: &str) -> Result<u64, CertificateError> {
    field(v, key)?.as_u64().ok_or_else(|| malformed(&format!("{key} is not an unsigned integer")))
}

fn array_field<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, CertificateError> {
    field(v, key)?.as_array().ok_or_else(|| malformed(&format!("{key} is not an array")))
}

fn elem_field(ring: RingDescriptor, v: &Value, key: &str) -> Result<RingElement, CertificateError> {
    Ok(RingElement::parse(ring, str_field(v, key)?)?)
}

fn mat_field(ring: RingDescriptor, v: &Value, key: &str) -> Result<Mat2, CertificateError> {
    Ok(Mat2::parse(ring, str_field(v, key)?)?)
}

fn core_of(v: &Value) -> Result<Core, CertificateError> {
    Core::from_label(str_field(v, "core")?).ok_or_else(|| malformed("core"))
}

/// A matrix of residues written as `[[a,b],[c,d]]` with ring-element entries.
fn parse_residue_matrix(q: &QuotientRing, text: &str) -> Result<QMat2, CertificateError> {
    let parts = split_matrix_text(text).ok_or_else(|| malformed(&format!("matrix {text}")))?;
    let mut entries = Vec::with_capacity(4);
    for p in &parts {
        entries.push(q.reduce(&RingElement::parse(q.ring(), p)?)?);
    }
    Ok(QMat2::from_entries(entries.try_into().expect("four entries")))
}

pub fn verify(cert: &Certificate) -> Result<(), CertificateError> {
    let ring = cert.ring;
    let p = &cert.payload;
    match cert.kind {
        CertificateKind::ManyUnits => verify_many_units(ring, p),
        CertificateKind::Lemma2Witness => Ok(witness_from_json(ring, p)?.verify()?),
        CertificateKind::HDecomposition => {
            let u = elem_field(ring, p, "u")?;
            let word = GroupWord::from_json(field(p, "word")?, ring)?;
            Decomposition::new(Mat2::diagonal(&u)?, word)?;
            Ok(())
        }
        CertificateKind::Decomposition => {
            let a = mat_field(ring, p, "A")?;
            let word = GroupWord::from_json(field(p, "word")?, ring)?;
            let d = Decomposition::new(a, word)?;
            reject(u64_field(p, "length")? == d.length() as u64, || "recorded length".into())
        }
        CertificateKind::NormExperiment => verify_norm_experiment(ring, p),
        CertificateKind::AxiomReport => verify_axiom_report(ring, p),
    }
}

// many-units

fn many_units_payload(cert: &ManyUnitsCertificate) -> Value {
    json!({
        "c": cert.c.to_string(),
        "v": cert.v.to_string(),
        "k": cert.k,
        "u": cert.u.to_string(),
        "y": cert.y.to_string(),
        "u8_ne_1": cert.check_u8(),
    })
}

fn many_units_from_json(ring: RingDescriptor, p: &Value) -> Result<ManyUnitsCertificate, CertificateError> {
    Ok(ManyUnitsCertificate {
        c: elem_field(ring, p, "c")?,
        v: elem_field(ring, p, "v")?,
        k: u64_field(p, "k")?,
        u: elem_field(ring, p, "u")?,
        y: elem_field(ring, p, "y")?,
    })
}

pub fn many_units(cert: &ManyUnitsCertificate) -> Certificate {
    Certificate::seal(CertificateKind::ManyUnits, cert.c.ring(), many_units_payload(cert))
}

fn verify_many_units(ring: RingDescriptor, p: &Value) -> Result<(), CertificateError> {
    let cert = many_units_from_json(ring, p)?;
    cert.verify()?;
    // k is the exact order: no v^(k/p) is 1 modulo c^2
    let c2 = PrincipalIdeal::new(&cert.c * &cert.c)?;
    let one = RingElement::one(ring);
    let primes = factor::factor_u64(cert.k);
    for (prime, _) in primes {
        let lower = cert.v.pow(cert.k / prime);
        reject(!c2.contains(&(lower - &one))?, || format!("v^(k/{prime}) is already 1 modulo c^2"))?;
    }
    Ok(())
}

// lemma2-witness

fn witness_payload(w: &ConjugateWitness) -> Value {
    let factors: Vec<Value> = w
        .factors
        .iter()
        .map(|f| json!({"conjugator": f.conjugator.to_json(), "core": f.core.label()}))
        .collect();
    json!({
        "A": w.a.to_string(),
        "u": w.u.to_string(),
        "z": w.z.to_string(),
        "t": w.t.to_string(),
        "q": w.q.to_string(),
        "p": w.p.to_string(),
        "x": w.x.to_string(),
        "y": w.y.to_string(),
        "Y": w.y_matrix.to_string(),
        "target": w.target.to_string(),
        "factors": factors,
    })
}

fn witness_from_json(ring: RingDescriptor, p: &Value) -> Result<ConjugateWitness, CertificateError> {
    let factors = array_field(p, "factors")?
        .iter()
        .map(|f| {
            Ok(ConjugateFactor { conjugator: GroupWord::from_json(field(f, "conjugator")?, ring)?, core: core_of(f)? })
        })
        .collect::<Result<Vec<_>, CertificateError>>()?;
    Ok(ConjugateWitness {
        a: mat_field(ring, p, "A")?,
        u: elem_field(ring, p, "u")?,
        z: elem_field(ring, p, "z")?,
        t: elem_field(ring, p, "t")?,
        q: elem_field(ring, p, "q")?,
        p: elem_field(ring, p, "p")?,
        x: elem_field(ring, p, "x")?,
        y: elem_field(ring, p, "y")?,
        y_matrix: mat_field(ring, p, "Y")?,
        factors,
        target: mat_field(ring, p, "target")?,
    })
}

pub fn lemma2_witness(w: &ConjugateWitness) -> Certificate {
    Certificate::seal(CertificateKind::Lemma2Witness, w.a.ring(), witness_payload(w))
}

// decompositions

pub fn h_decomposition(u: &RingElement, d: &Decomposition) -> Certificate {
    let payload = json!({"u": u.to_string(), "word": d.word().to_json(), "length": d.length()});
    Certificate::seal(CertificateKind::HDecomposition, u.ring(), payload)
}

pub fn decomposition(d: &Decomposition) -> Certificate {
    let payload = json!({"A": d.input().to_string(), "word": d.word().to_json(), "length": d.length()});
    Certificate::seal(CertificateKind::Decomposition, d.input().ring(), payload)
}

// norm-experiment

pub fn norm_experiment(report: &LemmaBoundReport) -> Certificate {
    let group = &report.group;
    let samples: Vec<Value> = report
        .samples
        .iter()
        .map(|s| {
            json!({
                "multiplier": s.multiplier.to_string(),
                "j": s.j.to_string(),
                "image": group.text(s.image),
                "norm": s.norm,
                "witness_reduces": s.witness_reduces,
                "conjugators": s.conjugators.iter()
                    .map(|(g, core)| json!({"matrix": g.to_string(), "core": core.label()}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let max_norm = match report.max_norm() {
        None => Value::Null,
        Some(None) => json!("inf"),
        Some(Some(n)) => json!(n),
    };
    let payload = json!({
        "A": report.a.to_string(),
        "certificate": many_units_payload(&report.certificate),
        "modulus": group.quotient().modulus().generator().to_string(),
        "quotient": group.quotient().to_string(),
        "group_order": group.order(),
        "generating_set_size": report.generating_set_size,
        "bound": norms::LEMMA_BOUND,
        "requested": report.requested,
        "excluded_trivial": report.excluded_trivial,
        "samples": samples,
        "histogram": report.histogram(),
        "max_norm": max_norm,
        "pass_count": report.pass_count(),
        "passed": report.passed(),
    });
    Certificate::seal(CertificateKind::NormExperiment, report.a.ring(), payload)
}

/// Each sample's recorded conjugators must multiply, after reduction, to the
/// image of `E12(j)`; that product alone bounds the norm by four.
fn verify_norm_experiment(ring: RingDescriptor, p: &Value) -> Result<(), CertificateError> {
    let a = mat_field(ring, p, "A")?;
    let cert = many_units_from_json(ring, field(p, "certificate")?)?;
    cert.verify()?;
    reject(cert.c == *a.a21(), || "certificate is for a different c".into())?;
    let q = QuotientRing::of(elem_field(ring, p, "modulus")?)?;
    let epsilon = crate::lemma::epsilon_ideal(&cert);
    let a_bar = a.reduce(&q)?;
    let a_inv = a_bar.inverse(&q);
    let samples = array_field(p, "samples")?;
    for (i, s) in samples.iter().enumerate() {
        let multiplier = elem_field(ring, s, "multiplier")?;
        let j = elem_field(ring, s, "j")?;
        reject(j == epsilon.generator() * &multiplier, || format!("sample {i}: j != (u^8 - 1) c r"))?;
        let image = Mat2::upper(j).reduce(&q)?;
        reject(!image.is_identity(&q), || format!("sample {i}: trivial image"))?;
        reject(parse_residue_matrix(&q, str_field(s, "image")?)? == image, || format!("sample {i}: image"))?;
        let conjugators = array_field(s, "conjugators")?;
        reject(conjugators.len() == 4, || format!("sample {i}: expected four conjugators"))?;
        let mut acc = QMat2::identity(&q);
        for c in conjugators {
            let g = mat_field(ring, c, "matrix")?.reduce(&q)?;
            let core = match core_of(c)? {
                Core::A => &a_bar,
                Core::AInverse => &a_inv,
            };
            acc = acc.mul(&QMat2::conjugate(&g, core, &q), &q);
        }
        reject(acc == image, || format!("sample {i}: conjugate product differs from E12(j)"))?;
        let norm = field(s, "norm")?.as_u64();
        reject(norm.is_some_and(|n| (1..=norms::LEMMA_BOUND as u64).contains(&n)), || {
            format!("sample {i}: recorded norm outside [1, 4]")
        })?;
    }
    let requested = u64_field(p, "requested")?;
    let claimed = field(p, "passed")?.as_bool().ok_or_else(|| malformed("passed"))?;
    reject(claimed, || "experiment reports failure".into())?;
    reject(samples.len() as u64 == requested, || format!("{} of {requested} samples", samples.len()))?;
    reject(u64_field(p, "pass_count")? == requested, || "pass count".into())
}

// axiom-report

pub fn axiom_report(group: &FiniteGroupTable, table: &NormTable, report: &AxiomReport) -> Certificate {
    let lengths: Vec<Value> = group.iter().map(|g| json!([group.text(g), table.length(g)])).collect();
    let mut axioms = Map::new();
    for check in &report.checks {
        let counterexample = check
            .counterexample
            .as_ref()
            .map(|xs| xs.iter().map(|&g| group.text(g)).collect::<Vec<_>>());
        axioms.insert(
            check.axiom.label().to_string(),
            json!({"passed": check.passed(), "counterexample": counterexample}),
        );
    }
    let payload = json!({
        "modulus": group.quotient().modulus().generator().to_string(),
        "quotient": group.quotient().to_string(),
        "group_order": group.order(),
        "generating_set": table.generating_set.iter().map(|&g| group.text(g)).collect::<Vec<_>>(),
        "lengths": lengths,
        "histogram": table.histogram(),
        "unreachable": table.unreachable(),
        "max_length": table.max_length(),
        "axioms": axioms,
        "all_passed": report.all_passed(),
    });
    Certificate::seal(CertificateKind::AxiomReport, group.quotient().ring(), payload)
}

/// The recorded lengths must be the breadth-first distances for the recorded
/// generating set; the axiom verdicts are then re-checked exhaustively.
fn verify_axiom_report(ring: RingDescriptor, p: &Value) -> Result<(), CertificateError> {
    let group = FiniteGroupTable::new(QuotientRing::of(elem_field(ring, p, "modulus")?)?)?;
    reject(u64_field(p, "group_order")? == group.order() as u64, || "group order".into())?;
    let element = |text: &Value| -> Result<usize, CertificateError> {
        let text = text.as_str().ok_or_else(|| malformed("element"))?;
        let m = parse_residue_matrix(group.quotient(), text)?;
        group.element_of(&m).ok_or_else(|| CertificateError::Rejected(format!("{text} is not in SL_2")))
    };
    let generators = array_field(p, "generating_set")?.iter().map(element).collect::<Result<Vec<_>, _>>()?;
    reject(norms::is_conjugation_closed(&group, &generators), || "generating set is not conjugation-closed".into())?;

    let mut lengths: Vec<Option<Option<u32>>> = vec![None; group.order()];
    for entry in array_field(p, "lengths")? {
        let pair = entry.as_array().filter(|a| a.len() == 2).ok_or_else(|| malformed("length entry"))?;
        let g = element(&pair[0])?;
        let length = match &pair[1] {
            Value::Null => None,
            v => Some(v.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| malformed("length"))?),
        };
        reject(lengths[g].replace(length).is_none(), || format!("{} listed twice", group.text(g)))?;
    }
    let lengths: Vec<Option<u32>> =
        lengths.into_iter().collect::<Option<_>>().ok_or_else(|| CertificateError::Rejected("missing elements".into()))?;

    reject(lengths[group.identity()] == Some(0), || "identity must have length 0".into())?;
    for g in group.iter() {
        let Some(l) = lengths[g] else { continue };
        let mut has_parent = l == 0;
        for &s in &generators {
            let next = lengths[group.mul(g, s)];
            reject(next.is_some_and(|n| n <= l + 1), || format!("{} breaks the BFS labelling", group.text(g)))?;
            has_parent |= l > 0 && next == Some(l - 1);
        }
        reject(has_parent && (l > 0 || g == group.identity()), || format!("{} has no parent", group.text(g)))?;
    }

    let report = norms::check_norm_axioms(&group, &lengths);
    let recorded = field(p, "axioms")?;
    for axiom in Axiom::ALL {
        let claimed = field(field(recorded, axiom.label())?, "passed")?.as_bool().ok_or_else(|| malformed("passed"))?;
        reject(claimed == report.check(axiom).passed(), || format!("{} verdict", axiom.label()))?;
    }
    reject(report.all_passed(), || {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.axiom.label()).collect();
        format!("axioms fail: {}", failed.join(", "))
    })
}
