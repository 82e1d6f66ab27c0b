use serde_json::{json, Value};

use crate::rings::{QuotientRing, RingDescriptor, RingElement};

use super::{Mat2, QMat2, Sl2Error};

/// Which off-diagonal slot an elementary matrix occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Position {
    /// `E12`
    Upper,
    /// `E21`
    Lower,
}

impl Position {
    pub fn label(self) -> &'static str {
        match self {
            Position::Upper => "12",
            Position::Lower => "21",
        }
    }
}

/// One factor of a [`GroupWord`].
///
/// Conjugates stay structural so that certificates can tell conjugators
/// apart from the conjugated core.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    Elem { position: Position, x: RingElement },
    /// `h(u)`
    Diag(RingElement),
    /// `g c g^-1`
    Conj { conjugator: GroupWord, core: GroupWord },
    Inv(GroupWord),
}

/// A formal product of factors, evaluated left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    factors: Vec<Factor>,
}

impl GroupWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        GroupWord { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, factor: Factor) {
        self.factors.push(factor);
    }

    pub fn upper(x: RingElement) -> Self {
        GroupWord { factors: vec![Factor::Elem { position: Position::Upper, x }] }
    }

    pub fn lower(x: RingElement) -> Self {
        GroupWord { factors: vec![Factor::Elem { position: Position::Lower, x }] }
    }

    pub fn diag(u: RingElement) -> Self {
        GroupWord { factors: vec![Factor::Diag(u)] }
    }

    pub fn concat(mut self, other: &GroupWord) -> Self {
        self.factors.extend(other.factors.iter().cloned());
        self
    }

    /// True when every factor is an elementary matrix.
    pub fn is_elementary(&self) -> bool {
        self.factors.iter().all(|f| matches!(f, Factor::Elem { .. }))
    }

    pub fn evaluate(&self, ring: RingDescriptor) -> Result<Mat2, Sl2Error> {
        let mut acc = Mat2::identity(ring);
        for factor in &self.factors {
            let m = match factor {
                Factor::Elem { position: Position::Upper, x } => Mat2::upper(x.clone()),
                Factor::Elem { position: Position::Lower, x } => Mat2::lower(x.clone()),
                Factor::Diag(u) => Mat2::diagonal(u)?,
                Factor::Conj { conjugator, core } => {
                    Mat2::conjugate(&conjugator.evaluate(ring)?, &core.evaluate(ring)?)?
                }
                Factor::Inv(w) => w.evaluate(ring)?.inverse(),
            };
            acc = acc.mul(&m)?;
        }
        Ok(acc)
    }

    /// Evaluates with every leaf reduced into `q` first.
    pub fn evaluate_mod(&self, q: &QuotientRing) -> Result<QMat2, Sl2Error> {
        let mut acc = QMat2::identity(q);
        for factor in &self.factors {
            let m = match factor {
                Factor::Elem { position: Position::Upper, x } => QMat2::upper(q, q.reduce(x)?),
                Factor::Elem { position: Position::Lower, x } => QMat2::lower(q, q.reduce(x)?),
                Factor::Diag(u) => Mat2::diagonal(u)?.reduce(q)?,
                Factor::Conj { conjugator, core } => {
                    QMat2::conjugate(&conjugator.evaluate_mod(q)?, &core.evaluate_mod(q)?, q)
                }
                Factor::Inv(w) => w.evaluate_mod(q)?.inverse(q),
            };
            acc = acc.mul(&m, q);
        }
        Ok(acc)
    }

    /// JSON tree: an array of `{"kind": ...}` objects with ring elements as text.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.factors
                .iter()
                .map(|f| match f {
                    Factor::Elem { position, x } => {
                        json!({"kind": "elem", "position": position.label(), "x": x.to_string()})
                    }
                    Factor::Diag(u) => json!({"kind": "diag", "u": u.to_string()}),
                    Factor::Conj { conjugator, core } => {
                        json!({"kind": "conj", "conjugator": conjugator.to_json(), "core": core.to_json()})
                    }
                    Factor::Inv(w) => json!({"kind": "inv", "word": w.to_json()}),
                })
                .collect(),
        )
    }

    pub fn from_json(value: &Value, ring: RingDescriptor) -> Result<Self, Sl2Error> {
        let bad = |what: &str| Sl2Error::Parse(format!("word JSON: {what}"));
        let items = value.as_array().ok_or_else(|| bad("expected an array"))?;
        let text = |item: &Value, key: &str| -> Result<RingElement, Sl2Error> {
            let s = item.get(key).and_then(Value::as_str).ok_or_else(|| bad(key))?;
            Ok(RingElement::parse(ring, s)?)
        };
        let sub = |item: &Value, key: &str| -> Result<GroupWord, Sl2Error> {
            GroupWord::from_json(item.get(key).ok_or_else(|| bad(key))?, ring)
        };
        let mut factors = Vec::with_capacity(items.len());
        for item in items {
            let kind = item.get("kind").and_then(Value::as_str).ok_or_else(|| bad("kind"))?;
            factors.push(match kind {
                "elem" => {
                    let position = match item.get("position").and_then(Value::as_str) {
                        Some("12") => Position::Upper,
                        Some("21") => Position::Lower,
                        _ => return Err(bad("position")),
                    };
                    Factor::Elem { position, x: text(item, "x")? }
                }
                "diag" => Factor::Diag(text(item, "u")?),
                "conj" => Factor::Conj { conjugator: sub(item, "conjugator")?, core: sub(item, "core")? },
                "inv" => Factor::Inv(sub(item, "word")?),
                other => return Err(bad(other)),
            });
        }
        Ok(GroupWord { factors })
    }
}
