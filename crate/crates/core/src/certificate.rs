//! Serializable records of checked claims.

use std::collections::BTreeMap;
use std::fmt::{Display, Write as _};
use std::time::{SystemTime, UNIX_EPOCH};

use num_rational::Ratio;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Three-valued outcome. `Inconclusive` means the check ran cleanly but the
/// method cannot decide the claim (e.g. a zero margin).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        }
    }

    /// Worst of two outcomes: fail > inconclusive > pass.
    pub fn combine(self, other: Outcome) -> Outcome {
        use Outcome::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub quantities: BTreeMap<String, Value>,
    pub margin: Option<Value>,
    pub outcome: Outcome,
    pub witness: Option<Vec<u64>>,
    pub notes: Vec<String>,
    pub timestamp: u64,
    pub version: String,
}

/// Exact rational as `"num/den"` (or just `"num"` when integral).
pub fn rational<T>(r: &Ratio<T>) -> Value
where
    T: One + PartialEq + Display,
{
    if r.denom().is_one() {
        Value::String(r.numer().to_string())
    } else {
        Value::String(format!("{}/{}", r.numer(), r.denom()))
    }
}

/// Real value rounded to 15 significant digits.
pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    Value::from(rounded)
}

impl Certificate {
    pub fn new(claim: impl Into<String>) -> Self {
        Certificate {
            claim: claim.into(),
            params: BTreeMap::new(),
            quantities: BTreeMap::new(),
            margin: None,
            outcome: Outcome::Pass,
            witness: None,
            notes: Vec::new(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            version: TOOLKIT_VERSION.to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn quantity(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.quantities.insert(key.to_string(), value.into());
        self
    }

    pub fn margin(mut self, value: impl Into<Value>) -> Self {
        self.margin = Some(value.into());
        self
    }

    pub fn outcome(mut self, outcome: Outcome) -> Self {
        self.outcome = outcome;
        self
    }

    pub fn witness(mut self, ids: impl IntoIterator<Item = u64>) -> Self {
        self.witness = Some(ids.into_iter().collect());
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    /// Equal in everything but the timestamp.
    pub fn same_result(&self, other: &Certificate) -> bool {
        Certificate { timestamp: 0, ..self.clone() } == Certificate { timestamp: 0, ..other.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `key: value` lines; params and quantities are prefixed with their section.
    pub fn to_text(&self) -> String {
        fn show(v: &Value) -> String {
            match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }
        }
        let mut out = String::new();
        writeln!(out, "claim: {}", self.claim).unwrap();
        writeln!(out, "outcome: {}", self.outcome.as_str()).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "param.{k}: {}", show(v)).unwrap();
        }
        for (k, v) in &self.quantities {
            writeln!(out, "quantity.{k}: {}", show(v)).unwrap();
        }
        if let Some(m) = &self.margin {
            writeln!(out, "margin: {}", show(m)).unwrap();
        }
        if let Some(w) = &self.witness {
            let ids: Vec<String> = w.iter().map(u64::to_string).collect();
            writeln!(out, "witness: {}", ids.join(" ")).unwrap();
        }
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        writeln!(out, "timestamp: {}", self.timestamp).unwrap();
        writeln!(out, "version: {}", self.version).unwrap();
        out
    }
}
