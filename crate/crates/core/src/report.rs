use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An entropy value in `ℕ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntropyValue {
    Finite(u64),
    Infinite,
}

impl EntropyValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            EntropyValue::Finite(v) => Some(v),
            EntropyValue::Infinite => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == EntropyValue::Finite(0)
    }
}

impl From<usize> for EntropyValue {
    fn from(v: usize) -> Self {
        EntropyValue::Finite(v as u64)
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyValue::Finite(v) => write!(f, "{v}"),
            EntropyValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            EntropyValue::Finite(v) => s.serialize_u64(*v),
            EntropyValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for EntropyValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(EntropyValue::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(EntropyValue::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad entropy value {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    LowerBound,
    HorizonLimited,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::LowerBound => "lower_bound",
            Status::HorizonLimited => "horizon_limited",
        })
    }
}

/// Subspace data backing a reported value. `rows` spans the subspace, or its
/// constraints when `kind` says so.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<usize>,
    pub rows: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub value: EntropyValue,
    pub status: Status,
    pub provenance: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub increments: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<Witness>,
}

impl EntropyReport {
    pub fn new(value: impl Into<EntropyValue>, status: Status, provenance: &str) -> Self {
        EntropyReport {
            value: value.into(),
            status,
            provenance: provenance.to_string(),
            increments: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn exact(value: usize, provenance: &str) -> Self {
        EntropyReport::new(value, Status::Exact, provenance)
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    pub fn with_increments(mut self, inc: Vec<usize>) -> Self {
        self.increments = inc;
        self
    }

    pub fn with_witnesses(mut self, w: Vec<Witness>) -> Self {
        self.witnesses = w;
        self
    }
}
