//! Canonical family queries and externally supplied count tables.
//!
//! Key grammar, one family per line:
//!
//! ```text
//! R;r=2;d=3;t=0;h=0;c2=8;s=none
//! N;r=3;d=4;t=0;h=0;c2=13;c3=0;s=1          node codimension in s
//! S;r=2;d=3;t=1;h=0;c2=6;s=0                cusp codimension in s
//! NR;r=2;d1=3;d2=1;c=0|<nodal part>|<rational part>
//! NR;r=2;d1=1;d2=2;c=0|<whole constraint>   summed over all splits
//! RR2;r=2;d1=1;d2=2;k=0;l=0|<first>|<second>
//! RR2;r=2;d1=1;d2=2;k=0;l=0|<whole constraint>
//! ```
//!
//! Table files hold `key = integer # provenance` lines; a JSON array of
//! `{family, r, degrees, constraint, joint, value, provenance}` objects is
//! read interchangeably.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Deserialize;

use crate::constraint::{Constraint, FamilyId, Joint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Conditions {
    /// One constraint on the whole curve; for two-component families the
    /// count is summed over every way of splitting it.
    Whole(Constraint),
    /// Per-component constraints.
    Split(Constraint, Constraint),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilyQuery {
    family: FamilyId,
    r: u32,
    conditions: Conditions,
    joint: Option<Joint>,
}

impl FamilyQuery {
    /// A query on `R`, `N` or `S`. For `N` and `S` an absent special
    /// condition is stored as codimension 0.
    pub fn single(family: FamilyId, delta: Constraint) -> Result<Self> {
        family.validate()?;
        let delta = match family {
            FamilyId::R { .. } => {
                if delta.special().is_some() {
                    return Err(Error::validation(
                        "constraint",
                        "family R carries no special point",
                    ));
                }
                delta
            }
            FamilyId::N { .. } | FamilyId::S { .. } => {
                let k = delta.special_or_zero();
                delta.with_special(Some(k))
            }
            _ => {
                return Err(Error::validation(
                    "family",
                    format!("{} needs joint conditions", family.label()),
                ))
            }
        };
        Ok(Self {
            family,
            r: delta.r(),
            conditions: Conditions::Whole(delta),
            joint: None,
        })
    }

    /// `NR` with the node condition in the nodal part.
    pub fn nr(d1: u32, d2: u32, conditions: Conditions, c: u32) -> Result<Self> {
        let family = FamilyId::NR { d1, d2 };
        family.validate()?;
        let conditions = match conditions {
            Conditions::Whole(delta) => {
                let k = delta.special_or_zero();
                Conditions::Whole(delta.with_special(Some(k)))
            }
            Conditions::Split(g1, g2) => {
                if g2.special().is_some() {
                    return Err(Error::validation(
                        "constraint",
                        "the rational part of NR has no node",
                    ));
                }
                let k = g1.special_or_zero();
                Conditions::Split(g1.with_special(Some(k)), g2)
            }
        };
        Self::two_part(family, conditions, Joint::Meeting { c })
    }

    /// `RR2`; the node condition is the joint `k`.
    pub fn rr2(d1: u32, d2: u32, conditions: Conditions, k: u32, l: u32) -> Result<Self> {
        let family = FamilyId::RR2 { d1, d2 };
        family.validate()?;
        let has_special = match &conditions {
            Conditions::Whole(d) => d.special().is_some(),
            Conditions::Split(a, b) => a.special().is_some() || b.special().is_some(),
        };
        if has_special {
            return Err(Error::validation(
                "constraint",
                "RR2 carries its node condition in the joint k, not in s",
            ));
        }
        Self::two_part(family, conditions, Joint::TwoNodal { k, l })
    }

    fn two_part(family: FamilyId, conditions: Conditions, joint: Joint) -> Result<Self> {
        let r = match &conditions {
            Conditions::Whole(d) => d.r(),
            Conditions::Split(a, b) => {
                if a.r() != b.r() {
                    return Err(Error::validation(
                        "constraint",
                        "components live in different P^r",
                    ));
                }
                a.r()
            }
        };
        Ok(Self {
            family,
            r,
            conditions,
            joint: Some(joint),
        })
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn conditions(&self) -> &Conditions {
        &self.conditions
    }

    pub fn joint(&self) -> Option<Joint> {
        self.joint
    }

    fn constraints(&self) -> Vec<&Constraint> {
        match &self.conditions {
            Conditions::Whole(d) => vec![d],
            Conditions::Split(a, b) => vec![a, b],
        }
    }

    /// Finiteness by expected dimension. Whole-constraint queries on
    /// two-component families compare the total weight.
    pub fn is_finite(&self) -> Result<bool> {
        match (&self.conditions, self.joint) {
            (Conditions::Whole(d), None) => self.family.is_finite(d),
            (Conditions::Split(a, b), Some(j)) => self.family.is_finite_pair(a, b, j),
            (Conditions::Whole(d), Some(j)) => {
                let empty = Constraint::new(self.r)?;
                self.family.is_finite_pair(d, &empty, j)
            }
            (Conditions::Split(..), None) => {
                Err(Error::validation("joint", "missing joint conditions"))
            }
        }
    }

    pub fn key(&self) -> String {
        self.to_string()
    }

    pub fn parse_key(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::validation("oracle key", format!("`{text}`: {why}"));
        let mut parts = text.trim().split('|');
        let header = parts.next().unwrap_or_default();
        let tail: Vec<&str> = parts.collect();
        let mut fields = header.split(';').map(str::trim);
        let label = fields.next().unwrap_or_default();
        let mut named: HashMap<&str, u32> = HashMap::new();
        let mut rest = Vec::new();
        for f in fields {
            match f.split_once('=') {
                Some((n @ ("r" | "d" | "d1" | "d2" | "c" | "k" | "l"), v)) => {
                    let v = v
                        .trim()
                        .parse()
                        .map_err(|_| bad("non-numeric header field"))?;
                    named.insert(n, v);
                }
                _ => rest.push(f),
            }
        }
        let get = |n: &str| {
            named
                .get(n)
                .copied()
                .ok_or_else(|| bad(&format!("missing `{n}=`")))
        };
        let r = get("r")?;
        let parse_tail = |expect_split: bool| -> Result<Conditions> {
            match (tail.as_slice(), expect_split) {
                ([whole], _) => Ok(Conditions::Whole(Constraint::parse(whole, r)?)),
                ([a, b], true) => Ok(Conditions::Split(
                    Constraint::parse(a, r)?,
                    Constraint::parse(b, r)?,
                )),
                _ => Err(bad("expected one whole or two per-component constraints")),
            }
        };
        match label {
            "R" | "N" | "S" => {
                if !tail.is_empty() {
                    return Err(bad("single-curve families take no `|` parts"));
                }
                let d = get("d")?;
                let family = match label {
                    "R" => FamilyId::R { d },
                    "N" => FamilyId::N { d },
                    _ => FamilyId::S { d },
                };
                FamilyQuery::single(family, Constraint::parse(&rest.join(";"), r)?)
            }
            "NR" => FamilyQuery::nr(get("d1")?, get("d2")?, parse_tail(true)?, get("c")?),
            "RR2" => FamilyQuery::rr2(
                get("d1")?,
                get("d2")?,
                parse_tail(true)?,
                get("k")?,
                get("l")?,
            ),
            _ => Err(bad("unknown family")),
        }
    }
}

impl fmt::Display for FamilyQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            FamilyId::R { d } | FamilyId::N { d } | FamilyId::S { d } => {
                write!(f, "{};r={};d={d}", self.family.label(), self.r)?
            }
            FamilyId::NR { d1, d2 } | FamilyId::RR2 { d1, d2 } => {
                write!(f, "{};r={};d1={d1};d2={d2}", self.family.label(), self.r)?
            }
        }
        match self.joint {
            Some(Joint::Meeting { c }) => write!(f, ";c={c}")?,
            Some(Joint::TwoNodal { k, l }) => write!(f, ";k={k};l={l}")?,
            None => {}
        }
        match (&self.conditions, self.joint) {
            (Conditions::Whole(d), None) => write!(f, ";{d}"),
            (Conditions::Whole(d), Some(_)) => write!(f, "|{d}"),
            (Conditions::Split(a, b), _) => write!(f, "|{a}|{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRecord {
    pub key: FamilyQuery,
    pub value: BigInt,
    pub provenance: String,
}

#[derive(Debug, Clone, Default)]
pub struct OracleTable {
    records: HashMap<String, OracleRecord>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonConstraint {
    Whole(String),
    Split(Vec<String>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonValue {
    Int(u64),
    Text(String),
}

#[derive(Deserialize)]
struct JsonJoint {
    c: Option<u32>,
    k: Option<u32>,
    l: Option<u32>,
}

#[derive(Deserialize)]
struct JsonRecord {
    family: String,
    r: u32,
    degrees: Vec<u32>,
    constraint: JsonConstraint,
    #[serde(default)]
    joint: Option<JsonJoint>,
    value: JsonValue,
    #[serde(default)]
    provenance: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonFile {
    List(Vec<JsonRecord>),
    Wrapped { records: Vec<JsonRecord> },
}

impl OracleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut t = Self::new();
        t.load_into(path)?;
        Ok(t)
    }

    /// Adds the records of another file. Conflicting duplicates are an error.
    pub fn load_into(&mut self, path: &Path) -> Result<usize> {
        let text = fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e == "json")
            || matches!(text.trim_start().chars().next(), Some('[') | Some('{'));
        let records = if is_json {
            parse_json(path, &text)?
        } else {
            parse_text(path, &text)?
        };
        let n = records.len();
        for (line, rec) in records {
            self.insert_at(path, line, rec)?;
        }
        Ok(n)
    }

    pub fn insert(&mut self, rec: OracleRecord) -> Result<()> {
        self.insert_at(Path::new("<memory>"), 0, rec)
    }

    fn insert_at(&mut self, path: &Path, line: usize, rec: OracleRecord) -> Result<()> {
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if rec.value < BigInt::zero() {
            return Err(err(format!("negative value for {}", rec.key)));
        }
        if rec.key.constraints().iter().any(|c| c.hyperplanes() != 0) {
            return Err(err(format!(
                "{}: hyperplane incidences must be normalized out (h=0)",
                rec.key
            )));
        }
        let key = rec.key.key();
        match self.records.get(&key) {
            Some(old) if old.value != rec.value => Err(err(format!(
                "conflicting values {} and {} for {key}",
                old.value, rec.value
            ))),
            Some(_) => Ok(()),
            None => {
                self.records.insert(key, rec);
                Ok(())
            }
        }
    }

    pub fn lookup(&self, q: &FamilyQuery) -> Option<&BigInt> {
        self.records.get(&q.key()).map(|r| &r.value)
    }

    pub fn record(&self, q: &FamilyQuery) -> Option<&OracleRecord> {
        self.records.get(&q.key())
    }

    /// Lookup that reports the canonical key when absent.
    pub fn require(&self, q: &FamilyQuery) -> Result<BigInt> {
        self.lookup(q)
            .cloned()
            .ok_or_else(|| Error::missing(q.key()))
    }
}

fn parse_text(path: &Path, text: &str) -> Result<Vec<(usize, OracleRecord)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (body, provenance) = match raw.split_once('#') {
            Some((b, p)) => (b.trim(), p.trim()),
            None => (raw.trim(), ""),
        };
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .rsplit_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{body}`")))?;
        let key = FamilyQuery::parse_key(key.trim()).map_err(|e| err(e.to_string()))?;
        let value: BigInt = value
            .trim()
            .parse()
            .map_err(|_| err(format!("`{}` is not an integer", value.trim())))?;
        out.push((
            i + 1,
            OracleRecord {
                key,
                value,
                provenance: provenance.to_string(),
            },
        ));
    }
    Ok(out)
}

fn parse_json(path: &Path, text: &str) -> Result<Vec<(usize, OracleRecord)>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file: JsonFile = serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
    let records = match file {
        JsonFile::List(v) | JsonFile::Wrapped { records: v } => v,
    };
    records
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            let at = i + 1;
            let key = json_key(&rec).map_err(|e| err(at, format!("record {at}: {e}")))?;
            let value = match rec.value {
                JsonValue::Int(v) => BigInt::from(v),
                JsonValue::Text(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| err(at, format!("record {at}: `{s}` is not an integer")))?,
            };
            Ok((
                at,
                OracleRecord {
                    key,
                    value,
                    provenance: rec.provenance,
                },
            ))
        })
        .collect()
}

fn json_key(rec: &JsonRecord) -> Result<FamilyQuery> {
    let conditions = match &rec.constraint {
        JsonConstraint::Whole(s) => Conditions::Whole(Constraint::parse(s, rec.r)?),
        JsonConstraint::Split(v) if v.len() == 2 => Conditions::Split(
            Constraint::parse(&v[0], rec.r)?,
            Constraint::parse(&v[1], rec.r)?,
        ),
        JsonConstraint::Split(_) => {
            return Err(Error::validation(
                "constraint",
                "expected a string or two strings",
            ))
        }
    };
    let joint = rec.joint.as_ref();
    let single = |d: &[u32]| -> Result<u32> {
        match d {
            [d] => Ok(*d),
            _ => Err(Error::validation("degrees", "expected one degree")),
        }
    };
    let pair = |d: &[u32]| -> Result<(u32, u32)> {
        match d {
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::validation("degrees", "expected two degrees")),
        }
    };
    let whole = |c: Conditions| -> Result<Constraint> {
        match c {
            Conditions::Whole(d) => Ok(d),
            Conditions::Split(..) => {
                Err(Error::validation("constraint", "expected one constraint"))
            }
        }
    };
    match rec.family.as_str() {
        "R" => FamilyQuery::single(
            FamilyId::R {
                d: single(&rec.degrees)?,
            },
            whole(conditions)?,
        ),
        "N" => FamilyQuery::single(
            FamilyId::N {
                d: single(&rec.degrees)?,
            },
            whole(conditions)?,
        ),
        "S" => FamilyQuery::single(
            FamilyId::S {
                d: single(&rec.degrees)?,
            },
            whole(conditions)?,
        ),
        "NR" => {
            let (d1, d2) = pair(&rec.degrees)?;
            FamilyQuery::nr(d1, d2, conditions, joint.and_then(|j| j.c).unwrap_or(0))
        }
        "RR2" => {
            let (d1, d2) = pair(&rec.degrees)?;
            let k = joint.and_then(|j| j.k).unwrap_or(0);
            let l = joint.and_then(|j| j.l).unwrap_or(0);
            FamilyQuery::rr2(d1, d2, conditions, k, l)
        }
        other => Err(Error::validation(
            "family",
            format!("unknown family `{other}`"),
        )),
    }
}
