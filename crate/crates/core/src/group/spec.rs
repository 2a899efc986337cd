//! One-line group spec grammar:
//!
//! ```text
//! zn N=<int> p=<prime> mu=<int>
//! zpr p=<prime> r=<int> mu=<row;row;...>     rows are comma-separated ints
//! zpr p=<prime> jordan=<size,size,...>
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::abelian::AbelianGroupSpec;
use super::linear::LinearMap;
use super::semidirect::SemidirectGroup;
use crate::error::{Error, Result};

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse { input: input.to_string(), reason: reason.into() }
}

fn take<'a>(input: &str, kv: &mut BTreeMap<&str, &'a str>, key: &str) -> Result<&'a str> {
    kv.remove(key).ok_or_else(|| parse_err(input, format!("missing `{key}`")))
}

fn int(input: &str, key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>().map_err(|_| parse_err(input, format!("`{key}` expects a nonnegative integer, got `{v}`")))
}

pub fn parse_group_spec(input: &str) -> Result<SemidirectGroup> {
    let mut words = input.split_whitespace();
    let family = words.next().ok_or_else(|| parse_err(input, "empty spec"))?;
    let mut kv = BTreeMap::new();
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| parse_err(input, format!("expected key=value, got `{w}`")))?;
        if kv.insert(k, v).is_some() {
            return Err(parse_err(input, format!("duplicate key `{k}`")));
        }
    }
    let group = match family {
        "zn" => {
            let n = int(input, "N", take(input, &mut kv, "N")?)?;
            let p = int(input, "p", take(input, &mut kv, "p")?)?;
            let mu = int(input, "mu", take(input, &mut kv, "mu")?)?;
            if n < 2 {
                return Err(parse_err(input, "N must be at least 2"));
            }
            SemidirectGroup::metacyclic(n, p, mu)?
        }
        "zpr" => {
            let p = int(input, "p", take(input, &mut kv, "p")?)?;
            if let Some(j) = kv.remove("jordan") {
                let blocks =
                    j.split(',').map(|s| int(input, "jordan", s).map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
                SemidirectGroup::jordan(p, &blocks)?
            } else {
                let r = int(input, "r", take(input, &mut kv, "r")?)? as usize;
                let mu = take(input, &mut kv, "mu")?;
                let rows = mu
                    .split(';')
                    .map(|row| row.split(',').map(|s| int(input, "mu", s)).collect())
                    .collect::<Result<Vec<Vec<u64>>>>()?;
                if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                    return Err(parse_err(input, format!("mu must have {r} rows of {r} entries")));
                }
                SemidirectGroup::with_matrix(p, &rows)?
            }
        }
        other => return Err(parse_err(input, format!("unknown family `{other}`"))),
    };
    if let Some(k) = kv.keys().next() {
        return Err(parse_err(input, format!("unexpected key `{k}`")));
    }
    Ok(group)
}

impl FromStr for SemidirectGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_group_spec(s)
    }
}

/// Canonical spec string; `jordan=` inputs print in the explicit `mu=` form.
impl fmt::Display for SemidirectGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.abelian(), self.mu()) {
            (AbelianGroupSpec::CyclicZN { n }, LinearMap::Scalar { value, .. }) => {
                write!(f, "zn N={n} p={} mu={value}", self.p())
            }
            (AbelianGroupSpec::VectorZpR { r, .. }, LinearMap::Matrix(m)) => {
                let rows: Vec<String> =
                    m.rows().iter().map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(",")).collect();
                write!(f, "zpr p={} r={r} mu={}", self.p(), rows.join(";"))
            }
            _ => unreachable!("validated at construction"),
        }
    }
}

impl serde::Serialize for SemidirectGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SemidirectGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
