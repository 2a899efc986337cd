use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, SemidirectGroup};

/// One instance `(x, w)` with `x in A^k`, `w in A`.
#[derive(Clone, Debug)]
pub struct MSumInstance {
    pub group: Arc<SemidirectGroup>,
    pub k: usize,
    pub x: Vec<Elem>,
    pub w: Elem,
}

impl MSumInstance {
    pub fn new(group: Arc<SemidirectGroup>, x: Vec<Elem>, w: Elem) -> Result<Self> {
        let a = group.abelian();
        if x.is_empty() {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let reduce = |e: &Elem| {
            a.reduce(e.coords())
                .ok_or_else(|| Error::InvalidInput(format!("{e} has {} coordinates, A needs {}", e.0.len(), a.rank())))
        };
        let x = x.iter().map(reduce).collect::<Result<Vec<_>>>()?;
        let w = reduce(&w)?;
        Ok(MSumInstance { group, k: x.len(), x, w })
    }

    /// `sum_j Phi^(b_j)^(x_j)`.
    pub fn evaluate(&self, b: &[u64]) -> Elem {
        let a = self.group.abelian();
        self.x.iter().zip(b).fold(a.zero(), |acc, (xj, &bj)| a.add(&acc, &self.group.conjugate_phi_sum(bj, xj)))
    }

    pub fn is_solution(&self, b: &[u64]) -> bool {
        b.len() == self.k && b.iter().all(|&v| v < self.group.p()) && self.evaluate(b) == self.w
    }
}

/// Wire form `{group, k, x, w}`; elements are integers for `Z_N` and arrays for `Z_p^r`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MSumInstanceJson {
    pub group: SemidirectGroup,
    pub k: usize,
    pub x: Vec<serde_json::Value>,
    pub w: serde_json::Value,
}

pub fn elem_from_json(v: &serde_json::Value) -> Result<Elem> {
    let as_u64 = |v: &serde_json::Value| {
        v.as_u64().ok_or_else(|| Error::InvalidInput(format!("expected nonnegative integer, got {v}")))
    };
    match v {
        serde_json::Value::Array(items) => Ok(Elem(items.iter().map(as_u64).collect::<Result<_>>()?)),
        other => Ok(Elem(vec![as_u64(other)?])),
    }
}

pub fn elem_to_json(e: &Elem) -> serde_json::Value {
    if e.0.len() == 1 {
        serde_json::Value::from(e.0[0])
    } else {
        serde_json::Value::from(e.0.clone())
    }
}

impl MSumInstance {
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: MSumInstanceJson =
            serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("instance JSON: {e}")))?;
        let x = raw.x.iter().map(elem_from_json).collect::<Result<Vec<_>>>()?;
        if x.len() != raw.k {
            return Err(Error::InvalidInput(format!("k = {} but x has {} entries", raw.k, x.len())));
        }
        Self::new(Arc::new(raw.group), x, elem_from_json(&raw.w)?)
    }

    pub fn to_json(&self) -> String {
        let raw = MSumInstanceJson {
            group: (*self.group).clone(),
            k: self.k,
            x: self.x.iter().map(elem_to_json).collect(),
            w: elem_to_json(&self.w),
        };
        serde_json::to_string(&raw).expect("serializable")
    }
}

/// The solution list `S^x_w`, lexicographically sorted, and `eta = |S^x_w|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub solutions: Vec<Vec<u64>>,
    pub eta: usize,
}

impl SolutionSet {
    pub fn from_unsorted(mut solutions: Vec<Vec<u64>>) -> Self {
        solutions.sort();
        solutions.dedup();
        let eta = solutions.len();
        SolutionSet { solutions, eta }
    }

    pub fn empty() -> Self {
        SolutionSet { solutions: Vec::new(), eta: 0 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}
