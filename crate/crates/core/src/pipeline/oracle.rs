use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::subgroup::{closure, SubgroupDescription};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupElement, SemidirectGroup};
use crate::msum::{elem_from_json, elem_to_json};

/// Oracle access to `f: G -> labels`, constant and distinct on left cosets of a hidden subgroup.
pub trait HidingFunction: Send + Sync {
    fn group(&self) -> &SemidirectGroup;

    /// `f(g)`; counts one query.
    fn evaluate(&self, g: &GroupElement) -> u64;

    fn queries(&self) -> u64;

    /// Adds `n` to the query counter without evaluating.
    fn charge(&self, n: u64);

    /// The planted subgroup, when the oracle is a fixture that knows it.
    fn planted(&self) -> Option<SubgroupDescription>;
}

/// Fixture oracle labelling each left coset `gH` by the smallest group index in it.
#[derive(Debug)]
pub struct CosetOracle {
    group: Arc<SemidirectGroup>,
    hidden: SubgroupDescription,
    labels: Vec<u64>,
    counter: AtomicU64,
}

impl CosetOracle {
    pub fn new(group: Arc<SemidirectGroup>, hidden: SubgroupDescription) -> Self {
        let h: Vec<GroupElement> = closure(&group, &hidden.generators).into_iter().map(|i| group.element(i)).collect();
        let labels = group
            .elements()
            .map(|g| h.iter().map(|x| group.index(&group.mul(&g, x))).min().expect("identity in H") as u64)
            .collect();
        CosetOracle { group, hidden, labels, counter: AtomicU64::new(0) }
    }

    pub fn from_fixture(fixture: &OracleFixture) -> Result<Self> {
        let group = Arc::new(fixture.group.clone());
        if fixture.labeling != "canonical-coset" {
            return Err(Error::InvalidInput(format!("unknown labeling `{}`", fixture.labeling)));
        }
        let hidden = match &fixture.hidden {
            HiddenSpec::Trivial(s) if s == "trivial" => SubgroupDescription::trivial(),
            HiddenSpec::Trivial(s) => return Err(Error::InvalidInput(format!("unknown hidden subgroup `{s}`"))),
            HiddenSpec::Cyclic { d } => {
                let d = reduce(&group, elem_from_json(d)?)?;
                SubgroupDescription::cyclic(&group, &d)
            }
            HiddenSpec::Generators { generators } => {
                let gens = generators
                    .iter()
                    .map(|(a, b)| Ok(GroupElement::new(reduce(&group, elem_from_json(a)?)?, b % group.p())))
                    .collect::<Result<Vec<_>>>()?;
                SubgroupDescription::from_generators(&group, gens)
            }
        };
        Ok(Self::new(group, hidden))
    }

    pub fn hidden(&self) -> &SubgroupDescription {
        &self.hidden
    }

    pub fn arc_group(&self) -> Arc<SemidirectGroup> {
        self.group.clone()
    }
}

fn reduce(group: &SemidirectGroup, e: Elem) -> Result<Elem> {
    group
        .abelian()
        .reduce(e.coords())
        .ok_or_else(|| Error::InvalidInput(format!("{e} is not an element of {}", group.abelian())))
}

impl HidingFunction for CosetOracle {
    fn group(&self) -> &SemidirectGroup {
        &self.group
    }

    fn evaluate(&self, g: &GroupElement) -> u64 {
        self.counter.fetch_add(1, Ordering::Relaxed);
        self.labels[self.group.index(g)]
    }

    fn queries(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }

    fn charge(&self, n: u64) {
        self.counter.fetch_add(n, Ordering::Relaxed);
    }

    fn planted(&self) -> Option<SubgroupDescription> {
        Some(self.hidden.clone())
    }
}

/// `"trivial"`, `{"d": ...}` or `{"generators": [[a, b], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HiddenSpec {
    Trivial(String),
    Cyclic { d: serde_json::Value },
    Generators { generators: Vec<(serde_json::Value, u64)> },
}

/// Oracle fixture `{group, hidden, labeling}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleFixture {
    pub group: SemidirectGroup,
    pub hidden: HiddenSpec,
    #[serde(default = "canonical")]
    pub labeling: String,
}

fn canonical() -> String {
    "canonical-coset".into()
}

impl OracleFixture {
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("oracle fixture: {e}")))
    }

    pub fn cyclic(group: &SemidirectGroup, d: &Elem) -> Self {
        OracleFixture { group: group.clone(), hidden: HiddenSpec::Cyclic { d: elem_to_json(d) }, labeling: canonical() }
    }

    pub fn trivial(group: &SemidirectGroup) -> Self {
        OracleFixture { group: group.clone(), hidden: HiddenSpec::Trivial("trivial".into()), labeling: canonical() }
    }

    pub fn generators(group: &SemidirectGroup, gens: &[GroupElement]) -> Self {
        OracleFixture {
            group: group.clone(),
            hidden: HiddenSpec::Generators { generators: gens.iter().map(|g| (elem_to_json(&g.a), g.b)).collect() },
            labeling: canonical(),
        }
    }
}
