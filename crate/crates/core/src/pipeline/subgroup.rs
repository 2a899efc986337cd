use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::group::{Elem, GroupElement, SemidirectGroup};

/// A subgroup given by generators; `d` is set when it is `<(d,1)>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupDescription {
    pub generators: Vec<GroupElement>,
    pub d: Option<Elem>,
    pub order: u64,
}

/// Indices of the subgroup generated by `gens`.
pub fn closure(group: &SemidirectGroup, gens: &[GroupElement]) -> BTreeSet<usize> {
    let id = group.identity();
    let mut seen = BTreeSet::from([group.index(&id)]);
    let mut frontier = vec![id];
    while let Some(h) = frontier.pop() {
        for g in gens {
            let n = group.mul(&h, g);
            if seen.insert(group.index(&n)) {
                frontier.push(n);
            }
        }
    }
    seen
}

impl SubgroupDescription {
    pub fn trivial() -> Self {
        SubgroupDescription { generators: Vec::new(), d: None, order: 1 }
    }

    pub fn from_generators(group: &SemidirectGroup, generators: Vec<GroupElement>) -> Self {
        let order = closure(group, &generators).len() as u64;
        let d = match generators.as_slice() {
            [g] if g.b == 1 && order == group.p() => Some(g.a.clone()),
            _ => None,
        };
        SubgroupDescription { generators, d, order }
    }

    pub fn cyclic(group: &SemidirectGroup, d: &Elem) -> Self {
        Self::from_generators(group, vec![GroupElement::new(d.clone(), 1)])
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn elements(&self, group: &SemidirectGroup) -> BTreeSet<usize> {
        closure(group, &self.generators)
    }

    /// Same subgroup of `group` (generating sets may differ).
    pub fn same_subgroup(&self, other: &Self, group: &SemidirectGroup) -> bool {
        self.elements(group) == other.elements(group)
    }

    /// Whether the generated order matches `order`.
    pub fn verify(&self, group: &SemidirectGroup) -> bool {
        self.elements(group).len() as u64 == self.order
    }
}

impl fmt::Display for SubgroupDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let gens: Vec<String> = self.generators.iter().map(ToString::to_string).collect();
        write!(f, "<{}> (order {})", gens.join(", "), self.order)
    }
}

/// Every cyclic subgroup of order `p`, each listed once with a canonical generator.
pub fn order_p_cyclic_subgroups(group: &SemidirectGroup) -> Vec<SubgroupDescription> {
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for g in group.elements() {
        if g == group.identity() || group.pow(&g, group.p()) != group.identity() {
            continue;
        }
        // prefer a generator with b = 1 when there is one
        let gen = (1..group.p()).map(|e| group.pow(&g, e)).find(|h| h.b == 1).unwrap_or_else(|| g.clone());
        let sub = SubgroupDescription::from_generators(group, vec![gen]);
        if seen.insert(sub.elements(group)) {
            out.push(sub);
        }
    }
    out
}
