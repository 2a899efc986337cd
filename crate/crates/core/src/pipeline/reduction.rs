use std::collections::BTreeSet;

use serde::Serialize;

use super::oracle::HidingFunction;
use super::subgroup::SubgroupDescription;
use crate::arith::mul_mod;
use crate::error::{Error, Result};
use crate::group::{row_reduce, AbelianGroupSpec, Elem, GroupElement, LinearMap, SemidirectGroup};

/// Generators of `H_1 = {a : f(a,0) = f(0,0)}`, found with exactly `|A|` queries.
/// Greedy in index order, so the set is minimal: the least positive element for
/// `Z_N`, a basis for `Z_p^r`.
pub fn abelian_hsp_solve(f: &dyn HidingFunction, enum_cap: u128) -> Result<SubgroupDescription> {
    let group = f.group();
    let a = group.abelian();
    Error::check_cap("abelian enumeration |A|", a.order() as u128, enum_cap)?;
    let labels: Vec<u64> = a.elements().map(|e| f.evaluate(&GroupElement::new(e, 0))).collect();
    let base = labels[0];
    let mut gens: Vec<Elem> = Vec::new();
    let mut span: BTreeSet<Elem> = BTreeSet::from([a.zero()]);
    for (i, &label) in labels.iter().enumerate() {
        let e = a.element(i);
        if label == base && !span.contains(&e) {
            gens.push(e);
            span = a.span(&gens).into_iter().collect();
        }
    }
    let generators = gens.into_iter().map(|e| GroupElement::new(e, 0)).collect();
    Ok(SubgroupDescription::from_generators(group, generators))
}

/// `phi(A_1) = A_1` for `A_1` spanned by the generators (all in `A x {0}`).
pub fn check_h1_normal(h1: &SubgroupDescription, group: &SemidirectGroup) -> Result<bool> {
    if h1.generators.iter().any(|g| g.b != 0) {
        return Err(Error::Precondition("H1 must lie in A x {0}".into()));
    }
    let a = group.abelian();
    let gens: Vec<Elem> = h1.generators.iter().map(|g| g.a.clone()).collect();
    let span: BTreeSet<Elem> = a.span(&gens).into_iter().collect();
    // phi is injective, so phi(A_1) in A_1 forces equality
    Ok(gens.iter().all(|g| span.contains(&group.phi(g))))
}

#[derive(Clone, Debug)]
enum Projection {
    /// `Z_N -> Z_g`, `a -> a mod g`.
    Cyclic { g: u64 },
    /// `Z_p^r -> Z_p^(r-t)`: reduce by the RREF basis of `A_1`, keep the free coordinates.
    Linear { p: u64, rref: Vec<Vec<u64>>, pivots: Vec<usize>, free: Vec<usize> },
}

/// `G_2 = A/A_1 x| Z_p` with its projection and coset representatives.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: SemidirectGroup,
    projection: Projection,
    /// Lexicographically least element of each coset, by index in `A_2`.
    pub representatives: Vec<Elem>,
}

impl Quotient {
    /// `None` when `A_1 = A`.
    pub fn new(group: &SemidirectGroup, a1_generators: &[Elem]) -> Result<Option<Self>> {
        let a = group.abelian();
        let (projection, a2, mu2) = match *a {
            AbelianGroupSpec::CyclicZN { n } => {
                let g = a1_generators.iter().fold(n, |acc, e| crate::arith::gcd(acc, e.0[0]));
                if g == 1 {
                    return Ok(None);
                }
                let mu = group.mu().as_scalar().expect("scalar on Z_N");
                (Projection::Cyclic { g }, AbelianGroupSpec::CyclicZN { n: g }, LinearMap::scalar(g, mu))
            }
            AbelianGroupSpec::VectorZpR { p, r } => {
                let rref = row_reduce(p, a1_generators.iter().map(|e| e.0.clone()).collect());
                if rref.len() == r {
                    return Ok(None);
                }
                let pivots: Vec<usize> =
                    rref.iter().map(|row| row.iter().position(|&v| v != 0).expect("nonzero row")).collect();
                let free: Vec<usize> = (0..r).filter(|c| !pivots.contains(c)).collect();
                let proj = Projection::Linear { p, rref, pivots, free: free.clone() };
                // induced map on A_2: column i is the image of phi(e_{free_i}); stored mu2 is its transpose
                let s = free.len();
                let mut cols = Vec::with_capacity(s);
                for &c in &free {
                    let mut e = vec![0u64; r];
                    e[c] = 1;
                    cols.push(project_linear(&proj, &group.phi(&Elem(e))).0);
                }
                let rows: Vec<Vec<u64>> = cols; // rows of mu2 = columns of Phi2
                let m = crate::group::ModMatrix::from_rows(p, &rows).expect("square");
                (proj, AbelianGroupSpec::VectorZpR { p, r: s }, LinearMap::Matrix(m))
            }
        };
        let group2 =
            SemidirectGroup::new(a2, group.p(), mu2).map_err(|e| Error::Unsupported(format!("quotient group: {e}")))?;
        let mut representatives: Vec<Option<Elem>> = vec![None; a2.order() as usize];
        for e in a.elements() {
            let i = a2.index(&project(&projection, &e));
            if representatives[i].as_ref().is_none_or(|cur| e < *cur) {
                representatives[i] = Some(e);
            }
        }
        let representatives = representatives.into_iter().map(|r| r.expect("projection is onto")).collect();
        Ok(Some(Quotient { group: group2, projection, representatives }))
    }

    pub fn project(&self, a: &Elem) -> Elem {
        project(&self.projection, a)
    }

    pub fn representative(&self, a2: &Elem) -> &Elem {
        &self.representatives[self.group.abelian().index(a2)]
    }
}

fn project(projection: &Projection, a: &Elem) -> Elem {
    match projection {
        Projection::Cyclic { g } => Elem(vec![a.0[0] % g]),
        Projection::Linear { .. } => project_linear(projection, a),
    }
}

fn project_linear(projection: &Projection, a: &Elem) -> Elem {
    let Projection::Linear { p, rref, pivots, free } = projection else { unreachable!() };
    let mut v = a.0.clone();
    for (row, &c) in rref.iter().zip(pivots) {
        let f = v[c];
        if f != 0 {
            for (x, &r) in v.iter_mut().zip(row) {
                *x = (*x + p - mul_mod(f, r, *p)) % p;
            }
        }
    }
    Elem(free.iter().map(|&c| v[c]).collect())
}

/// `f_2(a_2, b) = f(rep(a_2), b)` on `G_2`.
pub struct QuotientOracle<'f> {
    base: &'f dyn HidingFunction,
    quotient: Quotient,
}

impl<'f> QuotientOracle<'f> {
    pub fn new(base: &'f dyn HidingFunction, quotient: Quotient) -> Self {
        QuotientOracle { base, quotient }
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }
}

/// `H = <H_1, (rep(d_2), b)>` from the generators of `H_2 <= G_2`.
pub fn lift_subgroup(
    group: &SemidirectGroup,
    h1: &SubgroupDescription,
    quotient: Option<&Quotient>,
    h2: &SubgroupDescription,
) -> SubgroupDescription {
    let Some(q) = quotient else { return h2.clone() };
    let mut gens = h1.generators.clone();
    for g in &h2.generators {
        gens.push(GroupElement::new(q.representative(&g.a).clone(), g.b));
    }
    SubgroupDescription::from_generators(group, gens)
}

impl HidingFunction for QuotientOracle<'_> {
    fn group(&self) -> &SemidirectGroup {
        &self.quotient.group
    }

    fn evaluate(&self, g: &GroupElement) -> u64 {
        self.base.evaluate(&GroupElement::new(self.quotient.representative(&g.a).clone(), g.b))
    }

    fn queries(&self) -> u64 {
        self.base.queries()
    }

    fn charge(&self, n: u64) {
        self.base.charge(n)
    }

    /// Image of the planted subgroup in `G_2`.
    fn planted(&self) -> Option<SubgroupDescription> {
        let h = self.base.planted()?;
        let g = self.base.group();
        let mut gens: Vec<GroupElement> = Vec::new();
        for i in h.elements(g) {
            let e = g.element(i);
            if e.b == 1 {
                gens = vec![GroupElement::new(self.quotient.project(&e.a), 1)];
                break;
            }
        }
        Some(SubgroupDescription::from_generators(&self.quotient.group, gens))
    }
}

/// Outcome of the reduction.
#[allow(clippy::large_enum_variant)]
pub enum Reduction<'f> {
    /// `H` is determined without a PGM run.
    Final(SubgroupDescription),
    /// `H = H_1` times a trivial-or-order-`p` subgroup of `G_2`, hidden by `f_2`.
    Reduced { h1: SubgroupDescription, oracle: Box<dyn HidingFunction + 'f>, quotient: Option<Quotient> },
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionSummary {
    pub h1: SubgroupDescription,
    pub h1_normal: bool,
    pub quotient: Option<String>,
}

/// Factor out `H_1 = H cap (A x {0})`.
pub fn reduce_to_cyclic<'f>(f: &'f dyn HidingFunction, enum_cap: u128) -> Result<(Reduction<'f>, ReductionSummary)> {
    let group = f.group();
    let h1 = abelian_hsp_solve(f, enum_cap)?;
    let normal = check_h1_normal(&h1, group)?;
    if !normal {
        let summary = ReductionSummary { h1: h1.clone(), h1_normal: false, quotient: None };
        return Ok((Reduction::Final(h1), summary));
    }
    if h1.is_trivial() {
        let summary = ReductionSummary { h1: h1.clone(), h1_normal: true, quotient: Some(group.to_string()) };
        return Ok((Reduction::Reduced { h1, oracle: Box::new(Passthrough(f)), quotient: None }, summary));
    }
    let gens: Vec<Elem> = h1.generators.iter().map(|g| g.a.clone()).collect();
    match Quotient::new(group, &gens)? {
        None => {
            // A_1 = A: H is A x {0} or all of G
            let id = group.identity();
            let whole = f.evaluate(&GroupElement::new(id.a.clone(), 1)) == f.evaluate(&id);
            let mut generators = h1.generators.clone();
            if whole {
                generators.push(GroupElement::new(id.a.clone(), 1));
            }
            let h = SubgroupDescription::from_generators(group, generators);
            Ok((Reduction::Final(h), ReductionSummary { h1, h1_normal: true, quotient: None }))
        }
        Some(quotient) => {
            let summary =
                ReductionSummary { h1: h1.clone(), h1_normal: true, quotient: Some(quotient.group.to_string()) };
            let oracle = Box::new(QuotientOracle::new(f, quotient.clone()));
            Ok((Reduction::Reduced { h1, oracle, quotient: Some(quotient) }, summary))
        }
    }
}

/// `f` itself, viewed through the trait object.
struct Passthrough<'f>(&'f dyn HidingFunction);

impl HidingFunction for Passthrough<'_> {
    fn group(&self) -> &SemidirectGroup {
        self.0.group()
    }
    fn evaluate(&self, g: &GroupElement) -> u64 {
        self.0.evaluate(g)
    }
    fn queries(&self) -> u64 {
        self.0.queries()
    }
    fn charge(&self, n: u64) {
        self.0.charge(n)
    }
    fn planted(&self) -> Option<SubgroupDescription> {
        self.0.planted()
    }
}

/// `f(rep(a_2), b)` depends only on `(a_2, b)`: checked over all of `G`.
pub fn quotient_well_defined(f: &dyn HidingFunction, quotient: &Quotient) -> bool {
    let group = f.group();
    group.elements().all(|g| {
        let rep = quotient.representative(&quotient.project(&g.a)).clone();
        f.evaluate(&g) == f.evaluate(&GroupElement::new(rep, g.b))
    })
}

/// `f(0,0) = f(d,1)`: true certifies `H = <(d,1)>`.
pub fn detect_trivial_vs_order_p(f: &dyn HidingFunction, d: &Elem) -> bool {
    let id = f.group().identity();
    f.evaluate(&id) == f.evaluate(&GroupElement::new(d.clone(), 1))
}
