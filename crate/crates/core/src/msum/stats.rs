use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::MSumSolver;
use crate::error::{Error, Result};
use crate::group::{Elem, SemidirectGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Population {
    Exhaustive,
    Sampled { n: u64, seed: u64 },
}

/// Histogram of `eta` over a population of instances `(x, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaStats {
    pub counts: BTreeMap<u64, u128>,
    pub population: u128,
    pub mode: Population,
}

impl EtaStats {
    fn from_counts(counts: BTreeMap<u64, u128>, mode: Population) -> Self {
        let population = counts.values().sum();
        EtaStats { counts, population, mode }
    }

    fn moment(&self, power: u32) -> Ratio<i128> {
        let total: i128 = self.counts.iter().map(|(&e, &c)| (e as i128).pow(power) * c as i128).sum();
        Ratio::new(total, self.population.max(1) as i128)
    }

    pub fn mean(&self) -> Ratio<i128> {
        self.moment(1)
    }

    /// Population variance `E[eta^2] - E[eta]^2`.
    pub fn variance(&self) -> Ratio<i128> {
        let m = self.mean();
        self.moment(2) - m * m
    }

    pub fn prob(&self, eta: u64) -> Ratio<i128> {
        let c = self.counts.get(&eta).copied().unwrap_or(0);
        Ratio::new(c as i128, self.population.max(1) as i128)
    }

    pub fn prob_at_least(&self, alpha: u64) -> Ratio<i128> {
        let c: u128 = self.counts.range(alpha..).map(|(_, &c)| c).sum();
        Ratio::new(c as i128, self.population.max(1) as i128)
    }

    /// `Pr(eta >= alpha) >= beta`, or a `HypothesisFailed` error.
    pub fn check_hypothesis(&self, alpha: u64, beta: f64) -> Result<()> {
        let actual = ratio_f64(self.prob_at_least(alpha));
        if actual >= beta {
            Ok(())
        } else {
            Err(Error::HypothesisFailed { alpha, beta, actual })
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eta_value,count\n");
        for (e, c) in &self.counts {
            writeln!(out, "{e},{c}").expect("write to string");
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let (mode, seed, n) = match self.mode {
            Population::Exhaustive => ("exhaustive", None, None),
            Population::Sampled { n, seed } => ("sampled", Some(seed), Some(n)),
        };
        let mut v = serde_json::json!({
            "mean": ratio_f64(self.mean()),
            "variance": ratio_f64(self.variance()),
            "population": self.population.to_string(),
            "mode": mode,
            "seed": seed,
        });
        if let Some(n) = n {
            v["samples"] = n.into();
        }
        if self.mode == Population::Exhaustive {
            v["mean_exact"] = self.mean().to_string().into();
            v["variance_exact"] = self.variance().to_string().into();
        }
        v
    }
}

pub fn ratio_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `eta^x_w` for every `x in A^k` and `w in A`.
///
/// Rows are indexed by `x` with copy 0 least significant; columns by the basis index of `w`.
#[derive(Clone, Debug)]
pub struct EtaTable {
    pub order: usize,
    pub k: usize,
    pub rows: Vec<Vec<u32>>,
}

impl EtaTable {
    pub fn build(group: &SemidirectGroup, k: usize, population_cap: u128, enum_cap: u128) -> Result<Self> {
        let order = group.abelian().order() as usize;
        let count = population_size(order, k)?;
        Error::check_cap("exhaustive population |A|^(k+1)", count, population_cap)?;
        let solver = MSumSolver::new(group, enum_cap);
        let rows = (0..order.pow(k as u32))
            .into_par_iter()
            .map(|xi| solver.eta_row(&x_from_index(group, k, xi)))
            .collect::<Result<Vec<_>>>()?;
        Ok(EtaTable { order, k, rows })
    }

    pub fn row(&self, x_index: usize) -> &[u32] {
        &self.rows[x_index]
    }
}

fn population_size(order: usize, k: usize) -> Result<u128> {
    (order as u128).checked_pow(k as u32 + 1).ok_or_else(|| Error::InvalidInput("population size overflows".into()))
}

/// The tuple `x in A^k` with the given index, copy 0 least significant.
pub fn x_from_index(group: &SemidirectGroup, k: usize, mut idx: usize) -> Vec<Elem> {
    let a = group.abelian();
    let order = a.order() as usize;
    (0..k)
        .map(|_| {
            let e = a.element(idx % order);
            idx /= order;
            e
        })
        .collect()
}

pub fn x_index(group: &SemidirectGroup, x: &[Elem]) -> usize {
    let a = group.abelian();
    let order = a.order() as usize;
    x.iter().rev().fold(0, |acc, e| acc * order + a.index(e))
}

fn merge(mut a: BTreeMap<u64, u128>, b: BTreeMap<u64, u128>) -> BTreeMap<u64, u128> {
    for (e, c) in b {
        *a.entry(e).or_insert(0) += c;
    }
    a
}

/// Histogram of `eta` over all `(x, w)` (exhaustive) or `n` uniform draws (sampled).
pub fn eta_statistics(
    group: &SemidirectGroup,
    k: usize,
    mode: Population,
    population_cap: u128,
    enum_cap: u128,
) -> Result<EtaStats> {
    eta_statistics_filtered(group, k, mode, population_cap, enum_cap, |_| true)
}

/// As [`eta_statistics`], restricted to tuples `x` accepted by `keep`.
/// In sampled mode rejected draws are redrawn.
pub fn eta_statistics_filtered<F>(
    group: &SemidirectGroup,
    k: usize,
    mode: Population,
    population_cap: u128,
    enum_cap: u128,
    keep: F,
) -> Result<EtaStats>
where
    F: Fn(&[Elem]) -> bool + Sync,
{
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let solver = MSumSolver::new(group, enum_cap);
    let order = group.abelian().order() as usize;
    let counts = match mode {
        Population::Exhaustive => {
            let count = population_size(order, k)?;
            Error::check_cap("exhaustive population |A|^(k+1)", count, population_cap)?;
            (0..order.pow(k as u32))
                .into_par_iter()
                .try_fold(BTreeMap::new, |mut acc, xi| {
                    let x = x_from_index(group, k, xi);
                    if keep(&x) {
                        for eta in solver.eta_row(&x)? {
                            *acc.entry(eta as u64).or_insert(0) += 1;
                        }
                    }
                    Ok::<_, Error>(acc)
                })
                .try_reduce(BTreeMap::new, |a, b| Ok(merge(a, b)))?
        }
        Population::Sampled { n, seed } => {
            let a = group.abelian();
            (0..n)
                .into_par_iter()
                .try_fold(BTreeMap::new, |mut acc, trial| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(trial);
                    let x = loop {
                        let x: Vec<Elem> = (0..k).map(|_| a.element(rng.random_range(0..order))).collect();
                        if keep(&x) {
                            break x;
                        }
                    };
                    let w = a.element(rng.random_range(0..order));
                    let (_, sols) = solver.auto(&x, &w)?;
                    *acc.entry(sols.eta as u64).or_insert(0) += 1;
                    Ok::<_, Error>(acc)
                })
                .try_reduce(BTreeMap::new, |a, b| Ok(merge(a, b)))?
        }
    };
    Ok(EtaStats::from_counts(counts, mode))
}
