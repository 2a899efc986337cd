use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::oracle::HidingFunction;
use super::reduction::{detect_trivial_vs_order_p, lift_subgroup, reduce_to_cyclic, Reduction, ReductionSummary};
use super::subgroup::SubgroupDescription;
use crate::error::{Error, Result};
use crate::group::{Elem, SemidirectGroup};
use crate::msum::{eta_statistics, ratio_f64, Population};
use crate::pgm::{best_lemma2_bounds, build_pgm, Caps, Povm};

/// One PGM trial: the sampled outcome (`None` for the null outcome) and its verification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub outcome: Option<Elem>,
    pub state_queries: u64,
    pub verify_queries: u64,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HspRun {
    pub subgroup: SubgroupDescription,
    pub trials_budget: u64,
    pub trials_run: u64,
    pub queries: u64,
    /// Probability that one trial returns the planted `d` (0 for trivial `H`).
    pub per_trial_success: f64,
    #[serde(skip)]
    pub transcript: Vec<TrialRecord>,
}

impl HspRun {
    /// Transcript as JSON lines.
    pub fn transcript_jsonl(&self) -> String {
        self.transcript.iter().map(|r| serde_json::to_string(r).expect("serializable") + "\n").collect()
    }
}

/// `Pr(j)` for `j in A` by basis index, followed by the null outcome, for the
/// `k`-copy state hiding `planted` (trivial or `<(d,1)>`).
pub fn outcome_distribution(povm: &Povm, planted: &SubgroupDescription) -> Result<Vec<f64>> {
    let dec = povm.decomposition();
    let group = dec.group();
    let a = group.abelian();
    let d = planted_d(group, planted)?;
    let weight = dec.block_weight();
    let mut probs = vec![0.0; a.order() as usize + 1];
    for xi in 0..dec.basis().blocks() {
        let u = d.as_ref().map(|d| dec.state_block_vector(d, xi));
        for (ji, j) in a.elements().enumerate() {
            let e = povm.element_vector(&j, xi);
            probs[ji] += weight
                * match &u {
                    Some(u) => e.dotc(u).norm_sqr(),
                    None => e.norm_squared(),
                };
        }
    }
    let total: f64 = probs.iter().sum();
    *probs.last_mut().expect("nonempty") = (1.0 - total).max(0.0);
    Ok(probs)
}

fn planted_d(group: &SemidirectGroup, planted: &SubgroupDescription) -> Result<Option<Elem>> {
    if planted.is_trivial() {
        return Ok(None);
    }
    match &planted.d {
        Some(d) if planted.order == group.p() => Ok(Some(d.clone())),
        _ => Err(Error::Precondition(format!("hidden subgroup {planted} is neither trivial nor <(d,1)> of order p"))),
    }
}

/// `ceil(40 / lower)` with `lower` the best eta-tail lower bound for `(G, k)`.
pub fn default_trials(group: &SemidirectGroup, k: usize, caps: Caps) -> Result<u64> {
    let stats = eta_statistics(group, k, Population::Exhaustive, caps.population, caps.enumeration)?;
    let lower = ratio_f64(best_lemma2_bounds(group, k, &stats)?.lower);
    Ok((40.0 / lower).ceil() as u64)
}

fn sample(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Samples the PGM on `k` copies of the hidden subgroup state of `f` and checks
/// each outcome `j` with `f(0,0) = f(j,1)`. Returns the first verified
/// `<(j,1)>`, or the trivial subgroup once the budget is spent.
///
/// States are built from the subgroup planted in `f`; each trial is charged `k` queries.
pub fn run_pgm_hsp(f: &dyn HidingFunction, k: usize, trials: Option<u64>, seed: u64, caps: Caps) -> Result<HspRun> {
    let group = f.group();
    let planted = f
        .planted()
        .ok_or_else(|| Error::Unsupported("state preparation needs an oracle with a planted subgroup".into()))?;
    let povm = build_pgm(group, k, caps.enumeration)?;
    let probs = outcome_distribution(&povm, &planted)?;
    let per_trial_success = match planted_d(group, &planted)? {
        Some(d) => probs[group.abelian().index(&d)],
        None => 0.0,
    };
    let budget = match trials {
        Some(t) => t,
        None => default_trials(group, k, caps)?,
    };
    let a = group.abelian();
    let mut transcript = Vec::new();
    let mut found = None;
    for trial in 0..budget {
        f.charge(k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let idx = sample(&probs, rng.random::<f64>());
        let outcome = (idx < a.order() as usize).then(|| a.element(idx));
        let before = f.queries();
        let verified = outcome.as_ref().is_some_and(|j| detect_trivial_vs_order_p(f, j));
        transcript.push(TrialRecord {
            trial,
            outcome: outcome.clone(),
            state_queries: k as u64,
            verify_queries: f.queries() - before,
            verified,
        });
        if verified {
            found = outcome;
            break;
        }
    }
    let subgroup = match &found {
        Some(d) => SubgroupDescription::cyclic(group, d),
        None => SubgroupDescription::trivial(),
    };
    Ok(HspRun {
        subgroup,
        trials_budget: budget,
        trials_run: transcript.len() as u64,
        queries: f.queries(),
        per_trial_success,
        transcript,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HspSolution {
    pub subgroup: SubgroupDescription,
    pub reduction: ReductionSummary,
    pub run: Option<HspRun>,
}

/// Reduction to a trivial-or-cyclic problem, PGM run on the quotient, and lift.
pub fn solve_hsp(f: &dyn HidingFunction, k: usize, trials: Option<u64>, seed: u64, caps: Caps) -> Result<HspSolution> {
    let (reduction, summary) = reduce_to_cyclic(f, caps.enumeration)?;
    match reduction {
        Reduction::Final(h) => Ok(HspSolution { subgroup: h, reduction: summary, run: None }),
        Reduction::Reduced { h1, oracle, quotient } => {
            let run = run_pgm_hsp(oracle.as_ref(), k, trials, seed, caps)?;
            let subgroup = lift_subgroup(f.group(), &h1, quotient.as_ref(), &run.subgroup);
            Ok(HspSolution { subgroup, reduction: summary, run: Some(run) })
        }
    }
}
