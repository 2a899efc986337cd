//! Statevector simulation of the one-copy algorithm for `Z_N x| Z_p`:
//! Fourier transform, measure `x`, compute `x M^(b)`, erase `b` through a
//! discrete logarithm, inverse Fourier transform, measure.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{add_mod, euler_phi, gcd, inv_mod, mul_mod, pow_mod, sub_mod};
use crate::error::{Error, Result};
use crate::group::{Elem, LinearMap, SemidirectGroup};
use crate::linalg::{self, CMatrix, CVector};
use crate::msum::discrete_log_bsgs;
use crate::phase::RootTable;
use crate::states::coset_state;

/// `z` for a two-sided 99% interval.
pub const Z_99: f64 = 2.5758293035489;

#[derive(Clone, Debug)]
pub struct MetacyclicSim {
    pub group: SemidirectGroup,
    n: u64,
    p: u64,
    mu: u64,
    roots: RootTable,
    qft: CMatrix,
    iqft: CMatrix,
}

fn step(name: &'static str, v: &CVector) -> SimStep {
    SimStep { name, norm: v.norm(), amplitudes: linalg::vector_to_pairs(v) }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimStep {
    pub name: &'static str,
    pub norm: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimTranscript {
    pub d: u64,
    pub l: u64,
    pub x: u64,
    pub accepted: bool,
    pub steps: Vec<SimStep>,
    /// `Pr(j)` of the final measurement, empty when rejected.
    pub final_distribution: Vec<f64>,
    pub outcome: Option<u64>,
    pub success: bool,
}

impl MetacyclicSim {
    pub fn new(n: u64, p: u64, mu: u64) -> Result<Self> {
        Self::from_group(SemidirectGroup::metacyclic(n, p, mu)?)
    }

    pub fn from_group(group: SemidirectGroup) -> Result<Self> {
        let (n, mu) = match group.mu() {
            LinearMap::Scalar { value, modulus } => (*modulus, *value),
            LinearMap::Matrix(_) => return Err(Error::Unsupported("the stripped algorithm needs A = Z_N".into())),
        };
        let p = group.p();
        if gcd(sub_mod(mu, 1, n), n) != 1 {
            return Err(Error::Precondition(format!("mu - 1 = {} is not a unit mod {n}", sub_mod(mu, 1, n))));
        }
        let a = *group.abelian();
        Ok(MetacyclicSim {
            n,
            p,
            mu,
            roots: RootTable::new(n),
            qft: linalg::fourier_matrix(&a, false),
            iqft: linalg::fourier_matrix(&a, true),
            group,
        })
    }

    fn check_d(&self, d: u64) -> Result<()> {
        if d >= self.n || !self.group.phi_sum(self.p, &Elem(vec![d])).is_zero() {
            return Err(Error::Precondition(format!("d = {d} does not give a subgroup of order p")));
        }
        Ok(())
    }

    fn m(&self, b: u64) -> u64 {
        self.group.matrix_sum(b).as_scalar().expect("scalar on Z_N")
    }

    /// `b` from `y = x M^(b)`: `mu^b = 1 + (mu - 1) y / x`, then a discrete log.
    pub fn erase(&self, x: u64, y: u64) -> Result<u64> {
        let n = self.n;
        let xinv = inv_mod(x, n).ok_or_else(|| Error::Precondition(format!("x = {x} is not a unit")))?;
        let mu_b = add_mod(1, mul_mod(sub_mod(self.mu, 1, n), mul_mod(y, xinv, n), n), n);
        discrete_log_bsgs(self.mu, mu_b, self.p, n)
            .ok_or_else(|| Error::Invariant(format!("no discrete log for mu^b = {mu_b}")))
    }

    /// Amplitudes `p^(-1/2) sum_b omega^(x(l + M^(b) d)) |x M^(b)>` after erasure.
    fn actual_state(&self, d: u64, l: u64, x: u64) -> Result<CVector> {
        let n = self.n;
        let amp = 1.0 / (self.p as f64).sqrt();
        let mut v = CVector::zeros(n as usize);
        for b in 0..self.p {
            let mb = self.m(b);
            let y = mul_mod(x, mb, n);
            if self.erase(x, y)? != b {
                return Err(Error::Invariant(format!("erasure of b = {b} failed")));
            }
            let phase = self.roots.get(mul_mod(x, add_mod(l, mul_mod(mb, d, n), n), n));
            v[y as usize] += phase.scale(amp);
        }
        Ok(v)
    }

    /// Erases every `b` for every unit `x`, and checks `M^(2b) = (1 + mu^b) M^(b)`.
    pub fn check_all_erasures(&self) -> Result<()> {
        let n = self.n;
        for b in 0..self.p {
            let mb = self.m(b);
            if self.m(2 * b) != mul_mod(add_mod(1, pow_mod(self.mu, b, n), n), mb, n) {
                return Err(Error::Invariant(format!("doubling identity fails at b = {b}")));
            }
            for x in (1..n).filter(|&x| gcd(x, n) == 1) {
                if self.erase(x, mul_mod(x, mb, n))? != b {
                    return Err(Error::Invariant(format!("erasure of b = {b} fails at x = {x}")));
                }
            }
        }
        Ok(())
    }

    /// `Pr(x)` after the Fourier transform of the coset state for `(l, d)`.
    pub fn x_distribution(&self, d: u64, l: u64) -> Result<Vec<f64>> {
        self.check_d(d)?;
        let p = self.p as usize;
        let psi = coset_state(&self.group, &Elem(vec![l % self.n]), &Elem(vec![d]))?.amplitudes;
        let psi = linalg::kron(&self.qft, &CMatrix::identity(p, p)) * psi;
        Ok((0..self.n as usize).map(|x| (0..p).map(|b| psi[x * p + b].norm_sqr()).sum()).collect())
    }

    /// `|<d~|actual>|` for unit `x`; `|d~> = N^(-1/2) sum_j omega^(jd) |j>`.
    pub fn perfect_state_overlap(&self, d: u64, x: u64) -> Result<f64> {
        self.check_d(d)?;
        if gcd(x, self.n) != 1 {
            return Err(Error::Precondition(format!("x = {x} is not a unit mod {}", self.n)));
        }
        let actual = self.actual_state(d, 0, x)?;
        let scale = 1.0 / (self.n as f64).sqrt();
        let perfect = CVector::from_iterator(
            self.n as usize,
            (0..self.n).map(|j| self.roots.get(mul_mod(j, d, self.n)).scale(scale)),
        );
        Ok(perfect.dotc(&actual).norm())
    }

    /// Every step for fixed `d` and `l`; `x` and the final outcome are sampled from `rng`.
    pub fn run(&self, d: u64, l: u64, rng: &mut impl Rng) -> Result<SimTranscript> {
        self.check_d(d)?;
        let (n, p) = (self.n as usize, self.p as usize);
        let mut steps = Vec::new();
        let psi = coset_state(&self.group, &Elem(vec![l % self.n]), &Elem(vec![d]))?.amplitudes;
        steps.push(step("coset_state", &psi));
        let psi = linalg::kron(&self.qft, &CMatrix::identity(p, p)) * psi;
        steps.push(step("fourier", &psi));
        let x_probs: Vec<f64> = (0..n).map(|x| (0..p).map(|b| psi[x * p + b].norm_sqr()).sum()).collect();
        let x = sample(&x_probs, rng.random::<f64>()) as u64;
        let post: CVector = CVector::from_iterator(p, (0..p).map(|b| psi[x as usize * p + b]));
        let post = post.unscale(x_probs[x as usize].sqrt());
        steps.push(step("measured_x", &post));
        let mut transcript = SimTranscript {
            d,
            l,
            x,
            accepted: gcd(x, self.n) == 1,
            steps,
            final_distribution: Vec::new(),
            outcome: None,
            success: false,
        };
        if !transcript.accepted {
            return Ok(transcript);
        }
        // |b, 0> -> |b, x M^(b)> on C^p (x) C^N
        let mut computed = CVector::zeros(p * n);
        for b in 0..p {
            let y = mul_mod(x, self.m(b as u64), self.n) as usize;
            computed[b * n + y] = post[b];
        }
        transcript.steps.push(step("computed", &computed));
        // erase b: each |b, y> maps to |y> with b recovered from y
        let mut erased = CVector::zeros(n);
        for b in 0..p {
            for y in 0..n {
                let z = computed[b * n + y];
                if z != Complex64::new(0.0, 0.0) {
                    if self.erase(x, y as u64)? != b as u64 {
                        return Err(Error::Invariant("erasure round trip failed".into()));
                    }
                    erased[y] += z;
                }
            }
        }
        transcript.steps.push(step("erased", &erased));
        let out = &self.iqft * erased;
        transcript.steps.push(step("inverse_fourier", &out));
        let dist: Vec<f64> = out.iter().map(|z| z.norm_sqr()).collect();
        let outcome = sample(&dist, rng.random::<f64>()) as u64;
        transcript.final_distribution = dist;
        transcript.outcome = Some(outcome);
        transcript.success = outcome == d;
        Ok(transcript)
    }

    /// `Pr(outcome = d)` summed exactly over `l`, the measured `x` and the final outcome,
    /// counting rejected `x` as failures.
    pub fn exact_success(&self, d: u64) -> Result<f64> {
        self.check_d(d)?;
        let n = self.n;
        let mut total = 0.0;
        for l in 0..n {
            for x in (0..n).filter(|&x| gcd(x, n) == 1) {
                let out = &self.iqft * self.actual_state(d, l, x)?;
                total += out[d as usize].norm_sqr();
            }
        }
        // each (l, x) branch has weight 1/N * 1/N
        Ok(total / (n * n) as f64)
    }

    /// `phi(N) p / N^2`.
    pub fn bound(&self) -> f64 {
        (euler_phi(self.n) * self.p) as f64 / (self.n * self.n) as f64
    }

    /// `d` with `|<(d,1)>| = p`.
    pub fn valid_d(&self) -> Vec<u64> {
        self.group.order_p_elements().into_iter().map(|e| e.0[0]).collect()
    }

    /// Average of [`Self::exact_success`] over the valid `d`.
    pub fn exact_aggregate(&self) -> Result<ExactAggregate> {
        let ds = self.valid_d();
        let rates = ds.iter().map(|&d| self.exact_success(d)).collect::<Result<Vec<_>>>()?;
        let rate = rates.iter().sum::<f64>() / rates.len() as f64;
        let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
        let bound = self.bound();
        Ok(ExactAggregate {
            n: self.n,
            p: self.p,
            mu: self.mu,
            exact_rate: rate,
            min_rate: min,
            bound,
            pass: min >= bound - 1e-12,
        })
    }

    /// Trial `t` of a seeded batch: `d` and `l` uniform, ChaCha8 stream `t`.
    pub fn trial(&self, seed: u64, t: u64) -> Result<SimTranscript> {
        let ds = self.valid_d();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let d = ds[rng.random_range(0..ds.len())];
        let l = rng.random_range(0..self.n);
        self.run(d, l, &mut rng)
    }

    pub fn estimate_success_rate(&self, trials: u64, seed: u64) -> Result<SuccessEstimate> {
        let results = (0..trials)
            .into_par_iter()
            .map(|t| self.trial(seed, t).map(|tr| (tr.success, !tr.accepted)))
            .collect::<Result<Vec<_>>>()?;
        let successes = results.iter().filter(|r| r.0).count() as u64;
        let rejected = results.iter().filter(|r| r.1).count() as u64;
        let interval = wilson_interval(successes, trials, Z_99);
        let bound = self.bound();
        Ok(SuccessEstimate {
            n: self.n,
            p: self.p,
            mu: self.mu,
            trials,
            seed,
            successes,
            rejected,
            empirical_rate: (trials > 0).then(|| successes as f64 / trials as f64),
            wilson_99: interval,
            bound,
            pass: interval.is_some_and(|(_, hi)| hi >= bound),
        })
    }
}

pub fn run_stripped_algorithm(n: u64, p: u64, mu: u64, d: u64, l: u64, seed: u64) -> Result<SimTranscript> {
    MetacyclicSim::new(n, p, mu)?.run(d, l, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn perfect_state_overlap(n: u64, p: u64, mu: u64, d: u64, x: u64) -> Result<f64> {
    MetacyclicSim::new(n, p, mu)?.perfect_state_overlap(d, x)
}

pub fn estimate_success_rate(n: u64, p: u64, mu: u64, trials: u64, seed: u64) -> Result<SuccessEstimate> {
    MetacyclicSim::new(n, p, mu)?.estimate_success_rate(trials, seed)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactAggregate {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: u64,
    pub mu: u64,
    pub exact_rate: f64,
    pub min_rate: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuccessEstimate {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: u64,
    pub mu: u64,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub rejected: u64,
    pub empirical_rate: Option<f64>,
    pub wilson_99: Option<(f64, f64)>,
    pub bound: f64,
    pub pass: bool,
}

/// Wilson score interval; `None` for zero trials.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Option<(f64, f64)> {
    if trials == 0 {
        return None;
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    Some(((center - half).max(0.0), (center + half).min(1.0)))
}

fn sample(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p / total;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        assert_eq!(wilson_interval(0, 0, Z_99), None);
        let (lo, hi) = wilson_interval(50, 100, 1.96).unwrap();
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
    }
}
