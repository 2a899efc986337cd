//! The pretty good measurement for the hidden subgroup states `rho~_d^(x)k`.

mod neumark;
mod radical;

use std::cmp::Ordering;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, SemidirectGroup};
use crate::linalg::{self, CMatrix, CVector};
use crate::msum::{EtaStats, EtaTable};
use crate::states::BlockDecomposition;

pub use neumark::{quantum_sample_vector, NeumarkBlock, QuantumSample};
pub use radical::{squarefree_split, RadicalSum};

/// PGM elements `E_j = sum_x |x><x| (x) |e^x_j><e^x_j|` with
/// `|e^x_j> = |A|^(-1/2) sum_w chi_w(j) |S^x_w>`.
#[derive(Clone, Debug)]
pub struct Povm {
    dec: BlockDecomposition,
}

pub fn build_pgm(group: &SemidirectGroup, k: usize, enum_cap: u128) -> Result<Povm> {
    Ok(Povm { dec: BlockDecomposition::build(group, k, enum_cap)? })
}

impl Povm {
    pub fn from_decomposition(dec: BlockDecomposition) -> Self {
        Povm { dec }
    }

    pub fn decomposition(&self) -> &BlockDecomposition {
        &self.dec
    }

    pub fn group(&self) -> &SemidirectGroup {
        self.dec.group()
    }

    pub fn element_vector(&self, j: &Elem, x_index: usize) -> CVector {
        let n = self.dec.basis().block_size();
        let order_a = self.dec.basis().order_a as f64;
        let mut e = CVector::zeros(n);
        for entry in self.dec.block(x_index) {
            let amp = self.dec.character(&entry.w, j) / (order_a * entry.eta as f64).sqrt();
            for &b in &entry.solutions {
                e[b] = amp;
            }
        }
        e
    }

    pub fn element_block(&self, j: &Elem, x_index: usize) -> CMatrix {
        let e = self.element_vector(j, x_index);
        linalg::outer(&e, &e)
    }

    pub fn element_dense(&self, j: &Elem, dim_cap: u128) -> Result<CMatrix> {
        self.dec.assemble(dim_cap, |xi| self.element_block(j, xi))
    }

    /// `Pr(j | x-block state rho)` for every `j in A`, by basis index.
    pub fn outcome_distribution_block(&self, x_index: usize, rho: &CMatrix) -> Vec<f64> {
        let a = self.group().abelian();
        a.elements()
            .map(|j| {
                let e = self.element_vector(&j, x_index);
                (e.adjoint() * rho * &e)[(0, 0)].re
            })
            .collect()
    }

    /// `max |sum_j E_j - P|` over blocks, `P` the support projector of `Sigma`.
    pub fn completeness_residual(&self) -> f64 {
        let a = self.group().abelian();
        (0..self.dec.basis().blocks())
            .map(|xi| {
                let mut sum = CMatrix::zeros(self.dec.basis().block_size(), self.dec.basis().block_size());
                for j in a.elements() {
                    sum += self.element_block(&j, xi);
                }
                linalg::max_abs_diff(&sum, &self.dec.support_block(xi))
            })
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all `E_j` blocks.
    pub fn min_element_eigenvalue(&self) -> f64 {
        let a = self.group().abelian();
        let mut min = f64::INFINITY;
        for xi in 0..self.dec.basis().blocks() {
            for j in a.elements() {
                min = min.min(linalg::min_eigenvalue(&self.element_block(&j, xi)));
            }
        }
        min
    }
}

/// `Sigma^(-1/2) rho~_j^(x)k Sigma^(-1/2)` with the inverse square root taken
/// from a dense eigendecomposition of `Sigma` on its support.
pub fn pgm_element_via_sigma(dec: &BlockDecomposition, j: &Elem, dim_cap: u128) -> Result<CMatrix> {
    let sigma = dec.sigma_dense(dim_cap)?.matrix;
    let inv_sqrt = linalg::hermitian_function(&sigma, linalg::PSD_TOL, |l| l.sqrt().recip());
    let rho = dec.state_dense(j, dim_cap)?.matrix;
    Ok(&inv_sqrt * rho * &inv_sqrt)
}

/// `Pr(success) = (p/|G|^(k+1)) sum_x (sum_w sqrt(eta^x_w))^2`, kept as
/// `scale * sum` with `sum` a sum of integer multiples of square roots.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessFormula {
    pub scale: Ratio<i128>,
    pub sum: RadicalSum,
}

impl SuccessFormula {
    pub fn from_eta_rows<'r>(group: &SemidirectGroup, k: usize, rows: impl Iterator<Item = &'r [u32]>) -> Self {
        let mut sum = RadicalSum::default();
        for row in rows {
            let nz: Vec<u64> = row.iter().filter(|&&e| e > 0).map(|&e| e as u64).collect();
            sum.add(&RadicalSum::square_of_root_sum(&nz));
        }
        let g = group.order() as i128;
        SuccessFormula { scale: Ratio::new(group.p() as i128, g.pow(k as u32 + 1)), sum }
    }

    pub fn value(&self) -> f64 {
        crate::msum::ratio_f64(self.scale) * self.sum.to_f64()
    }

    pub fn exact(&self) -> Option<Ratio<i128>> {
        self.sum.is_rational().then(|| self.scale * Ratio::from_integer(self.sum.rational_part() as i128))
    }

    pub fn compare(&self, q: Ratio<i128>) -> Result<Ordering> {
        self.sum.compare_scaled(self.scale, q)
    }
}

pub fn success_probability_formula(
    group: &SemidirectGroup,
    k: usize,
    population_cap: u128,
    enum_cap: u128,
) -> Result<SuccessFormula> {
    let table = EtaTable::build(group, k, population_cap, enum_cap)?;
    Ok(SuccessFormula::from_eta_rows(group, k, table.rows.iter().map(Vec::as_slice)))
}

/// `tr(A B)` for square matrices of equal size.
fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

/// `tr(E_d rho~_d^(x)k)` from dense matrices.
pub fn success_probability_trace(povm: &Povm, d: &Elem, dim_cap: u128) -> Result<f64> {
    let e = povm.element_dense(d, dim_cap)?;
    let rho = povm.decomposition().state_dense(d, dim_cap)?;
    let t = trace_product(&e, &rho.matrix);
    if t.im.abs() > 1e-10 {
        return Err(Error::Invariant(format!("trace has imaginary part {}", t.im)));
    }
    Ok(t.re)
}

/// `tr(E_j rho)` for every `j`, from dense matrices.
pub fn outcome_distribution_dense(povm: &Povm, rho: &CMatrix, dim_cap: u128) -> Result<Vec<f64>> {
    povm.group().abelian().elements().map(|j| Ok(trace_product(&povm.element_dense(&j, dim_cap)?, rho).re)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma2Bounds {
    pub alpha: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub beta: Ratio<i128>,
    #[serde(serialize_with = "ser_ratio")]
    pub lower: Ratio<i128>,
    #[serde(serialize_with = "ser_ratio")]
    pub upper: Ratio<i128>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `alpha beta^2 |A|/p^k <= Pr(success) <= p^k/|A|`, after checking
/// `Pr(eta >= alpha) >= beta` on the exhaustive histogram.
pub fn lemma2_bounds(
    group: &SemidirectGroup,
    k: usize,
    stats: &EtaStats,
    alpha: u64,
    beta: Ratio<i128>,
) -> Result<Lemma2Bounds> {
    let actual = stats.prob_at_least(alpha);
    if actual < beta {
        return Err(Error::HypothesisFailed {
            alpha,
            beta: crate::msum::ratio_f64(beta),
            actual: crate::msum::ratio_f64(actual),
        });
    }
    let a = group.abelian().order() as i128;
    let pk = (group.p() as i128).pow(k as u32);
    Ok(Lemma2Bounds {
        alpha,
        beta,
        lower: Ratio::from_integer(alpha as i128) * beta * beta * Ratio::new(a, pk),
        upper: Ratio::new(pk, a),
    })
}

/// The `(alpha, Pr(eta >= alpha))` pair with the largest lower bound.
pub fn best_lemma2_bounds(group: &SemidirectGroup, k: usize, stats: &EtaStats) -> Result<Lemma2Bounds> {
    let mut best: Option<Lemma2Bounds> = None;
    for &alpha in stats.counts.keys().filter(|&&e| e > 0) {
        let b = lemma2_bounds(group, k, stats, alpha, stats.prob_at_least(alpha))?;
        if best.as_ref().is_none_or(|cur| b.lower > cur.lower) {
            best = Some(b);
        }
    }
    best.ok_or_else(|| Error::Invariant("no instance has a solution".into()))
}

/// Whether `lower <= Pr(success) <= upper`, decided exactly.
pub fn lemma2_bracket_holds(bounds: &Lemma2Bounds, formula: &SuccessFormula) -> Result<bool> {
    Ok(formula.compare(bounds.lower)? != Ordering::Less && formula.compare(bounds.upper)? != Ordering::Greater)
}

/// Residuals of the optimality conditions `Y = sum_i sigma_i E_i = Y^dagger`
/// and `Y >= sigma_j` for all `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub commutator_residual: f64,
    pub min_eig_margin: f64,
    pub pass: bool,
}

pub const OPTIMALITY_TOL: f64 = 1e-8;

impl OptimalityReport {
    fn new(commutator_residual: f64, min_eig_margin: f64) -> Self {
        let pass = commutator_residual <= OPTIMALITY_TOL && min_eig_margin >= -OPTIMALITY_TOL;
        OptimalityReport { commutator_residual, min_eig_margin, pass }
    }
}

/// Checks the optimality conditions block by block for the POVM with
/// `x`-blocks `element(j, x)`, against the ensemble `rho~_j^(x)k`.
pub fn verify_optimality_with(
    dec: &BlockDecomposition,
    element: impl Fn(&Elem, usize) -> CMatrix + Sync,
) -> OptimalityReport {
    use rayon::prelude::*;
    let a = dec.group().abelian();
    let js: Vec<Elem> = a.elements().collect();
    let (res, margin) = (0..dec.basis().blocks())
        .into_par_iter()
        .map(|xi| {
            let sigmas: Vec<CMatrix> = js.iter().map(|j| dec.state_block(j, xi)).collect();
            let n = dec.basis().block_size();
            let mut y = CMatrix::zeros(n, n);
            for (j, s) in js.iter().zip(&sigmas) {
                y += s * element(j, xi);
            }
            let res = linalg::max_abs_diff(&y, &y.adjoint());
            let margin = sigmas.iter().map(|s| linalg::min_eigenvalue(&(&y - s))).fold(f64::INFINITY, f64::min);
            (res, margin)
        })
        .reduce(|| (0.0, f64::INFINITY), |a, b| (a.0.max(b.0), a.1.min(b.1)));
    OptimalityReport::new(res, margin)
}

pub fn verify_optimality(povm: &Povm) -> OptimalityReport {
    verify_optimality_with(povm.decomposition(), |j, xi| povm.element_block(j, xi))
}

/// Same conditions on dense matrices.
pub fn verify_optimality_dense(povm: &Povm, dim_cap: u128) -> Result<OptimalityReport> {
    let dec = povm.decomposition();
    let js: Vec<Elem> = dec.group().abelian().elements().collect();
    let sigmas = js.iter().map(|j| Ok(dec.state_dense(j, dim_cap)?.matrix)).collect::<Result<Vec<_>>>()?;
    let n = dec.basis().dim();
    let mut y = CMatrix::zeros(n, n);
    for (j, s) in js.iter().zip(&sigmas) {
        y += s * povm.element_dense(j, dim_cap)?;
    }
    let res = linalg::max_abs_diff(&y, &y.adjoint());
    let margin = sigmas.iter().map(|s| linalg::min_eigenvalue(&(&y - s))).fold(f64::INFINITY, f64::min);
    Ok(OptimalityReport::new(res, margin))
}

/// The control POVM `(1 - eps) E_j + eps P/|A|`, `P` the support projector.
pub fn perturbed_element_block(povm: &Povm, eps: f64, j: &Elem, x_index: usize) -> CMatrix {
    let order_a = povm.decomposition().basis().order_a as f64;
    povm.element_block(j, x_index).scale(1.0 - eps) + povm.decomposition().support_block(x_index).scale(eps / order_a)
}

#[derive(Clone, Debug, Serialize)]
pub struct PgmReport {
    pub group: String,
    pub k: usize,
    pub pr_formula: f64,
    pub pr_formula_exact: String,
    pub pr_trace: f64,
    pub trace_d: Elem,
    pub max_trace_deviation: f64,
    pub lemma2: Lemma2Report,
    pub optimality: OptimalityReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma2Report {
    pub alpha: u64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
    pub beta_exact: String,
    pub lower_exact: String,
    pub upper_exact: String,
    pub bracket_holds: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub dim: u128,
    pub enumeration: u128,
    pub population: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            dim: crate::states::DEFAULT_DIM_CAP,
            enumeration: crate::msum::DEFAULT_ENUM_CAP,
            population: crate::msum::DEFAULT_POPULATION_CAP,
        }
    }
}

/// Formula and trace success probabilities, eta-tail bracket and optimality residuals.
/// The trace is taken at every order-`p` `d`; `pr_trace` is the value at the
/// smallest nonzero one.
pub fn pgm_report(group: &SemidirectGroup, k: usize, caps: Caps) -> Result<PgmReport> {
    use crate::msum::{eta_statistics, ratio_f64, Population};
    let povm = build_pgm(group, k, caps.enumeration)?;
    let formula = success_probability_formula(group, k, caps.population, caps.enumeration)?;
    let stats = eta_statistics(group, k, Population::Exhaustive, caps.population, caps.enumeration)?;
    let bounds = best_lemma2_bounds(group, k, &stats)?;
    let order_p: Vec<Elem> = group.order_p_elements();
    let trace_d = order_p
        .iter()
        .find(|d| !d.is_zero())
        .or(order_p.first())
        .cloned()
        .ok_or_else(|| Error::Invariant("no order-p subgroup <(d,1)>".into()))?;
    let pr_formula = formula.value();
    let mut pr_trace = f64::NAN;
    let mut max_dev: f64 = 0.0;
    for d in &order_p {
        let t = success_probability_trace(&povm, d, caps.dim)?;
        max_dev = max_dev.max((t - pr_formula).abs());
        if *d == trace_d {
            pr_trace = t;
        }
    }
    Ok(PgmReport {
        group: group.to_string(),
        k,
        pr_formula,
        pr_formula_exact: match formula.exact() {
            Some(r) => r.to_string(),
            None => format!("{} * ({})", formula.scale, formula.sum),
        },
        pr_trace,
        trace_d,
        max_trace_deviation: max_dev,
        lemma2: Lemma2Report {
            alpha: bounds.alpha,
            beta: ratio_f64(bounds.beta),
            lower: ratio_f64(bounds.lower),
            upper: ratio_f64(bounds.upper),
            beta_exact: bounds.beta.to_string(),
            lower_exact: bounds.lower.to_string(),
            upper_exact: bounds.upper.to_string(),
            bracket_holds: lemma2_bracket_holds(&bounds, &formula)?,
        },
        optimality: verify_optimality(&povm),
    })
}
