use serde::Serialize;

use super::dlog::discrete_log_bsgs;
use super::instance::{MSumInstance, SolutionSet};
use crate::arith::{add_mod, gcd, inv_mod, mul_mod, sub_mod, SqrtModP};
use crate::error::{Error, Result};
use crate::group::{AbelianGroupSpec, Elem, LinearMap, SemidirectGroup};

/// Addition of elements of `A` by their basis indices.
#[derive(Clone, Debug)]
pub(crate) struct IndexAdder {
    modulus: usize,
    rank: usize,
    table: Option<Vec<u32>>,
    order: usize,
}

impl IndexAdder {
    const TABLE_LIMIT: usize = 1024;

    pub(crate) fn new(a: &AbelianGroupSpec) -> Self {
        let order = a.order() as usize;
        let mut adder = IndexAdder { modulus: a.modulus() as usize, rank: a.rank(), table: None, order };
        if order <= Self::TABLE_LIMIT {
            let mut t = vec![0u32; order * order];
            for i in 0..order {
                for j in 0..order {
                    t[i * order + j] = adder.add_digits(i, j) as u32;
                }
            }
            adder.table = Some(t);
        }
        adder
    }

    fn add_digits(&self, mut i: usize, mut j: usize) -> usize {
        let m = self.modulus;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.rank {
            out += ((i % m + j % m) % m) * scale;
            i /= m;
            j /= m;
            scale *= m;
        }
        out
    }

    #[inline]
    pub(crate) fn add(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.order + j] as usize,
            None => self.add_digits(i, j),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    BruteForce,
    MetacyclicDlog,
    HeisenbergClosedForm,
    Jordan,
}

/// Solver state for one group: the table `M^(b)`, `b < p`, plus helpers.
#[derive(Clone, Debug)]
pub struct MSumSolver<'g> {
    group: &'g SemidirectGroup,
    sums: Vec<LinearMap>,
    adder: IndexAdder,
    sqrt: Option<SqrtModP>,
    enum_cap: u128,
}

impl<'g> MSumSolver<'g> {
    pub fn new(group: &'g SemidirectGroup, enum_cap: u128) -> Self {
        let sums = group.matrix_sum_table(group.p());
        let sqrt = group.is_heisenberg().then(|| SqrtModP::new(group.p()));
        MSumSolver { group, sums, adder: IndexAdder::new(group.abelian()), sqrt, enum_cap }
    }

    pub fn group(&self) -> &SemidirectGroup {
        self.group
    }

    fn check_enum(&self, k: usize) -> Result<()> {
        let needed = (self.group.p() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        Error::check_cap("enumeration of Z_p^k", needed, self.enum_cap)
    }

    /// `idx[b] = index(M^(b) x)` for each `b < p`.
    fn orbit_indices(&self, x: &Elem) -> Vec<usize> {
        let a = self.group.abelian();
        self.sums.iter().map(|m| a.index(&Elem(m.apply(x.coords())))).collect()
    }

    pub fn evaluate(&self, x: &[Elem], b: &[u64]) -> Elem {
        let a = self.group.abelian();
        x.iter().zip(b).fold(a.zero(), |acc, (xj, &bj)| a.add(&acc, &Elem(self.sums[bj as usize].apply(xj.coords()))))
    }

    /// Walk `b in Z_p^k` in lexicographic order, passing `(b, index of sum)`.
    fn enumerate(&self, tables: &[Vec<usize>], mut visit: impl FnMut(&[u64], usize)) {
        let k = tables.len();
        let p = self.group.p() as usize;
        let mut b = vec![0u64; k];
        // partial[j] = index of the sum of the first j terms
        let mut partial = vec![0usize; k + 1];
        let zero = 0usize;
        partial[0] = zero;
        for j in 0..k {
            partial[j + 1] = self.adder.add(partial[j], tables[j][0]);
        }
        loop {
            visit(&b, partial[k]);
            // odometer, last coordinate fastest
            let mut j = k;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                b[j] += 1;
                if (b[j] as usize) < p {
                    break;
                }
                b[j] = 0;
            }
            for t in j..k {
                partial[t + 1] = self.adder.add(partial[t], tables[t][b[t] as usize]);
            }
        }
    }

    pub fn bruteforce(&self, x: &[Elem], w: &Elem) -> Result<SolutionSet> {
        self.check_enum(x.len())?;
        let tables: Vec<Vec<usize>> = x.iter().map(|xj| self.orbit_indices(xj)).collect();
        let target = self.group.abelian().index(w);
        let mut solutions = Vec::new();
        self.enumerate(&tables, |b, idx| {
            if idx == target {
                solutions.push(b.to_vec());
            }
        });
        let eta = solutions.len();
        Ok(SolutionSet { solutions, eta })
    }

    /// `eta^x_w` for every `w` (indexed by basis index of `w`).
    pub fn eta_row(&self, x: &[Elem]) -> Result<Vec<u32>> {
        self.check_enum(x.len())?;
        let tables: Vec<Vec<usize>> = x.iter().map(|xj| self.orbit_indices(xj)).collect();
        let mut row = vec![0u32; self.group.abelian().order() as usize];
        self.enumerate(&tables, |_, idx| row[idx] += 1);
        Ok(row)
    }

    /// Solution lists `S^x_w` for every `w` at once (indexed by basis index of `w`).
    pub fn solution_lists(&self, x: &[Elem]) -> Result<Vec<Vec<Vec<u64>>>> {
        self.check_enum(x.len())?;
        let tables: Vec<Vec<usize>> = x.iter().map(|xj| self.orbit_indices(xj)).collect();
        let mut lists = vec![Vec::new(); self.group.abelian().order() as usize];
        self.enumerate(&tables, |b, idx| lists[idx].push(b.to_vec()));
        Ok(lists)
    }

    /// `k = 1`, `A = Z_N`: reduce `M^(b) x = w` to the discrete log
    /// `mu^b = 1 + (mu - 1) w / x` when `x` and `mu - 1` are units.
    pub fn metacyclic(&self, x: &[Elem], w: &Elem) -> Result<SolutionSet> {
        let AbelianGroupSpec::CyclicZN { n } = *self.group.abelian() else {
            return Err(Error::Unsupported("discrete-log solver needs A = Z_N".into()));
        };
        if x.len() != 1 {
            return Err(Error::Unsupported("discrete-log solver needs k = 1".into()));
        }
        let mu = self.group.mu().as_scalar().expect("scalar mu on Z_N");
        let (x0, w0) = (x[0].0[0], w.0[0]);
        let mu1 = sub_mod(mu, 1, n);
        if gcd(x0, n) != 1 || gcd(mu1, n) != 1 {
            return self.bruteforce(x, w);
        }
        let ratio = mul_mod(w0, inv_mod(x0, n).expect("unit"), n);
        let target = add_mod(1, mul_mod(mu1, ratio, n), n);
        Ok(match discrete_log_bsgs(mu, target, self.group.p(), n) {
            Some(b) => SolutionSet { solutions: vec![vec![b]], eta: 1 },
            None => SolutionSet::empty(),
        })
    }

    /// Heisenberg group, `k = 2`: roots of the discriminant
    /// `D = (2wy1 + vy1 - v^2 - 2vx1)(y1 + y2)y2 + (vy2 + x1y2 - x2y1)^2`.
    /// Degenerate `y1`, `y2`, `y1 + y2 = 0` go to enumeration.
    pub fn heisenberg(&self, x: &[Elem], w: &Elem) -> Result<SolutionSet> {
        let sqrt = match (&self.sqrt, x.len()) {
            (Some(s), 2) => s,
            _ => return Err(Error::Unsupported("closed form needs the Heisenberg group and k = 2".into())),
        };
        let p = self.group.p();
        let (x1, y1) = (x[0].0[0], x[0].0[1]);
        let (x2, y2) = (x[1].0[0], x[1].0[1]);
        let (w0, v) = (w.0[0], w.0[1]);
        let y12 = add_mod(y1, y2, p);
        if y1 == 0 || y2 == 0 || y12 == 0 {
            return self.bruteforce(x, w);
        }
        let m = |a: u64, b: u64| mul_mod(a, b, p);
        let first = {
            // 2wy1 + vy1 - v^2 - 2vx1
            let pos = add_mod(m(2, m(w0, y1)), m(v, y1), p);
            let neg = add_mod(m(v, v), m(2, m(v, x1)), p);
            sub_mod(pos, neg, p)
        };
        let cross = sub_mod(add_mod(m(v, y2), m(x1, y2), p), m(x2, y1), p);
        let delta = add_mod(m(m(first, y12), y2), m(cross, cross), p);
        let Some(root) = sqrt.sqrt(delta) else {
            return Ok(SolutionSet::empty());
        };
        let den1 = inv_mod(m(y1, y12), p).expect("nonzero mod p");
        let den2 = inv_mod(m(y2, y12), p).expect("nonzero mod p");
        let num1 = sub_mod(add_mod(m(v, y1), m(x2, y1), p), m(x1, y2), p);
        let num2 = cross;
        let mut sols = Vec::with_capacity(2);
        for r in [root, (p - root) % p] {
            let b1 = m(add_mod(num1, r, p), den1);
            let b2 = m(sub_mod(num2, r, p), den2);
            sols.push(vec![b1, b2]);
        }
        Ok(SolutionSet::from_unsorted(sols))
    }

    /// Rows `i` of `M^(b)` that are linear in `b`: `M^(b)_i = b * c_i`.
    /// For an upper Jordan block this is the last row of the block.
    fn linear_rows(&self) -> Vec<(usize, Vec<u64>)> {
        let LinearMap::Matrix(m1) = &self.sums[1.min(self.sums.len() - 1)] else {
            return Vec::new();
        };
        let p = self.group.p();
        let r = m1.size();
        (0..r)
            .filter_map(|i| {
                let c: Vec<u64> = (0..r).map(|j| m1.get(i, j)).collect();
                let linear = self.sums.iter().enumerate().all(|(b, mb)| {
                    let mb = mb.as_matrix().expect("matrix sums");
                    (0..r).all(|j| mb.get(i, j) == mul_mod(b as u64, c[j], p))
                });
                linear.then_some((i, c))
            })
            .collect()
    }

    /// `A = Z_p^r`: use a degree-one equation `sum_j b_j (c . x_j) = w_i` to
    /// solve for one unknown, enumerate the remaining `p^(k-1)` slice, and check
    /// each candidate against the full system.
    pub fn jordan(&self, x: &[Elem], w: &Elem) -> Result<SolutionSet> {
        if !matches!(self.group.abelian(), AbelianGroupSpec::VectorZpR { .. }) {
            return Err(Error::Unsupported("elimination solver needs A = Z_p^r".into()));
        }
        self.check_enum(x.len())?;
        let p = self.group.p();
        let k = x.len();
        let mut pivot = None;
        for (i, c) in self.linear_rows() {
            let coeffs: Vec<u64> = x
                .iter()
                .map(|xj| c.iter().zip(xj.coords()).fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, p), p)))
                .collect();
            match coeffs.iter().position(|&a| a != 0) {
                Some(t) => {
                    pivot = Some((t, coeffs, w.0[i]));
                    break;
                }
                // 0 = w_i has no solutions unless w_i = 0
                None if w.0[i] != 0 => return Ok(SolutionSet::empty()),
                None => {}
            }
        }
        let Some((t, coeffs, rhs)) = pivot else {
            return self.bruteforce(x, w);
        };
        let inv = inv_mod(coeffs[t], p).expect("nonzero mod p");
        let others: Vec<usize> = (0..k).filter(|&j| j != t).collect();
        let other_x: Vec<Elem> = others.iter().map(|&j| x[j].clone()).collect();
        let tables: Vec<Vec<usize>> = other_x.iter().map(|xj| self.orbit_indices(xj)).collect();
        let mut sols = Vec::new();
        let mut full = vec![0u64; k];
        let a = self.group.abelian();
        let target = a.index(w);
        let xt = self.orbit_indices(&x[t]);
        self.enumerate(&tables, |rest, idx| {
            let lin = others.iter().zip(rest).fold(0, |acc, (&j, &bj)| add_mod(acc, mul_mod(coeffs[j], bj, p), p));
            let bt = mul_mod(sub_mod(rhs, lin, p), inv, p);
            if self.adder.add(idx, xt[bt as usize]) == target {
                for (&j, &bj) in others.iter().zip(rest) {
                    full[j] = bj;
                }
                full[t] = bt;
                sols.push(full.clone());
            }
        });
        Ok(SolutionSet::from_unsorted(sols))
    }

    /// Pick the specialized solver the group supports.
    pub fn auto(&self, x: &[Elem], w: &Elem) -> Result<(SolverKind, SolutionSet)> {
        let g = self.group;
        if matches!(g.abelian(), AbelianGroupSpec::CyclicZN { .. }) && x.len() == 1 {
            return Ok((SolverKind::MetacyclicDlog, self.metacyclic(x, w)?));
        }
        if g.is_heisenberg() && x.len() == 2 {
            return Ok((SolverKind::HeisenbergClosedForm, self.heisenberg(x, w)?));
        }
        if matches!(g.abelian(), AbelianGroupSpec::VectorZpR { .. }) {
            return Ok((SolverKind::Jordan, self.jordan(x, w)?));
        }
        Ok((SolverKind::BruteForce, self.bruteforce(x, w)?))
    }
}

pub fn solve_bruteforce(inst: &MSumInstance, enum_cap: u128) -> Result<SolutionSet> {
    MSumSolver::new(&inst.group, enum_cap).bruteforce(&inst.x, &inst.w)
}

pub fn solve_metacyclic_dlog(inst: &MSumInstance) -> Result<SolutionSet> {
    MSumSolver::new(&inst.group, super::DEFAULT_ENUM_CAP).metacyclic(&inst.x, &inst.w)
}

pub fn solve_heisenberg_closed_form(inst: &MSumInstance) -> Result<SolutionSet> {
    MSumSolver::new(&inst.group, super::DEFAULT_ENUM_CAP).heisenberg(&inst.x, &inst.w)
}

pub fn solve_jordan(inst: &MSumInstance, enum_cap: u128) -> Result<SolutionSet> {
    MSumSolver::new(&inst.group, enum_cap).jordan(&inst.x, &inst.w)
}

pub fn solve_auto(inst: &MSumInstance, enum_cap: u128) -> Result<(SolverKind, SolutionSet)> {
    MSumSolver::new(&inst.group, enum_cap).auto(&inst.x, &inst.w)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn inst(g: &Arc<SemidirectGroup>, x: &[&[u64]], w: &[u64]) -> MSumInstance {
        MSumInstance::new(g.clone(), x.iter().map(|c| Elem(c.to_vec())).collect(), Elem(w.to_vec())).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        let g = Arc::new(SemidirectGroup::metacyclic(7, 3, 2).unwrap());
        let s = solve_bruteforce(&inst(&g, &[&[1]], &[3]), 1000).unwrap();
        assert_eq!(s, SolutionSet { solutions: vec![vec![2]], eta: 1 });
        for x in 0..7 {
            let s = solve_bruteforce(&inst(&g, &[&[x]], &[0]), 1000).unwrap();
            assert!(s.solutions.contains(&vec![0]));
        }
        let h = Arc::new(SemidirectGroup::heisenberg(3).unwrap());
        assert!(matches!(
            solve_bruteforce(&inst(&h, &[&[1, 0], &[1, 0], &[1, 0]], &[0, 0]), 10),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn bruteforce_is_sorted_and_sound() {
        let h = Arc::new(SemidirectGroup::jordan(3, &[2, 1]).unwrap());
        let i = inst(&h, &[&[1, 2, 0], &[0, 1, 1], &[2, 2, 2]], &[1, 1, 0]);
        let s = solve_bruteforce(&i, 1000).unwrap();
        let mut sorted = s.solutions.clone();
        sorted.sort();
        assert_eq!(sorted, s.solutions);
        assert!(s.solutions.iter().all(|b| i.is_solution(b)));
        let total = (0..27u64).filter(|c| i.is_solution(&[c / 9, (c / 3) % 3, c % 3])).count();
        assert_eq!(total, s.eta);
    }

    #[test]
    fn metacyclic_examples() {
        let g = Arc::new(SemidirectGroup::metacyclic(7, 3, 2).unwrap());
        for x in 1..7 {
            assert_eq!(solve_metacyclic_dlog(&inst(&g, &[&[x]], &[0])).unwrap().solutions, vec![vec![0]]);
        }
        let s = solve_metacyclic_dlog(&inst(&g, &[&[3]], &[2])).unwrap();
        assert_eq!(s, solve_bruteforce(&inst(&g, &[&[3]], &[2]), 100).unwrap());
        assert_eq!(s.solutions, vec![vec![2]]);
        let s = solve_metacyclic_dlog(&inst(&g, &[&[1]], &[5])).unwrap();
        assert_eq!(s.eta, 0);
    }

    #[test]
    fn heisenberg_examples() {
        let h = Arc::new(SemidirectGroup::heisenberg(3).unwrap());
        let s = solve_heisenberg_closed_form(&inst(&h, &[&[0, 1], &[0, 1]], &[0, 0])).unwrap();
        assert!(s.solutions.contains(&vec![0, 0]));
        let h5 = Arc::new(SemidirectGroup::heisenberg(5).unwrap());
        let i = inst(&h5, &[&[1, 1], &[1, 1]], &[1, 1]);
        assert_eq!(solve_heisenberg_closed_form(&i).unwrap(), solve_bruteforce(&i, 100).unwrap());
        let g = Arc::new(SemidirectGroup::metacyclic(7, 3, 2).unwrap());
        assert!(solve_heisenberg_closed_form(&inst(&g, &[&[1], &[1]], &[0])).is_err());
    }

    #[test]
    fn jordan_examples() {
        let j = Arc::new(SemidirectGroup::jordan(5, &[3]).unwrap());
        let i = inst(&j, &[&[1, 2, 3], &[4, 0, 1], &[2, 2, 0]], &[0, 0, 0]);
        assert!(solve_jordan(&i, 1000).unwrap().solutions.contains(&vec![0, 0, 0]));
    }

    #[test]
    fn jordan_linear_rows() {
        let j = SemidirectGroup::jordan(5, &[2, 1, 3]).unwrap();
        let s = MSumSolver::new(&j, 100);
        let rows: Vec<usize> = s.linear_rows().into_iter().map(|(i, _)| i).collect();
        assert_eq!(rows, vec![1, 2, 5]);
    }
}
