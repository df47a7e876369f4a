//! Reduction from 3SAT(5) to coverage-constrained welfare maximization.
//!
//! For a formula with `n` variables and `m = 5n/3` clauses, every clause
//! `C_k` and each of its 7 satisfying local assignments `α` yields one worker
//! with interested set `Γ(C_k, α)`, unit coverage weight and bid `3 + Y + Z`.
//! A dummy worker with bid 0 covers the single task `τ*`. Tasks:
//!
//! | role | count | demand `Q` | value | member of |
//! |------|-------|-----------|-------|-----------|
//! | `τ(z_l, γ)` | `2n` | 5 | 5 | sets whose `α` gives `z_l = γ` |
//! | `τ_k` | `m` | 2 | `Y` | sets of `C_k` and `C_{k+1 mod m}` |
//! | `τ(C_k)` | `m` | 1 | `Z` | sets of `C_k` |
//! | `τ*` | 1 | 1 | `X` | the dummy only |
//!
//! with `X = εm/100`, `Y = mnX`, `Z = mnY`. A satisfying assignment gives a
//! solution of welfare exactly `X`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::exact;
use crate::model::{Instance, Label, ReliabilityMatrix, Requester, Task, Worker};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn holds(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var as i64 + 1;
        write!(f, "{}", if self.negated { -v } else { v })
    }
}

/// A 3-CNF formula in which every variable occurs in exactly 5 clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sat35Formula {
    n: usize,
    clauses: Vec<[Literal; 3]>,
}

impl Sat35Formula {
    pub fn new(n: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(3) {
            return Err(Error::input(format!("variable count {n} is not a positive multiple of 3")));
        }
        if clauses.len() != 5 * n / 3 {
            return Err(Error::input(format!(
                "{} clauses, expected 5n/3 = {}",
                clauses.len(),
                5 * n / 3
            )));
        }
        let mut occurrences = vec![0usize; n];
        for (k, c) in clauses.iter().enumerate() {
            for (a, lit) in c.iter().enumerate() {
                if lit.var >= n {
                    return Err(Error::input(format!("clause {k} names variable {} > {n}", lit.var + 1)));
                }
                if c[..a].iter().any(|o| o.var == lit.var) {
                    return Err(Error::input(format!("clause {k} repeats variable {}", lit.var + 1)));
                }
                occurrences[lit.var] += 1;
            }
        }
        if let Some(v) = occurrences.iter().position(|&c| c != 5) {
            return Err(Error::input(format!(
                "variable {} occurs in {} clauses, expected 5",
                v + 1,
                occurrences[v]
            )));
        }
        Ok(Sat35Formula { n, clauses })
    }

    pub fn variables(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.n
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|l| l.holds(assignment[l.var])))
    }

    /// Exhaustive search, smallest assignment (bit `l` = variable `l`) first.
    pub fn find_satisfying(&self) -> Result<Option<Vec<bool>>> {
        if self.n > 24 {
            return Err(Error::TooLarge {
                workers: self.n,
                limit: 24,
            });
        }
        Ok((0u32..1 << self.n)
            .map(|bits| (0..self.n).map(|l| bits >> l & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.satisfies(a)))
    }

    /// DIMACS CNF: `c` comments, a `p cnf n m` header, zero-terminated
    /// clauses.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                    return Err(Error::parse(line_no, "expected a single `p cnf <vars> <clauses>` header"));
                }
                let n = parts[2].parse().map_err(|_| Error::parse(line_no, "bad variable count"))?;
                let m = parts[3].parse().map_err(|_| Error::parse(line_no, "bad clause count"))?;
                header = Some((n, m));
                continue;
            }
            let Some((n, _)) = header else {
                return Err(Error::parse(line_no, "clause before `p cnf` header"));
            };
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad literal `{tok}`")))?;
                if v == 0 {
                    let lits: [Literal; 3] = current
                        .as_slice()
                        .try_into()
                        .map_err(|_| Error::parse(line_no, format!("clause has {} literals, expected 3", current.len())))?;
                    clauses.push(lits);
                    current.clear();
                } else {
                    let var = v.unsigned_abs() as usize;
                    if var > n {
                        return Err(Error::parse(line_no, format!("variable {var} exceeds header count {n}")));
                    }
                    current.push(Literal {
                        var: var - 1,
                        negated: v < 0,
                    });
                }
            }
        }
        let Some((n, m)) = header else {
            return Err(Error::parse(0, "missing `p cnf` header"));
        };
        if !current.is_empty() {
            return Err(Error::parse(text.lines().count(), "last clause is not terminated by 0"));
        }
        if clauses.len() != m {
            return Err(Error::input(format!("header declares {m} clauses, found {}", clauses.len())));
        }
        Sat35Formula::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }

    /// Random formula: five copies of each variable shuffled into triples,
    /// resampled until no triple repeats a variable; signs are fair coins.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(3) {
            return Err(Error::input(format!("variable count {n} is not a positive multiple of 3")));
        }
        let mut slots: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, 5)).collect();
        loop {
            slots.shuffle(rng);
            if slots
                .chunks(3)
                .all(|c| c[0] != c[1] && c[0] != c[2] && c[1] != c[2])
            {
                break;
            }
        }
        let clauses = slots
            .chunks(3)
            .map(|c| {
                [0, 1, 2].map(|a| Literal {
                    var: c[a],
                    negated: rng.random_bool(0.5),
                })
            })
            .collect();
        Sat35Formula::new(n, clauses)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkerRole {
    Dummy,
    /// Values of the clause's three variables, in literal order.
    Clause { clause: usize, assignment: [bool; 3] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskRole {
    Variable { var: usize, value: bool },
    Link(usize),
    Clause(usize),
    Star,
}

/// The reduced instance plus its exact parameters and role maps.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub formula: Sat35Formula,
    pub epsilon: BigRational,
    pub x: BigRational,
    pub y: BigRational,
    pub z: BigRational,
    pub instance: Instance,
    pub worker_roles: Vec<WorkerRole>,
    pub task_roles: Vec<TaskRole>,
    /// Integer coverage demands.
    pub demands: Vec<u32>,
    /// Exact requester values (= bids).
    pub values: Vec<BigRational>,
    /// Exact worker bids.
    pub bids: Vec<BigRational>,
}

/// Local assignments of a clause's variables that satisfy it, in bit order.
pub fn satisfying_local_assignments(clause: &[Literal; 3]) -> Vec<[bool; 3]> {
    (0u8..8)
        .map(|bits| [0, 1, 2].map(|a| bits >> a & 1 == 1))
        .filter(|vals| (0..3).any(|a| clause[a].holds(vals[a])))
        .collect()
}

pub fn var_task(var: usize, value: bool) -> usize {
    2 * var + usize::from(!value)
}

impl ReductionInstance {
    pub fn n_clauses(&self) -> usize {
        self.formula.clauses.len()
    }

    pub fn link_task(&self, k: usize) -> usize {
        2 * self.formula.n + k
    }

    pub fn clause_task(&self, k: usize) -> usize {
        2 * self.formula.n + self.n_clauses() + k
    }

    pub fn star_task(&self) -> usize {
        2 * self.formula.n + 2 * self.n_clauses()
    }

    pub fn clause_worker(&self, k: usize, idx: usize) -> usize {
        1 + 7 * k + idx
    }

    /// Exact welfare `Σ_{covered} v - Σ_{selected} b`.
    pub fn welfare(&self, x: &[bool]) -> BigRational {
        let y = self.instance.covered_tasks(x);
        exact::welfare(&self.values, &self.bids, x, &y)
    }

    /// The dummy plus, for each clause, the set consistent with `assignment`.
    pub fn yes_solution(&self, assignment: &[bool]) -> Result<Vec<bool>> {
        if !self.formula.satisfies(assignment) {
            return Err(Error::domain("assignment does not satisfy every clause"));
        }
        let mut x = vec![false; self.instance.n_workers()];
        x[0] = true;
        for (k, c) in self.formula.clauses.iter().enumerate() {
            let local = c.map(|l| assignment[l.var]);
            let idx = satisfying_local_assignments(c)
                .iter()
                .position(|a| *a == local)
                .expect("a satisfied clause has its local assignment listed");
            x[self.clause_worker(k, idx)] = true;
        }
        Ok(x)
    }
}

/// Builds the reduced instance for `formula` with gap parameter `ε ∈ (0, 1]`.
pub fn reduce(formula: &Sat35Formula, epsilon: &BigRational) -> Result<ReductionInstance> {
    if !epsilon.is_positive() || *epsilon > BigRational::one() {
        return Err(Error::input(format!("epsilon {epsilon} outside (0, 1]")));
    }
    let n = formula.n;
    let m = formula.clauses.len();
    let mn = BigRational::from_integer(BigInt::from(m * n));
    let x = epsilon * BigRational::new(BigInt::from(m), BigInt::from(100));
    let y = &mn * &x;
    let z = &mn * &y;

    let n_tasks = 2 * n + 2 * m + 1;
    let mut task_roles = Vec::with_capacity(n_tasks);
    let mut demands = Vec::with_capacity(n_tasks);
    let mut values = Vec::with_capacity(n_tasks);
    for var in 0..n {
        for value in [true, false] {
            task_roles.push(TaskRole::Variable { var, value });
            demands.push(5);
            values.push(BigRational::from_integer(5.into()));
        }
    }
    for k in 0..m {
        task_roles.push(TaskRole::Link(k));
        demands.push(2);
        values.push(y.clone());
    }
    for k in 0..m {
        task_roles.push(TaskRole::Clause(k));
        demands.push(1);
        values.push(z.clone());
    }
    task_roles.push(TaskRole::Star);
    demands.push(1);
    values.push(x.clone());

    let star = n_tasks - 1;
    let mut worker_roles = vec![WorkerRole::Dummy];
    let mut sets = vec![vec![star]];
    for (k, c) in formula.clauses.iter().enumerate() {
        let sat = satisfying_local_assignments(c);
        debug_assert_eq!(sat.len(), 7);
        for a in sat {
            let mut g: Vec<usize> = (0..3).map(|t| var_task(c[t].var, a[t])).collect();
            g.push(2 * n + k);
            g.push(2 * n + (k + m - 1) % m);
            g.push(2 * n + m + k);
            g.sort_unstable();
            g.dedup();
            worker_roles.push(WorkerRole::Clause { clause: k, assignment: a });
            sets.push(g);
        }
    }
    let set_bid = BigRational::from_integer(3.into()) + &y + &z;
    let bids: Vec<BigRational> = std::iter::once(BigRational::zero())
        .chain(std::iter::repeat_n(set_bid, 7 * m))
        .collect();

    let theta: Vec<Vec<f64>> = sets
        .iter()
        .map(|g| {
            let mut row = vec![0.5; n_tasks];
            for &j in g {
                row[j] = 1.0;
            }
            row
        })
        .collect();
    let betas: Vec<f64> = demands.iter().map(|&q| (-(q as f64) / 2.0).exp()).collect();
    let tasks = (0..n_tasks)
        .map(|j| Task {
            id: j,
            true_label: Label::Positive,
            accuracy_target: betas[j],
        })
        .collect();
    let requesters = (0..n_tasks)
        .map(|j| {
            let v = exact::to_f64(&values[j]);
            Requester { id: j, task: j, value: v, bid: v }
        })
        .collect();
    let workers = sets
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let b = exact::to_f64(&bids[i]);
            Worker { id: i, interested: g, cost: b, bid: b }
        })
        .collect();
    let rel = ReliabilityMatrix::new(theta, &betas)?;
    let instance = Instance::new(tasks, requesters, workers, rel)?;
    Ok(ReductionInstance {
        formula: formula.clone(),
        epsilon: epsilon.clone(),
        x,
        y,
        z,
        instance,
        worker_roles,
        task_roles,
        demands,
        values,
        bids,
    })
}

/// Checks that the assignment-consistent solution has welfare exactly `X`.
pub fn verify_yes_instance(reduction: &ReductionInstance, assignment: &[bool]) -> Result<bool> {
    let x = reduction.yes_solution(assignment)?;
    Ok(reduction.welfare(&x) == reduction.x)
}

/// Predicates on a candidate solution of the reduced instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationReport {
    pub welfare: BigRational,
    pub dummy_selected: bool,
    /// Clauses with more than one selected set.
    pub repeated_clauses: Vec<usize>,
    pub selected_sets: usize,
    /// Variables with both `τ(z, T)` and `τ(z, F)` covered.
    pub doubly_covered: Vec<usize>,
    /// Variables with neither task covered.
    pub bad_variables: Vec<usize>,
}

impl ObservationReport {
    /// At most one set per clause and exactly `m` sets.
    pub fn one_set_per_clause(&self, m: usize) -> bool {
        self.repeated_clauses.is_empty() && self.selected_sets == m
    }

    pub fn at_most_one_value_covered(&self) -> bool {
        self.doubly_covered.is_empty()
    }

    /// `#bad ≤ εn/100`.
    pub fn few_bad_variables(&self, reduction: &ReductionInstance) -> bool {
        let bound = &reduction.epsilon * BigRational::new(BigInt::from(reduction.formula.n), BigInt::from(100));
        BigRational::from_integer(BigInt::from(self.bad_variables.len())) <= bound
    }

    /// Failed predicates; none for a selection without clause sets.
    pub fn violations(&self, reduction: &ReductionInstance) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.selected_sets == 0 {
            return v;
        }
        if !self.one_set_per_clause(reduction.n_clauses()) {
            v.push("not exactly one set per clause");
        }
        if !self.at_most_one_value_covered() {
            v.push("a variable has both value tasks covered");
        }
        if !self.few_bad_variables(reduction) {
            v.push("too many variables with no value task covered");
        }
        v
    }
}

/// Evaluates the structural predicates on the worker selection `x`. They
/// are guaranteed only for solutions with positive welfare.
pub fn check_observations(reduction: &ReductionInstance, x: &[bool]) -> Result<ObservationReport> {
    if x.len() != reduction.instance.n_workers() {
        return Err(Error::input(format!(
            "selection has {} entries, expected {}",
            x.len(),
            reduction.instance.n_workers()
        )));
    }
    let m = reduction.n_clauses();
    let mut per_clause = vec![0usize; m];
    for (i, role) in reduction.worker_roles.iter().enumerate() {
        if let (true, WorkerRole::Clause { clause, .. }) = (x[i], role) {
            per_clause[*clause] += 1;
        }
    }
    let y = reduction.instance.covered_tasks(x);
    let n = reduction.formula.n;
    let doubly_covered = (0..n)
        .filter(|&v| y[var_task(v, true)] && y[var_task(v, false)])
        .collect();
    let bad_variables = (0..n)
        .filter(|&v| !y[var_task(v, true)] && !y[var_task(v, false)])
        .collect();
    Ok(ObservationReport {
        welfare: exact::welfare(&reduction.values, &reduction.bids, x, &y),
        dummy_selected: x[0],
        repeated_clauses: (0..m).filter(|&k| per_clause[k] > 1).collect(),
        selected_sets: per_clause.iter().sum(),
        doubly_covered,
        bad_variables,
    })
}

/// Exact optimum over selections with at most one set per clause.
///
/// Restricting to such selections loses nothing: each set holds exactly three
/// variable tasks, each needing five sets, so variable tasks return at most 3
/// per selected set. A selection of `s` sets touching `t < s` clauses then
/// earns at most `X + tZ + mY - s(Y + Z) ≤ X + (m - 1 - t)Y - Z < X`, while
/// some one-per-clause selection reaches at least 0.
pub fn pruned_optimum(reduction: &ReductionInstance) -> Result<(BigRational, Vec<bool>)> {
    let m = reduction.n_clauses();
    if m > 7 {
        return Err(Error::TooLarge {
            workers: reduction.instance.n_workers(),
            limit: 7 * 7 + 1,
        });
    }
    let n_workers = reduction.instance.n_workers();
    let combos = 8usize.pow(m as u32);
    let mut best: Option<(BigRational, Vec<bool>)> = None;
    for dummy in [false, true] {
        for code in 0..combos {
            let mut x = vec![false; n_workers];
            x[0] = dummy;
            let mut c = code;
            for k in 0..m {
                let choice = c % 8;
                c /= 8;
                if choice > 0 {
                    x[reduction.clause_worker(k, choice - 1)] = true;
                }
            }
            let w = reduction.welfare(&x);
            if best.as_ref().is_none_or(|(b, _)| w > *b) {
                best = Some((w, x));
            }
        }
    }
    Ok(best.expect("at least the empty selection"))
}

/// Parses `a/b`, an integer, or a plain decimal such as `0.25` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::input(format!("cannot parse `{s}` as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, den));
    }
    let v: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lit(v: i64) -> Literal {
        Literal {
            var: v.unsigned_abs() as usize - 1,
            negated: v < 0,
        }
    }

    /// Satisfied by all-true.
    pub(crate) fn sample() -> Sat35Formula {
        let raw = [[1, 2, 3], [1, -2, 3], [1, 2, -3], [-1, 2, 3], [1, 2, 3]];
        Sat35Formula::new(3, raw.iter().map(|c| c.map(lit)).collect()).unwrap()
    }

    #[test]
    fn rejects_malformed_formulas() {
        assert!(Sat35Formula::new(2, vec![]).is_err());
        let repeated = [[1, 1, 2], [1, 2, 3], [1, 2, 3], [1, 2, 3], [3, 3, 2]];
        assert!(Sat35Formula::new(3, repeated.iter().map(|c| c.map(lit)).collect()).is_err());
        let short = [[1, 2, 3], [1, 2, 3], [1, 2, 3], [1, 2, 3]];
        assert!(Sat35Formula::new(3, short.iter().map(|c| c.map(lit)).collect()).is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let f = sample();
        let text = format!("c sample\n{}", f.to_dimacs());
        assert_eq!(Sat35Formula::parse_dimacs(&text).unwrap(), f);
        let err = Sat35Formula::parse_dimacs("p cnf 3 5\n1 2 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn random_formulas_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3, 6, 9] {
            let f = Sat35Formula::random(n, &mut rng).unwrap();
            assert_eq!(f.clauses().len(), 5 * n / 3);
        }
    }

    #[test]
    fn seven_local_assignments_per_clause() {
        for c in sample().clauses() {
            assert_eq!(satisfying_local_assignments(c).len(), 7);
        }
    }

    #[test]
    fn closed_form_sizes_and_parameters() {
        let red = reduce(&sample(), &BigRational::one()).unwrap();
        assert_eq!(red.x, BigRational::new(1.into(), 20.into()));
        assert_eq!(red.y, BigRational::new(3.into(), 4.into()));
        assert_eq!(red.z, BigRational::new(45.into(), 4.into()));
        assert_eq!(red.instance.n_workers(), 36);
        assert_eq!(red.instance.n_tasks(), 17);
        assert_eq!(red.instance.workers()[0].interested, vec![red.star_task()]);
        for k in 0..5 {
            let holders = red
                .instance
                .workers()
                .iter()
                .filter(|w| w.is_interested_in(red.link_task(k)))
                .count();
            assert_eq!(holders, 14);
        }
        for j in 0..red.instance.n_tasks() {
            let q = red.instance.reliability().demand(j);
            assert!((q - red.demands[j] as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn yes_instance_reaches_x() {
        let red = reduce(&sample(), &BigRational::one()).unwrap();
        assert!(verify_yes_instance(&red, &[true, true, true]).unwrap());
        assert!(matches!(
            verify_yes_instance(&red, &[false, false, false]),
            Err(Error::Domain(_))
        ));
        let x = red.yes_solution(&[true; 3]).unwrap();
        let report = check_observations(&red, &x).unwrap();
        assert!(report.violations(&red).is_empty());
        assert!(report.bad_variables.is_empty());
    }

    #[test]
    fn pruned_optimum_is_x() {
        let red = reduce(&sample(), &BigRational::new(1.into(), 2.into())).unwrap();
        let (w, x) = pruned_optimum(&red).unwrap();
        assert_eq!(w, red.x);
        let report = check_observations(&red, &x).unwrap();
        assert!(report.violations(&red).is_empty());
    }

    #[test]
    fn doubling_a_variable_is_flagged() {
        let red = reduce(&sample(), &BigRational::one()).unwrap();
        let mut x = red.yes_solution(&[true; 3]).unwrap();
        // Add, for every clause, a set giving z_1 = F.
        for (k, c) in red.formula.clauses().iter().enumerate() {
            let pos = c.iter().position(|l| l.var == 0).unwrap();
            let idx = satisfying_local_assignments(c)
                .iter()
                .position(|a| !a[pos])
                .unwrap();
            x[red.clause_worker(k, idx)] = true;
        }
        let report = check_observations(&red, &x).unwrap();
        assert!(report.doubly_covered.contains(&0));
        assert!(!report.repeated_clauses.is_empty());
        assert!(report.welfare < BigRational::zero());
    }

    #[test]
    fn empty_selection_is_reported() {
        let red = reduce(&sample(), &BigRational::one()).unwrap();
        let report = check_observations(&red, &[false; 36]).unwrap();
        assert_eq!(report.welfare, BigRational::zero());
        assert!(report.doubly_covered.is_empty());
        assert_eq!(report.bad_variables.len(), 3);
        assert!(report.violations(&red).is_empty());
    }

    #[test]
    fn rationals_parse_exactly() {
        assert_eq!(parse_rational("1/2").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("0.05").unwrap(), BigRational::new(1.into(), 20.into()));
        assert_eq!(parse_rational("1").unwrap(), BigRational::one());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
