//! Domain types shared by the auctions, the aggregators and the simulator.
//!
//! An [`Instance`] bundles `M` tasks (one per requester), `N` workers with
//! their interested task sets, and the reliability matrix. Everything is
//! immutable after construction; the `with_*` helpers return modified copies.

pub mod exact;

use crate::error::{Error, Result};

/// Global tolerance for floating-point comparisons of welfare, payments and
/// coverage sums.
pub const EPS_CMP: f64 = 1e-9;

/// A binary label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn value(self) -> i32 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    /// `sign(x)` with `sign(0) = +1`.
    pub fn from_sign(x: f64) -> Label {
        if x >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub id: usize,
    /// Ground truth; only the simulator reads it.
    pub true_label: Label,
    /// Required accuracy `β ∈ (0, 1)`.
    pub accuracy_target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Requester {
    pub id: usize,
    pub task: usize,
    pub value: f64,
    pub bid: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Worker {
    pub id: usize,
    /// Sorted, duplicate-free task ids. One bid covers the whole set.
    pub interested: Vec<usize>,
    pub cost: f64,
    pub bid: f64,
}

impl Worker {
    pub fn is_interested_in(&self, task: usize) -> bool {
        self.interested.binary_search(&task).is_ok()
    }
}

/// `θ ∈ [0,1]^{N×M}` together with the derived coverage weights
/// `q = (2θ-1)²` (zeroed for `θ ≤ 0.5`) and task demands `Q = 2 ln(1/β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityMatrix {
    workers: usize,
    tasks: usize,
    theta: Vec<f64>,
    q: Vec<f64>,
    demand: Vec<f64>,
}

/// Coverage weight of a single (worker, task) pair.
pub fn coverage_weight(theta: f64) -> f64 {
    if theta > 0.5 {
        let d = 2.0 * theta - 1.0;
        d * d
    } else {
        0.0
    }
}

/// Coverage demand `Q = 2 ln(1/β)` of a task with accuracy target `β`.
pub fn coverage_demand(beta: f64) -> f64 {
    2.0 * (1.0 / beta).ln()
}

impl ReliabilityMatrix {
    /// Builds the matrix from per-worker rows of `θ` and per-task `β`.
    pub fn new(theta: Vec<Vec<f64>>, betas: &[f64]) -> Result<Self> {
        let tasks = betas.len();
        let workers = theta.len();
        let mut flat = Vec::with_capacity(workers * tasks);
        for (i, row) in theta.iter().enumerate() {
            if row.len() != tasks {
                return Err(Error::input(format!(
                    "theta row {i} has {} entries, expected {tasks}",
                    row.len()
                )));
            }
            for (j, &t) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::input(format!(
                        "theta[{i}][{j}] = {t} outside [0, 1]"
                    )));
                }
                flat.push(t);
            }
        }
        for (j, &b) in betas.iter().enumerate() {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::input(format!("beta[{j}] = {b} outside (0, 1)")));
            }
        }
        let q = flat.iter().map(|&t| coverage_weight(t)).collect();
        let demand = betas.iter().map(|&b| coverage_demand(b)).collect();
        Ok(ReliabilityMatrix {
            workers,
            tasks,
            theta: flat,
            q,
            demand,
        })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn theta(&self, worker: usize, task: usize) -> f64 {
        self.theta[worker * self.tasks + task]
    }

    pub fn q(&self, worker: usize, task: usize) -> f64 {
        self.q[worker * self.tasks + task]
    }

    /// Aggregation weight `λ = 2θ - 1`.
    pub fn weight(&self, worker: usize, task: usize) -> f64 {
        2.0 * self.theta(worker, task) - 1.0
    }

    /// `Q_j`.
    pub fn demand(&self, task: usize) -> f64 {
        self.demand[task]
    }

    pub fn theta_row(&self, worker: usize) -> &[f64] {
        &self.theta[worker * self.tasks..(worker + 1) * self.tasks]
    }

    fn restrict_workers(&self, keep: &[usize]) -> ReliabilityMatrix {
        let mut theta = Vec::with_capacity(keep.len() * self.tasks);
        let mut q = Vec::with_capacity(keep.len() * self.tasks);
        for &i in keep {
            theta.extend_from_slice(self.theta_row(i));
            q.extend_from_slice(&self.q[i * self.tasks..(i + 1) * self.tasks]);
        }
        ReliabilityMatrix {
            workers: keep.len(),
            tasks: self.tasks,
            theta,
            q,
            demand: self.demand.clone(),
        }
    }
}

/// Full auction input.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    tasks: Vec<Task>,
    requesters: Vec<Requester>,
    workers: Vec<Worker>,
    reliability: ReliabilityMatrix,
}

fn check_money(what: &str, id: usize, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::input(format!(
            "{what} of participant {id} must be finite and non-negative, got {x}"
        )))
    }
}

impl Instance {
    /// Validates and assembles an instance. Requester `j` must own task `j`.
    pub fn new(
        tasks: Vec<Task>,
        requesters: Vec<Requester>,
        mut workers: Vec<Worker>,
        reliability: ReliabilityMatrix,
    ) -> Result<Self> {
        let m = tasks.len();
        if requesters.len() != m {
            return Err(Error::input(format!(
                "{} requesters for {m} tasks",
                requesters.len()
            )));
        }
        if reliability.tasks() != m || reliability.workers() != workers.len() {
            return Err(Error::input(format!(
                "reliability matrix is {}x{}, expected {}x{m}",
                reliability.workers(),
                reliability.tasks(),
                workers.len()
            )));
        }
        for (j, t) in tasks.iter().enumerate() {
            if t.id != j {
                return Err(Error::input(format!("task at position {j} has id {}", t.id)));
            }
            if !(t.accuracy_target > 0.0 && t.accuracy_target < 1.0) {
                return Err(Error::input(format!(
                    "task {j}: accuracy target {} outside (0, 1)",
                    t.accuracy_target
                )));
            }
        }
        for (j, r) in requesters.iter().enumerate() {
            if r.id != j || r.task != j {
                return Err(Error::input(format!(
                    "requester at position {j} has id {} and task {}",
                    r.id, r.task
                )));
            }
            check_money("value", j, r.value)?;
            check_money("bid", j, r.bid)?;
        }
        for (i, w) in workers.iter_mut().enumerate() {
            if w.id != i {
                return Err(Error::input(format!("worker at position {i} has id {}", w.id)));
            }
            check_money("cost", i, w.cost)?;
            check_money("bid", i, w.bid)?;
            if w.interested.is_empty() {
                return Err(Error::input(format!("worker {i} has an empty interested set")));
            }
            w.interested.sort_unstable();
            let before = w.interested.len();
            w.interested.dedup();
            if w.interested.len() != before {
                return Err(Error::input(format!("worker {i} lists a task twice")));
            }
            if let Some(&t) = w.interested.last() {
                if t >= m {
                    return Err(Error::input(format!(
                        "worker {i} references task {t}, only {m} tasks exist"
                    )));
                }
            }
        }
        Ok(Instance {
            tasks,
            requesters,
            workers,
            reliability,
        })
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn requesters(&self) -> &[Requester] {
        &self.requesters
    }

    pub fn workers(&self) -> &[Worker] {
        &self.workers
    }

    pub fn reliability(&self) -> &ReliabilityMatrix {
        &self.reliability
    }

    pub fn n_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    /// Copy with requester `j` bidding `bid`.
    pub fn with_requester_bid(&self, j: usize, bid: f64) -> Instance {
        let mut out = self.clone();
        out.requesters[j].bid = bid;
        out
    }

    /// Copy with worker `i` bidding `bid`.
    pub fn with_worker_bid(&self, i: usize, bid: f64) -> Instance {
        let mut out = self.clone();
        out.workers[i].bid = bid;
        out
    }

    /// Copy with every bid set to the private value or cost.
    pub fn with_truthful_bids(&self) -> Instance {
        let mut out = self.clone();
        for r in &mut out.requesters {
            r.bid = r.value;
        }
        for w in &mut out.workers {
            w.bid = w.cost;
        }
        out
    }

    /// Sub-instance containing only the listed workers, renumbered densely in
    /// the given order.
    pub fn restrict_workers(&self, keep: &[usize]) -> Result<Instance> {
        for &i in keep {
            if i >= self.workers.len() {
                return Err(Error::input(format!("no worker {i}")));
            }
        }
        let workers = keep
            .iter()
            .enumerate()
            .map(|(new_id, &i)| Worker {
                id: new_id,
                ..self.workers[i].clone()
            })
            .collect();
        Ok(Instance {
            tasks: self.tasks.clone(),
            requesters: self.requesters.clone(),
            workers,
            reliability: self.reliability.restrict_workers(keep),
        })
    }

    /// `Σ_{i ∈ members, τ_j ∈ Γ_i} q_{i,j}` for task `j`.
    pub fn coverage<I: IntoIterator<Item = usize>>(&self, task: usize, members: I) -> f64 {
        members
            .into_iter()
            .filter(|&i| self.workers[i].is_interested_in(task))
            .map(|i| self.reliability.q(i, task))
            .sum()
    }

    /// Whether `coverage ≥ Q_j` within [`EPS_CMP`].
    pub fn meets_demand(&self, task: usize, coverage: f64) -> bool {
        coverage >= self.reliability.demand(task) - EPS_CMP
    }

    /// Tasks whose coverage constraint holds when the workers flagged in `x`
    /// are selected. With non-negative bids this is the welfare-optimal `y`
    /// for a fixed `x`.
    pub fn covered_tasks(&self, x: &[bool]) -> Vec<bool> {
        let mut cov = vec![0.0; self.n_tasks()];
        for (i, w) in self.workers.iter().enumerate() {
            if x[i] {
                for &j in &w.interested {
                    cov[j] += self.reliability.q(i, j);
                }
            }
        }
        cov.iter()
            .enumerate()
            .map(|(j, &c)| self.meets_demand(j, c))
            .collect()
    }
}

/// Winners and payments produced by a mechanism.
#[derive(Clone, Debug, PartialEq)]
pub struct AuctionOutcome {
    /// Sorted ascending.
    pub winning_requesters: Vec<usize>,
    /// Sorted ascending.
    pub winning_workers: Vec<usize>,
    pub requester_payments: Vec<f64>,
    pub worker_payments: Vec<f64>,
    /// `x_i = 1` iff worker `i` wins.
    pub x: Vec<bool>,
    /// `y_j = 1` iff requester `j` wins (task `j` is executed).
    pub y: Vec<bool>,
}

impl AuctionOutcome {
    pub fn empty(workers: usize, tasks: usize) -> Self {
        AuctionOutcome {
            winning_requesters: Vec::new(),
            winning_workers: Vec::new(),
            requester_payments: vec![0.0; tasks],
            worker_payments: vec![0.0; workers],
            x: vec![false; workers],
            y: vec![false; tasks],
        }
    }

    /// Builds an outcome with zero payments from winner lists.
    pub fn from_winners(
        workers: usize,
        tasks: usize,
        mut winning_requesters: Vec<usize>,
        mut winning_workers: Vec<usize>,
    ) -> Self {
        winning_requesters.sort_unstable();
        winning_requesters.dedup();
        winning_workers.sort_unstable();
        winning_workers.dedup();
        let mut out = AuctionOutcome::empty(workers, tasks);
        for &j in &winning_requesters {
            out.y[j] = true;
        }
        for &i in &winning_workers {
            out.x[i] = true;
        }
        out.winning_requesters = winning_requesters;
        out.winning_workers = winning_workers;
        out
    }

    /// Checks set/vector consistency and that losers pay and receive nothing.
    pub fn check_consistency(&self) -> Result<()> {
        let m = self.y.len();
        let n = self.x.len();
        if self.requester_payments.len() != m || self.worker_payments.len() != n {
            return Err(Error::Invariant("payment vector lengths disagree".into()));
        }
        let ys: Vec<usize> = (0..m).filter(|&j| self.y[j]).collect();
        let xs: Vec<usize> = (0..n).filter(|&i| self.x[i]).collect();
        if ys != self.winning_requesters || xs != self.winning_workers {
            return Err(Error::Invariant("decision vectors disagree with winner sets".into()));
        }
        for j in 0..m {
            if !self.y[j] && self.requester_payments[j] != 0.0 {
                return Err(Error::Invariant(format!("losing requester {j} is charged")));
            }
        }
        for i in 0..n {
            if !self.x[i] && self.worker_payments[i] != 0.0 {
                return Err(Error::Invariant(format!("losing worker {i} is paid")));
            }
        }
        Ok(())
    }
}

/// Which numbers welfare is computed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// Private values and costs.
    True,
    /// Submitted bids (the quantity the mechanism optimizes).
    Bids,
}

/// `v_j - p^r_j` for a winner, `0` otherwise.
pub fn requester_utility(outcome: &AuctionOutcome, requester: &Requester) -> Result<f64> {
    let j = requester.id;
    if j >= outcome.y.len() {
        return Err(Error::input(format!("unknown requester {j}")));
    }
    Ok(if outcome.y[j] {
        requester.value - outcome.requester_payments[j]
    } else {
        0.0
    })
}

/// `p^w_i - c_i` for a winner, `0` otherwise.
pub fn worker_utility(outcome: &AuctionOutcome, worker: &Worker) -> Result<f64> {
    let i = worker.id;
    if i >= outcome.x.len() {
        return Err(Error::input(format!("unknown worker {i}")));
    }
    Ok(if outcome.x[i] {
        outcome.worker_payments[i] - worker.cost
    } else {
        0.0
    })
}

/// Charged minus paid. May be negative.
pub fn platform_profit(outcome: &AuctionOutcome) -> f64 {
    let charged: f64 = outcome
        .winning_requesters
        .iter()
        .map(|&j| outcome.requester_payments[j])
        .sum();
    let paid: f64 = outcome
        .winning_workers
        .iter()
        .map(|&i| outcome.worker_payments[i])
        .sum();
    charged - paid
}

pub fn social_welfare(outcome: &AuctionOutcome, instance: &Instance, valuation: Valuation) -> f64 {
    let gain: f64 = outcome
        .winning_requesters
        .iter()
        .map(|&j| {
            let r = &instance.requesters[j];
            match valuation {
                Valuation::True => r.value,
                Valuation::Bids => r.bid,
            }
        })
        .sum();
    let cost: f64 = outcome
        .winning_workers
        .iter()
        .map(|&i| {
            let w = &instance.workers[i];
            match valuation {
                Valuation::True => w.cost,
                Valuation::Bids => w.bid,
            }
        })
        .sum();
    gain - cost
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// One task, requester value `value`, one worker with `q = 1` (`θ = 1`)
    /// and the given cost. Bids are truthful.
    pub fn single(value: f64, cost: f64) -> Instance {
        build(&[value], &[(cost, vec![0])], &[vec![1.0]], &[0.9])
    }

    /// Truthful instance from values, (cost, interested) pairs, θ rows and β.
    pub fn build(
        values: &[f64],
        workers: &[(f64, Vec<usize>)],
        theta: &[Vec<f64>],
        betas: &[f64],
    ) -> Instance {
        let tasks = betas
            .iter()
            .enumerate()
            .map(|(j, &b)| Task {
                id: j,
                true_label: Label::Positive,
                accuracy_target: b,
            })
            .collect();
        let requesters = values
            .iter()
            .enumerate()
            .map(|(j, &v)| Requester {
                id: j,
                task: j,
                value: v,
                bid: v,
            })
            .collect();
        let ws = workers
            .iter()
            .enumerate()
            .map(|(i, (c, g))| Worker {
                id: i,
                interested: g.clone(),
                cost: *c,
                bid: *c,
            })
            .collect();
        let rel = ReliabilityMatrix::new(theta.to_vec(), betas).unwrap();
        Instance::new(tasks, requesters, ws, rel).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn outcome_with(req_pay: Vec<f64>, work_pay: Vec<f64>, rs: Vec<usize>, ws: Vec<usize>) -> AuctionOutcome {
        let mut o = AuctionOutcome::from_winners(work_pay.len(), req_pay.len(), rs, ws);
        o.requester_payments = req_pay;
        o.worker_payments = work_pay;
        o
    }

    #[test]
    fn requester_utility_cases() {
        let r = |v: f64| Requester { id: 0, task: 0, value: v, bid: v };
        let win = outcome_with(vec![12.0], vec![0.0], vec![0], vec![]);
        assert_eq!(requester_utility(&win, &r(15.0)).unwrap(), 3.0);
        let lose = AuctionOutcome::empty(1, 1);
        assert_eq!(requester_utility(&lose, &r(99.0)).unwrap(), 0.0);
        let edge = outcome_with(vec![10.0], vec![0.0], vec![0], vec![]);
        assert_eq!(requester_utility(&edge, &r(10.0)).unwrap(), 0.0);
        let stranger = Requester { id: 5, task: 5, value: 1.0, bid: 1.0 };
        assert!(matches!(requester_utility(&edge, &stranger), Err(Error::Input(_))));
    }

    #[test]
    fn worker_utility_cases() {
        let w = |c: f64| Worker { id: 0, interested: vec![0], cost: c, bid: c };
        let win = outcome_with(vec![0.0], vec![8.0], vec![], vec![0]);
        assert_eq!(worker_utility(&win, &w(5.0)).unwrap(), 3.0);
        assert_eq!(worker_utility(&AuctionOutcome::empty(1, 1), &w(5.0)).unwrap(), 0.0);
        let edge = outcome_with(vec![0.0], vec![7.0], vec![], vec![0]);
        assert_eq!(worker_utility(&edge, &w(7.0)).unwrap(), 0.0);
    }

    #[test]
    fn profit_cases() {
        assert_eq!(platform_profit(&AuctionOutcome::empty(3, 2)), 0.0);
        let o = outcome_with(vec![12.0], vec![8.0], vec![0], vec![0]);
        assert_eq!(platform_profit(&o), 4.0);
        let o = outcome_with(vec![5.0, 5.0], vec![3.0, 4.0, 4.0], vec![0, 1], vec![0, 1, 2]);
        assert_eq!(platform_profit(&o), -1.0);
    }

    #[test]
    fn welfare_cases() {
        let inst = single(20.0, 5.0);
        let none = AuctionOutcome::empty(1, 1);
        assert_eq!(social_welfare(&none, &inst, Valuation::True), 0.0);
        let all = AuctionOutcome::from_winners(1, 1, vec![0], vec![0]);
        assert_eq!(social_welfare(&all, &inst, Valuation::True), 15.0);
        assert_eq!(social_welfare(&all, &inst, Valuation::Bids), 15.0);
        let shaded = inst.with_requester_bid(0, 18.0);
        assert_eq!(social_welfare(&all, &shaded, Valuation::Bids), 13.0);
        assert_eq!(social_welfare(&all, &shaded, Valuation::True), 15.0);
    }

    #[test]
    fn q_and_demand() {
        let rel = ReliabilityMatrix::new(vec![vec![1.0, 0.5, 0.2, 0.75]], &[0.05, 0.1, 0.5, 0.3]).unwrap();
        assert_eq!(rel.q(0, 0), 1.0);
        assert_eq!(rel.q(0, 1), 0.0);
        assert_eq!(rel.q(0, 2), 0.0);
        assert!((rel.q(0, 3) - 0.25).abs() < 1e-15);
        assert!((rel.demand(0) - 2.0 * 20f64.ln()).abs() < 1e-12);
        assert!((rel.demand(0) - 5.991464547107979).abs() < 1e-12);
        let again = ReliabilityMatrix::new(vec![rel.theta_row(0).to_vec()], &[0.05, 0.1, 0.5, 0.3]).unwrap();
        assert_eq!(rel, again);
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(ReliabilityMatrix::new(vec![vec![1.5]], &[0.1]).is_err());
        assert!(ReliabilityMatrix::new(vec![vec![0.5]], &[1.0]).is_err());
        assert!(ReliabilityMatrix::new(vec![vec![0.5]], &[0.0]).is_err());
        let rel = ReliabilityMatrix::new(vec![vec![0.9]], &[0.1]).unwrap();
        let task = Task { id: 0, true_label: Label::Positive, accuracy_target: 0.1 };
        let req = Requester { id: 0, task: 0, value: 1.0, bid: -1.0 };
        let w = Worker { id: 0, interested: vec![0], cost: 1.0, bid: 1.0 };
        assert!(Instance::new(vec![task.clone()], vec![req], vec![w.clone()], rel.clone()).is_err());
        let req = Requester { id: 0, task: 0, value: 1.0, bid: 1.0 };
        let dangling = Worker { interested: vec![3], ..w.clone() };
        assert!(Instance::new(vec![task.clone()], vec![req.clone()], vec![dangling], rel.clone()).is_err());
        let empty = Worker { interested: vec![], ..w };
        assert!(Instance::new(vec![task], vec![req], vec![empty], rel).is_err());
    }

    #[test]
    fn sign_rule() {
        assert_eq!(Label::from_sign(0.0), Label::Positive);
        assert_eq!(Label::from_sign(-0.0), Label::Positive);
        assert_eq!(Label::from_sign(-1e-300), Label::Negative);
    }

    #[test]
    fn restrict_workers_renumbers() {
        let inst = build(
            &[10.0, 10.0],
            &[(1.0, vec![0]), (2.0, vec![1]), (3.0, vec![0, 1])],
            &[vec![1.0, 0.5], vec![0.5, 0.9], vec![0.8, 0.7]],
            &[0.3, 0.3],
        );
        let sub = inst.restrict_workers(&[2, 0]).unwrap();
        assert_eq!(sub.n_workers(), 2);
        assert_eq!(sub.workers()[0].cost, 3.0);
        assert_eq!(sub.workers()[0].id, 0);
        assert_eq!(sub.reliability().theta(0, 0), 0.8);
        assert_eq!(sub.reliability().theta(1, 0), 1.0);
    }
}
