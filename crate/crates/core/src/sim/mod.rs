//! Random instances, simulated labels and the experiment driver.

mod experiment;

pub use experiment::{
    estimate_error_rates, run_experiment, summarize, AccuracyMetrics, MechanismMetrics, MetricRecord, SummaryRow,
    TaskErrorRate,
};

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::aggregation::LabelMatrix;
use crate::auction::Mechanism;
use crate::error::{Error, Result};
use crate::model::{Instance, Label, ReliabilityMatrix, Requester, Task, Worker};

/// Generator used for every simulation draw.
pub type SimRng = ChaCha8Rng;

/// Identifier written into CSV metadata.
pub const RNG_ID: &str = "ChaCha8Rng(rand_chacha 0.9; seed_from_u64(seed ^ rep), stream = axis point)";

/// Closed interval sampled uniformly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn check(self, what: &str, lo: f64, hi: f64) -> Result<()> {
        // Negated so that NaN bounds fail.
        if !(self.lo <= self.hi) || self.lo < lo || self.hi > hi {
            return Err(Error::input(format!(
                "{what} interval [{}, {}] outside [{lo}, {hi}] or reversed",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Parameter ranges for [`generate_instance`].
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceRanges {
    pub value: Interval,
    pub cost: Interval,
    pub theta: Interval,
    pub beta: Interval,
    /// Inclusive range of `|Γ_i|`, clamped to `M` when sampling.
    pub interest: (usize, usize),
    /// Probability that a true label is `+1`.
    pub label_prior: f64,
}

impl InstanceRanges {
    /// `v ∈ [10,20]`, `c ∈ [5,15]`, `θ ∈ [0,1]`, `β ∈ [0.05,0.1]`, `|Γ| ∈ [15,20]`.
    pub fn standard() -> Self {
        InstanceRanges {
            value: Interval::new(10.0, 20.0),
            cost: Interval::new(5.0, 15.0),
            theta: Interval::new(0.0, 1.0),
            beta: Interval::new(0.05, 0.1),
            interest: (15, 20),
            label_prior: 0.5,
        }
    }

    /// Small instances with frequent winners, for property tests.
    pub fn compact() -> Self {
        InstanceRanges {
            value: Interval::new(5.0, 15.0),
            cost: Interval::new(1.0, 4.0),
            theta: Interval::new(0.7, 1.0),
            beta: Interval::new(0.3, 0.6),
            interest: (1, 3),
            label_prior: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.value.check("value", 0.0, f64::MAX)?;
        self.cost.check("cost", 0.0, f64::MAX)?;
        self.theta.check("theta", 0.0, 1.0)?;
        self.beta.check("beta", f64::MIN_POSITIVE, 1.0 - f64::EPSILON)?;
        if self.interest.0 == 0 || self.interest.0 > self.interest.1 {
            return Err(Error::input(format!(
                "interest range [{}, {}] must be non-empty with a positive lower end",
                self.interest.0, self.interest.1
            )));
        }
        if !(0.0..=1.0).contains(&self.label_prior) {
            return Err(Error::input(format!("label prior {} outside [0, 1]", self.label_prior)));
        }
        Ok(())
    }
}

/// Draws an instance with `n` workers and `m` tasks, truthful bids.
///
/// Draw order per instance: task values, accuracy targets and true labels;
/// then per worker its cost, interest size, interest set and reliability row.
pub fn generate_instance<R: Rng + ?Sized>(ranges: &InstanceRanges, n: usize, m: usize, rng: &mut R) -> Result<Instance> {
    ranges.validate()?;
    if m == 0 && n > 0 {
        return Err(Error::input("workers need at least one task to be interested in"));
    }
    let mut tasks = Vec::with_capacity(m);
    let mut requesters = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m);
    for j in 0..m {
        let value = ranges.value.sample(rng);
        let beta = ranges.beta.sample(rng);
        let truth = if rng.random_bool(ranges.label_prior) {
            Label::Positive
        } else {
            Label::Negative
        };
        betas.push(beta);
        tasks.push(Task {
            id: j,
            true_label: truth,
            accuracy_target: beta,
        });
        requesters.push(Requester {
            id: j,
            task: j,
            value,
            bid: value,
        });
    }
    let hi = ranges.interest.1.min(m);
    let lo = ranges.interest.0.min(hi);
    let mut workers = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    for i in 0..n {
        let cost = ranges.cost.sample(rng);
        let size = rng.random_range(lo..=hi);
        let mut interested = index::sample(rng, m, size).into_vec();
        interested.sort_unstable();
        let row: Vec<f64> = (0..m).map(|_| ranges.theta.sample(rng)).collect();
        theta.push(row);
        workers.push(Worker {
            id: i,
            interested,
            cost,
            bid: cost,
        });
    }
    let rel = ReliabilityMatrix::new(theta, &betas)?;
    Instance::new(tasks, requesters, workers, rel)
}

/// Labels of `workers` on their whole interested sets: correct with
/// probability `θ_{i,j}`, flipped otherwise. Other entries stay empty.
pub fn sample_labels<R: Rng + ?Sized>(instance: &Instance, workers: &[usize], rng: &mut R) -> LabelMatrix {
    let mut labels = LabelMatrix::new(instance.n_workers(), instance.n_tasks());
    let rel = instance.reliability();
    for &i in workers {
        for &j in &instance.workers()[i].interested {
            let truth = instance.tasks()[j].true_label;
            let correct = rng.random_bool(rel.theta(i, j));
            labels.set(i, j, Some(if correct { truth } else { truth.flipped() }));
        }
    }
    labels
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Vary `N`, `M` fixed.
    Workers,
    /// Vary `M`, `N` fixed.
    Tasks,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Workers => "N",
            Axis::Tasks => "M",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LabelMode {
    /// New instance and labels every repetition.
    #[default]
    Regenerate,
    /// One instance per axis point; only labels are redrawn.
    LabelsOnly,
}

/// Which workers label which tasks for the accuracy metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AccuracyScope {
    /// A mechanism's winners label their tasks; its won tasks are aggregated.
    Winners(Mechanism),
    /// The greedy feasible cover labels every coverable task.
    #[default]
    FeasibleCover,
}

/// One experiment: ranges, an axis sweep and the repetition budget.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingSpec {
    pub name: String,
    pub ranges: InstanceRanges,
    pub axis: Axis,
    /// The dimension held fixed.
    pub fixed: usize,
    pub points: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub label_mode: LabelMode,
    pub scope: AccuracyScope,
}

/// Repetitions per axis point by default.
pub const DEFAULT_REPS: usize = 2000;
/// Repetitions with `--full`.
pub const FULL_REPS: usize = 50000;

impl SettingSpec {
    /// `M = 60`, `N ∈ {90, 120, 150}`.
    pub fn setting_one(seed: u64) -> Self {
        SettingSpec {
            name: "I".into(),
            ranges: InstanceRanges::standard(),
            axis: Axis::Workers,
            fixed: 60,
            points: vec![90, 120, 150],
            reps: DEFAULT_REPS,
            seed,
            label_mode: LabelMode::default(),
            scope: AccuracyScope::default(),
        }
    }

    /// `N = 60`, `M ∈ {20, 50, 80}`.
    pub fn setting_two(seed: u64) -> Self {
        SettingSpec {
            name: "II".into(),
            axis: Axis::Tasks,
            points: vec![20, 50, 80],
            ..SettingSpec::setting_one(seed)
        }
    }

    pub fn by_name(name: &str, seed: u64) -> Result<Self> {
        match name {
            "I" | "1" => Ok(SettingSpec::setting_one(seed)),
            "II" | "2" => Ok(SettingSpec::setting_two(seed)),
            other => Err(Error::input(format!("unknown setting `{other}`, expected I or II"))),
        }
    }

    /// `(N, M)` at an axis value.
    pub fn dims(&self, axis_value: usize) -> (usize, usize) {
        match self.axis {
            Axis::Workers => (axis_value, self.fixed),
            Axis::Tasks => (self.fixed, axis_value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ranges.validate()?;
        if self.points.is_empty() {
            return Err(Error::input("setting has no axis points"));
        }
        if self.reps == 0 {
            return Err(Error::input("repetition count must be positive"));
        }
        Ok(())
    }
}

/// Generator for one repetition at one axis point.
pub fn rep_rng(seed: u64, rep: u64, point: u64) -> SimRng {
    use rand::SeedableRng;
    let mut rng = SimRng::seed_from_u64(seed ^ rep);
    rng.set_stream(point);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generation_is_seeded() {
        let r = InstanceRanges::standard();
        let a = generate_instance(&r, 90, 60, &mut rep_rng(3, 0, 0)).unwrap();
        let b = generate_instance(&r, 90, 60, &mut rep_rng(3, 0, 0)).unwrap();
        let c = generate_instance(&r, 90, 60, &mut rep_rng(3, 1, 0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn samples_stay_in_ranges() {
        let r = InstanceRanges::standard();
        let inst = generate_instance(&r, 60, 20, &mut rep_rng(11, 0, 0)).unwrap();
        for req in inst.requesters() {
            assert!((10.0..=20.0).contains(&req.value));
            assert_eq!(req.value, req.bid);
        }
        for w in inst.workers() {
            assert!((5.0..=15.0).contains(&w.cost));
            assert!((15..=20).contains(&w.interested.len()));
            assert!(w.interested.iter().all(|&j| j < 20));
        }
        for t in inst.tasks() {
            assert!((0.05..=0.1).contains(&t.accuracy_target));
        }
    }

    #[test]
    fn interest_is_clamped_to_task_count() {
        let r = InstanceRanges::standard();
        let inst = generate_instance(&r, 5, 10, &mut rep_rng(1, 0, 0)).unwrap();
        assert!(inst.workers().iter().all(|w| w.interested.len() == 10));
    }

    #[test]
    fn extreme_reliabilities_are_deterministic() {
        for (theta, correct) in [(1.0, true), (0.0, false)] {
            let mut r = InstanceRanges::compact();
            r.theta = Interval::new(theta, theta);
            let inst = generate_instance(&r, 4, 3, &mut rep_rng(5, 0, 0)).unwrap();
            let labels = sample_labels(&inst, &[0, 1, 2, 3], &mut SimRng::seed_from_u64(0));
            for w in inst.workers() {
                for &j in &w.interested {
                    let truth = inst.tasks()[j].true_label;
                    let expect = if correct { truth } else { truth.flipped() };
                    assert_eq!(labels.get(w.id, j), Some(expect));
                }
            }
        }
    }

    #[test]
    fn label_accuracy_matches_reliability() {
        // One worker, one task, θ = 0.7.
        let mut r = InstanceRanges::compact();
        r.theta = Interval::new(0.7, 0.7);
        r.interest = (1, 1);
        let inst = generate_instance(&r, 1, 1, &mut rep_rng(2, 0, 0)).unwrap();
        let mut rng = SimRng::seed_from_u64(99);
        let draws = 50_000;
        let correct = (0..draws)
            .filter(|_| sample_labels(&inst, &[0], &mut rng).get(0, 0) == Some(inst.tasks()[0].true_label))
            .count();
        let p = correct as f64 / draws as f64;
        assert!((p - 0.7).abs() <= 0.006, "{p}");
    }

    #[test]
    fn rejects_bad_ranges() {
        let mut r = InstanceRanges::standard();
        r.theta = Interval::new(0.2, 1.5);
        assert!(r.validate().is_err());
        let mut r = InstanceRanges::standard();
        r.interest = (0, 3);
        assert!(r.validate().is_err());
        assert!(SettingSpec::by_name("III", 0).is_err());
    }
}
