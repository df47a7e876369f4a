//! Label aggregation for executed tasks.
//!
//! The weighted rule takes `sign(Σ λ_{i,j} l_{i,j})` with `λ = 2θ - 1` over
//! winners whose reliability on the task exceeds one half. Its error is
//! bounded by `exp(-½ Σ q_{i,j})`, which is what the auctions' coverage
//! constraint `Σ q ≥ 2 ln(1/β)` targets.

use crate::error::{Error, Result};
use crate::model::{Label, ReliabilityMatrix, Worker, EPS_CMP};

/// Reported labels, `None` standing for "not executed".
#[derive(Clone, Debug, PartialEq)]
pub struct LabelMatrix {
    workers: usize,
    tasks: usize,
    labels: Vec<Option<Label>>,
}

impl LabelMatrix {
    pub fn new(workers: usize, tasks: usize) -> Self {
        LabelMatrix {
            workers,
            tasks,
            labels: vec![None; workers * tasks],
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn get(&self, worker: usize, task: usize) -> Option<Label> {
        self.labels[worker * self.tasks + task]
    }

    pub fn set(&mut self, worker: usize, task: usize, label: Option<Label>) {
        self.labels[worker * self.tasks + task] = label;
    }

    /// Checks that labels are present exactly for winners on their
    /// interested tasks.
    pub fn check_consistent(&self, workers: &[Worker], winning_workers: &[usize]) -> Result<()> {
        if workers.len() != self.workers {
            return Err(Error::input("label matrix worker count mismatch"));
        }
        let mut winner = vec![false; self.workers];
        for &i in winning_workers {
            winner[i] = true;
        }
        for (i, w) in workers.iter().enumerate() {
            for j in 0..self.tasks {
                let expected = winner[i] && w.is_interested_in(j);
                if self.get(i, j).is_some() != expected {
                    return Err(Error::input(format!(
                        "label ({i}, {j}) is {} but should be {}",
                        if expected { "missing" } else { "present" },
                        if expected { "present" } else { "absent" }
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-task aggregated labels. `None` marks tasks that were not executed or
/// had no usable contributor.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregatedResult {
    pub labels: Vec<Option<Label>>,
    /// Error bound for tasks aggregated by the weighted rule.
    pub bounds: Vec<Option<f64>>,
}

impl AggregatedResult {
    fn empty(tasks: usize) -> Self {
        AggregatedResult {
            labels: vec![None; tasks],
            bounds: vec![None; tasks],
        }
    }

    /// `(1/|T'|) Σ |l̂_j - l_j|` over aggregated tasks, `None` if there are none.
    pub fn mean_absolute_error(&self, truth: &[Label]) -> Option<f64> {
        let mut n = 0usize;
        let mut err = 0.0;
        for (est, t) in self.labels.iter().zip(truth) {
            if let Some(l) = est {
                n += 1;
                err += f64::from((l.value() - t.value()).abs());
            }
        }
        (n > 0).then(|| err / n as f64)
    }
}

/// Selectable aggregation rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Aggregator {
    Weighted,
    Mean,
    Median,
}

impl Aggregator {
    pub const ALL: [Aggregator; 3] = [Aggregator::Weighted, Aggregator::Mean, Aggregator::Median];

    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Weighted => "weighted",
            Aggregator::Mean => "mean",
            Aggregator::Median => "median",
        }
    }

    pub fn aggregate(
        self,
        labels: &LabelMatrix,
        reliability: &ReliabilityMatrix,
        winning_workers: &[usize],
        executed_tasks: &[usize],
    ) -> AggregatedResult {
        match self {
            Aggregator::Weighted => weighted_aggregate(labels, reliability, winning_workers, executed_tasks),
            Aggregator::Mean => mean_aggregate(labels, winning_workers, executed_tasks),
            Aggregator::Median => median_aggregate(labels, winning_workers, executed_tasks),
        }
    }
}

impl std::str::FromStr for Aggregator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(Aggregator::Weighted),
            "mean" => Ok(Aggregator::Mean),
            "median" => Ok(Aggregator::Median),
            other => Err(Error::input(format!("unknown aggregator `{other}`"))),
        }
    }
}

pub fn weighted_aggregate(
    labels: &LabelMatrix,
    reliability: &ReliabilityMatrix,
    winning_workers: &[usize],
    executed_tasks: &[usize],
) -> AggregatedResult {
    let mut out = AggregatedResult::empty(labels.tasks());
    for &j in executed_tasks {
        let mut sum = 0.0;
        let mut q_sum = 0.0;
        let mut any = false;
        for &i in winning_workers {
            let Some(l) = labels.get(i, j) else { continue };
            let w = reliability.weight(i, j);
            if w <= 0.0 {
                continue;
            }
            any = true;
            sum += w * f64::from(l.value());
            q_sum += reliability.q(i, j);
        }
        if any {
            out.labels[j] = Some(Label::from_sign(sum));
            out.bounds[j] = Some((-0.5 * q_sum).exp());
        }
    }
    out
}

fn votes(labels: &LabelMatrix, winning_workers: &[usize], task: usize) -> (usize, usize) {
    let mut pos = 0;
    let mut neg = 0;
    for &i in winning_workers {
        match labels.get(i, task) {
            Some(Label::Positive) => pos += 1,
            Some(Label::Negative) => neg += 1,
            None => {}
        }
    }
    (pos, neg)
}

/// `+1` iff the mean of the reported labels is non-negative.
pub fn mean_aggregate(labels: &LabelMatrix, winning_workers: &[usize], executed_tasks: &[usize]) -> AggregatedResult {
    let mut out = AggregatedResult::empty(labels.tasks());
    for &j in executed_tasks {
        let (pos, neg) = votes(labels, winning_workers, j);
        if pos + neg > 0 {
            let mean = (pos as f64 - neg as f64) / (pos + neg) as f64;
            out.labels[j] = Some(Label::from_sign(mean));
        }
    }
    out
}

/// Median of the reported labels; an even split has median `0` and resolves
/// to `+1`.
pub fn median_aggregate(labels: &LabelMatrix, winning_workers: &[usize], executed_tasks: &[usize]) -> AggregatedResult {
    let mut out = AggregatedResult::empty(labels.tasks());
    for &j in executed_tasks {
        let mut values: Vec<i32> = winning_workers
            .iter()
            .filter_map(|&i| labels.get(i, j))
            .map(Label::value)
            .collect();
        if values.is_empty() {
            continue;
        }
        values.sort_unstable();
        let n = values.len();
        let median = if n % 2 == 1 {
            f64::from(values[n / 2])
        } else {
            f64::from(values[n / 2 - 1] + values[n / 2]) / 2.0
        };
        out.labels[j] = Some(Label::from_sign(median));
    }
    out
}

fn interested_winners<'a>(
    workers: &'a [Worker],
    winning_workers: &'a [usize],
    task: usize,
) -> impl Iterator<Item = usize> + 'a {
    winning_workers
        .iter()
        .copied()
        .filter(move |&i| workers[i].is_interested_in(task))
}

/// `Σ q_{i,j}` over winners interested in `task`.
pub fn coverage_sum(reliability: &ReliabilityMatrix, workers: &[Worker], winning_workers: &[usize], task: usize) -> f64 {
    interested_winners(workers, winning_workers, task)
        .map(|i| reliability.q(i, task))
        .sum()
}

/// Upper bound `exp(-½ Σ q_{i,j})` on the weighted rule's error probability.
pub fn error_bound(
    reliability: &ReliabilityMatrix,
    workers: &[Worker],
    winning_workers: &[usize],
    task: usize,
) -> Result<f64> {
    if interested_winners(workers, winning_workers, task).next().is_none() {
        return Err(Error::domain(format!("task {task} has no winning worker")));
    }
    Ok((-0.5 * coverage_sum(reliability, workers, winning_workers, task)).exp())
}

/// Whether the winners meet `Σ q_{i,j} ≥ Q_j`, which guarantees error at
/// most `β_j`.
pub fn beta_accuracy_satisfied(
    reliability: &ReliabilityMatrix,
    workers: &[Worker],
    winning_workers: &[usize],
    task: usize,
) -> bool {
    coverage_sum(reliability, workers, winning_workers, task) >= reliability.demand(task) - EPS_CMP
}
