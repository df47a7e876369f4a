use std::time::{Duration, Instant};

use super::{generate_instance, rep_rng, sample_labels, AccuracyScope, LabelMode, SettingSpec, SimRng};
use crate::aggregation::{beta_accuracy_satisfied, error_bound, Aggregator};
use crate::auction::{feasible_cover, AuctionConfig, Mechanism, PricingMode};
use crate::error::Result;
use crate::model::{
    platform_profit, requester_utility, social_welfare, worker_utility, Instance, Label, Valuation, EPS_CMP,
};
use crate::par::Execution;

/// Label streams in labels-only mode live above this stream offset, apart
/// from the instance stream of the same point.
const LABEL_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq)]
pub struct MechanismMetrics {
    pub mechanism: Mechanism,
    pub bid_welfare: f64,
    pub true_welfare: f64,
    pub platform_profit: f64,
    pub winning_requesters: usize,
    pub winning_workers: usize,
    /// Participants with utility below `-ε`.
    pub ir_violations: usize,
    pub negative_welfare: bool,
    /// Won tasks whose winners miss the coverage demand.
    pub coverage_violations: usize,
    pub runtime: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyMetrics {
    pub aggregator: Aggregator,
    pub mae: Option<f64>,
    /// Per task: whether the aggregate was wrong, `None` if not aggregated.
    pub errors: Vec<Option<bool>>,
}

/// One repetition at one axis point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRecord {
    pub point: usize,
    pub axis_value: usize,
    pub rep: usize,
    pub mechanisms: Vec<MechanismMetrics>,
    pub executed_tasks: usize,
    pub accuracy: Vec<AccuracyMetrics>,
    /// Weighted-rule bound per executed task.
    pub bounds: Vec<Option<f64>>,
}

/// Mean and sample standard deviation of one metric at one axis point.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub setting: String,
    pub axis: &'static str,
    pub axis_value: usize,
    pub metric: &'static str,
    pub subject: String,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

fn mechanism_metrics(instance: &Instance, mechanism: Mechanism, pricing: PricingMode) -> MechanismMetrics {
    let start = Instant::now();
    let config = AuctionConfig {
        pricing,
        execution: Execution::Sequential,
    };
    let out = mechanism.run_with(instance, &config);
    let runtime = start.elapsed();
    let mut ir_violations = 0;
    for r in instance.requesters() {
        if requester_utility(&out, r).map_or(true, |u| u < -EPS_CMP) {
            ir_violations += 1;
        }
    }
    for w in instance.workers() {
        if worker_utility(&out, w).map_or(true, |u| u < -EPS_CMP) {
            ir_violations += 1;
        }
    }
    let bid_welfare = social_welfare(&out, instance, Valuation::Bids);
    let coverage_violations = out
        .winning_requesters
        .iter()
        .filter(|&&j| !beta_accuracy_satisfied(instance.reliability(), instance.workers(), &out.winning_workers, j))
        .count();
    MechanismMetrics {
        mechanism,
        bid_welfare,
        true_welfare: social_welfare(&out, instance, Valuation::True),
        platform_profit: platform_profit(&out),
        winning_requesters: out.winning_requesters.len(),
        winning_workers: out.winning_workers.len(),
        ir_violations,
        negative_welfare: bid_welfare < -EPS_CMP,
        coverage_violations,
        runtime,
    }
}

/// Labelling workers and aggregated tasks under `scope`.
fn scope_members(instance: &Instance, scope: AccuracyScope) -> (Vec<usize>, Vec<usize>) {
    match scope {
        AccuracyScope::FeasibleCover => {
            let cover = feasible_cover(instance);
            let mut members = cover.members().to_vec();
            members.sort_unstable();
            (members, cover.coverable_tasks().collect())
        }
        AccuracyScope::Winners(m) => {
            let sel = m.select(instance);
            (sel.winning_workers, sel.winning_requesters)
        }
    }
}

fn accuracy(
    instance: &Instance,
    workers: &[usize],
    tasks: &[usize],
    aggregators: &[Aggregator],
    rng: &mut SimRng,
) -> Vec<AccuracyMetrics> {
    let labels = sample_labels(instance, workers, rng);
    let truth: Vec<Label> = instance.tasks().iter().map(|t| t.true_label).collect();
    aggregators
        .iter()
        .map(|&a| {
            let res = a.aggregate(&labels, instance.reliability(), workers, tasks);
            let errors = res
                .labels
                .iter()
                .zip(&truth)
                .map(|(l, t)| l.map(|l| l != *t))
                .collect();
            AccuracyMetrics {
                aggregator: a,
                mae: res.mean_absolute_error(&truth),
                errors,
            }
        })
        .collect()
}

fn bounds(instance: &Instance, workers: &[usize], tasks: &[usize]) -> Vec<Option<f64>> {
    let mut out = vec![None; instance.n_tasks()];
    for &j in tasks {
        out[j] = error_bound(instance.reliability(), instance.workers(), workers, j).ok();
    }
    out
}

/// Runs every repetition at every axis point. Repetition `r` at point `p`
/// draws from [`rep_rng`]`(seed, r, p)`, so results do not depend on
/// `execution`.
pub fn run_experiment(
    spec: &SettingSpec,
    mechanisms: &[Mechanism],
    aggregators: &[Aggregator],
    pricing: PricingMode,
    execution: Execution,
) -> Result<Vec<MetricRecord>> {
    spec.validate()?;
    let mut records = Vec::with_capacity(spec.points.len() * spec.reps);
    for (p, &value) in spec.points.iter().enumerate() {
        let (n, m) = spec.dims(value);
        let fixed = match spec.label_mode {
            LabelMode::LabelsOnly => {
                let inst = generate_instance(&spec.ranges, n, m, &mut rep_rng(spec.seed, 0, p as u64))?;
                let mechs: Vec<_> = mechanisms.iter().map(|&mm| mechanism_metrics(&inst, mm, pricing)).collect();
                let (workers, tasks) = scope_members(&inst, spec.scope);
                let b = bounds(&inst, &workers, &tasks);
                Some((inst, mechs, workers, tasks, b))
            }
            LabelMode::Regenerate => None,
        };
        let point_records = execution.map(spec.reps, |rep| -> Result<MetricRecord> {
            match &fixed {
                Some((inst, mechs, workers, tasks, b)) => {
                    let mut rng = rep_rng(spec.seed, rep as u64, LABEL_STREAM | p as u64);
                    Ok(MetricRecord {
                        point: p,
                        axis_value: value,
                        rep,
                        mechanisms: mechs.clone(),
                        executed_tasks: tasks.len(),
                        accuracy: accuracy(inst, workers, tasks, aggregators, &mut rng),
                        bounds: b.clone(),
                    })
                }
                None => {
                    let mut rng = rep_rng(spec.seed, rep as u64, p as u64);
                    let inst = generate_instance(&spec.ranges, n, m, &mut rng)?;
                    let mechs = mechanisms.iter().map(|&mm| mechanism_metrics(&inst, mm, pricing)).collect();
                    let (workers, tasks) = scope_members(&inst, spec.scope);
                    Ok(MetricRecord {
                        point: p,
                        axis_value: value,
                        rep,
                        mechanisms: mechs,
                        executed_tasks: tasks.len(),
                        accuracy: accuracy(&inst, &workers, &tasks, aggregators, &mut rng),
                        bounds: bounds(&inst, &workers, &tasks),
                    })
                }
            }
        });
        for r in point_records {
            records.push(r?);
        }
    }
    Ok(records)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-point statistics in a fixed row order: mechanism metrics by
/// mechanism, then accuracy metrics by aggregator, then task counts.
/// In labels-only mode it also reports per-task error rates (`ep_max`, and
/// for the weighted rule `ep_excess = max_j (EP_j - bound_j)`).
pub fn summarize(spec: &SettingSpec, records: &[MetricRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for (p, &value) in spec.points.iter().enumerate() {
        let at: Vec<&MetricRecord> = records.iter().filter(|r| r.point == p).collect();
        if at.is_empty() {
            continue;
        }
        let mut push = |metric: &'static str, subject: &str, xs: &[f64]| {
            let (mean, std) = mean_std(xs);
            rows.push(SummaryRow {
                setting: spec.name.clone(),
                axis: spec.axis.name(),
                axis_value: value,
                metric,
                subject: subject.to_string(),
                mean,
                std,
                count: xs.len(),
            });
        };
        let n_mech = at[0].mechanisms.len();
        type Getter = fn(&MechanismMetrics) -> f64;
        let metrics: [(&'static str, Getter); 8] = [
            ("welfare", |m| m.bid_welfare),
            ("true_welfare", |m| m.true_welfare),
            ("platform_profit", |m| m.platform_profit),
            ("winning_requesters", |m| m.winning_requesters as f64),
            ("winning_workers", |m| m.winning_workers as f64),
            ("ir_violations", |m| m.ir_violations as f64),
            ("negative_welfare", |m| f64::from(u8::from(m.negative_welfare))),
            ("coverage_violations", |m| m.coverage_violations as f64),
        ];
        for k in 0..n_mech {
            let name = at[0].mechanisms[k].mechanism.name();
            for (metric, get) in metrics {
                let xs: Vec<f64> = at.iter().map(|r| get(&r.mechanisms[k])).collect();
                push(metric, name, &xs);
            }
        }
        let n_agg = at[0].accuracy.len();
        for k in 0..n_agg {
            let agg = at[0].accuracy[k].aggregator;
            let xs: Vec<f64> = at.iter().filter_map(|r| r.accuracy[k].mae).collect();
            push("mae", agg.name(), &xs);
        }
        let xs: Vec<f64> = at.iter().map(|r| r.executed_tasks as f64).collect();
        push("executed_tasks", "-", &xs);

        if spec.label_mode == LabelMode::LabelsOnly {
            let n_tasks = at[0].bounds.len();
            for k in 0..n_agg {
                let agg = at[0].accuracy[k].aggregator;
                let mut rates = Vec::new();
                let mut excess = Vec::new();
                for j in 0..n_tasks {
                    let outcomes: Vec<bool> = at.iter().filter_map(|r| r.accuracy[k].errors[j]).collect();
                    if outcomes.is_empty() {
                        continue;
                    }
                    let ep = outcomes.iter().filter(|&&e| e).count() as f64 / outcomes.len() as f64;
                    rates.push(ep);
                    if let Some(b) = at[0].bounds[j] {
                        excess.push(ep - b);
                    }
                }
                if let Some(max) = rates.iter().copied().max_by(f64::total_cmp) {
                    push_single(&mut rows, spec, value, "ep_max", agg.name(), max, rates.len());
                }
                if agg == Aggregator::Weighted {
                    if let Some(max) = excess.iter().copied().max_by(f64::total_cmp) {
                        push_single(&mut rows, spec, value, "ep_excess", agg.name(), max, excess.len());
                    }
                }
            }
        }
    }
    rows
}

fn push_single(
    rows: &mut Vec<SummaryRow>,
    spec: &SettingSpec,
    axis_value: usize,
    metric: &'static str,
    subject: &str,
    value: f64,
    count: usize,
) {
    rows.push(SummaryRow {
        setting: spec.name.clone(),
        axis: spec.axis.name(),
        axis_value,
        metric,
        subject: subject.to_string(),
        mean: value,
        std: 0.0,
        count,
    });
}

/// Empirical error probability of one task over repeated label draws.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskErrorRate {
    pub task: usize,
    pub error_rate: f64,
    /// `exp(-½ Σ q)` over the labelling workers.
    pub bound: f64,
    pub draws: usize,
}

impl TaskErrorRate {
    /// `bound + 3 sqrt(bound (1 - bound) / draws)`.
    pub fn tolerance(&self) -> f64 {
        self.bound + 3.0 * (self.bound * (1.0 - self.bound) / self.draws as f64).sqrt()
    }
}

/// Redraws the labels of `workers` `draws` times; draw `d` uses
/// [`rep_rng`]`(seed, d, 0)`.
pub fn estimate_error_rates(
    instance: &Instance,
    workers: &[usize],
    tasks: &[usize],
    aggregator: Aggregator,
    draws: usize,
    seed: u64,
    execution: Execution,
) -> Vec<TaskErrorRate> {
    let outcomes = execution.map(draws, |d| {
        let mut rng = rep_rng(seed, d as u64, 0);
        accuracy(instance, workers, tasks, &[aggregator], &mut rng)
            .pop()
            .expect("one aggregator")
            .errors
    });
    let bounds = bounds(instance, workers, tasks);
    tasks
        .iter()
        .filter_map(|&j| {
            let wrong = outcomes.iter().filter(|e| e[j] == Some(true)).count();
            let seen = outcomes.iter().filter(|e| e[j].is_some()).count();
            let bound = bounds[j]?;
            (seen > 0).then(|| TaskErrorRate {
                task: j,
                error_rate: wrong as f64 / seen as f64,
                bound,
                draws: seen,
            })
        })
        .collect()
}
