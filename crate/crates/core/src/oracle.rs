//! Ground-truth solvers for tests and evaluation.
//!
//! [`solve_exact`] enumerates every worker subset of the welfare-maximization
//! program; for a fixed subset the best task set is simply every task whose
//! coverage demand is met, since bids are non-negative.
//! [`critical_bid_sweep`] recovers a participant's threshold bid by probing
//! the mechanism directly.

use num_rational::BigRational;

use crate::auction::Mechanism;
use crate::error::{Error, Result};
use crate::model::exact;
use crate::model::Instance;
use crate::par::Execution;

/// Default enumeration limit on the worker count.
pub const DEFAULT_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Float,
    /// Compare candidate welfares as exact rationals.
    Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    pub welfare: f64,
    /// Number of worker subsets evaluated.
    pub enumerated: u64,
}

impl OracleSolution {
    pub fn workers(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&i| self.x[i]).collect()
    }

    pub fn tasks(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|&j| self.y[j]).collect()
    }
}

/// Bit `i` of the mask selects worker `i`. Lexicographic order on `x`
/// compares worker 0 first, so the key reverses the bits.
fn lex_key(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

struct Evaluator<'a> {
    instance: &'a Instance,
    /// Per worker, (task, q) pairs over interested tasks.
    contributions: Vec<Vec<(usize, f64)>>,
    bids_exact: Option<(Vec<BigRational>, Vec<BigRational>)>,
}

#[derive(Clone)]
enum Score {
    Float(f64),
    Exact(BigRational),
}

impl Score {
    fn better_than(&self, other: &Score) -> std::cmp::Ordering {
        match (self, other) {
            (Score::Float(a), Score::Float(b)) => a.total_cmp(b),
            (Score::Exact(a), Score::Exact(b)) => a.cmp(b),
            _ => unreachable!("mixed arithmetic"),
        }
    }
}

impl<'a> Evaluator<'a> {
    fn new(instance: &'a Instance, arithmetic: Arithmetic) -> Self {
        let rel = instance.reliability();
        let contributions = instance
            .workers()
            .iter()
            .map(|w| w.interested.iter().map(|&j| (j, rel.q(w.id, j))).collect())
            .collect();
        let bids_exact = (arithmetic == Arithmetic::Rational).then(|| {
            (
                instance.requesters().iter().map(|r| exact::rational(r.bid)).collect(),
                instance.workers().iter().map(|w| exact::rational(w.bid)).collect(),
            )
        });
        Evaluator {
            instance,
            contributions,
            bids_exact,
        }
    }

    fn decisions(&self, mask: u64, coverage: &mut [f64]) -> (Vec<bool>, Vec<bool>) {
        let n = self.instance.n_workers();
        coverage.iter_mut().for_each(|c| *c = 0.0);
        let x: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        for (on, contrib) in x.iter().zip(&self.contributions) {
            if *on {
                for &(j, q) in contrib {
                    coverage[j] += q;
                }
            }
        }
        let y = coverage
            .iter()
            .enumerate()
            .map(|(j, &c)| self.instance.meets_demand(j, c))
            .collect();
        (x, y)
    }

    fn score(&self, x: &[bool], y: &[bool]) -> Score {
        match &self.bids_exact {
            Some((a, b)) => Score::Exact(exact::welfare(a, b, x, y)),
            None => {
                let gain: f64 = y
                    .iter()
                    .zip(self.instance.requesters())
                    .filter(|(y, _)| **y)
                    .map(|(_, r)| r.bid)
                    .sum();
                let cost: f64 = x
                    .iter()
                    .zip(self.instance.workers())
                    .filter(|(x, _)| **x)
                    .map(|(_, w)| w.bid)
                    .sum();
                Score::Float(gain - cost)
            }
        }
    }
}

struct Best {
    mask: u64,
    score: Score,
}

fn keep_better(a: Best, b: Best, n: usize) -> Best {
    use std::cmp::Ordering::*;
    match b.score.better_than(&a.score) {
        Greater => b,
        Less => a,
        Equal => {
            if lex_key(b.mask, n) < lex_key(a.mask, n) {
                b
            } else {
                a
            }
        }
    }
}

/// Exhaustive optimum over all `2^N` worker subsets. Ties go to the
/// lexicographically smallest `x`.
pub fn solve_exact(instance: &Instance, limit: usize) -> Result<OracleSolution> {
    solve_exact_with(instance, limit, Arithmetic::Float, Execution::default())
}

pub fn solve_exact_with(
    instance: &Instance,
    limit: usize,
    arithmetic: Arithmetic,
    execution: Execution,
) -> Result<OracleSolution> {
    let n = instance.n_workers();
    if n > limit || n > 40 {
        return Err(Error::TooLarge { workers: n, limit });
    }
    let eval = Evaluator::new(instance, arithmetic);
    let total: u64 = 1 << n;
    let chunks: u64 = total.min(64);
    let per = total / chunks;
    let m = instance.n_tasks();
    let bests = execution.map(chunks as usize, |c| {
        let mut coverage = vec![0.0; m];
        let start = c as u64 * per;
        let mut best: Option<Best> = None;
        for mask in start..start + per {
            let (x, y) = eval.decisions(mask, &mut coverage);
            let cand = Best {
                mask,
                score: eval.score(&x, &y),
            };
            best = Some(match best {
                None => cand,
                Some(b) => keep_better(b, cand, n),
            });
        }
        best.expect("non-empty chunk")
    });
    let best = bests
        .into_iter()
        .reduce(|a, b| keep_better(a, b, n))
        .expect("at least one chunk");
    let mut coverage = vec![0.0; m];
    let (x, y) = eval.decisions(best.mask, &mut coverage);
    let welfare = match &best.score {
        Score::Float(f) => *f,
        Score::Exact(r) => exact::to_f64(r),
    };
    Ok(OracleSolution {
        x,
        y,
        welfare,
        enumerated: total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Participant {
    Requester(usize),
    Worker(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepResult {
    /// Infimum (requesters) or supremum (workers) of the winning bids.
    Threshold(f64),
    NeverWins,
}

/// Coarse grid resolution before bisection.
pub const DEFAULT_RESOLUTION: f64 = 1e-4;
/// Bisection target width.
pub const REFINED_RESOLUTION: f64 = 1e-8;

fn wins(mechanism: Mechanism, instance: &Instance, who: Participant, bid: f64) -> bool {
    match who {
        Participant::Requester(j) => mechanism
            .select(&instance.with_requester_bid(j, bid))
            .winning_requesters
            .binary_search(&j)
            .is_ok(),
        Participant::Worker(i) => mechanism
            .select(&instance.with_worker_bid(i, bid))
            .winning_workers
            .binary_search(&i)
            .is_ok(),
    }
}

/// Locates the winning-bid threshold of one participant, all other bids
/// fixed, by a grid scan followed by bisection to `resolution`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn critical_bid_sweep(
    mechanism: Mechanism,
    instance: &Instance,
    who: Participant,
    resolution: f64,
) -> Result<SweepResult> {
    if !(resolution > 0.0) {
        return Err(Error::input("sweep resolution must be positive"));
    }
    const GRID: usize = 64;
    match who {
        Participant::Requester(j) => {
            if j >= instance.n_tasks() {
                return Err(Error::input(format!("no requester {j}")));
            }
            let r = &instance.requesters()[j];
            let all_bids: f64 = instance.workers().iter().map(|w| w.bid).sum();
            let hi = (10.0 * r.value.max(r.bid)).max(all_bids + 1.0);
            if !wins(mechanism, instance, who, hi) {
                return Ok(SweepResult::NeverWins);
            }
            // First grid point that wins; winning sets are upward closed.
            let step = hi / GRID as f64;
            let mut lo = 0.0;
            let mut up = hi;
            if wins(mechanism, instance, who, 0.0) {
                return Ok(SweepResult::Threshold(0.0));
            }
            for k in 1..=GRID {
                let b = step * k as f64;
                if wins(mechanism, instance, who, b) {
                    up = b;
                    lo = step * (k - 1) as f64;
                    break;
                }
            }
            while up - lo > resolution {
                let mid = 0.5 * (lo + up);
                if wins(mechanism, instance, who, mid) {
                    up = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(SweepResult::Threshold(0.5 * (lo + up)))
        }
        Participant::Worker(i) => {
            if i >= instance.n_workers() {
                return Err(Error::input(format!("no worker {i}")));
            }
            if !wins(mechanism, instance, who, 0.0) {
                return Ok(SweepResult::NeverWins);
            }
            let all_values: f64 = instance.requesters().iter().map(|r| r.bid).sum();
            let hi = all_values + 1.0;
            let step = hi / GRID as f64;
            let mut lo = 0.0;
            let mut up = hi;
            for k in 1..=GRID {
                let b = step * k as f64;
                if !wins(mechanism, instance, who, b) {
                    up = b;
                    lo = step * (k - 1) as f64;
                    break;
                }
            }
            while up - lo > resolution {
                let mid = 0.5 * (lo + up);
                if wins(mechanism, instance, who, mid) {
                    lo = mid;
                } else {
                    up = mid;
                }
            }
            Ok(SweepResult::Threshold(0.5 * (lo + up)))
        }
    }
}
