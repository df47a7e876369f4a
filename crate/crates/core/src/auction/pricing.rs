//! Critical-value payments.
//!
//! A winning requester is charged the smallest bid that still wins and a
//! winning worker is paid the largest bid that still wins, both holding every
//! other bid and the cover fixed. Each value comes from one rerun of the
//! selection loop with the participant taken out of competition:
//!
//! * requester `r_j` sits out; at every round `k` she would have displaced
//!   the round's winner by bidding `Σ_{C'_j} b + m_k`, and once the loop
//!   stops she still wins by bidding her residual cover cost;
//! * worker `w_i` bids `+∞`, blocking every requester whose slice holds her;
//!   at round `k` a blocked requester `r_h` would displace the round's winner
//!   while `b ≤ (a_h - Σ_{C'_h ∖ w_i} b) - m_k`, and after the loop stops while
//!   `b ≤ a_h - Σ_{C'_h ∖ w_i} b`.

use super::cover::FeasibleCover;
use super::selection::{Exclusion, Reslicing, Selector};
use crate::model::Instance;
use crate::par::Execution;

/// How payments are seeded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PricingMode {
    /// Critical values, including the post-loop candidates.
    #[default]
    Critical,
    /// Literal zero-seeded minimum/maximum without post-loop requester
    /// candidates, kept for comparison runs. Charges requesters nothing.
    ZeroSeeded,
}

/// Smallest winning bid of requester `j`.
pub(crate) fn requester_critical(
    instance: &Instance,
    cover: &FeasibleCover,
    reslicing: Reslicing,
    j: usize,
    mode: PricingMode,
) -> f64 {
    let mut sel = Selector::new(instance, cover, reslicing, Exclusion::Requester(j));
    let mut price = match mode {
        PricingMode::Critical => f64::INFINITY,
        PricingMode::ZeroSeeded => 0.0,
    };
    while let Some(step) = sel.next_step() {
        price = price.min(sel.cost(j) + step.marginal);
        sel.commit(step.requester);
    }
    match mode {
        PricingMode::Critical => price.min(sel.cost(j)),
        PricingMode::ZeroSeeded => {
            if sel.residual(j).is_empty() {
                price.min(0.0)
            } else {
                price
            }
        }
    }
}

/// Largest winning bid of worker `i`, `None` if she cannot win at any bid.
pub(crate) fn worker_critical(
    instance: &Instance,
    cover: &FeasibleCover,
    reslicing: Reslicing,
    i: usize,
    mode: PricingMode,
) -> Option<f64> {
    if !cover.contains(i) {
        return None;
    }
    let own = instance.workers()[i].bid;
    let blocked: Vec<usize> = instance.workers()[i]
        .interested
        .iter()
        .copied()
        .filter(|&h| cover.is_coverable(h))
        .collect();
    let slack = |sel: &Selector| {
        blocked
            .iter()
            .filter(|&&h| sel.is_remaining(h))
            .map(|&h| instance.requesters()[h].bid - (sel.cost(h) - own))
            .max_by(f64::total_cmp)
    };
    let mut sel = Selector::new(instance, cover, reslicing, Exclusion::Worker(i));
    let mut best: Option<f64> = None;
    let mut offer = |candidate: f64| {
        best = Some(best.map_or(candidate, |b: f64| b.max(candidate)));
    };
    while let Some(step) = sel.next_step() {
        if let Some(s) = slack(&sel) {
            offer(s - step.marginal);
        }
        sel.commit(step.requester);
    }
    if let Some(s) = slack(&sel) {
        offer(s);
    }
    let best = best.filter(|&b| b >= 0.0);
    match mode {
        PricingMode::Critical => best,
        PricingMode::ZeroSeeded => Some(best.unwrap_or(0.0).max(0.0)),
    }
}

/// `p^r` for every task; zero for losers.
pub fn price_requesters(
    instance: &Instance,
    cover: &FeasibleCover,
    reslicing: Reslicing,
    winning_requesters: &[usize],
    mode: PricingMode,
    execution: Execution,
) -> Vec<f64> {
    let prices = execution.map_slice(winning_requesters, |&j| requester_critical(instance, cover, reslicing, j, mode));
    let mut out = vec![0.0; instance.n_tasks()];
    for (&j, p) in winning_requesters.iter().zip(prices) {
        out[j] = p;
    }
    out
}

/// `p^w` for every worker; zero for losers.
pub fn price_workers(
    instance: &Instance,
    cover: &FeasibleCover,
    reslicing: Reslicing,
    winning_workers: &[usize],
    mode: PricingMode,
    execution: Execution,
) -> Vec<f64> {
    let prices = execution.map_slice(winning_workers, |&i| worker_critical(instance, cover, reslicing, i, mode));
    let mut out = vec![0.0; instance.n_workers()];
    for (&i, p) in winning_workers.iter().zip(prices) {
        // A winner always has a winning bid, her own.
        out[i] = p.unwrap_or(instance.workers()[i].bid);
    }
    out
}
