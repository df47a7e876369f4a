//! The greedy-cover double auction and its two baselines.
//!
//! All three share one pipeline: build a bid-independent cover, select
//! requesters greedily by marginal welfare, then charge/pay critical values.
//! They differ only in the cover ([`feasible_cover`] vs the whole worker set)
//! and in whether won workers are struck from the remaining slices.

pub mod cover;
pub mod pricing;
pub mod selection;

pub use cover::{feasible_cover, whole_worker_set, FeasibleCover};
pub use pricing::{price_requesters, price_workers, PricingMode};
pub use selection::{select_winners, Reslicing, Selection, SelectionTrace, TraceStep};

use crate::error::Error;
use crate::model::{AuctionOutcome, Instance};
use crate::par::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    /// Greedy feasible cover with dynamic re-slicing.
    Melon,
    /// Greedy feasible cover, requesters ranked once by static marginal welfare.
    MswGreedy,
    /// Whole worker set as the cover.
    Air,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AuctionConfig {
    pub pricing: PricingMode,
    pub execution: Execution,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [Mechanism::Melon, Mechanism::MswGreedy, Mechanism::Air];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Melon => "melon",
            Mechanism::MswGreedy => "msw",
            Mechanism::Air => "air",
        }
    }

    pub fn cover(self, instance: &Instance) -> FeasibleCover {
        match self {
            Mechanism::Melon | Mechanism::MswGreedy => feasible_cover(instance),
            Mechanism::Air => whole_worker_set(instance),
        }
    }

    pub fn reslicing(self) -> Reslicing {
        match self {
            Mechanism::MswGreedy => Reslicing::Static,
            Mechanism::Melon | Mechanism::Air => Reslicing::Dynamic,
        }
    }

    /// Winner selection only.
    pub fn select(self, instance: &Instance) -> Selection {
        let cover = self.cover(instance);
        selection::run_selection(instance, &cover, self.reslicing(), None)
    }

    pub fn run(self, instance: &Instance) -> AuctionOutcome {
        self.run_with(instance, &AuctionConfig::default())
    }

    pub fn run_with(self, instance: &Instance, config: &AuctionConfig) -> AuctionOutcome {
        let cover = self.cover(instance);
        let reslicing = self.reslicing();
        let sel = selection::run_selection(instance, &cover, reslicing, None);
        let mut out = AuctionOutcome::from_winners(
            instance.n_workers(),
            instance.n_tasks(),
            sel.winning_requesters.clone(),
            sel.winning_workers.clone(),
        );
        out.requester_payments = price_requesters(
            instance,
            &cover,
            reslicing,
            &sel.winning_requesters,
            config.pricing,
            config.execution,
        );
        out.worker_payments =
            price_workers(instance, &cover, reslicing, &sel.winning_workers, config.pricing, config.execution);
        out
    }
}

impl std::str::FromStr for Mechanism {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "melon" => Ok(Mechanism::Melon),
            "msw" | "msw-greedy" => Ok(Mechanism::MswGreedy),
            "air" => Ok(Mechanism::Air),
            other => Err(Error::Input(format!("unknown mechanism `{other}`"))),
        }
    }
}

/// Full auction: greedy cover, dynamic winner selection, critical payments.
pub fn run_melon(instance: &Instance) -> AuctionOutcome {
    Mechanism::Melon.run(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{self, fixtures, social_welfare, Valuation};

    #[test]
    fn lone_requester_pays_cover_cost_worker_gets_value() {
        let inst = fixtures::single(10.0, 6.0);
        let out = run_melon(&inst);
        assert_eq!(out.winning_requesters, vec![0]);
        assert_eq!(out.winning_workers, vec![0]);
        assert_eq!(out.requester_payments, vec![6.0]);
        assert_eq!(out.worker_payments, vec![10.0]);
        out.check_consistency().unwrap();
    }

    #[test]
    fn disjoint_requesters_pay_own_cover_cost() {
        let inst = fixtures::build(
            &[10.0, 8.0],
            &[(3.0, vec![0]), (2.0, vec![1])],
            &[vec![1.0, 0.5], vec![0.5, 1.0]],
            &[0.9, 0.9],
        );
        let out = run_melon(&inst);
        assert_eq!(out.winning_requesters, vec![0, 1]);
        assert_eq!(out.requester_payments, vec![3.0, 2.0]);
        // No competition for either worker: paid the requester's full value.
        assert_eq!(out.worker_payments, vec![10.0, 8.0]);
    }

    #[test]
    fn requester_riding_on_another_cover_pays_nothing() {
        // Task 1's only covering worker is w0, whom requester 0 buys first.
        let inst = fixtures::build(
            &[10.0, 1.0],
            &[(4.0, vec![0, 1])],
            &[vec![1.0, 1.0]],
            &[0.9, 0.9],
        );
        let out = run_melon(&inst);
        assert_eq!(out.winning_requesters, vec![0, 1]);
        assert_eq!(out.requester_payments[1], 0.0);
        // Requester 0: substitute r1 would win first with marginal -3 < 0, so
        // r0 needs a bid of 4 to clear her cover.
        assert_eq!(out.requester_payments[0], 4.0);
    }

    #[test]
    fn uncontested_workers_receive_requester_value() {
        // Two identical workers, either covers the single task.
        let inst = fixtures::build(
            &[10.0],
            &[(4.0, vec![0]), (4.0, vec![0])],
            &[vec![1.0], vec![1.0]],
            &[0.9],
        );
        // Cover admits w0 only (ties by id), so w1 is no competitor here.
        let out = run_melon(&inst);
        assert_eq!(out.winning_workers, vec![0]);
        assert_eq!(out.worker_payments[0], 10.0);

        // Two tasks sharing the cover: whoever's slice is cheaper wins first.
        let inst = fixtures::build(
            &[10.0, 10.0],
            &[(4.0, vec![0]), (4.0, vec![1])],
            &[vec![1.0, 0.5], vec![0.5, 1.0]],
            &[0.9, 0.9],
        );
        let out = run_melon(&inst);
        assert_eq!(out.winning_workers, vec![0, 1]);
        // Removing w0 from competition: r1 wins with marginal 6, then r0
        // (blocked) is alone: slack 10 - 0 = 10 after the loop.
        assert_eq!(out.worker_payments, vec![10.0, 10.0]);
    }

    #[test]
    fn worker_paid_own_bid_at_exact_tie() {
        // r1's marginal is exactly 0, so w1 cannot ask for more than her bid.
        let inst = fixtures::build(
            &[10.0, 4.0],
            &[(6.0, vec![0]), (4.0, vec![1])],
            &[vec![1.0, 0.5], vec![0.5, 1.0]],
            &[0.9, 0.9],
        );
        let out = run_melon(&inst);
        assert_eq!(out.winning_workers, vec![0, 1]);
        assert_eq!(out.worker_payments[1], 4.0);
    }

    #[test]
    fn empty_requester_set() {
        let rel = model::ReliabilityMatrix::new(vec![], &[]).unwrap();
        let inst = Instance::new(vec![], vec![], vec![], rel).unwrap();
        let out = run_melon(&inst);
        assert!(out.winning_requesters.is_empty());
        assert!(out.requester_payments.is_empty());
        assert_eq!(social_welfare(&out, &inst, Valuation::Bids), 0.0);
    }

    #[test]
    fn zero_seeded_mode_charges_nothing() {
        let inst = fixtures::single(10.0, 6.0);
        let cfg = AuctionConfig {
            pricing: PricingMode::ZeroSeeded,
            ..Default::default()
        };
        let out = Mechanism::Melon.run_with(&inst, &cfg);
        assert_eq!(out.requester_payments, vec![0.0]);
        assert_eq!(out.worker_payments, vec![10.0]);
    }

    #[test]
    fn sequential_and_parallel_pricing_agree() {
        let inst = fixtures::build(
            &[12.0, 10.0, 9.0],
            &[(6.0, vec![0, 1]), (1.0, vec![0]), (5.0, vec![1, 2]), (2.0, vec![2])],
            &[vec![0.9, 0.9, 0.5], vec![0.9, 0.5, 0.5], vec![0.5, 0.9, 0.9], vec![0.5, 0.5, 0.9]],
            &[(-0.5f64).exp(); 3],
        );
        let seq = Mechanism::Melon.run_with(
            &inst,
            &AuctionConfig {
                execution: Execution::Sequential,
                ..Default::default()
            },
        );
        assert_eq!(seq, run_melon(&inst));
    }
}
