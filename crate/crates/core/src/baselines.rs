//! Baseline double auctions sharing the critical-value pricing.

use crate::auction::Mechanism;
use crate::model::{AuctionOutcome, Instance};

/// Requesters ranked once by `a_j - Σ_{C_j} b`, slices never shrink.
pub fn run_msw_greedy(instance: &Instance) -> AuctionOutcome {
    Mechanism::MswGreedy.run(instance)
}

/// The entire worker set serves as the cover.
pub fn run_air(instance: &Instance) -> AuctionOutcome {
    Mechanism::Air.run(instance)
}
