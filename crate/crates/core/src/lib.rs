//! Multi-requester double auctions for crowdsensing with reliability-weighted
//! label aggregation.
//!
//! Requesters bid for one binary-labelling task each, workers bid to label a
//! set of tasks. The auction picks a bid-independent feasible cover of
//! workers, selects requesters greedily by marginal welfare and settles with
//! critical-value payments. Working labels are then merged by a weighted
//! majority vote whose error is bounded by each task's accuracy target.

pub mod aggregation;
pub mod auction;
pub mod baselines;
pub mod error;
pub mod hardness;
pub mod io;
pub mod model;
pub mod oracle;
pub mod par;
pub mod sim;

pub use error::{Error, Result};
