//! Exact rational accounting for oracle cross-checks.
//!
//! Every finite `f64` is a dyadic rational, so conversion is lossless and
//! sums computed here carry no rounding error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{AuctionOutcome, Instance, Valuation};

/// Lossless conversion of a finite float.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest float to an exact rational.
pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// `Σ gains[j] y_j - Σ costs[i] x_i`.
pub fn welfare(gains: &[BigRational], costs: &[BigRational], x: &[bool], y: &[bool]) -> BigRational {
    let mut total = BigRational::zero();
    for (g, _) in gains.iter().zip(y).filter(|(_, &y)| y) {
        total += g;
    }
    for (c, _) in costs.iter().zip(x).filter(|(_, &x)| x) {
        total -= c;
    }
    total
}

pub fn social_welfare(outcome: &AuctionOutcome, instance: &Instance, valuation: Valuation) -> BigRational {
    let (gains, costs): (Vec<_>, Vec<_>) = match valuation {
        Valuation::True => (
            instance.requesters().iter().map(|r| rational(r.value)).collect(),
            instance.workers().iter().map(|w| rational(w.cost)).collect(),
        ),
        Valuation::Bids => (
            instance.requesters().iter().map(|r| rational(r.bid)).collect(),
            instance.workers().iter().map(|w| rational(w.bid)).collect(),
        ),
    };
    welfare(&gains, &costs, &outcome.x, &outcome.y)
}

pub fn platform_profit(outcome: &AuctionOutcome) -> BigRational {
    let mut total = BigRational::zero();
    for &j in &outcome.winning_requesters {
        total += rational(outcome.requester_payments[j]);
    }
    for &i in &outcome.winning_workers {
        total -= rational(outcome.worker_payments[i]);
    }
    total
}

/// Sum of all utilities: platform profit plus every participant's utility.
pub fn total_utility(outcome: &AuctionOutcome, instance: &Instance) -> BigRational {
    let mut total = platform_profit(outcome);
    for &j in &outcome.winning_requesters {
        total += rational(instance.requesters()[j].value) - rational(outcome.requester_payments[j]);
    }
    for &i in &outcome.winning_workers {
        total += rational(outcome.worker_payments[i]) - rational(instance.workers()[i].cost);
    }
    total
}

pub fn is_negative(x: &BigRational) -> bool {
    x.is_negative()
}
