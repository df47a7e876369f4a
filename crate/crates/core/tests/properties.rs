mod common;

use crowdsense::auction::cover::admission_order;
use crowdsense::auction::{feasible_cover, Mechanism};
use crowdsense::model::{
    exact, requester_utility, social_welfare, worker_utility, AuctionOutcome, Instance, Valuation, EPS_CMP,
};
use crowdsense::oracle::{critical_bid_sweep, solve_exact, Participant, SweepResult, REFINED_RESOLUTION};
use crowdsense::sim::{generate_instance, rep_rng, InstanceRanges};
use proptest::prelude::*;

fn instance(seed: u64) -> Instance {
    common::small_instance(seed, 8, 6)
}

fn requester_gain(inst: &Instance, out: &AuctionOutcome, j: usize) -> f64 {
    requester_utility(out, &inst.requesters()[j]).unwrap()
}

fn worker_gain(inst: &Instance, out: &AuctionOutcome, i: usize) -> f64 {
    worker_utility(out, &inst.workers()[i]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winners_stay_winners_when_bidding_more_aggressively(seed in any::<u64>(), factor in 1.0f64..3.0) {
        let inst = instance(seed);
        for mech in Mechanism::ALL {
            let sel = mech.select(&inst);
            for &j in &sel.winning_requesters {
                let bid = inst.requesters()[j].bid * factor;
                let again = mech.select(&inst.with_requester_bid(j, bid));
                prop_assert!(again.winning_requesters.contains(&j), "{mech:?} requester {j}");
            }
            for &i in &sel.winning_workers {
                let bid = inst.workers()[i].bid / factor;
                let again = mech.select(&inst.with_worker_bid(i, bid));
                prop_assert!(again.winning_workers.contains(&i), "{mech:?} worker {i}");
            }
        }
    }

    #[test]
    fn individually_rational_with_non_negative_welfare(seed in any::<u64>()) {
        let inst = instance(seed);
        for mech in Mechanism::ALL {
            let out = mech.run(&inst);
            out.check_consistency().unwrap();
            for j in 0..inst.n_tasks() {
                prop_assert!(requester_gain(&inst, &out, j) >= -EPS_CMP);
            }
            for i in 0..inst.n_workers() {
                prop_assert!(worker_gain(&inst, &out, i) >= -EPS_CMP);
            }
            prop_assert!(social_welfare(&out, &inst, Valuation::Bids) >= -EPS_CMP);
        }
    }

    #[test]
    fn no_profitable_unilateral_deviation(seed in any::<u64>(), who in any::<prop::sample::Index>(), scale in 0.0f64..3.0) {
        let inst = instance(seed);
        let n = inst.n_workers();
        let k = who.index(n + inst.n_tasks());
        for mech in Mechanism::ALL {
            let truthful = mech.run(&inst);
            if k < n {
                let lie = mech.run(&inst.with_worker_bid(k, inst.workers()[k].cost * scale));
                prop_assert!(worker_gain(&inst, &lie, k) <= worker_gain(&inst, &truthful, k) + EPS_CMP);
            } else {
                let j = k - n;
                let lie = mech.run(&inst.with_requester_bid(j, inst.requesters()[j].value * scale));
                prop_assert!(requester_gain(&inst, &lie, j) <= requester_gain(&inst, &truthful, j) + EPS_CMP);
            }
        }
    }

    #[test]
    fn accounting_identity_is_exact(seed in any::<u64>()) {
        let inst = instance(seed);
        for mech in Mechanism::ALL {
            let out = mech.run(&inst);
            let mut total = exact::platform_profit(&out);
            for r in inst.requesters() {
                total += exact::rational(requester_utility(&out, r).unwrap());
            }
            for w in inst.workers() {
                total += exact::rational(worker_utility(&out, w).unwrap());
            }
            let welfare = exact::social_welfare(&out, &inst, Valuation::True);
            let gap = exact::to_f64(&(total - welfare)).abs();
            // Utilities are f64 differences, so allow their rounding.
            prop_assert!(gap <= 1e-9, "{mech:?}: {gap}");
        }
    }

    #[test]
    fn oracle_dominates_every_mechanism(seed in any::<u64>()) {
        let inst = common::small_instance(seed, 10, 5);
        let opt = solve_exact(&inst, 20).unwrap();
        let covered = inst.covered_tasks(&opt.x);
        prop_assert_eq!(&covered, &opt.y);
        for mech in Mechanism::ALL {
            let w = social_welfare(&mech.run(&inst), &inst, Valuation::Bids);
            prop_assert!(w <= opt.welfare + EPS_CMP, "{mech:?}: {w} > {}", opt.welfare);
        }
    }

    #[test]
    fn worker_relabelling_permutes_the_outcome(seed in any::<u64>()) {
        let inst = instance(seed);
        let n = inst.n_workers();
        // Reverse worker ids.
        let perm: Vec<usize> = (0..n).rev().collect();
        let permuted = inst.restrict_workers(&perm).unwrap();
        for mech in Mechanism::ALL {
            let a = mech.run(&inst);
            let b = mech.run(&permuted);
            prop_assert_eq!(&a.winning_requesters, &b.winning_requesters);
            for (new, &old) in perm.iter().enumerate() {
                prop_assert_eq!(a.x[old], b.x[new]);
                prop_assert!((a.worker_payments[old] - b.worker_payments[new]).abs() <= 1e-9);
            }
            for j in 0..inst.n_tasks() {
                prop_assert!((a.requester_payments[j] - b.requester_payments[j]).abs() <= 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn payments_are_critical_bids(seed in any::<u64>()) {
        let inst = instance(seed);
        for mech in Mechanism::ALL {
            let out = mech.run(&inst);
            for &j in &out.winning_requesters {
                let sweep = critical_bid_sweep(mech, &inst, Participant::Requester(j), REFINED_RESOLUTION).unwrap();
                let SweepResult::Threshold(t) = sweep else { panic!("winner never wins") };
                prop_assert!((t - out.requester_payments[j]).abs() <= 1e-6, "{mech:?} r{j}: sweep {t}, paid {}", out.requester_payments[j]);
            }
            for &i in &out.winning_workers {
                let sweep = critical_bid_sweep(mech, &inst, Participant::Worker(i), REFINED_RESOLUTION).unwrap();
                let SweepResult::Threshold(t) = sweep else { panic!("winner never wins") };
                prop_assert!((t - out.worker_payments[i]).abs() <= 1e-6, "{mech:?} w{i}: sweep {t}, paid {}", out.worker_payments[i]);
            }
        }
    }
}

/// The greedy cover is the shortest admission-order prefix that meets every
/// coverable task's demand.
#[test]
fn feasible_cover_is_minimal_prefix() {
    for seed in 0..200 {
        let mut rng = rep_rng(seed, 0, 7);
        let inst = generate_instance(&InstanceRanges::compact(), 10, 4, &mut rng).unwrap();
        let order = admission_order(&inst);
        let cover = feasible_cover(&inst);
        let coverable: Vec<usize> = cover.coverable_tasks().collect();
        let meets = |len: usize| {
            let mut x = vec![false; inst.n_workers()];
            for &i in &order[..len] {
                x[i] = true;
            }
            let y = inst.covered_tasks(&x);
            coverable.iter().all(|&j| y[j])
        };
        let shortest = (0..=order.len()).find(|&l| meets(l)).unwrap();
        assert_eq!(cover.members(), &order[..shortest], "seed {seed}");
    }
}

#[test]
fn selected_tasks_meet_their_demand() {
    for seed in 0..300 {
        let inst = instance(seed);
        for mech in Mechanism::ALL {
            let out = mech.run(&inst);
            for &j in &out.winning_requesters {
                let cov = inst.coverage(j, out.winning_workers.iter().copied());
                assert!(inst.meets_demand(j, cov), "{mech:?} seed {seed} task {j}");
            }
        }
    }
}
