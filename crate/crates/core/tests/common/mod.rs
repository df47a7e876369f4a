#![allow(dead_code)]

use crowdsense::model::Instance;
use crowdsense::sim::{generate_instance, rep_rng, InstanceRanges};
use rand::Rng;

/// Small random instance: `N ∈ [2, max_n]`, `M ∈ [1, max_m]`, compact ranges.
pub fn small_instance(seed: u64, max_n: usize, max_m: usize) -> Instance {
    let mut rng = rep_rng(seed, 0, 99);
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(1..=max_m);
    generate_instance(&InstanceRanges::compact(), n, m, &mut rng).expect("valid ranges")
}

/// Seeds whose instances have at least one winning requester.
pub fn contested_instances(count: usize, max_n: usize, max_m: usize) -> Vec<Instance> {
    (0u64..)
        .map(|s| small_instance(s, max_n, max_m))
        .filter(|inst| !crowdsense::auction::run_melon(inst).winning_requesters.is_empty())
        .take(count)
        .collect()
}
