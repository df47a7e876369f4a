//! Greedy winner selection over a fixed cover.
//!
//! Each round picks the remaining requester with the largest marginal
//! welfare `a_j - Σ_{w ∈ C_j} b_w` (ties to the lower index) while that
//! maximum is non-negative. In [`Reslicing::Dynamic`] mode the newly won
//! workers are struck from every other `C_j`, so later requesters no longer
//! pay for them; [`Reslicing::Static`] keeps the original slices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::cover::FeasibleCover;
use crate::model::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reslicing {
    Dynamic,
    Static,
}

/// Who sits out a pricing rerun.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Exclusion {
    None,
    /// The requester cannot be selected; her residual slice is still tracked.
    Requester(usize),
    /// The worker bids `+∞`: every requester whose slice holds her is blocked.
    Worker(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub requester: usize,
    pub marginal: f64,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    marginal: f64,
    requester: usize,
    version: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Max-heap: larger marginal first, then smaller requester index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.marginal
            .total_cmp(&other.marginal)
            .then_with(|| other.requester.cmp(&self.requester))
            .then_with(|| self.version.cmp(&other.version))
    }
}

/// Incremental state of one selection run.
pub(crate) struct Selector<'a> {
    instance: &'a Instance,
    cover: &'a FeasibleCover,
    reslicing: Reslicing,
    eligible: Vec<bool>,
    remaining: Vec<bool>,
    cost: Vec<f64>,
    selected_worker: Vec<bool>,
    version: Vec<u32>,
    heap: BinaryHeap<Entry>,
}

impl<'a> Selector<'a> {
    pub(crate) fn new(
        instance: &'a Instance,
        cover: &'a FeasibleCover,
        reslicing: Reslicing,
        exclusion: Exclusion,
    ) -> Self {
        let m = instance.n_tasks();
        let workers = instance.workers();
        let cost: Vec<f64> = (0..m)
            .map(|j| cover.slice(j).iter().map(|&i| workers[i].bid).sum())
            .collect();
        let eligible: Vec<bool> = (0..m)
            .map(|j| {
                cover.is_coverable(j)
                    && match exclusion {
                        Exclusion::None => true,
                        Exclusion::Requester(r) => r != j,
                        Exclusion::Worker(w) => cover.slice(j).binary_search(&w).is_err(),
                    }
            })
            .collect();
        let mut heap = BinaryHeap::with_capacity(m);
        for j in 0..m {
            if eligible[j] {
                heap.push(Entry {
                    marginal: instance.requesters()[j].bid - cost[j],
                    requester: j,
                    version: 0,
                });
            }
        }
        Selector {
            instance,
            cover,
            reslicing,
            eligible,
            remaining: vec![true; m],
            cost,
            selected_worker: vec![false; instance.n_workers()],
            version: vec![0; m],
            heap,
        }
    }

    /// The requester the next round would select, if the loop continues.
    pub(crate) fn next_step(&mut self) -> Option<Step> {
        while let Some(top) = self.heap.peek() {
            let j = top.requester;
            if !self.remaining[j] || top.version != self.version[j] {
                self.heap.pop();
                continue;
            }
            return (top.marginal >= 0.0).then_some(Step {
                requester: j,
                marginal: top.marginal,
            });
        }
        None
    }

    /// Selects requester `j` and the still-unselected workers of her slice.
    /// Returns the newly selected workers.
    pub(crate) fn commit(&mut self, j: usize) -> Vec<usize> {
        self.remaining[j] = false;
        let workers = self.instance.workers();
        let fresh: Vec<usize> = self
            .cover
            .slice(j)
            .iter()
            .copied()
            .filter(|&w| !self.selected_worker[w])
            .collect();
        for &w in &fresh {
            self.selected_worker[w] = true;
            if self.reslicing == Reslicing::Static {
                continue;
            }
            let bid = workers[w].bid;
            for &t in &workers[w].interested {
                if !self.remaining[t] {
                    continue;
                }
                self.cost[t] -= bid;
                self.version[t] += 1;
                if self.eligible[t] {
                    self.heap.push(Entry {
                        marginal: self.instance.requesters()[t].bid - self.cost[t],
                        requester: t,
                        version: self.version[t],
                    });
                }
            }
        }
        fresh
    }

    /// Residual cover cost `Σ_{w ∈ C_j} b_w` of requester `j`.
    pub(crate) fn cost(&self, j: usize) -> f64 {
        self.cost[j]
    }

    pub(crate) fn is_remaining(&self, j: usize) -> bool {
        self.remaining[j]
    }

    /// Current `C_j`.
    pub(crate) fn residual(&self, j: usize) -> Vec<usize> {
        match self.reslicing {
            Reslicing::Static => self.cover.slice(j).to_vec(),
            Reslicing::Dynamic => self
                .cover
                .slice(j)
                .iter()
                .copied()
                .filter(|&w| !self.selected_worker[w])
                .collect(),
        }
    }
}

/// Winners of a selection run.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Requesters in the order they were selected.
    pub order: Vec<usize>,
    /// Marginal welfare recorded at each selection.
    pub marginals: Vec<f64>,
    /// Sorted ascending.
    pub winning_requesters: Vec<usize>,
    /// Sorted ascending.
    pub winning_workers: Vec<usize>,
}

impl Selection {
    /// Sum of the recorded marginals. Under dynamic re-slicing this is the
    /// bid-based welfare of the selection; static slices double-count
    /// shared workers.
    pub fn marginal_sum(&self) -> f64 {
        self.marginals.iter().sum()
    }
}

/// One round of the main loop with the slices as they stood before it.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub requester: usize,
    pub marginal: f64,
    /// `C_1, …, C_M` immediately before this selection.
    pub slices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SelectionTrace {
    pub steps: Vec<TraceStep>,
}

pub(crate) fn run_selection(
    instance: &Instance,
    cover: &FeasibleCover,
    reslicing: Reslicing,
    mut trace: Option<&mut SelectionTrace>,
) -> Selection {
    let mut sel = Selector::new(instance, cover, reslicing, Exclusion::None);
    let mut order = Vec::new();
    let mut marginals = Vec::new();
    let mut workers = Vec::new();
    while let Some(step) = sel.next_step() {
        if let Some(t) = trace.as_deref_mut() {
            t.steps.push(TraceStep {
                requester: step.requester,
                marginal: step.marginal,
                slices: (0..instance.n_tasks()).map(|j| sel.residual(j)).collect(),
            });
        }
        workers.extend(sel.commit(step.requester));
        order.push(step.requester);
        marginals.push(step.marginal);
    }
    let mut winning_requesters = order.clone();
    winning_requesters.sort_unstable();
    workers.sort_unstable();
    Selection {
        order,
        marginals,
        winning_requesters,
        winning_workers: workers,
    }
}

/// Winner selection with dynamic re-slicing, returning the per-round trace.
pub fn select_winners(instance: &Instance, cover: &FeasibleCover) -> (Selection, SelectionTrace) {
    let mut trace = SelectionTrace::default();
    let sel = run_selection(instance, cover, Reslicing::Dynamic, Some(&mut trace));
    (sel, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::cover::feasible_cover;
    use crate::model::fixtures;

    #[test]
    fn single_affordable_requester() {
        let inst = fixtures::build(&[10.0], &[(2.0, vec![0]), (4.0, vec![0])], &[vec![1.0], vec![1.0]], &[0.5]);
        let cover = feasible_cover(&inst);
        assert_eq!(cover.members().len(), 2);
        let (sel, trace) = select_winners(&inst, &cover);
        assert_eq!(sel.winning_requesters, vec![0]);
        assert_eq!(sel.winning_workers, vec![0, 1]);
        assert_eq!(sel.marginal_sum(), 4.0);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].slices[0], vec![0, 1]);
    }

    #[test]
    fn unaffordable_requester_never_selected() {
        let inst = fixtures::single(5.0, 9.0);
        let (sel, trace) = select_winners(&inst, &feasible_cover(&inst));
        assert!(sel.winning_requesters.is_empty());
        assert_eq!(sel.marginal_sum(), 0.0);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn shared_worker_drops_out_of_later_costs() {
        // w0 is shared by both tasks. Requester 1 alone would pay 6 + 5 > 10.
        let inst = fixtures::build(
            &[12.0, 10.0],
            &[(6.0, vec![0, 1]), (1.0, vec![0]), (5.0, vec![1])],
            &[vec![0.9, 0.9], vec![0.9, 0.5], vec![0.5, 0.9]],
            &[(-0.5f64).exp(), (-0.5f64).exp()],
        );
        let cover = feasible_cover(&inst);
        let (sel, trace) = select_winners(&inst, &cover);
        assert_eq!(sel.order, vec![0, 1]);
        assert_eq!(sel.marginals, vec![5.0, 5.0]);
        assert_eq!(trace.steps[1].slices[1], vec![2]);
        let (stat, _) = {
            let s = run_selection(&inst, &cover, Reslicing::Static, None);
            (s, ())
        };
        assert_eq!(stat.order, vec![0]);
    }

    #[test]
    fn ties_break_to_lower_index() {
        let inst = fixtures::build(
            &[10.0, 10.0],
            &[(3.0, vec![1]), (3.0, vec![0])],
            &[vec![0.5, 1.0], vec![1.0, 0.5]],
            &[0.9, 0.9],
        );
        let (sel, _) = select_winners(&inst, &feasible_cover(&inst));
        assert_eq!(sel.order, vec![0, 1]);
    }
}
