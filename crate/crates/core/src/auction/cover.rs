use crate::model::Instance;

/// A worker subset that meets the coverage demand of every coverable task,
/// together with the per-task slices `C_j = {w ∈ C : τ_j ∈ Γ_w}`.
///
/// Tasks that not even the whole worker pool can cover are flagged and never
/// take part in winner selection.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibleCover {
    members: Vec<usize>,
    in_cover: Vec<bool>,
    slices: Vec<Vec<usize>>,
    coverable: Vec<bool>,
}

impl FeasibleCover {
    fn build(instance: &Instance, members: Vec<usize>, coverable: Vec<bool>) -> Self {
        let mut in_cover = vec![false; instance.n_workers()];
        for &i in &members {
            in_cover[i] = true;
        }
        let mut slices = vec![Vec::new(); instance.n_tasks()];
        for (i, w) in instance.workers().iter().enumerate() {
            if in_cover[i] {
                for &j in &w.interested {
                    slices[j].push(i);
                }
            }
        }
        FeasibleCover {
            members,
            in_cover,
            slices,
            coverable,
        }
    }

    /// Cover members in admission order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, worker: usize) -> bool {
        self.in_cover[worker]
    }

    /// `C_j`, ascending worker ids.
    pub fn slice(&self, task: usize) -> &[usize] {
        &self.slices[task]
    }

    pub fn is_coverable(&self, task: usize) -> bool {
        self.coverable[task]
    }

    pub fn coverable_tasks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.coverable.len()).filter(|&j| self.coverable[j])
    }

    pub fn n_tasks(&self) -> usize {
        self.coverable.len()
    }
}

/// Tasks whose demand the full worker set can meet.
pub fn coverable_tasks(instance: &Instance) -> Vec<bool> {
    instance.covered_tasks(&vec![true; instance.n_workers()])
}

/// Workers by decreasing `Σ_{j ∈ Γ_i} q_{i,j}`, ties by ascending id.
pub fn admission_order(instance: &Instance) -> Vec<usize> {
    let rel = instance.reliability();
    let scores: Vec<f64> = instance
        .workers()
        .iter()
        .map(|w| w.interested.iter().map(|&j| rel.q(w.id, j)).sum())
        .collect();
    let mut order: Vec<usize> = (0..instance.n_workers()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Greedy cover: admit workers in [`admission_order`] until every coverable
/// task's demand is met. Depends on `Γ`, `q` and `Q` only, never on bids.
pub fn feasible_cover(instance: &Instance) -> FeasibleCover {
    let coverable = coverable_tasks(instance);
    let rel = instance.reliability();
    let mut coverage = vec![0.0; instance.n_tasks()];
    let mut unmet = coverable.iter().filter(|&&c| c).count();
    let mut members = Vec::new();
    for i in admission_order(instance) {
        if unmet == 0 {
            break;
        }
        members.push(i);
        for &j in &instance.workers()[i].interested {
            if !coverable[j] {
                continue;
            }
            let was_met = instance.meets_demand(j, coverage[j]);
            coverage[j] += rel.q(i, j);
            if !was_met && instance.meets_demand(j, coverage[j]) {
                unmet -= 1;
            }
        }
    }
    FeasibleCover::build(instance, members, coverable)
}

/// The entire worker set as cover, with every interested worker in each slice.
pub fn whole_worker_set(instance: &Instance) -> FeasibleCover {
    let coverable = coverable_tasks(instance);
    FeasibleCover::build(instance, (0..instance.n_workers()).collect(), coverable)
}
