//! Assignment of kernels to capacity-one slots.
//!
//! With the cost of kernel `k` in slot `s` precomputed, small
//! instances are solved exactly by depth-first enumeration with cost
//! pruning; larger ones fall back to greedy insertion in descending
//! traffic order followed by a best-improvement local search over
//! pairwise swaps and moves into free slots. Both searches break ties
//! toward the lowest kernel and slot indices, so repeated runs of the
//! same instance produce byte-identical assignments.

use crate::{Error, Result};

use super::{
    kernel_energy, DiscreteStrategy, KernelPlacement, PlacementConfig, PlacementProblem,
    PlacementSolution, PlacementStatus,
};

/// Exhaustive search is the default up to this many kernels.
const EXHAUSTIVE_KERNELS: usize = 8;
/// Exhaustive search is the default up to this many slots.
const EXHAUSTIVE_SLOTS: usize = 12;
/// Safety cap on local-search improvement rounds.
const MAX_ROUNDS: usize = 10_000;

/// Assign each kernel to a distinct slot, minimizing total movement
/// energy.
///
/// Instances with at most [`EXHAUSTIVE_KERNELS`] kernels and
/// [`EXHAUSTIVE_SLOTS`] slots are enumerated exhaustively and return
/// the global optimum; larger instances use greedy insertion plus swap
/// local search, which reaches a local optimum. The `iterations` field
/// counts complete assignments evaluated (exhaustive) or improvement
/// rounds applied (greedy).
pub fn optimize_discrete(
    problem: &PlacementProblem,
    config: &PlacementConfig,
) -> Result<PlacementSolution> {
    let n_kernels = problem.kernels().len();
    let n_slots = problem.slots().len();
    if n_slots < n_kernels {
        return Err(Error::Infeasible {
            kernels: n_kernels,
            slots: n_slots,
        });
    }

    let cost: Vec<Vec<f64>> = (0..n_kernels)
        .map(|k| {
            problem
                .slots()
                .iter()
                .map(|&slot| kernel_energy(problem, k, slot))
                .collect()
        })
        .collect();

    let exhaustive = match config.discrete_strategy {
        DiscreteStrategy::Auto => {
            n_kernels <= EXHAUSTIVE_KERNELS && n_slots <= EXHAUSTIVE_SLOTS
        }
        DiscreteStrategy::Exhaustive => true,
        DiscreteStrategy::GreedySwap => false,
    };

    let outcome = if n_kernels == 0 {
        Outcome {
            slot_of: Vec::new(),
            iterations: 0,
            converged: true,
        }
    } else if exhaustive {
        exhaustive_search(&cost, n_slots)
    } else {
        greedy_with_swaps(problem, &cost, n_slots)
    };

    let mut objective = 0.0;
    let placements = (0..n_kernels)
        .map(|k| {
            let slot = outcome.slot_of[k];
            let energy = cost[k][slot];
            objective += energy;
            KernelPlacement {
                kernel: problem.kernels()[k].id().to_string(),
                status: PlacementStatus::Assigned {
                    slot,
                    position: problem.slots()[slot],
                },
                energy,
                iterations: 0,
            }
        })
        .collect();

    Ok(PlacementSolution {
        placements,
        objective,
        iterations: outcome.iterations,
        converged: outcome.converged,
        seed: config.seed,
        trace: None,
    })
}

struct Outcome {
    slot_of: Vec<usize>,
    iterations: usize,
    converged: bool,
}

/// Depth-first enumeration over injective assignments in lexicographic
/// slot order, pruning branches whose partial cost already matches or
/// exceeds the incumbent. Only strictly better complete assignments
/// replace the incumbent, so the lexicographically first optimum wins
/// ties.
fn exhaustive_search(cost: &[Vec<f64>], n_slots: usize) -> Outcome {
    struct Search<'a> {
        cost: &'a [Vec<f64>],
        used: Vec<bool>,
        current: Vec<usize>,
        best: Vec<usize>,
        best_cost: f64,
        evaluated: usize,
    }

    impl Search<'_> {
        fn dfs(&mut self, kernel: usize, partial: f64) {
            if kernel == self.cost.len() {
                self.evaluated += 1;
                if partial < self.best_cost {
                    self.best_cost = partial;
                    self.best = self.current.clone();
                }
                return;
            }
            for slot in 0..self.used.len() {
                if self.used[slot] {
                    continue;
                }
                let next = partial + self.cost[kernel][slot];
                if next >= self.best_cost {
                    continue;
                }
                self.used[slot] = true;
                self.current.push(slot);
                self.dfs(kernel + 1, next);
                self.current.pop();
                self.used[slot] = false;
            }
        }
    }

    let mut search = Search {
        cost,
        used: vec![false; n_slots],
        current: Vec::with_capacity(cost.len()),
        best: Vec::new(),
        best_cost: f64::INFINITY,
        evaluated: 0,
    };
    search.dfs(0, 0.0);
    Outcome {
        slot_of: search.best,
        iterations: search.evaluated,
        converged: true,
    }
}

/// Greedy insertion in descending total-traffic order, then repeated
/// best-improvement moves: either swapping two kernels' slots or
/// relocating one kernel to a free slot. Stops at a local optimum.
fn greedy_with_swaps(problem: &PlacementProblem, cost: &[Vec<f64>], n_slots: usize) -> Outcome {
    let n_kernels = cost.len();
    let mut order: Vec<usize> = (0..n_kernels).collect();
    order.sort_by(|&a, &b| {
        let ta = problem.kernels()[a].total_traffic();
        let tb = problem.kernels()[b].total_traffic();
        tb.partial_cmp(&ta).unwrap().then(a.cmp(&b))
    });

    let mut slot_of = vec![usize::MAX; n_kernels];
    let mut used = vec![false; n_slots];
    for &k in &order {
        let mut chosen = None;
        for s in 0..n_slots {
            if used[s] {
                continue;
            }
            if chosen.map_or(true, |c: usize| cost[k][s] < cost[k][c]) {
                chosen = Some(s);
            }
        }
        let s = chosen.expect("feasibility was checked up front");
        slot_of[k] = s;
        used[s] = true;
    }

    enum Move {
        Relocate { kernel: usize, to: usize },
        Swap { a: usize, b: usize },
    }

    let mut rounds = 1;
    let mut converged = true;
    loop {
        let mut best_delta = 0.0;
        let mut best_move = None;
        for k in 0..n_kernels {
            for s in 0..n_slots {
                if used[s] {
                    continue;
                }
                let delta = cost[k][s] - cost[k][slot_of[k]];
                if delta < best_delta {
                    best_delta = delta;
                    best_move = Some(Move::Relocate { kernel: k, to: s });
                }
            }
        }
        for a in 0..n_kernels {
            for b in (a + 1)..n_kernels {
                let (sa, sb) = (slot_of[a], slot_of[b]);
                let delta = cost[a][sb] + cost[b][sa] - cost[a][sa] - cost[b][sb];
                if delta < best_delta {
                    best_delta = delta;
                    best_move = Some(Move::Swap { a, b });
                }
            }
        }
        match best_move {
            None => break,
            Some(Move::Relocate { kernel, to }) => {
                used[slot_of[kernel]] = false;
                used[to] = true;
                slot_of[kernel] = to;
            }
            Some(Move::Swap { a, b }) => slot_of.swap(a, b),
        }
        rounds += 1;
        if rounds >= MAX_ROUNDS {
            converged = false;
            break;
        }
    }

    Outcome {
        slot_of,
        iterations: rounds,
        converged,
    }
}
