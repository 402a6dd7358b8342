//! Compute placement that minimizes total data-movement energy.
//!
//! Data objects sit at fixed positions; compute kernels declare how
//! many bits they exchange with each object per run. Placing kernel
//! `k` at position `x` costs
//!
//! ```text
//! E_k(x) = sum over objects o of  alpha * N_{k,o} * |x - pos_o|^beta
//! ```
//!
//! joules per run, and the problem objective is the sum over kernels.
//! Kernels do not exchange traffic with each other, so the objective
//! decouples and each kernel is optimized independently; with
//! `beta > 1` each per-kernel term is convex, which is what makes the
//! projected gradient descent in [`optimize_continuous`] globally
//! convergent. [`optimize_discrete`] instead assigns kernels to
//! capacity-one slots, exhaustively at desk scale and by greedy
//! insertion plus swap-based local search above it.
//!
//! Distances are clamped below at the same singularity guard the
//! gravity field uses, so a kernel sitting exactly on its data costs
//! the clamped floor instead of zero and the gradient stays finite for
//! any `beta` in range.

mod continuous;
mod discrete;

pub use continuous::optimize_continuous;
pub use discrete::optimize_discrete;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::energy::TechProfile;
use crate::geom::{AxisBox, Vec3};
use crate::gravity::{DataObject, DEFAULT_EPSILON_DISTANCE};
use crate::{Error, Result};

/// A movable unit of computation and its per-run traffic demands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeKernel {
    id: String,
    traffic: BTreeMap<String, f64>,
    position: Option<Vec3>,
}

impl ComputeKernel {
    /// `traffic` maps data-object ids to bits moved per run; entries
    /// must be finite and nonnegative.
    pub fn new(id: impl Into<String>, traffic: BTreeMap<String, f64>) -> Result<Self> {
        for (_, &bits) in &traffic {
            if !(bits.is_finite() && bits >= 0.0) {
                return Err(Error::domain("traffic", bits, ">= 0 bits"));
            }
        }
        Ok(ComputeKernel {
            id: id.into(),
            traffic,
            position: None,
        })
    }

    /// Provide a starting position for the continuous optimizer.
    pub fn with_position(mut self, position: Vec3) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::Domain {
                name: "position",
                value: f64::NAN,
                constraint: "finite components",
            });
        }
        self.position = Some(position);
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn traffic(&self) -> &BTreeMap<String, f64> {
        &self.traffic
    }

    pub fn position(&self) -> Option<Vec3> {
        self.position
    }

    /// Total bits this kernel moves per run, over all objects.
    pub fn total_traffic(&self) -> f64 {
        self.traffic.values().sum()
    }
}

/// A placement instance: fixed objects, movable kernels, the energy
/// coefficients, the legal region, and optionally discrete slots.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementProblem {
    objects: Vec<DataObject>,
    kernels: Vec<ComputeKernel>,
    profile: TechProfile,
    region: AxisBox,
    slots: Vec<Vec3>,
    epsilon: f64,
    /// Bits per run, indexed `[kernel][object]`.
    traffic: Vec<Vec<f64>>,
}

impl PlacementProblem {
    /// Object and kernel ids must be unique, and every traffic entry
    /// must name a known object. Objects may sit outside the region;
    /// they are infrastructure, not decision variables.
    pub fn new(
        objects: Vec<DataObject>,
        kernels: Vec<ComputeKernel>,
        profile: TechProfile,
        region: AxisBox,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, obj) in objects.iter().enumerate() {
            if index.insert(obj.id().to_string(), i).is_some() {
                return Err(Error::Duplicate {
                    kind: "object",
                    id: obj.id().to_string(),
                });
            }
        }
        let mut kernel_ids = BTreeSet::new();
        let mut traffic = Vec::with_capacity(kernels.len());
        for kernel in &kernels {
            if !kernel_ids.insert(kernel.id().to_string()) {
                return Err(Error::Duplicate {
                    kind: "kernel",
                    id: kernel.id().to_string(),
                });
            }
            let mut row = vec![0.0; objects.len()];
            for (object_id, &bits) in kernel.traffic() {
                match index.get(object_id) {
                    Some(&i) => row[i] = bits,
                    None => {
                        return Err(Error::UnknownTrafficTarget {
                            kernel: kernel.id().to_string(),
                            object: object_id.clone(),
                        })
                    }
                }
            }
            traffic.push(row);
        }
        Ok(PlacementProblem {
            objects,
            kernels,
            profile,
            region,
            slots: Vec::new(),
            epsilon: DEFAULT_EPSILON_DISTANCE,
            traffic,
        })
    }

    /// Add capacity-one slot positions; each must lie inside the region.
    pub fn with_slots(mut self, slots: Vec<Vec3>) -> Result<Self> {
        for (i, &slot) in slots.iter().enumerate() {
            if !slot.is_finite() || !self.region.contains(slot) {
                return Err(Error::DegenerateRegion {
                    reason: format!("slot {i} lies outside the region"),
                });
            }
        }
        self.slots = slots;
        Ok(self)
    }

    /// Override the distance clamp shared with the gravity field.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::domain("epsilon", epsilon, "> 0"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn objects(&self) -> &[DataObject] {
        &self.objects
    }

    pub fn kernels(&self) -> &[ComputeKernel] {
        &self.kernels
    }

    pub fn profile(&self) -> &TechProfile {
        &self.profile
    }

    pub fn region(&self) -> &AxisBox {
        &self.region
    }

    pub fn slots(&self) -> &[Vec3] {
        &self.slots
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Bits kernel `k` exchanges with object `o` per run.
    pub fn traffic_bits(&self, kernel: usize, object: usize) -> f64 {
        self.traffic[kernel][object]
    }
}

/// Movement energy of one kernel at one candidate position, in joules.
pub(crate) fn kernel_energy(problem: &PlacementProblem, kernel: usize, pos: Vec3) -> f64 {
    let alpha = problem.profile.alpha();
    let beta = problem.profile.beta();
    let mut energy = 0.0;
    for (o, obj) in problem.objects.iter().enumerate() {
        let bits = problem.traffic[kernel][o];
        if bits == 0.0 {
            continue;
        }
        let d = pos.distance(obj.position()).max(problem.epsilon);
        energy += alpha * bits * d.powf(beta);
    }
    energy
}

/// Gradient of [`kernel_energy`] with respect to the kernel position.
///
/// Inside the clamp radius the energy is constant, so that object's
/// contribution is zero there.
pub(crate) fn kernel_gradient(problem: &PlacementProblem, kernel: usize, pos: Vec3) -> Vec3 {
    let alpha = problem.profile.alpha();
    let beta = problem.profile.beta();
    let mut grad = Vec3::ZERO;
    for (o, obj) in problem.objects.iter().enumerate() {
        let bits = problem.traffic[kernel][o];
        if bits == 0.0 {
            continue;
        }
        let delta = pos - obj.position();
        let d = delta.norm();
        if d <= problem.epsilon {
            continue;
        }
        grad += delta.scale(alpha * bits * beta * d.powf(beta - 2.0));
    }
    grad
}

fn check_positions(problem: &PlacementProblem, positions: &[Vec3]) -> Result<()> {
    if positions.len() != problem.kernels.len() {
        return Err(Error::MalformedRange {
            name: "positions",
            reason: format!(
                "{} positions for {} kernels",
                positions.len(),
                problem.kernels.len()
            ),
        });
    }
    if positions.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain {
            name: "positions",
            value: f64::NAN,
            constraint: "finite components",
        });
    }
    Ok(())
}

/// Total movement energy of the candidate placement, in joules.
pub fn objective_energy(problem: &PlacementProblem, positions: &[Vec3]) -> Result<f64> {
    check_positions(problem, positions)?;
    Ok(positions
        .iter()
        .enumerate()
        .map(|(k, &p)| kernel_energy(problem, k, p))
        .sum())
}

/// Per-kernel gradient of [`objective_energy`].
pub fn objective_gradient(problem: &PlacementProblem, positions: &[Vec3]) -> Result<Vec<Vec3>> {
    check_positions(problem, positions)?;
    Ok(positions
        .iter()
        .enumerate()
        .map(|(k, &p)| kernel_gradient(problem, k, p))
        .collect())
}

/// Where one kernel ended up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlacementStatus {
    /// Continuous optimum inside the region.
    Placed { position: Vec3 },
    /// Discrete assignment to a slot.
    Assigned { slot: usize, position: Vec3 },
    /// The kernel moved no traffic, so no position is better than any
    /// other; it was left out rather than pinned arbitrarily.
    Unplaced,
}

impl PlacementStatus {
    pub fn position(&self) -> Option<Vec3> {
        match *self {
            PlacementStatus::Placed { position } => Some(position),
            PlacementStatus::Assigned { position, .. } => Some(position),
            PlacementStatus::Unplaced => None,
        }
    }
}

/// Per-kernel outcome: status, the kernel's own movement energy at its
/// final position, and the optimizer iterations it consumed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelPlacement {
    pub kernel: String,
    pub status: PlacementStatus,
    pub energy: f64,
    pub iterations: usize,
}

/// Accepted positions of one kernel's descent, with the objective
/// value after each step. The first entry is the starting point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTrace {
    pub kernel: String,
    pub path: Vec<Vec3>,
    pub objective: Vec<f64>,
}

/// Solver output: per-kernel placements and run-level accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementSolution {
    pub placements: Vec<KernelPlacement>,
    /// Total movement energy at the reported positions, joules.
    pub objective: f64,
    /// Largest per-kernel iteration count (continuous) or evaluated
    /// candidate count (discrete).
    pub iterations: usize,
    pub converged: bool,
    /// Seed used for randomized starting positions, when one was set.
    pub seed: Option<u64>,
    /// Descent paths, recorded only when the config asks for them.
    pub trace: Option<Vec<KernelTrace>>,
}

/// Which discrete search to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiscreteStrategy {
    /// Exhaustive up to 8 kernels and 12 slots, greedy plus swaps above.
    Auto,
    /// Force exhaustive enumeration regardless of size.
    Exhaustive,
    /// Force greedy insertion plus swap local search.
    GreedySwap,
}

/// Solver knobs. The defaults converge tightly at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlacementConfig {
    /// Iteration cap per kernel for the continuous solver.
    pub max_iters: usize,
    /// Gradient convergence threshold, relative to each kernel's own
    /// gradient scale `alpha * traffic * beta * diagonal^(beta-1)`.
    pub grad_tol_scale: f64,
    /// Convergence threshold on position change, meters.
    pub step_tol: f64,
    /// Record per-kernel descent paths in the solution.
    pub record_trace: bool,
    /// Randomize continuous starting positions inside the region.
    pub seed: Option<u64>,
    pub discrete_strategy: DiscreteStrategy,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        PlacementConfig {
            max_iters: 1000,
            grad_tol_scale: 1e-9,
            step_tol: 1e-12,
            record_trace: false,
            seed: None,
            discrete_strategy: DiscreteStrategy::Auto,
        }
    }
}
