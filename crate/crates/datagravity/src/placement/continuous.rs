//! Projected gradient descent over the placement region.
//!
//! Each kernel's energy is convex in its position for `beta > 1`, so a
//! monotone descent with backtracking line search reaches the global
//! per-kernel optimum; the box constraint is handled by projection.
//! Steps are lengths in meters: the search starts each iteration at a
//! remembered step, halves until the candidate strictly improves, and
//! declares convergence when either the gradient norm falls below its
//! relative tolerance or no move longer than the step tolerance
//! improves the objective.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Vec3;
use crate::Result;

use super::{
    kernel_energy, kernel_gradient, KernelPlacement, KernelTrace, PlacementConfig,
    PlacementProblem, PlacementSolution, PlacementStatus,
};

/// Optimize every kernel's position inside the region.
///
/// Kernels with no traffic are reported [`PlacementStatus::Unplaced`]
/// and excluded from the objective; every position is equally good for
/// them, and inventing one would only mislead downstream tooling.
/// Starting points are taken from, in order of preference: the seeded
/// uniform draw when `config.seed` is set, the kernel's own position
/// when given, and otherwise the kernel's traffic-weighted centroid of
/// its objects. The reported objective never exceeds the objective at
/// the starting points, because only strictly improving steps are
/// accepted.
pub fn optimize_continuous(
    problem: &PlacementProblem,
    config: &PlacementConfig,
) -> Result<PlacementSolution> {
    let n = problem.kernels().len();
    let seeded_starts = config.seed.map(|seed| draw_starts(problem, seed, n));

    let mut placements = Vec::with_capacity(n);
    let mut traces = Vec::new();
    let mut objective = 0.0;
    let mut iterations = 0;
    let mut converged = true;

    for k in 0..n {
        let kernel = &problem.kernels()[k];
        if kernel.total_traffic() == 0.0 {
            placements.push(KernelPlacement {
                kernel: kernel.id().to_string(),
                status: PlacementStatus::Unplaced,
                energy: 0.0,
                iterations: 0,
            });
            continue;
        }
        let start = match &seeded_starts {
            Some(starts) => starts[k],
            None => kernel
                .position()
                .unwrap_or_else(|| traffic_centroid(problem, k)),
        };
        let run = descend(problem, k, start, config);
        objective += run.energy;
        iterations = iterations.max(run.iterations);
        converged &= run.converged;
        placements.push(KernelPlacement {
            kernel: kernel.id().to_string(),
            status: PlacementStatus::Placed { position: run.position },
            energy: run.energy,
            iterations: run.iterations,
        });
        if config.record_trace {
            traces.push(KernelTrace {
                kernel: kernel.id().to_string(),
                path: run.path,
                objective: run.objective,
            });
        }
    }

    Ok(PlacementSolution {
        placements,
        objective,
        iterations,
        converged,
        seed: config.seed,
        trace: config.record_trace.then_some(traces),
    })
}

/// Uniform starting positions inside the region, one per kernel, drawn
/// in kernel order from a single stream so results are independent of
/// evaluation order.
fn draw_starts(problem: &PlacementProblem, seed: u64, n: usize) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min = problem.region().min();
    let ext = problem.region().extent();
    (0..n)
        .map(|_| {
            let u: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            Vec3::new(
                min.x + u[0] * ext.x,
                min.y + u[1] * ext.y,
                min.z + u[2] * ext.z,
            )
        })
        .collect()
}

/// Traffic-weighted centroid of the objects a kernel trades with,
/// projected into the region. Exact optimum for `beta = 2`, a good
/// start elsewhere.
fn traffic_centroid(problem: &PlacementProblem, kernel: usize) -> Vec3 {
    let mut weighted = Vec3::ZERO;
    let mut total = 0.0;
    for (o, obj) in problem.objects().iter().enumerate() {
        let bits = problem.traffic_bits(kernel, o);
        weighted += obj.position().scale(bits);
        total += bits;
    }
    problem.region().project(weighted.scale(1.0 / total))
}

struct Descent {
    position: Vec3,
    energy: f64,
    iterations: usize,
    converged: bool,
    path: Vec<Vec3>,
    objective: Vec<f64>,
}

fn descend(problem: &PlacementProblem, kernel: usize, start: Vec3, config: &PlacementConfig) -> Descent {
    let region = problem.region();
    let beta = problem.profile().beta();
    let diagonal = region.diagonal();
    let initial_step = diagonal / 10.0;
    let gradient_scale = problem.profile().alpha()
        * problem.kernels()[kernel].total_traffic()
        * beta
        * diagonal.powf(beta - 1.0);
    let grad_tol = config.grad_tol_scale * gradient_scale;

    let mut x = region.project(start);
    let mut fx = kernel_energy(problem, kernel, x);
    let mut path = Vec::new();
    let mut objective = Vec::new();
    if config.record_trace {
        path.push(x);
        objective.push(fx);
    }

    let mut step = initial_step;
    let mut iterations = 0;
    let mut converged = false;

    'outer: while iterations < config.max_iters {
        iterations += 1;
        let g = kernel_gradient(problem, kernel, x);
        let g_norm = g.norm();
        if g_norm <= grad_tol {
            converged = true;
            break;
        }
        let direction = g.scale(-1.0 / g_norm);
        let mut s = step;
        loop {
            let candidate = region.project(x + direction.scale(s));
            let fc = kernel_energy(problem, kernel, candidate);
            if fc < fx {
                let moved = candidate.distance(x);
                x = candidate;
                fx = fc;
                if config.record_trace {
                    path.push(x);
                    objective.push(fx);
                }
                if moved < config.step_tol {
                    converged = true;
                    break 'outer;
                }
                step = (2.0 * s).min(initial_step);
                break;
            }
            s *= 0.5;
            if s < config.step_tol {
                // no improving move of meaningful length exists, which
                // on a convex objective means we are at the projected
                // optimum up to the step tolerance
                converged = true;
                break 'outer;
            }
        }
    }

    Descent {
        position: x,
        energy: fx,
        iterations,
        converged,
        path,
        objective,
    }
}
