//! Energy advantage of colocating compute with data.
//!
//! Consider a workload whose data sits at distance `d` from where the
//! compute currently runs, and suppose the compute could instead run at
//! distance `d_min` from the data (on-die, in-package, whatever the
//! floor is). With the movement-to-compute energy ratio `g_d` at
//! distance `d`, the total-energy ratio between the two arrangements is
//!
//! ```text
//! gamma = (1 + g_d) / (1 + g_d * r^beta),    r = d_min / d
//! ```
//!
//! `gamma` is the multiplicative energy saving from moving the compute.
//! Whenever the colocation condition `g_d * r < 1` holds, `gamma` is
//! bounded below by `g_d^((beta - 1) / 2)`, so a movement-dominated
//! system (`g_d` around 1000, `beta` = 2) saves over 30x by colocating.
//!
//! The bound's derivation is not reproduced here; instead
//! [`verify_proposition`] checks it numerically over dense log-spaced
//! grids, treating any violation as data to report rather than a
//! panic.

use serde::Serialize;

use crate::{Error, Result};

/// Relative slack applied when comparing `gamma` against the lower
/// bound, absorbing floating-point rounding in an inequality that is
/// strict in exact arithmetic.
pub const BOUND_RELATIVE_SLACK: f64 = 1e-12;

/// A single colocation question: ratio constant `g_d`, distance
/// exponent `beta`, and the distance ratio `r = d_min / d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvantageInputs {
    g_d: f64,
    beta: f64,
    r: f64,
}

impl AdvantageInputs {
    /// Build from explicit distances, with `0 < d_min <= d`.
    pub fn from_distances(g_d: f64, beta: f64, d: f64, d_min: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::domain("d", d, "> 0"));
        }
        if !(d_min.is_finite() && d_min > 0.0) {
            return Err(Error::domain("d_min", d_min, "> 0"));
        }
        if d_min > d {
            return Err(Error::domain("d_min", d_min, "<= d"));
        }
        Self::from_ratio(g_d, beta, d_min / d)
    }

    /// Build from the ratio directly, with `r` in `(0, 1]`.
    pub fn from_ratio(g_d: f64, beta: f64, r: f64) -> Result<Self> {
        if !(g_d.is_finite() && g_d >= 1.0) {
            return Err(Error::domain("g_d", g_d, ">= 1"));
        }
        if !(beta.is_finite() && beta > 1.0 && beta <= 3.0) {
            return Err(Error::domain("beta", beta, "1 < beta <= 3"));
        }
        if !(r.is_finite() && r > 0.0 && r <= 1.0) {
            return Err(Error::domain("r", r, "0 < r <= 1"));
        }
        Ok(AdvantageInputs { g_d, beta, r })
    }

    pub fn g_d(&self) -> f64 {
        self.g_d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Strict test of `g_d * r < 1`, the regime where the lower bound
    /// applies. Equality is outside.
    pub fn colocation_condition(&self) -> bool {
        self.g_d * self.r < 1.0
    }

    /// The energy ratio `(1 + g_d) / (1 + g_d * r^beta)`.
    ///
    /// Equal to 1 at `r = 1` and approaching `1 + g_d` as `r` goes to
    /// zero; strictly decreasing in `r` between.
    pub fn advantage_factor(&self) -> f64 {
        (1.0 + self.g_d) / (1.0 + self.g_d * self.r.powf(self.beta))
    }

    /// Evaluate everything at once.
    pub fn report(&self) -> AdvantageReport {
        let gamma = self.advantage_factor();
        let lower_bound = lower_bound_unchecked(self.g_d, self.beta);
        AdvantageReport {
            g_d: self.g_d,
            beta: self.beta,
            r: self.r,
            gamma,
            lower_bound,
            condition_holds: self.colocation_condition(),
            bound_satisfied: gamma >= lower_bound * (1.0 - BOUND_RELATIVE_SLACK),
        }
    }
}

/// The guaranteed floor `g_d^((beta - 1) / 2)` on the advantage factor
/// inside the colocation regime. Requires `g_d >= 1` and `beta` in
/// `(1, 3]`.
pub fn advantage_lower_bound(g_d: f64, beta: f64) -> Result<f64> {
    if !(g_d.is_finite() && g_d >= 1.0) {
        return Err(Error::domain("g_d", g_d, ">= 1"));
    }
    if !(beta.is_finite() && beta > 1.0 && beta <= 3.0) {
        return Err(Error::domain("beta", beta, "1 < beta <= 3"));
    }
    Ok(lower_bound_unchecked(g_d, beta))
}

fn lower_bound_unchecked(g_d: f64, beta: f64) -> f64 {
    g_d.powf((beta - 1.0) / 2.0)
}

/// One evaluated grid point: inputs, the advantage factor, the lower
/// bound, and the two gating flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvantageReport {
    pub g_d: f64,
    pub beta: f64,
    pub r: f64,
    pub gamma: f64,
    pub lower_bound: f64,
    /// `g_d * r < 1`, strictly. Only points with this set are held to
    /// the bound.
    pub condition_holds: bool,
    /// `gamma >= lower_bound` up to [`BOUND_RELATIVE_SLACK`].
    pub bound_satisfied: bool,
}

/// Log-spaced evaluation grid for the bound check.
///
/// For each `(g_d, beta)` cell, `r` is swept logarithmically from
/// `r_min` up to `(1 / g_d) * (1 - 1e-9)`, just inside the colocation
/// boundary where the bound is tightest.
#[derive(Debug, Clone, PartialEq)]
pub struct PropositionGrid {
    g_d: Vec<f64>,
    beta: Vec<f64>,
    r_samples: usize,
    r_min: f64,
}

/// Margin keeping the largest swept `r` strictly inside `1 / g_d`.
const BOUNDARY_MARGIN: f64 = 1e-9;

impl PropositionGrid {
    /// `g_d` values must be at least 1, `beta` values inside `(1, 3]`,
    /// and `r_min` small enough that every cell has room below its
    /// colocation boundary.
    pub fn new(g_d: Vec<f64>, beta: Vec<f64>, r_samples: usize, r_min: f64) -> Result<Self> {
        if g_d.is_empty() || beta.is_empty() || r_samples == 0 {
            return Err(Error::MalformedRange {
                name: "proposition grid",
                reason: "empty axis".to_string(),
            });
        }
        for &g in &g_d {
            if !(g.is_finite() && g >= 1.0) {
                return Err(Error::domain("g_d", g, ">= 1"));
            }
        }
        for &b in &beta {
            if !(b.is_finite() && b > 1.0 && b <= 3.0) {
                return Err(Error::domain("beta", b, "1 < beta <= 3"));
            }
        }
        if !(r_min.is_finite() && r_min > 0.0) {
            return Err(Error::domain("r_min", r_min, "> 0"));
        }
        let tightest = g_d.iter().fold(1.0_f64, |a, &g| a.max(g));
        if r_min >= (1.0 / tightest) * (1.0 - BOUNDARY_MARGIN) {
            return Err(Error::MalformedRange {
                name: "proposition grid",
                reason: format!("r_min {r_min} leaves no room below 1/g_d for g_d {tightest}"),
            });
        }
        Ok(PropositionGrid {
            g_d,
            beta,
            r_samples,
            r_min,
        })
    }

    /// The grid used by the stock verification run: five decades of
    /// `g_d`, five `beta` values spanning the open-closed interval, and
    /// enough `r` samples per cell to exceed 10^5 points total.
    pub fn standard() -> Self {
        PropositionGrid::new(
            vec![1.0, 10.0, 1e2, 1e3, 1e4],
            vec![1.1, 1.5, 2.0, 2.5, 3.0],
            4096,
            1e-6,
        )
        .expect("standard grid parameters are valid")
    }

    /// Total number of evaluated points.
    pub fn len(&self) -> usize {
        self.g_d.len() * self.beta.len() * self.r_samples
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Result of a grid verification: every evaluated report, plus the
/// subset that was asserted and the subset that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationOutcome {
    /// All evaluated points, in grid order (`g_d` outer, `beta`
    /// middle, `r` inner).
    pub reports: Vec<AdvantageReport>,
    /// How many reports had the colocation condition hold and were
    /// therefore held to the bound.
    pub asserted: usize,
    /// Asserted reports whose `gamma` fell below the bound. Empty on a
    /// healthy run.
    pub violations: Vec<AdvantageReport>,
}

impl VerificationOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluate the advantage factor against its lower bound across `grid`.
///
/// Points where the colocation condition fails are evaluated and
/// reported but never counted as violations; within the condition, a
/// `gamma` below the bound (beyond [`BOUND_RELATIVE_SLACK`]) lands in
/// `violations` rather than aborting the run.
pub fn verify_proposition(grid: &PropositionGrid) -> VerificationOutcome {
    let mut reports = Vec::with_capacity(grid.len());
    let mut violations = Vec::new();
    let mut asserted = 0usize;
    for &g_d in &grid.g_d {
        let r_max = (1.0 / g_d) * (1.0 - BOUNDARY_MARGIN);
        let r_values = log_spaced(grid.r_min, r_max, grid.r_samples);
        for &beta in &grid.beta {
            for &r in &r_values {
                let report = AdvantageInputs::from_ratio(g_d, beta, r)
                    .expect("grid construction validated every axis")
                    .report();
                if report.condition_holds {
                    asserted += 1;
                    if !report.bound_satisfied {
                        violations.push(report);
                    }
                }
                reports.push(report);
            }
        }
    }
    VerificationOutcome {
        reports,
        asserted,
        violations,
    }
}

fn log_spaced(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let (ln_min, ln_max) = (min.ln(), max.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|i| (ln_min + (ln_max - ln_min) * i as f64 / (n - 1) as f64).exp())
        .collect();
    v[0] = min;
    v[n - 1] = max;
    v
}

fn linear_spaced(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let mut v: Vec<f64> = (0..n)
        .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
        .collect();
    v[0] = min;
    v[n - 1] = max;
    v
}

/// Spacing rule for one sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepScale {
    Linear,
    Log,
}

/// One axis of a sweep: inclusive endpoints and a sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    min: f64,
    max: f64,
    count: usize,
    scale: SweepScale,
}

impl SweepRange {
    /// Requires finite `min <= max`, `count >= 1` (a single-sample
    /// range must have `min == max`), and positive endpoints for log
    /// scale.
    pub fn new(min: f64, max: f64, count: usize, scale: SweepScale) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(Error::MalformedRange {
                name: "range",
                reason: format!("need finite min <= max, got [{min}, {max}]"),
            });
        }
        if count == 0 || (count == 1 && min != max) {
            return Err(Error::MalformedRange {
                name: "range",
                reason: format!("count {count} incompatible with [{min}, {max}]"),
            });
        }
        if scale == SweepScale::Log && min <= 0.0 {
            return Err(Error::MalformedRange {
                name: "range",
                reason: format!("log scale needs positive endpoints, got min {min}"),
            });
        }
        Ok(SweepRange {
            min,
            max,
            count,
            scale,
        })
    }

    /// A degenerate range holding one value.
    pub fn single(value: f64) -> Result<Self> {
        SweepRange::new(value, value, 1, SweepScale::Linear)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Materialize the axis; endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        match self.scale {
            SweepScale::Linear => linear_spaced(self.min, self.max, self.count),
            SweepScale::Log => log_spaced(self.min, self.max, self.count),
        }
    }
}

/// Three axes of a full sweep, validated against the domain each axis
/// feeds: `g_d >= 1`, `beta` inside `(1, 3]`, `r` inside `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    g_d: SweepRange,
    beta: SweepRange,
    r: SweepRange,
}

impl SweepSpec {
    pub fn new(g_d: SweepRange, beta: SweepRange, r: SweepRange) -> Result<Self> {
        if g_d.min < 1.0 {
            return Err(Error::MalformedRange {
                name: "g_d",
                reason: format!("values must be >= 1, range starts at {}", g_d.min),
            });
        }
        if beta.min <= 1.0 || beta.max > 3.0 {
            return Err(Error::MalformedRange {
                name: "beta",
                reason: format!("values must lie in (1, 3], range is [{}, {}]", beta.min, beta.max),
            });
        }
        if r.min <= 0.0 || r.max > 1.0 {
            return Err(Error::MalformedRange {
                name: "r",
                reason: format!("values must lie in (0, 1], range is [{}, {}]", r.min, r.max),
            });
        }
        Ok(SweepSpec { g_d, beta, r })
    }

    pub fn len(&self) -> usize {
        self.g_d.count * self.beta.count * self.r.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One output row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub g_d: f64,
    pub beta: f64,
    pub r: f64,
    pub gamma: f64,
    pub bound: f64,
    pub condition: bool,
}

/// Evaluate the advantage factor over the cross product of the three
/// axes, in deterministic order: `g_d` outermost, `beta`, then `r`
/// innermost.
pub fn sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(spec.len());
    for &g_d in &spec.g_d.values() {
        for &beta in &spec.beta.values() {
            for &r in &spec.r.values() {
                let report = AdvantageInputs::from_ratio(g_d, beta, r)
                    .expect("spec construction validated every axis")
                    .report();
                rows.push(SweepRow {
                    g_d,
                    beta,
                    r,
                    gamma: report.gamma,
                    bound: report.lower_bound,
                    condition: report.condition_holds,
                });
            }
        }
    }
    rows
}
