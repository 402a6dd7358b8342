//! The power-law energy cost of moving bits, and what it buys.
//!
//! Moving `N` bits across distance `d` costs `alpha * N * d^beta`
//! joules. `alpha` bundles the technology constants (wire capacitance,
//! drivers, equalization) and `beta` in (1, 3] captures how repeater and
//! signal-integrity overheads compound with length. Dividing a movement
//! energy by a compute energy gives the dimensionless ratio `G_d`: at
//! `G_d = 1` moving an operand costs the same as operating on it, and
//! well above 1 the interconnect, not the ALU, is what a workload pays
//! for.

use serde::Serialize;

use crate::{Error, Result};

/// Joules per picojoule; CLI and catalog speak pJ, the core stores J.
pub const PICOJOULE: f64 = 1e-12;

fn require(ok: bool, name: &'static str, value: f64, constraint: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::domain(name, value, constraint))
    }
}

/// A technology operating point for movement and compute energy.
///
/// `alpha` has units J/(bit·m^beta), so its numeric value is only
/// meaningful next to the `beta` stored with it; profiles carry both and
/// are never mixed. `d_ref` and `bits_per_access` fix the reference
/// distance and access width used when quoting a dimensionless `G_d`
/// for the profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TechProfile {
    label: String,
    e_compute: f64,
    alpha: f64,
    beta: f64,
    d_ref: f64,
    bits_per_access: u32,
}

impl TechProfile {
    /// A profile with `d_ref` = 1 m and 64-bit accesses.
    ///
    /// `e_compute` is joules per operation, `alpha` is J/(bit·m^beta),
    /// and `beta` must lie in (1, 3]. `beta = 1` is rejected: the
    /// colocation advantage bound degenerates there and the gravity
    /// field normalization assumes super-linear distance scaling.
    pub fn new(label: impl Into<String>, e_compute: f64, alpha: f64, beta: f64) -> Result<Self> {
        require(
            e_compute.is_finite() && e_compute > 0.0,
            "e_compute",
            e_compute,
            "> 0",
        )?;
        require(alpha.is_finite() && alpha > 0.0, "alpha", alpha, "> 0")?;
        require(
            beta.is_finite() && beta > 1.0 && beta <= 3.0,
            "beta",
            beta,
            "1 < beta <= 3",
        )?;
        Ok(TechProfile {
            label: label.into(),
            e_compute,
            alpha,
            beta,
            d_ref: 1.0,
            bits_per_access: 64,
        })
    }

    pub fn with_d_ref(mut self, d_ref: f64) -> Result<Self> {
        require(d_ref.is_finite() && d_ref > 0.0, "d_ref", d_ref, "> 0")?;
        self.d_ref = d_ref;
        Ok(self)
    }

    pub fn with_bits_per_access(mut self, bits: u32) -> Result<Self> {
        require(bits > 0, "bits_per_access", bits as f64, ">= 1")?;
        self.bits_per_access = bits;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Joules per operation.
    pub fn e_compute(&self) -> f64 {
        self.e_compute
    }

    /// Movement coefficient, J/(bit·m^beta).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Distance exponent in (1, 3].
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Reference distance in meters for the per-bit `G_d` normalization.
    pub fn d_ref(&self) -> f64 {
        self.d_ref
    }

    /// Bits moved by one access event.
    pub fn bits_per_access(&self) -> u32 {
        self.bits_per_access
    }

    /// Energy in joules to move `n_bits` over distance `d` meters:
    /// `alpha * n_bits * d^beta`.
    ///
    /// Linear in bits, power-law in distance, monotone nondecreasing in
    /// both. Negative arguments are domain errors.
    pub fn movement_energy(&self, n_bits: f64, d: f64) -> Result<f64> {
        require(n_bits.is_finite() && n_bits >= 0.0, "n_bits", n_bits, ">= 0")?;
        require(d.is_finite() && d >= 0.0, "d", d, ">= 0")?;
        Ok(self.alpha * n_bits * d.powf(self.beta))
    }

    /// Total energy of running `w` with operands held at distance `d`.
    ///
    /// Compute side charges one operation per access event
    /// (`e_compute * f * T`); movement side charges the full
    /// `S * f * T` bits over `d`.
    pub fn total_energy(&self, w: &WorkloadSpec, d: f64) -> Result<EnergyBreakdown> {
        let compute = self.e_compute * w.op_rate() * w.duration();
        let movement = self.movement_energy(w.total_bits(), d)?;
        Ok(EnergyBreakdown::new(compute, movement))
    }

    /// Movement/compute energy ratio for one `bits_per_access`-bit
    /// access at distance `d`. Dimensionless.
    pub fn disjunction_at(&self, d: f64) -> Result<f64> {
        Ok(self.movement_energy(self.bits_per_access as f64, d)? / self.e_compute)
    }

    /// The literal single-bit normalization: movement energy of 1 bit
    /// over `d_ref`, divided by one operation's compute energy.
    pub fn disjunction_per_bit(&self) -> f64 {
        self.alpha * self.d_ref.powf(self.beta) / self.e_compute
    }

    /// The separation `d*` where one access's movement energy equals one
    /// operation's compute energy:
    /// `d* = (e_compute / (alpha * bits_per_access))^(1/beta)`.
    ///
    /// Below `d*` a workload is compute-dominated, above it
    /// movement-dominated ("energy-balanced operation" at exactly `d*`).
    pub fn balanced_separation(&self) -> f64 {
        (self.e_compute / (self.alpha * self.bits_per_access as f64)).powf(1.0 / self.beta)
    }
}

/// The movement/compute energy ratio `G_d` from a measured pair:
/// per-access movement energy divided by per-operation compute energy.
///
/// Both energies must be positive and in the same unit. The published
/// figures this crate reproduces (992 for DDR5 vs 7 nm FP32, 7.5 for
/// PIM) are per-access ratios of exactly this form.
pub fn disjunction_constant(e_move_per_access: f64, e_compute_per_op: f64) -> Result<f64> {
    require(
        e_move_per_access.is_finite() && e_move_per_access > 0.0,
        "e_move_per_access",
        e_move_per_access,
        "> 0",
    )?;
    require(
        e_compute_per_op.is_finite() && e_compute_per_op > 0.0,
        "e_compute_per_op",
        e_compute_per_op,
        "> 0",
    )?;
    Ok(e_move_per_access / e_compute_per_op)
}

/// A workload as an (entropy per operation, operation rate, duration)
/// triple. Total traffic is `N = S * f * T` bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkloadSpec {
    entropy_per_op: f64,
    op_rate: f64,
    duration: f64,
}

impl WorkloadSpec {
    /// `entropy_per_op` in bits, `op_rate` in Hz, `duration` in seconds;
    /// all nonnegative, with a finite total bit count.
    pub fn new(entropy_per_op: f64, op_rate: f64, duration: f64) -> Result<Self> {
        require(
            entropy_per_op.is_finite() && entropy_per_op >= 0.0,
            "entropy_per_op",
            entropy_per_op,
            ">= 0",
        )?;
        require(
            op_rate.is_finite() && op_rate >= 0.0,
            "op_rate",
            op_rate,
            ">= 0",
        )?;
        require(
            duration.is_finite() && duration >= 0.0,
            "duration",
            duration,
            ">= 0",
        )?;
        let w = WorkloadSpec {
            entropy_per_op,
            op_rate,
            duration,
        };
        require(
            w.total_bits().is_finite(),
            "total_bits",
            w.total_bits(),
            "finite",
        )?;
        Ok(w)
    }

    /// Bits per operation.
    pub fn entropy_per_op(&self) -> f64 {
        self.entropy_per_op
    }

    /// Operations per second.
    pub fn op_rate(&self) -> f64 {
        self.op_rate
    }

    /// Seconds.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Total bits accessed over the run: `S * f * T`.
    pub fn total_bits(&self) -> f64 {
        self.entropy_per_op * self.op_rate * self.duration
    }
}

/// Compute and movement energy totals for one architecture point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    compute: f64,
    movement: f64,
    total: f64,
}

impl EnergyBreakdown {
    pub fn new(compute: f64, movement: f64) -> Self {
        EnergyBreakdown {
            compute,
            movement,
            total: compute + movement,
        }
    }

    /// Joules spent operating on data.
    pub fn compute(&self) -> f64 {
        self.compute
    }

    /// Joules spent moving data.
    pub fn movement(&self) -> f64 {
        self.movement
    }

    /// Sum of the two parts, fixed at construction.
    pub fn total(&self) -> f64 {
        self.total
    }
}
