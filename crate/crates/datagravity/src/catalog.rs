//! Published movement and compute energy measurements, with derived
//! movement-to-compute ratios checked against the figures reported for
//! them.
//!
//! The catalog is a frozen snapshot of measurements that appear in the
//! literature: Horowitz's 45 nm survey numbers, TPU v4i per-operation
//! energies with the DRAM interfaces of that class, UPMEM's
//! processing-in-memory comparison, and a biological estimate for
//! scale. Each [`MeasurementRecord`] stores energies in joules; every
//! ratio in a [`GdClaim`] is derived from those stored energies at
//! check time, never copied in, so a claim can only pass if the
//! arithmetic actually reproduces the published figure.
//!
//! Where a published range is divided by another range, the source
//! arithmetic pairs minima with minima and maxima with maxima (cache
//! energies of 10 to 100 pJ over a 4 pJ operation become 2.5 to 25).
//! [`RangeConvention::Paired`] reproduces that; the wider
//! [`RangeConvention::Conservative`] interval divides min by max and
//! max by min instead and is available for sensitivity checks.

use serde::Serialize;

use crate::energy::PICOJOULE;
use crate::{Error, Result};

/// Relative tolerance for reproducing a published figure.
pub const CLAIM_RELATIVE_TOLERANCE: f64 = 0.01;

/// A positive energy or ratio, either a single value or a closed range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Band {
    Point { value: f64 },
    Range { min: f64, max: f64 },
}

impl Band {
    pub fn point(value: f64) -> Result<Band> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::domain("value", value, "> 0"));
        }
        Ok(Band::Point { value })
    }

    pub fn range(min: f64, max: f64) -> Result<Band> {
        if !(min.is_finite() && min > 0.0) {
            return Err(Error::domain("min", min, "> 0"));
        }
        if !(max.is_finite() && max >= min) {
            return Err(Error::domain("max", max, ">= min"));
        }
        Ok(Band::Range { min, max })
    }

    pub fn min(&self) -> f64 {
        match *self {
            Band::Point { value } => value,
            Band::Range { min, .. } => min,
        }
    }

    pub fn max(&self) -> f64 {
        match *self {
            Band::Point { value } => value,
            Band::Range { max, .. } => max,
        }
    }

    /// Largest relative deviation between corresponding endpoints.
    pub fn relative_error_to(&self, expected: &Band) -> f64 {
        let lo = (self.min() - expected.min()).abs() / expected.min();
        let hi = (self.max() - expected.max()).abs() / expected.max();
        lo.max(hi)
    }

    fn divide(&self, divisor: &Band, convention: RangeConvention) -> Band {
        match convention {
            RangeConvention::Paired => {
                let min = self.min() / divisor.min();
                let max = self.max() / divisor.max();
                if min == max {
                    Band::Point { value: min }
                } else {
                    Band::Range {
                        min: min.min(max),
                        max: min.max(max),
                    }
                }
            }
            RangeConvention::Conservative => {
                let min = self.min() / divisor.max();
                let max = self.max() / divisor.min();
                if min == max {
                    Band::Point { value: min }
                } else {
                    Band::Range { min, max }
                }
            }
        }
    }
}

/// How to divide one range by another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RangeConvention {
    /// min/min and max/max, matching the arithmetic in the sources.
    Paired,
    /// min/max and max/min, the widest interval the ranges allow.
    Conservative,
}

/// Sustained power and operation rate, for measurements published that
/// way instead of as per-event energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerRate {
    /// Watts.
    pub power: f64,
    /// Operations per second.
    pub rate: f64,
}

impl PowerRate {
    /// Energy per operation, joules.
    pub fn energy_per_op(&self) -> f64 {
        self.power / self.rate
    }
}

/// One published measurement: where it came from, the technology node,
/// and whichever energies the source actually reported.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    label: String,
    source: String,
    node: String,
    /// Energy per access, joules.
    e_move: Option<Band>,
    /// Energy per operation, joules.
    e_compute: Option<Band>,
    /// Bits per access, where the source states one.
    access_width: Option<u32>,
    /// Set for measurements of non-digital systems, where per-access
    /// movement energy is not even defined.
    qualitative: bool,
    power_rate: Option<PowerRate>,
    notes: String,
}

impl MeasurementRecord {
    fn new(label: &str, source: &str, node: &str) -> Self {
        MeasurementRecord {
            label: label.to_string(),
            source: source.to_string(),
            node: node.to_string(),
            e_move: None,
            e_compute: None,
            access_width: None,
            qualitative: false,
            power_rate: None,
            notes: String::new(),
        }
    }

    fn moving(mut self, band: Band) -> Self {
        self.e_move = Some(band);
        self
    }

    fn computing(mut self, band: Band) -> Self {
        self.e_compute = Some(band);
        self
    }

    fn width(mut self, bits: u32) -> Self {
        self.access_width = Some(bits);
        self
    }

    fn qualitative_power(mut self, power: f64, rate: f64) -> Self {
        self.qualitative = true;
        self.power_rate = Some(PowerRate { power, rate });
        self
    }

    fn noted(mut self, notes: &str) -> Self {
        self.notes = notes.to_string();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn node(&self) -> &str {
        &self.node
    }

    pub fn e_move(&self) -> Option<Band> {
        self.e_move
    }

    pub fn e_compute(&self) -> Option<Band> {
        self.e_compute
    }

    pub fn access_width(&self) -> Option<u32> {
        self.access_width
    }

    pub fn is_qualitative(&self) -> bool {
        self.qualitative
    }

    pub fn power_rate(&self) -> Option<PowerRate> {
        self.power_rate
    }

    pub fn notes(&self) -> &str {
        &self.notes
    }
}

fn pj(x: f64) -> Band {
    Band::Point { value: x * PICOJOULE }
}

fn pj_range(lo: f64, hi: f64) -> Band {
    Band::Range {
        min: lo * PICOJOULE,
        max: hi * PICOJOULE,
    }
}

/// The frozen measurement set.
pub fn builtin_measurements() -> Vec<MeasurementRecord> {
    vec![
        MeasurementRecord::new("horowitz-fp-op", "Horowitz 2014 survey", "45 nm")
            .computing(pj_range(0.4, 3.7))
            .noted("floating-point operation; ratio arithmetic in the source rounds the maximum to about 4 pJ"),
        MeasurementRecord::new("horowitz-cache", "Horowitz 2014 survey", "45 nm")
            .moving(pj_range(10.0, 100.0))
            .noted("on-chip cache hierarchy access, L1 through last level"),
        MeasurementRecord::new("horowitz-offchip", "Horowitz 2014 survey", "45 nm")
            .moving(pj_range(1300.0, 2600.0))
            .width(64)
            .noted("off-chip DRAM access, 64-bit word"),
        MeasurementRecord::new("tpu-int32-add", "TPU v4i datapath", "7 nm")
            .computing(pj(0.03))
            .noted("Int32 addition"),
        MeasurementRecord::new("tpu-fp32-mul", "TPU v4i datapath", "7 nm")
            .computing(pj(1.31))
            .noted("FP32 multiplication"),
        MeasurementRecord::new("ddr-access", "DDR interface figures", "DDR3 through DDR5 class")
            .moving(pj(1300.0))
            .width(64)
            .noted("stated as holding across recent DDR generations; asserted figure, no primary measurement cited"),
        MeasurementRecord::new("gddr6-access", "graphics DRAM interface figures", "GDDR6")
            .moving(pj_range(350.0, 480.0))
            .noted("per access at the device interface"),
        MeasurementRecord::new("hbm2-access", "stacked DRAM interface figures", "HBM2")
            .moving(pj_range(250.0, 450.0))
            .noted("per access through the interposer"),
        MeasurementRecord::new("upmem-conventional", "UPMEM comparison", "DRAM process PIM")
            .moving(pj(3000.0))
            .computing(pj(10.0))
            .noted("conventional CPU plus DRAM path; about 3010 pJ end to end per operation"),
        MeasurementRecord::new("upmem-pim", "UPMEM comparison", "DRAM process PIM")
            .moving(pj(150.0))
            .computing(pj(20.0))
            .noted("in-memory execution; about 170 pJ end to end; independent studies disagree, some reporting net energy increases, and publish no breakdown to derive from"),
        MeasurementRecord::new("human-brain", "biological estimate", "wetware")
            .qualitative_power(20.0, 1e18)
            .noted("about 20 W sustaining on the order of 1e18 synaptic events per second; movement appears cheaper than switching, a sub-unity ratio, but per-access movement energy is not separable"),
    ]
}

/// Derive the movement-to-compute ratio stored in a single record.
///
/// Requires the record to carry both energies; qualitative records and
/// one-sided records return an error rather than a made-up number.
pub fn derive_gd(record: &MeasurementRecord, convention: RangeConvention) -> Result<Band> {
    if record.qualitative {
        return Err(Error::MalformedRange {
            name: "record",
            reason: format!("`{}` is qualitative; no ratio is derivable", record.label),
        });
    }
    match (record.e_move, record.e_compute) {
        (Some(movement), Some(compute)) => Ok(movement.divide(&compute, convention)),
        (None, _) => Err(Error::MalformedRange {
            name: "record",
            reason: format!("`{}` stores no movement energy", record.label),
        }),
        (_, None) => Err(Error::MalformedRange {
            name: "record",
            reason: format!("`{}` stores no compute energy", record.label),
        }),
    }
}

/// Where a claim's compute-side energy comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComputeSource {
    /// Envelope over the named records' compute energies.
    Records { labels: Vec<String> },
    /// A figure the source arithmetic states directly, such as a
    /// rounded operation energy.
    Stated { joules: f64, basis: String },
}

/// What a claim asserts and how to recompute it. Claims hold only the
/// published expectation; the derived side is produced at check time
/// from record energies.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClaimKind {
    /// Movement envelope over records, divided by a compute source.
    Ratio {
        movement: Vec<String>,
        compute: ComputeSource,
    },
    /// End-to-end energy ratio of two records with both sides stored:
    /// (move + compute) of the first over (move + compute) of the
    /// second.
    EndToEnd { baseline: String, improved: String },
    /// Per-operation energy of a power-and-rate record.
    PerOpPower { record: String },
}

/// A published figure and the recipe that should reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdClaim {
    pub name: String,
    pub kind: ClaimKind,
    pub expected: Band,
    /// Claims marked informational are reported with their deviation
    /// but never fail the check; used where the published figure is a
    /// vendor round number rather than arithmetic over the records.
    pub informational: bool,
    pub note: String,
}

/// The claims the catalog is expected to reproduce.
pub fn builtin_claims() -> Vec<GdClaim> {
    let stated_4pj = ComputeSource::Stated {
        joules: 4.0 * PICOJOULE,
        basis: "maximum 45 nm operation energy rounded to 4 pJ, as the source arithmetic uses".to_string(),
    };
    vec![
        GdClaim {
            name: "cache-hierarchy-45nm".to_string(),
            kind: ClaimKind::Ratio {
                movement: vec!["horowitz-cache".to_string()],
                compute: stated_4pj.clone(),
            },
            expected: Band::Range { min: 2.5, max: 25.0 },
            informational: false,
            note: "on-chip movement already costs a few operations per access".to_string(),
        },
        GdClaim {
            name: "offchip-dram-45nm".to_string(),
            kind: ClaimKind::Ratio {
                movement: vec!["horowitz-offchip".to_string()],
                compute: stated_4pj,
            },
            expected: Band::Range { min: 325.0, max: 650.0 },
            informational: false,
            note: "off-chip access costs hundreds of operations".to_string(),
        },
        GdClaim {
            name: "ddr-vs-fp32-7nm".to_string(),
            kind: ClaimKind::Ratio {
                movement: vec!["ddr-access".to_string()],
                compute: ComputeSource::Records {
                    labels: vec!["tpu-fp32-mul".to_string()],
                },
            },
            expected: Band::Point { value: 992.0 },
            informational: false,
            note: "the headline three-orders-of-magnitude ratio at a modern node".to_string(),
        },
        GdClaim {
            name: "high-bandwidth-dram-7nm".to_string(),
            kind: ClaimKind::Ratio {
                movement: vec!["hbm2-access".to_string(), "gddr6-access".to_string()],
                compute: ComputeSource::Records {
                    labels: vec!["tpu-fp32-mul".to_string()],
                },
            },
            expected: Band::Range { min: 190.0, max: 366.0 },
            informational: false,
            note: "envelope over HBM2 and GDDR6 interfaces against FP32 work".to_string(),
        },
        GdClaim {
            name: "upmem-pim".to_string(),
            kind: ClaimKind::Ratio {
                movement: vec!["upmem-pim".to_string()],
                compute: ComputeSource::Records {
                    labels: vec!["upmem-pim".to_string()],
                },
            },
            expected: Band::Point { value: 7.5 },
            informational: false,
            note: "moving compute into DRAM leaves movement only 7.5x compute".to_string(),
        },
        GdClaim {
            name: "upmem-end-to-end".to_string(),
            kind: ClaimKind::EndToEnd {
                baseline: "upmem-conventional".to_string(),
                improved: "upmem-pim".to_string(),
            },
            expected: Band::Point { value: 20.0 },
            informational: true,
            note: "vendor-stated 20x; the stored energies give 3010/170, about 17.7, an 11 to 12 percent gap".to_string(),
        },
        GdClaim {
            name: "brain-energy-per-op".to_string(),
            kind: ClaimKind::PerOpPower {
                record: "human-brain".to_string(),
            },
            expected: Band::Point { value: 2e-17 },
            informational: false,
            note: "0.02 fJ per operation; the sub-unity movement ratio stays a qualitative note".to_string(),
        },
    ]
}

/// Outcome of checking one claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    Informational,
}

/// One row of a claim check report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub expected: Band,
    pub derived: Band,
    pub relative_error: f64,
    pub status: ClaimStatus,
    pub note: String,
}

/// Full claim report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<ClaimCheck>,
}

impl CheckReport {
    /// True when no claim failed; informational rows never gate.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != ClaimStatus::Fail)
    }
}

/// Check the built-in claims against the built-in measurements using
/// the source range convention.
pub fn check_claims() -> CheckReport {
    check_claims_with(
        &builtin_measurements(),
        &builtin_claims(),
        RangeConvention::Paired,
    )
    .expect("built-in claims reference built-in records")
}

fn find<'a>(
    records: &'a [MeasurementRecord],
    claim: &str,
    label: &str,
) -> Result<&'a MeasurementRecord> {
    records.iter().find(|r| r.label == label).ok_or_else(|| Error::UnknownRecord {
        claim: claim.to_string(),
        record: label.to_string(),
    })
}

fn envelope(bands: &[Band]) -> Band {
    let min = bands.iter().map(Band::min).fold(f64::INFINITY, f64::min);
    let max = bands.iter().map(Band::max).fold(0.0_f64, f64::max);
    if min == max {
        Band::Point { value: min }
    } else {
        Band::Range { min, max }
    }
}

fn end_to_end_energy(record: &MeasurementRecord, claim: &str) -> Result<f64> {
    match (record.e_move, record.e_compute) {
        (Some(m), Some(c)) => Ok(m.max() + c.max()),
        _ => Err(Error::MalformedRange {
            name: "claim",
            reason: format!(
                "`{claim}` needs both energies on `{}` for an end-to-end ratio",
                record.label
            ),
        }),
    }
}

/// Check arbitrary claims against arbitrary records, for sensitivity
/// experiments and alternate conventions.
pub fn check_claims_with(
    records: &[MeasurementRecord],
    claims: &[GdClaim],
    convention: RangeConvention,
) -> Result<CheckReport> {
    let mut checks = Vec::with_capacity(claims.len());
    for claim in claims {
        let derived = match &claim.kind {
            ClaimKind::Ratio { movement, compute } => {
                let mut move_bands = Vec::with_capacity(movement.len());
                for label in movement {
                    let record = find(records, &claim.name, label)?;
                    move_bands.push(record.e_move.ok_or_else(|| Error::MalformedRange {
                        name: "claim",
                        reason: format!("`{}` stores no movement energy", label),
                    })?);
                }
                let compute_band = match compute {
                    ComputeSource::Records { labels } => {
                        let mut bands = Vec::with_capacity(labels.len());
                        for label in labels {
                            let record = find(records, &claim.name, label)?;
                            bands.push(record.e_compute.ok_or_else(|| {
                                Error::MalformedRange {
                                    name: "claim",
                                    reason: format!("`{}` stores no compute energy", label),
                                }
                            })?);
                        }
                        envelope(&bands)
                    }
                    ComputeSource::Stated { joules, .. } => Band::Point { value: *joules },
                };
                envelope(&move_bands).divide(&compute_band, convention)
            }
            ClaimKind::EndToEnd { baseline, improved } => {
                let base = end_to_end_energy(find(records, &claim.name, baseline)?, &claim.name)?;
                let better = end_to_end_energy(find(records, &claim.name, improved)?, &claim.name)?;
                Band::Point { value: base / better }
            }
            ClaimKind::PerOpPower { record } => {
                let record = find(records, &claim.name, record)?;
                let pr = record.power_rate.ok_or_else(|| Error::MalformedRange {
                    name: "claim",
                    reason: format!("`{}` stores no power and rate", record.label),
                })?;
                Band::Point { value: pr.energy_per_op() }
            }
        };
        let relative_error = derived.relative_error_to(&claim.expected);
        let status = if claim.informational {
            ClaimStatus::Informational
        } else if relative_error <= CLAIM_RELATIVE_TOLERANCE {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        };
        checks.push(ClaimCheck {
            claim: claim.name.clone(),
            expected: claim.expected,
            derived,
            relative_error,
            status,
            note: claim.note.clone(),
        });
    }
    Ok(CheckReport { checks })
}
