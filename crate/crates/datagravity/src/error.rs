use thiserror::Error;

/// Errors shared across the crate.
///
/// Domain violations (a negative distance, a ratio of nonpositive
/// energies) are reported here rather than panicking, so callers can map
/// them onto diagnostics or exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument or field violated its domain constraint.
    #[error("{name} = {value} violates {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// A field evaluation point fell within the singularity guard of a
    /// data object.
    #[error("point is {distance} m from object `{id}`, inside the {epsilon} m singularity guard")]
    Singularity {
        id: String,
        distance: f64,
        epsilon: f64,
    },

    /// A bounding box with min > max, non-finite corners, or no extent.
    #[error("degenerate region: {reason}")]
    DegenerateRegion { reason: String },

    /// A sweep or grid range that cannot be enumerated.
    #[error("malformed range for {name}: {reason}")]
    MalformedRange { name: &'static str, reason: String },

    /// A kernel's traffic map names a data object the problem does not contain.
    #[error("kernel `{kernel}` moves traffic to unknown object `{object}`")]
    UnknownTrafficTarget { kernel: String, object: String },

    /// Two entities of the same kind share an identifier.
    #[error("duplicate {kind} id `{id}`")]
    Duplicate { kind: &'static str, id: String },

    /// Slot assignment cannot place every kernel.
    #[error("{kernels} kernels cannot be assigned to {slots} capacity-1 slots")]
    Infeasible { kernels: usize, slots: usize },

    /// Scenario file failed to parse or validate.
    #[error("{0}")]
    Scenario(String),

    /// A catalog claim referenced a record label that does not exist.
    #[error("catalog claim `{claim}` references unknown record `{record}`")]
    UnknownRecord { claim: String, record: String },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, constraint: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            constraint,
        }
    }
}
