//! Information mass and the attraction field data exerts on compute.
//!
//! A data object accessed with entropy `S` bits at frequency `f` has
//! information mass `M = S * f` (bits per second): the rate at which
//! computation must interact with it. Each object contributes a vector
//! field pulling compute placement toward it,
//!
//! ```text
//! G(r) = G_d * M * u / |r - r0|^beta
//! ```
//!
//! where `u` is the unit vector from the sample point toward the object
//! and `beta` is the interconnect distance exponent. Superposing the
//! per-object fields ranks candidate locations by how strongly nearby
//! data would prefer compute there; the magnitude is a relative
//! placement-preference strength, not a force in newtons.
//!
//! Two conventions are explicit here. The field points *toward* the
//! data (attraction), matching the pull it models. And a singularity
//! guard `epsilon` keeps evaluation away from `|r - r0| -> 0`, where the
//! power law stops meaning anything physical: inside the guard,
//! evaluation is an error naming the offending object rather than an
//! infinity.

use serde::Serialize;

use crate::geom::{AxisBox, Vec3};
use crate::{Error, Result};

/// Default singularity guard radius in meters, shared with placement's
/// distance clamping.
pub const DEFAULT_EPSILON_DISTANCE: f64 = 1e-9;

/// A positioned datum with entropy per access and access frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataObject {
    id: String,
    position: Vec3,
    entropy_per_access: f64,
    access_frequency: f64,
}

impl DataObject {
    /// `entropy_per_access` in bits and `access_frequency` in Hz, both
    /// nonnegative; the position must be finite.
    pub fn new(
        id: impl Into<String>,
        position: Vec3,
        entropy_per_access: f64,
        access_frequency: f64,
    ) -> Result<Self> {
        let id = id.into();
        if !position.is_finite() {
            return Err(Error::Domain {
                name: "position",
                value: f64::NAN,
                constraint: "finite components",
            });
        }
        if !(entropy_per_access.is_finite() && entropy_per_access >= 0.0) {
            return Err(Error::domain(
                "entropy_per_access",
                entropy_per_access,
                ">= 0",
            ));
        }
        if !(access_frequency.is_finite() && access_frequency >= 0.0) {
            return Err(Error::domain("access_frequency", access_frequency, ">= 0"));
        }
        let obj = DataObject {
            id,
            position,
            entropy_per_access,
            access_frequency,
        };
        if !obj.mass().is_finite() {
            return Err(Error::domain("mass", obj.mass(), "finite S*f"));
        }
        Ok(obj)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    /// Bits per access.
    pub fn entropy_per_access(&self) -> f64 {
        self.entropy_per_access
    }

    /// Accesses per second.
    pub fn access_frequency(&self) -> f64 {
        self.access_frequency
    }

    /// Information mass `M = S * f` in bits per second.
    pub fn mass(&self) -> f64 {
        self.entropy_per_access * self.access_frequency
    }
}

/// Field evaluation parameters: the energy ratio prefactor, the distance
/// exponent, and the singularity guard radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldParams {
    g_d: f64,
    beta: f64,
    epsilon: f64,
}

impl FieldParams {
    pub fn new(g_d: f64, beta: f64) -> Result<Self> {
        if !(g_d.is_finite() && g_d >= 0.0) {
            return Err(Error::domain("g_d", g_d, ">= 0"));
        }
        if !(beta.is_finite() && beta > 1.0 && beta <= 3.0) {
            return Err(Error::domain("beta", beta, "1 < beta <= 3"));
        }
        Ok(FieldParams {
            g_d,
            beta,
            epsilon: DEFAULT_EPSILON_DISTANCE,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::domain("epsilon", epsilon, "> 0"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn g_d(&self) -> f64 {
        self.g_d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// The superposed field vector at one point, with its Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    point: Vec3,
    field: Vec3,
    magnitude: f64,
}

impl FieldSample {
    fn new(point: Vec3, field: Vec3) -> Self {
        FieldSample {
            point,
            field,
            magnitude: field.norm(),
        }
    }

    pub fn point(&self) -> Vec3 {
        self.point
    }

    pub fn field(&self) -> Vec3 {
        self.field
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }
}

/// Superposed attraction field of `objects` at `point`.
///
/// Each object with mass `M` at distance `d >= epsilon` contributes
/// `g_d * M / d^beta` along the direction from `point` toward it; the
/// contributions sum componentwise. A point closer than `epsilon` to any
/// object is a [`Error::Singularity`] naming that object.
pub fn field_at(objects: &[DataObject], point: Vec3, params: &FieldParams) -> Result<FieldSample> {
    if !point.is_finite() {
        return Err(Error::Domain {
            name: "point",
            value: f64::NAN,
            constraint: "finite components",
        });
    }
    let mut field = Vec3::new(0.0, 0.0, 0.0);
    for obj in objects {
        let toward = obj.position() - point;
        let dist = toward.norm();
        if dist < params.epsilon {
            return Err(Error::Singularity {
                id: obj.id().to_string(),
                distance: dist,
                epsilon: params.epsilon,
            });
        }
        // g_d * M * toward / dist^(beta+1); one power of dist normalizes
        // the direction vector, leaving a 1/d^beta magnitude.
        let scale = params.g_d * obj.mass() / dist.powf(params.beta + 1.0);
        field += toward.scale(scale);
    }
    Ok(FieldSample::new(point, field))
}

/// One grid node: either a field sample or a singularity marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSample {
    pub point: Vec3,
    /// Zero vector when `singular` is set.
    pub field: Vec3,
    pub magnitude: f64,
    /// True when the node fell inside an object's singularity guard.
    pub singular: bool,
}

/// Sample the field on a regular grid over `region`.
///
/// `resolution` gives the node count per axis. An axis with `n >= 2`
/// spans its extent inclusively and must be non-degenerate; an axis
/// with `n = 1` samples the axis midpoint, which is how planar and
/// linear slices are expressed. Nodes inside a singularity guard are
/// emitted with the `singular` marker instead of failing the whole
/// grid. Ordering is row-major with z fastest:
/// `index = (ix * ny + iy) * nz + iz`.
pub fn sample_grid(
    objects: &[DataObject],
    region: &AxisBox,
    resolution: [usize; 3],
    params: &FieldParams,
) -> Result<Vec<GridSample>> {
    let min = region.min().to_array();
    let ext = region.extent().to_array();
    for axis in 0..3 {
        let n = resolution[axis];
        if n == 0 {
            return Err(Error::MalformedRange {
                name: "resolution",
                reason: format!("axis {axis} has zero samples"),
            });
        }
        if n >= 2 && ext[axis] <= 0.0 {
            return Err(Error::DegenerateRegion {
                reason: format!("axis {axis} has zero extent but {n} samples requested"),
            });
        }
    }

    let coord = |axis: usize, i: usize| -> f64 {
        let n = resolution[axis];
        if n == 1 {
            min[axis] + 0.5 * ext[axis]
        } else {
            min[axis] + ext[axis] * (i as f64) / ((n - 1) as f64)
        }
    };

    let [nx, ny, nz] = resolution;
    let mut samples = Vec::with_capacity(nx * ny * nz);
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                let p = Vec3::new(coord(0, ix), coord(1, iy), coord(2, iz));
                match field_at(objects, p, params) {
                    Ok(s) => samples.push(GridSample {
                        point: p,
                        field: s.field(),
                        magnitude: s.magnitude(),
                        singular: false,
                    }),
                    Err(Error::Singularity { .. }) => samples.push(GridSample {
                        point: p,
                        field: Vec3::new(0.0, 0.0, 0.0),
                        magnitude: 0.0,
                        singular: true,
                    }),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(samples)
}
