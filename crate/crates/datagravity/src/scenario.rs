//! The TOML scenario file shared by the CLI and the demo.
//!
//! A scenario bundles one technology profile with optional data
//! objects, compute kernels, a placement region, and slot positions:
//!
//! ```toml
//! version = 1
//!
//! [profile]
//! label = "edge-node"
//! e_compute_pj = 1.31        # pJ per operation
//! alpha = 2.0e-7             # J per (bit * m^beta)
//! beta = 2.0
//! d_ref_m = 1.0              # optional, defaults to 1.0
//! bits_per_access = 64       # optional, defaults to 64
//!
//! [[objects]]
//! id = "weights"
//! position = [0.0, 0.0, 0.0] # meters
//! entropy_per_access = 64.0  # bits
//! access_frequency = 1.0e6   # Hz
//!
//! [[kernels]]
//! id = "matmul"
//! position = [0.1, 0.0, 0.0] # optional starting point
//! [kernels.traffic]
//! weights = 1.0e9            # bits per run
//!
//! [region]
//! min = [-1.0, -1.0, -1.0]
//! max = [1.0, 1.0, 1.0]
//!
//! slots = [[0.5, 0.0, 0.0], [-0.5, 0.0, 0.0]]
//! ```
//!
//! Parsing is strict. Unknown keys are rejected with the offending key
//! and its line; missing required keys are collected and reported all
//! at once rather than one per attempt. Energies cross this boundary
//! in picojoules and are converted to joules on the way in.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::energy::{TechProfile, PICOJOULE};
use crate::geom::{AxisBox, Vec3};
use crate::gravity::DataObject;
use crate::placement::{ComputeKernel, PlacementProblem};
use crate::{Error, Result};

/// The only scenario file version this build reads.
pub const SCENARIO_VERSION: i64 = 1;

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    profile: TechProfile,
    objects: Vec<DataObject>,
    kernels: Vec<ComputeKernel>,
    region: Option<AxisBox>,
    slots: Vec<Vec3>,
}

impl Scenario {
    /// Assemble a scenario from parts, enforcing the same rules as
    /// parsing: unique ids, traffic referring only to known objects,
    /// and slots lying inside a present region.
    pub fn new(
        profile: TechProfile,
        objects: Vec<DataObject>,
        kernels: Vec<ComputeKernel>,
        region: Option<AxisBox>,
        slots: Vec<Vec3>,
    ) -> Result<Self> {
        let scenario = Scenario {
            profile,
            objects,
            kernels,
            region,
            slots,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        let mut ids = std::collections::BTreeSet::new();
        for obj in &self.objects {
            if !ids.insert(obj.id()) {
                return Err(Error::Duplicate {
                    kind: "object",
                    id: obj.id().to_string(),
                });
            }
        }
        let mut kernel_ids = std::collections::BTreeSet::new();
        for kernel in &self.kernels {
            if !kernel_ids.insert(kernel.id()) {
                return Err(Error::Duplicate {
                    kind: "kernel",
                    id: kernel.id().to_string(),
                });
            }
            for object_id in kernel.traffic().keys() {
                if !ids.contains(object_id.as_str()) {
                    return Err(Error::UnknownTrafficTarget {
                        kernel: kernel.id().to_string(),
                        object: object_id.clone(),
                    });
                }
            }
        }
        match &self.region {
            Some(region) => {
                for (i, slot) in self.slots.iter().enumerate() {
                    if !region.contains(*slot) {
                        return Err(Error::Scenario(format!(
                            "slots[{i}] lies outside the region"
                        )));
                    }
                }
            }
            None if !self.slots.is_empty() => {
                return Err(Error::Scenario(
                    "slots require a region to be defined".to_string(),
                ));
            }
            None => {}
        }
        Ok(())
    }

    /// Parse and validate scenario text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        raw.into_scenario()
    }

    /// Serialize back to scenario text. Optional profile fields are
    /// written explicitly, so output is self-describing and stable
    /// under repeated parse and serialize cycles.
    pub fn to_toml(&self) -> Result<String> {
        let raw = RawScenario::from_scenario(self);
        toml::to_string(&raw).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn profile(&self) -> &TechProfile {
        &self.profile
    }

    pub fn objects(&self) -> &[DataObject] {
        &self.objects
    }

    pub fn kernels(&self) -> &[ComputeKernel] {
        &self.kernels
    }

    pub fn region(&self) -> Option<&AxisBox> {
        self.region.as_ref()
    }

    pub fn slots(&self) -> &[Vec3] {
        &self.slots
    }

    /// Build the placement problem this scenario describes. Requires a
    /// region; slots carry over when present.
    pub fn placement_problem(&self) -> Result<PlacementProblem> {
        let region = self.region.ok_or_else(|| {
            Error::Scenario("placement requires a [region] table".to_string())
        })?;
        let problem = PlacementProblem::new(
            self.objects.clone(),
            self.kernels.clone(),
            self.profile.clone(),
            region,
        )?;
        if self.slots.is_empty() {
            Ok(problem)
        } else {
            problem.with_slots(self.slots.clone())
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    version: Option<i64>,
    profile: Option<RawProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objects: Option<Vec<RawObject>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernels: Option<Vec<RawKernel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    region: Option<RawRegion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slots: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    label: Option<String>,
    e_compute_pj: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_ref_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bits_per_access: Option<u32>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    id: Option<String>,
    position: Option<[f64; 3]>,
    entropy_per_access: Option<f64>,
    access_frequency: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    traffic: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    min: Option<[f64; 3]>,
    max: Option<[f64; 3]>,
}

impl RawScenario {
    fn missing_keys(&self) -> Vec<String> {
        let mut missing = Vec::new();
        let mut need = |cond: bool, key: String| {
            if cond {
                missing.push(key);
            }
        };
        need(self.version.is_none(), "version".to_string());
        match &self.profile {
            None => need(true, "profile".to_string()),
            Some(p) => {
                need(p.label.is_none(), "profile.label".to_string());
                need(p.e_compute_pj.is_none(), "profile.e_compute_pj".to_string());
                need(p.alpha.is_none(), "profile.alpha".to_string());
                need(p.beta.is_none(), "profile.beta".to_string());
            }
        }
        for (i, obj) in self.objects.iter().flatten().enumerate() {
            need(obj.id.is_none(), format!("objects[{i}].id"));
            need(obj.position.is_none(), format!("objects[{i}].position"));
            need(
                obj.entropy_per_access.is_none(),
                format!("objects[{i}].entropy_per_access"),
            );
            need(
                obj.access_frequency.is_none(),
                format!("objects[{i}].access_frequency"),
            );
        }
        for (i, kernel) in self.kernels.iter().flatten().enumerate() {
            need(kernel.id.is_none(), format!("kernels[{i}].id"));
        }
        if let Some(region) = &self.region {
            need(region.min.is_none(), "region.min".to_string());
            need(region.max.is_none(), "region.max".to_string());
        }
        missing
    }

    fn into_scenario(self) -> Result<Scenario> {
        let missing = self.missing_keys();
        if !missing.is_empty() {
            return Err(Error::Scenario(format!(
                "missing required keys: {}",
                missing.join(", ")
            )));
        }
        let version = self.version.expect("checked above");
        if version != SCENARIO_VERSION {
            return Err(Error::Scenario(format!(
                "unsupported scenario version {version}; this build reads version {SCENARIO_VERSION}"
            )));
        }
        let raw_profile = self.profile.expect("checked above");
        let mut profile = TechProfile::new(
            raw_profile.label.expect("checked above"),
            raw_profile.e_compute_pj.expect("checked above") * PICOJOULE,
            raw_profile.alpha.expect("checked above"),
            raw_profile.beta.expect("checked above"),
        )?;
        if let Some(d_ref) = raw_profile.d_ref_m {
            profile = profile.with_d_ref(d_ref)?;
        }
        if let Some(bits) = raw_profile.bits_per_access {
            profile = profile.with_bits_per_access(bits)?;
        }

        let mut objects = Vec::new();
        for raw in self.objects.into_iter().flatten() {
            let [x, y, z] = raw.position.expect("checked above");
            objects.push(DataObject::new(
                raw.id.expect("checked above"),
                Vec3::new(x, y, z),
                raw.entropy_per_access.expect("checked above"),
                raw.access_frequency.expect("checked above"),
            )?);
        }

        let mut kernels = Vec::new();
        for raw in self.kernels.into_iter().flatten() {
            let mut kernel =
                ComputeKernel::new(raw.id.expect("checked above"), raw.traffic.unwrap_or_default())?;
            if let Some([x, y, z]) = raw.position {
                kernel = kernel.with_position(Vec3::new(x, y, z))?;
            }
            kernels.push(kernel);
        }

        let region = match self.region {
            Some(raw) => {
                let [ax, ay, az] = raw.min.expect("checked above");
                let [bx, by, bz] = raw.max.expect("checked above");
                Some(AxisBox::new(
                    Vec3::new(ax, ay, az),
                    Vec3::new(bx, by, bz),
                )?)
            }
            None => None,
        };

        let slots = self
            .slots
            .unwrap_or_default()
            .into_iter()
            .map(|[x, y, z]| Vec3::new(x, y, z))
            .collect();

        Scenario::new(profile, objects, kernels, region, slots)
    }

    fn from_scenario(scenario: &Scenario) -> RawScenario {
        let profile = scenario.profile();
        RawScenario {
            version: Some(SCENARIO_VERSION),
            profile: Some(RawProfile {
                label: Some(profile.label().to_string()),
                e_compute_pj: Some(profile.e_compute() / PICOJOULE),
                alpha: Some(profile.alpha()),
                beta: Some(profile.beta()),
                d_ref_m: Some(profile.d_ref()),
                bits_per_access: Some(profile.bits_per_access()),
            }),
            objects: (!scenario.objects.is_empty()).then(|| {
                scenario
                    .objects
                    .iter()
                    .map(|o| RawObject {
                        id: Some(o.id().to_string()),
                        position: Some(o.position().to_array()),
                        entropy_per_access: Some(o.entropy_per_access()),
                        access_frequency: Some(o.access_frequency()),
                    })
                    .collect()
            }),
            kernels: (!scenario.kernels.is_empty()).then(|| {
                scenario
                    .kernels
                    .iter()
                    .map(|k| RawKernel {
                        id: Some(k.id().to_string()),
                        position: k.position().map(Vec3::to_array),
                        traffic: (!k.traffic().is_empty()).then(|| k.traffic().clone()),
                    })
                    .collect()
            }),
            region: scenario.region.map(|r| RawRegion {
                min: Some(r.min().to_array()),
                max: Some(r.max().to_array()),
            }),
            slots: (!scenario.slots.is_empty())
                .then(|| scenario.slots.iter().map(|s| s.to_array()).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const MINIMAL: &str = "\
version = 1

[profile]
label = \"minimal\"
e_compute_pj = 1.31
alpha = 2.0e-7
beta = 2.0
";

    fn full_text() -> String {
        format!(
            "{MINIMAL}\n\
             [[objects]]\n\
             id = \"weights\"\n\
             position = [0.0, 0.25, 0.0]\n\
             entropy_per_access = 64.0\n\
             access_frequency = 1.0e6\n\n\
             [[kernels]]\n\
             id = \"matmul\"\n\
             position = [0.5, 0.0, 0.0]\n\
             [kernels.traffic]\n\
             weights = 1.0e9\n\n\
             [region]\n\
             min = [-1.0, -1.0, -1.0]\n\
             max = [1.0, 1.0, 1.0]\n"
        )
    }

    #[test]
    fn minimal_scenario_parses_with_defaults() {
        let scenario = Scenario::from_toml(MINIMAL).unwrap();
        assert_eq!(scenario.profile().label(), "minimal");
        assert!((scenario.profile().e_compute() - 1.31e-12).abs() < 1e-27);
        assert_eq!(scenario.profile().d_ref(), 1.0);
        assert_eq!(scenario.profile().bits_per_access(), 64);
        assert!(scenario.objects().is_empty());
        assert!(scenario.kernels().is_empty());
        assert!(scenario.region().is_none());
    }

    #[test]
    fn full_scenario_parses_every_section() {
        let scenario = Scenario::from_toml(&full_text()).unwrap();
        assert_eq!(scenario.objects().len(), 1);
        assert_eq!(scenario.objects()[0].mass(), 6.4e7);
        assert_eq!(scenario.kernels().len(), 1);
        assert_eq!(scenario.kernels()[0].traffic()["weights"], 1.0e9);
        assert_eq!(
            scenario.kernels()[0].position(),
            Some(Vec3::new(0.5, 0.0, 0.0))
        );
        let region = scenario.region().unwrap();
        assert_eq!(region.min(), Vec3::new(-1.0, -1.0, -1.0));
        let problem = scenario.placement_problem().unwrap();
        assert_eq!(problem.kernels().len(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = format!("{MINIMAL}frequency_hz = 3.0\n");
        let err = Scenario::from_toml(&text).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("frequency_hz"), "{message}");
        assert!(message.contains("line"), "{message}");
    }

    #[test]
    fn missing_keys_are_reported_together() {
        let text = "\
[profile]
label = \"broken\"
beta = 2.0

[[objects]]
position = [0.0, 0.0, 0.0]
entropy_per_access = 1.0
";
        let err = Scenario::from_toml(text).unwrap_err();
        let message = err.to_string();
        for key in [
            "version",
            "profile.e_compute_pj",
            "profile.alpha",
            "objects[0].id",
            "objects[0].access_frequency",
        ] {
            assert!(message.contains(key), "missing `{key}` in: {message}");
        }
        assert!(!message.contains("profile.label"), "{message}");
    }

    #[test]
    fn wrong_version_is_refused() {
        let text = MINIMAL.replace("version = 1", "version = 2");
        let err = Scenario::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("version 2"), "{err}");
    }

    #[test]
    fn traffic_must_reference_known_objects() {
        let text = format!(
            "{MINIMAL}\n[[kernels]]\nid = \"k\"\n[kernels.traffic]\nghost = 1.0\n"
        );
        let err = Scenario::from_toml(&text).unwrap_err();
        match err {
            Error::UnknownTrafficTarget { kernel, object } => {
                assert_eq!(kernel, "k");
                assert_eq!(object, "ghost");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_object_ids_are_refused() {
        let text = format!(
            "{MINIMAL}\n\
             [[objects]]\nid = \"a\"\nposition = [0.0, 0.0, 0.0]\nentropy_per_access = 1.0\naccess_frequency = 1.0\n\n\
             [[objects]]\nid = \"a\"\nposition = [1.0, 0.0, 0.0]\nentropy_per_access = 1.0\naccess_frequency = 1.0\n"
        );
        assert!(matches!(
            Scenario::from_toml(&text),
            Err(Error::Duplicate { kind: "object", .. })
        ));
    }

    #[test]
    fn slots_need_a_region_and_must_fit_inside_it() {
        // slots is a top-level key, so it goes before the first table
        let with_slots =
            |slot: &str| MINIMAL.replace("version = 1", &format!("version = 1\nslots = [{slot}]"));
        let no_region = with_slots("[0.0, 0.0, 0.0]");
        assert!(Scenario::from_toml(&no_region).is_err());
        let region = "\n[region]\nmin = [-1.0, -1.0, -1.0]\nmax = [1.0, 1.0, 1.0]\n";
        let outside = format!("{}{region}", with_slots("[5.0, 0.0, 0.0]"));
        let err = Scenario::from_toml(&outside).unwrap_err();
        assert!(err.to_string().contains("slots[0]"), "{err}");
        let inside = format!("{}{region}", with_slots("[0.5, 0.0, 0.0]"));
        let scenario = Scenario::from_toml(&inside).unwrap();
        assert_eq!(scenario.slots().len(), 1);
    }

    #[test]
    fn placement_problem_requires_a_region() {
        let scenario = Scenario::from_toml(MINIMAL).unwrap();
        assert!(scenario.placement_problem().is_err());
    }

    fn random_scenario_text(rng: &mut ChaCha8Rng) -> String {
        let mut text = format!(
            "version = 1\n\n[profile]\nlabel = \"r{}\"\ne_compute_pj = {}\nalpha = {}\nbeta = {}\n",
            rng.gen::<u32>(),
            rng.gen::<f64>() * 100.0 + 0.01,
            rng.gen::<f64>() * 1e-6 + 1e-12,
            1.0 + rng.gen::<f64>().max(1e-6) * 2.0,
        );
        let n_objects = rng.gen_range(0..4);
        for i in 0..n_objects {
            text.push_str(&format!(
                "\n[[objects]]\nid = \"o{i}\"\nposition = [{}, {}, {}]\nentropy_per_access = {}\naccess_frequency = {}\n",
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 128.0,
                rng.gen::<f64>() * 1e9,
            ));
        }
        for i in 0..rng.gen_range(0..3) {
            text.push_str(&format!("\n[[kernels]]\nid = \"k{i}\"\n"));
            if n_objects > 0 && rng.gen::<bool>() {
                text.push_str(&format!(
                    "[kernels.traffic]\no0 = {}\n",
                    rng.gen::<f64>() * 1e6
                ));
            }
        }
        if rng.gen::<bool>() {
            text.push_str("\n[region]\nmin = [-2.0, -2.0, -2.0]\nmax = [2.0, 2.0, 2.0]\n");
        }
        text
    }

    #[test]
    fn parse_serialize_parse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5CE4);
        for _ in 0..25 {
            let text = random_scenario_text(&mut rng);
            let first = Scenario::from_toml(&text).unwrap();
            let serialized = first.to_toml().unwrap();
            let second = Scenario::from_toml(&serialized).expect(&serialized);
            assert_eq!(first, second, "round trip changed the scenario:\n{serialized}");
            let third_text = second.to_toml().unwrap();
            assert_eq!(serialized, third_text, "serialization is not stable");
        }
    }
}
