//! Browser bindings for the data-gravity models.
//!
//! Three interactive operations, each crossing the JS boundary as
//! either a pixel buffer or a JSON string:
//!
//! - [`FieldScene`] renders the gravity field of a scenario as an RGBA
//!   heatmap over a horizontal slice, for painting onto a canvas.
//! - [`advantage_curve`] tabulates the advantage factor and its lower
//!   bound against the distance ratio, for a line chart.
//! - [`placement_path`] runs the continuous placement optimizer with
//!   tracing on and returns each kernel's descent path, for animation.
//!
//! The exported functions delegate to plain fallible functions so the
//! crate builds and tests on the host, where `JsError` cannot exist;
//! `wasm-pack build --target web` produces the browser package (see
//! the repository README).

use wasm_bindgen::prelude::*;

use datagravity::advantage::{advantage_lower_bound, AdvantageInputs};
use datagravity::gravity::{field_at, FieldParams};
use datagravity::placement::{optimize_continuous, PlacementConfig, PlacementStatus};
use datagravity::scenario::Scenario;
use datagravity::Vec3;

/// Scenario preloaded into the page so every control works before the
/// user edits anything.
#[wasm_bindgen]
pub fn default_scenario() -> String {
    include_str!("demo_scenario.toml").to_string()
}

/// Advantage factor and lower bound on a log grid of distance ratios.
///
/// Returns a JSON array of `{r, gamma, bound, condition}` rows with
/// `samples` entries spanning `r` from 1e-6 to 1.
#[wasm_bindgen]
pub fn advantage_curve(g_d: f64, beta: f64, samples: usize) -> Result<String, JsError> {
    try_advantage_curve(g_d, beta, samples).map_err(|e| JsError::new(&e))
}

fn try_advantage_curve(g_d: f64, beta: f64, samples: usize) -> Result<String, String> {
    if samples < 2 {
        return Err("samples must be at least 2".to_string());
    }
    let bound = advantage_lower_bound(g_d, beta).map_err(|e| e.to_string())?;
    let (lo, hi) = (1e-6f64.ln(), 1.0f64.ln());
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let r = (lo + t * (hi - lo)).exp().min(1.0);
        let inputs = AdvantageInputs::from_ratio(g_d, beta, r).map_err(|e| e.to_string())?;
        rows.push(serde_json::json!({
            "r": r,
            "gamma": inputs.advantage_factor(),
            "bound": bound,
            "condition": inputs.colocation_condition(),
        }));
    }
    Ok(serde_json::Value::Array(rows).to_string())
}

/// A parsed scenario plus the field parameters derived from its
/// profile, ready to render repeatedly at different slices.
#[wasm_bindgen]
#[derive(Debug)]
pub struct FieldScene {
    scenario: Scenario,
    params: FieldParams,
}

#[wasm_bindgen]
impl FieldScene {
    /// Parse scenario text. Fails with the scenario's own diagnostic
    /// on malformed input.
    #[wasm_bindgen(constructor)]
    pub fn new(scenario_toml: &str) -> Result<FieldScene, JsError> {
        FieldScene::build(scenario_toml).map_err(|e| JsError::new(&e))
    }

    fn build(scenario_toml: &str) -> Result<FieldScene, String> {
        let scenario = Scenario::from_toml(scenario_toml).map_err(|e| e.to_string())?;
        if scenario.region().is_none() {
            return Err("the scenario needs a [region] to render".to_string());
        }
        let profile = scenario.profile();
        let params = FieldParams::new(
            profile
                .disjunction_at(profile.d_ref())
                .map_err(|e| e.to_string())?,
            profile.beta(),
        )
        .map_err(|e| e.to_string())?;
        Ok(FieldScene { scenario, params })
    }

    /// Region corners as JSON `{min: [x,y,z], max: [x,y,z]}`, meters.
    pub fn region(&self) -> String {
        let region = self.scenario.region().expect("checked in the constructor");
        serde_json::json!({
            "min": region.min().to_array(),
            "max": region.max().to_array(),
        })
        .to_string()
    }

    /// Data objects as JSON rows with positions and masses, for
    /// drawing markers over the heatmap.
    pub fn objects(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .scenario
            .objects()
            .iter()
            .map(|o| {
                serde_json::json!({
                    "id": o.id(),
                    "x": o.position().x,
                    "y": o.position().y,
                    "z": o.position().z,
                    "mass": o.mass(),
                })
            })
            .collect();
        serde_json::Value::Array(rows).to_string()
    }

    /// Kernel start positions (where given) as JSON rows.
    pub fn kernels(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .scenario
            .kernels()
            .iter()
            .map(|k| {
                serde_json::json!({
                    "id": k.id(),
                    "position": k.position().map(|p| p.to_array()),
                })
            })
            .collect();
        serde_json::Value::Array(rows).to_string()
    }

    /// Field magnitude over the horizontal slice at height `z`,
    /// rendered into a `width * height * 4` RGBA buffer, row-major
    /// from the region's minimum y so the canvas can be painted
    /// directly. Magnitudes are tone-mapped on a log scale; singular
    /// pixels (on top of an object) come out white.
    pub fn heatmap_rgba(&self, width: usize, height: usize, z: f64) -> Result<Vec<u8>, JsError> {
        self.render(width, height, z).map_err(|e| JsError::new(&e))
    }

    fn render(&self, width: usize, height: usize, z: f64) -> Result<Vec<u8>, String> {
        if width < 2 || height < 2 {
            return Err("heatmap needs at least 2x2 pixels".to_string());
        }
        let region = self.scenario.region().expect("checked in the constructor");
        let (min, max) = (region.min(), region.max());
        let objects = self.scenario.objects();

        let mut magnitudes = vec![0.0f64; width * height];
        let mut singular = vec![false; width * height];
        for iy in 0..height {
            let y = min.y + (max.y - min.y) * iy as f64 / (height - 1) as f64;
            for ix in 0..width {
                let x = min.x + (max.x - min.x) * ix as f64 / (width - 1) as f64;
                let index = iy * width + ix;
                match field_at(objects, Vec3::new(x, y, z), &self.params) {
                    Ok(sample) => magnitudes[index] = sample.magnitude(),
                    Err(_) => singular[index] = true,
                }
            }
        }

        let finite_logs: Vec<f64> = magnitudes
            .iter()
            .zip(&singular)
            .filter(|&(m, &s)| !s && *m > 0.0)
            .map(|(m, _)| m.ln())
            .collect();
        let (lo, hi) = match (
            finite_logs.iter().cloned().reduce(f64::min),
            finite_logs.iter().cloned().reduce(f64::max),
        ) {
            (Some(lo), Some(hi)) if hi > lo => (lo, hi),
            (Some(v), _) => (v - 1.0, v + 1.0),
            _ => (0.0, 1.0),
        };

        let mut rgba = vec![0u8; width * height * 4];
        for index in 0..width * height {
            let color = if singular[index] {
                [255, 255, 255]
            } else if magnitudes[index] == 0.0 {
                COLD
            } else {
                let t = (magnitudes[index].ln() - lo) / (hi - lo);
                ramp(t.clamp(0.0, 1.0))
            };
            rgba[index * 4] = color[0];
            rgba[index * 4 + 1] = color[1];
            rgba[index * 4 + 2] = color[2];
            rgba[index * 4 + 3] = 255;
        }
        Ok(rgba)
    }
}

const COLD: [u8; 3] = [18, 24, 58];
const WARM: [u8; 3] = [208, 90, 28];
const HOT: [u8; 3] = [252, 232, 164];

/// Two-segment linear ramp through the cold, warm, and hot stops.
fn ramp(t: f64) -> [u8; 3] {
    let lerp = |a: [u8; 3], b: [u8; 3], t: f64| {
        let channel = |i: usize| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * t).round() as u8;
        [channel(0), channel(1), channel(2)]
    };
    if t < 0.5 {
        lerp(COLD, WARM, t * 2.0)
    } else {
        lerp(WARM, HOT, (t - 0.5) * 2.0)
    }
}

/// Continuous placement with tracing, as JSON:
/// `{converged, objective, placements: [{kernel, position, energy}],
/// traces: [{kernel, path, objective}]}`. Distances are meters and
/// energies joules, matching the library.
///
/// The seed is a JS-safe 32-bit value; omit it for the deterministic
/// default starts.
#[wasm_bindgen]
pub fn placement_path(scenario_toml: &str, seed: Option<u32>) -> Result<String, JsError> {
    try_placement_path(scenario_toml, seed.map(u64::from)).map_err(|e| JsError::new(&e))
}

fn try_placement_path(scenario_toml: &str, seed: Option<u64>) -> Result<String, String> {
    let scenario = Scenario::from_toml(scenario_toml).map_err(|e| e.to_string())?;
    let problem = scenario.placement_problem().map_err(|e| e.to_string())?;
    let mut config = PlacementConfig::default();
    config.seed = seed;
    config.record_trace = true;
    let solution = optimize_continuous(&problem, &config).map_err(|e| e.to_string())?;
    let placements: Vec<serde_json::Value> = solution
        .placements
        .iter()
        .map(|p| {
            serde_json::json!({
                "kernel": p.kernel,
                "position": p.status.position().map(|v| v.to_array()),
                "unplaced": matches!(p.status, PlacementStatus::Unplaced),
                "energy": p.energy,
            })
        })
        .collect();
    let traces: Vec<serde_json::Value> = solution
        .trace
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|t| {
            serde_json::json!({
                "kernel": t.kernel,
                "path": t.path.iter().map(|p| p.to_array()).collect::<Vec<_>>(),
                "objective": t.objective,
            })
        })
        .collect();
    Ok(serde_json::json!({
        "converged": solution.converged,
        "objective": solution.objective,
        "placements": placements,
        "traces": traces,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// serde_json parses floats with best-effort precision, so values
    /// read back from the payloads can differ from the originals by an
    /// ulp or two.
    fn close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn default_scenario_parses_and_renders() {
        let toml = default_scenario();
        let scene = FieldScene::build(&toml).unwrap();
        let rgba = scene.render(32, 24, 0.0).unwrap();
        assert_eq!(rgba.len(), 32 * 24 * 4);
        assert!(rgba.chunks(4).all(|px| px[3] == 255));
        let distinct: std::collections::BTreeSet<[u8; 3]> =
            rgba.chunks(4).map(|px| [px[0], px[1], px[2]]).collect();
        assert!(distinct.len() > 8, "heatmap is flat: {} colors", distinct.len());
    }

    #[test]
    fn heatmap_brightens_toward_the_heaviest_object() {
        let scene = FieldScene::build(&default_scenario()).unwrap();
        let (w, h) = (41usize, 41usize);
        let rgba = scene.render(w, h, 0.0).unwrap();
        let brightness = |ix: usize, iy: usize| {
            let px = &rgba[(iy * w + ix) * 4..][..3];
            px.iter().map(|&c| c as u32).sum::<u32>()
        };
        // "weights" sits at (0, 0.45): brighter near it than at the
        // far corner of the region.
        let near = brightness(20, 29);
        let corner = brightness(0, 0);
        assert!(near > corner, "near {near} <= corner {corner}");
    }

    #[test]
    fn region_and_objects_serialize() {
        let scene = FieldScene::build(&default_scenario()).unwrap();
        let region: serde_json::Value = serde_json::from_str(&scene.region()).unwrap();
        assert_eq!(region["min"].as_array().unwrap().len(), 3);
        assert_eq!(region["max"][0].as_f64().unwrap(), 1.0);
        let objects: serde_json::Value = serde_json::from_str(&scene.objects()).unwrap();
        let objects = objects.as_array().unwrap();
        assert_eq!(objects.len(), 3);
        for object in objects {
            assert!(object["mass"].as_f64().unwrap() > 0.0);
        }
        let kernels: serde_json::Value = serde_json::from_str(&scene.kernels()).unwrap();
        assert_eq!(kernels.as_array().unwrap().len(), 2);
    }

    #[test]
    fn scene_requires_a_region() {
        let text = "\
version = 1

[profile]
label = \"p\"
e_compute_pj = 1.31
alpha = 2.0e-7
beta = 2.0
";
        let err = FieldScene::build(text).unwrap_err();
        assert!(err.contains("region"), "unexpected error: {err}");
    }

    #[test]
    fn advantage_curve_matches_the_library() {
        let rows: serde_json::Value =
            serde_json::from_str(&try_advantage_curve(1000.0, 2.0, 64).unwrap()).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 64);
        let bound = advantage_lower_bound(1000.0, 2.0).unwrap();
        for row in rows {
            let r = row["r"].as_f64().unwrap();
            let expected = AdvantageInputs::from_ratio(1000.0, 2.0, r)
                .unwrap()
                .advantage_factor();
            close(row["gamma"].as_f64().unwrap(), expected);
            close(row["bound"].as_f64().unwrap(), bound);
        }
        close(rows[0]["r"].as_f64().unwrap(), 1e-6);
        close(rows[63]["r"].as_f64().unwrap(), 1.0);
        assert_eq!(rows[0]["condition"], true);
        assert_eq!(rows[63]["condition"], false);
    }

    #[test]
    fn advantage_curve_rejects_bad_inputs() {
        assert!(try_advantage_curve(1000.0, 2.0, 1).is_err());
        assert!(try_advantage_curve(0.5, 2.0, 16).is_err());
        assert!(try_advantage_curve(1000.0, 5.0, 16).is_err());
    }

    #[test]
    fn placement_path_traces_every_kernel() {
        let result: serde_json::Value =
            serde_json::from_str(&try_placement_path(&default_scenario(), Some(7)).unwrap())
                .unwrap();
        assert_eq!(result["converged"], true);
        let traces = result["traces"].as_array().unwrap();
        let placements = result["placements"].as_array().unwrap();
        assert_eq!(traces.len(), placements.len());
        for (trace, placement) in traces.iter().zip(placements) {
            let path = trace["path"].as_array().unwrap();
            let objective = trace["objective"].as_array().unwrap();
            assert!(!path.is_empty());
            assert_eq!(path.len(), objective.len());
            assert_eq!(path.last().unwrap(), &placement["position"]);
            assert_eq!(placement["unplaced"], false);
            assert!(placement["energy"].as_f64().unwrap() > 0.0);
        }
    }

    #[test]
    fn placement_path_is_deterministic_per_seed() {
        let toml = default_scenario();
        let first = try_placement_path(&toml, Some(42)).unwrap();
        let second = try_placement_path(&toml, Some(42)).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rejects_malformed_scenarios() {
        assert!(FieldScene::build("version = 3").is_err());
        assert!(try_placement_path("not toml at all [", None).is_err());
    }
}
