//! Scenario files: the on-disk task description consumed by the CLI.
//!
//! A scenario declares its length unit (`m` or `mm`), the table, gripper,
//! cable (with its initial centerline polyline) and the slot list in
//! routing order, plus optional render/sim/plan parameter overrides and the
//! seed all randomness flows from. Loading converts lengths to SI; saving
//! writes the struct back verbatim, so load -> save -> load is identity.
//!
//! The `generate` submodule builds the seeded scenario families used by the
//! batch harness: easy routing scenes, low-rigidity variants, a
//! large-axis-change scene, preprocessing exercises and the perception
//! calibration scenes.

use crate::geometry::FingernailProfile;
use crate::grasp::SegmentLengthConvention;
use crate::perception::RenderParams;
use crate::plan::PlanParams;
use crate::scene::{
    resample_polyline, CableSpec, GripperSpec, Rigidity, Scene, SceneError, SlotPose, SlotSpec,
};
use crate::sim::SimParams;
use crate::Point;
use serde::{Deserialize, Serialize};
use std::io::Read;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
}

impl From<SceneError> for ScenarioError {
    fn from(e: SceneError) -> Self {
        ScenarioError::Schema(e.to_string())
    }
}

/// Length unit of every geometric quantity in the file. Linear density is
/// always kg/m and speeds/times (plan/sim overrides) are always SI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    M,
    Mm,
}

impl Units {
    pub fn to_meters(&self) -> f64 {
        match self {
            Units::M => 1.0,
            Units::Mm => 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperDef {
    pub body_width: f64,
    pub fingernail_height: f64,
    pub outer_profile_radius: f64,
    pub stroke_min: f64,
    pub stroke_max: f64,
    pub nail_inner_radius: f64,
    pub nail_outer_radius: f64,
    pub nail_tip_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableDef {
    /// Reporting category, e.g. "USB cable".
    pub category: String,
    pub total_length: f64,
    pub diameter: f64,
    /// kg/m, unit-independent.
    pub linear_density: f64,
    pub rigidity: Rigidity,
    /// Node count Q of the backbone chain.
    #[serde(default = "default_node_count")]
    pub node_count: usize,
    /// Initial centerline, fixed end first.
    pub polyline: Vec<[f64; 3]>,
}

fn default_node_count() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDef {
    pub width: f64,
    pub height: f64,
    pub max_radius: f64,
    pub center: [f64; 3],
    pub axis: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderDef {
    pub pitch: f64,
    pub camera_height: f64,
    #[serde(default)]
    pub noise_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub id: String,
    pub units: Units,
    pub seed: u64,
    pub table_height: f64,
    pub gripper: GripperDef,
    pub cable: CableDef,
    /// Routing order, fixed end first.
    pub slots: Vec<SlotDef>,
    #[serde(default)]
    pub render: Option<RenderDef>,
    #[serde(default)]
    pub sim: Option<SimParams>,
    #[serde(default)]
    pub plan: Option<PlanParams>,
    #[serde(default)]
    pub segment_length_convention: SegmentLengthConvention,
}

impl ScenarioFile {
    /// Build the SI scene plus derived render parameters.
    pub fn to_scene(&self) -> Result<(Scene, RenderParams), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.slots.is_empty() {
            return Err(ScenarioError::Schema("scenario needs at least one slot".into()));
        }
        if self.cable.polyline.len() < 2 {
            return Err(ScenarioError::Schema(
                "cable polyline needs at least two points".into(),
            ));
        }
        if self.cable.node_count < 3 {
            return Err(ScenarioError::Schema("node_count must be at least 3".into()));
        }
        let u = self.units.to_meters();

        let profile = FingernailProfile::new(
            self.gripper.nail_inner_radius * u,
            self.gripper.nail_outer_radius * u,
            self.gripper.nail_tip_height * u,
        )
        .map_err(|e| ScenarioError::Schema(e.to_string()))?;
        let gripper = GripperSpec {
            body_width: self.gripper.body_width * u,
            fingernail_height: self.gripper.fingernail_height * u,
            outer_profile_radius: self.gripper.outer_profile_radius * u,
            stroke_range: (self.gripper.stroke_min * u, self.gripper.stroke_max * u),
            profile,
        };

        let cable = CableSpec {
            total_length: self.cable.total_length * u,
            diameter: self.cable.diameter * u,
            linear_density: self.cable.linear_density,
            rigidity: self.cable.rigidity,
        };

        let polyline: Vec<Point> = self
            .cable
            .polyline
            .iter()
            .map(|p| Point::new(p[0] * u, p[1] * u, p[2] * u))
            .collect();
        let cable_state = resample_polyline(&polyline, self.cable.node_count)?;

        let mut slots = Vec::with_capacity(self.slots.len());
        for s in &self.slots {
            let spec = SlotSpec {
                width: s.width * u,
                height: s.height * u,
                max_radius: s.max_radius * u,
            };
            spec.validate()?;
            let pose = SlotPose::new(
                Point::new(s.center[0] * u, s.center[1] * u, s.center[2] * u),
                crate::Vec3::new(s.axis[0], s.axis[1], s.axis[2]),
            )?;
            slots.push((spec, pose));
        }

        let scene = Scene {
            slots,
            cable,
            cable_state,
            gripper,
            table_height: self.table_height * u,
        };
        scene.validate()?;

        let render = self.render_params(&scene);
        Ok((scene, render))
    }

    /// Render parameters: from the file when declared, otherwise fitted to
    /// the scene content with a safety margin.
    fn render_params(&self, scene: &Scene) -> RenderParams {
        let u = self.units.to_meters();
        let (pitch, camera_height, noise_sigma) = match &self.render {
            Some(r) => (r.pitch * u, r.camera_height * u, r.noise_sigma * u),
            None => (2.5e-3, scene.table_height + 1.0, 0.0),
        };
        let margin = 0.12;
        let mut min_x = f64::INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for (spec, pose) in &scene.slots {
            min_x = min_x.min(pose.center.x - spec.max_radius);
            min_y = min_y.min(pose.center.y - spec.max_radius);
            max_x = max_x.max(pose.center.x + spec.max_radius);
            max_y = max_y.max(pose.center.y + spec.max_radius);
        }
        for n in &scene.cable_state.nodes {
            min_x = min_x.min(n.x);
            min_y = min_y.min(n.y);
            max_x = max_x.max(n.x);
            max_y = max_y.max(n.y);
        }
        // Snap the origin to a pitch multiple so world-aligned features sit
        // on exact pixel centers regardless of margins.
        let origin_x = ((min_x - margin) / pitch).floor() * pitch;
        let origin_y = ((min_y - margin) / pitch).floor() * pitch;
        RenderParams {
            width: ((max_x + margin - origin_x) / pitch).ceil() as usize + 1,
            height: ((max_y + margin - origin_y) / pitch).ceil() as usize + 1,
            pitch,
            origin: (origin_x, origin_y),
            camera_height,
            noise_sigma,
        }
    }

    pub fn sim_params(&self) -> SimParams {
        self.sim.unwrap_or_default()
    }

    pub fn plan_params(&self) -> PlanParams {
        self.plan.unwrap_or_default()
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile, ScenarioError> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    Ok(file)
}

pub fn save_scenario(file: &ScenarioFile, path: &Path) -> Result<(), ScenarioError> {
    let text = serde_json::to_string_pretty(file).map_err(ScenarioError::Parse)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Seeded scenario families for the batch harness and tests.
pub mod generate {
    use super::*;
    use crate::Vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SLOT_HEIGHT: f64 = 0.06;
    const SLOT_MAX_RADIUS: f64 = 0.04;
    const GRIPPER_OUTER_RADIUS: f64 = 0.06;
    /// Exclusion radius implied by the constants above.
    pub const EXCLUSION_RADIUS: f64 = SLOT_MAX_RADIUS + GRIPPER_OUTER_RADIUS;

    fn gripper_def(cable_diameter: f64) -> GripperDef {
        let nail_inner = cable_diameter / 2.0 + 0.01;
        GripperDef {
            body_width: 0.03,
            fingernail_height: 0.03,
            outer_profile_radius: GRIPPER_OUTER_RADIUS,
            stroke_min: 0.0,
            stroke_max: 0.14_f64.max(cable_diameter + 0.02),
            nail_inner_radius: nail_inner,
            nail_outer_radius: 1.6 * nail_inner,
            nail_tip_height: 0.03,
        }
    }

    fn slot_def(center: Point, axis: Vec3, cable_diameter: f64) -> SlotDef {
        SlotDef {
            width: (1.5 * cable_diameter).max(0.008),
            height: SLOT_HEIGHT,
            max_radius: SLOT_MAX_RADIUS,
            center: [center.x, center.y, center.z],
            axis: [axis.x, axis.y, axis.z],
        }
    }

    fn dir(theta: f64) -> Vec3 {
        Vec3::new(theta.cos(), theta.sin(), 0.0)
    }

    /// Serpentine cable polyline steered around the slot exclusion zones.
    fn steer_polyline(
        rng: &mut ChaCha8Rng,
        start: Point,
        initial_heading: f64,
        total_length: f64,
        slot_centers: &[Point],
        wiggle: f64,
        z: f64,
    ) -> Vec<[f64; 3]> {
        let step = 0.02;
        let steps = (total_length / step).round() as usize;
        let clear = EXCLUSION_RADIUS + 0.05;
        let mut points = vec![[start.x, start.y, z]];
        let mut heading = initial_heading;
        let mut p = start;
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let period: f64 = rng.random_range(28.0..44.0);
        for i in 0..steps {
            let mut desired = dir(heading)
                + dir(heading + std::f64::consts::FRAC_PI_2)
                    * (wiggle * (std::f64::consts::TAU * i as f64 / period + phase).sin());
            for c in slot_centers {
                let d = Vec3::new(p.x - c.x, p.y - c.y, 0.0);
                let dist = d.norm();
                if dist < clear && dist > 1e-9 {
                    desired += d / dist * (2.5 * (clear - dist) / clear);
                }
            }
            let mut diff = desired.y.atan2(desired.x) - heading;
            while diff > std::f64::consts::PI {
                diff -= std::f64::consts::TAU;
            }
            while diff < -std::f64::consts::PI {
                diff += std::f64::consts::TAU;
            }
            heading += diff.clamp(-0.12, 0.12);
            p += dir(heading) * step;
            points.push([p.x, p.y, z]);
        }
        points
    }

    fn polyline_clear_of(points: &[[f64; 3]], centers: &[Point], radius: f64) -> bool {
        points.iter().all(|p| {
            centers
                .iter()
                .all(|c| (p[0] - c.x).hypot(p[1] - c.y) >= radius)
        })
    }

    /// Routing scenario with slot axes along the routing path, consecutive
    /// axis changes bounded by 60 degrees, and the cable initially clear of
    /// every exclusion zone.
    pub fn routing(seed: u64, k: usize, rigidity: Rigidity, diameter: f64, category: &str) -> ScenarioFile {
        assert!((1..=4).contains(&k));
        for attempt in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(attempt));
            let z_cable = 0.0 + diameter / 2.0;
            let fixed = Point::new(0.15, 0.55, z_cable);

            // Slot chain along a turning path.
            let h0: f64 = rng.random_range(-0.25..0.25);
            let mut headings = vec![h0];
            for _ in 1..k {
                let turn: f64 = rng.random_range(-0.78..0.78); // |turn| <= ~45 deg
                headings.push(headings.last().unwrap() + turn);
            }
            let mut centers = Vec::with_capacity(k);
            let mut c = Point::new(fixed.x, fixed.y, SLOT_HEIGHT / 2.0) + dir(h0) * 0.45;
            centers.push(c);
            for &h in &headings[1..] {
                let spacing: f64 = rng.random_range(0.26..0.33);
                c = c + dir(h) * spacing;
                centers.push(c);
            }
            // Axis: routing heading plus a small jitter (<= 7 deg), keeping
            // consecutive axis changes under 60 degrees.
            let axes: Vec<Vec3> = headings
                .iter()
                .map(|h| dir(h + rng.random_range(-0.12..0.12)))
                .collect();

            // Cable: from the fixed end toward slot 1, meandering clear of
            // the zones, long enough to route through every slot.
            let path_len = 0.45 + 0.30 * (k as f64 - 1.0);
            let total_length = path_len + 0.45;
            let aim = (centers[0].y - fixed.y).atan2(centers[0].x - fixed.x);
            let wiggle = rng.random_range(0.25..0.45);
            let polyline = steer_polyline(
                &mut rng,
                fixed,
                aim + rng.random_range(-0.3..0.3),
                total_length,
                &centers,
                wiggle,
                z_cable,
            );
            if !polyline_clear_of(&polyline, &centers, EXCLUSION_RADIUS + 5e-3) {
                continue;
            }

            return ScenarioFile {
                schema_version: SCHEMA_VERSION,
                id: format!("{category}-{:.0}mm-{rigidity}-k{k}-s{seed}", diameter * 1e3),
                units: Units::M,
                seed,
                table_height: 0.0,
                gripper: gripper_def(diameter),
                cable: CableDef {
                    category: category.to_string(),
                    total_length,
                    diameter,
                    linear_density: 0.03 + diameter * 2.0,
                    rigidity,
                    node_count: 20,
                    polyline,
                },
                slots: centers
                    .iter()
                    .zip(&axes)
                    .map(|(c, a)| slot_def(*c, *a, diameter))
                    .collect(),
                render: None,
                sim: None,
                plan: None,
                segment_length_convention: SegmentLengthConvention::NodeFraction,
            };
        }
        panic!("routing scenario generation did not converge for seed {seed}");
    }

    /// Two slots whose axes differ by more than 75 degrees while the path
    /// keeps going straight: the cable cannot align with the second slot.
    pub fn large_axis_change(seed: u64) -> ScenarioFile {
        let diameter = 0.006;
        let mut file = routing(seed, 1, Rigidity::Medium, diameter, "misalign-probe");
        let first = &file.slots[0];
        let axis = Vec3::new(first.axis[0], first.axis[1], 0.0);
        let center = Point::new(first.center[0], first.center[1], first.center[2]);
        let second_center = center + axis * 0.30;
        // Rotate the axis by ~82 degrees.
        let a = 82.0_f64.to_radians();
        let rotated = Vec3::new(
            axis.x * a.cos() - axis.y * a.sin(),
            axis.x * a.sin() + axis.y * a.cos(),
            0.0,
        );
        file.slots.push(slot_def(second_center, rotated, diameter));
        file.id = format!("large-axis-change-s{seed}");
        // Extra length so the cable can still span the second slot.
        file.cable.total_length += 0.30;
        file
    }

    /// Single-slot scene with the cable passing through the exclusion zone
    /// but clearable by translation (the fixed end stays well outside).
    pub fn preprocess_feasible(seed: u64) -> ScenarioFile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x51ed_2701));
        let diameter = 0.006;
        let z = diameter / 2.0;
        let fixed = Point::new(0.1, 0.4, z);
        // Straight-ish cable along +x with a gentle bow.
        let mut polyline = Vec::new();
        let n = 46;
        let bow: f64 = rng.random_range(-0.03..0.03);
        for i in 0..=n {
            let t = i as f64 / n as f64;
            polyline.push([
                fixed.x + 0.9 * t,
                fixed.y + bow * (std::f64::consts::PI * t).sin(),
                z,
            ]);
        }
        // Slot center a clearable distance from the cable midline.
        let offset: f64 = rng.random_range(0.045..0.085);
        let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let along: f64 = rng.random_range(0.35..0.65);
        let center = Point::new(
            fixed.x + 0.9 * along,
            fixed.y + side * offset,
            SLOT_HEIGHT / 2.0,
        );
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            id: format!("preprocess-feasible-s{seed}"),
            units: Units::M,
            seed,
            table_height: 0.0,
            gripper: gripper_def(diameter),
            cable: CableDef {
                category: "preprocess".to_string(),
                total_length: 0.9 + bow.abs(),
                diameter,
                linear_density: 0.05,
                rigidity: Rigidity::Medium,
                node_count: 20,
                polyline,
            },
            slots: vec![slot_def(center, Vec3::x(), diameter)],
            render: None,
            sim: None,
            plan: None,
            segment_length_convention: SegmentLengthConvention::NodeFraction,
        }
    }

    /// The fixed end itself sits inside the exclusion zone: no translation
    /// can clear it, so preprocessing must hit its iteration cap.
    pub fn preprocess_adversarial(seed: u64) -> ScenarioFile {
        let mut file = preprocess_feasible(seed);
        let first = file.cable.polyline[0];
        file.slots[0].center = [first[0] + 0.04, first[1], SLOT_HEIGHT / 2.0];
        file.id = format!("preprocess-adversarial-s{seed}");
        file
    }

    /// Noise-free perception calibration scene: `k` slots with axes at 0,
    /// 45 and 90 degrees, centers snapped to exact pixel centers, plus a
    /// quarter-circle cable of known arclength.
    pub fn perception_scene(k: usize, noise_sigma: f64, seed: u64) -> ScenarioFile {
        assert!((1..=3).contains(&k));
        let pitch = 2.5e-3;
        let snap = |v: f64| (v / pitch).round() * pitch;
        let diameter = 0.008;
        let z = diameter / 2.0;

        let slot_positions = [
            (snap(0.30), snap(0.50), Vec3::x()),
            (snap(0.65), snap(0.55), Vec3::new(1.0, 1.0, 0.0).normalize()),
            (snap(0.95), snap(0.35), Vec3::y()),
        ];

        // Quarter circle of radius 0.25: exact ground-truth arclength pi*r/2.
        let r = 0.25;
        let cx = 0.5;
        let cy = 0.15;
        let mut polyline = Vec::new();
        let n = 120;
        for i in 0..=n {
            let a = std::f64::consts::FRAC_PI_2 * (1.0 + i as f64 / n as f64);
            polyline.push([cx + r * a.cos(), cy + r * a.sin(), z]);
        }

        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            id: format!("perception-k{k}-s{seed}"),
            units: Units::M,
            seed,
            table_height: 0.0,
            gripper: gripper_def(diameter),
            cable: CableDef {
                category: "perception".to_string(),
                total_length: std::f64::consts::FRAC_PI_2 * r,
                diameter,
                linear_density: 0.05,
                rigidity: Rigidity::Medium,
                node_count: 20,
                polyline,
            },
            slots: slot_positions[..k]
                .iter()
                .map(|(x, y, axis)| slot_def(Point::new(*x, *y, SLOT_HEIGHT / 2.0), *axis, diameter))
                .collect(),
            render: Some(RenderDef {
                pitch,
                camera_height: 1.0,
                noise_sigma,
            }),
            sim: None,
            plan: None,
            segment_length_convention: SegmentLengthConvention::NodeFraction,
        }
    }

    /// The nine cable categories of the reference routing study, at desk
    /// scale: (category, diameter mm, rigidity).
    pub const CABLE_CATEGORIES: [(&str, f64, Rigidity); 9] = [
        ("usb-cable", 4.0, Rigidity::Medium),
        ("usb-cable", 6.0, Rigidity::Medium),
        ("pvc-hose", 14.0, Rigidity::Medium),
        ("pvc-hose", 20.0, Rigidity::High),
        ("nylon-rope", 4.0, Rigidity::Low),
        ("nylon-rope", 8.0, Rigidity::Low),
        ("nylon-rope", 14.0, Rigidity::Medium),
        ("nylon-rope", 20.0, Rigidity::High),
        ("nylon-rope", 24.0, Rigidity::High),
    ];

    /// One bundled scenario per cable category.
    pub fn table_suite(seed: u64) -> Vec<ScenarioFile> {
        CABLE_CATEGORIES
            .iter()
            .enumerate()
            .map(|(i, (category, dia_mm, rigidity))| {
                let k = 2 + (i % 2);
                routing(seed + i as u64, k, *rigidity, dia_mm * 1e-3, category)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scenario_round_trip_is_identity() {
        let file = generate::routing(3, 2, Rigidity::Medium, 0.006, "usb-cable");
        let dir = std::env::temp_dir().join("carobio-scenario-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("round_trip.json");
        save_scenario(&file, &path).unwrap();
        let loaded = load_scenario(&path).unwrap();
        assert_eq!(file, loaded);
        save_scenario(&loaded, &path).unwrap();
        let again = load_scenario(&path).unwrap();
        assert_eq!(loaded, again);
    }

    #[test]
    fn units_mm_converts_on_load() {
        let mut file = generate::routing(4, 2, Rigidity::Medium, 0.006, "usb-cable");
        let (scene_m, _) = file.to_scene().unwrap();

        // Rewrite the same scenario in millimeters.
        file.units = Units::Mm;
        file.table_height *= 1e3;
        file.gripper.body_width *= 1e3;
        file.gripper.fingernail_height *= 1e3;
        file.gripper.outer_profile_radius *= 1e3;
        file.gripper.stroke_min *= 1e3;
        file.gripper.stroke_max *= 1e3;
        file.gripper.nail_inner_radius *= 1e3;
        file.gripper.nail_outer_radius *= 1e3;
        file.gripper.nail_tip_height *= 1e3;
        file.cable.total_length *= 1e3;
        file.cable.diameter *= 1e3;
        for p in file.cable.polyline.iter_mut() {
            p.iter_mut().for_each(|v| *v *= 1e3);
        }
        for s in file.slots.iter_mut() {
            s.width *= 1e3;
            s.height *= 1e3;
            s.max_radius *= 1e3;
            s.center.iter_mut().for_each(|v| *v *= 1e3);
        }
        let (scene_mm, _) = file.to_scene().unwrap();
        assert_relative_eq!(scene_mm.cable.diameter, scene_m.cable.diameter, epsilon = 1e-12);
        assert_relative_eq!(
            (scene_mm.slots[0].1.center - scene_m.slots[0].1.center).norm(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn schema_violations_are_rejected() {
        let good = generate::routing(5, 2, Rigidity::Medium, 0.006, "usb-cable");

        let mut bad_version = good.clone();
        bad_version.schema_version = 99;
        assert!(matches!(bad_version.to_scene(), Err(ScenarioError::Schema(_))));

        let mut no_slots = good.clone();
        no_slots.slots.clear();
        assert!(matches!(no_slots.to_scene(), Err(ScenarioError::Schema(_))));

        let mut short_poly = good.clone();
        short_poly.cable.polyline.truncate(1);
        assert!(matches!(short_poly.to_scene(), Err(ScenarioError::Schema(_))));

        assert!(parse_scenario("{not json").is_err());
    }

    #[test]
    fn generated_routing_scenarios_are_valid_and_clear() {
        for seed in 0..12 {
            for k in [2, 3] {
                let file = generate::routing(seed, k, Rigidity::Medium, 0.006, "usb-cable");
                let (scene, _) = file.to_scene().unwrap();
                assert_eq!(scene.slots.len(), k);
                // Consecutive slot axis changes stay within 60 degrees.
                for w in scene.slots.windows(2) {
                    let cos = w[0].1.axis.dot(&w[1].1.axis).abs().min(1.0);
                    assert!(cos.acos() <= 61.0_f64.to_radians(), "axis change too large");
                }
                // Initial cable clear of every exclusion zone.
                let circles = crate::preprocess::collision_circles(&scene);
                assert!(
                    crate::preprocess::find_violation(&scene.cable_state, &circles).is_none(),
                    "seed {seed} k {k} starts in violation"
                );
            }
        }
    }

    #[test]
    fn large_axis_change_exceeds_75_degrees() {
        let file = generate::large_axis_change(7);
        let (scene, _) = file.to_scene().unwrap();
        assert_eq!(scene.slots.len(), 2);
        let cos = scene.slots[0].1.axis.dot(&scene.slots[1].1.axis).abs().min(1.0);
        assert!(cos.acos() > 75.0_f64.to_radians());
    }

    #[test]
    fn perception_scene_slots_sit_on_pixel_centers() {
        let file = generate::perception_scene(3, 0.0, 0);
        let (scene, render) = file.to_scene().unwrap();
        for (_, pose) in &scene.slots {
            let col = (pose.center.x - render.origin.0) / render.pitch;
            let row = (pose.center.y - render.origin.1) / render.pitch;
            assert_relative_eq!(col, col.round(), epsilon = 1e-9);
            assert_relative_eq!(row, row.round(), epsilon = 1e-9);
        }
    }
}
