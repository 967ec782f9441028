//! End-to-end orchestration: perceive the rendered scene, preprocess the
//! perceived cable, vote the grasp node, compile and discretize the plan,
//! then execute it in the simulator against the ground-truth scene.
//!
//! Planning runs entirely on the perceived configuration; only the
//! simulator sees ground truth, alongside the batch harness that aggregates
//! outcomes into a routing report.

use crate::grasp::{select_grasp_node, GraspCandidate, GraspError, VoteResult};
use crate::perception::{
    cable_cloud, cluster_points, estimate_slot_pose, extract_node_chain, render_depth,
    slot_regions, smooth_depth, ChainParams, DepthGrid, PerceptionError, RenderParams,
};
use crate::plan::{compile_plan, discretize, Plan, PlanError, Trajectory};
use crate::preprocess::{preprocess_cable, AdjustmentMove, PreprocessError, PreprocessParams};
use crate::scenario::{ScenarioError, ScenarioFile};
use crate::scene::{CableState, Scene, SlotPose};
use crate::sim::{execute, SimResult, SlotOutcome};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("perception failed: {0}")]
    Perception(#[from] PerceptionError),
    #[error("perception failed: expected {expected} slot regions, found {found}")]
    SlotCountMismatch { expected: usize, found: usize },
    #[error("preprocessing failed: {0}")]
    Preprocess(#[from] PreprocessError),
    #[error("grasp selection failed: {0}")]
    Grasp(#[from] GraspError),
    #[error("planning failed: {0}")]
    Plan(#[from] PlanError),
}

impl PipelineError {
    /// Documented process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Scenario(_) => 1,
            PipelineError::Grasp(GraspError::NoCandidates) => 3,
            PipelineError::Preprocess(_) => 4,
            PipelineError::Perception(_)
            | PipelineError::SlotCountMismatch { .. }
            | PipelineError::Plan(_) => 5,
        }
    }
}

/// Perceived task configuration: slot poses recovered from the depth image
/// and the extracted cable chain, in scenario slot order.
#[derive(Debug, Clone)]
pub struct Perceived {
    pub scene: Scene,
    pub grid: DepthGrid,
}

/// Everything the planner produced for one scenario.
#[derive(Debug, Clone)]
pub struct PipelineArtifacts {
    /// Ground truth scene (simulation input).
    pub truth: Scene,
    /// Perceived scene with the preprocessed cable state (planning input).
    pub planning: Scene,
    pub moves: Vec<AdjustmentMove>,
    pub candidates: Vec<GraspCandidate>,
    pub vote: VoteResult,
    pub plan: Plan,
    pub trajectory: Trajectory,
    pub render: RenderParams,
}

/// Run the synthetic perception stack over a rendered view of the scene.
pub fn perceive(scene: &Scene, render: &RenderParams, seed: u64) -> Result<Perceived, PipelineError> {
    let grid = render_depth(scene, render, seed);
    let smoothed = smooth_depth(&grid, 1.0);

    // Slot recovery: depth filter at half the lowest slot height.
    let min_height = scene
        .slots
        .iter()
        .map(|(spec, _)| spec.height)
        .fold(f64::INFINITY, f64::min);
    let threshold = render.camera_height - scene.table_height - min_height / 2.0;
    let regions = slot_regions(&smoothed, threshold)?;
    if regions.len() != scene.slots.len() {
        return Err(PipelineError::SlotCountMismatch {
            expected: scene.slots.len(),
            found: regions.len(),
        });
    }

    // Match each scenario slot to the nearest recovered region.
    let mut used = vec![false; regions.len()];
    let mut slots = Vec::with_capacity(scene.slots.len());
    for (spec, truth_pose) in &scene.slots {
        let mut best: Option<(usize, f64, SlotPose)> = None;
        for (ri, region) in regions.iter().enumerate() {
            if used[ri] {
                continue;
            }
            let pose = estimate_slot_pose(region)?;
            let d = (pose.center.x - truth_pose.center.x).hypot(pose.center.y - truth_pose.center.y);
            if best.as_ref().is_none_or(|(_, bd, _)| d < *bd) {
                best = Some((ri, d, pose));
            }
        }
        let (ri, _, raw) = best.expect("regions nonempty");
        used[ri] = true;
        // The region samples the slot top surface; the slot center sits
        // half a height below its centroid.
        let center = crate::Point::new(raw.center.x, raw.center.y, raw.center.z - spec.height / 2.0);
        slots.push((*spec, SlotPose { center, axis: raw.axis }));
    }

    // Cable recovery: masked pixels -> clustering -> ordered chain.
    let cloud = cable_cloud(&smoothed);
    let diameter = scene.cable.diameter;
    let clusters = cluster_points(&cloud, 1.5 * diameter, 5)?;
    let largest = clusters
        .iter()
        .max_by_key(|c| c.points.len())
        .expect("clusters nonempty");
    let mut chain = extract_node_chain(
        largest,
        scene.cable_state.node_count(),
        scene.cable_state.fixed_end,
        &ChainParams::for_diameter(diameter),
    )?;
    // The initial cable rests on the table: collapse the tube-surface bias
    // to the centerline height.
    let rest_z = scene.table_height + scene.cable.radius();
    for n in chain.nodes.iter_mut() {
        n.z = rest_z;
    }
    let mut fixed = chain.fixed_end;
    fixed.z = rest_z;
    chain.fixed_end = fixed;

    let mut scene_out = scene.clone();
    scene_out.slots = slots;
    scene_out.cable_state = chain;
    Ok(Perceived {
        scene: scene_out,
        grid,
    })
}

/// Perceive, preprocess, vote and compile for one scenario.
pub fn plan_scenario(file: &ScenarioFile) -> Result<PipelineArtifacts, PipelineError> {
    let (truth, render) = file.to_scene()?;
    let perceived = perceive(&truth, &render, file.seed)?;

    let (preprocessed, moves) = preprocess_cable(&perceived.scene, &PreprocessParams::default())?;

    let mut planning = perceived.scene.clone();
    planning.cable_state = preprocessed;

    let (candidates, vote) = select_grasp_node(
        &planning.cable_state,
        &planning.slots[0].1,
        planning.cable.total_length,
        file.segment_length_convention,
    )?;

    let params = file.plan_params();
    let plan = compile_plan(&planning, vote.final_node, &moves, &params)?;
    let trajectory = discretize(&plan, &planning, &params);

    Ok(PipelineArtifacts {
        truth,
        planning,
        moves,
        candidates,
        vote,
        plan,
        trajectory,
        render,
    })
}

/// Full pipeline plus simulation.
pub fn simulate_scenario(file: &ScenarioFile) -> Result<(PipelineArtifacts, SimResult), PipelineError> {
    let artifacts = plan_scenario(file)?;
    let mut params = file.sim_params();
    params.capture_radius = params
        .capture_radius
        .max(artifacts.truth.gripper.outer_profile_radius);
    let result = execute(&artifacts.trajectory, &artifacts.truth, &params, file.seed);
    Ok((artifacts, result))
}

/// Per-scenario row of a batch report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario_id: String,
    pub seed: u64,
    pub category: String,
    pub diameter_mm: f64,
    pub rigidity: crate::scene::Rigidity,
    /// Pipeline error, when the run never reached the simulator.
    pub error: Option<String>,
    pub final_node: Option<usize>,
    pub vote_tie_break: bool,
    pub primitives: usize,
    pub waypoints: usize,
    pub plan_duration_s: f64,
    pub outcomes: Vec<SlotOutcome>,
    pub all_passed: bool,
    /// "A" (folded) or "B" (misaligned) for the first failed slot.
    pub failure_reason: Option<String>,
    pub max_tension: f64,
    pub events: Vec<String>,
    /// Wall time is reported separately (timing sidecar) to keep report
    /// bytes deterministic.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

/// Category-level aggregate in the style of a routing success table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub category: String,
    pub diameter_mm: f64,
    pub rigidity: crate::scene::Rigidity,
    pub runs: u32,
    pub passed: u32,
    pub failure_a: u32,
    pub failure_b: u32,
    pub errors: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub schema_version: u32,
    /// What this harness is (and is not).
    pub note: String,
    pub scenarios: Vec<ScenarioReport>,
    pub aggregate: Vec<AggregateRow>,
}

pub const BATCH_NOTE: &str =
    "self-consistency simulation harness at desk scale; not a hardware reproduction";

fn failure_reason(outcomes: &[SlotOutcome]) -> Option<String> {
    outcomes.iter().find_map(|o| match o {
        SlotOutcome::FailureAFolded => Some("A".to_string()),
        SlotOutcome::FailureBMisaligned => Some("B".to_string()),
        _ => None,
    })
}

/// Run one scenario with an explicit seed override.
pub fn run_one(file: &ScenarioFile, seed: u64) -> ScenarioReport {
    let mut file = file.clone();
    file.seed = seed;
    let started = std::time::Instant::now();
    let diameter_mm = file.cable.diameter * file.units.to_meters() * 1e3;
    let base = ScenarioReport {
        scenario_id: file.id.clone(),
        seed,
        category: file.cable.category.clone(),
        diameter_mm,
        rigidity: file.cable.rigidity,
        error: None,
        final_node: None,
        vote_tie_break: false,
        primitives: 0,
        waypoints: 0,
        plan_duration_s: 0.0,
        outcomes: Vec::new(),
        all_passed: false,
        failure_reason: None,
        max_tension: 0.0,
        events: Vec::new(),
        wall_time_ms: 0.0,
    };
    let mut report = match simulate_scenario(&file) {
        Ok((artifacts, result)) => ScenarioReport {
            final_node: Some(artifacts.vote.final_node),
            vote_tie_break: artifacts.vote.tie_break_used,
            primitives: artifacts.plan.primitives.len(),
            waypoints: artifacts.trajectory.waypoints.len(),
            plan_duration_s: artifacts.trajectory.duration(),
            all_passed: result.all_passed(),
            failure_reason: failure_reason(&result.outcomes),
            outcomes: result.outcomes,
            max_tension: result.max_tension,
            events: result.events,
            ..base
        },
        Err(e) => ScenarioReport {
            error: Some(e.to_string()),
            ..base
        },
    };
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    report
}

/// Run every (scenario, seed) job on a worker pool and assemble the sorted,
/// deterministic report.
pub fn run_batch(files: &[ScenarioFile], seeds: Option<&[u64]>) -> BatchReport {
    use rayon::prelude::*;
    let jobs: Vec<(usize, u64)> = files
        .iter()
        .enumerate()
        .flat_map(|(i, f)| match seeds {
            Some(seeds) => seeds.iter().map(|s| (i, *s)).collect::<Vec<_>>(),
            None => vec![(i, f.seed)],
        })
        .collect();

    let mut scenarios: Vec<ScenarioReport> = jobs
        .par_iter()
        .map(|(i, seed)| run_one(&files[*i], *seed))
        .collect();
    scenarios.sort_by(|a, b| (&a.scenario_id, a.seed).cmp(&(&b.scenario_id, b.seed)));

    // Aggregate per cable category.
    let mut rows: Vec<AggregateRow> = Vec::new();
    for s in &scenarios {
        let key = (s.category.clone(), s.diameter_mm, s.rigidity);
        let row = match rows
            .iter_mut()
            .find(|r| (r.category.clone(), r.diameter_mm, r.rigidity) == key)
        {
            Some(row) => row,
            None => {
                rows.push(AggregateRow {
                    category: key.0,
                    diameter_mm: key.1,
                    rigidity: key.2,
                    runs: 0,
                    passed: 0,
                    failure_a: 0,
                    failure_b: 0,
                    errors: 0,
                });
                rows.last_mut().unwrap()
            }
        };
        row.runs += 1;
        if s.error.is_some() {
            row.errors += 1;
        } else if s.all_passed {
            row.passed += 1;
        }
        match s.failure_reason.as_deref() {
            Some("A") => row.failure_a += 1,
            Some("B") => row.failure_b += 1,
            _ => {}
        }
    }
    rows.sort_by(|a, b| {
        (&a.category, a.diameter_mm, a.rigidity as u8)
            .partial_cmp(&(&b.category, b.diameter_mm, b.rigidity as u8))
            .unwrap()
    });

    BatchReport {
        schema_version: crate::scenario::SCHEMA_VERSION,
        note: BATCH_NOTE.to_string(),
        scenarios,
        aggregate: rows,
    }
}

impl BatchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable success table.
    pub fn format_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n", self.note));
        out.push_str("category        dia/mm  rigidity  success  A  B  err\n");
        for r in &self.aggregate {
            out.push_str(&format!(
                "{:<15} {:>6.1}  {:<8}  {:>3}/{:<3}  {:>2} {:>2} {:>4}\n",
                r.category, r.diameter_mm, r.rigidity.to_string(), r.passed, r.runs, r.failure_a, r.failure_b, r.errors
            ));
        }
        out
    }

    /// Aggregate rows as CSV for external plotting.
    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from("category,diameter_mm,rigidity,runs,passed,failure_a,failure_b,errors\n");
        for r in &self.aggregate {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.category, r.diameter_mm, r.rigidity, r.runs, r.passed, r.failure_a, r.failure_b, r.errors
            ));
        }
        out
    }
}

/// Sanity check used by tests: perceived slot poses against ground truth.
pub fn slot_pose_errors(truth: &Scene, perceived: &Scene) -> Vec<(f64, f64)> {
    truth
        .slots
        .iter()
        .zip(&perceived.slots)
        .map(|((_, t), (_, p))| {
            let pos = (p.center - t.center).norm();
            let ang = p.axis.dot(&t.axis).abs().min(1.0).acos();
            (pos, ang)
        })
        .collect()
}
