//! Quasi-static node-chain cable simulator.
//!
//! Each trajectory waypoint updates the pin targets (fixed end, grasped
//! point) and relaxes the chain by iterative position projection: a small
//! gravity drop, segment-length equality projection, bend smoothing toward
//! the neighbor midpoint weighted by the rigidity class, a table half-space
//! clamp with optional contact friction, and exact pin enforcement last.
//! Compression therefore resolves by buckling, which is what lets
//! low-rigidity cables fold while stiff ones stay smooth.
//!
//! After each insertion the per-slot outcome is classified: a fold anywhere
//! on the chain is failure A, a cable that is absent or crosses the slot
//! axis too steeply (or misses the opening window) is failure B.

use crate::geometry::GraspMode;
use crate::plan::{SegmentKind, Trajectory};
use crate::scene::{CableState, Rigidity, Scene, SlotPose, SlotSpec};
use crate::{Point, Vec3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cable not near slot: nearest node {0:.3} m away (limit {1:.3} m)")]
    CableNotNearSlot(f64, f64),
}

/// Simulator tunables. Defaults reproduce the qualitative failure taxonomy
/// at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    /// Bend smoothing weight per rigidity class.
    pub bend_stiffness_low: f64,
    pub bend_stiffness_medium: f64,
    pub bend_stiffness_high: f64,
    /// Projection sweeps per waypoint.
    pub projection_iterations: usize,
    /// Converged when no node moves more than this per sweep, m.
    pub convergence_tol: f64,
    /// Failure A: any interior angle below this, rad.
    pub fold_angle_threshold: f64,
    /// Failure B: cable-axis angle above this at the slot, rad.
    pub misalign_threshold: f64,
    /// Damp horizontal motion of table-contact nodes.
    pub table_friction: bool,
    /// Fraction of horizontal motion removed per sweep for contact nodes.
    pub friction_damping: f64,
    /// Gravity descent per sweep for unsupported nodes, m.
    pub gravity_step: f64,
    /// Maximum slack-mode axial slide per waypoint, m.
    pub slide_rate: f64,
    /// Stretch ratio excess that triggers sliding.
    pub slide_tension_tol: f64,
    /// Grasp acquisition radius around the gripper, m.
    pub capture_radius: f64,
    /// Record per-waypoint node frames in the result.
    pub record_frames: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            bend_stiffness_low: 0.05,
            bend_stiffness_medium: 0.3,
            bend_stiffness_high: 0.8,
            projection_iterations: 120,
            convergence_tol: 1e-5,
            fold_angle_threshold: 30.0_f64.to_radians(),
            misalign_threshold: 45.0_f64.to_radians(),
            table_friction: true,
            friction_damping: 0.7,
            gravity_step: 1e-3,
            slide_rate: 5e-3,
            slide_tension_tol: 1e-3,
            capture_radius: 0.06,
            record_frames: false,
        }
    }
}

impl SimParams {
    pub fn bend_weight(&self, rigidity: Rigidity) -> f64 {
        match rigidity {
            Rigidity::Low => self.bend_stiffness_low,
            Rigidity::Medium => self.bend_stiffness_medium,
            Rigidity::High => self.bend_stiffness_high,
        }
    }
}

/// A positional constraint on the chain: the point at node `node` plus
/// `frac` of the following segment coincides with `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pin {
    pub node: usize,
    pub frac: f64,
    pub target: Point,
}

impl Pin {
    pub fn at_node(node: usize, target: Point) -> Self {
        Self {
            node,
            frac: 0.0,
            target,
        }
    }

    fn is_exact(&self, i: usize) -> bool {
        self.frac == 0.0 && self.node == i
    }
}

/// Relaxation configuration derived from the scene.
#[derive(Debug, Clone, Copy)]
pub struct RelaxConfig {
    pub rest_spacing: f64,
    pub bend_weight: f64,
    /// Lowest allowed node height (table plane plus cable radius), m.
    pub table_z: f64,
    /// Override of `SimParams::projection_iterations` when set.
    pub max_sweeps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxReport {
    pub converged: bool,
    pub sweeps: usize,
    /// Largest segment length ratio to rest after the final sweep.
    pub max_stretch: f64,
}

/// Relax the chain under the pins; returns the new state and a report.
pub fn relax(
    state: &CableState,
    pins: &[Pin],
    config: &RelaxConfig,
    params: &SimParams,
) -> (CableState, RelaxReport) {
    let mut nodes = state.nodes.clone();
    let q = nodes.len();
    let rest = config.rest_spacing;
    let max_sweeps = config.max_sweeps.unwrap_or(params.projection_iterations);
    let exact_pinned = |i: usize| pins.iter().any(|p| p.is_exact(i));

    let mut converged = false;
    let mut sweeps = 0;
    let contact_eps = rest * 0.02 + 1e-4;
    while sweeps < max_sweeps {
        sweeps += 1;
        let before = nodes.clone();

        // Gravity descent.
        for (i, n) in nodes.iter_mut().enumerate() {
            if !exact_pinned(i) {
                n.z -= params.gravity_step;
            }
        }

        // Segment length equality projection, fixed end outward.
        for i in 0..q - 1 {
            let w_a = if exact_pinned(i) { 0.0 } else { 1.0 };
            let w_b = if exact_pinned(i + 1) { 0.0 } else { 1.0 };
            let w_sum = w_a + w_b;
            if w_sum == 0.0 {
                continue;
            }
            let seg = nodes[i + 1] - nodes[i];
            let len = seg.norm();
            let unit = if len > 1e-12 { seg / len } else { Vec3::z() };
            let err = len - rest;
            nodes[i] += unit * (err * w_a / w_sum);
            nodes[i + 1] -= unit * (err * w_b / w_sum);
        }

        // Bend smoothing toward the neighbor midpoint.
        if config.bend_weight > 0.0 {
            for i in 1..q - 1 {
                if exact_pinned(i) {
                    continue;
                }
                let mid = Point::from((nodes[i - 1].coords + nodes[i + 1].coords) / 2.0);
                let pull = (mid - nodes[i]) * config.bend_weight;
                nodes[i] += pull;
            }
        }

        // Table clamp plus contact friction.
        for (i, n) in nodes.iter_mut().enumerate() {
            if exact_pinned(i) {
                continue;
            }
            if n.z < config.table_z {
                n.z = config.table_z;
            }
            if params.table_friction && n.z <= config.table_z + contact_eps {
                let keep = 1.0 - params.friction_damping;
                n.x = before[i].x + (n.x - before[i].x) * keep;
                n.y = before[i].y + (n.y - before[i].y) * keep;
            }
        }

        // Pins enforced exactly, last.
        for pin in pins {
            if pin.frac == 0.0 {
                nodes[pin.node] = pin.target;
            } else {
                let a = pin.node;
                let b = a + 1;
                let f = pin.frac;
                let p = Point::from(nodes[a].coords * (1.0 - f) + nodes[b].coords * f);
                let delta = pin.target - p;
                let w = (1.0 - f) * (1.0 - f) + f * f;
                nodes[a] += delta * ((1.0 - f) / w);
                nodes[b] += delta * (f / w);
            }
        }

        let max_move = nodes
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if max_move < params.convergence_tol {
            converged = true;
            break;
        }
    }

    let max_stretch = nodes
        .windows(2)
        .map(|w| (w[1] - w[0]).norm() / rest)
        .fold(0.0, f64::max);

    (
        CableState {
            nodes,
            fixed_end: state.fixed_end,
        },
        RelaxReport {
            converged,
            sweeps,
            max_stretch,
        },
    )
}

/// True when any interior angle between consecutive segments is sharper
/// than the fold threshold.
pub fn detect_fold(state: &CableState, params: &SimParams) -> bool {
    min_interior_angle(state).is_some_and(|a| a < params.fold_angle_threshold)
}

/// Sharpest interior angle of the chain (pi = straight, 0 = hairpin).
pub fn min_interior_angle(state: &CableState) -> Option<f64> {
    let mut min: Option<f64> = None;
    for w in state.nodes.windows(3) {
        let u = w[0] - w[1];
        let v = w[2] - w[1];
        let nu = u.norm();
        let nv = v.norm();
        if nu < 1e-12 || nv < 1e-12 {
            continue;
        }
        let angle = (u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0).acos();
        min = Some(min.map_or(angle, |m: f64| m.min(angle)));
    }
    min
}

/// True when the cable direction at the node closest to the slot center
/// deviates from the slot axis by more than the misalignment threshold
/// (angles folded to `[0, pi/2]`).
pub fn detect_misalignment(
    state: &CableState,
    slot: &(SlotSpec, SlotPose),
    params: &SimParams,
) -> Result<bool, SimError> {
    let (spec, pose) = slot;
    let (closest, dist) = state
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (i, (n - pose.center).norm()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("chain is nonempty");
    let limit = 2.0 * spec.max_radius;
    if dist > limit {
        return Err(SimError::CableNotNearSlot(dist, limit));
    }
    let Ok(dir) = crate::scene::grasp_direction(state, closest) else {
        return Ok(true);
    };
    let cos = dir.dot(&pose.axis).abs().min(1.0);
    Ok(cos.acos() > params.misalign_threshold)
}

/// Slot opening window: a vertical rectangle centered at the slot center,
/// extents `width` along the (horizontal) slot axis and `height` along z.
fn rectangle_frame(slot: &(SlotSpec, SlotPose)) -> (Point, Vec3, Vec3, f64, f64) {
    let (spec, pose) = slot;
    let horiz = Vec3::new(pose.axis.x, pose.axis.y, 0.0).normalize();
    (
        pose.center,
        horiz,
        Vec3::z(),
        spec.width / 2.0,
        spec.height / 2.0,
    )
}

fn point_rectangle_distance(p: &Point, slot: &(SlotSpec, SlotPose)) -> f64 {
    let (center, u, v, hu, hv) = rectangle_frame(slot);
    let d = p - center;
    let a = d.dot(&u).clamp(-hu, hu);
    let b = d.dot(&v).clamp(-hv, hv);
    let closest = center + u * a + v * b;
    (p - closest).norm()
}

/// Minimum distance from the chain polyline to the slot opening rectangle.
pub fn polyline_rectangle_distance(state: &CableState, slot: &(SlotSpec, SlotPose)) -> f64 {
    let mut best = f64::INFINITY;
    for w in state.nodes.windows(2) {
        // Point-to-rectangle distance is convex along the segment.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..80 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let p1 = Point::from(w[0].coords + (w[1] - w[0]) * m1);
            let p2 = Point::from(w[0].coords + (w[1] - w[0]) * m2);
            if point_rectangle_distance(&p1, slot) <= point_rectangle_distance(&p2, slot) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let p = Point::from(w[0].coords + (w[1] - w[0]) * (0.5 * (lo + hi)));
        best = best.min(point_rectangle_distance(&p, slot));
    }
    best
}

/// True when the cable polyline meets the slot opening within half a cable
/// diameter.
pub fn check_slot_pass(state: &CableState, slot: &(SlotSpec, SlotPose), cable_diameter: f64) -> bool {
    polyline_rectangle_distance(state, slot) <= cable_diameter / 2.0 + 1e-9
}

/// Per-slot routing outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotOutcome {
    Passed,
    /// Failure A: the cable folded.
    FailureAFolded,
    /// Failure B: the cable is not aligned with (or missed) the slot.
    FailureBMisaligned,
    /// A previous slot failed before this one was attempted.
    NotReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub outcomes: Vec<SlotOutcome>,
    pub final_state: CableState,
    /// Largest segment stretch ratio observed across the run.
    pub max_tension: f64,
    pub events: Vec<String>,
    /// Waypoints whose relaxation hit the sweep cap.
    pub non_converged_steps: usize,
    pub seed: u64,
    #[serde(skip)]
    pub frames: Vec<(f64, Vec<Point>)>,
}

impl SimResult {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| *o == SlotOutcome::Passed)
    }
}

struct GraspState {
    /// Arclength coordinate of the attachment, m.
    s: f64,
    mode: GraspMode,
}

/// Execute a discretized trajectory against the scene.
///
/// The grasped point is pinned to the gripper waypoint: exactly on a node
/// under tight grasp, with bounded axial sliding toward tension relief
/// under slack grasp. After each insertion the slot outcome is classified;
/// the first failure stops execution and later slots report `NotReached`.
pub fn execute(trajectory: &Trajectory, scene: &Scene, params: &SimParams, seed: u64) -> SimResult {
    let total_length = scene.cable.total_length;
    let rest = scene.cable_state.rest_spacing(total_length);
    let config = RelaxConfig {
        rest_spacing: rest,
        bend_weight: params.bend_weight(scene.cable.rigidity),
        table_z: scene.table_height + scene.cable.radius(),
        max_sweeps: None,
    };
    let q = scene.cable_state.node_count();
    let fixed_pin = Pin::at_node(0, scene.cable_state.fixed_end);

    let mut state = scene.cable_state.clone();
    let mut events = Vec::new();
    let mut outcomes = vec![SlotOutcome::NotReached; scene.slots.len()];
    let mut max_tension: f64 = 0.0;
    let mut non_converged = 0usize;
    let mut frames = Vec::new();

    // Settle the initial state generously.
    let settle_cfg = RelaxConfig {
        max_sweeps: Some(params.projection_iterations * 10),
        ..config
    };
    let (settled, report) = relax(&state, &[fixed_pin], &settle_cfg, params);
    state = settled;
    max_tension = max_tension.max(report.max_stretch);

    let mut grasp: Option<GraspState> = None;
    let mut failed = false;

    'segments: for segment in &trajectory.segments {
        for wp_index in segment.first_wp..=segment.last_wp {
            let wp = &trajectory.waypoints[wp_index];
            let mut pins = vec![fixed_pin];

            let pin_active = matches!(
                segment.kind,
                SegmentKind::AdjustDrag
                    | SegmentKind::OffsetMove
                    | SegmentKind::Guide
                    | SegmentKind::Insert
                    | SegmentKind::ModeChange(_)
            );
            if pin_active {
                if let Some(g) = grasp.as_mut() {
                    if g.mode == GraspMode::Slack && params.slide_rate > 0.0 {
                        slide_toward_relief(g, &state, rest, total_length, params);
                    }
                    pins.push(grasp_pin(g, rest, q, wp.position));
                }
            }

            let (next, report) = relax(&state, &pins, &config, params);
            state = next;
            max_tension = max_tension.max(report.max_stretch);
            if !report.converged {
                non_converged += 1;
            }
            if params.record_frames {
                frames.push((wp.t, state.nodes.clone()));
            }
        }

        // Segment-boundary effects.
        let last_wp = &trajectory.waypoints[segment.last_wp];
        match segment.kind {
            SegmentKind::GraspClose => {
                let target = last_wp.position;
                let (node, dist) = state
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (i, (n - target).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .expect("nonempty");
                if dist <= params.capture_radius {
                    let node = node.clamp(1, q - 2);
                    grasp = Some(GraspState {
                        s: node as f64 * rest,
                        mode: GraspMode::Slack,
                    });
                    events.push(format!(
                        "t={:.3} grasp node {node} ({dist:.4} m from gripper)",
                        last_wp.t
                    ));
                } else {
                    events.push(format!(
                        "t={:.3} grasp missed: nearest node {dist:.4} m away",
                        last_wp.t
                    ));
                }
            }
            SegmentKind::Release => {
                if grasp.take().is_some() {
                    events.push(format!("t={:.3} release", last_wp.t));
                }
            }
            SegmentKind::ModeChange(mode) => {
                if let Some(g) = grasp.as_mut() {
                    g.mode = mode;
                    if mode == GraspMode::Tight {
                        // Clamp the attachment onto the nearest node.
                        let node = ((g.s / rest).round() as usize).clamp(1, q - 2);
                        g.s = node as f64 * rest;
                    }
                    events.push(format!("t={:.3} mode {mode}", last_wp.t));
                }
            }
            SegmentKind::Insert => {
                let slot_index = segment.slot.expect("insert segments carry a slot");
                let slot = &scene.slots[slot_index];
                let outcome = classify_slot(&state, slot, scene.cable.diameter, params);
                events.push(format!(
                    "t={:.3} slot {} {:?}",
                    last_wp.t, slot_index, outcome
                ));
                outcomes[slot_index] = outcome;
                if outcome != SlotOutcome::Passed {
                    failed = true;
                    break 'segments;
                }
            }
            _ => {}
        }
    }

    if failed {
        events.push("execution stopped after first failure".to_string());
    }

    SimResult {
        outcomes,
        final_state: state,
        max_tension,
        events,
        non_converged_steps: non_converged,
        seed,
        frames,
    }
}

fn classify_slot(
    state: &CableState,
    slot: &(SlotSpec, SlotPose),
    cable_diameter: f64,
    params: &SimParams,
) -> SlotOutcome {
    if detect_fold(state, params) {
        return SlotOutcome::FailureAFolded;
    }
    match detect_misalignment(state, slot, params) {
        Ok(false) => {}
        // Misaligned, or not even near the slot.
        Ok(true) | Err(SimError::CableNotNearSlot(..)) => {
            return SlotOutcome::FailureBMisaligned;
        }
    }
    if check_slot_pass(state, slot, cable_diameter) {
        SlotOutcome::Passed
    } else {
        SlotOutcome::FailureBMisaligned
    }
}

fn grasp_pin(g: &GraspState, rest: f64, q: usize, target: Point) -> Pin {
    let max_s = (q - 2) as f64 * rest;
    let s = g.s.clamp(rest, max_s);
    let a = ((s / rest).floor() as usize).clamp(1, q - 2);
    let frac = (s / rest - a as f64).clamp(0.0, 1.0);
    if frac < 1e-9 {
        Pin::at_node(a, target)
    } else {
        Pin {
            node: a,
            frac,
            target,
        }
    }
}

/// Shift the slack-grasp attachment along the cable toward the side whose
/// geometric length exceeds its rest arclength (paying cable out relieves
/// it), bounded by the per-step slide rate.
fn slide_toward_relief(
    g: &mut GraspState,
    state: &CableState,
    rest: f64,
    total_length: f64,
    params: &SimParams,
) {
    let q = state.nodes.len();
    let s = g.s.clamp(rest, (q - 2) as f64 * rest);
    let a = ((s / rest).floor() as usize).clamp(1, q - 2);
    let frac = s / rest - a as f64;

    // Geometric polyline lengths on each side of the attachment point.
    let mut fixed_side = 0.0;
    for w in state.nodes[..=a].windows(2) {
        fixed_side += (w[1] - w[0]).norm();
    }
    let seg_len = (state.nodes[a + 1] - state.nodes[a]).norm();
    fixed_side += frac * seg_len;
    let mut loose_side = (1.0 - frac) * seg_len;
    for w in state.nodes[a + 1..].windows(2) {
        loose_side += (w[1] - w[0]).norm();
    }

    let rest_fixed = s.max(1e-9);
    let rest_loose = (total_length - s).max(1e-9);
    let ratio_fixed = fixed_side / rest_fixed;
    let ratio_loose = loose_side / rest_loose;
    let trigger = 1.0 + params.slide_tension_tol;

    let mut new_s = s;
    if ratio_fixed > trigger && ratio_fixed >= ratio_loose {
        // Fixed side taut: pay cable toward it by moving the grip toward
        // the loose end.
        let excess = (ratio_fixed - 1.0) * rest_fixed;
        new_s = s + excess.min(params.slide_rate);
    } else if ratio_loose > trigger {
        let excess = (ratio_loose - 1.0) * rest_loose;
        new_s = s - excess.min(params.slide_rate);
    }
    g.s = new_s.clamp(rest, (q - 2) as f64 * rest);
}

/// Write one frame of node positions as `i,x,y,z` CSV rows.
pub fn write_frame_csv<W: std::io::Write>(
    nodes: &[Point],
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "i,x,y,z")?;
    for (i, n) in nodes.iter().enumerate() {
        writeln!(out, "{i},{},{},{}", n.x, n.y, n.z)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn chain(points: Vec<Point>) -> CableState {
        let fixed = points[0];
        CableState::new(points, fixed).unwrap()
    }

    fn straight_chain(n: usize, spacing: f64, z: f64) -> CableState {
        chain(
            (0..n)
                .map(|i| Point::new(spacing * i as f64, 0.0, z))
                .collect(),
        )
    }

    fn config(rest: f64) -> RelaxConfig {
        RelaxConfig {
            rest_spacing: rest,
            bend_weight: 0.3,
            table_z: 0.003,
            max_sweeps: None,
        }
    }

    #[test]
    fn relax_fixed_point_for_resting_chain() {
        let state = straight_chain(11, 0.05, 0.003);
        let params = SimParams::default();
        let pins = [
            Pin::at_node(0, state.nodes[0]),
            Pin::at_node(10, state.nodes[10]),
        ];
        let (out, report) = relax(&state, &pins, &config(0.05), &params);
        assert!(report.converged);
        for (a, b) in state.nodes.iter().zip(&out.nodes) {
            assert!((a - b).norm() < 1e-4, "{a:?} vs {b:?}");
        }
        assert!(report.max_stretch < 1.001);
    }

    #[test]
    fn relax_lifted_pin_sags_with_preserved_lengths() {
        let state = straight_chain(11, 0.05, 0.003);
        let params = SimParams::default();
        let lifted = Point::new(0.35, 0.0, 0.25); // slack available: 0.5 m of cable to span ~0.43 m
        let pins = [Pin::at_node(0, state.nodes[0]), Pin::at_node(10, lifted)];
        let cfg = RelaxConfig {
            max_sweeps: Some(5000),
            ..config(0.05)
        };
        let (out, report) = relax(&state, &pins, &cfg, &params);
        assert!(report.converged);
        for w in out.nodes.windows(2) {
            assert_relative_eq!((w[1] - w[0]).norm(), 0.05, max_relative = 0.01);
        }
        // Sag: interior nodes sit below the straight pin-to-pin chord.
        let a = out.nodes[0];
        let b = out.nodes[10];
        let mut below = 0;
        for (i, n) in out.nodes.iter().enumerate().skip(1).take(9) {
            let t = i as f64 / 10.0;
            let chord_z = a.z + (b.z - a.z) * t;
            if n.z < chord_z - 1e-4 {
                below += 1;
            }
            assert!(n.z >= 0.003 - 1e-6, "node below table");
        }
        assert!(below >= 5, "only {below} nodes sag below the chord");
    }

    #[test]
    fn relax_overstretched_pins_flag_non_convergence() {
        let state = straight_chain(11, 0.05, 0.003);
        let params = SimParams::default();
        // Rest length 0.5 m; pins 0.65 m apart.
        let pins = [
            Pin::at_node(0, Point::new(0.0, 0.0, 0.1)),
            Pin::at_node(10, Point::new(0.65, 0.0, 0.1)),
        ];
        let (_, report) = relax(&state, &pins, &config(0.05), &params);
        assert!(!report.converged);
        assert!(report.max_stretch > 1.0, "stretch {}", report.max_stretch);
    }

    #[test]
    fn tight_pin_is_exact() {
        let state = straight_chain(11, 0.05, 0.003);
        let params = SimParams::default();
        let target = Point::new(0.25, 0.1, 0.08);
        let pins = [Pin::at_node(0, state.nodes[0]), Pin::at_node(5, target)];
        let cfg = RelaxConfig {
            max_sweeps: Some(2000),
            ..config(0.05)
        };
        let (out, _) = relax(&state, &pins, &cfg, &params);
        assert!((out.nodes[5] - target).norm() <= 1e-9);
    }

    #[test]
    fn fold_detection_cases() {
        let params = SimParams::default();
        assert!(!detect_fold(&straight_chain(5, 0.05, 0.0), &params));

        // Hairpin: ~10 degree interior angle.
        let a = 10.0_f64.to_radians();
        let hairpin = chain(vec![
            Point::new(0.05, 0.0, 0.0),
            Point::new(0.0, 0.0, 0.0),
            Point::new(0.05 * a.cos(), 0.05 * a.sin(), 0.0),
        ]);
        assert!(detect_fold(&hairpin, &params));

        // A right-angle corner is not a fold at the 30 degree threshold.
        let corner = chain(vec![
            Point::new(0.05, 0.0, 0.0),
            Point::new(0.0, 0.0, 0.0),
            Point::new(0.0, 0.05, 0.0),
        ]);
        assert!(!detect_fold(&corner, &params));
    }

    fn test_slot(center: Point, axis: Vec3) -> (SlotSpec, SlotPose) {
        (
            SlotSpec {
                width: 0.01,
                height: 0.06,
                max_radius: 0.04,
            },
            SlotPose::new(center, axis).unwrap(),
        )
    }

    #[test]
    fn misalignment_detection_cases() {
        let params = SimParams::default();
        let slot = test_slot(Point::new(0.1, 0.0, 0.03), Vec3::x());

        let along = straight_chain(5, 0.05, 0.03);
        assert!(!detect_misalignment(&along, &slot, &params).unwrap());

        let across = chain(
            (0..5)
                .map(|i| Point::new(0.1, -0.1 + 0.05 * i as f64, 0.03))
                .collect(),
        );
        assert!(detect_misalignment(&across, &slot, &params).unwrap());

        // 44 degrees with a 45 degree threshold: not misaligned.
        let a = 44.0_f64.to_radians();
        let diag = chain(
            (0..5)
                .map(|i| {
                    let t = 0.05 * i as f64 - 0.1;
                    Point::new(0.1 + t * a.cos(), t * a.sin(), 0.03)
                })
                .collect(),
        );
        assert!(!detect_misalignment(&diag, &slot, &params).unwrap());

        // Far away: precondition violated.
        let far = straight_chain(5, 0.05, 5.0);
        assert!(matches!(
            detect_misalignment(&far, &slot, &params),
            Err(SimError::CableNotNearSlot(..))
        ));
    }

    #[test]
    fn slot_pass_cases() {
        let slot = test_slot(Point::new(0.1, 0.0, 0.03), Vec3::x());
        let d_c = 0.006;

        // Threaded through the opening center.
        let through = straight_chain(5, 0.05, 0.03);
        assert!(check_slot_pass(&through, &slot, d_c));

        // Passing two slot-heights above.
        let above = straight_chain(5, 0.05, 0.03 + 2.0 * 0.06);
        assert!(!check_slot_pass(&above, &slot, d_c));

        // Touching the opening edge within half a diameter: the top edge is
        // at z = 0.06; a cable centerline at 0.0625 is 0.0025 < 0.003 away.
        let grazing = straight_chain(5, 0.05, 0.06 + 0.0025);
        assert!(check_slot_pass(&grazing, &slot, d_c));
        let too_high = straight_chain(5, 0.05, 0.06 + 0.0035);
        assert!(!check_slot_pass(&too_high, &slot, d_c));
    }

    #[test]
    fn taxonomy_is_sound() {
        // A passed classification implies no fold and no misalignment at
        // evaluation time.
        let params = SimParams::default();
        let slot = test_slot(Point::new(0.1, 0.0, 0.03), Vec3::x());
        let state = straight_chain(5, 0.05, 0.03);
        let outcome = classify_slot(&state, &slot, 0.006, &params);
        assert_eq!(outcome, SlotOutcome::Passed);
        assert!(!detect_fold(&state, &params));
        assert!(!detect_misalignment(&state, &slot, &params).unwrap());
    }
}
