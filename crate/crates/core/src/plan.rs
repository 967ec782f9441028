//! Plan compilation: adjustment moves, one grasp, then per slot a guide
//! under slack grasp and a circular-arc insertion under tight grasp.
//!
//! Guide endpoints embed the slot offsets: the approach to slot `j` starts
//! at `G_{j-1} = S_{j-1} + d_h(S_j)` (post-grasp pose lifted by
//! `d_v + d_h` for the first slot) and ends at
//! `G_j = S_j + d_v(S_j) + d_h(S_j)`. Insertion swings down a circular arc
//! centered at `G_{j-1}` until the grasped cable point reaches the slot
//! opening, at constant arc speed.

use crate::geometry::GraspMode;
use crate::preprocess::AdjustmentMove;
use crate::scene::Scene;
use crate::{Point, Vec3};
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("degenerate insert arc at slot {slot}: guide points {radius:.4} m apart")]
    DegenerateArc { slot: usize, radius: f64 },
    #[error("grasp node {node} out of range for {nodes} nodes")]
    GraspNodeOutOfRange { node: usize, nodes: usize },
}

/// One parameterized robot action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Primitive {
    /// Preprocessing drag: grasp the anchor node, translate, release.
    Adjust(AdjustmentMove),
    /// The single grasp of the routing task.
    Grasp { node: usize, mode: GraspMode },
    /// Straight gripper translation while holding.
    Offset { vector: Vec3 },
    /// Slack-mode guide between offset points, re-aligning the in-hand
    /// cable with the slot axis on arrival.
    Guide { from: Point, to: Point, align_axis: Vec3 },
    /// Tight-mode insertion along a vertical-plane circular arc.
    Insert {
        center: Point,
        start: Point,
        end: Point,
        rate: f64,
    },
    /// Gripper stroke change (slack <-> tight).
    SetMode(GraspMode),
    /// Open the gripper and end the task.
    Release,
}

/// Compiled plan: the primitive sequence plus per-primitive slot
/// annotations (which slot a primitive serves, if any).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub primitives: Vec<Primitive>,
    /// Same length as `primitives`.
    pub slot_annotations: Vec<Option<usize>>,
}

impl Plan {
    pub fn grasp_count(&self) -> usize {
        self.primitives
            .iter()
            .filter(|p| matches!(p, Primitive::Grasp { .. }))
            .count()
    }
}

/// Planner tunables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanParams {
    /// Offset redundancy tolerance `delta`, m.
    pub delta: f64,
    /// Insertion arc speed, m/s.
    pub insert_rate: f64,
    /// Guide / offset / adjust translation speed, m/s.
    pub guide_speed: f64,
    /// Free travel speed (gripper open), m/s.
    pub travel_speed: f64,
    /// Trajectory sampling step, s.
    pub dt: f64,
    /// How far below the slot opening top the grasped point descends;
    /// `None` means one cable diameter.
    pub insertion_depth: Option<f64>,
    /// Slack-mode stroke clearance above the cable diameter, m.
    pub sgm_clearance: f64,
    /// Tight-mode stroke as a fraction of the cable diameter.
    pub tgm_ratio: f64,
    /// Stroke-change dwell, s.
    pub mode_change_time: f64,
    /// Hover height of the initial approach, m.
    pub travel_height: f64,
}

impl Default for PlanParams {
    fn default() -> Self {
        Self {
            delta: 5e-3,
            insert_rate: 10e-3,
            guide_speed: 50e-3,
            travel_speed: 0.15,
            dt: 20e-3,
            insertion_depth: None,
            sgm_clearance: 2e-3,
            tgm_ratio: 0.8,
            mode_change_time: 0.25,
            travel_height: 0.15,
        }
    }
}

/// Horizontal offset `d_h = (w_g/2 + w_s/2 + delta) * O_j` for a slot.
pub fn horizontal_offset(
    slot: &(crate::scene::SlotSpec, crate::scene::SlotPose),
    gripper: &crate::scene::GripperSpec,
    delta: f64,
) -> Vec3 {
    (gripper.body_width / 2.0 + slot.0.width / 2.0 + delta) * slot.1.axis
}

/// Vertical offset `d_v = (h_g/2 + h_s/2 + delta) * e_z` for a slot.
pub fn vertical_offset(
    slot: &(crate::scene::SlotSpec, crate::scene::SlotPose),
    gripper: &crate::scene::GripperSpec,
    delta: f64,
) -> Vec3 {
    Vec3::new(
        0.0,
        0.0,
        gripper.fingernail_height / 2.0 + slot.0.height / 2.0 + delta,
    )
}

/// Flip a slot axis so it points along the routing direction `reference`.
pub fn orient_axis(axis: Vec3, reference: Vec3) -> Vec3 {
    if axis.dot(&reference) < 0.0 {
        -axis
    } else {
        axis
    }
}

/// Guide endpoints for slot `j` (0-based): `(start, to, oriented axis)`.
///
/// The slot axis is oriented along the routing direction before the offsets
/// are applied, so the gripper always parks past the slot on the far side.
pub fn guide_points(scene: &Scene, grasp_position: Point, j: usize, params: &PlanParams) -> (Point, Point, Vec3) {
    let (spec, pose) = &scene.slots[j];
    let prev_center = if j == 0 {
        grasp_position
    } else {
        scene.slots[j - 1].1.center
    };
    let routing = pose.center - prev_center;
    let axis = orient_axis(pose.axis, routing);
    let oriented = (spec.clone(), crate::scene::SlotPose { center: pose.center, axis });
    let d_h = horizontal_offset(&oriented, &scene.gripper, params.delta);
    let d_v = vertical_offset(&oriented, &scene.gripper, params.delta);
    let start = if j == 0 {
        grasp_position + d_v + d_h
    } else {
        prev_center + d_h
    };
    (start, pose.center + d_v + d_h, axis)
}

/// Guide primitive for slot `j`.
pub fn guide_segment(scene: &Scene, grasp_position: Point, j: usize, params: &PlanParams) -> Primitive {
    let (from, to, axis) = guide_points(scene, grasp_position, j, params);
    Primitive::Guide {
        from,
        to,
        align_axis: axis,
    }
}

/// Circular-arc geometry in the vertical plane through `center` and `start`.
pub struct InsertArc {
    pub center: Point,
    pub radius: f64,
    /// In-plane horizontal basis vector.
    pub e_h: Vec3,
    /// Start/end polar angles (z = center.z + R sin(phi)).
    pub phi_start: f64,
    pub phi_end: f64,
}

impl InsertArc {
    pub fn solve(center: Point, start: Point, z_target: f64) -> Option<InsertArc> {
        let u = start - center;
        let radius = u.norm();
        let horiz = Vec3::new(u.x, u.y, 0.0);
        let h_norm = horiz.norm();
        if radius < 1e-9 || h_norm < 1e-9 {
            return None;
        }
        let e_h = horiz / h_norm;
        let phi_start = u.z.atan2(h_norm);
        let sin_end = ((z_target - center.z) / radius).clamp(-1.0, 1.0);
        let phi_end = sin_end.asin().min(phi_start);
        Some(InsertArc {
            center,
            radius,
            e_h,
            phi_start,
            phi_end,
        })
    }

    pub fn point_at(&self, phi: f64) -> Point {
        self.center + self.e_h * (self.radius * phi.cos()) + Vec3::z() * (self.radius * phi.sin())
    }

    pub fn arc_length(&self) -> f64 {
        self.radius * (self.phi_start - self.phi_end)
    }

    pub fn end_point(&self) -> Point {
        self.point_at(self.phi_end)
    }
}

/// Height at which the grasped cable point stops descending into slot `j`:
/// opening top minus the insertion depth.
pub fn insert_target_height(scene: &Scene, j: usize, params: &PlanParams) -> f64 {
    let (spec, pose) = &scene.slots[j];
    let depth = params.insertion_depth.unwrap_or(scene.cable.diameter);
    pose.center.z + spec.height / 2.0 - depth
}

/// Insert primitive for slot `j`, arc centered at the guide start.
pub fn insert_arc(
    scene: &Scene,
    grasp_position: Point,
    j: usize,
    params: &PlanParams,
) -> Result<Primitive, PlanError> {
    let (g_start, g_to, _) = guide_points(scene, grasp_position, j, params);
    let z_target = insert_target_height(scene, j, params);
    let arc = InsertArc::solve(g_start, g_to, z_target).ok_or(PlanError::DegenerateArc {
        slot: j,
        radius: (g_to - g_start).norm(),
    })?;
    if arc.radius < 1e-3 {
        return Err(PlanError::DegenerateArc {
            slot: j,
            radius: arc.radius,
        });
    }
    Ok(Primitive::Insert {
        center: g_start,
        start: g_to,
        end: arc.end_point(),
        rate: params.insert_rate,
    })
}

/// Compile the full single-grasp plan: adjustments, one slack grasp, lift,
/// then guide/insert cycles per slot in routing order, and a final release.
pub fn compile_plan(
    scene: &Scene,
    final_node: usize,
    preprocess_moves: &[AdjustmentMove],
    params: &PlanParams,
) -> Result<Plan, PlanError> {
    let state = &scene.cable_state;
    if final_node >= state.nodes.len() {
        return Err(PlanError::GraspNodeOutOfRange {
            node: final_node,
            nodes: state.nodes.len(),
        });
    }
    let grasp_position = state.nodes[final_node];

    let mut primitives = Vec::new();
    let mut slots = Vec::new();
    let mut push = |p: Primitive, s: Option<usize>, primitives: &mut Vec<Primitive>, slots: &mut Vec<Option<usize>>| {
        primitives.push(p);
        slots.push(s);
    };

    for mv in preprocess_moves {
        push(Primitive::Adjust(mv.clone()), None, &mut primitives, &mut slots);
    }
    push(
        Primitive::Grasp {
            node: final_node,
            mode: GraspMode::Slack,
        },
        None,
        &mut primitives,
        &mut slots,
    );

    // Lift to the first guide start.
    let (g0_start, _, _) = guide_points(scene, grasp_position, 0, params);
    push(
        Primitive::Offset {
            vector: g0_start - grasp_position,
        },
        Some(0),
        &mut primitives,
        &mut slots,
    );

    let mut cursor = g0_start;
    for j in 0..scene.slots.len() {
        push(Primitive::SetMode(GraspMode::Slack), Some(j), &mut primitives, &mut slots);
        let (g_start, _, _) = guide_points(scene, grasp_position, j, params);
        if j > 0 {
            // Bridge from the previous insert end to this guide start.
            push(
                Primitive::Offset {
                    vector: g_start - cursor,
                },
                Some(j),
                &mut primitives,
                &mut slots,
            );
        }
        let guide = guide_segment(scene, grasp_position, j, params);
        push(guide, Some(j), &mut primitives, &mut slots);
        push(Primitive::SetMode(GraspMode::Tight), Some(j), &mut primitives, &mut slots);
        let insert = insert_arc(scene, grasp_position, j, params)?;
        let end = match &insert {
            Primitive::Insert { end, .. } => *end,
            _ => unreachable!(),
        };
        push(insert, Some(j), &mut primitives, &mut slots);
        cursor = end;
    }
    push(Primitive::Release, None, &mut primitives, &mut slots);

    Ok(Plan {
        primitives,
        slot_annotations: slots,
    })
}

/// Timed gripper waypoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    pub position: Point,
    /// Gripper yaw about vertical, rad.
    pub yaw: f64,
    /// Stroke, m.
    pub stroke: f64,
}

/// Semantic class of a trajectory span, consumed by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentKind {
    /// Free move, gripper open.
    Travel,
    /// Closing onto the cable; the grasp engages at the segment end.
    GraspClose,
    /// Preprocessing drag under slack grasp.
    AdjustDrag,
    /// Straight holding move.
    OffsetMove,
    Guide,
    Insert,
    /// Stroke dwell switching to the embedded mode at the segment end.
    ModeChange(GraspMode),
    /// Opening the gripper; the grasp disengages at the segment start.
    Release,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySegment {
    pub kind: SegmentKind,
    pub slot: Option<usize>,
    /// Index of this segment's first emitted waypoint.
    pub first_wp: usize,
    /// Index of this segment's last emitted waypoint (inclusive).
    pub last_wp: usize,
}

/// Discretized plan: waypoints plus the semantic segments spanning them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Waypoint>,
    pub segments: Vec<TrajectorySegment>,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.t)
    }
}

/// Incremental trajectory assembly; every segment interpolates from the
/// current endpoint so positions are continuous by construction.
pub(crate) struct TrajectoryBuilder {
    dt: f64,
    waypoints: Vec<Waypoint>,
    segments: Vec<TrajectorySegment>,
}

impl TrajectoryBuilder {
    pub fn new(dt: f64, start: Waypoint) -> Self {
        Self {
            dt,
            waypoints: vec![start],
            segments: Vec::new(),
        }
    }

    fn current(&self) -> Waypoint {
        *self.waypoints.last().expect("nonempty")
    }

    /// Emit a segment of `duration` seconds sampling `f` over `s` in
    /// `(0, 1]`; `f(1)` must be the segment endpoint.
    pub fn push_segment<F>(&mut self, kind: SegmentKind, slot: Option<usize>, duration: f64, f: F)
    where
        F: Fn(f64) -> (Point, f64, f64),
    {
        if duration <= 0.0 {
            return;
        }
        let t0 = self.current().t;
        let steps = ((duration / self.dt) - 1e-9).ceil().max(1.0) as usize;
        let first = self.waypoints.len();
        for i in 1..=steps {
            let s = i as f64 / steps as f64;
            let (position, yaw, stroke) = f(s);
            self.waypoints.push(Waypoint {
                t: t0 + s * duration,
                position,
                yaw,
                stroke,
            });
        }
        self.segments.push(TrajectorySegment {
            kind,
            slot,
            first_wp: first,
            last_wp: self.waypoints.len() - 1,
        });
    }

    /// Straight-line move at `speed`, linear yaw blend, constant stroke.
    pub fn linear(
        &mut self,
        kind: SegmentKind,
        slot: Option<usize>,
        to: Point,
        yaw_to: f64,
        speed: f64,
        stroke: f64,
    ) {
        let from = self.current();
        let dist = (to - from.position).norm();
        if dist < 1e-12 && (yaw_to - from.yaw).abs() < 1e-12 {
            return;
        }
        let duration = (dist / speed).max(self.dt);
        self.push_segment(kind, slot, duration, |s| {
            (
                from.position + (to - from.position) * s,
                from.yaw + (yaw_to - from.yaw) * s,
                stroke,
            )
        });
    }

    /// Stationary dwell blending the stroke (and optionally yaw).
    pub fn dwell(&mut self, kind: SegmentKind, slot: Option<usize>, duration: f64, stroke_to: f64) {
        let from = self.current();
        self.push_segment(kind, slot, duration, |s| {
            (
                from.position,
                from.yaw,
                from.stroke + (stroke_to - from.stroke) * s,
            )
        });
    }

    pub fn finish(self) -> Trajectory {
        Trajectory {
            waypoints: self.waypoints,
            segments: self.segments,
        }
    }
}

/// Nearest representative of `target` in the same mod-pi class, measured
/// from `from`: cable yaw is a line orientation, not a heading.
pub fn nearest_yaw(from: f64, target: f64) -> f64 {
    let mut diff = (target - from) % std::f64::consts::PI;
    if diff > std::f64::consts::FRAC_PI_2 {
        diff -= std::f64::consts::PI;
    } else if diff < -std::f64::consts::FRAC_PI_2 {
        diff += std::f64::consts::PI;
    }
    from + diff
}

fn direction_yaw(dir: Vec3) -> f64 {
    dir.y.atan2(dir.x)
}

/// Sample the plan into a timed trajectory. `scene.cable_state` must be the
/// planning-time (preprocessed) chain so grasp poses and yaws resolve.
pub fn discretize(plan: &Plan, scene: &Scene, params: &PlanParams) -> Trajectory {
    let open_stroke = scene.gripper.stroke_range.1;
    let sgm_stroke = (scene.cable.diameter + params.sgm_clearance).min(open_stroke);
    let tgm_stroke = params.tgm_ratio * scene.cable.diameter;

    // Initial hover above the first manipulation target.
    let first_target = plan
        .primitives
        .iter()
        .find_map(|p| match p {
            Primitive::Adjust(mv) => Some(mv.anchor_position),
            Primitive::Grasp { node, .. } => Some(scene.cable_state.nodes[*node]),
            _ => None,
        })
        .unwrap_or_else(|| Point::new(0.0, 0.0, scene.table_height));
    let start = Waypoint {
        t: 0.0,
        position: first_target + Vec3::new(0.0, 0.0, params.travel_height),
        yaw: 0.0,
        stroke: open_stroke,
    };
    let mut b = TrajectoryBuilder::new(params.dt, start);

    for (idx, prim) in plan.primitives.iter().enumerate() {
        let slot = plan.slot_annotations[idx];
        match prim {
            Primitive::Adjust(mv) => {
                let yaw = b.current().yaw;
                b.linear(SegmentKind::Travel, slot, mv.anchor_position, yaw, params.travel_speed, open_stroke);
                b.dwell(SegmentKind::GraspClose, slot, params.mode_change_time, sgm_stroke);
                b.linear(
                    SegmentKind::AdjustDrag,
                    slot,
                    mv.anchor_position + mv.vector,
                    yaw,
                    params.guide_speed,
                    sgm_stroke,
                );
                b.dwell(SegmentKind::Release, slot, params.mode_change_time, open_stroke);
            }
            Primitive::Grasp { node, .. } => {
                let target = scene.cable_state.nodes[*node];
                let yaw = crate::scene::grasp_direction(&scene.cable_state, *node)
                    .map(direction_yaw)
                    .unwrap_or(0.0);
                let yaw = nearest_yaw(b.current().yaw, yaw);
                b.linear(SegmentKind::Travel, slot, target, yaw, params.travel_speed, open_stroke);
                b.dwell(SegmentKind::GraspClose, slot, params.mode_change_time, sgm_stroke);
            }
            Primitive::Offset { vector } => {
                let to = b.current().position + vector;
                let yaw = b.current().yaw;
                let stroke = b.current().stroke;
                b.linear(SegmentKind::OffsetMove, slot, to, yaw, params.guide_speed, stroke);
            }
            Primitive::Guide { to, align_axis, .. } => {
                let yaw = nearest_yaw(b.current().yaw, direction_yaw(*align_axis));
                let stroke = b.current().stroke;
                b.linear(SegmentKind::Guide, slot, *to, yaw, params.guide_speed, stroke);
            }
            Primitive::Insert { center, start, end, rate } => {
                let arc = InsertArc::solve(*center, *start, end.z).expect("validated at compile");
                let duration = arc.arc_length() / rate;
                let yaw = b.current().yaw;
                let stroke = b.current().stroke;
                b.push_segment(SegmentKind::Insert, slot, duration.max(params.dt), move |s| {
                    let phi = arc.phi_start + (arc.phi_end - arc.phi_start) * s;
                    (arc.point_at(phi), yaw, stroke)
                });
            }
            Primitive::SetMode(mode) => {
                let stroke = match mode {
                    GraspMode::Slack => sgm_stroke,
                    GraspMode::Tight => tgm_stroke,
                };
                if (stroke - b.current().stroke).abs() > 1e-12 {
                    b.dwell(SegmentKind::ModeChange(*mode), slot, params.mode_change_time, stroke);
                }
            }
            Primitive::Release => {
                b.dwell(SegmentKind::Release, slot, params.mode_change_time, open_stroke);
            }
        }
    }
    b.finish()
}

/// Write the trajectory as `t,x,y,z,yaw,stroke` CSV rows.
pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, out: &mut W) -> io::Result<()> {
    writeln!(out, "t,x,y,z,yaw,stroke")?;
    for w in &trajectory.waypoints {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            w.t, w.position.x, w.position.y, w.position.z, w.yaw, w.stroke
        )?;
    }
    Ok(())
}
