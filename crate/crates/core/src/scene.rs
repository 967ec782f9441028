//! Task-configuration data model shared by every pipeline stage.
//!
//! A scene is: an ordered list of channel slots standing on a table (the
//! required routing order, fixed end first), one cable anchored at a fixed
//! end and represented by a uniform-arclength node chain, and the gripper
//! description.

use crate::geometry::FingernailProfile;
use crate::{Point, Vec3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("degenerate direction at node {0}: neighbor nodes coincide")]
    DegenerateDirection(usize),
    #[error("degenerate polyline: {0}")]
    DegeneratePolyline(String),
    #[error("invalid scene: {0}")]
    Invalid(String),
}

/// Channel slot dimensions. The opening is a `width x height` window; the
/// slot body fits inside a circle of `max_radius` on the table plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotSpec {
    /// Opening width `w_s`, m.
    pub width: f64,
    /// Opening (and body) height `h_s`, m.
    pub height: f64,
    /// Circumscribed footprint radius `R_s`, m.
    pub max_radius: f64,
}

impl SlotSpec {
    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.width > 0.0 && self.height > 0.0 && self.max_radius > 0.0) {
            return Err(SceneError::Invalid("slot dimensions must be positive".into()));
        }
        if self.max_radius < self.width / 2.0 {
            return Err(SceneError::Invalid(format!(
                "slot max radius {} smaller than half width {}",
                self.max_radius,
                self.width / 2.0
            )));
        }
        Ok(())
    }
}

/// Slot placement: center of the slot body (mid-height) and the horizontal
/// axis the cable must align with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotPose {
    pub center: Point,
    /// Unit vector along the slot channel; horizontal component nonzero.
    pub axis: Vec3,
}

impl SlotPose {
    pub fn new(center: Point, axis: Vec3) -> Result<Self, SceneError> {
        let norm = axis.norm();
        if norm < 1e-12 {
            return Err(SceneError::Invalid("slot axis has zero length".into()));
        }
        let axis = axis / norm;
        if axis.x.hypot(axis.y) < 1e-9 {
            return Err(SceneError::Invalid(
                "slot axis must have a nonzero horizontal component".into(),
            ));
        }
        Ok(Self { center, axis })
    }
}

/// Qualitative bending stiffness class of a cable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rigidity {
    Low,
    Medium,
    High,
}

impl std::fmt::Display for Rigidity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rigidity::Low => write!(f, "low"),
            Rigidity::Medium => write!(f, "medium"),
            Rigidity::High => write!(f, "high"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CableSpec {
    /// Total cable length, m.
    pub total_length: f64,
    /// Cable diameter `D_c`, m.
    pub diameter: f64,
    /// Linear density, kg/m.
    pub linear_density: f64,
    pub rigidity: Rigidity,
}

impl CableSpec {
    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.total_length > 0.0 && self.diameter > 0.0 && self.linear_density > 0.0) {
            return Err(SceneError::Invalid("cable parameters must be positive".into()));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.diameter / 2.0
    }
}

/// Ordered backbone node chain abstracting the cable centerline.
///
/// `nodes[0]` sits at the fixed end; the last node is the loose end. At rest
/// the nodes are uniformly spaced along arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableState {
    pub nodes: Vec<Point>,
    pub fixed_end: Point,
}

impl CableState {
    pub fn new(nodes: Vec<Point>, fixed_end: Point) -> Result<Self, SceneError> {
        if nodes.len() < 3 {
            return Err(SceneError::Invalid(format!(
                "node chain needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        Ok(Self { nodes, fixed_end })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Polyline length of the chain, m.
    pub fn arclength(&self) -> f64 {
        polyline_length(&self.nodes)
    }

    /// Rest spacing implied by a cable of `total_length` discretized into
    /// this many nodes.
    pub fn rest_spacing(&self, total_length: f64) -> f64 {
        total_length / (self.node_count() as f64 - 1.0)
    }
}

/// Gripper description: body envelope plus the fingernail profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperSpec {
    /// Body width `w_g`, m.
    pub body_width: f64,
    /// Fingernail height `h_g`, m.
    pub fingernail_height: f64,
    /// Outer profile radius `R_g`, m (used for the slot exclusion zones).
    pub outer_profile_radius: f64,
    /// Usable stroke interval `(min, max)`, m.
    pub stroke_range: (f64, f64),
    pub profile: FingernailProfile,
}

impl GripperSpec {
    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.body_width > 0.0 && self.fingernail_height > 0.0 && self.outer_profile_radius > 0.0)
        {
            return Err(SceneError::Invalid("gripper dimensions must be positive".into()));
        }
        if !(self.stroke_range.0 >= 0.0 && self.stroke_range.1 > self.stroke_range.0) {
            return Err(SceneError::Invalid("gripper stroke range is empty".into()));
        }
        Ok(())
    }
}

/// Full task configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    /// Slots in required routing order (fixed end first).
    pub slots: Vec<(SlotSpec, SlotPose)>,
    pub cable: CableSpec,
    pub cable_state: CableState,
    pub gripper: GripperSpec,
    /// Table plane height `z0`, m.
    pub table_height: f64,
}

impl Scene {
    pub fn validate(&self) -> Result<(), SceneError> {
        if self.slots.is_empty() {
            return Err(SceneError::Invalid("scene needs at least one slot".into()));
        }
        for (spec, _) in &self.slots {
            spec.validate()?;
        }
        self.cable.validate()?;
        self.gripper.validate()?;
        Ok(())
    }
}

/// Tangent direction of the chain at node `i` (0-based), from the central
/// difference `N[i+1] - N[i-1]`; endpoints fall back to one-sided
/// differences. The sign is arbitrary (a line, not a ray).
pub fn grasp_direction(state: &CableState, i: usize) -> Result<Vec3, SceneError> {
    let n = state.nodes.len();
    assert!(i < n, "node index {i} out of range");
    let (a, b) = if i == 0 {
        (0, 1)
    } else if i == n - 1 {
        (n - 2, n - 1)
    } else {
        (i - 1, i + 1)
    };
    let diff = state.nodes[b] - state.nodes[a];
    let norm = diff.norm();
    if norm < 1e-9 {
        return Err(SceneError::DegenerateDirection(i));
    }
    Ok(diff / norm)
}

/// Total length of a polyline, m.
pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Resample a polyline to `q` nodes at uniform arclength. The first input
/// point becomes the fixed end.
pub fn resample_polyline(points: &[Point], q: usize) -> Result<CableState, SceneError> {
    if points.len() < 2 {
        return Err(SceneError::DegeneratePolyline(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    if q < 3 {
        return Err(SceneError::DegeneratePolyline(format!(
            "need at least 3 output nodes, got {q}"
        )));
    }
    let total = polyline_length(points);
    if total <= 0.0 {
        return Err(SceneError::DegeneratePolyline("zero arclength".into()));
    }

    let mut nodes = Vec::with_capacity(q);
    nodes.push(points[0]);
    let step = total / (q as f64 - 1.0);
    let mut seg = 0; // current input segment
    let mut seg_start_arc = 0.0;
    let mut seg_len = (points[1] - points[0]).norm();
    for k in 1..q - 1 {
        let target = step * k as f64;
        while seg_start_arc + seg_len < target && seg + 2 < points.len() {
            seg_start_arc += seg_len;
            seg += 1;
            seg_len = (points[seg + 1] - points[seg]).norm();
        }
        let frac = if seg_len > 0.0 {
            ((target - seg_start_arc) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        nodes.push(points[seg] + (points[seg + 1] - points[seg]) * frac);
    }
    nodes.push(points[points.len() - 1]);
    CableState::new(nodes, points[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    #[test]
    fn grasp_direction_collinear_chain() {
        let state = CableState::new(vec![p(0.0, 0.0, 0.0), p(0.1, 0.0, 0.0), p(0.2, 0.0, 0.0)], p(0.0, 0.0, 0.0)).unwrap();
        let dir = grasp_direction(&state, 1).unwrap();
        assert_relative_eq!(dir.x, 1.0);
        assert_relative_eq!(dir.y, 0.0);
    }

    #[test]
    fn grasp_direction_endpoints_use_one_sided_difference() {
        let state = CableState::new(vec![p(0.0, 0.0, 0.0), p(0.0, 0.1, 0.0), p(0.0, 0.2, 0.0)], p(0.0, 0.0, 0.0)).unwrap();
        let first = grasp_direction(&state, 0).unwrap();
        assert_relative_eq!(first.y, 1.0);
        let last = grasp_direction(&state, 2).unwrap();
        assert_relative_eq!(last.y, 1.0);
    }

    #[test]
    fn grasp_direction_right_angle_bend() {
        let state = CableState::new(
            vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(1.0, 1.0, 0.0)],
            p(0.0, 0.0, 0.0),
        )
        .unwrap();
        let dir = grasp_direction(&state, 1).unwrap();
        let expected = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(dir.x, expected, epsilon = 1e-12);
        assert_relative_eq!(dir.y, expected, epsilon = 1e-12);
    }

    #[test]
    fn grasp_direction_degenerate_neighbors() {
        let state = CableState::new(
            vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 0.0, 0.0)],
            p(0.0, 0.0, 0.0),
        )
        .unwrap();
        assert!(matches!(
            grasp_direction(&state, 1),
            Err(SceneError::DegenerateDirection(1))
        ));
    }

    #[test]
    fn resample_straight_segment() {
        let state = resample_polyline(&[p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0)], 5).unwrap();
        let xs: Vec<f64> = state.nodes.iter().map(|n| n.x).collect();
        for (got, want) in xs.iter().zip([0.0, 0.25, 0.5, 0.75, 1.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn resample_semicircle_midpoint() {
        let r = 0.5;
        let pts: Vec<Point> = (0..=200)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 200.0;
                p(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        let state = resample_polyline(&pts, 3).unwrap();
        assert_relative_eq!(state.nodes[0].x, r, epsilon = 1e-9);
        assert_relative_eq!(state.nodes[1].x, 0.0, epsilon = 1e-4);
        assert_relative_eq!(state.nodes[1].y, r, epsilon = 1e-4);
        assert_relative_eq!(state.nodes[2].x, -r, epsilon = 1e-9);
    }

    /// Arclength coordinate of `q` on the polyline, found by projecting onto
    /// each segment; independent of the resampler's bookkeeping.
    fn arc_coordinate(points: &[Point], q: &Point) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        let mut arc_before = 0.0;
        for w in points.windows(2) {
            let seg = w[1] - w[0];
            let len = seg.norm();
            let t = if len > 0.0 {
                ((q - w[0]).dot(&seg) / (len * len)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let closest = w[0] + seg * t;
            let d = (q - closest).norm();
            if d < best.0 {
                best = (d, arc_before + t * len);
            }
            arc_before += len;
        }
        best.1
    }

    #[test]
    fn resample_preserves_arclength_on_polyline() {
        let pts = vec![p(0.0, 0.0, 0.0), p(0.3, 0.4, 0.0), p(0.3, 0.4, 0.5), p(1.0, 1.0, 1.0)];
        let total = polyline_length(&pts);
        let q = 400;
        let state = resample_polyline(&pts, q).unwrap();
        assert_relative_eq!(state.arclength(), total, max_relative = 1e-3);
        // Arclength positions along the source polyline are uniform to 1e-6.
        let step = total / (q as f64 - 1.0);
        let arcs: Vec<f64> = state.nodes.iter().map(|n| arc_coordinate(&pts, n)).collect();
        for (k, pair) in arcs.windows(2).enumerate() {
            assert!(
                (pair[1] - pair[0] - step).abs() < 1e-6,
                "nonuniform arc spacing at {k}: {} vs {step}",
                pair[1] - pair[0]
            );
        }
    }

    #[test]
    fn resample_rejects_degenerate_input() {
        assert!(resample_polyline(&[p(0.0, 0.0, 0.0)], 5).is_err());
        assert!(resample_polyline(&[p(0.0, 0.0, 0.0), p(0.0, 0.0, 0.0)], 5).is_err());
    }

    proptest! {
        #[test]
        fn resampled_straight_line_has_constant_direction(len in 0.1..2.0_f64, q in 3_usize..40) {
            let state = resample_polyline(&[p(0.0, 0.0, 0.0), p(len, 0.0, 0.0)], q).unwrap();
            for i in 0..q {
                let dir = grasp_direction(&state, i).unwrap();
                prop_assert!((dir.x - 1.0).abs() < 1e-9);
            }
            prop_assert!((state.arclength() - len).abs() <= 1e-3 * len);
        }
    }
}
