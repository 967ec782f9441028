//! Grasp node selection near the first slot.
//!
//! Interior chain nodes whose fixed-end segment length stays below the
//! fixed-end-to-slot distance are candidates. Each candidate is scored by a
//! normalized moving-distance factor and a normalized torsion-angle factor;
//! 50 linearly spaced weight pairs each elect a winner and the most frequent
//! winner is grasped. Frequency ties fall back to the balanced 0.5/0.5
//! score, then to the lower node index.

use crate::scene::{grasp_direction, CableState, SlotPose};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraspError {
    #[error("no candidate nodes: every interior node fails the segment-length constraint")]
    NoCandidates,
}

/// How the fixed-end segment length `L_i` of node `i` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLengthConvention {
    /// `L_i = L_total * i / Q` with 1-based `i` over `Q` nodes.
    #[default]
    NodeFraction,
    /// Exact rest arclength `L_i = L_total * (i - 1) / (Q - 1)`.
    Arclength,
}

/// A scored grasp candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspCandidate {
    /// 0-based chain node index.
    pub node: usize,
    /// Segment length from the fixed end, m.
    pub arc_from_fixed: f64,
    /// Euclidean distance to the first slot center, m.
    pub slot_distance: f64,
    /// Angle between the grasp direction and the slot axis, folded to
    /// `[0, pi/2]`, rad.
    pub torsion_angle: f64,
    /// Normalized distance factor in `[0, 1]` (1 = closest).
    pub distance_score: f64,
    /// Normalized torsion factor in `[0, 1]` (1 = aligned).
    pub torsion_score: f64,
}

/// Candidate filter: interior nodes with `L_i` strictly below the
/// fixed-end-to-first-slot distance, carrying raw distance and torsion
/// factors. Nodes with a degenerate tangent are skipped.
pub fn candidate_nodes(
    state: &CableState,
    first_slot: &SlotPose,
    total_length: f64,
    convention: SegmentLengthConvention,
) -> Result<Vec<GraspCandidate>, GraspError> {
    let q = state.nodes.len();
    let reach = (first_slot.center - state.fixed_end).norm();
    let mut out = Vec::new();
    for i in 1..q - 1 {
        let one_based = (i + 1) as f64;
        let arc = match convention {
            SegmentLengthConvention::NodeFraction => total_length * one_based / q as f64,
            SegmentLengthConvention::Arclength => {
                total_length * (one_based - 1.0) / (q as f64 - 1.0)
            }
        };
        if arc >= reach {
            continue;
        }
        let Ok(dir) = grasp_direction(state, i) else {
            continue;
        };
        let cos = dir.dot(&first_slot.axis).abs().min(1.0);
        let torsion = cos.acos(); // folded to [0, pi/2] by |cos|
        out.push(GraspCandidate {
            node: i,
            arc_from_fixed: arc,
            slot_distance: (state.nodes[i] - first_slot.center).norm(),
            torsion_angle: torsion,
            distance_score: 0.0,
            torsion_score: 0.0,
        });
    }
    if out.is_empty() {
        return Err(GraspError::NoCandidates);
    }
    Ok(out)
}

/// Fill in the normalized factors.
///
/// `D_norm = (D_max - D_i) / (D_max - D_min)` (1 when all distances tie) and
/// `Theta_norm = 1 - Theta_i / (pi/2)`.
pub fn normalize_factors(candidates: &mut [GraspCandidate]) {
    let d_min = candidates
        .iter()
        .map(|c| c.slot_distance)
        .fold(f64::INFINITY, f64::min);
    let d_max = candidates
        .iter()
        .map(|c| c.slot_distance)
        .fold(f64::NEG_INFINITY, f64::max);
    let span = d_max - d_min;
    for c in candidates.iter_mut() {
        c.distance_score = if span > 0.0 { (d_max - c.slot_distance) / span } else { 1.0 };
        c.torsion_score = 1.0 - c.torsion_angle / std::f64::consts::FRAC_PI_2;
    }
}

/// The 50 linearly spaced weight pairs `(w_D, w_theta)`, from `(1, 0)` down
/// to `(0.02, 0.98)` in steps of 0.02.
pub fn weight_pairs() -> [(f64, f64); 50] {
    let mut pairs = [(0.0, 0.0); 50];
    for (k, pair) in pairs.iter_mut().enumerate() {
        let w_theta = 0.02 * k as f64;
        *pair = (1.0 - w_theta, w_theta);
    }
    pairs
}

/// Outcome of the frequency vote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteResult {
    /// Winning node index per weight pair, `k = 1..=50` in order.
    pub winners: Vec<usize>,
    /// `(node index, frequency)` sorted by node index; frequencies sum to 50.
    pub frequencies: Vec<(usize, u32)>,
    /// Selected grasp node index.
    pub final_node: usize,
    /// True when the frequency argmax was not unique.
    pub tie_break_used: bool,
}

/// Run the 50-pair frequency vote over normalized candidates (ascending node
/// index). Within a pair, score ties go to the lower node index; frequency
/// ties go to the higher balanced score, then the lower node index.
pub fn vote(candidates: &[GraspCandidate]) -> VoteResult {
    assert!(!candidates.is_empty(), "vote needs at least one candidate");
    let pairs = weight_pairs();
    let mut winners = Vec::with_capacity(50);
    let mut counts: Vec<u32> = vec![0; candidates.len()];

    for (w_d, w_t) in pairs {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (ci, c) in candidates.iter().enumerate() {
            let score = w_d * c.distance_score + w_t * c.torsion_score;
            if score > best_score {
                best_score = score;
                best = ci;
            }
        }
        counts[best] += 1;
        winners.push(candidates[best].node);
    }

    let max_freq = *counts.iter().max().expect("nonempty");
    let top: Vec<usize> = (0..candidates.len())
        .filter(|&ci| counts[ci] == max_freq)
        .collect();
    let tie_break_used = top.len() > 1;
    let final_ci = if tie_break_used {
        let mut best = top[0];
        let base =
            |ci: usize| 0.5 * candidates[ci].distance_score + 0.5 * candidates[ci].torsion_score;
        for &ci in &top[1..] {
            if base(ci) > base(best) {
                best = ci;
            }
        }
        best
    } else {
        top[0]
    };

    VoteResult {
        winners,
        frequencies: candidates
            .iter()
            .enumerate()
            .map(|(ci, c)| (c.node, counts[ci]))
            .collect(),
        final_node: candidates[final_ci].node,
        tie_break_used,
    }
}

/// Candidate filter, normalization and vote in one call.
pub fn select_grasp_node(
    state: &CableState,
    first_slot: &SlotPose,
    total_length: f64,
    convention: SegmentLengthConvention,
) -> Result<(Vec<GraspCandidate>, VoteResult), GraspError> {
    let mut candidates = candidate_nodes(state, first_slot, total_length, convention)?;
    normalize_factors(&mut candidates);
    let result = vote(&candidates);
    Ok((candidates, result))
}
