//! Deterministic cable-routing planning toolkit.
//!
//! The crate models a fingernail-style gripper grasping a deformable cable,
//! perceives a synthetic tabletop scene (channel slots plus one cable),
//! selects a grasp node by multi-weight voting, compiles a single-grasp
//! routing plan from four motion primitives, and validates the plan in a
//! quasi-static node-chain simulator that classifies per-slot outcomes.
//!
//! Pipeline stages map onto the top-level modules:
//!
//! - [`geometry`] — fingernail/cable contact model and grasp modes
//! - [`scene`] — task configuration data model (slots, cable, gripper)
//! - [`perception`] — synthetic depth sensing, slot pose recovery, node chain
//! - [`preprocess`] — collision-circle avoidance adjustments
//! - [`grasp`] — candidate filtering and the 50-weight frequency vote
//! - [`plan`] — motion primitives, plan compilation, trajectory sampling
//! - [`sim`] — quasi-static execution and failure classification
//! - [`scenario`] — scenario file schema, loading and generation
//! - [`pipeline`] — end-to-end orchestration and batch reports
//!
//! Everything is deterministic: all randomness flows from explicit seeds and
//! repeated runs produce byte-identical outputs.

pub mod geometry;
pub mod grasp;
pub mod perception;
pub mod pipeline;
pub mod plan;
pub mod preprocess;
pub mod scenario;
pub mod scene;
pub mod sim;

/// World-frame position, meters.
pub type Point = nalgebra::Point3<f64>;
/// World-frame displacement or direction, meters / unitless.
pub type Vec3 = nalgebra::Vector3<f64>;
