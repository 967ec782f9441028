//! Fingernail-cable contact model.
//!
//! A fingernail is a circular-arc jaw insert: its inner contact surface is an
//! arc of radius `R_f` centered on the jaw baseline, so a cable cross-section
//! of radius `R_cab` rests tangent inside that arc. Closing the gripper to
//! stroke `d` moves the cable center to `x = d/2`, which fixes the contact
//! point, the contact angle and (through static equilibrium of the lifted
//! cable weight) the contact force. The force-stroke coupling lets the
//! controller pick a grasp force by picking a stroke, with minimum `m*g/2`
//! at `d = 2*R_f`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default gravitational acceleration, m/s^2.
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Default friction coefficient used for parallel-jaw comparisons.
pub const DEFAULT_FRICTION: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("infeasible geometry: cable radius {cable_radius} m does not fit inside fingernail inner radius {inner_radius} m")]
    InfeasibleGeometry {
        inner_radius: f64,
        cable_radius: f64,
    },
    #[error("stroke {stroke} m outside valid domain ({min}, {max}) m")]
    StrokeOutOfDomain { stroke: f64, min: f64, max: f64 },
    #[error("friction coefficient must be positive, got {0}")]
    ZeroFriction(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Fingernail contact-surface geometry.
///
/// `inner_radius` is the arc the cable actually touches; `outer_radius` is
/// the larger arc above it that keeps the tip nearly horizontal so it can
/// wedge under a cable lying on a flat surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingernailProfile {
    /// Inner contact arc radius `R_f`, m.
    pub inner_radius: f64,
    /// Outer arc radius `R_o`, m. Must exceed `inner_radius`.
    pub outer_radius: f64,
    /// Tip height `h_g`, m.
    pub tip_height: f64,
}

impl FingernailProfile {
    pub fn new(inner_radius: f64, outer_radius: f64, tip_height: f64) -> Result<Self, GeometryError> {
        if !(inner_radius > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "inner radius must be positive, got {inner_radius}"
            )));
        }
        if !(outer_radius > inner_radius) {
            return Err(GeometryError::InvalidParameter(format!(
                "outer radius {outer_radius} must exceed inner radius {inner_radius}"
            )));
        }
        if !(tip_height > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "tip height must be positive, got {tip_height}"
            )));
        }
        Ok(Self {
            inner_radius,
            outer_radius,
            tip_height,
        })
    }
}

/// Cable cross-section and mass properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CableSection {
    /// Cross-section radius `R_cab`, m.
    pub radius: f64,
    /// Linear density, kg/m.
    pub linear_density: f64,
}

impl CableSection {
    pub fn new(radius: f64, linear_density: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "cable radius must be positive, got {radius}"
            )));
        }
        if !(linear_density > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "linear density must be positive, got {linear_density}"
            )));
        }
        Ok(Self {
            radius,
            linear_density,
        })
    }

    /// Cable diameter `D_c = 2 * R_cab`, m.
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

/// Solved contact state for one (profile, cable, stroke) configuration.
///
/// Planar coordinates: origin at the tangent point between the fingernail
/// inner surface and the jaw, x along the closing direction, arc center
/// `O_f` at `(R_f, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspContactSolution {
    /// Contact point `A = (x_A, y_A)`, m.
    pub contact_point: (f64, f64),
    /// Cable center `O_c = (x_Oc, y_Oc)`, m.
    pub cable_center: (f64, f64),
    /// Inclination of the contact force vs. horizontal, rad, in `(0, pi/2]`.
    pub contact_angle: f64,
    /// Contact force magnitude `N_c`, N.
    pub contact_force: f64,
}

/// Grasp mode, selected by comparing the stroke with the cable diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraspMode {
    /// Slack grasping mode (SGM): `d > D_c`. Gentle radial constraint, the
    /// cable may slide axially through the jaw.
    Slack,
    /// Tight grasping mode (TGM): `d <= D_c`. The cable is clamped.
    Tight,
}

impl std::fmt::Display for GraspMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraspMode::Slack => write!(f, "SGM"),
            GraspMode::Tight => write!(f, "TGM"),
        }
    }
}

/// Open interval of strokes for which a tangent contact with `y_Oc > 0`
/// exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeDomain {
    pub min: f64,
    pub max: f64,
}

impl StrokeDomain {
    /// Strict interior test (the interval is open on both ends).
    pub fn contains(&self, stroke: f64) -> bool {
        stroke > self.min && stroke < self.max
    }

    /// Evenly spaced strokes strictly inside the domain.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        let span = self.max - self.min;
        (1..=n)
            .map(|i| self.min + span * i as f64 / (n as f64 + 1.0))
            .collect()
    }
}

/// Stroke interval within which the tangency system is solvable:
/// `(R_f - d/2)^2 < (R_f - R_cab)^2`, i.e. `d` in `(2*R_cab, 2*(2*R_f - R_cab))`.
pub fn valid_stroke_domain(
    profile: &FingernailProfile,
    cable: &CableSection,
) -> Result<StrokeDomain, GeometryError> {
    let r_f = profile.inner_radius;
    let r_cab = cable.radius;
    if r_f <= r_cab {
        return Err(GeometryError::InfeasibleGeometry {
            inner_radius: r_f,
            cable_radius: r_cab,
        });
    }
    Ok(StrokeDomain {
        min: 2.0 * r_cab,
        max: 2.0 * (2.0 * r_f - r_cab),
    })
}

/// Solve the tangency system for stroke `d` and a lifted cable segment of
/// length `lifted_length`.
///
/// Closed form: `x_Oc = d/2`, `y_Oc = sqrt((R_f - R_cab)^2 - (R_f - d/2)^2)`,
/// contact point collinear with the two circle centers, contact angle
/// `asin(y_Oc / (R_f - R_cab))`, force `rho_l * L * g / (2 sin(theta))`.
pub fn solve_contact(
    profile: &FingernailProfile,
    cable: &CableSection,
    stroke: f64,
    lifted_length: f64,
    gravity: f64,
) -> Result<GraspContactSolution, GeometryError> {
    let domain = valid_stroke_domain(profile, cable)?;
    if !domain.contains(stroke) {
        return Err(GeometryError::StrokeOutOfDomain {
            stroke,
            min: domain.min,
            max: domain.max,
        });
    }
    if !(lifted_length > 0.0) {
        return Err(GeometryError::InvalidParameter(format!(
            "lifted length must be positive, got {lifted_length}"
        )));
    }

    let r_f = profile.inner_radius;
    let r_cab = cable.radius;
    let center_gap = r_f - r_cab;

    let x_oc = stroke / 2.0;
    let y_oc = (center_gap * center_gap - (r_f - x_oc) * (r_f - x_oc)).sqrt();

    // Internal tangency: A lies on the ray from O_f through O_c at radius R_f.
    let x_of = r_f;
    let x_a = x_of + r_f * (x_oc - x_of) / center_gap;
    let y_a = r_f * y_oc / center_gap;

    let sin_theta = y_oc / center_gap;
    let theta = sin_theta.min(1.0).asin();

    let mass = cable.linear_density * lifted_length;
    let force = mass * gravity * center_gap / (2.0 * y_oc);

    Ok(GraspContactSolution {
        contact_point: (x_a, y_a),
        cable_center: (x_oc, y_oc),
        contact_angle: theta,
        contact_force: force,
    })
}

/// Force-stroke curve sampled at `strokes`, with out-of-domain samples
/// collected separately instead of aborting the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceStrokeCurve {
    /// `(stroke, contact force)` pairs for the valid samples, input order.
    pub points: Vec<(f64, f64)>,
    /// Samples that fell outside the valid stroke domain.
    pub skipped: Vec<f64>,
}

pub fn force_stroke_curve(
    profile: &FingernailProfile,
    cable: &CableSection,
    lifted_length: f64,
    gravity: f64,
    strokes: &[f64],
) -> Result<ForceStrokeCurve, GeometryError> {
    // Surface the infeasible-geometry case eagerly; per-sample domain
    // violations are soft.
    valid_stroke_domain(profile, cable)?;
    let mut points = Vec::with_capacity(strokes.len());
    let mut skipped = Vec::new();
    for &d in strokes {
        match solve_contact(profile, cable, d, lifted_length, gravity) {
            Ok(sol) => points.push((d, sol.contact_force)),
            Err(GeometryError::StrokeOutOfDomain { .. }) => skipped.push(d),
            Err(e) => return Err(e),
        }
    }
    Ok(ForceStrokeCurve { points, skipped })
}

/// Minimum contact force for a plain parallel jaw holding mass `m` by
/// friction alone: `N_p = m*g / (2*mu)`.
pub fn parallel_gripper_min_force(mass: f64, friction: f64, gravity: f64) -> Result<f64, GeometryError> {
    if !(friction > 0.0) {
        return Err(GeometryError::ZeroFriction(friction));
    }
    if mass < 0.0 {
        return Err(GeometryError::InvalidParameter(format!(
            "mass must be nonnegative, got {mass}"
        )));
    }
    Ok(mass * gravity / (2.0 * friction))
}

/// True when the fingernail holds with less force than the parallel-jaw
/// baseline at equal lifted mass, i.e. when `sin(theta) > mu`.
pub fn fingernail_advantage(solution: &GraspContactSolution, friction: f64) -> bool {
    solution.contact_angle.sin() > friction
}

/// Grasp mode for stroke `d` against cable diameter `D_c`.
///
/// `d == D_c` maps to [`GraspMode::Tight`]: contact without clearance.
pub fn select_mode(stroke: f64, cable_diameter: f64) -> GraspMode {
    if stroke > cable_diameter {
        GraspMode::Slack
    } else {
        GraspMode::Tight
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    const MM: f64 = 1e-3;

    fn profile_10mm() -> FingernailProfile {
        FingernailProfile::new(10.0 * MM, 16.0 * MM, 20.0 * MM).unwrap()
    }

    /// Independent route to the same contact state: bisection for `y_Oc` on
    /// the tangency residual, then a general two-circle intersection for the
    /// contact point, then the arctan form of the contact angle and the
    /// static equilibrium for the force. Used to pin the closed form.
    pub(crate) mod oracle {
        pub struct OracleSolution {
            pub contact_point: (f64, f64),
            pub cable_center: (f64, f64),
            pub sin_theta: f64,
            pub force: f64,
        }

        /// Root of `(d/2 - R_f)^2 + y^2 - (R_f - R_cab)^2` in `y >= 0`.
        fn bisect_y_oc(r_f: f64, r_cab: f64, d: f64) -> f64 {
            let f = |y: f64| (d / 2.0 - r_f).powi(2) + y * y - (r_f - r_cab).powi(2);
            let (mut lo, mut hi) = (0.0, r_f);
            assert!(f(lo) <= 0.0 && f(hi) > 0.0, "root not bracketed");
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }

        /// Radical-line construction of the circle-circle intersection; the
        /// two circles here are internally tangent so the half-chord is ~0.
        fn circle_intersection(
            c1: (f64, f64),
            r1: f64,
            c2: (f64, f64),
            r2: f64,
        ) -> (f64, f64) {
            let dx = c2.0 - c1.0;
            let dy = c2.1 - c1.1;
            let dist = (dx * dx + dy * dy).sqrt();
            let a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
            (c1.0 + a * dx / dist, c1.1 + a * dy / dist)
        }

        pub fn solve(r_f: f64, r_cab: f64, d: f64, mass: f64, gravity: f64) -> OracleSolution {
            let x_oc = d / 2.0;
            let y_oc = bisect_y_oc(r_f, r_cab, d);
            let (x_a, y_a) = circle_intersection((r_f, 0.0), r_f, (x_oc, y_oc), r_cab);
            // Inclination of the contact force; fold obtuse angles since only
            // the vertical component enters the balance.
            let theta = y_a.atan2(r_f - x_a);
            let sin_theta = if theta > std::f64::consts::FRAC_PI_2 {
                (std::f64::consts::PI - theta).sin()
            } else {
                theta.sin()
            };
            OracleSolution {
                contact_point: (x_a, y_a),
                cable_center: (x_oc, y_oc),
                sin_theta,
                force: mass * gravity / (2.0 * sin_theta),
            }
        }
    }

    #[test]
    fn stroke_domain_matches_interval_arithmetic() {
        let cable = CableSection::new(2.0 * MM, 0.1).unwrap();
        let domain = valid_stroke_domain(&profile_10mm(), &cable).unwrap();
        assert_relative_eq!(domain.min, 4.0 * MM);
        assert_relative_eq!(domain.max, 36.0 * MM);

        // Same interval recovered by scanning the tangency inequality.
        let r_f = 10.0 * MM;
        let r_cab = 2.0 * MM;
        let feasible = |d: f64| (r_f - d / 2.0).powi(2) < (r_f - r_cab).powi(2);
        let eps = 1e-9;
        assert!(!feasible(domain.min - eps) && feasible(domain.min + eps));
        assert!(feasible(domain.max - eps) && !feasible(domain.max + eps));
    }

    #[test]
    fn stroke_domain_rejects_oversized_cable() {
        let cable = CableSection::new(10.0 * MM, 0.1).unwrap();
        let err = valid_stroke_domain(&profile_10mm(), &cable).unwrap_err();
        assert!(matches!(err, GeometryError::InfeasibleGeometry { .. }));
    }

    #[test]
    fn stroke_domain_near_degenerate_is_nonempty() {
        let cable = CableSection::new(9.999 * MM, 0.1).unwrap();
        let domain = valid_stroke_domain(&profile_10mm(), &cable).unwrap();
        assert!(domain.max > domain.min);
        // Width 4 * (R_f - R_cab) = 4 um.
        assert_abs_diff_eq!(domain.max - domain.min, 4.0 * 0.001 * MM, epsilon = 1e-12);
    }

    #[test]
    fn contact_at_full_arc_stroke_gives_minimum_force() {
        let cable = CableSection::new(2.0 * MM, 0.1 / 2.0).unwrap(); // rho_l * L = 0.1 kg with L = 2 m
        let sol = solve_contact(&profile_10mm(), &cable, 20.0 * MM, 2.0, STANDARD_GRAVITY).unwrap();
        assert_relative_eq!(sol.contact_angle, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(sol.contact_force, 0.4905, epsilon = 1e-12);
    }

    #[test]
    fn contact_mid_stroke_matches_derived_values() {
        // rho_l * L = 0.1 kg
        let cable = CableSection::new(2.0 * MM, 0.1).unwrap();
        let sol = solve_contact(&profile_10mm(), &cable, 12.0 * MM, 1.0, STANDARD_GRAVITY).unwrap();
        assert_relative_eq!(sol.cable_center.1, 48.0_f64.sqrt() * MM, epsilon = 1e-15);
        assert_relative_eq!(sol.contact_angle.sin(), 48.0_f64.sqrt() / 8.0, epsilon = 1e-12);
        let oracle = oracle::solve(10.0 * MM, 2.0 * MM, 12.0 * MM, 0.1, STANDARD_GRAVITY);
        assert_relative_eq!(sol.contact_force, oracle.force, epsilon = 1e-9);
        assert_relative_eq!(sol.contact_force, 0.5664, epsilon = 1e-4);
    }

    #[test]
    fn force_blows_up_at_domain_edge() {
        let cable = CableSection::new(2.0 * MM, 0.1).unwrap();
        let near_edge = solve_contact(&profile_10mm(), &cable, 4.0 * MM + 1e-9, 1.0, STANDARD_GRAVITY).unwrap();
        let mid = solve_contact(&profile_10mm(), &cable, 20.0 * MM, 1.0, STANDARD_GRAVITY).unwrap();
        assert!(near_edge.contact_force > 1e3 * mid.contact_force);
    }

    #[test]
    fn solve_contact_rejects_out_of_domain_stroke() {
        let cable = CableSection::new(2.0 * MM, 0.1).unwrap();
        for d in [0.0, 4.0 * MM, 36.0 * MM, 50.0 * MM] {
            let err = solve_contact(&profile_10mm(), &cable, d, 1.0, STANDARD_GRAVITY).unwrap_err();
            assert!(matches!(err, GeometryError::StrokeOutOfDomain { .. }), "stroke {d}");
        }
    }

    #[test]
    fn closed_form_matches_oracle_on_grid() {
        let pairs = [
            (10.0 * MM, 2.0 * MM),
            (10.0 * MM, 5.0 * MM),
            (15.0 * MM, 2.0 * MM),
            (8.0 * MM, 3.0 * MM),
            (25.0 * MM, 12.0 * MM),
        ];
        for (r_f, r_cab) in pairs {
            let profile = FingernailProfile::new(r_f, 1.8 * r_f, 0.02).unwrap();
            let cable = CableSection::new(r_cab, 0.08).unwrap();
            let domain = valid_stroke_domain(&profile, &cable).unwrap();
            for d in domain.linspace(120) {
                let sol = solve_contact(&profile, &cable, d, 1.5, STANDARD_GRAVITY).unwrap();
                let orc = oracle::solve(r_f, r_cab, d, 0.08 * 1.5, STANDARD_GRAVITY);
                assert_relative_eq!(sol.contact_point.0, orc.contact_point.0, max_relative = 1e-9, epsilon = 1e-12);
                assert_relative_eq!(sol.contact_point.1, orc.contact_point.1, max_relative = 1e-9, epsilon = 1e-12);
                assert_relative_eq!(sol.cable_center.1, orc.cable_center.1, max_relative = 1e-9, epsilon = 1e-15);
                assert_relative_eq!(sol.contact_angle.sin(), orc.sin_theta, max_relative = 1e-9);
                assert_relative_eq!(sol.contact_force, orc.force, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn tangency_residuals_vanish_at_contact_point() {
        let cable = CableSection::new(3.0 * MM, 0.1).unwrap();
        let profile = profile_10mm();
        let domain = valid_stroke_domain(&profile, &cable).unwrap();
        let r_f = profile.inner_radius;
        for d in domain.linspace(50) {
            let sol = solve_contact(&profile, &cable, d, 1.0, STANDARD_GRAVITY).unwrap();
            let (x_a, y_a) = sol.contact_point;
            let (x_oc, y_oc) = sol.cable_center;
            let res_nail = (x_a - r_f).powi(2) + y_a * y_a - r_f * r_f;
            let res_cable = (x_a - x_oc).powi(2) + (y_a - y_oc).powi(2) - cable.radius.powi(2);
            assert!(res_nail.abs() <= 1e-12 * r_f * r_f, "nail residual {res_nail}");
            assert!(res_cable.abs() <= 1e-12 * r_f * r_f, "cable residual {res_cable}");
        }
    }

    #[test]
    fn force_stroke_curve_is_unimodal_and_symmetric() {
        let cable = CableSection::new(2.0 * MM, 0.05).unwrap();
        let profile = profile_10mm();
        let strokes = [12.0 * MM, 16.0 * MM, 20.0 * MM];
        let curve = force_stroke_curve(&profile, &cable, 2.0, STANDARD_GRAVITY, &strokes).unwrap();
        assert!(curve.skipped.is_empty());
        assert!(curve.points[0].1 > curve.points[1].1);
        assert!(curve.points[1].1 > curve.points[2].1);

        // Global minimum at d = 2 R_f equals m g / 2; mirrored samples match.
        let at_min = force_stroke_curve(&profile, &cable, 2.0, STANDARD_GRAVITY, &[20.0 * MM]).unwrap();
        assert_relative_eq!(at_min.points[0].1, 0.05 * 2.0 * STANDARD_GRAVITY / 2.0, epsilon = 1e-12);
        for delta in [1.0 * MM, 3.0 * MM, 7.0 * MM] {
            let sym = force_stroke_curve(
                &profile,
                &cable,
                2.0,
                STANDARD_GRAVITY,
                &[20.0 * MM - delta, 20.0 * MM + delta],
            )
            .unwrap();
            assert_relative_eq!(sym.points[0].1, sym.points[1].1, epsilon = 1e-15);
        }
    }

    #[test]
    fn force_stroke_curve_flags_out_of_domain_samples() {
        let cable = CableSection::new(2.0 * MM, 0.05).unwrap();
        let strokes = [2.0 * MM, 12.0 * MM, 40.0 * MM];
        let curve = force_stroke_curve(&profile_10mm(), &cable, 1.0, STANDARD_GRAVITY, &strokes).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.skipped, vec![2.0 * MM, 40.0 * MM]);
    }

    #[test]
    fn parallel_gripper_baseline_values() {
        assert_relative_eq!(
            parallel_gripper_min_force(0.1, 0.5, STANDARD_GRAVITY).unwrap(),
            0.981,
            epsilon = 1e-12
        );
        assert_eq!(parallel_gripper_min_force(0.0, 0.3, STANDARD_GRAVITY).unwrap(), 0.0);
        assert_relative_eq!(
            parallel_gripper_min_force(0.1, 1.0, STANDARD_GRAVITY).unwrap(),
            0.4905,
            epsilon = 1e-12
        );
        assert!(matches!(
            parallel_gripper_min_force(0.1, 0.0, STANDARD_GRAVITY),
            Err(GeometryError::ZeroFriction(_))
        ));
    }

    #[test]
    fn advantage_cases() {
        let mass = 0.1;
        let g = STANDARD_GRAVITY;
        let sol = |theta: f64| GraspContactSolution {
            contact_point: (0.0, 0.0),
            cable_center: (0.0, 0.0),
            contact_angle: theta,
            contact_force: mass * g / (2.0 * theta.sin()),
        };

        let vertical = sol(std::f64::consts::FRAC_PI_2);
        assert!(fingernail_advantage(&vertical, 0.5));
        assert!(vertical.contact_force < parallel_gripper_min_force(mass, 0.5, g).unwrap());

        // sin(30 deg) == mu: the boundary is excluded.
        let boundary = sol(30.0_f64.to_radians());
        assert!(!fingernail_advantage(&boundary, boundary.contact_angle.sin()));

        let sixty = sol(60.0_f64.to_radians());
        assert!(fingernail_advantage(&sixty, 0.7));
        assert_relative_eq!(sixty.contact_force, 0.577 * mass * g, epsilon = 1e-3);
        let np = parallel_gripper_min_force(mass, 0.7, g).unwrap();
        assert_relative_eq!(np, 0.714 * mass * g, epsilon = 1e-3);
        assert!(sixty.contact_force < np);
    }

    #[test]
    fn mode_selection_boundary() {
        assert_eq!(select_mode(8.0 * MM, 6.0 * MM), GraspMode::Slack);
        assert_eq!(select_mode(4.0 * MM, 6.0 * MM), GraspMode::Tight);
        assert_eq!(select_mode(6.0 * MM, 6.0 * MM), GraspMode::Tight);
    }

    proptest! {
        #[test]
        fn force_symmetric_about_full_arc_stroke(delta in 1e-6..7.9e-3) {
            let profile = profile_10mm();
            let cable = CableSection::new(2.0 * MM, 0.05).unwrap();
            let lo = solve_contact(&profile, &cable, 20.0 * MM - delta, 1.0, STANDARD_GRAVITY).unwrap();
            let hi = solve_contact(&profile, &cable, 20.0 * MM + delta, 1.0, STANDARD_GRAVITY).unwrap();
            prop_assert!((lo.contact_force - hi.contact_force).abs() <= 1e-12 * lo.contact_force.abs());
        }

        #[test]
        fn advantage_theorem_holds(d in 4.1e-3..35.9e-3, mu in 0.01..0.99_f64) {
            let profile = profile_10mm();
            let cable = CableSection::new(2.0 * MM, 0.05).unwrap();
            let sol = solve_contact(&profile, &cable, d, 1.0, STANDARD_GRAVITY).unwrap();
            if sol.contact_angle.sin() > mu {
                let np = parallel_gripper_min_force(0.05, mu, STANDARD_GRAVITY).unwrap();
                prop_assert!(sol.contact_force < np);
            }
        }

        #[test]
        fn mode_partition_is_total(d in 0.0..0.2_f64, dc in 1e-4..0.05_f64) {
            let mode = select_mode(d, dc);
            prop_assert_eq!(mode == GraspMode::Slack, d > dc);
        }
    }
}
