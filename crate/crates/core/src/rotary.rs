//! Torque and rotational stiffness of an antagonistic pulley joint.
//!
//! Two cable paths wrap a pulley of radius `r_p` in opposite senses. A
//! rotation `θ` stretches side A to `x0 + r_p θ` and relaxes side B to
//! `x0 - r_p θ`, so the joint torque is `r_p [F_a(x0 + r_p θ) - F_b(x0 - r_p θ)]`.
//!
//! Two stiffness notions are exposed and kept apart:
//! * [`rotational_stiffness_linear`] and [`rotational_stiffness_quadratic`]
//!   are the single-path formulas (one spring plus cable acting on the pulley).
//! * [`AntagonisticJoint::tangent_stiffness`] differentiates the two-sided
//!   torque. With both sides taut it is twice the single-path value.

use crate::error::{ensure_finite, Error, Result};
use crate::springs::{solve_pretension_displacement, SpringElement, SpringNetwork};

/// Default central-difference step (rad).
pub const DEFAULT_STEP: f64 = 1e-6;

/// One-sided slopes differing by more than this (relative) mark a kink.
const KINK_TOLERANCE: f64 = 1e-4;
/// Step reductions attempted before a kink is accepted as sitting at `θ`.
const MAX_STEP_HALVINGS: usize = 10;

/// Rotational stiffness `(k_s + k_c) r_p²` of a single spring-and-cable path.
pub fn rotational_stiffness_linear(k_s: f64, k_c: f64, r_p: f64) -> Result<f64> {
    for (name, v) in [("k_s", k_s), ("k_c", k_c)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
        }
    }
    if !(r_p.is_finite() && r_p > 0.0) {
        return Err(Error::Domain(format!("r_p must be > 0, got {r_p}")));
    }
    Ok((k_s + k_c) * r_p * r_p)
}

/// Rotational stiffness of a single pretensioned quadratic path,
/// `(k_l + 2 k_q x0) r_p² + 2 k_q r_p³ θ`. Assumes the path stays taut.
pub fn rotational_stiffness_quadratic(k_l: f64, k_q: f64, x0: f64, r_p: f64, theta: f64) -> f64 {
    (k_l + 2.0 * k_q * x0) * r_p * r_p + 2.0 * k_q * r_p * r_p * r_p * theta
}

/// Result of numerically differentiating a joint torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentStiffness {
    /// dT/dθ (N·m/rad).
    pub value: f64,
    /// Set when `θ` sits on a slack/engagement kink; `value` is then the
    /// forward (increasing θ) one-sided derivative.
    pub slack_transition: bool,
}

/// A pulley driven by two opposing tension networks with a common pretension
/// stretch.
#[derive(Debug, Clone, PartialEq)]
pub struct AntagonisticJoint {
    /// Pulley radius (m).
    pub r_p: f64,
    pub side_a: SpringNetwork,
    pub side_b: SpringNetwork,
    /// Initial stretch applied to both sides (m).
    pub x0: f64,
}

impl AntagonisticJoint {
    pub fn new(r_p: f64, side_a: SpringNetwork, side_b: SpringNetwork, x0: f64) -> Result<Self> {
        if !(r_p.is_finite() && r_p > 0.0) {
            return Err(Error::Domain(format!("r_p must be > 0, got {r_p}")));
        }
        if !(x0.is_finite() && x0 >= 0.0) {
            return Err(Error::Domain(format!("x0 must be >= 0, got {x0}")));
        }
        side_a.validate()?;
        side_b.validate()?;
        Ok(AntagonisticJoint {
            r_p,
            side_a,
            side_b,
            x0,
        })
    }

    /// Joint with the same network on both sides.
    pub fn symmetric(r_p: f64, side: SpringNetwork, x0: f64) -> Result<Self> {
        Self::new(r_p, side.clone(), side, x0)
    }

    /// Symmetric joint of single linear/quadratic elements, pretensioned by a
    /// force rather than a stretch.
    pub fn with_pretension_force(r_p: f64, element: SpringElement, f0: f64) -> Result<Self> {
        let x0 = solve_pretension_displacement(&element, f0)?;
        Self::symmetric(r_p, SpringNetwork::leaf(element)?, x0)
    }

    /// Extensions of side A and side B at rotation `theta`.
    pub fn side_extensions(&self, theta: f64) -> (f64, f64) {
        let dx = self.r_p * theta;
        (self.x0 + dx, self.x0 - dx)
    }

    /// Net torque at rotation `theta` (N·m), positive opposing positive rotation.
    pub fn torque(&self, theta: f64) -> Result<f64> {
        ensure_finite("theta", theta)?;
        let (xa, xb) = self.side_extensions(theta);
        Ok(self.r_p * (self.side_a.force_at(xa)? - self.side_b.force_at(xb)?))
    }

    /// Torque of side A alone, `r_p F_a(x0 + r_p θ)`.
    pub fn single_side_torque(&self, theta: f64) -> Result<f64> {
        ensure_finite("theta", theta)?;
        Ok(self.r_p * self.side_a.force_at(self.x0 + self.r_p * theta)?)
    }

    /// Elastic energy stored beyond the pretensioned state (J).
    pub fn energy(&self, theta: f64) -> Result<f64> {
        ensure_finite("theta", theta)?;
        let (xa, xb) = self.side_extensions(theta);
        let stored = self.side_a.energy_at(xa)? + self.side_b.energy_at(xb)?;
        let baseline = self.side_a.energy_at(self.x0)? + self.side_b.energy_at(self.x0)?;
        Ok(stored - baseline)
    }

    /// dT/dθ with the default step.
    pub fn tangent_stiffness(&self, theta: f64) -> Result<TangentStiffness> {
        self.tangent_stiffness_with_step(theta, DEFAULT_STEP)
    }

    /// dT/dθ by central differences. When the one-sided slopes disagree the
    /// step is halved; a kink that survives every halving is reported with
    /// the forward slope and `slack_transition` set.
    pub fn tangent_stiffness_with_step(&self, theta: f64, step: f64) -> Result<TangentStiffness> {
        ensure_finite("theta", theta)?;
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::Domain(format!("step must be > 0, got {step}")));
        }
        let t0 = self.torque(theta)?;
        let mut h = step;
        for _ in 0..=MAX_STEP_HALVINGS {
            let tp = self.torque(theta + h)?;
            let tm = self.torque(theta - h)?;
            let forward = (tp - t0) / h;
            let backward = (t0 - tm) / h;
            let scale = forward.abs().max(backward.abs());
            if (forward - backward).abs() <= KINK_TOLERANCE * scale + f64::EPSILON {
                return Ok(TangentStiffness {
                    value: (tp - tm) / (2.0 * h),
                    slack_transition: false,
                });
            }
            if h * 0.5 < step / (1u64 << MAX_STEP_HALVINGS) as f64 {
                return Ok(TangentStiffness {
                    value: forward,
                    slack_transition: true,
                });
            }
            h *= 0.5;
        }
        unreachable!("loop returns on the final halving")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn linear_side(k_s: f64, k_c: f64) -> SpringNetwork {
        SpringNetwork::parallel(vec![
            SpringNetwork::leaf(SpringElement::linear(k_s).unwrap()).unwrap(),
            SpringNetwork::leaf(SpringElement::linear(k_c).unwrap()).unwrap(),
        ])
        .unwrap()
    }

    fn quad_joint(x0: f64) -> AntagonisticJoint {
        let side = SpringNetwork::leaf(SpringElement::quadratic(450.0, 20000.0).unwrap()).unwrap();
        AntagonisticJoint::symmetric(0.05, side, x0).unwrap()
    }

    #[test]
    fn pretension_cancels_at_rest() {
        let side = SpringNetwork::leaf(SpringElement::linear(500.0).unwrap()).unwrap();
        let j = AntagonisticJoint::symmetric(0.05, side, 0.02).unwrap();
        assert_eq!(j.torque(0.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_torque_example() {
        let j = AntagonisticJoint::symmetric(0.05, linear_side(500.0, 100.0), 0.05).unwrap();
        // Oracle: explicit two-sided force difference.
        let fa = 600.0 * (0.05 + 0.05 * 0.1);
        let fb = 600.0 * (0.05 - 0.05 * 0.1);
        let oracle = (fa - fb) * 0.05;
        assert!(rel(j.torque(0.1).unwrap(), oracle) < 1e-12);
        assert!(rel(oracle, 0.30) < 1e-12);
    }

    #[test]
    fn quadratic_torque_example() {
        let x0 = 0.0137813;
        let j = quad_joint(x0);
        let e = SpringElement::quadratic(450.0, 20000.0).unwrap();
        let oracle = 0.05 * (e.force(x0 + 0.0025).unwrap() - e.force(x0 - 0.0025).unwrap());
        assert!(rel(j.torque(0.05).unwrap(), oracle) < 1e-12);
    }

    #[test]
    fn linear_stiffness_examples() {
        assert!(rel(rotational_stiffness_linear(500.0, 100.0, 0.05).unwrap(), 1.5) < 1e-12);
        assert_eq!(rotational_stiffness_linear(0.0, 0.0, 1.0).unwrap(), 0.0);
        assert!(rel(rotational_stiffness_linear(388.4, 0.0, 0.06).unwrap(), 1.39824) < 1e-12);
        assert!(rotational_stiffness_linear(-1.0, 0.0, 0.05).is_err());
        assert!(rotational_stiffness_linear(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn linear_stiffness_matches_single_side_derivative() {
        let j = AntagonisticJoint::symmetric(0.05, linear_side(500.0, 100.0), 0.02).unwrap();
        let h = 1e-6;
        let d = (j.single_side_torque(0.1 + h).unwrap() - j.single_side_torque(0.1 - h).unwrap())
            / (2.0 * h);
        assert!(rel(d, rotational_stiffness_linear(500.0, 100.0, 0.05).unwrap()) < 1e-8);
    }

    #[test]
    fn quadratic_stiffness_examples() {
        assert!(rel(rotational_stiffness_quadratic(450.0, 20000.0, 0.0, 0.05, 0.0), 1.125) < 1e-12);
        let k = rotational_stiffness_quadratic(450.0, 20000.0, 0.0137813, 0.05, 0.0);
        assert!((k - 2.503).abs() < 1e-3);
        for (x0, th) in [(0.0, 0.3), (0.05, -0.7), (0.2, 1.0)] {
            assert!(rel(rotational_stiffness_quadratic(450.0, 0.0, x0, 0.05, th), 450.0 * 0.0025) < 1e-12);
        }
    }

    #[test]
    fn quadratic_tangent_is_twice_single_path() {
        let j = quad_joint(0.0137813);
        let t = j.tangent_stiffness(0.0).unwrap();
        assert!(!t.slack_transition);
        let twice = 2.0 * rotational_stiffness_quadratic(450.0, 20000.0, 0.0137813, 0.05, 0.0);
        assert!(rel(t.value, twice) < 1e-6);
        assert!((t.value - 5.005).abs() < 2e-3);
    }

    #[test]
    fn linear_tangent_ignores_pretension_force() {
        let e = SpringElement::linear(500.0).unwrap();
        let values: Vec<f64> = [0.0, 10.0, 20.0]
            .iter()
            .map(|&f0| {
                let j = AntagonisticJoint::with_pretension_force(0.05, e.clone(), f0).unwrap();
                j.tangent_stiffness(0.0).unwrap().value
            })
            .collect();
        // With F0 = 0 only one side is ever taut, which halves the stiffness.
        assert!(rel(values[0], 500.0 * 0.0025) < 1e-9);
        assert!(rel(values[1], values[2]) < 1e-9);
        assert!(rel(values[1], 2.0 * 500.0 * 0.0025) < 1e-9);
    }

    #[test]
    fn slack_side_contributes_nothing() {
        let side = SpringNetwork::leaf(SpringElement::linear(500.0).unwrap()).unwrap();
        let j = AntagonisticJoint::symmetric(0.05, side, 0.0).unwrap();
        let t = j.tangent_stiffness(0.2).unwrap();
        assert!(!t.slack_transition);
        assert!(rel(t.value, 500.0 * 0.0025) < 1e-9);
    }

    fn staged_joint() -> AntagonisticJoint {
        let side = SpringNetwork::parallel_slack(388.4, &[0.0, 0.012, 0.036]).unwrap();
        AntagonisticJoint::symmetric(0.06, side, 0.02).unwrap()
    }

    #[test]
    fn kink_is_flagged() {
        // Side A reaches the third spring's engagement point.
        let theta = 0.016 / 0.06;
        let t = staged_joint().tangent_stiffness(theta).unwrap();
        assert!(t.slack_transition);
        // Forward slope: side A with three springs, side B with one.
        assert!(rel(t.value, (1165.2 + 388.4) * 0.0036) < 1e-6);
    }

    #[test]
    fn nearby_kink_resolved_by_smaller_step() {
        // The kink lies inside (θ - h, θ + h) for the default step only.
        let theta = 0.016 / 0.06 + 3e-7;
        let t = staged_joint().tangent_stiffness(theta).unwrap();
        assert!(!t.slack_transition);
        assert!(rel(t.value, (1165.2 + 388.4) * 0.0036) < 1e-6);
    }

    #[test]
    fn torque_is_odd_for_identical_sides() {
        let side = SpringNetwork::parallel_slack(388.4, &[0.0, 0.012, 0.036]).unwrap();
        let j = AntagonisticJoint::symmetric(0.06, side, 0.02).unwrap();
        for i in 0..200 {
            let th = -1.0 + i as f64 * 0.01;
            assert_eq!(j.torque(-th).unwrap(), -j.torque(th).unwrap());
        }
    }

    #[test]
    fn quadratic_stiffness_rises_with_pretension() {
        let h = 1e-4;
        let x0 = 0.02;
        let slope = (quad_joint(x0 + h).tangent_stiffness(0.0).unwrap().value
            - quad_joint(x0 - h).tangent_stiffness(0.0).unwrap().value)
            / (2.0 * h);
        assert!(rel(slope, 4.0 * 20000.0 * 0.0025) < 1e-6);
    }

    #[test]
    fn single_path_quadratic_stiffness_grows_with_angle() {
        let ks: Vec<f64> = (0..11)
            .map(|i| rotational_stiffness_quadratic(450.0, 20000.0, 0.01, 0.05, i as f64 * 0.1))
            .collect();
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn joint_energy_gradient_is_torque() {
        let side = SpringNetwork::parallel_slack(388.4, &[0.0, 0.012, 0.036]).unwrap();
        let j = AntagonisticJoint::symmetric(0.06, side, 0.02).unwrap();
        let h = 1e-6;
        for th in [-0.4, -0.1, 0.05, 0.3] {
            let d = (j.energy(th + h).unwrap() - j.energy(th - h).unwrap()) / (2.0 * h);
            assert!(rel(d, j.torque(th).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn invalid_joint_rejected() {
        let side = SpringNetwork::leaf(SpringElement::linear(1.0).unwrap()).unwrap();
        assert!(AntagonisticJoint::symmetric(0.0, side.clone(), 0.0).is_err());
        assert!(AntagonisticJoint::symmetric(0.05, side, -0.1).is_err());
    }
}
