use super::VelocityCommand;
use crate::geometry::Pose;

/// Below this turn rate the update is a straight line.
pub const STRAIGHT_EPS: f64 = 1e-9;

/// Exact constant-twist update of a differential-drive pose.
///
/// The arc is written in chord form, `v dt sinc(w dt / 2)` along the mean
/// heading, which avoids the `v / w` cancellation for small `w`.
pub fn step_kinematics(pose: Pose, cmd: VelocityCommand, dt: f64) -> Pose {
    let VelocityCommand { v, w } = cmd;
    if w.abs() < STRAIGHT_EPS {
        return Pose::new(
            pose.x + v * dt * pose.theta.cos(),
            pose.y + v * dt * pose.theta.sin(),
            pose.theta + w * dt,
        );
    }
    let half = 0.5 * w * dt;
    let chord = v * dt * half.sin() / half;
    let mid = pose.theta + half;
    Pose::new(
        pose.x + chord * mid.cos(),
        pose.y + chord * mid.sin(),
        pose.theta + w * dt,
    )
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn straight_line() {
        let p = step_kinematics(Pose::new(0.0, 0.0, 0.0), VelocityCommand::new(1.0, 0.0), 1.0);
        assert_abs_diff_eq!(p.x, 1.0);
        assert_abs_diff_eq!(p.y, 0.0);
        assert_abs_diff_eq!(p.theta, 0.0);
    }

    #[test]
    fn quarter_circle() {
        let p = step_kinematics(
            Pose::new(0.0, 0.0, 0.0),
            VelocityCommand::new(FRAC_PI_2, FRAC_PI_2),
            1.0,
        );
        // Radius v / w = 1 centred at (0, 1).
        assert_abs_diff_eq!(p.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.theta, FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn pure_rotation() {
        let p = step_kinematics(Pose::new(2.0, 3.0, 0.0), VelocityCommand::new(0.0, PI), 1.0);
        assert_eq!((p.x, p.y), (2.0, 3.0));
        assert_abs_diff_eq!(p.theta.abs(), PI, epsilon = 1e-12);
    }

    #[test]
    fn tiny_turn_rates_stay_continuous() {
        let start = Pose::new(0.0, 0.0, 0.3);
        let a = step_kinematics(start, VelocityCommand::new(0.5, 2e-9), 0.1);
        let b = step_kinematics(start, VelocityCommand::new(0.5, 0.5e-9), 0.1);
        assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-10);
        assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-10);
    }
}
