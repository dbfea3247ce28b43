//! Velocity-tracking plant for the UAV and obstacles, plus obstacle command laws.
//!
//! Both the UAV and every obstacle follow `p' = v`, `v' = -l (v - u)` where `u` is the
//! (saturated) velocity command. Integration is classical fixed-step RK4.

use serde::{Deserialize, Serialize};

use crate::controller::VelocityLaw;
use crate::error::{require_positive, Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UavState {
    pub p: Vec3,
    pub v: Vec3,
}

impl UavState {
    pub fn new(p: Vec3, v: Vec3) -> Self {
        UavState { p, v }
    }

    /// Filtered position `p + v / l`; `l` is assumed already validated.
    pub fn filtered(&self, l: f64) -> Vec3 {
        self.p + self.v / l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ObstacleState {
    pub p: Vec3,
    pub v: Vec3,
}

impl ObstacleState {
    pub fn new(p: Vec3, v: Vec3) -> Self {
        ObstacleState { p, v }
    }

    pub fn filtered(&self, l: f64) -> Vec3 {
        self.p + self.v / l
    }
}

/// Clamp a velocity command to norm `v_m`, preserving direction.
pub fn saturate_command(v_c: Vec3, v_m: f64) -> Vec3 {
    let n = v_c.norm();
    if n <= v_m {
        v_c
    } else {
        v_c * (v_m / n)
    }
}

fn rk4_tracking(p: Vec3, v: Vec3, u: Vec3, l: f64, dt: f64) -> (Vec3, Vec3) {
    let accel = |v: Vec3| (v - u) * -l;

    let k1p = v;
    let k1v = accel(v);
    let v2 = v + k1v * (dt / 2.0);
    let k2p = v2;
    let k2v = accel(v2);
    let v3 = v + k2v * (dt / 2.0);
    let k3p = v3;
    let k3v = accel(v3);
    let v4 = v + k3v * dt;
    let k4p = v4;
    let k4v = accel(v4);

    let p_next = p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (dt / 6.0);
    let v_next = v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
    (p_next, v_next)
}

/// One RK4 step of the UAV model under a held command. The caller saturates `v_c`.
pub fn step_uav(s: UavState, v_c: Vec3, l: f64, dt: f64) -> Result<UavState> {
    require_positive("l", l)?;
    require_positive("dt", dt)?;
    let (p, v) = rk4_tracking(s.p, s.v, v_c, l, dt);
    Ok(UavState { p, v })
}

/// One RK4 step of the obstacle model driven by `a_o`, the obstacle's filtered-position velocity.
pub fn step_obstacle(s: ObstacleState, a_o: Vec3, l: f64, dt: f64) -> Result<ObstacleState> {
    require_positive("l", l)?;
    require_positive("dt", dt)?;
    let (p, v) = rk4_tracking(s.p, s.v, a_o, l, dt);
    Ok(ObstacleState { p, v })
}

/// Pursuit law for an adversarial obstacle: copy the UAV's filtered velocity and
/// close the filtered-position gap at `eps` m/s.
pub fn chasing_command(xi: Vec3, xi_o: Vec3, xi_dot: Vec3, eps: f64) -> Result<Vec3> {
    require_positive("eps", eps)?;
    let gap = xi_o - xi;
    let dir = gap
        .normalized()
        .ok_or(Error::DegenerateGeometry("chasing obstacle coincides with the UAV"))?;
    Ok(xi_dot - dir * eps)
}

/// Command of a cooperative obstacle that runs `law` on the mirrored feedback `-e_o`.
///
/// `own` is the obstacle's own filtered position, used only by goal-seeking terms.
pub fn cooperative_command<L: VelocityLaw + ?Sized>(
    t: f64,
    own: Vec3,
    e_o: Vec3,
    law: &L,
) -> Result<Vec3> {
    law.command(t, own, &[-e_o])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::{AvoidanceController, ControllerParams};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn saturation_examples() {
        assert_eq!(saturate_command(Vec3::ZERO, 10.0), Vec3::ZERO);
        assert_eq!(saturate_command(Vec3::new(3.0, 4.0, 0.0), 10.0), Vec3::new(3.0, 4.0, 0.0));
        let s = saturate_command(Vec3::new(30.0, 40.0, 0.0), 10.0);
        assert!(s.max_abs_diff(Vec3::new(6.0, 8.0, 0.0)) < 1e-12);
    }

    #[test]
    fn equilibrium_moves_at_constant_velocity() {
        let v = Vec3::new(2.0, -1.0, 0.5);
        let s = step_uav(UavState::new(Vec3::ZERO, v), v, 5.0, 0.1).unwrap();
        assert_eq!(s.v, v);
        assert!(s.p.max_abs_diff(v * 0.1) < 1e-12);
    }

    #[test]
    fn single_step_matches_exponential_solution() {
        // v(t) = (1 - e^{-t}) v_c for l = 1
        let s = step_uav(UavState::default(), Vec3::X, 1.0, 0.1).unwrap();
        let exact = 1.0 - (-0.1f64).exp();
        assert!((exact - 0.0951625).abs() < 1e-7);
        assert!((s.v.x - exact).abs() < 1e-7);
    }

    #[test]
    fn fast_maneuver_constant_converges() {
        let v_c = Vec3::new(3.0, -4.0, 1.0);
        let mut s = UavState::default();
        for _ in 0..100 {
            s = step_uav(s, v_c, 100.0, 0.01).unwrap();
        }
        assert!((s.v - v_c).norm() < 1e-3);
    }

    #[test]
    fn rejects_non_positive_step() {
        assert!(step_uav(UavState::default(), Vec3::X, 1.0, 0.0).is_err());
        assert!(step_obstacle(ObstacleState::default(), Vec3::X, 1.0, -0.1).is_err());
    }

    #[test]
    fn constant_velocity_obstacle_moves_in_a_straight_line() {
        let v0 = Vec3::new(-5.0, 0.0, 0.0);
        let p0 = Vec3::new(40.0, 0.0, 100.0);
        let mut s = ObstacleState::new(p0, v0);
        let dt = 0.01;
        for n in 1..=2000 {
            s = step_obstacle(s, v0, 5.0, dt).unwrap();
            let expected = p0 + v0 * (n as f64 * dt);
            assert!(s.p.max_abs_diff(expected) < 1e-9, "step {n}");
        }
    }

    #[test]
    fn stationary_obstacle_stays_put() {
        let s = step_obstacle(ObstacleState::new(Vec3::X, Vec3::ZERO), Vec3::ZERO, 5.0, 0.01).unwrap();
        assert_eq!(s.p, Vec3::X);
        assert_eq!(s.v, Vec3::ZERO);
    }

    #[test]
    fn obstacle_velocity_decays_exponentially() {
        let mut s = ObstacleState::new(Vec3::ZERO, Vec3::X);
        let dt = 0.01;
        for _ in 0..100 {
            s = step_obstacle(s, Vec3::ZERO, 1.0, dt).unwrap();
        }
        assert!((s.v.x - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rk4_error_shrinks_at_fourth_order() {
        let exact = 1.0 - (-1.0f64).exp();
        let err = |dt: f64| {
            let n = (1.0 / dt).round() as usize;
            let mut s = UavState::default();
            for _ in 0..n {
                s = step_uav(s, Vec3::X, 1.0, dt).unwrap();
            }
            (s.v.x - exact).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio >= 12.0, "ratio {ratio}");
    }

    #[test]
    fn chasing_examples() {
        let c = chasing_command(Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0), Vec3::ZERO, 1.0).unwrap();
        assert!(c.max_abs_diff(Vec3::new(-1.0, 0.0, 0.0)) < 1e-12);
        assert!(matches!(
            chasing_command(Vec3::X, Vec3::X, Vec3::ZERO, 1.0),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn chasing_closes_gap_at_eps() {
        // With a stationary UAV the filtered gap closes at exactly eps.
        let eps = 1.5;
        let l = 5.0;
        let xi = Vec3::new(1.0, 2.0, 3.0);
        let start = Vec3::new(20.0, -7.0, 4.0);
        let mut obs = ObstacleState::new(start, Vec3::ZERO);
        let dt = 0.01;
        let mut t = 0.0;
        let d0 = (obs.filtered(l) - xi).norm();
        for _ in 0..500 {
            let a = chasing_command(xi, obs.filtered(l), Vec3::ZERO, eps).unwrap();
            obs = step_obstacle(obs, a, l, dt).unwrap();
            t += dt;
        }
        let d = (obs.filtered(l) - xi).norm();
        assert!((d0 - d - eps * t).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn chasing_speed_is_bounded(
            x in -50.0..50.0f64, y in -50.0..50.0f64,
            vx in -10.0..10.0f64, vy in -10.0..10.0f64, eps in 0.01..5.0f64
        ) {
            prop_assume!(x.abs() + y.abs() > 1e-6);
            let xi_dot = Vec3::new(vx, vy, 0.0);
            let c = chasing_command(Vec3::ZERO, Vec3::new(x, y, 0.0), xi_dot, eps).unwrap();
            prop_assert!(c.norm() <= xi_dot.norm() + eps + 1e-12);
        }
    }

    #[test]
    fn speed_stays_below_cap_under_saturated_commands() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v_m = 10.0;
        let l = 5.0;
        for _ in 0..1000 {
            let dir = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let v0 = saturate_command(dir * 20.0, v_m * rng.random_range(0.0..1.0));
            let mut s = UavState::new(Vec3::ZERO, v0);
            let mut max_speed = v0.norm();
            for _ in 0..20 {
                let raw = Vec3::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0));
                let u = saturate_command(raw, v_m);
                for _ in 0..10 {
                    s = step_uav(s, u, l, 0.01).unwrap();
                    max_speed = max_speed.max(s.v.norm());
                }
            }
            assert!(max_speed <= v_m * (1.0 + 1e-6), "{max_speed}");
        }
    }

    #[test]
    fn cooperative_command_mirrors_head_on() {
        let params = ControllerParams::new(20.0, 2.0, Vec3::ZERO, 5.0).unwrap();
        let law = AvoidanceController::new(params);
        // UAV at origin, obstacle at +x; both goals at their own positions
        let e_o = Vec3::new(-21.0, 0.0, 0.0);
        let uav_cmd = law.command(0.0, Vec3::ZERO, &[e_o]).unwrap();
        let mirrored = ControllerParams::new(20.0, 2.0, Vec3::new(21.0, 0.0, 0.0), 5.0).unwrap();
        let obs_cmd =
            cooperative_command(0.0, Vec3::new(21.0, 0.0, 0.0), e_o, &AvoidanceController::new(mirrored)).unwrap();
        assert!((uav_cmd + obs_cmd).norm() < 1e-12);
    }

    #[test]
    fn cooperative_boundary_inequality_on_sphere() {
        let (r_s, r_o, v_m) = (14.14, 10.0, 5.0);
        let params = ControllerParams::for_radius(r_s, r_o, 2.0, Vec3::new(100.0, 0.0, 0.0), v_m).unwrap();
        let law = AvoidanceController::new(params);
        let radius = r_s + r_o;
        for dir in crate::geometry::fibonacci_sphere(2000) {
            let e_o = dir * radius;
            let a_o = cooperative_command(0.0, Vec3::ZERO, e_o, &law).unwrap();
            assert!(e_o.dot(a_o) <= -radius * v_m + 1e-9);
        }
    }

    #[test]
    fn cooperative_command_is_constant_for_constant_mirror() {
        let params = ControllerParams::new(20.0, 2.0, Vec3::new(5.0, 5.0, 0.0), 3.0).unwrap();
        let law = AvoidanceController::new(params);
        let e_o = Vec3::new(3.0, 21.0, 0.5);
        let a = cooperative_command(0.0, Vec3::ZERO, e_o, &law).unwrap();
        let b = cooperative_command(7.5, Vec3::ZERO, e_o, &law).unwrap();
        assert_eq!(a, b);
    }
}
