//! Vector algebra, vehicle/obstacle parameters and the filtered-position transform.
//!
//! The filtered position `xi = p + v / l` turns the second-order velocity-tracking
//! model into a single integrator: with `v' = -l (v - v_c)` one gets `xi' = v_c`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::dynamics::{ObstacleState, UavState};
use crate::error::{require_non_negative, require_positive, Result};

/// Cartesian 3-vector. Serialized as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        // hypot-style scaling is unnecessary at meter scale
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Maximum absolute component difference.
    pub fn max_abs_diff(self, other: Vec3) -> f64 {
        let d = self - other;
        d.x.abs().max(d.y.abs()).max(d.z.abs())
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl std::iter::Sum for Vec3 {
    fn sum<I: Iterator<Item = Vec3>>(iter: I) -> Vec3 {
        iter.fold(Vec3::ZERO, Add::add)
    }
}

/// Physical radius, maneuver constant and command cap of the controlled UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Physical radius (m).
    pub r_m: f64,
    /// Maneuver constant (1/s): rate at which velocity tracks the command.
    pub l: f64,
    /// Velocity command cap (m/s).
    pub v_m: f64,
}

impl VehicleParams {
    pub fn new(r_m: f64, l: f64, v_m: f64) -> Result<Self> {
        let p = VehicleParams { r_m, l, v_m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("r_m", self.r_m)?;
        require_positive("l", self.l)?;
        require_positive("v_m", self.v_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleParams {
    /// Obstacle radius (m).
    pub r_o: f64,
    /// Bound on the obstacle's filtered-position speed (m/s).
    pub v_o: f64,
}

impl ObstacleParams {
    pub fn new(r_o: f64, v_o: f64) -> Result<Self> {
        let p = ObstacleParams { r_o, v_o };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("r_o", self.r_o)?;
        require_non_negative("v_o", self.v_o)
    }
}

/// `p + v / l`.
pub fn filtered_position(p: Vec3, v: Vec3, l: f64) -> Result<Vec3> {
    require_positive("l", l)?;
    Ok(p + v / l)
}

/// Relative position, velocity and filtered position of the UAV with respect to one obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriplet {
    pub position: Vec3,
    pub velocity: Vec3,
    pub filtered: Vec3,
}

impl ErrorTriplet {
    pub fn true_distance(&self) -> f64 {
        self.position.norm()
    }

    pub fn filtered_distance(&self) -> f64 {
        self.filtered.norm()
    }
}

pub fn position_error_triplet(
    uav: &UavState,
    obstacle: &ObstacleState,
    l: f64,
) -> Result<ErrorTriplet> {
    require_positive("l", l)?;
    let position = uav.p - obstacle.p;
    let velocity = uav.v - obstacle.v;
    Ok(ErrorTriplet {
        position,
        velocity,
        filtered: position + velocity / l,
    })
}

/// Deterministic quasi-uniform directions on the unit sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> impl Iterator<Item = Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let nf = n as f64;
    (0..n).map(move |i| {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / nf;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn close(a: Vec3, b: Vec3) -> bool {
        a.max_abs_diff(b) <= TOL
    }

    #[test]
    fn zero_vector_norm_is_exactly_zero() {
        assert_eq!(Vec3::ZERO.norm(), 0.0);
        assert!(Vec3::ZERO.normalized().is_none());
    }

    #[test]
    fn filtered_position_examples() {
        let hover = filtered_position(Vec3::new(0.0, 0.0, 100.0), Vec3::ZERO, 5.0).unwrap();
        assert!(close(hover, Vec3::new(0.0, 0.0, 100.0)));

        let moving = filtered_position(Vec3::ZERO, Vec3::new(5.0, 0.0, 0.0), 5.0).unwrap();
        assert!(close(moving, Vec3::new(1.0, 0.0, 0.0)));

        let obstacle = filtered_position(
            Vec3::new(40.0, 0.0, 100.0),
            Vec3::new(-5.0, 0.0, 0.0),
            5.0,
        )
        .unwrap();
        assert!(close(obstacle, Vec3::new(39.0, 0.0, 100.0)));
    }

    #[test]
    fn filtered_position_rejects_non_positive_l() {
        assert!(filtered_position(Vec3::ZERO, Vec3::X, 0.0).is_err());
        assert!(filtered_position(Vec3::ZERO, Vec3::X, -1.0).is_err());
    }

    #[test]
    fn triplet_of_identical_states_is_zero() {
        let s = UavState::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(-1.0, 0.5, 2.0));
        let o = ObstacleState::new(s.p, s.v);
        let t = position_error_triplet(&s, &o, 5.0).unwrap();
        assert_eq!(t.position, Vec3::ZERO);
        assert_eq!(t.velocity, Vec3::ZERO);
        assert_eq!(t.filtered, Vec3::ZERO);
    }

    #[test]
    fn triplet_head_on_initial_conditions() {
        let uav = UavState::new(Vec3::new(0.0, 0.0, 100.0), Vec3::ZERO);
        let obs = ObstacleState::new(Vec3::new(40.0, 0.0, 100.0), Vec3::new(-5.0, 0.0, 0.0));
        let t = position_error_triplet(&uav, &obs, 5.0).unwrap();
        assert!(close(t.position, Vec3::new(-40.0, 0.0, 0.0)));
        assert!(close(t.velocity, Vec3::new(5.0, 0.0, 0.0)));
        assert!(close(t.filtered, Vec3::new(-39.0, 0.0, 0.0)));
    }

    #[test]
    fn params_reject_non_positive_values() {
        assert!(VehicleParams::new(5.0, 5.0, 10.0).is_ok());
        assert!(VehicleParams::new(0.0, 5.0, 10.0).is_err());
        assert!(VehicleParams::new(5.0, -1.0, 10.0).is_err());
        assert!(ObstacleParams::new(10.0, 0.0).is_ok());
        assert!(ObstacleParams::new(10.0, -0.1).is_err());
    }

    #[test]
    fn vec3_serializes_as_array() {
        let v = Vec3::new(1.0, -2.5, 3.0);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[1.0,-2.5,3.0]");
        assert_eq!(serde_json::from_str::<Vec3>(&s).unwrap(), v);
    }

    #[test]
    fn fibonacci_points_are_unit_and_balanced() {
        let pts: Vec<Vec3> = fibonacci_sphere(2000).collect();
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        let centroid = pts.iter().copied().sum::<Vec3>() / pts.len() as f64;
        assert!(centroid.norm() < 1e-2);
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64)
            .prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn filtered_position_is_linear(p in vec3(), v in vec3(), a in -10.0..10.0f64, l in 0.1..20.0f64) {
            let lhs = filtered_position(p * a, v * a, l).unwrap();
            let rhs = filtered_position(p, v, l).unwrap() * a;
            prop_assert!(lhs.max_abs_diff(rhs) <= 1e-9);
        }

        #[test]
        fn triplet_consistency_identity(
            p in vec3(), v in vec3(), po in vec3(), vo in vec3(), l in 0.1..20.0f64
        ) {
            let t = position_error_triplet(&UavState::new(p, v), &ObstacleState::new(po, vo), l).unwrap();
            let residual = t.filtered - t.position - t.velocity / l;
            prop_assert!(residual.norm() <= 1e-12);
        }
    }
}
