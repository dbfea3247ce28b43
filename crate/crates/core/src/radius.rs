//! Closed-form safety radii and the boundary conditions they rest on.

use serde::{Deserialize, Serialize};

use crate::channel::UncertaintyBudget;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::geometry::{ObstacleParams, Vec3, VehicleParams};

/// Gap between filtered and true separation caused by velocity: `(v_m + v_o) / l`.
pub fn maneuver_radius(v_m: f64, v_o: f64, l: f64) -> Result<f64> {
    require_positive("l", l)?;
    require_non_negative("v_m", v_m)?;
    require_non_negative("v_o", v_o)?;
    Ok((v_m + v_o) / l)
}

/// Inflation absorbing noise, delay and packet loss.
pub fn uncertainty_radius(budget: &UncertaintyBudget, v_o: f64) -> Result<f64> {
    if budget.theta_m >= 1.0 {
        return Err(Error::Parameter {
            name: "theta_m",
            value: budget.theta_m,
            reason: "must be below 1",
        });
    }
    budget.validate()?;
    require_non_negative("v_o", v_o)?;
    Ok(budget.lag_bound(v_o) + budget.b + budget.b_o)
}

/// Smallest safety radius certified for the offline controller design.
pub fn designed_safety_radius(r_m: f64, r_o: f64, r_v: f64, r_e: f64) -> f64 {
    ((r_m + r_o).powi(2) + r_v * r_v).sqrt() + r_e - r_o
}

/// Smallest radius to enforce on the estimated filtered distance in flight.
/// Same bound as [`designed_safety_radius`].
pub fn practical_safety_radius(r_m: f64, r_o: f64, r_v: f64, r_e: f64) -> f64 {
    designed_safety_radius(r_m, r_o, r_v, r_e)
}

/// Whether the UAV out-runs the obstacle together with both noise rates.
pub fn check_speed_condition(v_m: f64, v_o: f64, v_b: f64, v_bo: f64) -> bool {
    v_m >= v_o + v_b + v_bo
}

/// Filtered separation that keeps the true separation at or above `r`.
pub fn proposition2_threshold(r: f64, r_v: f64) -> f64 {
    (r * r + r_v * r_v).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub r_v: f64,
    pub r_e: f64,
    pub r_s_designed: f64,
    pub r_s_practical: f64,
    /// The estimated safety radius coincides with the practical one.
    pub r_s_estimated: f64,
    pub speed_condition_ok: bool,
}

impl RadiusReport {
    pub fn compute(
        vehicle: &VehicleParams,
        obstacle: &ObstacleParams,
        budget: &UncertaintyBudget,
    ) -> Result<Self> {
        vehicle.validate()?;
        obstacle.validate()?;
        let r_v = maneuver_radius(vehicle.v_m, obstacle.v_o, vehicle.l)?;
        let r_e = uncertainty_radius(budget, obstacle.v_o)?;
        let r_s = designed_safety_radius(vehicle.r_m, obstacle.r_o, r_v, r_e);
        Ok(RadiusReport {
            r_v,
            r_e,
            r_s_designed: r_s,
            r_s_practical: practical_safety_radius(vehicle.r_m, obstacle.r_o, r_v, r_e),
            r_s_estimated: r_s,
            speed_condition_ok: check_speed_condition(
                vehicle.v_m,
                obstacle.v_o,
                budget.v_b,
                budget.v_bo,
            ),
        })
    }
}

/// Verdict of the boundary condition on the separation sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MonitorVerdict {
    NotApplicable,
    Satisfied { margin: f64 },
    Violated { margin: f64 },
}

impl MonitorVerdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, MonitorVerdict::Violated { .. })
    }

    pub fn is_applicable(&self) -> bool {
        !matches!(self, MonitorVerdict::NotApplicable)
    }
}

pub const MONITOR_SLACK: f64 = 1e-6;

/// Checks `e_o . xi_dot - e_o . xi_hat_o_dot >= (r_s + r_o) v_b` when `|e_o|` lies within
/// `band` of `r_s + r_o`.
pub fn separation_condition_monitor(
    e_o: Vec3,
    xi_dot: Vec3,
    xi_hat_o_dot: Vec3,
    r_s: f64,
    r_o: f64,
    v_b: f64,
    band: f64,
) -> MonitorVerdict {
    let radius = r_s + r_o;
    if (e_o.norm() - radius).abs() > band {
        return MonitorVerdict::NotApplicable;
    }
    let margin = e_o.dot(xi_dot) - e_o.dot(xi_hat_o_dot) - radius * v_b;
    if margin >= -MONITOR_SLACK {
        MonitorVerdict::Satisfied { margin }
    } else {
        MonitorVerdict::Violated { margin }
    }
}

/// Obstacle-side condition `(r_s + r_o)(v_m - v_b) >= e_o . xi_hat_o_dot`.
pub fn check_theorem1_cooperative(
    e_o: Vec3,
    xi_hat_o_dot: Vec3,
    r_s: f64,
    r_o: f64,
    v_m: f64,
    v_b: f64,
) -> bool {
    (r_s + r_o) * (v_m - v_b) >= e_o.dot(xi_hat_o_dot)
}
