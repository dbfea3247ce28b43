use serde::{Deserialize, Serialize};

use crate::channel::{LinkParams, UncertaintyBudget};
use crate::controller::ControllerParams;
use crate::error::{Error, Result};
use crate::geometry::{ObstacleParams, Vec3, VehicleParams};
use crate::radius::RadiusReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub duration_s: f64,
    pub dt_s: f64,
    pub seed: u64,
    pub uav: UavConfig,
    pub controller: ControllerConfig,
    pub budget: UncertaintyBudget,
    pub obstacles: Vec<ObstacleConfig>,
    pub radii: RadiusChoice,
    /// Half-width of the shell on which the boundary conditions are monitored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monitor_band_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavConfig {
    pub r_m_m: f64,
    pub l_per_s: f64,
    pub v_m_mps: f64,
    pub p0_m: Vec3,
    #[serde(default)]
    pub v0_mps: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    pub goal_m: Vec3,
    pub margin_m: f64,
    #[serde(default = "default_goal_gain")]
    pub goal_gain_per_s: f64,
}

fn default_goal_gain() -> f64 {
    crate::controller::DEFAULT_GOAL_GAIN
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    pub r_o_m: f64,
    /// Bound on the obstacle's filtered speed used for radius design.
    pub v_o_mps: f64,
    pub p0_m: Vec3,
    #[serde(default)]
    pub v0_mps: Vec3,
    pub tau_d_s: f64,
    pub theta: f64,
    pub behavior: Behavior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Behavior {
    /// Filtered position moves at a fixed velocity.
    Constant { velocity_mps: Vec3 },
    /// Copies the UAV's filtered velocity and closes the gap at `eps_mps`.
    Chasing { eps_mps: f64 },
    /// Runs the UAV's avoidance law on mirrored feedback, heading to its own goal.
    Cooperative { goal_m: Vec3 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusChoice {
    Auto,
    Explicit { r_s_m: f64 },
}

/// Stated radii are given to two decimals; shortfalls up to half a unit in the last place are rounding.
pub const RADIUS_ROUNDING: f64 = 0.005;

/// Safety radius in force for a run, with the closed-form bound it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRadius {
    pub r_s: f64,
    pub r_o: f64,
    pub bound: RadiusReport,
    /// `bound - r_s`, positive when the radius in force is smaller than the bound.
    pub shortfall: f64,
    /// Shortfall beyond two-decimal rounding.
    pub below_bound: bool,
}

impl ScenarioConfig {
    pub fn vehicle(&self) -> VehicleParams {
        VehicleParams {
            r_m: self.uav.r_m_m,
            l: self.uav.l_per_s,
            v_m: self.uav.v_m_mps,
        }
    }

    /// Worst-case obstacle for radius design: shared radius, fastest speed bound.
    pub fn design_obstacle(&self) -> ObstacleParams {
        ObstacleParams {
            r_o: self.obstacles.first().map_or(0.0, |o| o.r_o_m),
            v_o: self.obstacles.iter().map(|o| o.v_o_mps).fold(0.0, f64::max),
        }
    }

    pub fn link(&self, i: usize) -> LinkParams {
        let o = &self.obstacles[i];
        LinkParams {
            tau_d: o.tau_d_s,
            theta: o.theta,
            t_s: self.budget.t_s,
            b_o: self.budget.b_o,
            v_bo: self.budget.v_bo,
        }
    }

    pub fn ticks_per_sample(&self) -> usize {
        (self.budget.t_s / self.dt_s).round().max(1.0) as usize
    }

    pub fn steps(&self) -> usize {
        (self.duration_s / self.dt_s).round() as usize
    }

    pub fn monitor_band(&self) -> f64 {
        self.monitor_band_m
            .unwrap_or(if self.uav.r_m_m >= 1.0 { 0.1 } else { 0.005 })
    }

    pub fn resolve_radius(&self) -> Result<ResolvedRadius> {
        let obstacle = self.design_obstacle();
        let bound = RadiusReport::compute(&self.vehicle(), &obstacle, &self.budget)?;
        let r_s = match self.radii {
            RadiusChoice::Auto => bound.r_s_designed,
            RadiusChoice::Explicit { r_s_m } => r_s_m,
        };
        let shortfall = bound.r_s_designed - r_s;
        Ok(ResolvedRadius {
            r_s,
            r_o: obstacle.r_o,
            bound,
            shortfall,
            below_bound: shortfall > RADIUS_ROUNDING,
        })
    }

    pub fn controller_params(&self, r_s: f64, v_m: f64, goal: Vec3) -> Result<ControllerParams> {
        ControllerParams::for_radius(
            r_s,
            self.design_obstacle().r_o,
            self.controller.margin_m,
            goal,
            v_m,
        )?
        .with_goal_gain(self.controller.goal_gain_per_s)
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("{name} must be finite and > 0 (got {v})"));
            }
        };
        positive("duration_s", self.duration_s);
        positive("dt_s", self.dt_s);
        positive("uav.r_m_m", self.uav.r_m_m);
        positive("uav.l_per_s", self.uav.l_per_s);
        positive("uav.v_m_mps", self.uav.v_m_mps);
        positive("controller.margin_m", self.controller.margin_m);
        if let Some(band) = self.monitor_band_m {
            positive("monitor_band_m", band);
        }
        if let RadiusChoice::Explicit { r_s_m } = self.radii {
            positive("radii.r_s_m", r_s_m);
        }

        if let Err(e) = self.budget.validate() {
            errs.push(format!("budget: {e}"));
        }
        if !(self.controller.goal_gain_per_s >= 0.0 && self.controller.goal_gain_per_s.is_finite()) {
            errs.push("controller.goal_gain_per_s must be finite and >= 0".into());
        }
        for (name, v) in [
            ("uav.p0_m", self.uav.p0_m),
            ("uav.v0_mps", self.uav.v0_mps),
            ("controller.goal_m", self.controller.goal_m),
        ] {
            if !v.is_finite() {
                errs.push(format!("{name} must be finite"));
            }
        }

        if self.dt_s > 0.0 && self.budget.t_s > 0.0 {
            if self.dt_s > self.budget.t_s * (1.0 + 1e-12) {
                errs.push(format!(
                    "dt_s ({}) must not exceed budget.t_s_s ({})",
                    self.dt_s, self.budget.t_s
                ));
            }
            let ratio = self.budget.t_s / self.dt_s;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
                errs.push("budget.t_s_s must be an integer multiple of dt_s".into());
            }
        }

        if self.obstacles.is_empty() {
            errs.push("obstacles must contain at least one entry".into());
        }
        let r_o0 = self.obstacles.first().map(|o| o.r_o_m);
        for (i, o) in self.obstacles.iter().enumerate() {
            let at = |field: &str| format!("obstacles[{i}].{field}");
            if !(o.r_o_m > 0.0 && o.r_o_m.is_finite()) {
                errs.push(format!("{} must be finite and > 0", at("r_o_m")));
            }
            if Some(o.r_o_m) != r_o0 {
                errs.push(format!("{} must equal obstacles[0].r_o_m", at("r_o_m")));
            }
            if !(o.v_o_mps >= 0.0 && o.v_o_mps.is_finite()) {
                errs.push(format!("{} must be finite and >= 0", at("v_o_mps")));
            }
            if !o.p0_m.is_finite() || !o.v0_mps.is_finite() {
                errs.push(format!("{} must be finite", at("p0_m/v0_mps")));
            }
            if !(o.tau_d_s >= 0.0 && o.tau_d_s <= self.budget.tau_dm) {
                errs.push(format!(
                    "{} ({}) must lie in [0, budget.tau_dm_s = {}]",
                    at("tau_d_s"),
                    o.tau_d_s,
                    self.budget.tau_dm
                ));
            }
            if !(o.theta >= 0.0 && o.theta <= self.budget.theta_m) {
                errs.push(format!(
                    "{} ({}) must lie in [0, budget.theta_m = {}]",
                    at("theta"),
                    o.theta,
                    self.budget.theta_m
                ));
            }
            match o.behavior {
                Behavior::Constant { velocity_mps } => {
                    if !velocity_mps.is_finite() || velocity_mps.norm() > o.v_o_mps * (1.0 + 1e-9) {
                        errs.push(format!("{} must be finite with norm <= v_o_mps", at("behavior.velocity_mps")));
                    }
                }
                Behavior::Chasing { eps_mps } => {
                    if !(eps_mps > 0.0 && eps_mps.is_finite()) {
                        errs.push(format!("{} must be finite and > 0", at("behavior.eps_mps")));
                    }
                }
                Behavior::Cooperative { goal_m } => {
                    if !goal_m.is_finite() {
                        errs.push(format!("{} must be finite", at("behavior.goal_m")));
                    }
                    if !(o.v_o_mps > 0.0) {
                        errs.push(format!("{} must be > 0 for a cooperative obstacle", at("v_o_mps")));
                    }
                }
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(vec![format!("parse error: {e}")]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }
}
