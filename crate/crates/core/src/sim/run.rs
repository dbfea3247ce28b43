use serde::{Deserialize, Serialize};

use super::config::{Behavior, ResolvedRadius, ScenarioConfig};
use crate::channel::{BoundedNoise, ChannelState};
use crate::controller::{AvoidanceController, VelocityLaw};
use crate::dynamics::{chasing_command, saturate_command, step_obstacle, step_uav, ObstacleState, UavState};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::radius::{separation_condition_monitor, MonitorVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UavSample {
    pub p: Vec3,
    pub v: Vec3,
    pub xi: Vec3,
    pub xi_hat: Vec3,
    /// Command held over `[t, t + dt)`.
    pub v_c: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObstacleSample {
    pub p: Vec3,
    pub v: Vec3,
    pub xi: Vec3,
    pub xi_bar: Vec3,
    pub xi_hat: Vec3,
    pub lambda: Vec3,
    pub dist_true: f64,
    pub dist_filtered: f64,
    pub dist_est: f64,
    pub viol_est: bool,
    pub collision: bool,
    pub thm1_applicable: bool,
    pub thm1_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: f64,
    pub uav: UavSample,
    pub obstacles: Vec<ObstacleSample>,
}

impl TraceRecord {
    pub fn e_o(&self, i: usize) -> Vec3 {
        self.uav.xi_hat - self.obstacles[i].xi_hat
    }

    pub fn min_true(&self) -> f64 {
        self.obstacles.iter().map(|o| o.dist_true).fold(f64::INFINITY, f64::min)
    }

    pub fn min_filtered(&self) -> f64 {
        self.obstacles.iter().map(|o| o.dist_filtered).fold(f64::INFINITY, f64::min)
    }

    pub fn min_est(&self) -> f64 {
        self.obstacles.iter().map(|o| o.dist_est).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleVerdict {
    pub min_true_distance: f64,
    pub min_filtered_distance: f64,
    pub min_estimated_distance: f64,
    pub first_violation_time: Option<f64>,
    pub collision: bool,
    pub monitor_samples: usize,
    pub monitor_violations: usize,
    pub first_monitor_violation_time: Option<f64>,
    pub max_lambda: f64,
    pub lambda_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunVerdict {
    pub radius: ResolvedRadius,
    /// `r_s + r_o`, the floor on the estimated distance.
    pub separation: f64,
    /// `r_m + r_o`, the floor on the true distance.
    pub contact: f64,
    pub min_true_distance: f64,
    pub min_filtered_distance: f64,
    pub min_estimated_distance: f64,
    pub first_violation_time: Option<f64>,
    pub collision: bool,
    pub max_uav_speed: f64,
    pub obstacles: Vec<ObstacleVerdict>,
}

impl RunVerdict {
    /// True when the estimated distance fell below `r_s + r_o` or the bodies touched.
    pub fn violated(&self) -> bool {
        self.first_violation_time.is_some() || self.collision
    }

    pub fn monitor_violations(&self) -> usize {
        self.obstacles.iter().map(|o| o.monitor_violations).sum()
    }

    pub fn monitor_samples(&self) -> usize {
        self.obstacles.iter().map(|o| o.monitor_samples).sum()
    }
}

enum ObstacleLaw {
    Constant(Vec3),
    Chasing(f64),
    Cooperative(AvoidanceController),
}

struct Engine<'a> {
    cfg: &'a ScenarioConfig,
    l: f64,
    law: AvoidanceController,
    obstacle_laws: Vec<ObstacleLaw>,
    uav_noise: BoundedNoise,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a ScenarioConfig, radius: &ResolvedRadius) -> Result<Self> {
        let law = AvoidanceController::new(cfg.controller_params(
            radius.r_s,
            cfg.uav.v_m_mps,
            cfg.controller.goal_m,
        )?);
        let obstacle_laws = cfg
            .obstacles
            .iter()
            .map(|o| {
                Ok(match o.behavior {
                    Behavior::Constant { velocity_mps } => ObstacleLaw::Constant(velocity_mps),
                    Behavior::Chasing { eps_mps } => ObstacleLaw::Chasing(eps_mps),
                    Behavior::Cooperative { goal_m } => ObstacleLaw::Cooperative(
                        AvoidanceController::new(cfg.controller_params(radius.r_s, o.v_o_mps, goal_m)?),
                    ),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Engine {
            cfg,
            l: cfg.uav.l_per_s,
            law,
            obstacle_laws,
            uav_noise: BoundedNoise::new(cfg.seed, 0, cfg.budget.b, cfg.budget.v_b)?,
        })
    }

    fn obstacle_command(
        &self,
        i: usize,
        t: f64,
        xi: Vec3,
        xi_o: Vec3,
        v_c: Vec3,
        e_o: Vec3,
    ) -> Result<Vec3> {
        match &self.obstacle_laws[i] {
            ObstacleLaw::Constant(v) => Ok(*v),
            ObstacleLaw::Chasing(eps) => match chasing_command(xi, xi_o, v_c, *eps) {
                Err(Error::DegenerateGeometry(_)) => Ok(v_c),
                other => other,
            },
            ObstacleLaw::Cooperative(law) => {
                let own = xi_o;
                let c = law.command(t, own, &[-e_o])?;
                Ok(saturate_command(c, law.max_speed()))
            }
        }
    }

    fn run(&self, radius: &ResolvedRadius) -> Result<Vec<TraceRecord>> {
        let cfg = self.cfg;
        let dt = cfg.dt_s;
        let l = self.l;
        let steps = cfg.steps();
        let per_tick = cfg.ticks_per_sample();

        let mut uav = UavState::new(cfg.uav.p0_m, cfg.uav.v0_mps);
        let mut obstacles: Vec<ObstacleState> = cfg
            .obstacles
            .iter()
            .map(|o| ObstacleState::new(o.p0_m, o.v0_mps))
            .collect();
        let mut links = obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| ChannelState::new(cfg.link(i), 0.0, o.filtered(l), cfg.seed, i as u64 + 1))
            .collect::<Result<Vec<_>>>()?;

        let n_obs = obstacles.len();
        let mut v_c = Vec3::ZERO;
        let mut a_o = vec![Vec3::ZERO; n_obs];
        let mut trace = Vec::with_capacity(steps + 1);
        let separation = radius.r_s + radius.r_o;
        let contact = cfg.uav.r_m_m + radius.r_o;

        for n in 0..=steps {
            let t = n as f64 * dt;
            let xi = uav.filtered(l);
            let xi_hat = xi + self.uav_noise.value(t);
            let estimates: Vec<(Vec3, Vec3)> = links.iter().map(|c| c.estimate_link()).collect();
            let offsets: Vec<Vec3> = estimates.iter().map(|(est, _)| xi_hat - *est).collect();

            if n % per_tick == 0 {
                v_c = saturate_command(self.law.command(t, xi_hat, &offsets)?, cfg.uav.v_m_mps);
                for i in 0..n_obs {
                    let xi_o = obstacles[i].filtered(l);
                    a_o[i] = self.obstacle_command(i, t, xi, xi_o, v_c, offsets[i])?;
                }
            }

            let obs_samples = (0..n_obs)
                .map(|i| {
                    let o = obstacles[i];
                    let xi_o = o.filtered(l);
                    let (xi_hat_o, lambda) = estimates[i];
                    let dist_est = offsets[i].norm();
                    let dist_true = (uav.p - o.p).norm();
                    ObstacleSample {
                        p: o.p,
                        v: o.v,
                        xi: xi_o,
                        xi_bar: links[i].xi_bar(),
                        xi_hat: xi_hat_o,
                        lambda,
                        dist_true,
                        dist_filtered: (xi - xi_o).norm(),
                        dist_est,
                        viol_est: dist_est < separation,
                        collision: dist_true < contact,
                        thm1_applicable: false,
                        thm1_violated: false,
                    }
                })
                .collect();
            trace.push(TraceRecord {
                t,
                uav: UavSample {
                    p: uav.p,
                    v: uav.v,
                    xi,
                    xi_hat,
                    v_c,
                },
                obstacles: obs_samples,
            });

            if n == steps {
                break;
            }
            uav = step_uav(uav, v_c, l, dt)?;
            for i in 0..n_obs {
                obstacles[i] = step_obstacle(obstacles[i], a_o[i], l, dt)?;
                links[i].advance(dt, obstacles[i].filtered(l))?;
            }
        }
        Ok(trace)
    }
}

/// Central-difference rate of `xi_hat_o` at every sample (one-sided at the ends).
fn estimate_rates(trace: &[TraceRecord], i: usize) -> Vec<Vec3> {
    let n = trace.len();
    (0..n)
        .map(|k| {
            if n < 2 {
                return Vec3::ZERO;
            }
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            let span = trace[b].t - trace[a].t;
            (trace[b].obstacles[i].xi_hat - trace[a].obstacles[i].xi_hat) / span
        })
        .collect()
}

fn apply_monitor(cfg: &ScenarioConfig, radius: &ResolvedRadius, trace: &mut [TraceRecord]) {
    let band = cfg.monitor_band();
    for i in 0..cfg.obstacles.len() {
        let rates = estimate_rates(trace, i);
        for (rec, rate) in trace.iter_mut().zip(rates) {
            let e_o = rec.uav.xi_hat - rec.obstacles[i].xi_hat;
            let verdict = separation_condition_monitor(
                e_o,
                rec.uav.v_c,
                rate,
                radius.r_s,
                radius.r_o,
                cfg.budget.v_b,
                band,
            );
            let o = &mut rec.obstacles[i];
            o.thm1_applicable = verdict.is_applicable();
            o.thm1_violated = matches!(verdict, MonitorVerdict::Violated { .. });
        }
    }
}

fn summarize(cfg: &ScenarioConfig, radius: ResolvedRadius, trace: &[TraceRecord]) -> RunVerdict {
    let obstacles: Vec<ObstacleVerdict> = (0..cfg.obstacles.len())
        .map(|i| {
            let mut v = ObstacleVerdict {
                min_true_distance: f64::INFINITY,
                min_filtered_distance: f64::INFINITY,
                min_estimated_distance: f64::INFINITY,
                first_violation_time: None,
                collision: false,
                monitor_samples: 0,
                monitor_violations: 0,
                first_monitor_violation_time: None,
                max_lambda: 0.0,
                lambda_bound: cfg.budget.lag_bound(cfg.obstacles[i].v_o_mps),
            };
            for rec in trace {
                let o = &rec.obstacles[i];
                v.min_true_distance = v.min_true_distance.min(o.dist_true);
                v.min_filtered_distance = v.min_filtered_distance.min(o.dist_filtered);
                v.min_estimated_distance = v.min_estimated_distance.min(o.dist_est);
                v.max_lambda = v.max_lambda.max(o.lambda.norm());
                v.collision |= o.collision;
                if o.viol_est && v.first_violation_time.is_none() {
                    v.first_violation_time = Some(rec.t);
                }
                if o.thm1_applicable {
                    v.monitor_samples += 1;
                }
                if o.thm1_violated {
                    v.monitor_violations += 1;
                    v.first_monitor_violation_time.get_or_insert(rec.t);
                }
            }
            v
        })
        .collect();

    let min_of = |f: fn(&ObstacleVerdict) -> f64| obstacles.iter().map(f).fold(f64::INFINITY, f64::min);
    let first_violation_time = obstacles
        .iter()
        .filter_map(|o| o.first_violation_time)
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))));
    RunVerdict {
        separation: radius.r_s + radius.r_o,
        contact: cfg.uav.r_m_m + radius.r_o,
        radius,
        min_true_distance: min_of(|o| o.min_true_distance),
        min_filtered_distance: min_of(|o| o.min_filtered_distance),
        min_estimated_distance: min_of(|o| o.min_estimated_distance),
        first_violation_time,
        collision: obstacles.iter().any(|o| o.collision),
        max_uav_speed: trace.iter().map(|r| r.uav.v.norm()).fold(0.0, f64::max),
        obstacles,
    }
}

/// Runs a scenario from `t = 0` to `duration`, returning the full trace and its verdict.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(Vec<TraceRecord>, RunVerdict)> {
    cfg.validate()?;
    let radius = cfg.resolve_radius()?;
    let engine = Engine::new(cfg, &radius)?;
    let mut trace = engine.run(&radius)?;
    apply_monitor(cfg, &radius, &mut trace);
    let verdict = summarize(cfg, radius, &trace);
    Ok((trace, verdict))
}

/// Same engine as [`run_scenario`], keeping only the per-obstacle and global metrics.
pub fn run_multi_preset(cfg: &ScenarioConfig) -> Result<RunVerdict> {
    run_scenario(cfg).map(|(_, verdict)| verdict)
}
