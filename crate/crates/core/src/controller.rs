//! Collision-avoidance velocity commands and a sampling certifier for the sphere condition
//! `min_{|x| = r_s + r_o} x . c(t, x) >= (r_s + r_o) v_m`.
//!
//! The shipped law blends a saturated goal-seeking command with a radial escape command.
//! The blend weight ramps linearly from 0 at `r_guard + margin` to 1 at `r_guard`, and
//! `r_guard` sits `margin` outside the safety sphere, so on the sphere the command is
//! exactly `v_m * e / |e|`.

use serde::{Deserialize, Serialize};

use crate::dynamics::saturate_command;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::geometry::{fibonacci_sphere, Vec3};

/// A velocity command law `c(t, offsets)`.
///
/// `own` is the commanded vehicle's (estimated) filtered position; `offsets` are the
/// filtered-position errors `own - obstacle` for every obstacle it reacts to.
pub trait VelocityLaw {
    fn command(&self, t: f64, own: Vec3, offsets: &[Vec3]) -> Result<Vec3>;

    /// Upper bound on `|command|`.
    fn max_speed(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    /// Radius (m) inside which the command is purely radial.
    pub r_guard: f64,
    /// Width (m) of the blend band outside `r_guard`.
    pub margin: f64,
    /// Waypoint (m).
    pub goal: Vec3,
    /// Command cap (m/s).
    pub v_m: f64,
    /// Proportional gain (1/s) of the goal-seeking term.
    pub goal_gain: f64,
}

pub const DEFAULT_GOAL_GAIN: f64 = 1.0;

impl ControllerParams {
    pub fn new(r_guard: f64, margin: f64, goal: Vec3, v_m: f64) -> Result<Self> {
        let p = ControllerParams {
            r_guard,
            margin,
            goal,
            v_m,
            goal_gain: DEFAULT_GOAL_GAIN,
        };
        p.validate()?;
        Ok(p)
    }

    /// Guard placed `margin` outside the safety sphere of radius `r_s + r_o`.
    pub fn for_radius(r_s: f64, r_o: f64, margin: f64, goal: Vec3, v_m: f64) -> Result<Self> {
        require_positive("r_s", r_s)?;
        require_positive("r_o", r_o)?;
        Self::new(r_s + r_o + margin, margin, goal, v_m)
    }

    pub fn with_goal_gain(mut self, gain: f64) -> Result<Self> {
        require_non_negative("goal_gain", gain)?;
        self.goal_gain = gain;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("r_guard", self.r_guard)?;
        require_positive("margin", self.margin)?;
        require_positive("v_m", self.v_m)?;
        require_non_negative("goal_gain", self.goal_gain)?;
        if !self.goal.is_finite() {
            return Err(Error::Precondition("goal must be finite".into()));
        }
        Ok(())
    }

    /// Blend weight for an obstacle at filtered distance `d`.
    pub fn proximity_weight(&self, d: f64) -> f64 {
        ((self.r_guard + self.margin - d) / self.margin).clamp(0.0, 1.0)
    }

    pub fn goal_command(&self, own: Vec3) -> Vec3 {
        saturate_command((self.goal - own) * self.goal_gain, self.v_m)
    }
}

/// Single obstacle: `sat(alpha v_m e_hat + (1 - alpha) c_goal)`.
pub fn avoid_one(own: Vec3, e_o: Vec3, params: &ControllerParams) -> Result<Vec3> {
    let d = e_o.norm();
    let e_hat = e_o
        .normalized()
        .ok_or(Error::DegenerateGeometry("estimated positions coincide"))?;
    let alpha = params.proximity_weight(d);
    let goal = params.goal_command(own);
    Ok(saturate_command(
        e_hat * (alpha * params.v_m) + goal * (1.0 - alpha),
        params.v_m,
    ))
}

/// Multiple obstacles: radial terms combined with proximity weights and renormalized.
///
/// With a single obstacle inside its band this is identical to [`avoid_one`].
pub fn avoid_many(own: Vec3, offsets: &[Vec3], params: &ControllerParams) -> Result<Vec3> {
    let mut combined = Vec3::ZERO;
    let mut alpha: f64 = 0.0;
    let mut first_active: Option<Vec3> = None;
    for e in offsets {
        let e_hat = e
            .normalized()
            .ok_or(Error::DegenerateGeometry("estimated positions coincide"))?;
        let w = params.proximity_weight(e.norm());
        if w > 0.0 {
            combined += e_hat * w;
            alpha = alpha.max(w);
            first_active.get_or_insert(e_hat);
        }
    }
    let goal = params.goal_command(own);
    let Some(anchor) = first_active else {
        return Ok(goal);
    };

    let radial = match combined.normalized() {
        Some(dir) if combined.norm() > 1e-12 * alpha => dir * (alpha * params.v_m),
        // symmetric pincer: radial terms cancel
        _ => lateral_unit(anchor) * (1e-3 * params.v_m),
    };
    Ok(saturate_command(radial + goal * (1.0 - alpha), params.v_m))
}

/// Fixed unit vector perpendicular to `dir`.
fn lateral_unit(dir: Vec3) -> Vec3 {
    let reference = if dir.z.abs() < 0.9 { Vec3::Z } else { Vec3::X };
    dir.cross(reference).normalized().unwrap_or(Vec3::X)
}

/// The shipped avoidance law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvoidanceController {
    pub params: ControllerParams,
}

impl AvoidanceController {
    pub fn new(params: ControllerParams) -> Self {
        AvoidanceController { params }
    }
}

impl VelocityLaw for AvoidanceController {
    fn command(&self, _t: f64, own: Vec3, offsets: &[Vec3]) -> Result<Vec3> {
        match offsets {
            [single] => avoid_one(own, *single, &self.params),
            many => avoid_many(own, many, &self.params),
        }
    }

    fn max_speed(&self) -> f64 {
        self.params.v_m
    }
}

/// Goal tracking with no avoidance term. Fails certification; kept as a negative control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalSeeking {
    pub goal: Vec3,
    pub v_m: f64,
    pub gain: f64,
}

impl VelocityLaw for GoalSeeking {
    fn command(&self, _t: f64, own: Vec3, _offsets: &[Vec3]) -> Result<Vec3> {
        Ok(saturate_command((self.goal - own) * self.gain, self.v_m))
    }

    fn max_speed(&self) -> f64 {
        self.v_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertReport {
    pub samples: usize,
    /// Smallest `x . c(t, x)` seen on the sphere.
    pub min_inner_product: f64,
    /// `(r_s + r_o) v_m`.
    pub required: f64,
    pub worst_direction: Vec3,
    pub certified: bool,
}

/// Sample the safety sphere and check the boundary inner-product floor.
///
/// Evaluated at time `t` with the law's own position at `own`; offsets are `x` on the
/// sphere `|x| = r_s + r_o`.
pub fn certify_lemma1<L: VelocityLaw + ?Sized>(
    law: &L,
    t: f64,
    own: Vec3,
    r_s: f64,
    r_o: f64,
    v_m: f64,
    n_samples: usize,
) -> Result<CertReport> {
    if n_samples < 1000 {
        return Err(Error::InsufficientData {
            needed: 1000,
            got: n_samples,
        });
    }
    let radius = r_s + r_o;
    let required = radius * v_m;
    let tolerance = 1e-9 * required.max(1.0);

    let mut min_inner = f64::INFINITY;
    let mut worst = Vec3::ZERO;
    for dir in fibonacci_sphere(n_samples) {
        let x = dir * radius;
        let c = law.command(t, own, &[x])?;
        let inner = x.dot(c);
        if inner < min_inner {
            min_inner = inner;
            worst = dir;
        }
    }
    Ok(CertReport {
        samples: n_samples,
        min_inner_product: min_inner,
        required,
        worst_direction: worst,
        certified: min_inner >= required - tolerance,
    })
}
