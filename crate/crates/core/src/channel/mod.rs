//! Broadcast link model: estimation noise, transport delay and Bernoulli packet loss.

mod delay;
mod noise;

pub use delay::DelayBuffer;
pub use noise::{bounded_noise, BoundedNoise};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::geometry::Vec3;

/// Bounds on every uncertainty source seen by the UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBudget {
    /// Self-estimate noise bound (m).
    #[serde(rename = "b_m")]
    pub b: f64,
    /// Self-estimate noise rate bound (m/s).
    #[serde(rename = "v_b_mps")]
    pub v_b: f64,
    /// Obstacle-estimate noise bound (m).
    #[serde(rename = "b_o_m")]
    pub b_o: f64,
    #[serde(rename = "v_bo_mps")]
    pub v_bo: f64,
    /// Largest accepted transport delay (s).
    #[serde(rename = "tau_dm_s")]
    pub tau_dm: f64,
    /// Largest packet-loss probability.
    pub theta_m: f64,
    /// Receive interval (s).
    #[serde(rename = "t_s_s")]
    pub t_s: f64,
}

impl UncertaintyBudget {
    /// Perfect link: no noise, delay or loss.
    pub fn ideal(t_s: f64) -> Self {
        UncertaintyBudget {
            b: 0.0,
            v_b: 0.0,
            b_o: 0.0,
            v_bo: 0.0,
            tau_dm: 0.0,
            theta_m: 0.0,
            t_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_non_negative("b", self.b)?;
        require_non_negative("v_b", self.v_b)?;
        require_non_negative("b_o", self.b_o)?;
        require_non_negative("v_bo", self.v_bo)?;
        require_non_negative("tau_dm", self.tau_dm)?;
        require_positive("t_s", self.t_s)?;
        if !(0.0..1.0).contains(&self.theta_m) {
            return Err(Error::Parameter {
                name: "theta_m",
                value: self.theta_m,
                reason: "must lie in [0, 1)",
            });
        }
        Ok(())
    }

    /// Worst-case gap `|xi_o - xi_bar_o|` for an obstacle whose filtered speed is at most `v_o`.
    pub fn lag_bound(&self, v_o: f64) -> f64 {
        v_o * self.tau_dm + self.theta_m * self.t_s * v_o / (1.0 - self.theta_m)
    }
}

/// Per-link channel settings. Must stay within the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub tau_d: f64,
    pub theta: f64,
    pub t_s: f64,
    pub b_o: f64,
    pub v_bo: f64,
}

impl LinkParams {
    pub fn worst_case(budget: &UncertaintyBudget) -> Self {
        LinkParams {
            tau_d: budget.tau_dm,
            theta: budget.theta_m,
            t_s: budget.t_s,
            b_o: budget.b_o,
            v_bo: budget.v_bo,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_non_negative("tau_d", self.tau_d)?;
        require_positive("t_s", self.t_s)?;
        require_non_negative("b_o", self.b_o)?;
        require_non_negative("v_bo", self.v_bo)?;
        check_theta(self.theta)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: "theta",
            value: theta,
            reason: "must lie in [0, 1]",
        })
    }
}

/// Receiver that keeps the last delivered packet when a packet is lost.
#[derive(Debug, Clone)]
pub struct SampleHold {
    held: Vec3,
    rng: ChaCha8Rng,
    draws: u64,
    losses: u64,
}

impl SampleHold {
    pub fn new(seed: u64, stream: u64, initial: Vec3) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SampleHold {
            held: initial,
            rng,
            draws: 0,
            losses: 0,
        }
    }

    pub fn held(&self) -> Vec3 {
        self.held
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn losses(&self) -> u64 {
        self.losses
    }

    /// One receive tick: loses the packet with probability `theta`.
    pub fn sample(&mut self, delayed: Vec3, theta: f64) -> Result<Vec3> {
        check_theta(theta)?;
        self.draws += 1;
        // random::<f64>() lies in [0, 1), so theta = 1 always loses and theta = 0 never does
        if self.rng.random::<f64>() < theta {
            self.losses += 1;
        } else {
            self.held = delayed;
        }
        Ok(self.held)
    }
}

/// Gain `k = (1 - theta) / (theta * T_s)` of the expectation model, `None` when `theta = 0`.
pub fn expectation_gain(theta: f64, t_s: f64) -> Result<Option<f64>> {
    check_theta(theta)?;
    require_positive("t_s", t_s)?;
    if theta == 1.0 {
        return Err(Error::Parameter {
            name: "theta",
            value: theta,
            reason: "expectation model needs theta < 1",
        });
    }
    if theta == 0.0 {
        return Ok(None);
    }
    Ok(Some((1.0 - theta) / (theta * t_s)))
}

const MAX_GAIN_STEP: f64 = 0.25;

/// Advances `xbar' = -k (xbar - u(s))` over `dt` with `u` linear from `u0` to `u1`.
/// Stiff gains are sub-stepped. With `theta = 0` the result is `u1`.
pub fn expectation_step(
    xi_bar: Vec3,
    u0: Vec3,
    u1: Vec3,
    theta: f64,
    t_s: f64,
    dt: f64,
) -> Result<Vec3> {
    require_positive("dt", dt)?;
    let Some(k) = expectation_gain(theta, t_s)? else {
        return Ok(u1);
    };
    let n = ((k * dt) / MAX_GAIN_STEP).ceil().max(1.0) as usize;
    let h = dt / n as f64;
    let input = |s: f64| u0 + (u1 - u0) * (s / dt);
    let f = |x: Vec3, s: f64| (input(s) - x) * k;
    let mut x = xi_bar;
    for i in 0..n {
        let s = i as f64 * h;
        let k1 = f(x, s);
        let k2 = f(x + k1 * (h / 2.0), s + h / 2.0);
        let k3 = f(x + k2 * (h / 2.0), s + h / 2.0);
        let k4 = f(x + k3 * h, s + h);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(x)
}

/// Single step of the expectation model with the delayed input held over the step.
pub fn expectation_ode_step(
    xi_bar: Vec3,
    delayed: Vec3,
    theta: f64,
    t_s: f64,
    dt: f64,
) -> Result<Vec3> {
    expectation_step(xi_bar, delayed, delayed, theta, t_s, dt)
}

/// Obstacle link as seen by one UAV.
#[derive(Debug, Clone)]
pub struct ChannelState {
    params: LinkParams,
    buffer: DelayBuffer,
    hold: SampleHold,
    xi_bar: Vec3,
    noise: BoundedNoise,
    t: f64,
}

impl ChannelState {
    /// Link starting at `t0` with obstacle filtered position `xi_o0`. History before `t0`
    /// is taken as `xi_o0`, so the expectation state starts there too.
    pub fn new(params: LinkParams, t0: f64, xi_o0: Vec3, seed: u64, stream: u64) -> Result<Self> {
        params.validate()?;
        // two streams per link: loss draws and noise
        let noise = BoundedNoise::new(seed, 2 * stream + 1, params.b_o, params.v_bo)?;
        Ok(ChannelState {
            params,
            buffer: DelayBuffer::new(params.tau_d + params.t_s, t0, xi_o0),
            hold: SampleHold::new(seed, 2 * stream, xi_o0),
            xi_bar: xi_o0,
            noise,
            t: t0,
        })
    }

    pub fn params(&self) -> &LinkParams {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn xi_bar(&self) -> Vec3 {
        self.xi_bar
    }

    pub fn held_estimate(&self) -> Vec3 {
        self.hold.held()
    }

    pub fn truth(&self) -> Vec3 {
        self.buffer.latest().1
    }

    pub fn delayed(&self) -> Vec3 {
        self.buffer.delayed_sample(self.t, self.params.tau_d)
    }

    pub fn noise(&self) -> Vec3 {
        self.noise.value(self.t)
    }

    /// Receive tick of the sample-hold receiver at the current time.
    pub fn tick(&mut self) -> Result<Vec3> {
        let delayed = self.delayed();
        self.hold.sample(delayed, self.params.theta)
    }

    /// Moves the link forward by `dt`, the obstacle having reached `xi_o_next`.
    pub fn advance(&mut self, dt: f64, xi_o_next: Vec3) -> Result<()> {
        require_positive("dt", dt)?;
        let u0 = self.delayed();
        let t_next = self.t + dt;
        self.buffer.push(t_next, xi_o_next);
        let u1 = self.buffer.delayed_sample(t_next, self.params.tau_d);
        self.xi_bar = expectation_step(self.xi_bar, u0, u1, self.params.theta, self.params.t_s, dt)?;
        self.t = t_next;
        Ok(())
    }

    /// `(xi_hat_o, lambda_o)`: the received estimate and the lag `xi_o - xi_bar_o`.
    pub fn estimate_link(&self) -> (Vec3, Vec3) {
        (self.xi_bar + self.noise(), self.truth() - self.xi_bar)
    }
}
