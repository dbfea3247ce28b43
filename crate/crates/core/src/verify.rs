//! Property suites exercising each guarantee with fixed seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{BoundedNoise, ChannelState, LinkParams, UncertaintyBudget};
use crate::controller::{certify_lemma1, AvoidanceController, GoalSeeking};
use crate::dynamics::{saturate_command, step_uav, UavState};
use crate::error::{Error, Result};
use crate::geometry::{fibonacci_sphere, Vec3};
use crate::presets::{self, all_presets, preset};
use crate::radius::{check_theorem1_cooperative, proposition2_threshold, separation_condition_monitor};
use crate::sim::{
    check_proposition2, ks_critical_5pct, ks_statistic, proposition2_construction, run_scenario,
    verify_lemma2, Behavior, Lemma2Bounds, ScenarioConfig,
};

pub const SUITES: [&str; 7] = ["lemma1", "lemma2", "prop1", "prop2", "prop3", "theorem1", "channel-ks"];

const SUITE_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub lines: Vec<String>,
}

struct Collector {
    name: &'static str,
    passed: bool,
    lines: Vec<String>,
}

impl Collector {
    fn new(name: &'static str) -> Self {
        Collector {
            name,
            passed: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("[{}] {line}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("[info] {line}"));
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name.to_string(),
            passed: self.passed,
            lines: self.lines,
        }
    }
}

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "lemma1" => lemma1(),
        "lemma2" => lemma2(),
        "prop1" => prop1(),
        "prop2" => prop2(),
        "prop3" => prop3(),
        "theorem1" => theorem1(),
        "channel-ks" => channel_ks().map(|(report, _)| report),
        other => Err(Error::Precondition(format!("unknown suite `{other}`"))),
    }
}

pub fn run_all() -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s)).collect()
}

fn uav_law(cfg: &ScenarioConfig, r_s: f64) -> Result<AvoidanceController> {
    Ok(AvoidanceController::new(cfg.controller_params(
        r_s,
        cfg.uav.v_m_mps,
        cfg.controller.goal_m,
    )?))
}

/// Boundary certification of the shipped law for every preset, plus a goal-only negative control.
pub fn lemma1() -> Result<SuiteReport> {
    let mut c = Collector::new("lemma1");
    let samples = 10_000;
    for cfg in all_presets() {
        let name = cfg.name.clone().unwrap_or_default();
        let radius = cfg.resolve_radius()?;
        let own = cfg.uav.p0_m;
        let law = uav_law(&cfg, radius.r_s)?;
        let rep = certify_lemma1(&law, 0.0, own, radius.r_s, radius.r_o, cfg.uav.v_m_mps, samples)?;
        c.check(
            rep.certified,
            format!(
                "{name}: UAV law min x.c = {:.6} vs required {:.6} over {samples} directions",
                rep.min_inner_product, rep.required
            ),
        );
        for (i, o) in cfg.obstacles.iter().enumerate() {
            if let Behavior::Cooperative { goal_m } = o.behavior {
                let law = AvoidanceController::new(cfg.controller_params(radius.r_s, o.v_o_mps, goal_m)?);
                let rep = certify_lemma1(&law, 0.0, o.p0_m, radius.r_s, radius.r_o, o.v_o_mps, samples)?;
                c.check(
                    rep.certified,
                    format!("{name}: cooperative obstacle {i} law certified (min {:.6}, required {:.6})", rep.min_inner_product, rep.required),
                );
            }
        }
    }
    let cfg = preset("sim1-caseB").expect("preset exists");
    let radius = cfg.resolve_radius()?;
    let goal_only = GoalSeeking {
        goal: cfg.controller.goal_m,
        v_m: cfg.uav.v_m_mps,
        gain: cfg.controller.goal_gain_per_s,
    };
    let rep = certify_lemma1(&goal_only, 0.0, cfg.uav.p0_m, radius.r_s, radius.r_o, cfg.uav.v_m_mps, samples)?;
    c.check(
        !rep.certified,
        format!("goal-only control is rejected (min x.c = {:.3} < {:.3})", rep.min_inner_product, rep.required),
    );
    Ok(c.finish())
}

/// Norm and rate bounds of `x' = -k (x - y)` over randomized admissible profiles.
pub fn lemma2() -> Result<SuiteReport> {
    let mut c = Collector::new("lemma2");
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let profiles = 100;
    let (mut norm_ok, mut rate_ok, mut rate_checked) = (0, 0, 0);
    let mut worst_norm_ratio: f64 = 0.0;
    let mut worst_rate_ratio: f64 = 0.0;
    for idx in 0..profiles {
        let k_min = rng.random_range(0.5..5.0);
        let k_max = k_min * rng.random_range(1.0..10.0);
        let y_max = rng.random_range(0.5..5.0);
        let v_y_max = rng.random_range(0.1..5.0);
        let y_gen = BoundedNoise::new(rng.random(), 0, y_max, v_y_max)?;
        let omega = rng.random_range(0.1..10.0);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let levels: Vec<f64> = (0..64).map(|_| rng.random_range(k_min..=k_max)).collect();
        let hold = rng.random_range(0.05..1.0);
        let smooth = idx % 2 == 0;
        let k = move |t: f64| {
            if smooth {
                k_min + (k_max - k_min) * (0.5 + 0.5 * (omega * t + phase).sin())
            } else {
                levels[((t / hold) as usize) % levels.len()]
            }
        };
        let y0 = y_gen.value(0.0);
        let x0 = if idx % 4 < 2 {
            y0
        } else {
            let dir = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            dir.normalized().unwrap_or(Vec3::X) * (y_max * rng.random_range(0.0..1.0))
        };
        let bounds = Lemma2Bounds { k_min, k_max, y_max, v_y_max };
        let rep = verify_lemma2(k, |t| y_gen.value(t), x0, bounds, 10.0, 1e-3)?;
        norm_ok += rep.norm_ok as usize;
        worst_norm_ratio = worst_norm_ratio.max(rep.max_norm / rep.norm_bound);
        if let Some(b) = rep.rate_bound {
            rate_checked += 1;
            rate_ok += rep.rate_ok as usize;
            worst_rate_ratio = worst_rate_ratio.max(rep.max_rate / b);
        }
    }
    c.check(
        norm_ok == profiles,
        format!("|x| <= y_max (1 + 1e-6) on {norm_ok}/{profiles} profiles, worst |x|/y_max = {worst_norm_ratio:.6}"),
    );
    c.check(
        rate_ok == rate_checked && rate_checked >= profiles / 2,
        format!("|x'| <= (k_max/k_min) v_y_max (1 + 1e-6) on {rate_ok}/{rate_checked} eligible profiles, worst ratio = {worst_rate_ratio:.6}"),
    );
    Ok(c.finish())
}

/// Velocity never exceeds the command cap; filtered position moves exactly with the command.
pub fn prop1() -> Result<SuiteReport> {
    let mut c = Collector::new("prop1");
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED + 1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let v_m = rng.random_range(0.1..20.0);
        let l = rng.random_range(0.5..20.0);
        let random_vec = |rng: &mut ChaCha8Rng, scale: f64| {
            saturate_command(
                Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale,
                scale,
            )
        };
        let mut s = UavState::new(Vec3::ZERO, random_vec(&mut rng, v_m));
        let mut cmd = Vec3::ZERO;
        for n in 0..500 {
            if n % 10 == 0 {
                cmd = random_vec(&mut rng, v_m);
            }
            s = step_uav(s, cmd, l, 0.01)?;
            worst = worst.max(s.v.norm() / v_m);
        }
    }
    c.check(worst <= 1.0 + 1e-6, format!("1000 random command sequences: max |v|/v_m = {worst:.9}"));

    for cfg in all_presets() {
        let name = cfg.name.clone().unwrap_or_default();
        let (trace, verdict) = run_scenario(&cfg)?;
        let v_m = cfg.uav.v_m_mps;
        c.check(
            verdict.max_uav_speed <= v_m * (1.0 + 1e-6),
            format!("{name}: max |v| = {:.6} <= v_m = {v_m}", verdict.max_uav_speed),
        );
        let dt = cfg.dt_s;
        let drift = trace
            .windows(2)
            .map(|w| ((w[1].uav.xi - w[0].uav.xi) / dt - w[0].uav.v_c).norm())
            .fold(0.0, f64::max);
        c.check(
            drift <= 1e-6 * v_m.max(1.0),
            format!("{name}: max |dxi/dt - v_c| = {drift:.3e}"),
        );
    }
    Ok(c.finish())
}

/// Tight and sub-threshold constructions, plus the implication on a replayed trace.
pub fn prop2() -> Result<SuiteReport> {
    let mut c = Collector::new("prop2");
    let (r_m, r_o, v_m, v_o, l) = (5.0, 10.0, 10.0, 5.0, 5.0);
    let r = r_m + r_o;
    let r_v = (v_m + v_o) / l;
    let tight = proposition2_construction(r, v_m, v_o, l, 0.0, 5.0, 1e-3)?;
    c.check(
        tight.min_true >= r * (1.0 - 1e-6) && tight.min_true <= r * 1.001,
        format!(
            "tight construction: min |p~| = {:.6} vs r = {r} (within 0.1%), filtered drift {:.2e}",
            tight.min_true, tight.filtered_drift
        ),
    );
    let eps_o = 1.0;
    let inside = proposition2_construction(r, v_m, v_o, l, eps_o, 5.0, 1e-3)?;
    c.check(
        inside.min_true < r,
        format!("sub-threshold construction (eps_o = {eps_o}): min |p~| = {:.6} < r = {r}", inside.min_true),
    );

    let cfg = preset("sim1-caseB").expect("preset exists");
    let (trace, _) = run_scenario(&cfg)?;
    let pairs: Vec<(f64, f64)> = trace
        .iter()
        .map(|rec| (rec.obstacles[0].dist_true, rec.obstacles[0].dist_filtered))
        .collect();
    let rep = check_proposition2(&pairs, r, r_v);
    c.check(
        rep.implication_ok,
        format!(
            "sim1-caseB replay: threshold {:.3}, premise held {}, {} samples checked, min |p~| = {:.3}",
            proposition2_threshold(r, r_v),
            rep.premise_held,
            rep.checked,
            rep.min_true
        ),
    );
    Ok(c.finish())
}

/// Lag `xi_o - xi_bar_o` stays within its closed-form bound.
pub fn prop3() -> Result<SuiteReport> {
    let mut c = Collector::new("prop3");
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED + 2);
    let mut worst_ratio: f64 = 0.0;
    let trials = 100;
    let mut ok = 0;
    for _ in 0..trials {
        let budget = UncertaintyBudget {
            b: 0.0,
            v_b: 0.0,
            b_o: 0.0,
            v_bo: 0.0,
            tau_dm: rng.random_range(0.05..2.0),
            theta_m: rng.random_range(0.0..0.5),
            t_s: 0.01,
        };
        let v_o = rng.random_range(0.1..10.0);
        let link = LinkParams {
            tau_d: budget.tau_dm * rng.random_range(0.1..=1.0),
            theta: budget.theta_m * rng.random_range(0.0..=1.0),
            ..LinkParams::worst_case(&budget)
        };
        let path = BoundedNoise::new(rng.random(), 0, 50.0, v_o)?;
        let mut ch = ChannelState::new(link, 0.0, path.value(0.0), 1, 0)?;
        let mut worst: f64 = 0.0;
        for n in 1..=2000 {
            ch.advance(0.01, path.value(n as f64 * 0.01))?;
            worst = worst.max(ch.estimate_link().1.norm());
        }
        let bound = budget.lag_bound(v_o);
        worst_ratio = worst_ratio.max(worst / bound);
        ok += (worst <= 1.01 * bound) as usize;
    }
    c.check(
        ok == trials,
        format!("{ok}/{trials} random trajectories within 1.01 x bound, worst |lambda|/bound = {worst_ratio:.4}"),
    );

    for cfg in all_presets() {
        let name = cfg.name.clone().unwrap_or_default();
        let (_, verdict) = run_scenario(&cfg)?;
        for (i, (o, ov)) in cfg.obstacles.iter().zip(&verdict.obstacles).enumerate() {
            if matches!(o.behavior, Behavior::Chasing { .. }) {
                c.note(format!(
                    "{name}: obstacle {i} chases faster than v_o, lag {:.3} not held to bound {:.3}",
                    ov.max_lambda, ov.lambda_bound
                ));
                continue;
            }
            c.check(
                ov.max_lambda <= 1.01 * ov.lambda_bound + 1e-12,
                format!("{name}: obstacle {i} max |lambda| = {:.5} <= {:.5}", ov.max_lambda, ov.lambda_bound),
            );
        }
    }
    Ok(c.finish())
}

/// Boundary condition under the speed condition, on the sphere and along replayed traces.
pub fn theorem1() -> Result<SuiteReport> {
    let mut c = Collector::new("theorem1");

    // worst admissible obstacle-estimate velocity points straight at the UAV
    for (name, expect_ok) in [("sim1-caseB", true), ("sim1-caseC", false)] {
        let cfg = preset(name).expect("preset exists");
        let radius = cfg.resolve_radius()?;
        let law = uav_law(&cfg, radius.r_s)?;
        let sep = radius.r_s + radius.r_o;
        let v_hat_o = cfg.design_obstacle().v_o + cfg.budget.v_bo;
        let mut violated = 0;
        let n = 10_000;
        for dir in fibonacci_sphere(n) {
            let e_o = dir * sep;
            let xi_dot = crate::controller::VelocityLaw::command(&law, 0.0, cfg.uav.p0_m, &[e_o])?;
            let verdict = separation_condition_monitor(e_o, xi_dot, dir * v_hat_o, radius.r_s, radius.r_o, cfg.budget.v_b, cfg.monitor_band());
            violated += verdict.is_violated() as usize;
        }
        let ok = if expect_ok { violated == 0 } else { violated == n };
        c.check(
            ok,
            format!("{name}: sphere sampling with worst obstacle-estimate speed {v_hat_o}: {violated}/{n} violations (expected {})", if expect_ok { "none" } else { "all" }),
        );
    }

    for (name, expect_violation) in [("sim1-caseB", false), ("sim2-caseB", false), ("sim1-caseC-adversarial", true)] {
        let cfg = preset(name).expect("preset exists");
        let (_, verdict) = run_scenario(&cfg)?;
        let (samples, violations) = (verdict.monitor_samples(), verdict.monitor_violations());
        let ok = if expect_violation { violations > 0 } else { violations == 0 };
        c.check(
            ok,
            format!(
                "{name}: monitor shell samples {samples}, violations {violations}; min |e_o| = {:.3} vs r_s + r_o = {:.3}",
                verdict.min_estimated_distance, verdict.separation
            ),
        );
    }

    let cfg = preset("sim3-coop").expect("preset exists");
    let (trace, verdict) = run_scenario(&cfg)?;
    let radius = verdict.radius;
    let band = cfg.monitor_band();
    let mut evaluated = 0;
    let mut failed = 0;
    for i in 0..cfg.obstacles.len() {
        for w in trace.windows(3) {
            let e_o = w[1].e_o(i);
            if ((e_o.norm()) - (radius.r_s + radius.r_o)).abs() > band {
                continue;
            }
            let rate = (w[2].obstacles[i].xi_hat - w[0].obstacles[i].xi_hat) / (w[2].t - w[0].t);
            evaluated += 1;
            failed += !check_theorem1_cooperative(e_o, rate, radius.r_s, radius.r_o, cfg.uav.v_m_mps, cfg.budget.v_b) as usize;
        }
    }
    c.check(
        failed == 0 && !verdict.violated(),
        format!(
            "sim3-coop: speed condition fails yet min |e_o| = {:.3} >= {:.3}; cooperative condition failed at {failed}/{evaluated} shell samples",
            verdict.min_estimated_distance, verdict.separation
        ),
    );
    Ok(c.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsOutcome {
    pub samples: usize,
    pub statistic: f64,
    pub critical: f64,
    pub ks_passed: bool,
    pub max_residual: f64,
    pub residual_bound: f64,
    pub bounded: bool,
}

/// Compares the sample-hold receiver with the expectation model on the same input.
///
/// The residual is asserted bounded by `b_o`; the KS statistic is reported and only informs.
pub fn channel_ks() -> Result<(SuiteReport, KsOutcome)> {
    let mut c = Collector::new("channel-ks");
    let budget = presets::case_b();
    let mut link = LinkParams::worst_case(&budget);
    link.b_o = 0.0;
    link.v_bo = 0.0;
    let speed = 5.0;
    let path = |t: f64| Vec3::new(40.0 - speed * t, 0.0, 100.0);
    let dt = budget.t_s;
    let mut ch = ChannelState::new(link, 0.0, path(0.0), SUITE_SEED, 1)?;
    let warmup = ((budget.tau_dm + 1.0) / dt).round() as usize;
    let n = 10_000;
    let mut residuals = Vec::with_capacity(n);
    let mut max_residual: f64 = 0.0;
    for k in 0..warmup + n {
        let held = ch.tick()?;
        if k >= warmup {
            let r = held - ch.xi_bar();
            max_residual = max_residual.max(r.norm());
            residuals.push(r.x);
        }
        ch.advance(dt, path((k + 1) as f64 * dt))?;
    }
    let statistic = ks_statistic(&residuals)?;
    let critical = ks_critical_5pct(n);
    let outcome = KsOutcome {
        samples: n,
        statistic,
        critical,
        ks_passed: statistic < critical,
        max_residual,
        residual_bound: budget.b_o,
        bounded: max_residual <= budget.b_o,
    };
    c.check(
        outcome.bounded,
        format!("residual bounded: max |held - xi_bar| = {max_residual:.4} m <= b_o = {} m over {n} ticks", budget.b_o),
    );
    if outcome.ks_passed {
        c.check(true, format!("KS statistic {statistic:.4} < critical {critical:.4}"));
    } else {
        c.note(format!(
            "KS statistic {statistic:.4} >= critical {critical:.4}: residual is lattice-valued (whole numbers of lost packets), normality not asserted"
        ));
    }
    Ok((c.finish(), outcome))
}
