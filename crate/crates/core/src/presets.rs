//! Built-in scenarios.

use crate::channel::UncertaintyBudget;
use crate::geometry::Vec3;
use crate::sim::{
    Behavior, ControllerConfig, ObstacleConfig, RadiusChoice, ScenarioConfig, UavConfig,
};

pub const PRESET_NAMES: [&str; 10] = [
    "sim1-caseA",
    "sim1-caseB",
    "sim1-caseC",
    "sim1-caseC-adversarial",
    "sim2-caseB",
    "sim2-caseC",
    "sim3-coop",
    "exp1",
    "exp2",
    "exp3",
];

const T_S: f64 = 0.01;
const DT: f64 = 0.01;
const DEFAULT_SEED: u64 = 7;

/// Speed at which the chasing obstacle closes the filtered gap.
pub const CHASE_EPS_MPS: f64 = 4.0;

pub fn case_a() -> UncertaintyBudget {
    UncertaintyBudget::ideal(T_S)
}

pub fn case_b() -> UncertaintyBudget {
    UncertaintyBudget {
        b: 3.0,
        v_b: 3.0,
        b_o: 1.0,
        v_bo: 1.0,
        tau_dm: 1.0,
        theta_m: 0.1,
        t_s: T_S,
    }
}

pub fn case_c() -> UncertaintyBudget {
    UncertaintyBudget {
        b: 5.0,
        v_b: 6.0,
        b_o: 2.0,
        v_bo: 5.0,
        tau_dm: 2.0,
        theta_m: 0.2,
        t_s: T_S,
    }
}

fn v3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

fn obstacle(budget: &UncertaintyBudget, r_o: f64, v_o: f64, p0: Vec3, v0: Vec3, behavior: Behavior) -> ObstacleConfig {
    ObstacleConfig {
        r_o_m: r_o,
        v_o_mps: v_o,
        p0_m: p0,
        v0_mps: v0,
        tau_d_s: budget.tau_dm,
        theta: budget.theta_m,
        behavior,
    }
}

fn constant(budget: &UncertaintyBudget, r_o: f64, p0: Vec3, velocity: Vec3) -> ObstacleConfig {
    obstacle(budget, r_o, velocity.norm(), p0, velocity, Behavior::Constant { velocity_mps: velocity })
}

fn sim1(name: &str, budget: UncertaintyBudget, r_s: f64, behavior: Option<Behavior>) -> ScenarioConfig {
    let velocity = v3(-5.0, 0.0, 0.0);
    let p0 = v3(40.0, 0.0, 100.0);
    let obs = match behavior {
        None => constant(&budget, 10.0, p0, velocity),
        Some(b) => obstacle(&budget, 10.0, 5.0, p0, velocity, b),
    };
    ScenarioConfig {
        name: Some(name.into()),
        duration_s: 20.0,
        dt_s: DT,
        seed: DEFAULT_SEED,
        uav: UavConfig {
            r_m_m: 5.0,
            l_per_s: 5.0,
            v_m_mps: 10.0,
            p0_m: v3(0.0, 0.0, 100.0),
            v0_mps: Vec3::ZERO,
        },
        controller: ControllerConfig {
            goal_m: v3(80.0, 0.0, 100.0),
            margin_m: 2.0,
            goal_gain_per_s: 1.0,
        },
        budget,
        obstacles: vec![obs],
        radii: RadiusChoice::Explicit { r_s_m: r_s },
        monitor_band_m: Some(0.1),
    }
}

fn sim2(name: &str, budget: UncertaintyBudget, r_s: f64) -> ScenarioConfig {
    let obstacles = [-40.0, 0.0, 40.0]
        .iter()
        .zip([3.0, 4.0, 5.0])
        .map(|(&x, speed)| constant(&budget, 10.0, v3(x, -40.0, 100.0), v3(0.0, speed, 0.0)))
        .collect();
    ScenarioConfig {
        name: Some(name.into()),
        duration_s: 20.0,
        dt_s: DT,
        seed: DEFAULT_SEED,
        uav: UavConfig {
            r_m_m: 5.0,
            l_per_s: 5.0,
            v_m_mps: 10.0,
            p0_m: v3(0.0, 40.0, 100.0),
            v0_mps: Vec3::ZERO,
        },
        controller: ControllerConfig {
            goal_m: v3(0.0, -80.0, 100.0),
            margin_m: 2.0,
            goal_gain_per_s: 1.0,
        },
        budget,
        obstacles,
        radii: RadiusChoice::Explicit { r_s_m: r_s },
        monitor_band_m: Some(0.1),
    }
}

fn sim3() -> ScenarioConfig {
    let budget = case_b();
    let starts = [v3(40.0, 40.0, 100.0), v3(40.0, -40.0, 100.0), v3(-40.0, -40.0, 100.0)];
    let obstacles = starts
        .iter()
        .zip([3.0, 4.0, 5.0])
        .map(|(&p0, v_o)| {
            let goal = v3(-p0.x, -p0.y, p0.z);
            obstacle(&budget, 10.0, v_o, p0, Vec3::ZERO, Behavior::Cooperative { goal_m: goal })
        })
        .collect();
    ScenarioConfig {
        name: Some("sim3-coop".into()),
        duration_s: 40.0,
        dt_s: DT,
        seed: DEFAULT_SEED,
        uav: UavConfig {
            r_m_m: 5.0,
            l_per_s: 5.0,
            v_m_mps: 5.0,
            p0_m: v3(-40.0, 40.0, 100.0),
            v0_mps: Vec3::ZERO,
        },
        controller: ControllerConfig {
            goal_m: v3(40.0, -40.0, 100.0),
            margin_m: 2.0,
            goal_gain_per_s: 1.0,
        },
        budget,
        obstacles,
        radii: RadiusChoice::Explicit { r_s_m: 14.14 },
        monitor_band_m: Some(0.1),
    }
}

fn lab_uav(p0: Vec3) -> UavConfig {
    UavConfig {
        r_m_m: 0.2,
        l_per_s: 2.0,
        v_m_mps: 0.1,
        p0_m: p0,
        v0_mps: Vec3::ZERO,
    }
}

fn lab(name: &str, duration: f64, uav: UavConfig, goal: Vec3, budget: UncertaintyBudget, obstacles: Vec<ObstacleConfig>, r_s: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: Some(name.into()),
        duration_s: duration,
        dt_s: DT,
        seed: DEFAULT_SEED,
        uav,
        controller: ControllerConfig {
            goal_m: goal,
            margin_m: 0.05,
            goal_gain_per_s: 1.0,
        },
        budget,
        obstacles,
        radii: RadiusChoice::Explicit { r_s_m: r_s },
        monitor_band_m: Some(0.005),
    }
}

/// Hovering obstacle speed bound; the largest value compatible with the stated speed condition.
pub const EXP1_HOVER_V_O: f64 = 0.01;

fn exp1() -> ScenarioConfig {
    let budget = UncertaintyBudget {
        b: 0.10,
        v_b: 0.08,
        b_o: 0.03,
        v_bo: 0.01,
        tau_dm: 1.0,
        theta_m: 0.1,
        t_s: T_S,
    };
    let obs = obstacle(
        &budget,
        0.2,
        EXP1_HOVER_V_O,
        v3(-0.2, 0.0, 1.0),
        Vec3::ZERO,
        Behavior::Constant { velocity_mps: Vec3::ZERO },
    );
    lab("exp1", 80.0, lab_uav(v3(1.5, 0.0, 1.0)), v3(-1.9, 0.0, 1.0), budget, vec![obs], 0.47)
}

fn exp2() -> ScenarioConfig {
    let budget = UncertaintyBudget {
        b: 0.2,
        v_b: 0.08,
        b_o: 0.1,
        v_bo: 0.01,
        tau_dm: 2.0,
        theta_m: 0.3,
        t_s: T_S,
    };
    let obs = obstacle(
        &budget,
        0.2,
        0.1,
        v3(-1.5, 0.0, 1.0),
        Vec3::ZERO,
        Behavior::Cooperative { goal_m: v3(1.5, 0.0, 1.0) },
    );
    lab("exp2", 80.0, lab_uav(v3(1.5, 0.0, 1.0)), v3(-1.5, 0.0, 1.0), budget, vec![obs], 0.71)
}

fn exp3() -> ScenarioConfig {
    let budget = UncertaintyBudget {
        b: 0.012,
        v_b: 0.012,
        b_o: 0.01,
        v_bo: 0.01,
        tau_dm: 0.1,
        theta_m: 0.01,
        t_s: T_S,
    };
    let obstacles = [v3(1.0, 1.0, 1.0), v3(1.0, -1.0, 1.0), v3(-1.0, -1.0, 1.0)]
        .into_iter()
        .map(|p0| {
            let goal = v3(-p0.x, -p0.y, p0.z);
            obstacle(&budget, 0.23, 0.1, p0, Vec3::ZERO, Behavior::Cooperative { goal_m: goal })
        })
        .collect();
    lab("exp3", 60.0, lab_uav(v3(-1.0, 1.0, 1.0)), v3(1.0, -1.0, 1.0), budget, obstacles, 0.23)
}

/// Looks up a built-in scenario by name.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    Some(match name {
        "sim1-caseA" => sim1(name, case_a(), 5.30, None),
        "sim1-caseB" => sim1(name, case_b(), 14.30, None),
        "sim1-caseC" => sim1(name, case_c(), 22.31, None),
        "sim1-caseC-adversarial" => sim1(name, case_c(), 22.31, Some(Behavior::Chasing { eps_mps: CHASE_EPS_MPS })),
        "sim2-caseB" => sim2(name, case_b(), 14.30),
        "sim2-caseC" => sim2(name, case_c(), 22.31),
        "sim3-coop" => sim3(),
        "exp1" => exp1(),
        "exp2" => exp2(),
        "exp3" => exp3(),
        _ => return None,
    })
}

pub fn all_presets() -> impl Iterator<Item = ScenarioConfig> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("listed presets exist"))
}
