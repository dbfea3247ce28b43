use sepradius::presets::{preset, PRESET_NAMES};
use sepradius::sim::{
    run_multi_preset, run_scenario, verify_proposition2, Behavior, RadiusChoice, ScenarioConfig,
};
use sepradius::{Error, Vec3};

fn load(name: &str) -> ScenarioConfig {
    preset(name).unwrap_or_else(|| panic!("missing preset {name}"))
}

#[test]
fn case_a_keeps_separation_without_uncertainty() {
    let (trace, v) = run_scenario(&load("sim1-caseA")).unwrap();
    assert!(v.min_estimated_distance >= v.separation);
    assert!(!v.collision && !v.violated());
    // with a perfect link every estimate equals the truth
    for rec in &trace {
        assert_eq!(rec.uav.xi_hat, rec.uav.xi);
        assert_eq!(rec.obstacles[0].xi_hat, rec.obstacles[0].xi);
    }
}

#[test]
fn case_b_keeps_estimated_distance_while_filtered_distance_dips() {
    let (_, v) = run_scenario(&load("sim1-caseB")).unwrap();
    assert!((v.separation - 24.30).abs() < 1e-9);
    assert!(v.min_estimated_distance >= 24.30, "{}", v.min_estimated_distance);
    assert!(v.min_true_distance >= 15.0, "{}", v.min_true_distance);
    assert!(v.min_filtered_distance < 24.30, "{}", v.min_filtered_distance);
    assert!(v.first_violation_time.is_none() && !v.collision);
}

#[test]
fn chasing_adversary_breaks_case_c() {
    let (_, v) = run_scenario(&load("sim1-caseC-adversarial")).unwrap();
    let t = v.first_violation_time.expect("violation expected");
    assert!(t > 0.0 && t <= 20.0);
    assert!(v.violated());
    assert!(v.monitor_violations() > 0);
}

#[test]
fn multi_obstacle_case_b_and_cooperative_runs_are_safe() {
    let v = run_multi_preset(&load("sim2-caseB")).unwrap();
    assert_eq!(v.obstacles.len(), 3);
    assert!(v.min_estimated_distance >= v.separation, "{v:?}");
    let per_obstacle_min = v
        .obstacles
        .iter()
        .map(|o| o.min_estimated_distance)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(per_obstacle_min, v.min_estimated_distance);

    let coop = load("sim3-coop");
    let v = run_multi_preset(&coop).unwrap();
    assert!(!v.radius.bound.speed_condition_ok);
    assert!((v.radius.r_s - 14.14).abs() < 1e-12);
    assert!(!v.violated(), "{v:?}");
}

#[test]
fn multi_path_matches_single_path() {
    let cfg = load("sim1-caseB");
    let (_, single) = run_scenario(&cfg).unwrap();
    assert_eq!(run_multi_preset(&cfg).unwrap(), single);
}

#[test]
fn runs_are_deterministic() {
    for name in ["sim1-caseB", "sim3-coop"] {
        let cfg = load(name);
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(a, b);
    }
    let mut other = load("sim1-caseB");
    other.seed += 1;
    assert_ne!(run_scenario(&other).unwrap().0, run_scenario(&load("sim1-caseB")).unwrap().0);
}

#[test]
fn trace_covers_horizon_and_is_self_consistent() {
    for name in PRESET_NAMES {
        let cfg = load(name);
        let (trace, v) = run_scenario(&cfg).unwrap();
        assert_eq!(trace.len(), cfg.steps() + 1, "{name}");
        assert_eq!(trace[0].t, 0.0);
        assert!((trace.last().unwrap().t - cfg.duration_s).abs() < 1e-9);
        for rec in &trace {
            for (i, o) in rec.obstacles.iter().enumerate() {
                assert!((rec.e_o(i).norm() - o.dist_est).abs() <= 1e-12, "{name}");
                assert!((rec.uav.p - o.p).norm() == o.dist_true);
            }
        }
        assert_eq!(v.collision, v.min_true_distance < v.contact, "{name}");
        assert!(v.max_uav_speed <= cfg.uav.v_m_mps * (1.0 + 1e-6), "{name}");
    }
}

#[test]
fn expectation_state_starts_at_initial_obstacle() {
    let cfg = load("sim1-caseB");
    let (trace, _) = run_scenario(&cfg).unwrap();
    let first = &trace[0].obstacles[0];
    assert_eq!(first.xi_bar, first.xi);
    assert_eq!(first.lambda, Vec3::ZERO);
}

#[test]
fn proposition2_holds_on_case_b_trace() {
    let cfg = load("sim1-caseB");
    let (trace, _) = run_scenario(&cfg).unwrap();
    let r = cfg.uav.r_m_m + cfg.obstacles[0].r_o_m;
    let r_v = (cfg.uav.v_m_mps + cfg.obstacles[0].v_o_mps) / cfg.uav.l_per_s;
    let rep = verify_proposition2(&trace, r, r_v).unwrap();
    assert!(rep.premise_held && rep.implication_ok);

    let (multi, _) = run_scenario(&load("sim2-caseB")).unwrap();
    assert!(verify_proposition2(&multi, r, r_v).is_err());
}

#[test]
fn auto_radius_uses_the_bound() {
    let mut cfg = load("sim1-caseB");
    cfg.radii = RadiusChoice::Auto;
    let v = run_multi_preset(&cfg).unwrap();
    assert_eq!(v.radius.r_s, v.radius.bound.r_s_designed);
    assert!(!v.radius.below_bound);
}

#[test]
fn invalid_configs_list_every_problem() {
    let mut cfg = load("sim1-caseB");
    cfg.dt_s = 0.02;
    cfg.obstacles[0].theta = 0.5;
    cfg.obstacles[0].tau_d_s = 3.0;
    match run_scenario(&cfg) {
        Err(Error::InvalidConfig(errs)) => {
            assert!(errs.iter().any(|e| e.contains("dt_s")), "{errs:?}");
            assert!(errs.iter().any(|e| e.contains("theta")), "{errs:?}");
            assert!(errs.iter().any(|e| e.contains("tau_d_s")), "{errs:?}");
        }
        other => panic!("expected validation error, got {other:?}"),
    }

    let mut cfg = load("sim1-caseB");
    cfg.obstacles.clear();
    assert!(matches!(run_scenario(&cfg), Err(Error::InvalidConfig(_))));

    let mut cfg = load("sim1-caseB");
    cfg.obstacles[0].behavior = Behavior::Constant { velocity_mps: Vec3::X * 50.0 };
    assert!(matches!(run_scenario(&cfg), Err(Error::InvalidConfig(_))));

    let mut cfg = load("sim1-caseB");
    cfg.budget.t_s = 0.015;
    assert!(matches!(run_scenario(&cfg), Err(Error::InvalidConfig(_))));
}

#[test]
fn json_rejects_unknown_fields_and_garbage() {
    let mut json: serde_json::Value = serde_json::from_str(&load("exp2").to_json()).unwrap();
    json["surprise"] = serde_json::json!(1);
    assert!(ScenarioConfig::from_json(&json.to_string()).is_err());
    assert!(ScenarioConfig::from_json("{").is_err());
}

#[test]
fn finer_integration_step_agrees_with_default() {
    let cfg = load("sim1-caseA");
    let mut fine = cfg.clone();
    fine.dt_s = 0.005;
    let (_, coarse) = run_scenario(&cfg).unwrap();
    let (_, fine) = run_scenario(&fine).unwrap();
    assert!((coarse.min_true_distance - fine.min_true_distance).abs() < 0.05);
    assert!(!fine.violated());
}

#[test]
fn stated_radii_flag_only_shortfalls_beyond_rounding() {
    let exp2 = load("exp2").resolve_radius().unwrap();
    assert!(exp2.shortfall > 0.0 && !exp2.below_bound);
    let exp3 = load("exp3").resolve_radius().unwrap();
    assert!(exp3.shortfall > 0.01 && exp3.below_bound);
    let case_c = load("sim1-caseC").resolve_radius().unwrap();
    assert!(case_c.shortfall <= 0.0 && !case_c.below_bound);
}
