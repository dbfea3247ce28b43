//! Deterministic scenario runs and the numerical checks built on them.

mod checks;
mod config;
mod run;

pub use checks::{
    check_proposition2, ks_critical_5pct, ks_statistic, proposition2_construction, verify_lemma2,
    verify_proposition2, ConstructionRun, Lemma2Bounds, Lemma2Report, Prop2Report,
};
pub use config::{
    Behavior, ControllerConfig, ObstacleConfig, RadiusChoice, ResolvedRadius, ScenarioConfig, UavConfig,
    RADIUS_ROUNDING,
};
pub use run::{
    run_multi_preset, run_scenario, ObstacleSample, ObstacleVerdict, RunVerdict, TraceRecord, UavSample,
};
