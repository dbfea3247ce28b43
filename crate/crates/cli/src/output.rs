use std::io::Write;

use sepradius::radius::RadiusReport;
use sepradius::sim::{ResolvedRadius, RunVerdict, ScenarioConfig, TraceRecord};
use sepradius::Vec3;
use serde::Serialize;

/// Column names of the trace CSV for `n_obstacles` obstacles.
pub fn csv_header(n_obstacles: usize) -> Vec<String> {
    let mut cols = vec!["t_s".to_string()];
    let vec_cols = |cols: &mut Vec<String>, prefix: &str| {
        for axis in ["x", "y", "z"] {
            cols.push(format!("{prefix}_{axis}"));
        }
    };
    for q in ["p", "v", "xi", "xi_hat", "vc"] {
        vec_cols(&mut cols, &format!("uav_{q}"));
    }
    for i in 1..=n_obstacles {
        for q in ["p", "v", "xi", "xi_bar", "xi_hat", "lambda"] {
            vec_cols(&mut cols, &format!("o{i}_{q}"));
        }
    }
    for i in 1..=n_obstacles {
        for q in ["dist_true", "dist_filtered", "dist_est"] {
            cols.push(format!("o{i}_{q}"));
        }
    }
    cols.extend(["min_dist_true", "min_dist_filtered", "min_dist_est"].map(String::from));
    for i in 1..=n_obstacles {
        for q in ["viol_est", "collision", "thm1_applicable", "thm1_violated"] {
            cols.push(format!("o{i}_{q}"));
        }
    }
    cols
}

fn num(x: f64) -> String {
    format!("{x:.8e}")
}

fn push_vec(row: &mut Vec<String>, v: Vec3) {
    row.extend(v.to_array().map(num));
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

pub fn csv_row(rec: &TraceRecord) -> Vec<String> {
    let mut row = vec![num(rec.t)];
    let u = &rec.uav;
    for v in [u.p, u.v, u.xi, u.xi_hat, u.v_c] {
        push_vec(&mut row, v);
    }
    for o in &rec.obstacles {
        for v in [o.p, o.v, o.xi, o.xi_bar, o.xi_hat, o.lambda] {
            push_vec(&mut row, v);
        }
    }
    for o in &rec.obstacles {
        row.extend([o.dist_true, o.dist_filtered, o.dist_est].map(num));
    }
    row.extend([rec.min_true(), rec.min_filtered(), rec.min_est()].map(num));
    for o in &rec.obstacles {
        row.extend([o.viol_est, o.collision, o.thm1_applicable, o.thm1_violated].map(flag));
    }
    row
}

pub fn write_trace<W: Write>(out: W, trace: &[TraceRecord]) -> csv::Result<()> {
    let n = trace.first().map_or(0, |r| r.obstacles.len());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(n))?;
    for rec in trace {
        w.write_record(csv_row(rec))?;
    }
    w.flush()?;
    Ok(())
}

fn opt_time(t: Option<f64>) -> String {
    t.map_or_else(|| "none".to_string(), |t| format!("{t:.2} s"))
}

pub fn verdict_text(cfg: &ScenarioConfig, v: &RunVerdict) -> String {
    let mut s = String::new();
    let name = cfg.name.as_deref().unwrap_or("custom");
    s += &format!("scenario            {name}\n");
    s += &format!("seed                {}\n", cfg.seed);
    s += &format!("duration / dt       {} s / {} s\n", cfg.duration_s, cfg.dt_s);
    s += &format!("obstacles           {}\n\n", v.obstacles.len());
    s += &format!("safety radius r_s   {:.4} m (lower bound {:.4} m{})\n", v.radius.r_s, v.radius.bound.r_s_designed, if v.radius.below_bound { ", BELOW BOUND" } else { "" });
    s += &format!("speed condition     {}\n", if v.radius.bound.speed_condition_ok { "holds" } else { "fails" });
    s += &format!("r_s + r_o           {:.4} m\n", v.separation);
    s += &format!("r_m + r_o           {:.4} m\n\n", v.contact);
    s += &format!("min estimated dist  {:.4} m\n", v.min_estimated_distance);
    s += &format!("min filtered dist   {:.4} m\n", v.min_filtered_distance);
    s += &format!("min true dist       {:.4} m\n", v.min_true_distance);
    s += &format!("first violation     {}\n", opt_time(v.first_violation_time));
    s += &format!("collision           {}\n", if v.collision { "yes" } else { "no" });
    s += &format!("max UAV speed       {:.4} m/s\n", v.max_uav_speed);
    s += &format!("boundary monitor    {} shell samples, {} violations\n\n", v.monitor_samples(), v.monitor_violations());
    for (i, o) in v.obstacles.iter().enumerate() {
        s += &format!(
            "obstacle {}: est {:.4}  filt {:.4}  true {:.4}  violation {}  collision {}  lag {:.4}/{:.4}  monitor {}/{}\n",
            i + 1,
            o.min_estimated_distance,
            o.min_filtered_distance,
            o.min_true_distance,
            opt_time(o.first_violation_time),
            if o.collision { "yes" } else { "no" },
            o.max_lambda,
            o.lambda_bound,
            o.monitor_violations,
            o.monitor_samples,
        );
    }
    s += &format!("\nresult              {}\n", if v.violated() { "VIOLATION" } else { "SAFE" });
    s
}

#[derive(Serialize)]
pub struct VerdictDoc<'a> {
    pub scenario: &'a str,
    pub seed: u64,
    pub safe: bool,
    pub verdict: &'a RunVerdict,
}

pub fn verdict_json(cfg: &ScenarioConfig, v: &RunVerdict) -> String {
    let doc = VerdictDoc {
        scenario: cfg.name.as_deref().unwrap_or("custom"),
        seed: cfg.seed,
        safe: !v.violated(),
        verdict: v,
    };
    serde_json::to_string_pretty(&doc).expect("verdict serializes")
}

#[derive(Serialize)]
pub struct RadiusDoc<'a> {
    pub report: &'a RadiusReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stated: Option<&'a ResolvedRadius>,
}

pub fn radius_text(report: &RadiusReport, stated: Option<&ResolvedRadius>) -> String {
    let mut s = String::new();
    s += &format!("r_v (maneuver)          {:.5} m\n", report.r_v);
    s += &format!("r_e (uncertainty)       {:.5} m\n", report.r_e);
    s += &format!("r_s designed (>=)       {:.5} m\n", report.r_s_designed);
    s += &format!("r_s practical (>=)      {:.5} m\n", report.r_s_practical);
    s += &format!(
        "speed condition         {}\n",
        if report.speed_condition_ok { "holds" } else { "fails" }
    );
    if let Some(r) = stated {
        s += &format!(
            "scenario r_s            {:.5} m{}\n",
            r.r_s,
            if r.below_bound {
                " (below the lower bound)"
            } else if r.shortfall > 0.0 {
                " (bound rounded to two decimals)"
            } else {
                ""
            }
        );
    }
    s
}
