use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::run::TraceRecord;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::radius::proposition2_threshold;

/// One-sample Kolmogorov-Smirnov statistic against a normal with the sample mean and variance.
pub fn ks_statistic(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < 30 {
        return Err(Error::InsufficientData { needed: 30, got: n });
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let normal = Normal::new(mean, var.sqrt()).map_err(|_| Error::DegenerateVariance)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    Ok(d)
}

/// 5% critical value of the KS statistic for large `n`.
pub fn ks_critical_5pct(n: usize) -> f64 {
    1.36 / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop2Report {
    /// `|p~(0)| >= r` and the filtered distance stayed above the threshold for the whole run.
    pub premise_held: bool,
    /// Samples on which the implication was checked.
    pub checked: usize,
    pub min_true: f64,
    pub min_filtered: f64,
    pub implication_ok: bool,
}

/// Checks "filtered distance above `sqrt(r^2 + r_v^2)` since the start implies true distance
/// at least `r`" on a sequence of `(true, filtered)` distance pairs.
pub fn check_proposition2(pairs: &[(f64, f64)], r: f64, r_v: f64) -> Prop2Report {
    let threshold = proposition2_threshold(r, r_v);
    let mut report = Prop2Report {
        premise_held: false,
        checked: 0,
        min_true: f64::INFINITY,
        min_filtered: f64::INFINITY,
        implication_ok: true,
    };
    let Some(&(p0, _)) = pairs.first() else {
        return report;
    };
    let mut premise = p0 >= r;
    for &(p, f) in pairs {
        report.min_true = report.min_true.min(p);
        report.min_filtered = report.min_filtered.min(f);
        premise &= f >= threshold;
        if premise {
            report.checked += 1;
            if p < r * (1.0 - 1e-6) {
                report.implication_ok = false;
            }
        }
    }
    report.premise_held = premise;
    report
}

/// [`check_proposition2`] on a single-obstacle trace; the trace must hold exactly one obstacle.
pub fn verify_proposition2(trace: &[TraceRecord], r: f64, r_v: f64) -> Result<Prop2Report> {
    if trace.iter().any(|rec| rec.obstacles.len() != 1) {
        return Err(Error::Precondition("trace must contain exactly one obstacle".into()));
    }
    let pairs: Vec<(f64, f64)> = trace
        .iter()
        .map(|rec| (rec.obstacles[0].dist_true, rec.obstacles[0].dist_filtered))
        .collect();
    Ok(check_proposition2(&pairs, r, r_v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstructionRun {
    pub min_true: f64,
    /// Largest deviation of the filtered distance from its prescribed value.
    pub filtered_drift: f64,
    pub max_uav_speed: f64,
    pub max_obstacle_speed: f64,
}

/// Flies the UAV and obstacle with anti-parallel velocities of norms `v_m` and `v_o` so that
/// the filtered distance stays at `sqrt(r^2 + r_v^2 - eps_o)`, starting from true distance
/// `r + 0.9 r_v`. `eps_o = 0` is the tight case; `eps_o > 0` goes below the threshold.
pub fn proposition2_construction(
    r: f64,
    v_m: f64,
    v_o: f64,
    l: f64,
    eps_o: f64,
    duration: f64,
    dt: f64,
) -> Result<ConstructionRun> {
    crate::error::require_positive("r", r)?;
    crate::error::require_positive("l", l)?;
    crate::error::require_positive("dt", dt)?;
    crate::error::require_non_negative("eps_o", eps_o)?;
    let speed = v_m + v_o;
    crate::error::require_positive("v_m + v_o", speed)?;
    let r_v = speed / l;
    if eps_o >= r * r {
        return Err(Error::Precondition("eps_o must be below r^2".into()));
    }
    let target = r * r - eps_o;

    // relative velocity of norm l r_v whose radial part drives |p~|^2 toward `target`
    let rel_velocity = |pt: Vec3| -> Vec3 {
        let p = pt.norm_squared();
        let d = p.sqrt();
        let radial_dir = pt / d;
        let radial = (l * (target - p) / (2.0 * d)).clamp(-speed, speed);
        let tangential = (speed * speed - radial * radial).max(0.0).sqrt();
        let side = radial_dir.cross(Vec3::Z).normalized().unwrap_or(Vec3::Y);
        radial_dir * radial + side * tangential
    };

    let mut p = Vec3::new(r + 0.9 * r_v, 0.0, 0.0);
    let mut p_o = Vec3::ZERO;
    let split = |vt: Vec3| (vt * (v_m / speed), vt * (-v_o / speed));
    let mut run = ConstructionRun {
        min_true: f64::INFINITY,
        filtered_drift: 0.0,
        max_uav_speed: 0.0,
        max_obstacle_speed: 0.0,
    };
    let prescribed = (target + r_v * r_v).sqrt();
    let steps = (duration / dt).ceil() as usize;
    for _ in 0..=steps {
        let pt = p - p_o;
        let vt = rel_velocity(pt);
        let (v, vo) = split(vt);
        let xi_t = pt + vt / l;
        run.min_true = run.min_true.min(pt.norm());
        run.filtered_drift = run.filtered_drift.max((xi_t.norm() - prescribed).abs());
        run.max_uav_speed = run.max_uav_speed.max(v.norm());
        run.max_obstacle_speed = run.max_obstacle_speed.max(vo.norm());

        // RK4 on the pair of positions
        let f = |p: Vec3, p_o: Vec3| split(rel_velocity(p - p_o));
        let (k1, k1o) = f(p, p_o);
        let (k2, k2o) = f(p + k1 * (dt / 2.0), p_o + k1o * (dt / 2.0));
        let (k3, k3o) = f(p + k2 * (dt / 2.0), p_o + k2o * (dt / 2.0));
        let (k4, k4o) = f(p + k3 * dt, p_o + k3o * dt);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        p_o += (k1o + k2o * 2.0 + k3o * 2.0 + k4o) * (dt / 6.0);
    }
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Bounds {
    pub k_min: f64,
    pub k_max: f64,
    pub y_max: f64,
    pub v_y_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub max_norm: f64,
    pub norm_bound: f64,
    pub norm_ok: bool,
    pub max_rate: f64,
    /// Present only when `|x(0) - y(0)| <= v_y_max / k_min`.
    pub rate_bound: Option<f64>,
    pub rate_ok: bool,
}

impl Lemma2Report {
    pub fn passed(&self) -> bool {
        self.norm_ok && self.rate_ok
    }
}

const LEMMA2_TOL: f64 = 1e-6;

/// Integrates `x' = -k(t) (x - y(t))` with RK4 and checks the norm and rate bounds.
pub fn verify_lemma2(
    k: impl Fn(f64) -> f64,
    y: impl Fn(f64) -> Vec3,
    x0: Vec3,
    bounds: Lemma2Bounds,
    duration: f64,
    dt: f64,
) -> Result<Lemma2Report> {
    let Lemma2Bounds {
        k_min,
        k_max,
        y_max,
        v_y_max,
    } = bounds;
    if !(k_min > 0.0 && k_min <= k_max) {
        return Err(Error::Precondition("need 0 < k_min <= k_max".into()));
    }
    if !(y_max >= 0.0 && v_y_max >= 0.0) {
        return Err(Error::Precondition("bounds on y must be non-negative".into()));
    }
    if x0.norm() > y_max {
        return Err(Error::Precondition("|x(0)| must not exceed y_max".into()));
    }
    crate::error::require_positive("dt", dt)?;

    let rate_bound = ((x0 - y(0.0)).norm() <= v_y_max / k_min).then(|| k_max / k_min * v_y_max);
    let rhs = |t: f64, x: Vec3| (y(t) - x) * k(t);
    let mut x = x0;
    let mut max_norm = x.norm();
    let mut max_rate: f64 = 0.0;
    let steps = (duration / dt).ceil() as usize;
    for n in 0..=steps {
        let t = n as f64 * dt;
        let kt = k(t);
        let yt = y(t);
        if kt < k_min * (1.0 - 1e-12) || kt > k_max * (1.0 + 1e-12) || yt.norm() > y_max * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!("profile leaves its bounds at t = {t}")));
        }
        max_norm = max_norm.max(x.norm());
        max_rate = max_rate.max(rhs(t, x).norm());
        if n == steps {
            break;
        }
        let k1 = rhs(t, x);
        let k2 = rhs(t + dt / 2.0, x + k1 * (dt / 2.0));
        let k3 = rhs(t + dt / 2.0, x + k2 * (dt / 2.0));
        let k4 = rhs(t + dt, x + k3 * dt);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    Ok(Lemma2Report {
        max_norm,
        norm_bound: y_max,
        norm_ok: max_norm <= y_max * (1.0 + LEMMA2_TOL),
        max_rate,
        rate_bound,
        rate_ok: rate_bound.is_none_or(|b| max_rate <= b * (1.0 + LEMMA2_TOL)),
    })
}
