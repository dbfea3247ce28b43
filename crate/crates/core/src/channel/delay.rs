use std::collections::VecDeque;

use crate::geometry::Vec3;

/// Time-indexed history of a broadcast signal, answering `x(t - tau)` queries by
/// linear interpolation. Samples older than the retention window are dropped.
#[derive(Debug, Clone)]
pub struct DelayBuffer {
    samples: VecDeque<(f64, Vec3)>,
    retention: f64,
}

impl DelayBuffer {
    /// `retention` is the longest delay that will be queried (s).
    pub fn new(retention: f64, t0: f64, x0: Vec3) -> Self {
        let mut samples = VecDeque::new();
        samples.push_back((t0, x0));
        DelayBuffer {
            samples,
            retention: retention.max(0.0),
        }
    }

    /// Append a sample; times must be non-decreasing.
    pub fn push(&mut self, t: f64, x: Vec3) {
        debug_assert!(self.latest().0 <= t, "samples must arrive in time order");
        self.samples.push_back((t, x));
        let horizon = t - self.retention;
        // keep one sample at or before the horizon so interpolation stays exact
        while self.samples.len() > 2 && self.samples[1].0 <= horizon {
            self.samples.pop_front();
        }
    }

    pub fn latest(&self) -> (f64, Vec3) {
        *self.samples.back().expect("buffer is never empty")
    }

    pub fn earliest(&self) -> (f64, Vec3) {
        *self.samples.front().expect("buffer is never empty")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `x(t - tau)`. Before the first sample the first sample is returned; after the
    /// latest the latest is returned.
    pub fn delayed_sample(&self, t: f64, tau: f64) -> Vec3 {
        self.at(t - tau)
    }

    pub fn at(&self, query: f64) -> Vec3 {
        let (t_first, x_first) = self.earliest();
        if query <= t_first {
            return x_first;
        }
        let (t_last, x_last) = self.latest();
        if query >= t_last {
            return x_last;
        }
        // first index with time > query; >= 1 because query > t_first
        let idx = self.samples.partition_point(|(ts, _)| *ts <= query);
        let (t0, x0) = self.samples[idx - 1];
        let (t1, x1) = self.samples[idx];
        if t1 <= t0 {
            return x1;
        }
        let w = (query - t0) / (t1 - t0);
        x0 + (x1 - x0) * w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(t: f64) -> Vec3 {
        Vec3::new(-5.0 * t, 0.0, 0.0)
    }

    #[test]
    fn zero_delay_returns_latest() {
        let mut b = DelayBuffer::new(1.0, 0.0, Vec3::ZERO);
        for n in 1..=50 {
            b.push(n as f64 * 0.01, Vec3::X * n as f64);
        }
        assert_eq!(b.delayed_sample(0.5, 0.0), Vec3::X * 50.0);
    }

    #[test]
    fn constant_signal_for_any_delay() {
        let c = Vec3::new(1.0, -2.0, 3.0);
        let mut b = DelayBuffer::new(2.0, 0.0, c);
        for n in 1..=300 {
            b.push(n as f64 * 0.01, c);
        }
        for tau in [0.0, 0.003, 0.5, 1.0, 1.999, 2.0, 5.0] {
            assert_eq!(b.delayed_sample(3.0, tau), c);
        }
    }

    #[test]
    fn linear_signal_is_reproduced_exactly() {
        let dt = 0.01;
        let mut b = DelayBuffer::new(1.0, 0.0, linear(0.0));
        for n in 1..=1000 {
            let t = n as f64 * dt;
            b.push(t, linear(t));
            if t >= 1.0 {
                let got = b.delayed_sample(t, 1.0);
                assert!(got.max_abs_diff(linear(t - 1.0)) < 1e-9, "t={t}");
                // off-grid delays interpolate between samples
                let got = b.delayed_sample(t, 0.4567);
                assert!(got.max_abs_diff(linear(t - 0.4567)) < 1e-9);
            }
        }
    }

    #[test]
    fn query_before_start_returns_initial_sample() {
        let mut b = DelayBuffer::new(2.0, 0.0, Vec3::new(39.0, 0.0, 100.0));
        b.push(0.01, Vec3::new(38.95, 0.0, 100.0));
        assert_eq!(b.delayed_sample(0.01, 1.0), Vec3::new(39.0, 0.0, 100.0));
    }

    #[test]
    fn retention_bounds_memory() {
        let dt = 0.01;
        let mut b = DelayBuffer::new(1.0, 0.0, Vec3::ZERO);
        for n in 1..=10_000 {
            b.push(n as f64 * dt, Vec3::X);
        }
        assert!(b.len() <= (1.0 / dt) as usize + 3, "len {}", b.len());
    }

    #[test]
    fn nonlinear_interpolation_error_is_bounded_by_speed_times_step() {
        // circle of radius 10 traversed at 5 m/s
        let speed = 5.0;
        let omega = speed / 10.0;
        let f = |t: f64| Vec3::new(10.0 * (omega * t).cos(), 10.0 * (omega * t).sin(), 0.0);
        let dt = 0.01;
        let mut b = DelayBuffer::new(1.5, 0.0, f(0.0));
        let mut worst: f64 = 0.0;
        for n in 1..=2000 {
            let t = n as f64 * dt;
            b.push(t, f(t));
            if t > 1.5 {
                for tau in [0.123, 0.5, 1.0, 1.4999] {
                    worst = worst.max((b.delayed_sample(t, tau) - f(t - tau)).norm());
                }
            }
        }
        assert!(worst <= speed * dt, "{worst}");
    }
}
