//! Running maxima, record masses and first-passage times.
//!
//! For a path `X` the running maximum `M_t = sup_{s <= t} X_s` carries the
//! record measure through `mu((0, t]) = M_t`, and the first-passage map
//! `T_x = inf{t : X_t = x}` is the generalised inverse of `M`. A
//! [`RecordProfile`] precomputes the grid running maximum and the prefix
//! integral of the interpolant so that rescaled-path functionals evaluate in
//! constant time.

use crate::error::{Error, Result};
use crate::pathgen::GridPath;

/// Immutable record structure of one grid path.
#[derive(Debug, Clone)]
pub struct RecordProfile {
    path: GridPath,
    running_max: Vec<f64>,
    /// Trapezoid integral of the interpolant up to each grid point.
    prefix_area: Vec<f64>,
}

impl RecordProfile {
    pub fn new(path: GridPath) -> Self {
        let values = path.values();
        let delta = path.delta();
        let mut running_max = Vec::with_capacity(values.len());
        let mut prefix_area = Vec::with_capacity(values.len());
        let mut max = values[0];
        let mut area = 0.0;
        running_max.push(max);
        prefix_area.push(area);
        for w in values.windows(2) {
            max = max.max(w[1]);
            area += 0.5 * delta * (w[0] + w[1]);
            running_max.push(max);
            prefix_area.push(area);
        }
        Self {
            path,
            running_max,
            prefix_area,
        }
    }

    pub fn path(&self) -> &GridPath {
        &self.path
    }

    pub fn running_max(&self) -> &[f64] {
        &self.running_max
    }

    /// Linearly interpolated running maximum at time `t`.
    pub fn max_at(&self, t: f64) -> f64 {
        interpolate(&self.running_max, self.path.delta(), t)
    }

    /// Exact integral of the piecewise-linear interpolant over `[0, t]`.
    pub fn integral_at(&self, t: f64) -> f64 {
        let delta = self.path.delta();
        let pos = t / delta;
        let idx = (pos as usize).min(self.path.steps());
        let u = pos - idx as f64;
        if u <= 0.0 || idx >= self.path.steps() {
            return self.prefix_area[idx];
        }
        let v0 = self.path.values()[idx];
        let v1 = self.path.values()[idx + 1];
        let vt = v0 + u * (v1 - v0);
        self.prefix_area[idx] + 0.5 * (u * delta) * (v0 + vt)
    }

    /// Record mass `mu((a, b]) = M_b - M_a` of the window. Endpoints need not
    /// be grid points; `M` is interpolated.
    pub fn record_mass(&self, a: f64, b: f64) -> Result<f64> {
        self.check_window(a, b)?;
        Ok((self.max_at(b) - self.max_at(a)).max(0.0))
    }

    /// First-passage time of `level`: the first grid index `i` with
    /// `X_i >= level`, linearly interpolated inside the crossing cell. Levels
    /// that sit exactly on a grid value resolve to the earliest such index.
    pub fn first_passage(&self, level: f64) -> Result<f64> {
        if !level.is_finite() || level <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "passage level must be positive, got {level}"
            )));
        }
        let idx = self.running_max.partition_point(|m| *m < level);
        if idx == self.running_max.len() {
            return Err(Error::PassageNotReached {
                level,
                max_at_horizon: *self.running_max.last().unwrap(),
            });
        }
        // First index with M_i >= level is also the first with X_i >= level:
        // the maximum is renewed there because M_{i-1} < level.
        let values = self.path.values();
        debug_assert!(idx > 0 && values[idx] >= level);
        let frac = (level - values[idx - 1]) / (values[idx] - values[idx - 1]);
        Ok(((idx - 1) as f64 + frac) * self.path.delta())
    }

    /// Grid record increments of `M` clipped to the window `(a, b]`, as
    /// `(time, mass)` pairs. The time reported for a cell is its right end
    /// clipped to `b`.
    pub fn record_increments(&self, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
        self.check_window(a, b)?;
        let delta = self.path.delta();
        let first = (a / delta) as usize;
        let last = ((b / delta).ceil() as usize).min(self.path.steps());
        let mut out = Vec::new();
        let mut prev_level = self.max_at(a);
        for i in first + 1..=last {
            let t = (i as f64 * delta).min(b);
            let level = self.max_at(t);
            let mass = level - prev_level;
            if mass > 0.0 {
                out.push((t, mass));
            }
            prev_level = level;
        }
        Ok(out)
    }

    fn check_window(&self, a: f64, b: f64) -> Result<()> {
        if !a.is_finite() || !b.is_finite() || a < 0.0 || b < a {
            return Err(Error::InvalidConfig(format!(
                "window must satisfy 0 <= a <= b, got ({a}, {b}]"
            )));
        }
        let horizon = self.path.horizon();
        if b > horizon * (1.0 + 1e-12) {
            return Err(Error::OutOfRange {
                what: "window end",
                requested: b,
                limit: horizon,
            });
        }
        Ok(())
    }
}

fn interpolate(values: &[f64], delta: f64, t: f64) -> f64 {
    let pos = t / delta;
    let idx = pos as usize;
    if idx + 1 >= values.len() {
        return *values.last().unwrap();
    }
    // v0 + u * (v1 - v0) is exact at grid points and monotone in u, so the
    // interpolated running maximum stays nondecreasing in floating point.
    let u = pos - idx as f64;
    values[idx] + u * (values[idx + 1] - values[idx])
}
