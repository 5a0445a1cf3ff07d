//! Sample paths of H-self-similar processes on uniform time grids.
//!
//! All generators are normalized so that `Var(X_1) = 1` and all paths start
//! at zero. Generation is pure in `(config, seed)`: the same configuration
//! yields the bit-identical path, and a longer run of the same seed agrees
//! with a shorter one on the common prefix (the property `extend` relies on).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fgn;

/// A path sampled at times `i * delta`, `i = 0..=steps`, carrying the Hurst
/// index of the process that produced it.
///
/// Evaluation between grid points is linear interpolation; every transform in
/// this crate resamples through [`GridPath::value_at`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    delta: f64,
    values: Vec<f64>,
    hurst: f64,
}

impl GridPath {
    pub fn new(delta: f64, values: Vec<f64>, hurst: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidPath(format!(
                "delta must be a positive real, got {delta}"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidPath(
                "a path needs at least two grid values".into(),
            ));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidPath(format!(
                "paths start at zero, got {}",
                values[0]
            )));
        }
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::InvalidPath(format!(
                "hurst index must lie strictly inside (0, 1), got {hurst}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPath("path contains a non-finite value".into()));
        }
        Ok(Self {
            delta,
            values,
            hurst,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of grid cells (`values` has `steps + 1` entries).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.steps() as f64 * self.delta
    }

    /// Linearly interpolated path value. `t` must lie in `[0, horizon]`
    /// (a relative slack of a few ulps is tolerated at the right end).
    pub fn value_at(&self, t: f64) -> f64 {
        let pos = t / self.delta;
        debug_assert!(
            t >= 0.0 && pos <= self.steps() as f64 * (1.0 + 1e-12) + 1e-12,
            "time {t} outside [0, {}]",
            self.horizon()
        );
        let idx = pos as usize;
        if idx >= self.steps() {
            return self.values[self.steps()];
        }
        // v0 + u * (v1 - v0) is exact at grid points and monotone in u.
        let u = pos - idx as f64;
        self.values[idx] + u * (self.values[idx + 1] - self.values[idx])
    }
}

/// The process families the generator knows how to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    /// Standard Brownian motion (forces `hurst = 1/2`).
    Brownian,
    /// Fractional Brownian motion with covariance
    /// `(s^{2H} + t^{2H} - |t-s|^{2H}) / 2`.
    Fbm,
    /// The deterministic path `t -> t^H`, the fixed point of the rescaling
    /// group.
    DeterministicPower,
}

impl ProcessKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProcessKind::Brownian => "brownian",
            ProcessKind::Fbm => "fbm",
            ProcessKind::DeterministicPower => "deterministic-power",
        }
    }
}

impl std::fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brownian" => Ok(ProcessKind::Brownian),
            "fbm" => Ok(ProcessKind::Fbm),
            "deterministic-power" => Ok(ProcessKind::DeterministicPower),
            other => Err(Error::InvalidConfig(format!(
                "unknown process kind `{other}` (expected brownian | fbm | deterministic-power)"
            ))),
        }
    }
}

/// Everything needed to reproduce one sample path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: ProcessKind,
    pub hurst: f64,
    pub horizon: f64,
    pub steps: usize,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn brownian(horizon: f64, steps: usize, seed: u64) -> Self {
        Self {
            kind: ProcessKind::Brownian,
            hurst: 0.5,
            horizon,
            steps,
            seed,
        }
    }

    pub fn fbm(hurst: f64, horizon: f64, steps: usize, seed: u64) -> Self {
        Self {
            kind: ProcessKind::Fbm,
            hurst,
            horizon,
            steps,
            seed,
        }
    }

    pub fn deterministic_power(hurst: f64, horizon: f64, steps: usize, seed: u64) -> Self {
        Self {
            kind: ProcessKind::DeterministicPower,
            hurst,
            horizon,
            steps,
            seed,
        }
    }

    pub fn delta(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "hurst index must lie strictly inside (0, 1), got {}",
                self.hurst
            )));
        }
        if self.kind == ProcessKind::Brownian && self.hurst != 0.5 {
            return Err(Error::InvalidConfig(format!(
                "brownian paths force hurst = 1/2, got {}",
                self.hurst
            )));
        }
        Ok(())
    }
}

/// Samples one path from the configured process.
pub fn generate(config: &GeneratorConfig) -> Result<GridPath> {
    config.validate()?;
    let delta = config.delta();
    match config.kind {
        ProcessKind::Brownian => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let step_sd = delta.sqrt();
            let mut values = Vec::with_capacity(config.steps + 1);
            values.push(0.0);
            let mut x = 0.0;
            for _ in 0..config.steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                x += step_sd * z;
                values.push(x);
            }
            GridPath::new(delta, values, 0.5)
        }
        ProcessKind::DeterministicPower => {
            let values = (0..=config.steps)
                .map(|i| (i as f64 * delta).powf(config.hurst))
                .collect();
            GridPath::new(delta, values, config.hurst)
        }
        ProcessKind::Fbm => fgn::sample_auto(config),
    }
}

/// The rescaling-group action `(s_r f)(t) = r^{-H} f(rt)`, resampled onto a
/// caller-specified output grid by linear interpolation.
///
/// Requires `r * out_horizon <= horizon`; this never extrapolates.
pub fn rescale(path: &GridPath, r: f64, out_horizon: f64, out_steps: usize) -> Result<GridPath> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "rescaling factor must be positive, got {r}"
        )));
    }
    if !out_horizon.is_finite() || out_horizon <= 0.0 || out_steps == 0 {
        return Err(Error::InvalidConfig(
            "output grid needs a positive horizon and at least one step".into(),
        ));
    }
    let needed = r * out_horizon;
    let available = path.horizon();
    if needed > available * (1.0 + 1e-12) {
        return Err(Error::InsufficientHorizon { needed, available });
    }
    let scale = r.powf(-path.hurst());
    let out_delta = out_horizon / out_steps as f64;
    let values = (0..=out_steps)
        .map(|j| {
            let t = r * (j as f64 * out_delta);
            scale * path.value_at(t.min(available))
        })
        .collect();
    GridPath::new(out_delta, values, path.hurst())
}

/// Continues a path to a longer horizon on the same grid, reproducibly from
/// the generating config. The returned path agrees bit-exactly with the input
/// on the original grid.
///
/// Fractional Brownian motion cannot be continued without conditioning on the
/// whole history, so `kind = fbm` is rejected; callers handle fBm by fixing a
/// large horizon up front and rejecting unusable paths.
pub fn extend(path: &GridPath, config: &GeneratorConfig, new_horizon: f64) -> Result<GridPath> {
    config.validate()?;
    if config.kind == ProcessKind::Fbm {
        return Err(Error::UnsupportedExtension { kind: "fbm" });
    }
    if !new_horizon.is_finite() || new_horizon <= path.horizon() {
        return Err(Error::InvalidConfig(format!(
            "new horizon {new_horizon} must exceed the current horizon {}",
            path.horizon()
        )));
    }
    if config.delta() != path.delta() || config.hurst != path.hurst() {
        return Err(Error::InvalidConfig(
            "config does not match the grid of the path being extended".into(),
        ));
    }
    let delta = path.delta();
    // Keep the grid spacing; round the horizon up to a whole number of steps.
    let ratio = new_horizon / delta;
    let new_steps = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let extended = generate(&GeneratorConfig {
        horizon: new_steps as f64 * delta,
        steps: new_steps,
        ..*config
    })?;
    if extended.values[..path.values.len()] != path.values[..] {
        return Err(Error::InvalidConfig(
            "config does not reproduce the path being extended".into(),
        ));
    }
    Ok(extended)
}
