//! Record-measure Palm calculus under rescaling.
//!
//! The scale-invariant reference measure on the positive half-line is the
//! hyperbolic measure `kappa(ds) = H s^{H-1} ds`. Averaging a functional of
//! the rescaled path against the record measure and normalizing by
//! `kappa(A)` defines the Palm expectation; because `mu((0, t]) = M_t`,
//! sampling a record time from `mu` restricted to a window is sampling a
//! record level uniformly, and the induced importance weight is
//! `mu(A) / kappa(A)`. A weighted ensemble of such samples represents the
//! normalized Palm distribution, whose characteristic invariance
//! (mass-stationarity, and invariance under rescaling by the generalised
//! inverse of the record mass) is checked numerically here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathgen::{rescale, GridPath};
use crate::records::RecordProfile;
use crate::transform::battery_rescaled;

/// The measure `kappa(ds) = H s^{H-1} ds` with `kappa((a, b]) = b^H - a^H`.
/// It is, up to a constant, the only scale-invariant measure on `(0, inf)`:
/// `kappa(r A) = r^H kappa(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicMeasure {
    hurst: f64,
}

impl HyperbolicMeasure {
    pub fn new(hurst: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "hurst index must lie strictly inside (0, 1), got {hurst}"
            )));
        }
        Ok(Self { hurst })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// `kappa((a, b]) = b^H - a^H` for `0 <= a <= b`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if !a.is_finite() || !b.is_finite() || a < 0.0 || b < a {
            return Err(Error::InvalidConfig(format!(
                "hyperbolic mass needs 0 <= a <= b, got ({a}, {b}]"
            )));
        }
        Ok(b.powf(self.hurst) - a.powf(self.hurst))
    }
}

/// Scalar observables of a rescaled path, evaluated in constant time from the
/// source profile. `One` ignores the path entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    One,
    Endpoint,
    Sup,
    Avg,
    Alpha,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::One => "one",
            Observable::Endpoint => "endpoint",
            Observable::Sup => "sup",
            Observable::Avg => "avg",
            Observable::Alpha => "alpha",
        }
    }

    /// Value of the observable on `s_r X`, restricted to `[0, 1]`.
    pub fn eval_rescaled(
        &self,
        profile: &RecordProfile,
        r: f64,
        alpha_time: f64,
    ) -> Result<f64> {
        if *self == Observable::One {
            return Ok(1.0);
        }
        let b = battery_rescaled(profile, r, alpha_time)?;
        Ok(match self {
            Observable::One => unreachable!(),
            Observable::Endpoint => b.endpoint,
            Observable::Sup => b.sup,
            Observable::Avg => b.avg,
            Observable::Alpha => b.alpha,
        })
    }
}

/// Per-path inner integral of the refined Campbell average over `(a, b]`:
/// the record-increment-weighted mean of `g(s_r X)` times the window's
/// record mass. With `g = 1` this returns the record mass itself, exactly.
pub fn campbell_inner(
    profile: &RecordProfile,
    a: f64,
    b: f64,
    g: Observable,
    alpha_time: f64,
) -> Result<f64> {
    let mass = profile.record_mass(a, b)?;
    if g == Observable::One || mass <= 0.0 {
        return Ok(mass.max(0.0));
    }
    let mut sum_gw = 0.0;
    let mut sum_w = 0.0;
    for (r, w) in profile.record_increments(a, b)? {
        sum_gw += g.eval_rescaled(profile, r, alpha_time)? * w;
        sum_w += w;
    }
    if sum_w > 0.0 {
        Ok(sum_gw / sum_w * mass)
    } else {
        Ok(0.0)
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Ok(Self {
            mean,
            se: (var / n).sqrt(),
            n: samples.len(),
        })
    }
}

/// Monte Carlo estimate of the Palm average of `g` over the window `(a, b]`:
/// mean over the ensemble of the per-path inner integral, divided by
/// `kappa((a, b])`. With `g = 1` this estimates the intensity `E M_1` when
/// the window is `(0, 1]`.
pub fn campbell_estimate(
    profiles: &[RecordProfile],
    a: f64,
    b: f64,
    g: Observable,
    alpha_times: &[f64],
) -> Result<Estimate> {
    if profiles.is_empty() {
        return Err(Error::EmptySample);
    }
    let kappa = HyperbolicMeasure::new(profiles[0].path().hurst())?.mass(a, b)?;
    if kappa <= 0.0 {
        return Err(Error::InvalidConfig(
            "window carries no hyperbolic mass".into(),
        ));
    }
    let inners = profiles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let u = alpha_times.get(i).copied().unwrap_or(0.5);
            campbell_inner(p, a, b, g, u)
        })
        .collect::<Result<Vec<f64>>>()?;
    let est = Estimate::from_samples(&inners)?;
    Ok(Estimate {
        mean: est.mean / kappa,
        se: est.se / kappa,
        n: est.n,
    })
}

/// The scalars of one Palm draw: a record level `V` uniform on the window's
/// record-level range, the record time `r = T_V`, and the importance weight
/// `mu(A) / kappa(A)`.
#[derive(Debug, Clone, Copy)]
pub struct PalmDraw {
    pub level: f64,
    pub record_time: f64,
    pub weight: f64,
}

/// A window can carry no record mass, in which case the draw degenerates to
/// weight zero with no sample.
#[derive(Debug, Clone, Copy)]
pub enum PalmOutcome {
    Sample(PalmDraw),
    EmptyWindow,
}

/// Draws one record time from `mu` restricted to `(a, b]` using the uniform
/// variate `u` in `(0, 1]`: `V = M_a + u * (M_b - M_a)`, `r = T_V`.
pub fn palm_draw(profile: &RecordProfile, a: f64, b: f64, u: f64) -> Result<PalmOutcome> {
    debug_assert!(u > 0.0 && u <= 1.0);
    let mass = profile.record_mass(a, b)?;
    if mass <= 0.0 {
        return Ok(PalmOutcome::EmptyWindow);
    }
    let kappa = HyperbolicMeasure::new(profile.path().hurst())?.mass(a, b)?;
    let level = profile.max_at(a) + u * mass;
    let record_time = profile.first_passage(level)?;
    Ok(PalmOutcome::Sample(PalmDraw {
        level,
        record_time,
        weight: mass / kappa,
    }))
}

/// A rescaled path carrying its importance weight: one draw contributing to
/// the weighted ensemble that represents the Palm distribution.
#[derive(Debug, Clone)]
pub struct WeightedPathSample {
    pub path: GridPath,
    pub weight: f64,
    pub record_time: f64,
    pub level: f64,
}

/// Outcome of a materialized Palm sample. `Rejected` means the source horizon
/// cannot cover `record_time * out_horizon`; callers count it.
#[derive(Debug, Clone)]
pub enum PalmSampleOutcome {
    Sample(WeightedPathSample),
    EmptyWindow,
    Rejected { needed: f64 },
}

/// Materializes `s_r X` on the standard output grid for one Palm draw.
pub fn palm_sample(
    profile: &RecordProfile,
    a: f64,
    b: f64,
    u: f64,
    out_horizon: f64,
    out_steps: usize,
) -> Result<PalmSampleOutcome> {
    let draw = match palm_draw(profile, a, b, u)? {
        PalmOutcome::Sample(draw) => draw,
        PalmOutcome::EmptyWindow => return Ok(PalmSampleOutcome::EmptyWindow),
    };
    let needed = draw.record_time * out_horizon;
    if needed > profile.path().horizon() * (1.0 + 1e-12) {
        return Ok(PalmSampleOutcome::Rejected { needed });
    }
    let path = rescale(profile.path(), draw.record_time, out_horizon, out_steps)?;
    Ok(PalmSampleOutcome::Sample(WeightedPathSample {
        path,
        weight: draw.weight,
        record_time: draw.record_time,
        level: draw.level,
    }))
}

/// Test functions `g(Y, u)` for the mass-stationarity identity. `SupScaled`
/// depends on both arguments: `u^H * sup_{[0,1]} Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MsFunctional {
    One,
    Endpoint,
    SupScaled,
}

impl MsFunctional {
    pub fn name(&self) -> &'static str {
        match self {
            MsFunctional::One => "one",
            MsFunctional::Endpoint => "endpoint",
            MsFunctional::SupScaled => "sup-scaled",
        }
    }

    /// `g(s_r Y, u_arg)` evaluated from the profile of `Y`.
    fn eval(&self, y: &RecordProfile, r: f64, u_arg: f64) -> f64 {
        let hurst = y.path().hurst();
        match self {
            MsFunctional::One => 1.0,
            MsFunctional::Endpoint => r.powf(-hurst) * y.path().value_at(r),
            MsFunctional::SupScaled => u_arg.powf(hurst) * r.powf(-hurst) * y.max_at(r),
        }
    }
}

/// Both sides of the mass-stationarity identity for one path `Y` with record
/// measure `nu`:
/// left, the `kappa`-average over `u` in `C` of the `nu`-average of
/// `g(s_r Y, u r)` over `r` in `C/u`; right, the plain `kappa`-integral of
/// `g(Y, u)` over `C`.
#[derive(Debug, Clone, Copy)]
pub struct MassStationaritySides {
    pub lhs: f64,
    pub rhs: f64,
    /// Quadrature nodes whose inner window carried no record mass.
    pub degenerate_nodes: u64,
}

/// Evaluates both sides with a midpoint rule on a `kappa`-uniform grid of
/// `nodes` points over `C = (c1, c2]` (the substitution `xi = u^H` makes the
/// rule exact for integrands constant in `u`). The path must cover
/// `[0, c2/c1]` so every inner window and rescaling stays inside the horizon.
pub fn mass_stationarity_sides(
    y: &RecordProfile,
    c1: f64,
    c2: f64,
    nodes: usize,
    g: MsFunctional,
) -> Result<MassStationaritySides> {
    if !(c1 > 0.0 && c2 > c1) {
        return Err(Error::InvalidConfig(format!(
            "mass-stationarity window needs 0 < c1 < c2, got ({c1}, {c2}]"
        )));
    }
    if nodes == 0 {
        return Err(Error::InvalidConfig("need at least one quadrature node".into()));
    }
    let horizon = y.path().horizon();
    let needed = c2 / c1;
    if needed > horizon * (1.0 + 1e-12) || c2 > horizon * (1.0 + 1e-12) {
        return Err(Error::InsufficientHorizon {
            needed: needed.max(c2),
            available: horizon,
        });
    }
    let hurst = y.path().hurst();
    let xi_lo = c1.powf(hurst);
    let xi_hi = c2.powf(hurst);
    let d_xi = (xi_hi - xi_lo) / nodes as f64;

    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut degenerate = 0u64;
    for k in 0..nodes {
        let xi = xi_lo + (k as f64 + 0.5) * d_xi;
        let u = xi.powf(1.0 / hurst);
        rhs += g.eval(y, 1.0, u) * d_xi;

        let (lo, hi) = (c1 / u, c2 / u);
        let mut sum_gw = 0.0;
        let mut sum_w = 0.0;
        for (r, w) in y.record_increments(lo, hi)? {
            sum_gw += g.eval(y, r, u * r) * w;
            sum_w += w;
        }
        if sum_w > 0.0 {
            lhs += sum_gw / sum_w * d_xi;
        } else {
            degenerate += 1;
        }
    }
    Ok(MassStationaritySides {
        lhs,
        rhs,
        degenerate_nodes: degenerate,
    })
}
