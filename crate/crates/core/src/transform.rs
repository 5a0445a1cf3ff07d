//! Path transformations built on first-passage rescaling.
//!
//! The central object is the co-ascent of a path: rescale space-time by the
//! first-passage time of a level, `t -> T_x^{-H} X(T_x t)`, so that the
//! transformed path reaches level `x * T_x^{-H}` at time 1 and attains its
//! running maximum there. The exponential rescaling
//! `(L f)(z) = e^{-Hz} f(e^z)` maps self-similar paths to stationary
//! sequences on a log-time grid; combined with the running maximum it yields
//! the nonpositive excursion-from-maximum picture.

use crate::error::{Error, Result};
use crate::pathgen::{rescale, GridPath};
use crate::records::RecordProfile;

/// A co-ascent path together with the passage time that produced it.
#[derive(Debug, Clone)]
pub struct CoAscentResult {
    /// The rescaled path on `[0, out_horizon]`.
    pub path: GridPath,
    /// The first-passage time consumed by the rescaling.
    pub passage_time: f64,
    /// The hitting level.
    pub level: f64,
}

/// Co-ascent of the profiled path at `level`, materialized on the requested
/// output grid. Needs `passage_time * out_horizon` within the source horizon.
pub fn coascent(
    profile: &RecordProfile,
    level: f64,
    out_horizon: f64,
    out_steps: usize,
) -> Result<CoAscentResult> {
    if out_horizon < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "co-ascent output horizon must be at least 1, got {out_horizon}"
        )));
    }
    let passage_time = profile.first_passage(level)?;
    let path = rescale(profile.path(), passage_time, out_horizon, out_steps)?;
    Ok(CoAscentResult {
        path,
        passage_time,
        level,
    })
}

/// Co-ascent applied to a co-ascent path. The records of the rescaled path
/// are the records of the source renormalized by the first passage time, so
/// this shares the source's law.
pub fn iterated_coascent(
    result: &CoAscentResult,
    level: f64,
    out_horizon: f64,
    out_steps: usize,
) -> Result<CoAscentResult> {
    let profile = RecordProfile::new(result.path.clone());
    coascent(&profile, level, out_horizon, out_steps)
}

/// A sequence over a uniform log-time grid `z_j = z_start + j * z_step`.
#[derive(Debug, Clone)]
pub struct StationarySeries {
    pub z_start: f64,
    pub z_step: f64,
    pub values: Vec<f64>,
}

impl StationarySeries {
    pub fn z_at(&self, j: usize) -> f64 {
        self.z_start + j as f64 * self.z_step
    }
}

/// Exponential rescaling `(L f)(z) = e^{-Hz} f(e^z)` on a uniform `z`-grid.
///
/// Requires `e^{z_max} <= horizon` and `e^{z_min} >= delta` so the evaluation
/// never touches the first cell or extrapolates.
pub fn lamperti(
    path: &GridPath,
    z_min: f64,
    z_max: f64,
    z_steps: usize,
) -> Result<StationarySeries> {
    if z_steps == 0 || !(z_max > z_min) {
        return Err(Error::InvalidConfig(
            "log-time grid needs z_max > z_min and at least one step".into(),
        ));
    }
    let horizon = path.horizon();
    if z_max.exp() > horizon * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "exp(z_max)",
            requested: z_max.exp(),
            limit: horizon,
        });
    }
    if z_min.exp() < path.delta() * (1.0 - 1e-12) {
        return Err(Error::OutOfRange {
            what: "exp(z_min)",
            requested: z_min.exp(),
            limit: path.delta(),
        });
    }
    let hurst = path.hurst();
    let z_step = (z_max - z_min) / z_steps as f64;
    let values = (0..=z_steps)
        .map(|j| {
            let z = z_min + j as f64 * z_step;
            (-hurst * z).exp() * path.value_at(z.exp().min(horizon))
        })
        .collect();
    Ok(StationarySeries {
        z_start: z_min,
        z_step,
        values,
    })
}

/// The excursion-from-maximum sequence `U(z) = (L X)(z) - (L M)(z)`, computed
/// as `L(X - M)` (the rescaling is linear). All values are nonpositive up to
/// interpolation tolerance.
pub fn excursion_from_max(
    profile: &RecordProfile,
    z_min: f64,
    z_max: f64,
    z_steps: usize,
) -> Result<StationarySeries> {
    let path = profile.path();
    let diff: Vec<f64> = path
        .values()
        .iter()
        .zip(profile.running_max())
        .map(|(x, m)| x - m)
        .collect();
    let diff_path = GridPath::new(path.delta(), diff, path.hurst())?;
    lamperti(&diff_path, z_min, z_max, z_steps)
}

/// The registered scalar functionals of a path restricted to `[0, 1]`:
/// value at 1, running maximum over `[0, 1]`, time average over `[0, 1]`,
/// and the value at an independent uniform time (the alpha statistic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryValues {
    pub endpoint: f64,
    pub sup: f64,
    pub avg: f64,
    pub alpha: f64,
}

pub const BATTERY_NAMES: [&str; 4] = ["endpoint", "sup", "avg", "alpha"];

impl BatteryValues {
    pub fn as_array(&self) -> [f64; 4] {
        [self.endpoint, self.sup, self.avg, self.alpha]
    }
}

/// Evaluates the functional battery on the rescaled path `s_r X` without
/// materializing it: every functional of `s_r X` on `[0, 1]` reduces to a
/// constant-time lookup on the source profile.
///
/// `alpha_time` is the uniform time in `[0, 1]` used by the alpha statistic.
/// Needs `r <= horizon`.
pub fn battery_rescaled(
    profile: &RecordProfile,
    r: f64,
    alpha_time: f64,
) -> Result<BatteryValues> {
    let path = profile.path();
    if !(r > 0.0) || r > path.horizon() * (1.0 + 1e-12) {
        return Err(Error::InsufficientHorizon {
            needed: r,
            available: path.horizon(),
        });
    }
    debug_assert!((0.0..=1.0).contains(&alpha_time));
    let scale = r.powf(-path.hurst());
    Ok(BatteryValues {
        endpoint: scale * path.value_at(r),
        sup: scale * profile.max_at(r),
        avg: scale / r * profile.integral_at(r),
        alpha: scale * path.value_at(r * alpha_time),
    })
}

/// Battery of the path itself (`r = 1`).
pub fn battery(profile: &RecordProfile, alpha_time: f64) -> Result<BatteryValues> {
    battery_rescaled(profile, 1.0, alpha_time)
}

/// Whether `sup_{[0,1]}` of the level-`level` co-ascent stays at or below
/// `x`, decided without materializing the rescaled path.
///
/// The supremum equals `level * T^{-H}`, which is monotone in the passage
/// time `T`, so the event `{sup <= x}` is `{T >= (level/x)^{1/H}}` and stays
/// decidable when the passage lies beyond the horizon as long as the horizon
/// already exceeds the critical time. Returns `None` when undecidable.
pub fn coascent_sup_below(profile: &RecordProfile, level: f64, x: f64) -> Option<bool> {
    let hurst = profile.path().hurst();
    let critical = (level / x).powf(1.0 / hurst);
    match profile.first_passage(level) {
        Ok(t) => Some(t >= critical),
        Err(Error::PassageNotReached { .. }) => {
            if profile.path().horizon() >= critical {
                Some(true)
            } else {
                None
            }
        }
        Err(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathgen::{generate, GeneratorConfig, GridPath};

    fn power_profile(hurst: f64, horizon: f64, steps: usize) -> RecordProfile {
        RecordProfile::new(
            generate(&GeneratorConfig::deterministic_power(hurst, horizon, steps, 0)).unwrap(),
        )
    }

    #[test]
    fn coascent_fixed_point_on_power_paths() {
        // Chord crossings and first-cell interpolation limit accuracy near
        // t = 0, especially for small H; compare away from the origin.
        for hurst in [0.3, 0.5, 0.7] {
            for level in [0.5, 1.0, 2.0] {
                let profile = power_profile(hurst, 32.0, 32 * 1024);
                let result = coascent(&profile, level, 2.0, 512).unwrap();
                let expected_t = level.powf(1.0 / hurst);
                assert!(
                    (result.passage_time - expected_t).abs() < 1e-4 * expected_t,
                    "T_x = {} vs {expected_t}",
                    result.passage_time
                );
                for (j, v) in result.path.values().iter().enumerate() {
                    let t = j as f64 * result.path.delta();
                    if t < 0.25 {
                        continue;
                    }
                    assert!(
                        (v - t.powf(hurst)).abs() < 1e-4,
                        "H={hurst} x={level} t={t}: {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn coascent_value_at_one_is_scaled_passage_time() {
        // A path rising linearly to 1 at t = 4: T_1 = 4, X^a(1) = 4^{-1/2}.
        let values: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
        let path = GridPath::new(4.0 / 64.0, values, 0.5).unwrap();
        let profile = RecordProfile::new(path);
        let result = coascent(&profile, 1.0, 1.0, 64).unwrap();
        assert!((result.passage_time - 4.0).abs() < 1e-12);
        let at_one = result.path.values().last().unwrap();
        assert!((at_one - 0.5).abs() < 1e-12, "X^a(1) = {at_one}");
    }

    #[test]
    fn coascent_sup_sits_at_one() {
        for seed in 0..40 {
            let path = generate(&GeneratorConfig::brownian(64.0, 16 * 1024, seed)).unwrap();
            let profile = RecordProfile::new(path);
            let result = match coascent(&profile, 1.0, 1.0, 512) {
                Ok(r) => r,
                Err(Error::PassageNotReached { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let vals = result.path.values();
            let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let last = *vals.last().unwrap();
            assert!(
                max <= last + 1e-12,
                "sup over [0,1] is {max}, value at 1 is {last}"
            );
        }
    }

    #[test]
    fn iterated_coascent_fixed_point() {
        let profile = power_profile(0.5, 64.0, 64 * 1024);
        let first = coascent(&profile, 1.0, 4.0, 4096).unwrap();
        let second = iterated_coascent(&first, 1.0, 2.0, 512).unwrap();
        for (j, v) in second.path.values().iter().enumerate() {
            let t = j as f64 * second.path.delta();
            assert!((v - t.sqrt()).abs() < 1e-6, "t={t}: {v}");
        }
    }

    #[test]
    fn iterated_passage_times_factor_through_the_source() {
        // Records of X^a are records of X renormalized by T_1: the second
        // passage time satisfies T'_x * T_1 = T_{x * T_1^H} on the source.
        for seed in 0..30 {
            let path = generate(&GeneratorConfig::brownian(256.0, 64 * 1024, seed)).unwrap();
            let profile = RecordProfile::new(path);
            let t1 = match profile.first_passage(1.0) {
                Ok(t) => t,
                Err(_) => continue,
            };
            if 8.0 * t1 > profile.path().horizon() {
                continue;
            }
            let result = coascent(&profile, 1.0, 8.0, 64 * 1024).unwrap();
            let inner = RecordProfile::new(result.path.clone());
            let x = 1.5;
            let (t_inner, t_source) = match (
                inner.first_passage(x),
                profile.first_passage(x * t1.powf(0.5)),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let tol = 8.0 * (profile.path().delta() / t1).max(result.path.delta());
            assert!(
                (t_inner * t1 - t_source).abs() <= tol * t_source.max(1.0),
                "seed {seed}: {t_inner} * {t1} vs {t_source}"
            );
        }
    }

    #[test]
    fn lamperti_constant_on_power_paths() {
        for hurst in [0.3, 0.5, 0.7] {
            let profile = power_profile(hurst, 8.0, 64 * 1024);
            let series = lamperti(profile.path(), -1.0, 2.0, 128).unwrap();
            for v in &series.values {
                assert!((v - 1.0).abs() < 1e-7, "H={hurst}: {v}");
            }
        }
    }

    #[test]
    fn lamperti_range_checks() {
        let path = generate(&GeneratorConfig::brownian(4.0, 1024, 3)).unwrap();
        assert!(matches!(
            lamperti(&path, 0.0, 2.0, 16),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            lamperti(&path, -9.0, 1.0, 16),
            Err(Error::OutOfRange { .. })
        ));
        assert!(lamperti(&path, -3.0, 1.2, 16).is_ok());
    }

    #[test]
    fn excursion_is_nonpositive_and_linearity_holds() {
        for seed in 0..20 {
            let path = generate(&GeneratorConfig::brownian(8.0, 8192, seed)).unwrap();
            let profile = RecordProfile::new(path.clone());
            let u = excursion_from_max(&profile, -2.0, 2.0, 256).unwrap();
            let lx = lamperti(&path, -2.0, 2.0, 256).unwrap();
            let max_path = GridPath::new(
                path.delta(),
                profile.running_max().to_vec(),
                path.hurst(),
            )
            .unwrap();
            let lm = lamperti(&max_path, -2.0, 2.0, 256).unwrap();
            for j in 0..u.values.len() {
                assert!(u.values[j] <= 1e-12);
                let two_route = lx.values[j] - lm.values[j];
                assert!(
                    (u.values[j] - two_route).abs() < 1e-12,
                    "L(X) - L(M) vs L(X - M) at j = {j}"
                );
            }
        }
    }

    #[test]
    fn excursion_vanishes_on_power_paths() {
        let profile = power_profile(0.5, 8.0, 8192);
        let u = excursion_from_max(&profile, -1.0, 2.0, 64).unwrap();
        for v in &u.values {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn battery_matches_materialized_path() {
        for seed in 0..20 {
            let path = generate(&GeneratorConfig::brownian(8.0, 8192, seed)).unwrap();
            let profile = RecordProfile::new(path);
            let r = 1.37;
            let fast = battery_rescaled(&profile, r, 0.625).unwrap();
            let slow_path = rescale(profile.path(), r, 1.0, 8192).unwrap();
            let slow_profile = RecordProfile::new(slow_path);
            let slow = battery(&slow_profile, 0.625).unwrap();
            assert!((fast.endpoint - slow.endpoint).abs() < 1e-12);
            // The materialized grid subsamples the source, so sup and avg
            // agree only up to the source slope across one output cell.
            let tol = 1e-2;
            assert!((fast.sup - slow.sup).abs() < tol, "{} {}", fast.sup, slow.sup);
            assert!((fast.avg - slow.avg).abs() < tol);
            assert!((fast.alpha - slow.alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn sup_event_is_decidable_beyond_the_horizon() {
        // A path that never reaches level 1 inside horizon 4.
        let values: Vec<f64> = (0..=64).map(|i| 0.1 * (i as f64 / 64.0)).collect();
        let path = GridPath::new(4.0 / 64.0, values, 0.5).unwrap();
        let profile = RecordProfile::new(path);
        // critical time for x = 0.5 is 4: horizon reaches it, so sup <= 0.5
        assert_eq!(coascent_sup_below(&profile, 1.0, 0.5), Some(true));
        // critical time for x = 0.4 is 6.25: undecidable at horizon 4
        assert_eq!(coascent_sup_below(&profile, 1.0, 0.4), None);
    }

    #[test]
    fn sup_event_matches_passage_when_reached() {
        for seed in 0..50 {
            let path = generate(&GeneratorConfig::brownian(4.0, 4096, seed)).unwrap();
            let profile = RecordProfile::new(path);
            for x in [0.5, 1.0, 2.0] {
                if let Some(event) = coascent_sup_below(&profile, 1.0, x) {
                    if let Ok(t) = profile.first_passage(1.0) {
                        let sup = 1.0 * t.powf(-0.5);
                        assert_eq!(event, sup <= x, "seed {seed}, x = {x}");
                    }
                }
            }
        }
    }
}
