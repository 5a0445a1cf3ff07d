//! Weighted distribution-equality machinery.
//!
//! Weighted empirical CDFs, two-sample Kolmogorov-Smirnov statistics, and
//! mean comparisons at a fixed sigma level. Significance of KS statistics is
//! always bootstrap-calibrated: importance weights break the classical null
//! distribution, so each side is resampled from its own (value, weight)
//! pairs and the recentered statistic
//! `sup |(F*_a - F_a) - (F*_b - F_b)|` estimates the null law of the
//! observed `sup |F_a - F_b|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Scalar samples with nonnegative importance weights, held sorted by value.
#[derive(Debug, Clone)]
pub struct WeightedSampleSet {
    values: Vec<f64>,
    weights: Vec<f64>,
    /// Cumulative weights aligned with `values`.
    cum: Vec<f64>,
    total: f64,
}

impl WeightedSampleSet {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.len() != weights.len() {
            return Err(Error::InvalidSample(format!(
                "{} values vs {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSample("non-finite value".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSample(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(weights).collect();
        pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (values, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mut cum = Vec::with_capacity(values.len());
        let mut total = 0.0;
        for w in &weights {
            total += w;
            cum.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::InvalidSample("total weight must be positive".into()));
        }
        Ok(Self {
            values,
            weights,
            cum,
            total,
        })
    }

    /// Unit-weight samples.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Right-continuous weighted ECDF: total weight of samples `<= x`
    /// normalized by the total weight.
    pub fn ecdf(&self, x: f64) -> f64 {
        let idx = self.values.partition_point(|v| *v <= x);
        if idx == 0 {
            0.0
        } else {
            self.cum[idx - 1] / self.total
        }
    }

    /// Weighted mean and its standard error (ratio-estimator linearization,
    /// `se^2 = sum w_i^2 (v_i - mean)^2 / (sum w)^2`).
    pub fn mean_se(&self) -> (f64, f64) {
        let mean = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum::<f64>()
            / self.total;
        let var_sum: f64 = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| {
                let d = v - mean;
                w * w * d * d
            })
            .sum();
        (mean, var_sum.sqrt() / self.total)
    }

    fn resample(&self, rng: &mut ChaCha8Rng) -> Self {
        loop {
            let n = self.len();
            let mut values = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for _ in 0..n {
                let i = rng.random_range(0..n);
                values.push(self.values[i]);
                weights.push(self.weights[i]);
            }
            // All-zero-weight draws carry no distribution; redraw.
            if weights.iter().sum::<f64>() > 0.0 {
                return Self::new(values, weights).expect("resample of a valid set is valid");
            }
        }
    }
}

struct Cursor<'a> {
    set: &'a WeightedSampleSet,
    idx: usize,
}

impl<'a> Cursor<'a> {
    fn new(set: &'a WeightedSampleSet) -> Self {
        Self { set, idx: 0 }
    }

    fn head(&self) -> Option<f64> {
        self.set.values.get(self.idx).copied()
    }

    fn advance_through(&mut self, x: f64) {
        while self.idx < self.set.values.len() && self.set.values[self.idx] <= x {
            self.idx += 1;
        }
    }

    fn cdf(&self) -> f64 {
        if self.idx == 0 {
            0.0
        } else {
            self.set.cum[self.idx - 1] / self.set.total
        }
    }
}

/// `sup_x |f(F_1(x), .., F_k(x))|` over the pooled jump points of the sets.
fn sup_over_jumps(sets: &[&WeightedSampleSet], f: impl Fn(&[f64]) -> f64) -> f64 {
    let mut cursors: Vec<Cursor> = sets.iter().map(|s| Cursor::new(s)).collect();
    let mut cdfs = vec![0.0; sets.len()];
    let mut sup = 0.0f64;
    loop {
        let x = cursors
            .iter()
            .filter_map(Cursor::head)
            .fold(f64::INFINITY, f64::min);
        if !x.is_finite() {
            break;
        }
        for (c, v) in cursors.iter_mut().zip(cdfs.iter_mut()) {
            c.advance_through(x);
            *v = c.cdf();
        }
        sup = sup.max(f(&cdfs).abs());
    }
    sup
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|` over the
/// pooled values. Symmetric, lies in `[0, 1]`.
pub fn ks_two_sample(a: &WeightedSampleSet, b: &WeightedSampleSet) -> f64 {
    sup_over_jumps(&[a, b], |f| f[0] - f[1])
}

/// Bootstrap p-value for the hypothesis that both weighted samples target the
/// same distribution. Deterministic given `(inputs, seed, resamples)`.
pub fn bootstrap_pvalue(
    a: &WeightedSampleSet,
    b: &WeightedSampleSet,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    if resamples < 200 {
        return Err(Error::InvalidConfig(format!(
            "need at least 200 bootstrap resamples, got {resamples}"
        )));
    }
    let observed = ks_two_sample(a, b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exceed = 0usize;
    for _ in 0..resamples {
        let a_star = a.resample(&mut rng);
        let b_star = b.resample(&mut rng);
        let d = sup_over_jumps(&[&a_star, a, &b_star, b], |f| (f[0] - f[1]) - (f[2] - f[3]));
        if d >= observed {
            exceed += 1;
        }
    }
    Ok((1 + exceed) as f64 / (resamples + 1) as f64)
}

/// Outcome of a mean comparison at a fixed sigma level.
#[derive(Debug, Clone, Copy)]
pub struct MeanComparison {
    pub mean_a: f64,
    pub se_a: f64,
    pub mean_b: f64,
    pub se_b: f64,
    pub sigma_level: f64,
    /// `|mean_a - mean_b|`
    pub difference: f64,
    /// `sigma_level * sqrt(se_a^2 + se_b^2)` plus any allowance.
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares two weighted means: pass iff
/// `|mean_a - mean_b| <= sigma_level * sqrt(se_a^2 + se_b^2) + allowance`.
pub fn mean_ci_compare_with_allowance(
    a: &WeightedSampleSet,
    b: &WeightedSampleSet,
    sigma_level: f64,
    allowance: f64,
) -> MeanComparison {
    let (mean_a, se_a) = a.mean_se();
    let (mean_b, se_b) = b.mean_se();
    compare(mean_a, se_a, mean_b, se_b, sigma_level, allowance)
}

pub fn mean_ci_compare(
    a: &WeightedSampleSet,
    b: &WeightedSampleSet,
    sigma_level: f64,
) -> MeanComparison {
    mean_ci_compare_with_allowance(a, b, sigma_level, 0.0)
}

/// Compares a weighted mean against an exact constant.
pub fn mean_vs_constant_with_allowance(
    set: &WeightedSampleSet,
    target: f64,
    sigma_level: f64,
    allowance: f64,
) -> MeanComparison {
    let (mean, se) = set.mean_se();
    compare(mean, se, target, 0.0, sigma_level, allowance)
}

pub fn mean_vs_constant(set: &WeightedSampleSet, target: f64, sigma_level: f64) -> MeanComparison {
    mean_vs_constant_with_allowance(set, target, sigma_level, 0.0)
}

fn compare(
    mean_a: f64,
    se_a: f64,
    mean_b: f64,
    se_b: f64,
    sigma_level: f64,
    allowance: f64,
) -> MeanComparison {
    let difference = (mean_a - mean_b).abs();
    let tolerance = sigma_level * (se_a * se_a + se_b * se_b).sqrt() + allowance;
    MeanComparison {
        mean_a,
        se_a,
        mean_b,
        se_b,
        sigma_level,
        difference,
        tolerance,
        pass: difference <= tolerance,
    }
}
