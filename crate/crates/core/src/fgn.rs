//! Fractional Gaussian noise and fractional Brownian motion sampling.
//!
//! The default route embeds the stationary increment covariance in a
//! circulant matrix of size `2 * steps` and synthesizes noise through two
//! FFTs (eigenvalue setup is done once per grid and shared across seeds).
//! For grids up to [`DENSE_MAX_STEPS`] an exact dense Cholesky factorization
//! of the path covariance is available as a fallback and as an independent
//! reference route.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::pathgen::{GeneratorConfig, GridPath};

/// Largest grid the dense factorization fallback covers.
pub const DENSE_MAX_STEPS: usize = 1 << 12;

/// Embedding eigenvalues below this are an error; negatives above it are
/// truncated to zero with a logged warning.
pub const EIGENVALUE_TOLERANCE: f64 = -1e-8;

/// Autocovariance of the increment sequence at integer lag `k` for grid
/// spacing `delta`:
/// `delta^{2H} / 2 * (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn increment_autocov(hurst: f64, delta: f64, lag: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let k = lag as f64;
    let unit = if lag == 0 {
        1.0
    } else {
        0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
    };
    delta.powf(two_h) * unit
}

/// Exact covariance of the path values at times `i * delta`, `i = 1..=n`:
/// `Cov(X_s, X_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2`. Row-major `n x n`.
pub fn path_covariance(hurst: f64, delta: f64, n: usize) -> Vec<f64> {
    let two_h = 2.0 * hurst;
    let mut cov = vec![0.0; n * n];
    let pow: Vec<f64> = (0..=n).map(|i| (i as f64 * delta).powf(two_h)).collect();
    for i in 0..n {
        for j in 0..n {
            let lag = i.abs_diff(j);
            cov[i * n + j] = 0.5 * (pow[i + 1] + pow[j + 1] - pow[lag]);
        }
    }
    cov
}

/// In-place lower Cholesky factorization of a row-major symmetric positive
/// definite matrix. The strict upper triangle is zeroed.
pub fn cholesky_lower(n: usize, a: &mut [f64]) -> Result<()> {
    assert_eq!(a.len(), n * n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                }
                a[i * n + j] = s.sqrt();
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
        for j in i + 1..n {
            a[i * n + j] = 0.0;
        }
    }
    Ok(())
}

/// Reusable circulant-embedding sampler: eigenvalue setup and FFT plan are
/// computed once per grid and shared across an ensemble of seeds.
pub struct FgnSampler {
    hurst: f64,
    delta: f64,
    steps: usize,
    /// `sqrt(lambda_k / m)` per frequency, negatives within tolerance clamped.
    amplitudes: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnSampler {
    pub fn new(hurst: f64, delta: f64, steps: usize) -> Result<Self> {
        if steps < 1 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        let m = 2 * steps;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);

        // First row of the circulant embedding of the Toeplitz increment
        // covariance: gamma(0), .., gamma(steps), gamma(steps-1), .., gamma(1).
        let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
        for lag in 0..=steps {
            row.push(Complex::new(increment_autocov(hurst, delta, lag), 0.0));
        }
        for lag in (1..steps).rev() {
            row.push(Complex::new(increment_autocov(hurst, delta, lag), 0.0));
        }
        fft.process(&mut row);

        let mut min_eig = f64::INFINITY;
        let mut amplitudes = Vec::with_capacity(m);
        for c in &row {
            min_eig = min_eig.min(c.re);
        }
        if min_eig < EIGENVALUE_TOLERANCE {
            return Err(Error::GenerationFailure {
                min_eigenvalue: min_eig,
                steps,
            });
        }
        if min_eig < 0.0 {
            log::warn!(
                "circulant embedding for H={hurst}, n={steps}: truncating eigenvalues down to {min_eig:e} to zero"
            );
        }
        for c in &row {
            amplitudes.push((c.re.max(0.0) / m as f64).sqrt());
        }

        Ok(Self {
            hurst,
            delta,
            steps,
            amplitudes,
            fft,
        })
    }

    pub fn for_config(config: &GeneratorConfig) -> Result<Self> {
        Self::new(config.hurst, config.delta(), config.steps)
    }

    /// One fractional Brownian path, bit-reproducible from the seed.
    ///
    /// Draw order: one normal for frequency 0, one for the Nyquist frequency,
    /// then a (re, im) pair per frequency `1..steps`.
    pub fn sample(&self, seed: u64) -> GridPath {
        let m = 2 * self.steps;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spectrum = vec![Complex::new(0.0, 0.0); m];

        let z0: f64 = StandardNormal.sample(&mut rng);
        spectrum[0] = Complex::new(self.amplitudes[0] * z0, 0.0);
        let zn: f64 = StandardNormal.sample(&mut rng);
        spectrum[self.steps] = Complex::new(self.amplitudes[self.steps] * zn, 0.0);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for k in 1..self.steps {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let a = self.amplitudes[k] * half;
            spectrum[k] = Complex::new(a * re, a * im);
            spectrum[m - k] = spectrum[k].conj();
        }

        self.fft.process(&mut spectrum);

        let mut values = Vec::with_capacity(self.steps + 1);
        values.push(0.0);
        let mut x = 0.0;
        for c in spectrum.iter().take(self.steps) {
            x += c.re;
            values.push(x);
        }
        GridPath::new(self.delta, values, self.hurst)
            .expect("synthesized fGn path is always valid")
    }
}

/// Circulant-embedding route for one path. Ensembles should hold an
/// [`FgnSampler`] instead of calling this per seed.
pub fn sample_circulant(config: &GeneratorConfig) -> Result<GridPath> {
    config.validate()?;
    Ok(FgnSampler::for_config(config)?.sample(config.seed))
}

/// Exact dense-factorization route: Cholesky of the full path covariance.
/// Only available for `steps <= DENSE_MAX_STEPS`.
pub fn sample_dense(config: &GeneratorConfig) -> Result<GridPath> {
    config.validate()?;
    let n = config.steps;
    if n > DENSE_MAX_STEPS {
        return Err(Error::InvalidConfig(format!(
            "dense route covers n <= {DENSE_MAX_STEPS}, got {n}"
        )));
    }
    let delta = config.delta();
    let mut factor = path_covariance(config.hurst, delta, n);
    cholesky_lower(n, &mut factor)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    for i in 0..n {
        let row = &factor[i * n..i * n + i + 1];
        values.push(row.iter().zip(&z).map(|(l, z)| l * z).sum());
    }
    GridPath::new(delta, values, config.hurst)
}

/// Default fBm route: circulant embedding, falling back to the dense
/// factorization when the embedding fails on a small grid.
pub(crate) fn sample_auto(config: &GeneratorConfig) -> Result<GridPath> {
    match sample_circulant(config) {
        Ok(path) => Ok(path),
        Err(Error::GenerationFailure { min_eigenvalue, steps }) if steps <= DENSE_MAX_STEPS => {
            log::warn!(
                "circulant embedding rejected (min eigenvalue {min_eigenvalue:e}); \
                 using the dense factorization for n = {steps}"
            );
            sample_dense(config)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_eigenvalues_are_nonnegative_across_hurst() {
        for hurst in [0.1, 0.3, 0.5, 0.75, 0.9] {
            let sampler = FgnSampler::new(hurst, 1.0 / 64.0, 64);
            assert!(sampler.is_ok(), "H = {hurst} rejected");
        }
    }

    #[test]
    fn dense_factor_reconstructs_covariance() {
        let n = 64;
        for hurst in [0.3, 0.5, 0.75] {
            let cov = path_covariance(hurst, 1.0 / n as f64, n);
            let mut factor = cov.clone();
            cholesky_lower(n, &mut factor).unwrap();
            let mut max_err = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..=i.min(j) {
                        s += factor[i * n + k] * factor[j * n + k];
                    }
                    max_err = max_err.max((s - cov[i * n + j]).abs());
                }
            }
            assert!(max_err < 1e-10, "H = {hurst}: reconstruction error {max_err:e}");
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(matches!(
            cholesky_lower(2, &mut a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn circulant_is_reproducible() {
        let config = GeneratorConfig::fbm(0.7, 1.0, 128, 12345);
        let a = sample_circulant(&config).unwrap();
        let b = sample_circulant(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circulant_covariance_monte_carlo() {
        // Cov(X_1, X_2) = (1 + 2^{2H} - 1) / 2 at grid times 1 and 2.
        let n_paths = 120_000;
        for (hurst, expected) in [(0.5, 1.0), (0.75, 2.0f64.sqrt())] {
            let sampler = FgnSampler::new(hurst, 0.125, 16).unwrap();
            let (mut s1, mut s2, mut s12, mut s11) = (0.0, 0.0, 0.0, 0.0);
            for seed in 0..n_paths {
                let path = sampler.sample(seed);
                let x1 = path.values()[8];
                let x2 = path.values()[16];
                s1 += x1;
                s2 += x2;
                s12 += x1 * x2;
                s11 += x1 * x1;
            }
            let n = n_paths as f64;
            let cov = s12 / n - (s1 / n) * (s2 / n);
            let var1 = s11 / n - (s1 / n) * (s1 / n);
            // se of the covariance estimate, normal fourth-moment approximation
            let se = ((1.0 * 2.0f64.powf(2.0 * hurst) + expected * expected) / n).sqrt();
            assert!(
                (cov - expected).abs() < 5.0 * se,
                "H={hurst}: cov {cov} vs {expected} (se {se})"
            );
            let se_var = (2.0 / n).sqrt();
            assert!(
                (var1 - 1.0).abs() < 5.0 * se_var,
                "H={hurst}: Var(X_1) = {var1}"
            );
        }
    }

    #[test]
    fn dense_and_circulant_share_the_marginal_law() {
        // Quick variance check on the dense route.
        let n_paths = 40_000;
        let hurst = 0.3;
        let mut sum_sq = 0.0;
        for seed in 0..n_paths {
            let config = GeneratorConfig::fbm(hurst, 1.0, 16, seed);
            let path = sample_dense(&config).unwrap();
            let x = path.values()[16];
            sum_sq += x * x;
        }
        let var = sum_sq / n_paths as f64;
        let se = (2.0 / n_paths as f64).sqrt();
        assert!((var - 1.0).abs() < 5.0 * se, "Var(X_1) = {var}");
    }
}
