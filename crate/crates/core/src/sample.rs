//! Deterministic sampling of integer matrices from translated cubes.
//!
//! Every sample is addressed by `(seed, index)`: the generator for sample
//! `index` is a ChaCha stream keyed by `seed` with stream id `index`, so the
//! sample stream never depends on how the indices are split across workers.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Multiplier bound used by [`random_unimodular`].
pub const DEFAULT_MAX_MULTIPLIER: i64 = 5;

/// Cube `∏ [z_i - B, z_i + B)` over `n x m` matrices, plus run parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    pub m: usize,
    /// Row-major center, either empty (all zero) or of length `n * m`.
    pub center: Vec<i64>,
    pub half_width: u64,
    pub count: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SampleConfig {
    pub fn new(n: usize, m: usize, half_width: u64, count: u64, seed: u64) -> Self {
        SampleConfig {
            n,
            m,
            center: Vec::new(),
            half_width,
            count,
            seed,
            workers: 1,
        }
    }

    pub fn with_center(mut self, center: Vec<i64>) -> Self {
        self.center = center;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Config(format!(
                "dimensions must be positive, got {}x{}",
                self.n, self.m
            )));
        }
        if self.half_width < 1 {
            return Err(Error::Config("half_width must be at least 1".into()));
        }
        if self.half_width > i64::MAX as u64 {
            return Err(Error::Config("half_width exceeds 63 bits".into()));
        }
        if self.count < 1 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !self.center.is_empty() && self.center.len() != self.n * self.m {
            return Err(Error::Config(format!(
                "center has {} entries, expected {}",
                self.center.len(),
                self.n * self.m
            )));
        }
        Ok(())
    }

    /// Center as a full row-major vector.
    pub fn center_full(&self) -> Vec<i64> {
        if self.center.is_empty() {
            vec![0; self.n * self.m]
        } else {
            self.center.clone()
        }
    }
}

pub(crate) fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The `index`-th matrix of the stream defined by `cfg.seed`.
pub fn sample_matrix(cfg: &SampleConfig, index: u64) -> Result<IntMatrix> {
    cfg.validate()?;
    if index >= cfg.count {
        return Err(Error::Config(format!(
            "sample index {index} out of range for count {}",
            cfg.count
        )));
    }
    Ok(sample_unchecked(cfg, index))
}

pub(crate) fn sample_unchecked(cfg: &SampleConfig, index: u64) -> IntMatrix {
    let mut rng = stream(cfg.seed, index);
    let b = cfg.half_width as i128;
    let len = cfg.n * cfg.m;
    let data = (0..len)
        .map(|k| {
            let z = cfg.center.get(k).copied().unwrap_or(0) as i128;
            BigInt::from(z + rng.gen_range(-b..b))
        })
        .collect();
    IntMatrix::new(cfg.n, cfg.m, data).expect("validated dimensions")
}

/// Product of `num_ops` random elementary row operations with multipliers
/// in `±DEFAULT_MAX_MULTIPLIER`.
pub fn random_unimodular(n: usize, num_ops: usize, seed: u64) -> Result<IntMatrix> {
    random_unimodular_with(n, num_ops, DEFAULT_MAX_MULTIPLIER, seed)
}

pub fn random_unimodular_with(
    n: usize,
    num_ops: usize,
    max_multiplier: i64,
    seed: u64,
) -> Result<IntMatrix> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if max_multiplier < 1 {
        return Err(Error::Parameter("max_multiplier must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = IntMatrix::identity(n)?;
    for _ in 0..num_ops {
        // with one row only negation is available
        let op = if n == 1 { 1 } else { rng.gen_range(0..3) };
        match op {
            0 => {
                let (a, b) = distinct_pair(&mut rng, n);
                u.swap_rows(a, b);
            }
            1 => u.negate_row(rng.gen_range(0..n)),
            _ => {
                let (target, source) = distinct_pair(&mut rng, n);
                let mut k = rng.gen_range(1..=max_multiplier);
                if rng.gen_bool(0.5) {
                    k = -k;
                }
                u.add_row_multiple(target, source, &BigInt::from(k));
            }
        }
    }
    Ok(u)
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::determinant;
    use num_traits::{One, Signed, ToPrimitive};

    #[test]
    fn unit_half_width_gives_minus_one_or_zero() {
        let cfg = SampleConfig::new(3, 4, 1, 50, 11);
        for i in 0..50 {
            let a = sample_matrix(&cfg, i).unwrap();
            for x in a.entries() {
                let v = x.to_i64().unwrap();
                assert!(v == -1 || v == 0, "{v}");
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SampleConfig::new(2, 3, 1000, 10, 42);
        for i in 0..10 {
            assert_eq!(
                sample_matrix(&cfg, i).unwrap(),
                sample_matrix(&cfg, i).unwrap()
            );
        }
        let other = SampleConfig {
            workers: 8,
            ..cfg.clone()
        };
        assert_eq!(
            sample_matrix(&cfg, 3).unwrap(),
            sample_matrix(&other, 3).unwrap()
        );
        assert_ne!(
            sample_matrix(&cfg, 0).unwrap(),
            sample_matrix(&cfg, 1).unwrap()
        );
    }

    #[test]
    fn entries_respect_translated_cube() {
        let center = vec![1000, -7, 0, 123_456];
        let cfg = SampleConfig::new(2, 2, 5, 200, 3).with_center(center.clone());
        for i in 0..200 {
            let a = sample_matrix(&cfg, i).unwrap();
            for (x, z) in a.entries().iter().zip(&center) {
                let v = x.to_i64().unwrap();
                assert!(v >= z - 5 && v < z + 5);
            }
        }
    }

    #[test]
    fn empirical_mean_is_minus_one_half() {
        let b = 1000.0_f64;
        let cfg = SampleConfig::new(2, 2, 1000, 10_000, 5);
        let mut sum = 0.0;
        let mut count = 0.0;
        for i in 0..cfg.count {
            for x in sample_matrix(&cfg, i).unwrap().entries() {
                sum += x.to_f64().unwrap();
                count += 1.0;
            }
        }
        let mean = sum / count;
        // variance of the uniform law on [-B, B) is ((2B)^2 - 1) / 12
        let stderr = (((2.0 * b).powi(2) - 1.0) / 12.0 / count).sqrt();
        assert!(
            (mean + 0.5).abs() <= 3.0 * stderr,
            "mean {mean}, stderr {stderr}"
        );
    }

    #[test]
    fn config_validation() {
        let ok = SampleConfig::new(2, 2, 1, 1, 0);
        assert!(ok.validate().is_ok());
        for bad in [
            SampleConfig {
                half_width: 0,
                ..ok.clone()
            },
            SampleConfig {
                count: 0,
                ..ok.clone()
            },
            SampleConfig { n: 0, ..ok.clone() },
            SampleConfig {
                workers: 0,
                ..ok.clone()
            },
            SampleConfig {
                center: vec![1, 2, 3],
                ..ok.clone()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
        assert!(sample_matrix(&ok, 1).is_err());
    }

    #[test]
    fn unimodular_generator() {
        assert_eq!(
            random_unimodular(4, 0, 9).unwrap(),
            IntMatrix::identity(4).unwrap()
        );
        for seed in 0..50 {
            for n in 1..=5 {
                let u = random_unimodular(n, 30, seed).unwrap();
                assert!(determinant(&u).unwrap().abs().is_one());
            }
        }
        assert_eq!(
            random_unimodular(3, 20, 1).unwrap(),
            random_unimodular(3, 20, 1).unwrap()
        );
        assert!(random_unimodular(0, 1, 0).is_err());
    }
}
