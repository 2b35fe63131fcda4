//! Seeded Monte Carlo estimators for the HNF diagonal densities and the
//! gcd-of-determinants law.
//!
//! Sample `i` is always generated from the `(seed, i)` stream, and indices are
//! grouped in fixed-size chunks whose tallies are summed. The result is
//! therefore identical for any worker count.

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{d_limit_at, d_n_at};
use crate::density::{admissible, diag_density};
use crate::error::{Error, Result};
use crate::hnf::{diag_of_hnf, diag_prefix_of_hnf, DiagPattern};
use crate::matrix::{determinant, IntMatrix};
use crate::sample::{sample_unchecked, SampleConfig};
use crate::zeta::DEFAULT_TOL;

/// Number of consecutive sample indices handled as one unit of work.
pub const CHUNK_SIZE: u64 = 1024;

/// Empirical frequency of an event against its closed-form prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n: usize,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pattern: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u64>,
    pub bound: u64,
    pub center: Vec<i64>,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Denominator of `empirical`: `samples`, or the number of prefix
    /// matches for conditional (residue) frequencies.
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    pub predicted: Option<f64>,
    pub abs_error: Option<f64>,
    pub stderr: f64,
}

impl ExperimentReport {
    fn new(cfg: &SampleConfig, hits: u64, trials: u64, predicted: Option<f64>) -> Self {
        let empirical = if trials == 0 {
            0.0
        } else {
            hits as f64 / trials as f64
        };
        let stderr = if trials == 0 {
            0.0
        } else {
            (empirical * (1.0 - empirical) / trials as f64).sqrt()
        };
        ExperimentReport {
            n: cfg.n,
            m: cfg.m,
            pattern: None,
            d: None,
            r: None,
            bound: cfg.half_width,
            center: cfg.center_full(),
            samples: cfg.count,
            seed: cfg.seed,
            workers: cfg.workers,
            trials,
            hits,
            empirical,
            predicted,
            abs_error: predicted.map(|p| (empirical - p).abs()),
            stderr,
        }
    }

    /// `|empirical - predicted| <= max(floor, sigmas * stderr)`.
    pub fn agrees(&self, floor: f64, sigmas: f64) -> bool {
        self.abs_error
            .is_some_and(|e| e <= floor.max(sigmas * self.stderr))
    }
}

/// Runs `per_sample` over every index and folds the tallies. `T` must be an
/// associative, commutative accumulator so chunk order does not matter.
fn tally<T, F>(cfg: &SampleConfig, per_sample: F) -> Result<T>
where
    T: Default + Send + Merge,
    F: Fn(u64, &mut T) + Sync,
{
    cfg.validate()?;
    let chunks = cfg.count.div_ceil(CHUNK_SIZE);
    let run_chunk = |c: u64| {
        let mut acc = T::default();
        let end = ((c + 1) * CHUNK_SIZE).min(cfg.count);
        for i in c * CHUNK_SIZE..end {
            per_sample(i, &mut acc);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    if cfg.workers > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
        return Ok(pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(run_chunk)
                .reduce(T::default, |mut a, b| {
                    a.merge(b);
                    a
                })
        }));
    }
    let mut total = T::default();
    for c in 0..chunks {
        total.merge(run_chunk(c));
    }
    Ok(total)
}

trait Merge {
    fn merge(&mut self, other: Self);
}

impl Merge for u64 {
    fn merge(&mut self, other: Self) {
        *self += other;
    }
}

impl Merge for Vec<u64> {
    fn merge(&mut self, other: Self) {
        if self.len() < other.len() {
            self.resize(other.len(), 0);
        }
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}

/// Fraction of sampled matrices whose HNF diagonal begins with `pattern`.
///
/// Outside the range where the closed form is known the prediction is left
/// empty and only the empirical frequency is reported.
pub fn run_diag_experiment(cfg: &SampleConfig, pattern: &DiagPattern) -> Result<ExperimentReport> {
    cfg.validate()?;
    let k = pattern.len();
    if k > cfg.n.min(cfg.m) {
        return Err(Error::Parameter(format!(
            "pattern length {k} exceeds min(n, m) = {}",
            cfg.n.min(cfg.m)
        )));
    }
    let hits: u64 = tally(cfg, |i, acc: &mut u64| {
        let a = sample_unchecked(cfg, i);
        if pattern.is_prefix_of(&diag_prefix_of_hnf(&a, k)) {
            *acc += 1;
        }
    })?;
    let predicted = if admissible(cfg.n, cfg.m, k) {
        Some(diag_density(cfg.n, cfg.m, pattern, DEFAULT_TOL)?.value)
    } else {
        None
    };
    let mut report = ExperimentReport::new(cfg, hits, cfg.count, predicted);
    report.pattern = Some(pattern.values().to_vec());
    Ok(report)
}

/// Among square samples whose HNF diagonal starts with `prefix` (length
/// `n - 1`), the distribution of the last diagonal entry modulo `d`. One
/// report per residue, each predicted at `1/d`.
pub fn run_residue_experiment(
    cfg: &SampleConfig,
    prefix: &DiagPattern,
    d: u64,
) -> Result<Vec<ExperimentReport>> {
    cfg.validate()?;
    if d < 2 {
        return Err(Error::Parameter(format!("modulus must be >= 2, got {d}")));
    }
    if cfg.n != cfg.m {
        return Err(Error::Parameter(format!(
            "residue experiment needs square matrices, got {}x{}",
            cfg.n, cfg.m
        )));
    }
    if cfg.n < 2 || prefix.len() != cfg.n - 1 {
        return Err(Error::Parameter(format!(
            "prefix must have n - 1 = {} entries",
            cfg.n.saturating_sub(1)
        )));
    }
    if prefix.values().contains(&0) {
        return Err(Error::Parameter("prefix entries must be >= 1".into()));
    }
    let dd = BigInt::from(d);
    let buckets: Vec<u64> = tally(cfg, |i, acc: &mut Vec<u64>| {
        if acc.is_empty() {
            acc.resize(d as usize, 0);
        }
        let diag = diag_of_hnf(&sample_unchecked(cfg, i));
        if prefix.is_prefix_of(&diag) {
            let r = diag[cfg.n - 1]
                .mod_floor(&dd)
                .to_usize()
                .expect("residue < d");
            acc[r] += 1;
        }
    })?;
    let mut buckets = buckets;
    buckets.resize(d as usize, 0);
    let matched: u64 = buckets.iter().sum();
    Ok(buckets
        .iter()
        .enumerate()
        .map(|(r, &hits)| {
            let mut rep = ExperimentReport::new(cfg, hits, matched, Some(1.0 / d as f64));
            rep.pattern = Some(prefix.values().to_vec());
            rep.d = Some(d);
            rep.r = Some(r as u64);
            rep
        })
        .collect())
}

/// Histogram of `g = gcd(det[A|x], det[A|y])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcdHistogramReport {
    pub n: usize,
    pub m: usize,
    pub bound: u64,
    pub center: Vec<i64>,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub gmax: u64,
    /// Tallies keyed by `"1"`, ..., `"gmax"`, then `"tail"` (g > gmax) and
    /// `"undefined"` (both determinants zero). Sums to `samples`.
    pub counts: IndexMap<String, u64>,
    pub empirical: IndexMap<String, f64>,
    pub predicted_dn: IndexMap<String, f64>,
    pub predicted_dlimit: IndexMap<String, f64>,
    pub tail_mass: f64,
    pub undefined_mass: f64,
}

impl GcdHistogramReport {
    pub fn count(&self, g: u64) -> u64 {
        self.counts.get(&g.to_string()).copied().unwrap_or(0)
    }

    pub fn empirical_at(&self, g: u64) -> f64 {
        self.empirical.get(&g.to_string()).copied().unwrap_or(0.0)
    }

    /// CSV rows for `g = 1..=gmax` under the header
    /// `g,count,empirical,predicted_dn,predicted_dlimit`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("g,count,empirical,predicted_dn,predicted_dlimit\n");
        for g in 1..=self.gmax {
            let key = g.to_string();
            out.push_str(&format!(
                "{g},{},{},{},{}\n",
                self.counts[&key],
                fmt12(self.empirical[&key]),
                fmt12(self.predicted_dn[&key]),
                fmt12(self.predicted_dlimit[&key]),
            ));
        }
        out
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// `round12` rendered with the shortest round-trip representation.
pub fn fmt12(x: f64) -> String {
    round12(x).to_string()
}

/// `gcd(a, b)` with `gcd(a, 0) = |a|`; `None` when both are zero.
pub fn det_gcd(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    if a.is_zero() && b.is_zero() {
        None
    } else {
        Some(a.gcd(b).abs())
    }
}

/// Samples `A` (`n x (n-1)`, from `cfg`) and `x`, `y` and tallies
/// `g = gcd(det[A|x], det[A|y])`.
///
/// Sample `i` is the `n x (n+1)` matrix `[A | x | y]` drawn from stream
/// `(seed, i)`; `cfg.center` (if given) centers `A`, while `x` and `y` are
/// centered at zero.
pub fn run_gcd_det_experiment(cfg: &SampleConfig, gmax: u64) -> Result<GcdHistogramReport> {
    cfg.validate()?;
    let n = cfg.n;
    if n < 2 || cfg.m != n - 1 {
        return Err(Error::Parameter(format!(
            "gcd experiment needs n >= 2 and m = n - 1, got {}x{}",
            cfg.n, cfg.m
        )));
    }
    if gmax < 1 {
        return Err(Error::Parameter("gmax must be >= 1".into()));
    }
    let mut wide = cfg.clone();
    wide.m = n + 1;
    if !cfg.center.is_empty() {
        wide.center = (0..n)
            .flat_map(|i| {
                cfg.center[i * (n - 1)..(i + 1) * (n - 1)]
                    .iter()
                    .copied()
                    .chain([0, 0])
            })
            .collect();
    }
    let x_cols: Vec<usize> = (0..n).collect();
    let y_cols: Vec<usize> = (0..n - 1).chain([n]).collect();
    let slots = gmax as usize + 2; // [0] undefined, [1..=gmax], [gmax+1] tail
    let tallies: Vec<u64> = tally(&wide, |i, acc: &mut Vec<u64>| {
        if acc.is_empty() {
            acc.resize(slots, 0);
        }
        let s = sample_unchecked(&wide, i);
        let dx = determinant(&s.select_columns(&x_cols).expect("in range")).expect("square");
        let dy = determinant(&s.select_columns(&y_cols).expect("in range")).expect("square");
        let slot = match det_gcd(&dx, &dy) {
            None => 0,
            Some(g) => match g.to_u64() {
                Some(g) if g <= gmax => g as usize,
                _ => slots - 1,
            },
        };
        acc[slot] += 1;
    })?;
    let mut tallies = tallies;
    tallies.resize(slots, 0);

    let total = cfg.count as f64;
    let mut counts = IndexMap::new();
    let mut empirical = IndexMap::new();
    let mut predicted_dn = IndexMap::new();
    let mut predicted_dlimit = IndexMap::new();
    for g in 1..=gmax {
        let key = g.to_string();
        counts.insert(key.clone(), tallies[g as usize]);
        empirical.insert(key.clone(), tallies[g as usize] as f64 / total);
        predicted_dn.insert(key.clone(), d_n_at(n as u32, g, DEFAULT_TOL)?);
        predicted_dlimit.insert(key, d_limit_at(g, DEFAULT_TOL)?);
    }
    counts.insert("tail".into(), tallies[slots - 1]);
    counts.insert("undefined".into(), tallies[0]);
    Ok(GcdHistogramReport {
        n,
        m: cfg.m,
        bound: cfg.half_width,
        center: cfg.center_full(),
        samples: cfg.count,
        seed: cfg.seed,
        workers: cfg.workers,
        gmax,
        counts,
        empirical,
        predicted_dn,
        predicted_dlimit,
        tail_mass: tallies[slots - 1] as f64 / total,
        undefined_mass: tallies[0] as f64 / total,
    })
}

/// Splits `[A | x | y]` back into its parts; handy for inspecting a sample.
pub fn gcd_sample(cfg: &SampleConfig, index: u64) -> Result<(IntMatrix, IntMatrix, IntMatrix)> {
    cfg.validate()?;
    let n = cfg.n;
    if n < 2 || cfg.m != n - 1 || index >= cfg.count {
        return Err(Error::Parameter("invalid gcd sample request".into()));
    }
    let mut wide = cfg.clone();
    wide.m = n + 1;
    wide.center = Vec::new();
    let s = sample_unchecked(&wide, index);
    Ok((
        s.select_columns(&(0..n - 1).collect::<Vec<_>>())?,
        s.select_columns(&[n - 1])?,
        s.select_columns(&[n])?,
    ))
}
