//! Exact arithmetic functions behind the law of
//! `g = gcd(det[A|x], det[A|y])` for random `n x (n-1)` matrices `A` and
//! vectors `x`, `y`.
//!
//! With `norm_n = ζ(2) · ∏_{k=2}^{n} ζ(k)`, the density of `g` is
//! `D_n(g) = f_n(g) / norm_n` where
//!
//! ```text
//! f_n(g) = Σ_{d_1 ··· d_n = g} 1 / (d_1^n d_2^(n-1) ··· d_{n-1}^2 d_n^2).
//! ```
//!
//! `f_n` is multiplicative and on prime powers satisfies
//! `f_n(p^α) = Σ_{i=0}^{α} p^(-n i) f_{n-1}(p^(α-i))` with
//! `f_1(p^α) = p^(-2α)`. As `n → ∞`, `f_n → f` and `D_n → D = d/ζ(2) · f`.

mod factor;

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

pub use factor::{factorize, is_prime, Factorization, MAX_SUPPORTED};

use crate::error::{Error, Result};
use crate::zeta::{check_tol, limit_constant_d, zeta, zeta_product};

/// Reduced fraction with positive denominator.
pub type ExactRational = BigRational;

/// Default relative convergence threshold for [`f_limit_at`].
pub const DEFAULT_LIMIT_TOL: f64 = 1e-15;

fn recip_pow(p: u64, e: u64) -> ExactRational {
    let e = u32::try_from(e).expect("exponent fits in u32");
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), e as usize))
}

fn int(x: u64) -> BigInt {
    BigInt::from(x)
}

pub fn to_f64(x: &ExactRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // fall back for huge numerators/denominators
        let shift = x.denom().bits().max(x.numer().bits()).saturating_sub(1000);
        let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// `σ_{-k}(g) = Σ_{d | g} d^{-k}`.
pub fn sigma_minus_k(k: u32, g: u64) -> Result<ExactRational> {
    if k < 2 {
        return Err(Error::Parameter(format!("need k >= 2, got {k}")));
    }
    let fac = factorize(g)?;
    // multiplicative: σ_{-k}(p^α) = Σ_{i<=α} p^{-ki}
    Ok(fac
        .factors
        .iter()
        .map(|&(p, a)| {
            (0..=a as u64)
                .map(|i| recip_pow(p, k as u64 * i))
                .sum::<ExactRational>()
        })
        .product())
}

/// `d ↦ d^{-k}` as an arithmetic function.
pub fn recip_power(k: u32) -> impl Fn(u64) -> ExactRational {
    move |d| recip_pow(d, k as u64)
}

/// Dirichlet convolution `(fa * fb)(g) = Σ_{d | g} fa(d) fb(g/d)`.
pub fn dirichlet_convolve<F, G>(fa: F, fb: G, g: u64) -> Result<ExactRational>
where
    F: Fn(u64) -> ExactRational,
    G: Fn(u64) -> ExactRational,
{
    let fac = factorize(g)?;
    Ok(fac.divisors().into_iter().map(|d| fa(d) * fb(g / d)).sum())
}

type PrimePowerMemo = RwLock<HashMap<(u32, u64, u32), ExactRational>>;

fn fn_memo() -> &'static PrimePowerMemo {
    static MEMO: OnceLock<PrimePowerMemo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Successive rows `[f_n(p^0), ..., f_n(p^α)]` for `n = 1, 2, ...`.
struct Levels {
    p: u64,
    n: u32,
    row: Vec<ExactRational>,
}

impl Levels {
    fn new(p: u64, alpha: u32) -> Self {
        let row = (0..=alpha as u64).map(|j| recip_pow(p, 2 * j)).collect();
        Levels { p, n: 1, row }
    }

    fn advance(&mut self) {
        self.n += 1;
        let step: Vec<ExactRational> = (0..self.row.len() as u64)
            .map(|i| recip_pow(self.p, self.n as u64 * i))
            .collect();
        self.row = (0..self.row.len())
            .map(|j| (0..=j).map(|i| &step[i] * &self.row[j - i]).sum())
            .collect();
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Parameter(format!("{p} is not prime")));
    }
    Ok(())
}

/// `f_n(p^α)`, exact and memoized.
pub fn f_n_prime_power(n: u32, p: u64, alpha: u32) -> Result<ExactRational> {
    if n == 0 {
        return Err(Error::Parameter("need n >= 1".into()));
    }
    check_prime(p)?;
    if alpha == 0 {
        return Ok(ExactRational::one());
    }
    if let Some(v) = fn_memo().read().unwrap().get(&(n, p, alpha)) {
        return Ok(v.clone());
    }
    let mut levels = Levels::new(p, alpha);
    let mut computed = Vec::new();
    loop {
        computed.extend(
            levels
                .row
                .iter()
                .enumerate()
                .map(|(j, v)| ((levels.n, p, j as u32), v.clone())),
        );
        if levels.n == n {
            break;
        }
        levels.advance();
    }
    let value = levels.row[alpha as usize].clone();
    fn_memo().write().unwrap().extend(computed);
    Ok(value)
}

/// `f_n(g)` by multiplicativity.
pub fn f_n_at(n: u32, g: u64) -> Result<ExactRational> {
    if n == 0 {
        return Err(Error::Parameter("need n >= 1".into()));
    }
    factorize(g)?
        .factors
        .iter()
        .map(|&(p, a)| f_n_prime_power(n, p, a))
        .product()
}

/// Closed form `f(p) = (2p - 1) / (p^2 (p - 1))`.
pub fn f_limit_prime(p: u64) -> ExactRational {
    BigRational::new(int(2 * p - 1), int(p) * int(p) * int(p - 1))
}

/// Closed form `f(p^2) = (3p^3 - p^2 - 2p + 1) / (p^4 (p - 1)^2 (p + 1))`.
pub fn f_limit_prime_square(p: u64) -> ExactRational {
    let pb = int(p);
    let num = int(3) * pb.pow(3) - pb.pow(2) - int(2) * &pb + 1;
    let den = pb.pow(4) * int(p - 1).pow(2) * int(p + 1);
    BigRational::new(num, den)
}

type LimitMemo = RwLock<HashMap<(u64, u32, u64), ExactRational>>;

fn limit_memo() -> &'static LimitMemo {
    static MEMO: OnceLock<LimitMemo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `f(p^α)` by iterating the recurrence in `n` until successive values agree
/// to relative `tol`. Exact for the values it returns at each level; the
/// result approximates the limit from below.
pub fn f_limit_prime_power_by_recurrence(p: u64, alpha: u32, tol: f64) -> Result<ExactRational> {
    check_prime(p)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Parameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if alpha == 0 {
        return Ok(ExactRational::one());
    }
    let key = (p, alpha, tol.to_bits());
    if let Some(v) = limit_memo().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let tol_q = BigRational::from_float(tol).expect("finite tolerance");
    let mut levels = Levels::new(p, alpha);
    let mut prev = levels.row[alpha as usize].clone();
    let value = loop {
        levels.advance();
        let cur = levels.row[alpha as usize].clone();
        let diff = (&cur - &prev).abs();
        if diff <= &tol_q * &cur {
            break cur;
        }
        prev = cur;
    };
    limit_memo().write().unwrap().insert(key, value.clone());
    Ok(value)
}

/// `f(p^α)`: closed forms for `α <= 2`, recurrence limit beyond.
pub fn f_limit_prime_power(p: u64, alpha: u32, tol: f64) -> Result<ExactRational> {
    check_prime(p)?;
    match alpha {
        0 => Ok(ExactRational::one()),
        1 => Ok(f_limit_prime(p)),
        2 => Ok(f_limit_prime_square(p)),
        _ => f_limit_prime_power_by_recurrence(p, alpha, tol),
    }
}

/// The limit function `f(g) = lim_n f_n(g)`.
pub fn f_limit_at(g: u64, tol: f64) -> Result<ExactRational> {
    factorize(g)?
        .factors
        .iter()
        .map(|&(p, a)| f_limit_prime_power(p, a, tol))
        .product()
}

/// `ζ(2) · ∏_{k=2}^{n} ζ(k)`.
pub fn dn_normalizer(n: u32, tol: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    Ok(zeta(2, tol)? * zeta_product(2, n, tol)?)
}

/// Density `D_n(g)` of `gcd(det[A|x], det[A|y]) = g`.
pub fn d_n_at(n: u32, g: u64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let norm = dn_normalizer(n, tol)?;
    Ok(to_f64(&f_n_at(n, g)?) / norm)
}

/// Limit density `D(g) = d / ζ(2) · f(g)`.
pub fn d_limit_at(g: u64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let f = f_limit_at(g, DEFAULT_LIMIT_TOL.max(tol * 1e-3))?;
    Ok(limit_constant_d(tol)? / zeta(2, tol)? * to_f64(&f))
}

/// `Σ_{g=1}^{G} D_n(g) / g^s`.
pub fn dirichlet_series_partial(n: u32, s: u32, big_g: u64) -> Result<f64> {
    if big_g < 1 {
        return Err(Error::Parameter("need G >= 1".into()));
    }
    factor::check_range(big_g)?;
    let norm = dn_normalizer(n, crate::zeta::DEFAULT_TOL)?;
    let mut terms: Vec<f64> = Vec::with_capacity(big_g as usize);
    for g in 1..=big_g {
        terms.push(to_f64(&f_n_at(n, g)?) * (g as f64).powi(-(s as i32)));
    }
    // smallest first
    Ok(terms.iter().rev().sum::<f64>() / norm)
}

/// Bound on `Σ_{g>G} D_n(g) / g^s`, using `D_n(g) <= 1`.
pub fn dirichlet_series_tail_bound(s: u32, big_g: u64) -> f64 {
    if s < 2 {
        return f64::INFINITY;
    }
    (big_g as f64).powi(1 - s as i32) / (s as f64 - 1.0)
}

/// `Σ_{g>=1} D_n(g) / g^s = ζ(s+2)/ζ(2) · ∏_{k=2}^{n} ζ(s+k)/ζ(k)`.
///
/// Each position of the ordered factorization contributes a factor
/// `Σ_d d^{-(e+s)} = ζ(s+e)`. At `s = 0` this gives `Σ D_n(g) = 1`.
pub fn dirichlet_series_limit(n: u32, s: u32, tol: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    let mut acc = zeta(s + 2, tol)? / zeta(2, tol)?;
    for k in 2..=n {
        acc *= zeta(s + k, tol)? / zeta(k, tol)?;
    }
    Ok(acc)
}

/// Sums `D(g)` for `g = 1..=G`; tends to 1 from below.
pub fn d_limit_partial_sum(big_g: u64, tol: f64) -> Result<f64> {
    let scale = limit_constant_d(tol)? / zeta(2, tol)?;
    let mut terms = Vec::with_capacity(big_g as usize);
    for g in 1..=big_g {
        terms.push(to_f64(&f_limit_at(g, DEFAULT_LIMIT_TOL)?));
    }
    Ok(scale * terms.iter().rev().sum::<f64>())
}

/// True when `gcd(a, b) = 1` for two positive integers.
pub fn coprime(a: u64, b: u64) -> bool {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a == 1
}
