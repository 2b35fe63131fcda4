//! Riemann zeta at integer arguments `s >= 2`.
//!
//! `ζ(s)` is evaluated as a partial sum `Σ_{k<N} k^{-s}` plus the integral
//! tail `N^{1-s}/(s-1)`, refined by Euler-Maclaurin correction terms. For
//! real `s > 1` the remainder after the last correction is bounded by the
//! magnitude of the first omitted term, which gives a rigorous truncation
//! bound; f64 rounding is added on top.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};

/// Default absolute tolerance for zeta values and densities.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Smallest tolerance that f64 evaluation can honour.
pub const MIN_TOL: f64 = 1e-14;

// B_2, B_4, ..., B_30
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// A zeta value with its absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    pub error_bound: f64,
}

fn memo() -> &'static RwLock<HashMap<u32, ZetaValue>> {
    static MEMO: OnceLock<RwLock<HashMap<u32, ZetaValue>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Parameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if tol < MIN_TOL {
        return Err(Error::Parameter(format!(
            "tolerance {tol:e} is below the f64 resolution {MIN_TOL:e}"
        )));
    }
    Ok(())
}

/// `ζ(s)` within `tol`.
pub fn zeta(s: u32, tol: f64) -> Result<f64> {
    Ok(zeta_bounded(s, tol)?.value)
}

/// `ζ(s)` with the achieved error bound (always `<= tol`).
pub fn zeta_bounded(s: u32, tol: f64) -> Result<ZetaValue> {
    if s < 2 {
        return Err(Error::Domain(format!("ζ(s) diverges for s = {s}")));
    }
    check_tol(tol)?;
    if let Some(z) = memo().read().unwrap().get(&s) {
        return Ok(*z);
    }
    let z = euler_maclaurin(s);
    debug_assert!(z.error_bound <= MIN_TOL, "s={s}: {:e}", z.error_bound);
    memo().write().unwrap().insert(s, z);
    Ok(z)
}

fn euler_maclaurin(s: u32) -> ZetaValue {
    if s > 1100 {
        // 2^-s underflows; ζ(s) = 1 + 2^-s + ... rounds to 1
        return ZetaValue {
            value: 1.0,
            error_bound: f64::EPSILON,
        };
    }
    let sf = s as f64;
    let n = 16u32;
    let nf = n as f64;
    // smallest terms first
    let mut sum = 0.0;
    for k in (2..n).rev() {
        sum += (k as f64).powf(-sf);
    }
    let n_pow = nf.powf(-sf);
    let mut tail = nf * n_pow / (sf - 1.0) + 0.5 * n_pow;
    // T_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * N^{-s-2j+1}
    let mut terms = [0.0; BERNOULLI_EVEN.len()];
    let mut rising = sf;
    let mut fact = 2.0;
    let mut npow = n_pow / nf;
    for (j, (t, b)) in terms.iter_mut().zip(BERNOULLI_EVEN).enumerate() {
        *t = b / fact * rising * npow;
        let j = (j + 1) as f64;
        rising *= (sf + 2.0 * j - 1.0) * (sf + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        npow /= nf * nf;
    }
    // keep terms until the next one is negligible; the first omitted term
    // bounds the remainder
    let mut bound = terms[terms.len() - 1].abs();
    for (j, t) in terms.iter().enumerate() {
        tail += t;
        match terms.get(j + 1) {
            Some(next) if next.abs() < 1e-18 => {
                bound = next.abs();
                break;
            }
            _ => {}
        }
    }
    let value = 1.0 + (sum + tail);
    ZetaValue {
        value,
        error_bound: bound + 4.0 * f64::EPSILON * value,
    }
}

/// `∏_{j=lo}^{hi} ζ(j)` within `tol`.
pub fn zeta_product(lo: u32, hi: u32, tol: f64) -> Result<f64> {
    Ok(zeta_product_bounded(lo, hi, tol)?.value)
}

pub fn zeta_product_bounded(lo: u32, hi: u32, tol: f64) -> Result<ZetaValue> {
    if lo < 2 {
        return Err(Error::Domain(format!("ζ({lo}) is not finite")));
    }
    if lo > hi {
        return Err(Error::Parameter(format!(
            "empty zeta product: lo {lo} > hi {hi}"
        )));
    }
    check_tol(tol)?;
    let mut value = 1.0;
    let mut rel = 0.0;
    for j in lo..=hi {
        let z = zeta_bounded(j, tol)?;
        value *= z.value;
        rel += z.error_bound / z.value + f64::EPSILON;
    }
    Ok(ZetaValue {
        value,
        error_bound: value * rel,
    })
}

/// The constant `(∏_{j>=2} ζ(j))^{-1} ≈ 0.43575707677`.
///
/// For `j >= 3`, `ln ζ(j) <= ζ(j) - 1 <= 2^{-j} (1 + 2/(j-1)) <= 2^{1-j}`, so
/// the factors beyond `J` change the product by at most `exp(2^{1-J}) - 1`.
/// The product is extended until that bound is below f64 resolution.
pub fn limit_constant_d(tol: f64) -> Result<f64> {
    check_tol(tol)?;
    static D: OnceLock<f64> = OnceLock::new();
    Ok(*D.get_or_init(|| {
        let mut j = 2u32;
        let mut prod = 1.0;
        loop {
            prod *= zeta_bounded(j, MIN_TOL).expect("j >= 2").value;
            // tail factors j+1, j+2, ...: relative bound 2^{1-j}
            if j >= 3 && (2.0f64).powi(1 - j as i32) < f64::EPSILON / 4.0 {
                break;
            }
            j += 1;
        }
        1.0 / prod
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Independent check: direct partial sum bracketed by the integral tail,
    /// `S_N + ∫_{N+1}^∞ x^{-s} <= ζ(s) <= S_N + ∫_N^∞ x^{-s}`.
    fn bracket(s: u32, n: u64) -> (f64, f64) {
        let sf = s as f64;
        let partial: f64 = (1..=n).rev().map(|k| (k as f64).powf(-sf)).sum();
        let lo = partial + ((n + 1) as f64).powf(1.0 - sf) / (sf - 1.0);
        let hi = partial + (n as f64).powf(1.0 - sf) / (sf - 1.0);
        (lo, hi)
    }

    #[test]
    fn known_values() {
        assert!((zeta(2, 1e-12).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4, 1e-12).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(4, 1e-12).unwrap() - 1.082323).abs() < 1e-6);
        assert!((zeta(6, 1e-12).unwrap() - PI.powi(6) / 945.0).abs() < 1e-14);
        assert!((zeta(40, 1e-13).unwrap() - (1.0 + 2f64.powi(-40))).abs() < 1e-13);
    }

    #[test]
    fn agrees_with_integral_bracket() {
        for s in 2..=30 {
            let (lo, hi) = bracket(s, 200_000);
            let z = zeta(s, 1e-12).unwrap();
            assert!(
                z >= lo - 1e-15 && z <= hi + 1e-15,
                "s={s}: {lo} <= {z} <= {hi}"
            );
        }
    }

    #[test]
    fn bound_respects_tolerance() {
        for s in [2, 3, 5, 10, 50, 200, 2000] {
            let z = zeta_bounded(s, 1e-12).unwrap();
            assert!(z.error_bound <= 1e-12, "s={s}: {:e}", z.error_bound);
        }
    }

    #[test]
    fn domain_and_parameter_errors() {
        assert!(matches!(zeta(1, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(zeta(0, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(zeta(2, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(zeta(2, 1e-20), Err(Error::Parameter(_))));
        assert!(matches!(zeta_product(1, 3, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(
            zeta_product(4, 3, 1e-12),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn products() {
        assert_eq!(zeta_product(2, 2, 1e-12).unwrap(), zeta(2, 1e-12).unwrap());
        assert!((zeta_product(2, 3, 1e-12).unwrap() - 1.977304).abs() < 1e-6);
    }

    #[test]
    fn limit_constant() {
        let d = limit_constant_d(1e-10).unwrap();
        assert!((d - 0.43575707677).abs() < 1e-10);
        assert!((limit_constant_d(1e-3).unwrap() - 0.436).abs() < 1e-3);
        // partial products decrease towards d from above
        let mut prev = f64::INFINITY;
        for j in 2..40 {
            let partial = 1.0 / zeta_product(2, j, 1e-12).unwrap();
            assert!(partial <= prev && partial >= d - 1e-15);
            // tail bound: partial / d - 1 <= exp(2^{1-j}) - 1
            assert!(partial / d - 1.0 <= (2f64.powi(1 - j as i32)).exp_m1() + 1e-15);
            prev = partial;
        }
    }
}
