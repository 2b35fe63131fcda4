//! Closed-form natural densities of HNF diagonal patterns.
//!
//! For `n x m` matrices whose entries are drawn from large translated cubes,
//! the set of matrices whose HNF diagonal starts with `(d_1, ..., d_k)`, all
//! `d_i >= 1`, has density
//!
//! ```text
//! ( ζ(n) ζ(n-1) ... ζ(n-k+1) · d_1^n d_2^(n-1) ... d_k^(n-k+1) )^(-1)
//! ```
//!
//! provided `k <= m` when `m < n`, and `k < n` otherwise. A zero anywhere in
//! the prefix gives density 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hnf::DiagPattern;
use crate::zeta::{check_tol, limit_constant_d, zeta_product_bounded};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
    /// Absolute error bound on `value`.
    pub error_bound: f64,
    /// Arguments `s` of the ζ(s) factors in the denominator.
    pub zeta_args: Vec<u32>,
    /// `(d, e)` pairs contributing `d^e` to the denominator.
    pub pivot_factors: Vec<(u64, u32)>,
    /// Set when the value is an estimate rather than a proven density.
    pub heuristic: bool,
}

impl DensityValue {
    fn zero() -> Self {
        DensityValue {
            value: 0.0,
            error_bound: 0.0,
            zeta_args: Vec::new(),
            pivot_factors: Vec::new(),
            heuristic: false,
        }
    }

    /// Denominator `∏ ζ(s) · ∏ d^e` recomputed from the recorded factors.
    pub fn denominator(&self, tol: f64) -> Result<f64> {
        let mut acc = 1.0;
        for &s in &self.zeta_args {
            acc *= crate::zeta::zeta(s, tol)?;
        }
        for &(d, e) in &self.pivot_factors {
            acc *= (d as f64).powi(e as i32);
        }
        Ok(acc)
    }
}

/// `(∏_{i} ζ(n-i+1) · d_i^(n-i+1))^(-1)` for a zero-free prefix.
fn pattern_density(n: usize, values: &[u64], tol: f64) -> Result<DensityValue> {
    let k = values.len();
    let lo = (n - k + 1) as u32;
    let hi = n as u32;
    let z = zeta_product_bounded(lo, hi, tol)?;
    let pivot_factors: Vec<(u64, u32)> = values
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, (n - i) as u32))
        .collect();
    let powers: f64 = pivot_factors
        .iter()
        .map(|&(d, e)| (d as f64).powi(e as i32))
        .product();
    let value = 1.0 / (z.value * powers);
    let rel = z.error_bound / z.value + (k as f64 + 1.0) * f64::EPSILON;
    Ok(DensityValue {
        value,
        error_bound: value * rel,
        zeta_args: (lo..=hi).rev().collect(),
        pivot_factors,
        heuristic: false,
    })
}

/// Whether `k` prescribed diagonal entries are covered for `n x m` matrices.
pub fn admissible(n: usize, m: usize, k: usize) -> bool {
    k >= 1 && if m < n { k <= m } else { k < n }
}

/// Density of `n x m` matrices whose HNF diagonal begins with `pattern`.
pub fn diag_density(n: usize, m: usize, pattern: &DiagPattern, tol: f64) -> Result<DensityValue> {
    check_tol(tol)?;
    let k = pattern.len();
    if n == 0 || m == 0 {
        return Err(Error::Parameter(format!(
            "dimensions must be positive, got {n}x{m}"
        )));
    }
    if !admissible(n, m, k) {
        let bound = if m < n {
            format!("k <= m = {m}")
        } else {
            format!("k < n = {n}")
        };
        return Err(Error::UnsupportedRange(format!(
            "pattern length {k} for {n}x{m} matrices; need {bound}"
        )));
    }
    // Δ-sets are nested, so a zero anywhere forces density 0
    if pattern.values().contains(&0) {
        return Ok(DensityValue::zero());
    }
    pattern_density(n, pattern.values(), tol)
}

/// Density of `n x n` matrices whose HNF diagonal is
/// `(d_1, ..., d_{n-1}, det / ∏ d_i)`.
pub fn full_diag_density(n: usize, d: &[u64], tol: f64) -> Result<DensityValue> {
    check_tol(tol)?;
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    if d.len() != n - 1 {
        return Err(Error::Parameter(format!(
            "need {} prescribed entries for n = {n}, got {}",
            n - 1,
            d.len()
        )));
    }
    if d.contains(&0) {
        return Err(Error::Parameter(
            "prescribed diagonal entries must be >= 1".into(),
        ));
    }
    pattern_density(n, d, tol)
}

/// Density of square (or wide) matrices with diagonal prefix `d_prefix` whose
/// last diagonal entry is `≡ r (mod d)`; independent of `r`.
pub fn residue_density(
    n: usize,
    d_prefix: &[u64],
    d: u64,
    r: u64,
    tol: f64,
) -> Result<DensityValue> {
    if d == 0 {
        return Err(Error::Parameter("modulus d must be >= 1".into()));
    }
    if r >= d {
        return Err(Error::Parameter(format!(
            "residue {r} must be below modulus {d}"
        )));
    }
    let mut dv = full_diag_density(n, d_prefix, tol)?;
    dv.value /= d as f64;
    dv.error_bound /= d as f64;
    if d > 1 {
        dv.pivot_factors.push((d, 1));
    }
    Ok(dv)
}

/// Density of `n x m` unimodular matrices (`n > m`), i.e. those whose HNF
/// diagonal is all ones.
pub fn unimodular_density(n: usize, m: usize, tol: f64) -> Result<DensityValue> {
    if m == 0 || n <= m {
        return Err(Error::UnsupportedRange(format!(
            "unimodular density needs n > m >= 1, got {n}x{m}"
        )));
    }
    diag_density(n, m, &DiagPattern::new(vec![1; m])?, tol)
}

/// Basis shapes common in lattice-based cryptography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeShape {
    /// `[I_n | x]`, an `n x (n+1)` basis.
    Knapsack,
    /// `[[I_{n-1}, x], [0, q]]`.
    RandomBasis,
    /// `[[I_n, H], [0, q I_n]]` with `q = 2^s`.
    Ntru,
}

impl std::str::FromStr for LatticeShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knapsack" => Ok(LatticeShape::Knapsack),
            "random" | "random_basis" | "random-basis" => Ok(LatticeShape::RandomBasis),
            "ntru" => Ok(LatticeShape::Ntru),
            other => Err(Error::Parameter(format!("unknown lattice shape {other:?}"))),
        }
    }
}

/// Density of matrices whose HNF has the given basis shape.
///
/// The NTRU value `d · 2^(-n² s / 2)` is only a rough estimate and is flagged
/// as heuristic.
pub fn lattice_shape_density(
    shape: LatticeShape,
    n: usize,
    s: Option<u32>,
    tol: f64,
) -> Result<DensityValue> {
    check_tol(tol)?;
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    match shape {
        LatticeShape::Knapsack => Ok(DensityValue::zero()),
        LatticeShape::RandomBasis => full_diag_density(n, &vec![1; n - 1], tol),
        LatticeShape::Ntru => {
            let s = s
                .filter(|&s| s >= 1)
                .ok_or_else(|| Error::Parameter("ntru shape needs s >= 1 (q = 2^s)".into()))?;
            let d = limit_constant_d(tol)?;
            let exponent = (n * n) as f64 * s as f64 / 2.0;
            let value = d * (-exponent).exp2();
            Ok(DensityValue {
                value,
                error_bound: value * 4.0 * f64::EPSILON,
                zeta_args: Vec::new(),
                pivot_factors: Vec::new(),
                heuristic: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::zeta;

    const TOL: f64 = 1e-12;

    fn pat(v: &[u64]) -> DiagPattern {
        DiagPattern::new(v.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn diag_density_examples() {
        let coprime = diag_density(2, 2, &pat(&[1]), TOL).unwrap();
        assert!(close(coprime.value, 0.607927, 1e-6));
        assert_eq!(coprime.zeta_args, vec![2]);
        assert_eq!(diag_density(3, 3, &pat(&[1, 0]), TOL).unwrap().value, 0.0);
        assert_eq!(diag_density(3, 3, &pat(&[0, 1]), TOL).unwrap().value, 0.0);
        let two = diag_density(2, 2, &pat(&[2]), TOL).unwrap();
        assert!(close(two.value, 1.0 / (zeta(2, TOL).unwrap() * 4.0), 1e-15));
        assert!(close(two.value, 0.151982, 1e-6));
        let n3 = diag_density(3, 3, &pat(&[2]), TOL).unwrap();
        assert!(close(n3.value, 0.103988, 1e-6));
    }

    #[test]
    fn admissible_range() {
        // square: k < n
        assert!(diag_density(3, 3, &pat(&[1, 1]), TOL).is_ok());
        assert!(matches!(
            diag_density(3, 3, &pat(&[1, 1, 1]), TOL),
            Err(Error::UnsupportedRange(_))
        ));
        // wide: k < n still
        assert!(matches!(
            diag_density(2, 5, &pat(&[1, 1]), TOL),
            Err(Error::UnsupportedRange(_))
        ));
        // tall: k <= m
        assert!(diag_density(3, 2, &pat(&[1, 1]), TOL).is_ok());
        assert!(matches!(
            diag_density(4, 2, &pat(&[1, 1, 1]), TOL),
            Err(Error::UnsupportedRange(_))
        ));
        assert!(diag_density(1, 1, &pat(&[1]), TOL).is_err());
    }

    #[test]
    fn full_diagonal() {
        let d = full_diag_density(2, &[1], TOL).unwrap();
        assert!(close(d.value, 0.607927, 1e-6));
        assert!(close(
            full_diag_density(3, &[1, 1], TOL).unwrap().value,
            0.505740,
            1e-6
        ));
        let d21 = full_diag_density(3, &[2, 1], TOL).unwrap();
        assert!(close(d21.value, 0.063217, 1e-6));
        assert_eq!(d21.pivot_factors, vec![(2, 3), (1, 2)]);
        assert!(matches!(
            full_diag_density(3, &[0, 1], TOL),
            Err(Error::Parameter(_))
        ));
        assert!(full_diag_density(3, &[1], TOL).is_err());
        assert!(full_diag_density(1, &[], TOL).is_err());
    }

    #[test]
    fn residues() {
        let r0 = residue_density(2, &[1], 5, 0, TOL).unwrap();
        assert!(close(r0.value, 0.121585, 1e-6));
        assert_eq!(r0.value, residue_density(2, &[1], 5, 3, TOL).unwrap().value);
        let prefix = full_diag_density(2, &[1], TOL).unwrap().value;
        assert_eq!(residue_density(2, &[1], 1, 0, TOL).unwrap().value, prefix);
        assert!(matches!(
            residue_density(2, &[1], 5, 5, TOL),
            Err(Error::Parameter(_))
        ));
        assert!(residue_density(2, &[1], 0, 0, TOL).is_err());
        for n in 2..=5 {
            let prefix: Vec<u64> = (1..n as u64).collect();
            let whole = full_diag_density(n, &prefix, TOL).unwrap().value;
            let d = 7;
            let sum: f64 = (0..d)
                .map(|r| residue_density(n, &prefix, d, r, TOL).unwrap().value)
                .sum();
            assert!(close(sum, whole, 1e-15 * whole.max(1.0)));
        }
    }

    #[test]
    fn unimodular() {
        assert!(close(
            unimodular_density(2, 1, TOL).unwrap().value,
            0.607927,
            1e-6
        ));
        assert!(close(
            unimodular_density(3, 2, TOL).unwrap().value,
            0.505740,
            1e-6
        ));
        assert!(close(
            unimodular_density(5, 1, TOL).unwrap().value,
            0.964387,
            1e-6
        ));
        assert!(matches!(
            unimodular_density(2, 2, TOL),
            Err(Error::UnsupportedRange(_))
        ));
        assert!(unimodular_density(2, 3, TOL).is_err());
    }

    #[test]
    fn lattice_shapes() {
        for n in 2..10 {
            let k = lattice_shape_density(LatticeShape::Knapsack, n, None, TOL).unwrap();
            assert_eq!(k.value, 0.0);
        }
        let r2 = lattice_shape_density(LatticeShape::RandomBasis, 2, None, TOL).unwrap();
        assert!(close(r2.value, 0.607927, 1e-6));
        let d = limit_constant_d(TOL).unwrap();
        let mut prev = 1.0;
        for n in 2..60 {
            let v = lattice_shape_density(LatticeShape::RandomBasis, n, None, TOL)
                .unwrap()
                .value;
            assert!(v <= prev && v >= d - 1e-15);
            prev = v;
        }
        assert!(close(prev, 0.43575707677, 1e-11));
        let ntru = lattice_shape_density(LatticeShape::Ntru, 2, Some(1), TOL).unwrap();
        assert!(ntru.heuristic);
        assert!(close(ntru.value, d / 4.0, 1e-15));
        assert!(lattice_shape_density(LatticeShape::Ntru, 4, None, TOL).is_err());
        assert!(lattice_shape_density(LatticeShape::RandomBasis, 1, None, TOL).is_err());
        assert_eq!(
            "random".parse::<LatticeShape>().unwrap(),
            LatticeShape::RandomBasis
        );
        assert!("cube".parse::<LatticeShape>().is_err());
    }

    #[test]
    fn denominator_invariant() {
        for (n, m, p) in [
            (2, 2, vec![3]),
            (4, 4, vec![1, 2, 3]),
            (5, 3, vec![2, 2, 7]),
        ] {
            let dv = diag_density(n, m, &pat(&p), TOL).unwrap();
            assert!(close(dv.value * dv.denominator(TOL).unwrap(), 1.0, 1e-9));
            assert!((0.0..=1.0).contains(&dv.value));
            assert!(dv.error_bound <= TOL);
        }
        let r = residue_density(3, &[2, 1], 4, 1, TOL).unwrap();
        assert!(close(r.value * r.denominator(TOL).unwrap(), 1.0, 1e-9));
    }

    #[test]
    fn extending_the_pattern_sums_back() {
        // Σ_{d_{k+1} <= G} D(d_1..d_k, d_{k+1}) approaches D(d_1..d_k) from
        // below, with gap ≤ D(d_1..d_k) · (G^{1-e}/(e-1)) / ζ(e), e = n - k.
        for (n, m, prefix) in [
            (3, 3, vec![1]),
            (4, 4, vec![2]),
            (4, 3, vec![1, 3]),
            (5, 5, vec![1, 1]),
        ] {
            let whole = diag_density(n, m, &pat(&prefix), TOL).unwrap().value;
            let e = (n - prefix.len()) as i32;
            let big_g = 2000u64;
            let mut partial = 0.0;
            for d in 1..=big_g {
                let mut p = prefix.clone();
                p.push(d);
                partial += diag_density(n, m, &pat(&p), TOL).unwrap().value;
            }
            let gap_bound = whole * (big_g as f64).powi(1 - e)
                / (e as f64 - 1.0)
                / zeta(e as u32, TOL).unwrap();
            assert!(partial <= whole + 1e-12);
            assert!(whole - partial <= gap_bound + 1e-12, "{n}x{m} {prefix:?}");
        }
        // first-entry family for 2x2 sums to 1
        let mut partial = 0.0;
        for d in 1..=100_000u64 {
            partial += diag_density(2, 2, &pat(&[d]), TOL).unwrap().value;
        }
        assert!(partial < 1.0 && 1.0 - partial < 1e-5 / zeta(2, TOL).unwrap() + 1e-12);
    }
}
