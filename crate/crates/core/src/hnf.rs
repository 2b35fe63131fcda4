//! Row-style Hermite normal form.
//!
//! For an `n x m` integer matrix `A` we compute the unique `H` in Hermite
//! normal form and a unimodular `U` with `U * A = H`. Columns are processed
//! left to right; in each column the entries below the settled pivot rows
//! are folded top to bottom into the pivot row with 2x2 extended-gcd
//! transforms of determinant 1, then the entries above the new pivot are
//! reduced into `[0, pivot)`.
//!
//! Note the orientation: `U` maps `A` to `H`, i.e. it is the inverse of the
//! factor in `A = U' * H`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnfResult {
    pub h: IntMatrix,
    /// Unimodular transform with `u * a == h`.
    pub u: IntMatrix,
    pub pivot_cols: Vec<usize>,
    pub pivots: Vec<BigInt>,
    pub rank: usize,
}

/// A prescribed prefix `(d_1, ..., d_k)` of an HNF diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct DiagPattern(Vec<u64>);

impl DiagPattern {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter(
                "diagonal pattern must be non-empty".into(),
            ));
        }
        Ok(DiagPattern(values))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when `diag` starts with this pattern.
    pub fn is_prefix_of(&self, diag: &[BigInt]) -> bool {
        diag.len() >= self.0.len() && self.0.iter().zip(diag).all(|(&d, x)| *x == BigInt::from(d))
    }
}

impl TryFrom<Vec<u64>> for DiagPattern {
    type Error = Error;

    fn try_from(values: Vec<u64>) -> Result<Self> {
        DiagPattern::new(values)
    }
}

impl From<DiagPattern> for Vec<u64> {
    fn from(p: DiagPattern) -> Self {
        p.0
    }
}

impl std::str::FromStr for DiagPattern {
    type Err = Error;

    /// Comma-separated list, e.g. `"1,1,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parameter(format!("bad pattern {s:?}: {e}")))?;
        DiagPattern::new(values)
    }
}

/// Hermite normal form of `a` together with its unimodular witness.
pub fn hnf(a: &IntMatrix) -> HnfResult {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows()).expect("rows >= 1");
    let pivot_cols = reduce(&mut h, Some(&mut u));
    let pivots = pivot_cols
        .iter()
        .enumerate()
        .map(|(i, &j)| h[(i, j)].clone())
        .collect();
    HnfResult {
        h,
        u,
        rank: pivot_cols.len(),
        pivot_cols,
        pivots,
    }
}

/// The HNF alone, without tracking the transform.
pub fn hnf_matrix(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    reduce(&mut h, None);
    h
}

/// Diagonal `(H_11, ..., H_qq)`, `q = min(n, m)`, of the HNF of `a`.
pub fn diag_of_hnf(a: &IntMatrix) -> Vec<BigInt> {
    let h = hnf_matrix(a);
    (0..a.rows().min(a.cols()))
        .map(|i| h[(i, i)].clone())
        .collect()
}

/// First `k` diagonal entries of the HNF of `a`.
///
/// Only the first `k` columns take part: the leading columns of an HNF are the
/// HNF of the leading columns.
pub fn diag_prefix_of_hnf(a: &IntMatrix, k: usize) -> Vec<BigInt> {
    let k = k.min(a.rows()).min(a.cols());
    if k == 0 {
        return Vec::new();
    }
    let lead = a.leading_columns(k).expect("k <= cols");
    let h = hnf_matrix(&lead);
    (0..k).map(|i| h[(i, i)].clone()).collect()
}

fn reduce(h: &mut IntMatrix, mut u: Option<&mut IntMatrix>) -> Vec<usize> {
    let (n, m) = (h.rows(), h.cols());
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for j in 0..m {
        if r == n {
            break;
        }
        for k in r + 1..n {
            if h[(k, j)].is_zero() {
                continue;
            }
            let a = h[(r, j)].clone();
            let b = h[(k, j)].clone();
            let eg = a.extended_gcd(&b);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            // [[s, t], [-b/g, a/g]] has determinant (s*a + t*b)/g = 1
            let lo = -(&b / &g);
            let hi = &a / &g;
            let coeffs = [&s, &t, &lo, &hi];
            h.combine_rows(r, k, coeffs);
            if let Some(u) = u.as_deref_mut() {
                u.combine_rows(r, k, coeffs);
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(r);
            }
        }
        let pivot = h[(r, j)].clone();
        for k in 0..r {
            let q = h[(k, j)].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            let q = -q;
            h.add_row_multiple(k, r, &q);
            if let Some(u) = u.as_deref_mut() {
                u.add_row_multiple(k, r, &q);
            }
        }
        pivot_cols.push(j);
        r += 1;
    }
    pivot_cols
}

/// Checks the three defining conditions of a Hermite normal form: nonzero rows
/// first, positive pivots in strictly increasing columns, entries above each
/// pivot in `[0, pivot)`.
pub fn is_hnf(h: &IntMatrix) -> bool {
    let mut pivots: Vec<usize> = Vec::new();
    let mut seen_zero_row = false;
    for i in 0..h.rows() {
        match h.row(i).iter().position(|x| !x.is_zero()) {
            None => seen_zero_row = true,
            Some(j) => {
                if seen_zero_row {
                    return false;
                }
                if !h[(i, j)].is_positive() {
                    return false;
                }
                if pivots.last().is_some_and(|&prev| prev >= j) {
                    return false;
                }
                pivots.push(j);
            }
        }
    }
    pivots.iter().enumerate().all(|(i, &j)| {
        let p = &h[(i, j)];
        (0..i).all(|k| !h[(k, j)].is_negative() && &h[(k, j)] < p)
    })
}
