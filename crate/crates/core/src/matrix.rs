//! Dense integer matrices with arbitrary-precision entries.
//!
//! Matrices are stored row-major. The plain-text format used by the CLI is
//!
//! ```text
//! n m
//! a11 a12 ... a1m
//! ...
//! an1 an2 ... anm
//! ```
//!
//! with single spaces between entries.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must have at least one row and column, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        Ok(m)
    }

    /// Builds a matrix from nested rows of machine integers.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)))
            .collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_row_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    /// Submatrix made of the given columns, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::Dimension(format!(
                "column {bad} out of range for {} columns",
                self.cols
            )));
        }
        let data = (0..self.rows)
            .flat_map(|i| cols.iter().map(move |&j| (i, j)))
            .map(|ij| self[ij].clone())
            .collect();
        Self::new(self.rows, cols.len(), data)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::Dimension(format!(
                "row {bad} out of range for {} rows",
                self.rows
            )));
        }
        let data = rows
            .iter()
            .flat_map(|&i| self.row(i).iter().cloned())
            .collect();
        Self::new(rows.len(), self.cols, data)
    }

    /// The first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Result<Self> {
        self.select_columns(&(0..k).collect::<Vec<_>>())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let data = (0..self.rows)
            .flat_map(|i| self.row(i).iter().chain(other.row(i)).cloned())
            .collect();
        Self::new(self.rows, self.cols + other.cols, data)
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *x = -std::mem::take(x);
        }
    }

    /// `row[target] += factor * row[source]`.
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        debug_assert_ne!(target, source);
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let delta = factor * s;
            self.data[target * self.cols + j] += delta;
        }
    }

    /// Replaces rows `a` and `b` by `(x*ra + y*rb, z*ra + w*rb)`.
    pub(crate) fn combine_rows(&mut self, a: usize, b: usize, [x, y, z, w]: [&BigInt; 4]) {
        for j in 0..self.cols {
            let ra = &self.data[a * self.cols + j];
            let rb = &self.data[b * self.cols + j];
            if ra.is_zero() && rb.is_zero() {
                continue;
            }
            let na = x * ra + y * rb;
            let nb = z * ra + w * rb;
            self.data[a * self.cols + j] = na;
            self.data[b * self.cols + j] = nb;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "{}", self.row(i).iter().join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad header {header:?}: {e}"),
            })?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header must be \"n m\", got {header:?}"),
            });
        };
        if rows == 0 || cols == 0 {
            return Err(Error::Parse {
                line: 1,
                msg: "dimensions must be positive".into(),
            });
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (idx, line) = lines.next().ok_or(Error::Parse {
                line: r + 2,
                msg: format!("expected {rows} rows, found {r}"),
            })?;
            let row: Vec<BigInt> = line
                .split_whitespace()
                .map(|t| t.parse::<BigInt>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad integer: {e}"),
                })?;
            if row.len() != cols {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {cols} entries, found {}", row.len()),
                });
            }
            data.extend(row);
        }
        if let Some((idx, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("unexpected trailing content {extra:?}"),
            });
        }
        IntMatrix::new(rows, cols, data)
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                Some(i) => {
                    m.swap_rows(i, k);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = num / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    let det = m[(n - 1, n - 1)].clone();
    Ok(if negate { -det } else { det })
}

/// Gcd of all `i x i` minors of the submatrix formed by `cols`.
///
/// Enumerates every row subset, so it is meant for small matrices (it is the
/// independent check on the HNF pivots).
pub fn minors_gcd(a: &IntMatrix, i: usize, cols: &[usize]) -> Result<BigInt> {
    if i == 0 || i > a.rows || i > a.cols {
        return Err(Error::Dimension(format!(
            "minor size {i} invalid for {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if cols.len() != i {
        return Err(Error::Dimension(format!(
            "need {i} columns for {i}x{i} minors, got {}",
            cols.len()
        )));
    }
    if cols.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(
            "columns must be strictly increasing".into(),
        ));
    }
    let sub = a.select_columns(cols)?;
    let mut g = BigInt::zero();
    for rows in (0..a.rows).combinations(i) {
        let minor = determinant(&sub.select_rows(&rows)?)?;
        g = g.gcd(&minor);
        if g.is_one() {
            break;
        }
    }
    Ok(g.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cofactor_det(a: &IntMatrix) -> BigInt {
        let n = a.rows();
        if n == 1 {
            return a[(0, 0)].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = a
                .select_rows(&(1..n).collect::<Vec<_>>())
                .unwrap()
                .select_columns(&keep)
                .unwrap();
            let term = &a[(0, j)] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(
            determinant(&IntMatrix::identity(3).unwrap()).unwrap(),
            BigInt::one()
        );
        let a = IntMatrix::from_rows(&[[2, 1], [0, 3]]).unwrap();
        assert_eq!(determinant(&a).unwrap(), BigInt::from(6));
        let singular = IntMatrix::from_rows(&[[1, 2], [2, 4]]).unwrap();
        assert!(determinant(&singular).unwrap().is_zero());
        let needs_swap = IntMatrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        assert_eq!(determinant(&needs_swap).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn determinant_rejects_non_square() {
        let a = IntMatrix::zeros(2, 3).unwrap();
        assert!(matches!(determinant(&a), Err(Error::Dimension(_))));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            for _ in 0..200 {
                let rows: Vec<Vec<i64>> = (0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect())
                    .collect();
                let a = IntMatrix::from_rows(&rows).unwrap();
                assert_eq!(determinant(&a).unwrap(), cofactor_det(&a), "{a}");
            }
        }
    }

    #[test]
    fn minors_gcd_examples() {
        let a = IntMatrix::from_rows(&[[2, 1], [0, 3]]).unwrap();
        assert_eq!(minors_gcd(&a, 1, &[0]).unwrap(), BigInt::from(2));
        assert_eq!(minors_gcd(&a, 2, &[0, 1]).unwrap(), BigInt::from(6));
        let z = IntMatrix::zeros(3, 3).unwrap();
        for i in 1..=3 {
            let cols: Vec<usize> = (0..i).collect();
            assert!(minors_gcd(&z, i, &cols).unwrap().is_zero());
        }
        let neg = IntMatrix::from_rows(&[[-4], [-6]]).unwrap();
        assert_eq!(minors_gcd(&neg, 1, &[0]).unwrap(), BigInt::from(2));
    }

    #[test]
    fn minors_gcd_errors() {
        let a = IntMatrix::from_rows(&[[2, 1], [0, 3]]).unwrap();
        assert!(matches!(
            minors_gcd(&a, 3, &[0, 1, 2]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(minors_gcd(&a, 2, &[0]), Err(Error::Dimension(_))));
        assert!(minors_gcd(&a, 2, &[1, 0]).is_err());
        assert!(minors_gcd(&a, 1, &[5]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let a = IntMatrix::from_rows(&[[1, -2, 3], [0, 40, -5]]).unwrap();
        let text = a.to_string();
        assert_eq!(text, "2 3\n1 -2 3\n0 40 -5\n");
        assert_eq!(text.parse::<IntMatrix>().unwrap(), a);
        // no trailing newline required
        assert_eq!(
            "1 1\n7".parse::<IntMatrix>().unwrap()[(0, 0)],
            BigInt::from(7)
        );
    }

    #[test]
    fn text_format_errors() {
        assert!(matches!(
            "".parse::<IntMatrix>(),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            "2 2\n1 2\n".parse::<IntMatrix>(),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            "2 2\n1 2\n3\n".parse::<IntMatrix>(),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            "1 2\n1 x\n".parse::<IntMatrix>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!("0 2\n".parse::<IntMatrix>().is_err());
        assert!("1 1\n1\n2\n".parse::<IntMatrix>().is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(IntMatrix::zeros(0, 3).is_err());
        assert!(IntMatrix::new(2, 2, vec![BigInt::one(); 3]).is_err());
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
    }
}
