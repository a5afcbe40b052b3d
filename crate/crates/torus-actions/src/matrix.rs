//! Dense integer matrices with arbitrary-precision entries.
//!
//! Everything here is exact: determinants use fraction-free (Bareiss)
//! elimination, inverses exist only for unimodular matrices and are computed
//! via the adjugate, and serialization goes through JSON integer literals of
//! unlimited width.  Shape mismatches in arithmetic are programming errors
//! and panic; domain failures (non-unimodular inverse, ragged input) are
//! reported as [`Error`] values.

use std::fmt;
use std::ops::{Index, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A `rows x cols` integer matrix in row-major order.
///
/// Zero-dimensional shapes are permitted (they arise naturally as kernels of
/// injective maps); domain-level constructors such as action specifications
/// enforce positive dimensions themselves.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    /// Builds a matrix from row-major entries; `entries.len()` must equal
    /// `rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count {} does not match shape {}x{}",
            entries.len(),
            rows,
            cols
        );
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix by evaluating `f(i, j)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Convenience constructor from machine-integer rows; panics on ragged
    /// input (use [`IntMatrix::from_bigint_rows`] for fallible construction).
    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "row {i} has {} entries, expected {c}", row.len());
        }
        IntMatrix::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    /// Builds a matrix from rows of big integers, rejecting ragged input.
    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::RaggedRows {
                    row: i,
                    got: row.len(),
                    expected: c,
                });
            }
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix whose columns are the given vectors (all of length
    /// `dim`).
    pub fn from_columns(dim: usize, columns: &[Vec<BigInt>]) -> Result<Self, Error> {
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::RaggedRows {
                    row: j,
                    got: col.len(),
                    expected: dim,
                });
            }
        }
        Ok(IntMatrix::from_fn(dim, columns.len(), |i, j| {
            columns[j][i].clone()
        }))
    }

    /// The `n x n` identity matrix.
    pub fn identity(n: usize) -> Self {
        IntMatrix::from_fn(n, n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    }

    /// The `rows x cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
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

    /// Entry at row `i`, column `j` (0-based).
    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &self.entries[i * self.cols + j]
    }

    /// Overwrites the entry at row `i`, column `j` (0-based).
    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        self.entries[i * self.cols + j] = value;
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Matrix product; panics unless `self.cols == rhs.rows`.
    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        IntMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.at(i, k) * rhs.at(k, j)).sum()
        })
    }

    /// Matrix-vector product; panics unless `v.len() == self.cols`.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length {} != {}", v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.at(i, k) * &v[k]).sum())
            .collect()
    }

    /// Entry-wise sum; panics on shape mismatch.
    pub fn add(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        IntMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + rhs.at(i, j))
    }

    /// Entry-wise difference; panics on shape mismatch.
    pub fn sub(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        IntMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - rhs.at(i, j))
    }

    /// Entry-wise negation.
    pub fn neg(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| -self.at(i, j))
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IntMatrix::identity(self.rows)
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    ///
    /// Panics if the matrix is not square.  The 0x0 determinant is 1.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a {}x{} matrix", self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let mut negated = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        negated = !negated;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    // Bareiss update: the division by the previous pivot is exact.
                    let num = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = num / &prev;
                }
                a[i * n + k] = BigInt::zero();
            }
            prev = a[k * n + k].clone();
        }
        let det = a[n * n - 1].clone();
        if negated {
            -det
        } else {
            det
        }
    }

    /// True iff the determinant is +1 or -1.
    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().abs().is_one()
    }

    /// Exact inverse of a unimodular matrix, via the adjugate.
    ///
    /// Returns [`Error::NotUnimodular`] (with the offending determinant) when
    /// the matrix is not invertible over the integers; panics if not square.
    pub fn inverse(&self) -> Result<IntMatrix, Error> {
        assert!(self.is_square(), "inverse of a {}x{} matrix", self.rows, self.cols);
        let det = self.determinant();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular { det });
        }
        let n = self.rows;
        let adjugate = IntMatrix::from_fn(n, n, |i, j| {
            // adj[i][j] is the (j, i) cofactor.
            let minor = self.minor(j, i).determinant();
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        });
        Ok(if det.is_one() { adjugate } else { adjugate.neg() })
    }

    /// The matrix with row `i` and column `j` removed.
    fn minor(&self, i: usize, j: usize) -> IntMatrix {
        IntMatrix::from_fn(self.rows - 1, self.cols - 1, |r, c| {
            let rr = if r < i { r } else { r + 1 };
            let cc = if c < j { c } else { c + 1 };
            self.at(rr, cc).clone()
        })
    }

    /// Integer power; negative exponents invert first (and hence require a
    /// unimodular matrix).
    pub fn pow(&self, k: i64) -> Result<IntMatrix, Error> {
        assert!(self.is_square(), "power of a {}x{} matrix", self.rows, self.cols);
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = IntMatrix::identity(self.rows);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Stacks matrices vertically; panics unless all column counts agree.
    pub fn vstack(parts: &[&IntMatrix]) -> IntMatrix {
        assert!(!parts.is_empty(), "vstack of nothing");
        let cols = parts[0].cols;
        let rows = parts.iter().map(|m| m.rows).sum();
        for m in parts {
            assert_eq!(m.cols, cols, "vstack with mismatched column counts");
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for m in parts {
            entries.extend_from_slice(&m.entries);
        }
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// The block with rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> IntMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        IntMatrix::from_fn(r1 - r0, c1 - c0, |i, j| self.at(r0 + i, c0 + j).clone())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        self.at(i, j)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        IntMatrix::mul(self, rhs)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({self})")
    }
}

/// Renders a big integer as a JSON number of unlimited width.
pub(crate) fn bigint_to_number(v: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string())
        .expect("an integer literal is always a valid JSON number")
}

/// Parses a JSON number as a big integer, rejecting fractional or exponent
/// forms — lattice data must be given by integer literals.
pub(crate) fn number_to_bigint(n: &serde_json::Number) -> Result<BigInt, Error> {
    BigInt::from_str(&n.to_string())
        .map_err(|_| Error::InvalidInput(format!("expected an integer entry, got {n}")))
}

/// `#[serde(with = ...)]` adapter carrying a big integer as an exact JSON
/// number.
pub(crate) mod json_bigint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
        bigint_to_number(v).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigInt, D::Error> {
        let n = serde_json::Number::deserialize(deserializer)?;
        number_to_bigint(&n).map_err(de::Error::custom)
    }
}

/// `#[serde(with = ...)]` adapter for vectors of big integers.
pub(crate) mod json_bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], serializer: S) -> Result<S::Ok, S::Error> {
        let numbers: Vec<serde_json::Number> = v.iter().map(bigint_to_number).collect();
        numbers.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<BigInt>, D::Error> {
        let numbers = Vec::<serde_json::Number>::deserialize(deserializer)?;
        numbers
            .iter()
            .map(|n| number_to_bigint(n).map_err(de::Error::custom))
            .collect()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<serde_json::Number> =
                (0..self.cols).map(|j| bigint_to_number(self.at(i, j))).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Vec<Vec<serde_json::Number>> = Vec::deserialize(deserializer)?;
        let mut rows = Vec::with_capacity(raw.len());
        for row in &raw {
            rows.push(
                row.iter()
                    .map(|n| number_to_bigint(n).map_err(de::Error::custom))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        IntMatrix::from_bigint_rows(rows).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn determinant_of_identity_is_one() {
        assert_eq!(IntMatrix::identity(4).determinant(), BigInt::one());
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(m(&[&[2, 4], &[6, 8]]).determinant(), BigInt::from(-8));
        // Zero pivot forces a row swap.
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).determinant(), BigInt::zero());
        assert_eq!(
            m(&[&[2, 0, 1], &[1, 3, -1], &[0, 5, 2]]).determinant(),
            BigInt::from(27)
        );
    }

    #[test]
    // The cofactor rule is written out literally, zero terms included.
    #[allow(clippy::identity_op, clippy::erasing_op)]
    fn determinant_matches_cofactor_expansion_on_random_entries() {
        // Cross-check Bareiss against a directly-coded 3x3 rule.
        let a = m(&[&[3, -7, 11], &[0, 4, -2], &[5, 1, 9]]);
        let expect = 3 * (4 * 9 - (-2) * 1) - (-7) * (0 * 9 - (-2) * 5) + 11 * (0 * 1 - 4 * 5);
        assert_eq!(a.determinant(), BigInt::from(expect));
    }

    #[test]
    fn inverse_of_unimodular_matrix() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());
    }

    #[test]
    fn inverse_rejects_non_unimodular() {
        let err = m(&[&[1, 1], &[0, 2]]).inverse().unwrap_err();
        assert_eq!(
            err,
            Error::NotUnimodular {
                det: BigInt::from(2)
            }
        );
    }

    #[test]
    fn inverse_round_trips_in_dimension_three() {
        let a = m(&[&[1, 2, 3], &[0, 1, 4], &[0, 0, -1]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());
    }

    #[test]
    fn negative_powers_invert() {
        let a = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(a.pow(-3).unwrap(), m(&[&[1, -3], &[0, 1]]));
        assert_eq!(a.pow(0).unwrap(), IntMatrix::identity(2));
        assert_eq!(a.pow(5).unwrap(), m(&[&[1, 5], &[0, 1]]));
    }

    #[test]
    fn vstack_concatenates_rows() {
        let a = m(&[&[1, 2]]);
        let b = m(&[&[3, 4], &[5, 6]]);
        assert_eq!(
            IntMatrix::vstack(&[&a, &b]),
            m(&[&[1, 2], &[3, 4], &[5, 6]])
        );
    }

    #[test]
    fn serde_round_trips_wide_integers() {
        let big = BigInt::from_str("1234567890123456789012345678901234567890").unwrap();
        let a = IntMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                big.clone()
            } else {
                BigInt::from(-1) - &big
            }
        });
        let text = serde_json::to_string(&a).unwrap();
        assert!(text.contains("1234567890123456789012345678901234567890"));
        let back: IntMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn deserialize_rejects_fractional_entries() {
        let err = serde_json::from_str::<IntMatrix>("[[1, 2.5]]").unwrap_err();
        assert!(err.to_string().contains("2.5"), "unexpected message: {err}");
    }

    #[test]
    fn deserialize_rejects_ragged_rows() {
        let err = serde_json::from_str::<IntMatrix>("[[1, 2], [3]]").unwrap_err();
        assert!(err.to_string().contains("row 1"), "unexpected message: {err}");
    }

    #[test]
    fn display_is_single_line() {
        assert_eq!(m(&[&[1, 2], &[3, 4]]).to_string(), "[[1, 2], [3, 4]]");
    }
}
