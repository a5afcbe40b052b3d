//! Smith normal form and the lattice operations built on it.
//!
//! [`smith_normal_form`] factors an integer matrix `A` as `U * A * V = S`
//! with `U`, `V` unimodular and `S` diagonal, the diagonal nonnegative and
//! each entry dividing the next (zeros last).  The implementation repeatedly
//! moves the smallest nonzero entry of the working block to the pivot
//! position (ties broken by lowest row-major index, which makes the
//! decomposition deterministic), clears its row and column by nearest-integer
//! division, and restores divisibility of the trailing block before moving
//! on.  Pivots are sign-normalized as they are selected, so no separate
//! sign pass is needed.
//!
//! On top of the decomposition:
//!
//! * [`integer_kernel`] returns a basis of the kernel sublattice.  Because
//!   the basis consists of columns of the unimodular `V`, it spans a direct
//!   summand: the kernel is *saturated* (a primitive vector of the kernel is
//!   primitive in the ambient lattice), which the conjugation algorithms
//!   rely on.
//! * [`primitive_generator`] divides out the content of a nonzero vector and
//!   fixes the sign so the first nonzero coordinate is positive.
//! * [`complete_to_basis`] extends a primitive vector to a unimodular matrix
//!   having it as first column.
//! * [`solve_integer`] finds one integer solution of `A x = b` when one
//!   exists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::matrix::IntMatrix;

/// The factorization `U * A * V = S` produced by [`smith_normal_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    /// Unimodular row transform (`rows x rows`).
    pub u: IntMatrix,
    /// The diagonal form: nonnegative, each diagonal entry divides the next,
    /// zeros at the end.
    pub s: IntMatrix,
    /// Unimodular column transform (`cols x cols`).
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// The diagonal of `S`, of length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.at(i, i).clone())
            .collect()
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// `q` minimizing `|a - q * b|` for `b > 0`.
fn nearest_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(b.is_positive());
    let (mut q, r) = a.div_mod_floor(b);
    if &r * 2 > *b {
        q += 1;
    }
    q
}

/// `row[dst] += k * row[src]` on both the working matrix and its row
/// transform.
fn row_op(s: &mut IntMatrix, u: &mut IntMatrix, dst: usize, src: usize, k: &BigInt) {
    for j in 0..s.cols() {
        let val = s.at(dst, j) + k * s.at(src, j);
        s.set(dst, j, val);
    }
    for j in 0..u.cols() {
        let val = u.at(dst, j) + k * u.at(src, j);
        u.set(dst, j, val);
    }
}

/// `col[dst] += k * col[src]` on both the working matrix and its column
/// transform.
fn col_op(s: &mut IntMatrix, v: &mut IntMatrix, dst: usize, src: usize, k: &BigInt) {
    for i in 0..s.rows() {
        let val = s.at(i, dst) + k * s.at(i, src);
        s.set(i, dst, val);
    }
    for i in 0..v.rows() {
        let val = v.at(i, dst) + k * v.at(i, src);
        v.set(i, dst, val);
    }
}

fn negate_row(s: &mut IntMatrix, u: &mut IntMatrix, i: usize) {
    for j in 0..s.cols() {
        let val = -s.at(i, j);
        s.set(i, j, val);
    }
    for j in 0..u.cols() {
        let val = -u.at(i, j);
        u.set(i, j, val);
    }
}

/// Smallest-magnitude nonzero entry of the block `s[t.., t..]`, ties broken
/// by lowest row-major index; `None` when the block is zero.
fn select_pivot(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let val = s.at(i, j);
            if val.is_zero() {
                continue;
            }
            let mag = val.abs();
            match &best {
                Some((_, _, cur)) if *cur <= mag => {}
                _ => best = Some((i, j, mag)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Computes the Smith normal form of `a` with its unimodular transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    let mut t = 0;
    'next_pivot: while t < m.min(n) {
        let Some((pi, pj)) = select_pivot(&s, t) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        if s.at(t, t).is_negative() {
            negate_row(&mut s, &mut u, t);
        }

        // Clear column t below the pivot by nearest-integer division.  A
        // nonzero remainder means the block now holds an entry smaller than
        // the pivot, so reselect.
        for i in t + 1..m {
            if s.at(i, t).is_zero() {
                continue;
            }
            let q = nearest_div(s.at(i, t), s.at(t, t));
            row_op(&mut s, &mut u, i, t, &-q);
            if !s.at(i, t).is_zero() {
                continue 'next_pivot;
            }
        }
        // Likewise for row t right of the pivot.
        for j in t + 1..n {
            if s.at(t, j).is_zero() {
                continue;
            }
            let q = nearest_div(s.at(t, j), s.at(t, t));
            col_op(&mut s, &mut v, j, t, &-q);
            if !s.at(t, j).is_zero() {
                continue 'next_pivot;
            }
        }
        // The pivot must divide the whole trailing block; this is what makes
        // the final diagonal a divisibility chain.  Fold an offending row
        // into row t and start over with a smaller pivot in reach.
        for i in t + 1..m {
            for j in t + 1..n {
                if !s.at(i, j).is_multiple_of(s.at(t, t)) {
                    row_op(&mut s, &mut u, t, i, &BigInt::one());
                    continue 'next_pivot;
                }
            }
        }
        t += 1;
    }

    debug_assert_eq!(u.mul(a).mul(&v), s, "transform bookkeeping broke");
    debug_assert!(u.is_unimodular() && v.is_unimodular());
    SnfDecomposition { u, s, v }
}

/// A finite generating set for a sublattice of `Z^dim`, stored column-wise.
///
/// Produced by [`integer_kernel`], whose bases are columns of a unimodular
/// matrix and therefore span saturated sublattices (direct summands).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    dim: usize,
    vectors: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    /// Wraps explicit basis vectors; every vector must have length `dim`.
    pub fn new(dim: usize, vectors: Vec<Vec<BigInt>>) -> Result<Self, Error> {
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::RaggedRows {
                    row: j,
                    got: v.len(),
                    expected: dim,
                });
            }
        }
        Ok(LatticeBasis { dim, vectors })
    }

    /// Dimension of the ambient lattice.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis vectors.
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// True for the zero sublattice.
    pub fn is_trivial(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    /// The `dim x rank` matrix whose columns are the basis vectors.
    pub fn as_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.dim, &self.vectors).expect("lengths checked on construction")
    }

    /// Whether `v` lies in the integer span of the basis.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length {} != ambient dim {}", v.len(), self.dim);
        if self.vectors.is_empty() {
            return v.iter().all(Zero::is_zero);
        }
        solve_integer(&self.as_matrix(), v).is_some()
    }

    /// Whether the two bases generate the same sublattice.
    pub fn spans_same(&self, other: &LatticeBasis) -> bool {
        self.dim == other.dim
            && self.vectors.iter().all(|v| other.contains(v))
            && other.vectors.iter().all(|v| self.contains(v))
    }
}

/// Basis of the saturated kernel sublattice `{ x : A x = 0 }`.
pub fn integer_kernel(a: &IntMatrix) -> LatticeBasis {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let vectors = (rank..a.cols()).map(|j| snf.v.col(j)).collect();
    LatticeBasis {
        dim: a.cols(),
        vectors,
    }
}

/// Content (gcd of the entries, nonnegative) of a vector.
fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// The primitive vector spanning the same line as `v`, sign-fixed so the
/// first nonzero coordinate is positive.
pub fn primitive_generator(v: &[BigInt]) -> Result<Vec<BigInt>, Error> {
    let g = content(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    let mut w: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if w.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
        for x in &mut w {
            *x = -&*x;
        }
    }
    Ok(w)
}

/// Extends a primitive vector to a basis of the ambient lattice: returns a
/// unimodular `Q` whose first column is `v`.
///
/// Fails with [`Error::ZeroVector`] on the zero vector and
/// [`Error::NotPrimitive`] when the content exceeds 1.
pub fn complete_to_basis(v: &[BigInt]) -> Result<IntMatrix, Error> {
    let g = content(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    if !g.is_one() {
        return Err(Error::NotPrimitive { content: g });
    }
    let n = v.len();
    let column = IntMatrix::from_columns(n, &[v.to_vec()]).expect("single column");
    let snf = smith_normal_form(&column);
    // U * v * v11 = e1 with v11 = ±1, so Q = U^-1 * diag(v11, 1, ..) sends
    // e1 to v and is unimodular.
    let u_inv = snf.u.inverse().expect("SNF transforms are unimodular");
    let sign = snf.v.at(0, 0).clone();
    let q = IntMatrix::from_fn(n, n, |i, j| {
        if j == 0 {
            u_inv.at(i, 0) * &sign
        } else {
            u_inv.at(i, j).clone()
        }
    });
    debug_assert_eq!(q.col(0), v);
    debug_assert!(q.is_unimodular());
    Ok(q)
}

/// One integer solution `x` of `A x = b`, or `None` when no integer solution
/// exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), a.rows(), "right-hand side length {} != {}", b.len(), a.rows());
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        let d = if i < a.cols() {
            snf.s.at(i, i).clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            if !ci.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ci.div_mod_floor(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(snf.v.mul_vec(&y))
}
