//! Congruence reduction of skew-symmetric matrices to `H_2(-1)^{\oplus m} \oplus 0`.
//!
//! The algorithm is a symplectic-style elimination: pick the first nonzero
//! entry of the trailing submatrix, move it into the leading 2x2 position,
//! scale it to `[[0,1],[-1,0]]`, clear the rest of its two rows and columns
//! by congruence, and recurse. Exactness makes pivot magnitude irrelevant.

use thiserror::Error;

use crate::cfc_model::SkewTarget;
use crate::exact_linalg::{DenseMatrix, GaussianRational, LinAlgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkewError {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// An invertible `q` with `q^T B q = H_2(-1)^{\oplus m} \oplus 0_{n-2m}`.
#[derive(Debug, Clone)]
pub struct SkewReduction {
    pub q: DenseMatrix,
    pub m: usize,
}

impl SkewReduction {
    pub fn target(&self) -> SkewTarget {
        SkewTarget { m: self.m, zero_pad: self.q.rows() - 2 * self.m }
    }
}

/// True iff `b^T = -b` exactly; non-square input is an error.
pub fn is_skew(b: &DenseMatrix) -> Result<bool, SkewError> {
    if !b.is_square() {
        return Err(SkewError::NotSquare(b.rows(), b.cols()));
    }
    Ok(b.transpose() == b.neg())
}

/// Reduces a skew-symmetric `b` by congruence to its canonical form,
/// returning the transform and the count of `H_2(-1)` summands.
pub fn skew_canonicalize(b: &DenseMatrix) -> Result<SkewReduction, SkewError> {
    if !is_skew(b)? {
        return Err(SkewError::NotSkew);
    }
    let n = b.rows();
    let mut work = b.clone();
    let mut q = DenseMatrix::identity(n);
    let mut r = 0;

    while r < n {
        // First nonzero entry of the trailing submatrix, row-major scan.
        // The diagonal is identically zero over a field of characteristic 0.
        let pivot = (r..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .find(|&(i, j)| !work.get(i, j).is_zero());
        let Some((pi, pj)) = pivot else { break };

        col_swap(&mut work, &mut q, r, pi);
        // If pj was r it has moved to pi under the first swap.
        let pj = if pj == r { pi } else { pj };
        col_swap(&mut work, &mut q, r + 1, pj);

        // Leading block is now [[0, b],[-b, 0]] with b != 0; scale to 1.
        let scale = work.get(r, r + 1).inv()?;
        col_scale(&mut work, &mut q, r + 1, &scale);

        // Clear the band beyond the 2x2 block: for columns c > r+1,
        // col_c += B[r+1][c] * col_r - B[r][c] * col_{r+1}.
        for c in (r + 2)..n {
            let beta = work.get(r + 1, c).clone();
            if !beta.is_zero() {
                col_axpy(&mut work, &mut q, c, r, &beta);
            }
            let gamma = -work.get(r, c);
            if !gamma.is_zero() {
                col_axpy(&mut work, &mut q, c, r + 1, &gamma);
            }
        }
        r += 2;
    }

    let m = r / 2;
    let reduction = SkewReduction { q, m };
    // Exact verification multiply before returning.
    let check = b.congruence_by(&reduction.q)?;
    debug_assert_eq!(check, reduction.target().materialize());
    if check != reduction.target().materialize() {
        return Err(SkewError::NotSkew);
    }
    Ok(reduction)
}

// Each elementary step acts as a congruence on the work matrix (columns and
// rows together) and as a plain column operation on the accumulated q.

fn col_swap(work: &mut DenseMatrix, q: &mut DenseMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    let n = work.rows();
    for i in 0..n {
        let x = work.get(i, a).clone();
        let y = work.get(i, b).clone();
        work.set(i, a, y);
        work.set(i, b, x);
    }
    for j in 0..n {
        let x = work.get(a, j).clone();
        let y = work.get(b, j).clone();
        work.set(a, j, y);
        work.set(b, j, x);
    }
    for i in 0..q.rows() {
        let x = q.get(i, a).clone();
        let y = q.get(i, b).clone();
        q.set(i, a, y);
        q.set(i, b, x);
    }
}

fn col_scale(work: &mut DenseMatrix, q: &mut DenseMatrix, c: usize, s: &GaussianRational) {
    let n = work.rows();
    for i in 0..n {
        let v = work.get(i, c) * s;
        work.set(i, c, v);
    }
    for j in 0..n {
        let v = work.get(c, j) * s;
        work.set(c, j, v);
    }
    for i in 0..q.rows() {
        let v = q.get(i, c) * s;
        q.set(i, c, v);
    }
}

/// col_dst += s * col_src (and the mirrored row operation on `work`).
fn col_axpy(work: &mut DenseMatrix, q: &mut DenseMatrix, dst: usize, src: usize, s: &GaussianRational) {
    let n = work.rows();
    for i in 0..n {
        let v = work.get(i, dst) + &(s * work.get(i, src));
        work.set(i, dst, v);
    }
    for j in 0..n {
        let v = work.get(dst, j) + &(s * work.get(src, j));
        work.set(dst, j, v);
    }
    for i in 0..q.rows() {
        let v = q.get(i, dst) + &(s * q.get(i, src));
        q.set(i, dst, v);
    }
}
