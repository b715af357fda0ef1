//! Dense matrices over the Gaussian rationals.
//!
//! Empty matrices (0 x n, n x 0, 0 x 0) are first-class values; block chains
//! produce them routinely. The multiplication kernel skips zero terms, which
//! matters a lot here because witness matrices are mostly zeros.

use std::fmt;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{parse_rational, rational_to_string, GaussianRational};
use super::LinAlgError;

/// Row-major dense matrix of exact complex rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<GaussianRational>) -> Result<Self, LinAlgError> {
        if entries.len() != rows * cols {
            return Err(LinAlgError::BadEntryCount { rows, cols, got: entries.len() });
        }
        Ok(DenseMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, entries: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for k in 0..n {
            m.set(k, k, GaussianRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinAlgError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix from string literals like `"1/2"`, `"-i"`, `"1+1i"`.
    pub fn from_str_rows(rows: &[&[&str]]) -> Result<Self, LinAlgError> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| s.parse()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(parsed)
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

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(GaussianRational::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let entries = self.entries.iter().map(|e| -e).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinAlgError::DimensionMismatch(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Exact product. Skips zero operands, so sparse witnesses multiply in
    /// time proportional to their nonzero structure.
    pub fn mul(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "mul {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = &mut out.entries[i * other.cols + j];
                    *cur += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// `transpose(x) * self * x`, the congruence-style product used everywhere.
    pub fn congruence_by(&self, x: &Self) -> Result<Self, LinAlgError> {
        x.transpose().mul(&self.mul(x)?)
    }

    /// Block-diagonal assembly preserving order; the empty sum is 0 x 0.
    pub fn direct_sum(parts: &[Self]) -> Self {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zero(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for p in parts {
            for i in 0..p.rows {
                for j in 0..p.cols {
                    out.set(ro + i, co + j, p.get(i, j).clone());
                }
            }
            ro += p.rows;
            co += p.cols;
        }
        out
    }

    /// Appends `extra` zero columns on the right.
    pub fn pad_columns(&self, extra: usize) -> Self {
        let mut out = Self::zero(self.rows, self.cols + extra);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// Exact rank by Gaussian elimination, pivoting on the first nonzero
    /// entry of each column. There is no tolerance anywhere.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut r = 0;
        for c in 0..work.cols {
            if r == work.rows {
                break;
            }
            let Some(p) = (r..work.rows).find(|&i| !work.get(i, c).is_zero()) else {
                continue;
            };
            work.swap_rows(r, p);
            let pivot = work.get(r, c).clone();
            for i in (r + 1)..work.rows {
                if work.get(i, c).is_zero() {
                    continue;
                }
                let factor = work.get(i, c) / &pivot;
                for j in c..work.cols {
                    let delta = &factor * work.get(r, j);
                    let cur = work.get(i, j) - &delta;
                    work.set(i, j, cur);
                }
            }
            r += 1;
        }
        r
    }

    /// Exact inverse by Gauss-Jordan; `Singular` if the rank is deficient.
    pub fn inverse(&self) -> Result<Self, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::DimensionMismatch(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !work.get(i, c).is_zero()) else {
                return Err(LinAlgError::Singular);
            };
            work.swap_rows(c, p);
            inv.swap_rows(c, p);
            let pivot_inv = work.get(c, c).inv()?;
            for j in 0..n {
                let w = work.get(c, j) * &pivot_inv;
                work.set(c, j, w);
                let v = inv.get(c, j) * &pivot_inv;
                inv.set(c, j, v);
            }
            for i in 0..n {
                if i == c || work.get(i, c).is_zero() {
                    continue;
                }
                let factor = work.get(i, c).clone();
                for j in 0..n {
                    let w = work.get(i, j) - &(&factor * work.get(c, j));
                    work.set(i, j, w);
                    let v = inv.get(i, j) - &(&factor * inv.get(c, j));
                    inv.set(i, j, v);
                }
            }
        }
        Ok(inv)
    }

    /// Permutation matrix P with `P[perm[j], j] = 1`; congruence by P reorders
    /// coordinates so that position j picks up old coordinate `perm[j]`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self, LinAlgError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(LinAlgError::NotPermutation(n, perm.to_vec()));
            }
            seen[p] = true;
        }
        let mut m = Self::zero(n, n);
        for (j, &p) in perm.iter().enumerate() {
            m.set(p, j, GaussianRational::one());
        }
        Ok(m)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 0 || self.cols == 0 {
            return writeln!(f, "[{}x{} empty]", self.rows, self.cols);
        }
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// Wire format: {"rows": r, "cols": c, "entries": [["p/q", "p/q"], ...]},
// row-major, each entry a [re, im] pair of reduced rational strings.

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<[String; 2]>,
}

impl Serialize for DenseMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let wire = MatrixWire {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|e| [rational_to_string(e.re()), rational_to_string(e.im())])
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        let entries = wire
            .entries
            .iter()
            .map(|[re, im]| {
                Ok(GaussianRational::new(
                    parse_rational(re).map_err(D::Error::custom)?,
                    parse_rational(im).map_err(D::Error::custom)?,
                ))
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        DenseMatrix::new(wire.rows, wire.cols, entries).map_err(D::Error::custom)
    }
}

impl DenseMatrix {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[&str]]) -> DenseMatrix {
        DenseMatrix::from_str_rows(rows).unwrap()
    }

    #[test]
    fn identity_times_anything() {
        let a = m(&[&["1", "2", "i"], &["0", "-1/2", "3"], &["1", "1", "1"]]);
        assert_eq!(DenseMatrix::identity(3).mul(&a).unwrap(), a);
    }

    #[test]
    fn h2_minus_one_squares_to_minus_identity() {
        let h = m(&[&["0", "1"], &["-1", "0"]]);
        assert_eq!(h.mul(&h).unwrap(), DenseMatrix::identity(2).neg());
    }

    #[test]
    fn transpose_involution_and_empty() {
        let a = m(&[&["1", "i"], &["0", "2"], &["-1", "1/2"]]);
        assert_eq!(a.transpose().transpose(), a);
        let e = DenseMatrix::zero(0, 3);
        let t = e.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 0));
    }

    #[test]
    fn transpose_of_product() {
        let a = m(&[&["1", "2"], &["i", "0"], &["1", "1"]]);
        let b = m(&[&["1", "0", "1", "2"], &["0", "i", "-1", "1/2"]]);
        let lhs = a.mul(&b).unwrap().transpose();
        let rhs = b.transpose().mul(&a.transpose()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn direct_sum_neutral_and_empty() {
        let a = m(&[&["1", "2"], &["3", "4"]]);
        let empty = DenseMatrix::zero(0, 0);
        assert_eq!(DenseMatrix::direct_sum(&[]), empty);
        assert_eq!(
            DenseMatrix::direct_sum(&[a.clone(), empty.clone(), a.clone()]),
            DenseMatrix::direct_sum(&[a.clone(), a.clone()])
        );
    }

    #[test]
    fn rank_of_jordan_plus_transpose() {
        // J_2(0)+J_2(0)^T has determinant -1; J_3(0)+J_3(0)^T drops rank by one.
        let j2 = m(&[&["0", "1"], &["0", "0"]]);
        let j3 = m(&[&["0", "1", "0"], &["0", "0", "1"], &["0", "0", "0"]]);
        assert_eq!(j2.add(&j2.transpose()).unwrap().rank(), 2);
        assert_eq!(j3.add(&j3.transpose()).unwrap().rank(), 2);
        assert_eq!(DenseMatrix::zero(4, 4).rank(), 0);
    }

    #[test]
    fn inverse_round_trip() {
        assert_eq!(DenseMatrix::identity(4).inverse().unwrap(), DenseMatrix::identity(4));
        let h = m(&[&["0", "1"], &["-1", "0"]]);
        assert_eq!(h.inverse().unwrap(), m(&[&["0", "-1"], &["1", "0"]]));
        let d = m(&[&["2", "0"], &["0", "i"]]);
        assert_eq!(d.inverse().unwrap(), m(&[&["1/2", "0"], &["0", "-i"]]));
        assert_eq!(
            m(&[&["1", "1"], &["1", "1"]]).inverse(),
            Err(LinAlgError::Singular)
        );
    }

    #[test]
    fn permutation_swaps_summands() {
        let a = m(&[&["1", "2"], &["3", "4"]]);
        let b = m(&[&["5", "6"], &["7", "8"]]);
        let ab = DenseMatrix::direct_sum(&[a.clone(), b.clone()]);
        let ba = DenseMatrix::direct_sum(&[b, a]);
        // Block swap of two 2x2 summands: new coordinate j reads old 2+j, j+2.
        let p = DenseMatrix::from_permutation(&[2, 3, 0, 1]).unwrap();
        assert_eq!(ab.congruence_by(&p).unwrap(), ba);
        assert!(DenseMatrix::from_permutation(&[0, 0]).is_err());
        assert_eq!(DenseMatrix::from_permutation(&[0, 1, 2]).unwrap(), DenseMatrix::identity(3));
    }

    #[test]
    fn empty_products() {
        let a = DenseMatrix::zero(3, 0);
        let b = DenseMatrix::zero(0, 2);
        let p = a.mul(&b).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert!(p.is_zero_matrix());
    }

    #[test]
    fn json_round_trip_bit_exact() {
        let a = m(&[&["1/2", "-i"], &["0", "2+3i"]]);
        let s = a.to_json();
        let back = DenseMatrix::from_json(&s).unwrap();
        assert_eq!(a, back);
        assert_eq!(back.to_json(), s);
        assert!(s.contains("\"entries\":[[\"1/2\",\"0/1\"]"));
    }
}
