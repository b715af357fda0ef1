//! Canonical-form-for-congruence blocks and block direct sums.
//!
//! A square complex matrix is congruent to a direct sum of three block kinds,
//! unique up to reordering:
//!
//! * Type 0: the nilpotent Jordan block `J_k(0)`;
//! * Type I: the anti-triangular alternating block `Gamma_k` (`Gamma_1 = [1]`);
//! * Type II: `H_2k(mu) = [0 I_k; J_k(mu) 0]` with `mu != 0`,
//!   `mu != (-1)^(k+1)`, and `mu` identified with `1/mu`.
//!
//! This module models such direct sums symbolically, computes the census of
//! block classes and the quarter-integer invariant rho, materializes specs to
//! dense matrices, and carries the closed-form rank of `A + A^T` used as a
//! cross-check against exact elimination.

mod dsl;

pub use dsl::{format_spec, parse_spec};

use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::exact_linalg::{DenseMatrix, GaussianRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("block size must be positive")]
    ZeroSize,
    #[error("Type-II block size must be even, got {0}")]
    OddTypeII(usize),
    #[error("H_{size}(mu) requires mu != 0")]
    MuZero { size: usize },
    #[error("H_{size}(mu) requires mu != (-1)^(k+1), got the forbidden value {mu}")]
    MuForbidden { size: usize, mu: String },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Type0,
    TypeI,
    TypeII,
}

/// One canonical block. Construction validates the block, and Type-II
/// parameters are normalized to the representative of {mu, 1/mu} with
/// |mu|^2 >= 1 (ties at |mu|^2 = 1 resolved to the lexicographically larger
/// (re, im) pair), so block equality is plain structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Block {
    kind: BlockKind,
    size: usize,
    mu: Option<GaussianRational>,
}

impl Block {
    /// `J_size(0)`, any size >= 1.
    pub fn type0(size: usize) -> Result<Self, SpecError> {
        if size == 0 {
            return Err(SpecError::ZeroSize);
        }
        Ok(Block { kind: BlockKind::Type0, size, mu: None })
    }

    /// `Gamma_size`, any size >= 1.
    pub fn type_i(size: usize) -> Result<Self, SpecError> {
        if size == 0 {
            return Err(SpecError::ZeroSize);
        }
        Ok(Block { kind: BlockKind::TypeI, size, mu: None })
    }

    /// `H_size(mu)` with even size = 2k, `mu != 0`, `mu != (-1)^(k+1)`.
    pub fn type_ii(size: usize, mu: GaussianRational) -> Result<Self, SpecError> {
        if size == 0 {
            return Err(SpecError::ZeroSize);
        }
        if !size.is_multiple_of(2) {
            return Err(SpecError::OddTypeII(size));
        }
        if mu.is_zero() {
            return Err(SpecError::MuZero { size });
        }
        let k = size / 2;
        let forbidden = if k.is_multiple_of(2) {
            -GaussianRational::one()
        } else {
            GaussianRational::one()
        };
        if mu == forbidden {
            return Err(SpecError::MuForbidden { size, mu: mu.to_string() });
        }
        Ok(Block { kind: BlockKind::TypeII, size, mu: Some(normalize_mu(mu)) })
    }

    /// Shorthand for the canonical skew block `H_2(-1)`.
    pub fn h2_minus_one() -> Self {
        Block::type_ii(2, -GaussianRational::one()).expect("H_2(-1) is a valid block")
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mu(&self) -> Option<&GaussianRational> {
        self.mu.as_ref()
    }

    pub fn is_j1(&self) -> bool {
        self.kind == BlockKind::Type0 && self.size == 1
    }

    pub fn is_j2(&self) -> bool {
        self.kind == BlockKind::Type0 && self.size == 2
    }

    pub fn is_gamma1(&self) -> bool {
        self.kind == BlockKind::TypeI && self.size == 1
    }

    pub fn is_gamma2(&self) -> bool {
        self.kind == BlockKind::TypeI && self.size == 2
    }

    pub fn is_h2_minus_one(&self) -> bool {
        self == &Block::h2_minus_one()
    }

    /// rho of this single block, in quarters.
    pub fn rho_quarters(&self) -> u64 {
        let n = self.size as u64;
        match self.kind {
            BlockKind::Type0 => {
                if self.size == 1 {
                    0
                } else if self.size % 2 == 1 {
                    n + 1
                } else {
                    n
                }
            }
            BlockKind::TypeI => {
                if self.size.is_multiple_of(2) {
                    n + 1
                } else {
                    n
                }
            }
            BlockKind::TypeII => match self.type_ii_class() {
                TypeIIClass::MinusOneOdd => n + 2,
                _ => n,
            },
        }
    }

    /// Closed-form rank of `block + block^T`.
    pub fn rank_plus_transpose(&self) -> usize {
        match self.kind {
            BlockKind::Type0 => {
                if self.size % 2 == 1 {
                    self.size - 1
                } else {
                    self.size
                }
            }
            BlockKind::TypeI => {
                if self.size % 2 == 1 {
                    self.size
                } else {
                    self.size - 1
                }
            }
            BlockKind::TypeII => match self.type_ii_class() {
                TypeIIClass::MinusOneOdd => self.size - 2,
                _ => self.size,
            },
        }
    }

    fn type_ii_class(&self) -> TypeIIClass {
        let mu = self.mu.as_ref().expect("Type-II block has mu");
        let k = self.size / 2;
        if mu.is_one() {
            debug_assert_eq!(k % 2, 0, "H_2k(1) only valid for even k");
            TypeIIClass::PlusOneEven
        } else if *mu == -GaussianRational::one() {
            debug_assert_eq!(k % 2, 1, "H_2k(-1) only valid for odd k");
            TypeIIClass::MinusOneOdd
        } else {
            TypeIIClass::Generic
        }
    }

    pub fn materialize(&self) -> DenseMatrix {
        match self.kind {
            BlockKind::Type0 => jordan_zero(self.size),
            BlockKind::TypeI => gamma(self.size),
            BlockKind::TypeII => h_block(self.size, self.mu.as_ref().unwrap()),
        }
    }
}

enum TypeIIClass {
    Generic,
    PlusOneEven,
    MinusOneOdd,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BlockKind::Type0 => write!(f, "J{}", self.size),
            BlockKind::TypeI => write!(f, "G{}", self.size),
            BlockKind::TypeII => write!(f, "H{}({})", self.size, dsl::format_mu(self.mu.as_ref().unwrap())),
        }
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Representative of {mu, 1/mu}: |mu|^2 >= 1, lexicographically larger
/// (re, im) on the unit circle. 0 is returned unchanged.
pub fn normalize_mu(mu: GaussianRational) -> GaussianRational {
    if mu.is_zero() {
        return mu;
    }
    let n = mu.norm_sqr();
    let one = Rational::one();
    if n < one {
        return mu.inv().expect("nonzero");
    }
    if n == one {
        let inv = mu.inv().expect("nonzero");
        if (inv.re(), inv.im()) > (mu.re(), mu.im()) {
            return inv;
        }
    }
    mu
}

/// An ordered direct sum of canonical blocks.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CfcSpec {
    blocks: Vec<Block>,
}

impl CfcSpec {
    pub fn new(blocks: Vec<Block>) -> Self {
        CfcSpec { blocks }
    }

    pub fn empty() -> Self {
        CfcSpec { blocks: Vec::new() }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_size(&self) -> usize {
        self.blocks.iter().map(Block::size).sum()
    }

    pub fn concat(&self, other: &CfcSpec) -> CfcSpec {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        CfcSpec { blocks }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> CfcSpec {
        CfcSpec { blocks: self.blocks[range].to_vec() }
    }

    /// `H_2(-1)^{\oplus m}`.
    pub fn h2_power(m: usize) -> CfcSpec {
        CfcSpec { blocks: vec![Block::h2_minus_one(); m] }
    }

    /// Column offset of each block inside the materialized matrix.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        let mut acc = 0;
        for b in &self.blocks {
            out.push(acc);
            acc += b.size();
        }
        out.push(acc);
        out
    }

    pub fn census(&self) -> BlockCensus {
        let mut c = BlockCensus::default();
        for b in &self.blocks {
            c.n += b.size();
            match b.kind() {
                BlockKind::Type0 => {
                    if b.size() == 1 {
                        c.j1 += 1;
                    } else if b.size() % 2 == 1 {
                        c.j_odd += 1;
                    } else {
                        c.j_even += 1;
                    }
                }
                BlockKind::TypeI => {
                    if b.size() % 2 == 0 {
                        c.gamma_even += 1;
                    } else {
                        c.gamma_odd += 1;
                    }
                }
                BlockKind::TypeII => match b.type_ii_class() {
                    TypeIIClass::Generic => c.h_generic += 1,
                    TypeIIClass::PlusOneEven => c.h_plus_even += 1,
                    TypeIIClass::MinusOneOdd => c.h_minus_odd += 1,
                },
            }
        }
        c
    }

    pub fn rho(&self) -> RhoValue {
        RhoValue { quarters: self.blocks.iter().map(Block::rho_quarters).sum() }
    }

    pub fn materialize(&self) -> DenseMatrix {
        let parts: Vec<DenseMatrix> = self.blocks.iter().map(Block::materialize).collect();
        DenseMatrix::direct_sum(&parts)
    }

    /// Closed-form rank of `A + A^T`, summed over blocks.
    pub fn rank_a_plus_at_formula(&self) -> usize {
        self.blocks.iter().map(Block::rank_plus_transpose).sum()
    }

    /// Removes every `J_1(0)` block; returns the stripped spec and the count.
    pub fn strip_j1(&self) -> (CfcSpec, usize) {
        let kept: Vec<Block> = self.blocks.iter().filter(|b| !b.is_j1()).cloned().collect();
        let removed = self.blocks.len() - kept.len();
        (CfcSpec { blocks: kept }, removed)
    }

    pub fn append_j1(&self, count: usize) -> CfcSpec {
        let mut blocks = self.blocks.clone();
        blocks.extend(std::iter::repeat_n(Block::type0(1).unwrap(), count));
        CfcSpec { blocks }
    }

    /// Reorders blocks: result block i is `self.blocks[sigma[i]]`.
    pub fn permuted(&self, sigma: &[usize]) -> CfcSpec {
        CfcSpec { blocks: sigma.iter().map(|&s| self.blocks[s].clone()).collect() }
    }
}

impl fmt::Display for CfcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_spec(self))
    }
}

impl fmt::Debug for CfcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Exact block counts in the classification behind rho:
/// `j1` Type-0 of size 1, `j_odd` Type-0 odd size >= 3, `j_even` Type-0 even,
/// `gamma_even`/`gamma_odd` Type-I by parity, `h_generic` generic Type-II,
/// `h_plus_even` the `H_4k(1)` family, `h_minus_odd` the `H_{4k-2}(-1)` family.
#[derive(Debug, Default, Clone, PartialEq, Eq, serde::Serialize)]
pub struct BlockCensus {
    pub j1: usize,
    pub j_odd: usize,
    pub j_even: usize,
    pub gamma_even: usize,
    pub gamma_odd: usize,
    pub h_generic: usize,
    pub h_plus_even: usize,
    pub h_minus_odd: usize,
    pub n: usize,
}

/// The invariant rho(A) = (n - j1 + j_odd + gamma_even + 2 h_minus_odd) / 4,
/// stored exactly as a count of quarters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RhoValue {
    pub quarters: u64,
}

impl RhoValue {
    pub fn floor(&self) -> u64 {
        self.quarters / 4
    }

    pub fn is_integer(&self) -> bool {
        self.quarters.is_multiple_of(4)
    }

    pub fn fractional_quarters(&self) -> u64 {
        self.quarters % 4
    }
}

impl std::ops::Add for RhoValue {
    type Output = RhoValue;
    fn add(self, rhs: RhoValue) -> RhoValue {
        RhoValue { quarters: self.quarters + rhs.quarters }
    }
}

impl fmt::Display for RhoValue {
    /// Prints `quarters/4` in lowest terms: 3 -> "3/4", 6 -> "3/2", 8 -> "2".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = match (self.quarters % 4, self.quarters % 2) {
            (0, _) => (self.quarters / 4, 1),
            (_, 0) => (self.quarters / 2, 2),
            _ => (self.quarters, 4),
        };
        if den == 1 {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

/// The canonical form of a skew-symmetric matrix:
/// `H_2(-1)^{\oplus m} \oplus 0_{zero_pad}`, of rank `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewTarget {
    pub m: usize,
    pub zero_pad: usize,
}

impl SkewTarget {
    pub fn size(&self) -> usize {
        2 * self.m + self.zero_pad
    }

    pub fn rank(&self) -> usize {
        2 * self.m
    }

    pub fn to_spec(&self) -> CfcSpec {
        let mut blocks = vec![Block::h2_minus_one(); self.m];
        blocks.extend(std::iter::repeat_n(Block::type0(1).unwrap(), self.zero_pad));
        CfcSpec::new(blocks)
    }

    pub fn materialize(&self) -> DenseMatrix {
        self.to_spec().materialize()
    }
}

/// `J_k(0)`: ones on the superdiagonal.
pub fn jordan_zero(k: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zero(k, k);
    for i in 0..k.saturating_sub(1) {
        m.set(i, i + 1, GaussianRational::one());
    }
    m
}

/// `Gamma_k`: entries on the anti-diagonal and its right neighbor, with row
/// signs alternating upward from +1 in the bottom row. Pinned by the anchors
/// `Gamma_1 = [1]`, `Gamma_2 = [[0,-1],[1,1]]`.
pub fn gamma(k: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zero(k, k);
    for i in 1..=k {
        let sign = if (k - i).is_multiple_of(2) {
            GaussianRational::one()
        } else {
            -GaussianRational::one()
        };
        m.set(i - 1, k - i, sign.clone());
        if i >= 2 {
            m.set(i - 1, k + 1 - i, sign);
        }
    }
    m
}

/// `H_2k(mu) = [0 I_k; J_k(mu) 0]`.
pub fn h_block(size: usize, mu: &GaussianRational) -> DenseMatrix {
    assert!(size.is_multiple_of(2), "H block size must be even");
    let k = size / 2;
    let mut m = DenseMatrix::zero(size, size);
    for t in 0..k {
        m.set(t, k + t, GaussianRational::one());
        m.set(k + t, t, mu.clone());
        if t + 1 < k {
            m.set(k + t, t + 1, GaussianRational::one());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> CfcSpec {
        parse_spec(s).unwrap()
    }

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn validate_rejects_forbidden_mu() {
        // k = 1 forbids mu = 1, k = 2 forbids mu = -1.
        assert!(Block::type_ii(2, g("1")).is_err());
        assert!(Block::type_ii(2, g("-1")).is_ok());
        assert!(Block::type_ii(4, g("-1")).is_err());
        assert!(Block::type_ii(4, g("1")).is_ok());
        assert!(Block::type_ii(6, g("0")).is_err());
        assert!(Block::type_ii(3, g("2")).is_err());
        assert!(Block::type0(0).is_err());
    }

    #[test]
    fn mu_normalization() {
        assert_eq!(normalize_mu(g("1/2")), g("2"));
        assert_eq!(normalize_mu(g("2")), g("2"));
        assert_eq!(normalize_mu(g("i")), g("i"));
        assert_eq!(normalize_mu(g("-i")), g("i"));
        assert_eq!(normalize_mu(g("1+1i")), g("1+1i"));
        // |3/5 + 4/5 i| = 1; the +im representative wins the tie.
        assert_eq!(normalize_mu(g("3/5-4/5i")), g("3/5+4/5i"));
        assert_eq!(Block::type_ii(2, g("1/2")).unwrap(), Block::type_ii(2, g("2")).unwrap());
    }

    #[test]
    fn census_classification() {
        let c = spec("J1 + J3 + G2 + H2(-1)").census();
        assert_eq!(
            c,
            BlockCensus {
                j1: 1,
                j_odd: 1,
                gamma_even: 1,
                h_minus_odd: 1,
                n: 8,
                ..Default::default()
            }
        );
        assert_eq!(CfcSpec::empty().census(), BlockCensus::default());
        let c = spec("H6(2)").census();
        assert_eq!(c.h_generic, 1);
        assert_eq!(c.n, 6);
        // H_4(1) and H_6(-1) are the special families.
        assert_eq!(spec("H4(1)").census().h_plus_even, 1);
        assert_eq!(spec("H6(-1)").census().h_minus_odd, 1);
    }

    #[test]
    fn rho_values_match_the_table() {
        // The eight per-block families, sizes up to 12.
        for k in 2..=6u64 {
            assert_eq!(spec(&format!("J{}", 2 * k - 1)).rho().quarters, 2 * k);
            assert_eq!(spec(&format!("J{}", 2 * k)).rho().quarters, 2 * k);
        }
        assert_eq!(spec("J1").rho().quarters, 0);
        assert_eq!(spec("J2").rho().quarters, 2);
        for k in 1..=6u64 {
            assert_eq!(spec(&format!("G{}", 2 * k - 1)).rho().quarters, 2 * k - 1);
            assert_eq!(spec(&format!("G{}", 2 * k)).rho().quarters, 2 * k + 1);
        }
        for k in 1..=3u64 {
            assert_eq!(spec(&format!("H{}(-1)", 4 * k - 2)).rho().quarters, 4 * k);
            assert_eq!(spec(&format!("H{}(1)", 4 * k)).rho().quarters, 4 * k);
        }
        for k in 1..=6u64 {
            for mu in ["2", "1/2", "3+1i"] {
                assert_eq!(spec(&format!("H{}({})", 2 * k, mu)).rho().quarters, 2 * k);
            }
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(spec("G3").rho().to_string(), "3/4");
        assert_eq!(spec("H4(1)").rho().to_string(), "1");
        assert_eq!(spec("G2*4").rho().to_string(), "3");
        assert_eq!(spec("J1*5").rho().to_string(), "0");
        assert_eq!(spec("J6").rho().to_string(), "3/2");
    }

    #[test]
    fn gamma_anchors() {
        assert_eq!(gamma(1), DenseMatrix::from_str_rows(&[&["1"]]).unwrap());
        assert_eq!(
            gamma(2),
            DenseMatrix::from_str_rows(&[&["0", "-1"], &["1", "1"]]).unwrap()
        );
        assert_eq!(
            gamma(3),
            DenseMatrix::from_str_rows(&[
                &["0", "0", "1"],
                &["0", "-1", "-1"],
                &["1", "1", "0"]
            ])
            .unwrap()
        );
        // Gamma_2 = -H_2(-1) + E_22, the identity behind the Gamma_2 analysis.
        let e22 = DenseMatrix::from_str_rows(&[&["0", "0"], &["0", "1"]]).unwrap();
        let h = h_block(2, &g("-1"));
        assert_eq!(gamma(2), h.neg().add(&e22).unwrap());
        // Rank pins for Gamma_2..Gamma_4 against the closed form.
        for k in 2..=4 {
            let m = gamma(k);
            assert_eq!(m.add(&m.transpose()).unwrap().rank(), if k % 2 == 1 { k } else { k - 1 });
        }
    }

    #[test]
    fn h2_minus_one_matrix() {
        assert_eq!(
            h_block(2, &g("-1")),
            DenseMatrix::from_str_rows(&[&["0", "1"], &["-1", "0"]]).unwrap()
        );
    }

    #[test]
    fn rank_formula_matches_exact_elimination() {
        let singles: Vec<CfcSpec> = (1..=12)
            .flat_map(|s| vec![spec(&format!("J{s}")), spec(&format!("G{s}"))])
            .chain((1..=6).flat_map(|k| {
                ["2", "1/2", "3+1i", "-2"]
                    .iter()
                    .map(|mu| spec(&format!("H{}({})", 2 * k, mu)))
                    .collect::<Vec<_>>()
            }))
            .chain((1..=3).map(|k| spec(&format!("H{}(1)", 4 * k))))
            .chain((1..=3).map(|k| spec(&format!("H{}(-1)", 4 * k - 2))))
            .collect();
        for s in singles {
            let a = s.materialize();
            let sum = a.add(&a.transpose()).unwrap();
            assert_eq!(s.rank_a_plus_at_formula(), sum.rank(), "spec {s}");
        }
    }

    #[test]
    fn strip_j1_keeps_rho() {
        let s = spec("J1*3 + G3");
        let (stripped, count) = s.strip_j1();
        assert_eq!(count, 3);
        assert_eq!(stripped, spec("G3"));
        assert_eq!(stripped.rho(), s.rho());
        let t = spec("G4 + H2(-1)");
        assert_eq!(t.strip_j1(), (t.clone(), 0));
    }

    #[test]
    fn rho_additive_over_concat() {
        let a = spec("J5 + G4");
        let b = spec("H6(2) + J1");
        assert_eq!(a.concat(&b).rho(), RhoValue { quarters: a.rho().quarters + b.rho().quarters });
    }

    #[test]
    fn materialize_respects_permutation() {
        let s = spec("J2 + G3 + H2(2)");
        let sigma = [2usize, 0, 1];
        let permuted = s.permuted(&sigma);
        // Build the coordinate permutation realizing the block reorder.
        let offsets = s.offsets();
        let mut perm = Vec::new();
        for &b in &sigma {
            perm.extend(offsets[b]..offsets[b] + s.blocks()[b].size());
        }
        let p = DenseMatrix::from_permutation(&perm).unwrap();
        assert_eq!(s.materialize().congruence_by(&p).unwrap(), permuted.materialize());
    }

    #[test]
    fn skew_target_shape() {
        let t = SkewTarget { m: 2, zero_pad: 3 };
        assert_eq!(t.size(), 7);
        assert_eq!(t.rank(), 4);
        assert_eq!(t.materialize().rank(), 4);
        let m = t.materialize();
        assert_eq!(m.transpose(), m.neg());
    }
}
