//! The library of primitive consistency relations `L ~> R` with explicit
//! witnesses, plus the law combinators that build bigger relations.
//!
//! A [`Rule`] cannot exist unverified: construction multiplies out
//! `transpose(X) * materialize(lhs) * X` and compares it to
//! `materialize(rhs)` with exact equality. Generators are stateless, so
//! parameters are unbounded.

use thiserror::Error;

use crate::cfc_model::{normalize_mu, Block, CfcSpec, SpecError};
use crate::exact_linalg::{DenseMatrix, GaussianRational, LinAlgError};

pub const LAW_ADDITION: &str = "Addition";
pub const LAW_TRANSITIVITY: &str = "Transitivity";
pub const LAW_PERMUTATION: &str = "Permutation";
pub const LAW_ELIMINATION: &str = "Elimination";
pub const LAW_J1: &str = "J1(0) law";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("witness verification failed for {law} ({lhs} ~> {rhs})")]
    VerificationFailed { law: String, lhs: String, rhs: String },
    #[error("witness shape {got_rows}x{got_cols} does not match {want_rows}x{want_cols}")]
    WitnessShape { got_rows: usize, got_cols: usize, want_rows: usize, want_cols: usize },
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("transitivity needs first.rhs == second.lhs, got {0} vs {1}")]
    MiddleMismatch(String, String),
    #[error("{0} is not a prefix of {1}")]
    NotAPrefix(String, String),
    #[error("blocks at {at} of {outer} do not match inner lhs {inner}")]
    SegmentMismatch { outer: String, at: usize, inner: String },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// A verified relation `lhs ~> rhs` with witness X: transpose(X) * lhs * X = rhs.
#[derive(Clone, PartialEq, Eq)]
pub struct Rule {
    lhs: CfcSpec,
    rhs: CfcSpec,
    witness: DenseMatrix,
    law: String,
    paper_ref: String,
}

impl Rule {
    pub fn new(
        lhs: CfcSpec,
        rhs: CfcSpec,
        witness: DenseMatrix,
        law: &str,
        paper_ref: &str,
    ) -> Result<Self, RuleError> {
        let (want_rows, want_cols) = (lhs.total_size(), rhs.total_size());
        if witness.rows() != want_rows || witness.cols() != want_cols {
            return Err(RuleError::WitnessShape {
                got_rows: witness.rows(),
                got_cols: witness.cols(),
                want_rows,
                want_cols,
            });
        }
        let product = lhs.materialize().congruence_by(&witness)?;
        if product != rhs.materialize() {
            return Err(RuleError::VerificationFailed {
                law: law.to_string(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        Ok(Rule { lhs, rhs, witness, law: law.to_string(), paper_ref: paper_ref.to_string() })
    }

    pub fn lhs(&self) -> &CfcSpec {
        &self.lhs
    }

    pub fn rhs(&self) -> &CfcSpec {
        &self.rhs
    }

    pub fn witness(&self) -> &DenseMatrix {
        &self.witness
    }

    pub fn law(&self) -> &str {
        &self.law
    }

    pub fn paper_ref(&self) -> &str {
        &self.paper_ref
    }

    /// Elimination steps are the only ones allowed to lower rho.
    pub fn is_elimination(&self) -> bool {
        self.law == LAW_ELIMINATION
    }
}

impl std::fmt::Debug for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ~> {}  [{}, {}]", self.lhs, self.rhs, self.law, self.paper_ref)
    }
}

fn mat(rows: &[&[&str]]) -> DenseMatrix {
    DenseMatrix::from_str_rows(rows).expect("static witness literal")
}

fn spec_of(blocks: Vec<Block>) -> CfcSpec {
    CfcSpec::new(blocks)
}

// ---------------------------------------------------------------------------
// Type-0 rules.

/// Selectors for the Type-0 relations of Lemma 5.1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type0Rule {
    /// (i) `J_2k(0) ~> J_{2k-1}(0)`, k >= 1.
    Shrink { k: usize },
    /// (ii) `J_{k+4}(0) ~> J_k(0) + J_3(0)`, k >= 1.
    SplitJ3 { k: usize },
    /// (iii) `J_2(0)^2 ~> H_2(-1)`.
    PairJ2,
    /// (iv) `J_3(0) ~> H_2(-1)`.
    J3ToH2,
    /// (v) `J_5(0) ~> H_2(-1) + J_2(0)`.
    J5Split,
}

pub fn type0_rule(sel: &Type0Rule) -> Result<Rule, RuleError> {
    let h2 = Block::h2_minus_one();
    match *sel {
        Type0Rule::Shrink { k } => {
            if k < 1 {
                return Err(RuleError::BadParameter("Shrink needs k >= 1".into()));
            }
            let mut x = DenseMatrix::zero(2 * k, 2 * k - 1);
            for i in 0..(2 * k - 1) {
                x.set(i + 1, i, GaussianRational::one());
            }
            Rule::new(
                spec_of(vec![Block::type0(2 * k)?]),
                spec_of(vec![Block::type0(2 * k - 1)?]),
                x,
                "type-0 shrink",
                "Lemma 5.1(i)",
            )
        }
        Type0Rule::SplitJ3 { k } => {
            if k < 1 {
                return Err(RuleError::BadParameter("SplitJ3 needs k >= 1".into()));
            }
            let mut x = DenseMatrix::zero(k + 4, k + 3);
            for i in 0..k {
                x.set(i, i, GaussianRational::one());
            }
            for i in 0..3 {
                x.set(k + 1 + i, k + i, GaussianRational::one());
            }
            Rule::new(
                spec_of(vec![Block::type0(k + 4)?]),
                spec_of(vec![Block::type0(k)?, Block::type0(3)?]),
                x,
                "type-0 split",
                "Lemma 5.1(ii)",
            )
        }
        Type0Rule::PairJ2 => Rule::new(
            spec_of(vec![Block::type0(2)?, Block::type0(2)?]),
            spec_of(vec![h2]),
            mat(&[&["1", "0"], &["0", "1"], &["0", "1"], &["-1", "0"]]),
            "J2 pair",
            "Lemma 5.1(iii)",
        ),
        Type0Rule::J3ToH2 => Rule::new(
            spec_of(vec![Block::type0(3)?]),
            spec_of(vec![h2]),
            mat(&[&["1", "0"], &["0", "1"], &["-1", "0"]]),
            "J3 collapse",
            "Lemma 5.1(iv)",
        ),
        Type0Rule::J5Split => Rule::new(
            spec_of(vec![Block::type0(5)?]),
            spec_of(vec![h2, Block::type0(2)?]),
            mat(&[
                &["0", "1", "1", "0"],
                &["0", "0", "0", "1"],
                &["0", "-1", "0", "0"],
                &["1", "0", "0", "1"],
                &["0", "1", "0", "0"],
            ]),
            "J5 split",
            "Lemma 5.1(v)",
        ),
    }
}

// ---------------------------------------------------------------------------
// Type-II rules.

/// Selectors for the Type-II relations of Lemma 6.1. Parameters are
/// normalized to the canonical mu representative before instantiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeIIRule {
    /// (i) `H_{2k+4}(mu) ~> H_2(-1) + H_2k(mu)`, k >= 0.
    Peel { k: usize, mu: GaussianRational },
    /// (ii) `H_2(mu) + H_2(nu) ~> H_2(-1)`, mu != nu, both != -1.
    PairDistinct { mu: GaussianRational, nu: GaussianRational },
    /// (iii) `H_2(mu)^2 ~> H_2(-1)`, mu != +-1.
    PairEqual { mu: GaussianRational },
    /// (iv) `H_2(mu) + J_2(0) ~> H_2(-1)`, mu != -1 (and mu != 0).
    AbsorbJ2 { mu: GaussianRational },
}

pub fn type_ii_rule(sel: &TypeIIRule) -> Result<Rule, RuleError> {
    let h2 = Block::h2_minus_one();
    let one = GaussianRational::one();
    match sel {
        TypeIIRule::Peel { k, mu } => {
            let k = *k;
            let mu = normalize_mu(mu.clone());
            let lhs_block = Block::type_ii(2 * k + 4, mu.clone())?;
            let mut rhs = vec![h2];
            if k > 0 {
                rhs.push(Block::type_ii(2 * k, mu.clone())?);
            }
            let mut x = DenseMatrix::zero(2 * k + 4, 2 * k + 2);
            x.set(0, 0, one.clone());
            x.set(1, 0, -(&one + &mu));
            for t in 0..k {
                x.set(2 + t, 2 + t, one.clone());
            }
            x.set(k + 2, 1, one.clone());
            for t in 0..k {
                x.set(k + 4 + t, k + 2 + t, one.clone());
            }
            Rule::new(spec_of(vec![lhs_block]), spec_of(rhs), x, "type-II peel", "Lemma 6.1(i)")
        }
        TypeIIRule::PairDistinct { mu, nu } => {
            let mu = normalize_mu(mu.clone());
            let nu = normalize_mu(nu.clone());
            if mu == nu {
                return Err(RuleError::BadParameter(
                    "PairDistinct needs mu != nu after normalization".into(),
                ));
            }
            if mu == -&one || nu == -&one {
                return Err(RuleError::BadParameter("PairDistinct needs mu, nu != -1".into()));
            }
            let a = (&nu + &one).checked_div(&(&nu - &mu))?;
            let b = (&mu + &one).checked_div(&(&mu - &nu))?;
            let zero = GaussianRational::zero();
            let x = DenseMatrix::from_rows(vec![
                vec![one.clone(), zero.clone()],
                vec![zero.clone(), a],
                vec![one.clone(), zero.clone()],
                vec![zero, b],
            ])?;
            Rule::new(
                spec_of(vec![Block::type_ii(2, mu)?, Block::type_ii(2, nu)?]),
                spec_of(vec![h2]),
                x,
                "H2 pair (distinct)",
                "Lemma 6.1(ii)",
            )
        }
        TypeIIRule::PairEqual { mu } => {
            let mu = normalize_mu(mu.clone());
            if mu == one || mu == -&one {
                return Err(RuleError::BadParameter("PairEqual needs mu != +-1".into()));
            }
            let a = one.checked_div(&(&mu - &one))?;
            let zero = GaussianRational::zero();
            let x = DenseMatrix::from_rows(vec![
                vec![zero.clone(), one.clone()],
                vec![a.clone(), zero.clone()],
                vec![one.clone(), zero.clone()],
                vec![zero, -a],
            ])?;
            Rule::new(
                spec_of(vec![Block::type_ii(2, mu.clone())?, Block::type_ii(2, mu)?]),
                spec_of(vec![h2]),
                x,
                "H2 pair (equal)",
                "Lemma 6.1(iii)",
            )
        }
        TypeIIRule::AbsorbJ2 { mu } => {
            let mu = normalize_mu(mu.clone());
            if mu == -&one {
                return Err(RuleError::BadParameter("AbsorbJ2 needs mu != -1".into()));
            }
            let minus_inv = -mu.inv()?;
            let ratio = (&mu + &one).checked_div(&mu)?;
            let zero = GaussianRational::zero();
            let x = DenseMatrix::from_rows(vec![
                vec![one.clone(), zero.clone()],
                vec![zero.clone(), minus_inv],
                vec![one.clone(), zero.clone()],
                vec![zero, ratio],
            ])?;
            Rule::new(
                spec_of(vec![Block::type_ii(2, mu)?, Block::type0(2)?]),
                spec_of(vec![h2]),
                x,
                "H2 absorbs J2",
                "Lemma 6.1(iv)",
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Type-I rules.

/// Selectors for the Type-I relations of Lemma 7.1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeIRule {
    /// (i) `Gamma_{2k+1} ~> Gamma_2k`, k >= 1.
    OddStep { k: usize },
    /// (ii) `Gamma_{2k+4} ~> H_2(-1) + Gamma_2k`, k >= 1.
    Peel { k: usize },
    /// (iii) `Gamma_4 ~> H_2(-1) + Gamma_1`.
    Gamma4Split,
}

pub fn type_i_rule(sel: &TypeIRule) -> Result<Rule, RuleError> {
    let h2 = Block::h2_minus_one();
    match *sel {
        TypeIRule::OddStep { k } => {
            if k < 1 {
                return Err(RuleError::BadParameter("OddStep needs k >= 1".into()));
            }
            let i_unit = GaussianRational::i();
            let mut x = DenseMatrix::zero(2 * k + 1, 2 * k);
            for c in 0..(2 * k) {
                x.set(2 * k - c, c, i_unit.clone());
            }
            Rule::new(
                spec_of(vec![Block::type_i(2 * k + 1)?]),
                spec_of(vec![Block::type_i(2 * k)?]),
                x,
                "type-I odd step",
                "Lemma 7.1(i)",
            )
        }
        TypeIRule::Peel { k } => {
            if k < 1 {
                return Err(RuleError::BadParameter("Peel needs k >= 1".into()));
            }
            let one = GaussianRational::one();
            let mut x = DenseMatrix::zero(2 * k + 4, 2 * k + 2);
            x.set(0, 0, -&one);
            for t in 0..(2 * k) {
                x.set(2 + t, 2 + t, one.clone());
            }
            x.set(2 * k + 3, 1, one);
            Rule::new(
                spec_of(vec![Block::type_i(2 * k + 4)?]),
                spec_of(vec![h2, Block::type_i(2 * k)?]),
                x,
                "type-I peel",
                "Lemma 7.1(ii)",
            )
        }
        TypeIRule::Gamma4Split => Rule::new(
            spec_of(vec![Block::type_i(4)?]),
            spec_of(vec![h2, Block::type_i(1)?]),
            mat(&[&["i", "0", "0"], &["0", "0", "0"], &["0", "0", "i"], &["0", "i", "0"]]),
            "Gamma4 split",
            "Lemma 7.1(iii)",
        ),
    }
}

// ---------------------------------------------------------------------------
// Small Gamma rules.

/// The fixed-size relations of Lemma 7.6.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaSmallRule {
    /// (i) `J_2(0) + Gamma_1 ~> Gamma_2`.
    J2Gamma1ToGamma2,
    /// (ii) `Gamma_2 + Gamma_1 ~> H_2(-1)`.
    Gamma2Gamma1Pair,
    /// (iii) `J_2(0) + Gamma_1^2 ~> H_2(-1)`.
    J2TwoGamma1Pair,
    /// (iv) `Gamma_2 + J_2(0) ~> H_2(-1) + Gamma_1`.
    Gamma2J2Split,
    /// (v) `Gamma_3 + Gamma_2 ~> H_2(-1) + J_2(0)`.
    Gamma3Gamma2Split,
    /// (vi) `Gamma_6 + Gamma_2 ~> H_2(-1)^2 + J_2(0)`.
    Gamma6Gamma2Split,
    /// (vii) `Gamma_4^2 ~> H_2(-1)^2 + J_2(0)`.
    Gamma4Pair,
}

pub fn gamma_small_rule(sel: GammaSmallRule) -> Result<Rule, RuleError> {
    let h2 = Block::h2_minus_one();
    let j2 = Block::type0(2)?;
    let g1 = Block::type_i(1)?;
    let g2 = Block::type_i(2)?;
    match sel {
        GammaSmallRule::J2Gamma1ToGamma2 => Rule::new(
            spec_of(vec![j2, g1]),
            spec_of(vec![g2]),
            mat(&[&["-1", "1"], &["1", "1"], &["1", "0"]]),
            "J2+Gamma1 merge",
            "Lemma 7.6(i)",
        ),
        GammaSmallRule::Gamma2Gamma1Pair => Rule::new(
            spec_of(vec![g2, g1]),
            spec_of(vec![h2]),
            mat(&[&["0", "1"], &["1", "0"], &["i", "0"]]),
            "Gamma2+Gamma1 pair",
            "Lemma 7.6(ii)",
        ),
        // The printed witness carries a sqrt(2) scalar; this is the same
        // witness with columns rescaled into the Gaussian rationals.
        GammaSmallRule::J2TwoGamma1Pair => Rule::new(
            spec_of(vec![j2, g1.clone(), g1]),
            spec_of(vec![h2]),
            mat(&[&["2", "0"], &["0", "1"], &["i", "1/2i"], &["1", "-1/2"]]),
            "J2+Gamma1^2 pair",
            "Lemma 7.6(iii)",
        ),
        GammaSmallRule::Gamma2J2Split => Rule::new(
            spec_of(vec![g2, j2]),
            spec_of(vec![h2, g1]),
            mat(&[
                &["-1", "0", "-1"],
                &["0", "1", "0"],
                &["0", "1", "1"],
                &["0", "-1", "1"],
            ]),
            "Gamma2+J2 split",
            "Lemma 7.6(iv)",
        ),
        GammaSmallRule::Gamma3Gamma2Split => Rule::new(
            spec_of(vec![Block::type_i(3)?, g2]),
            spec_of(vec![h2, j2]),
            mat(&[
                &["0", "0", "0", "1"],
                &["1", "0", "0", "1"],
                &["1", "0", "1/2", "1/2"],
                &["0", "1", "1/2", "-1/2"],
                &["1", "0", "0", "0"],
            ]),
            "Gamma3+Gamma2 split",
            "Lemma 7.6(v)",
        ),
        GammaSmallRule::Gamma6Gamma2Split => Rule::new(
            spec_of(vec![Block::type_i(6)?, g2]),
            spec_of(vec![h2.clone(), h2, j2]),
            mat(&[
                &["-1", "0", "0", "0", "0", "0"],
                &["0", "0", "0", "0", "0", "0"],
                &["0", "0", "0", "-i", "-1/2", "1/2"],
                &["0", "0", "0", "-i", "0", "1"],
                &["0", "0", "0", "0", "0", "1"],
                &["0", "1", "0", "0", "0", "0"],
                &["0", "0", "-1", "0", "-1/2i", "-1/2i"],
                &["0", "0", "0", "1", "0", "0"],
            ]),
            "Gamma6+Gamma2 split",
            "Lemma 7.6(vi)",
        ),
        GammaSmallRule::Gamma4Pair => Rule::new(
            spec_of(vec![Block::type_i(4)?, Block::type_i(4)?]),
            spec_of(vec![h2.clone(), h2, j2]),
            mat(&[
                &["-1", "0", "0", "0", "0", "0"],
                &["0", "0", "0", "0", "0", "0"],
                &["0", "0", "0", "i", "-1/2i", "-1/2i"],
                &["0", "1", "0", "0", "0", "0"],
                &["0", "0", "-1", "0", "-1/4", "1/4"],
                &["0", "0", "0", "-1/2", "1/2", "1/2"],
                &["0", "0", "0", "0", "-1/2", "1/2"],
                &["0", "0", "0", "1", "0", "0"],
            ]),
            "Gamma4 pair",
            "Lemma 7.6(vii)",
        ),
    }
}

// ---------------------------------------------------------------------------
// Mixed rules.

/// The mixed relations of Lemma 8.1; mu must avoid +-1 (0 is excluded by
/// block validity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MixedRule {
    /// (i) `H_2(mu) + Gamma_1^2 ~> H_2(-1)`.
    H2TwoGamma1Pair { mu: GaussianRational },
    /// (ii) `H_2(mu) + Gamma_2 ~> H_2(-1) + Gamma_1`.
    H2Gamma2Split { mu: GaussianRational },
}

pub fn mixed_rule(sel: &MixedRule) -> Result<Rule, RuleError> {
    let h2 = Block::h2_minus_one();
    let one = GaussianRational::one();
    let g1 = Block::type_i(1)?;
    match sel {
        MixedRule::H2TwoGamma1Pair { mu } => {
            let mu = normalize_mu(mu.clone());
            if mu == one || mu == -&one {
                return Err(RuleError::BadParameter("H2TwoGamma1Pair needs mu != +-1".into()));
            }
            let d = (&mu - &one).inv()?;
            let zero = GaussianRational::zero();
            let x = DenseMatrix::from_rows(vec![
                vec![one.clone(), zero.clone()],
                vec![-(&one + &mu), -(&(GaussianRational::from_integer(2)) * &d)],
                vec![&one + &mu, d.clone()],
                vec![zero, GaussianRational::i() * &d],
            ])?;
            Rule::new(
                spec_of(vec![Block::type_ii(2, mu)?, g1.clone(), g1]),
                spec_of(vec![h2]),
                x,
                "H2+Gamma1^2 pair",
                "Lemma 8.1(i)",
            )
        }
        MixedRule::H2Gamma2Split { mu } => {
            let mu = normalize_mu(mu.clone());
            if mu == one || mu == -&one {
                return Err(RuleError::BadParameter("H2Gamma2Split needs mu != +-1".into()));
            }
            let d = (&mu + &one).inv()?;
            let zero = GaussianRational::zero();
            let x = DenseMatrix::from_rows(vec![
                vec![one.clone(), zero.clone(), one.clone()],
                vec![-&d, zero.clone(), d.clone()],
                vec![zero.clone(), one.clone(), (&mu - &one) * &d],
                vec![one.clone(), zero.clone(), zero],
            ])?;
            Rule::new(
                spec_of(vec![Block::type_ii(2, mu)?, Block::type_i(2)?]),
                spec_of(vec![h2, g1]),
                x,
                "H2+Gamma2 split",
                "Lemma 8.1(ii)",
            )
        }
    }
}

/// `Gamma_2^2 ~> H_2(-1)`, the pair relation behind the Gamma_2-only bound.
/// Not rho-invariant: rho drops from 3/2 to 1. (The printed witness lands on
/// -H_2(-1) under this Gamma orientation; the columns here are swapped.)
pub fn gamma2_pair_rule() -> Result<Rule, RuleError> {
    Rule::new(
        spec_of(vec![Block::type_i(2)?, Block::type_i(2)?]),
        spec_of(vec![Block::h2_minus_one()]),
        mat(&[&["-1", "0"], &["0", "1"], &["0", "0"], &["0", "i"]]),
        "Gamma2 pair",
        "Sec. 7.1 theorem",
    )
}

// ---------------------------------------------------------------------------
// Law combinators.

/// Addition law: direct sums of relations, witness the direct sum of
/// witnesses. The empty addition is the empty rule.
pub fn combine_addition(rules: &[Rule]) -> Result<Rule, RuleError> {
    let lhs = rules.iter().fold(CfcSpec::empty(), |acc, r| acc.concat(r.lhs()));
    let rhs = rules.iter().fold(CfcSpec::empty(), |acc, r| acc.concat(r.rhs()));
    let witnesses: Vec<DenseMatrix> = rules.iter().map(|r| r.witness().clone()).collect();
    Rule::new(lhs, rhs, DenseMatrix::direct_sum(&witnesses), LAW_ADDITION, "Lemma 2.4(i)")
}

/// Transitivity law: witnesses compose by multiplication.
pub fn combine_transitivity(first: &Rule, second: &Rule) -> Result<Rule, RuleError> {
    if first.rhs() != second.lhs() {
        return Err(RuleError::MiddleMismatch(first.rhs().to_string(), second.lhs().to_string()));
    }
    let witness = first.witness().mul(second.witness())?;
    Rule::new(first.lhs().clone(), second.rhs().clone(), witness, LAW_TRANSITIVITY, "Lemma 2.4(ii)")
}

/// Permutation law: reorders the direct summands; block i of the result is
/// block `sigma[i]` of the input.
pub fn apply_permutation(lhs: &CfcSpec, sigma: &[usize]) -> Result<Rule, RuleError> {
    if sigma.len() != lhs.len() {
        return Err(RuleError::BadParameter(format!(
            "permutation length {} vs {} blocks",
            sigma.len(),
            lhs.len()
        )));
    }
    let offsets = lhs.offsets();
    let mut perm = Vec::with_capacity(lhs.total_size());
    for &b in sigma {
        if b >= lhs.len() {
            return Err(RuleError::BadParameter(format!("block index {b} out of range")));
        }
        perm.extend(offsets[b]..offsets[b] + lhs.blocks()[b].size());
    }
    let witness = DenseMatrix::from_permutation(&perm)?;
    let rhs = lhs.permuted(sigma);
    Rule::new(lhs.clone(), rhs, witness, LAW_PERMUTATION, "Lemma 2.4(iii)")
}

/// Elimination law: drop all blocks after the first `keep` ones, with the
/// column-selection witness [I; 0].
pub fn elimination_rule(lhs: &CfcSpec, keep: usize) -> Result<Rule, RuleError> {
    if keep > lhs.len() {
        return Err(RuleError::BadParameter(format!("cannot keep {keep} of {} blocks", lhs.len())));
    }
    let rhs = lhs.slice(0..keep);
    let kept_size = rhs.total_size();
    let mut x = DenseMatrix::zero(lhs.total_size(), kept_size);
    for i in 0..kept_size {
        x.set(i, i, GaussianRational::one());
    }
    Rule::new(lhs.clone(), rhs, x, LAW_ELIMINATION, "Lemma 2.4(iv)")
}

/// Elimination with the kept prefix given explicitly, per the law statement.
pub fn apply_elimination(lhs: &CfcSpec, keep_prefix: &CfcSpec) -> Result<Rule, RuleError> {
    let k = keep_prefix.len();
    if k > lhs.len() || lhs.blocks()[..k] != *keep_prefix.blocks() {
        return Err(RuleError::NotAPrefix(keep_prefix.to_string(), lhs.to_string()));
    }
    elimination_rule(lhs, k)
}

/// J_1(0) law, constructive direction: dropping the 1x1 zero blocks, with a
/// coordinate-selection witness that zeroes the corresponding rows. Returns
/// None when the spec has no J_1(0) blocks. rho is unchanged.
pub fn strip_j1_rule(lhs: &CfcSpec) -> Result<Option<Rule>, RuleError> {
    let (rhs, removed) = lhs.strip_j1();
    if removed == 0 {
        return Ok(None);
    }
    let offsets = lhs.offsets();
    let mut x = DenseMatrix::zero(lhs.total_size(), rhs.total_size());
    let mut col = 0;
    for (b, block) in lhs.blocks().iter().enumerate() {
        if block.is_j1() {
            continue;
        }
        for t in 0..block.size() {
            x.set(offsets[b] + t, col, GaussianRational::one());
            col += 1;
        }
    }
    Ok(Some(Rule::new(lhs.clone(), rhs, x, LAW_J1, "Lemma 2.4(vi)")?))
}

/// Replaces the blocks `at .. at + inner.lhs.len()` of `outer` by the inner
/// rule, acting as the identity elsewhere (an Addition with identity rules).
/// The lifted step keeps the inner rule's law and reference.
pub fn lift_rule(outer: &CfcSpec, at: usize, inner: &Rule) -> Result<Rule, RuleError> {
    let ilen = inner.lhs().len();
    if at + ilen > outer.len()
        || outer.blocks()[at..at + ilen] != *inner.lhs().blocks()
    {
        return Err(RuleError::SegmentMismatch {
            outer: outer.to_string(),
            at,
            inner: inner.lhs().to_string(),
        });
    }
    let pre = outer.slice(0..at);
    let post = outer.slice(at + ilen..outer.len());
    let witness = DenseMatrix::direct_sum(&[
        DenseMatrix::identity(pre.total_size()),
        inner.witness().clone(),
        DenseMatrix::identity(post.total_size()),
    ]);
    let rhs = pre.concat(inner.rhs()).concat(&post);
    Rule::new(outer.clone(), rhs, witness, inner.law(), inner.paper_ref())
}
