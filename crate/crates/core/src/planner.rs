//! The decision procedure and constructive solver.
//!
//! `decide` classifies a query (spec, m) as Consistent / Inconsistent /
//! Unknown; for consistent queries it synthesizes a certificate chain
//! realizing `A ~> H_2(-1)^{\oplus m}` out of catalog rules. `solve` returns
//! the composed witness, and `solve_general` extends it to an arbitrary
//! exact skew-symmetric right-hand side through the skew canonicalizer.
//!
//! Every chain step is a verified [`Rule`]; apart from Elimination steps the
//! reduction relations preserve rho.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cfc_model::{Block, BlockKind, CfcSpec, RhoValue};
use crate::exact_linalg::{DenseMatrix, LinAlgError};
use crate::rule_catalog::{
    apply_permutation, elimination_rule, gamma2_pair_rule, gamma_small_rule, lift_rule, mixed_rule,
    strip_j1_rule, type0_rule, type_i_rule, type_ii_rule, GammaSmallRule, MixedRule, Rule,
    RuleError, Type0Rule, TypeIIRule, TypeIRule,
};
use crate::skew_canon::{self, SkewError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("query is not consistent ({0})")]
    NotConsistent(String),
    #[error("unexpected block for this reducer: {0}")]
    WrongBlockKind(String),
    #[error("certificate step {at} has lhs {got}, expected {want}")]
    BrokenChain { at: usize, got: String, want: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Skew(#[from] SkewError),
}

// ---------------------------------------------------------------------------
// Certificates.

/// An ordered chain of verified relations composing to `source ~> target`.
#[derive(Debug, Clone)]
pub struct Certificate {
    source: CfcSpec,
    target: CfcSpec,
    steps: Vec<Rule>,
}

impl Certificate {
    pub fn source(&self) -> &CfcSpec {
        &self.source
    }

    pub fn target(&self) -> &CfcSpec {
        &self.target
    }

    pub fn steps(&self) -> &[Rule] {
        &self.steps
    }

    /// The product of all step witnesses, folded from the right so the
    /// intermediate shapes stay as narrow as the final target.
    pub fn composed_witness(&self) -> Result<DenseMatrix, PlanError> {
        let mut acc = DenseMatrix::identity(self.target.total_size());
        for step in self.steps.iter().rev() {
            acc = step.witness().mul(&acc)?;
        }
        Ok(acc)
    }

    /// Full re-verification: chain linkage, every step identity, and the
    /// composed witness. Steps are checked in parallel when the `parallel`
    /// feature is enabled.
    pub fn verify(&self) -> Result<(), PlanError> {
        self.verify_linkage()?;
        #[cfg(feature = "parallel")]
        {
            self.steps.par_iter().try_for_each(verify_step)?;
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.steps.iter().try_for_each(verify_step)?;
        }
        self.verify_composed()
    }

    /// Sequential variant of [`Certificate::verify`], kept available for
    /// benchmarking against the parallel path.
    pub fn verify_sequential(&self) -> Result<(), PlanError> {
        self.verify_linkage()?;
        self.steps.iter().try_for_each(verify_step)?;
        self.verify_composed()
    }

    fn verify_linkage(&self) -> Result<(), PlanError> {
        let mut current = &self.source;
        for (at, step) in self.steps.iter().enumerate() {
            if step.lhs() != current {
                return Err(PlanError::BrokenChain {
                    at,
                    got: step.lhs().to_string(),
                    want: current.to_string(),
                });
            }
            current = step.rhs();
        }
        if current != &self.target {
            return Err(PlanError::BrokenChain {
                at: self.steps.len(),
                got: current.to_string(),
                want: self.target.to_string(),
            });
        }
        Ok(())
    }

    fn verify_composed(&self) -> Result<(), PlanError> {
        let x = self.composed_witness()?;
        let product = self.source.materialize().congruence_by(&x)?;
        if product != self.target.materialize() {
            return Err(PlanError::Internal("composed witness does not verify".into()));
        }
        Ok(())
    }
}

fn verify_step(step: &Rule) -> Result<(), PlanError> {
    let product = step.lhs().materialize().congruence_by(step.witness())?;
    if product != step.rhs().materialize() {
        return Err(PlanError::Internal(format!("step {step:?} does not verify")));
    }
    Ok(())
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct StepWire<'a> {
            law: &'a str,
            paper_ref: &'a str,
            lhs: String,
            rhs: String,
            witness: &'a DenseMatrix,
        }
        let mut st = serializer.serialize_struct("Certificate", 4)?;
        st.serialize_field("source", &self.source.to_string())?;
        st.serialize_field("target", &self.target.to_string())?;
        let steps: Vec<StepWire> = self
            .steps
            .iter()
            .map(|s| StepWire {
                law: s.law(),
                paper_ref: s.paper_ref(),
                lhs: s.lhs().to_string(),
                rhs: s.rhs().to_string(),
                witness: s.witness(),
            })
            .collect();
        st.serialize_field("steps", &steps)?;
        let solution = self.composed_witness().map_err(serde::ser::Error::custom)?;
        st.serialize_field("solution", &solution)?;
        st.end()
    }
}

/// Chain builder: applies rules to a running spec, enforcing linkage.
struct Chain {
    source: CfcSpec,
    spec: CfcSpec,
    steps: Vec<Rule>,
}

impl Chain {
    fn new(source: CfcSpec) -> Self {
        Chain { spec: source.clone(), source, steps: Vec::new() }
    }

    fn push(&mut self, rule: Rule) -> Result<(), PlanError> {
        if rule.lhs() != &self.spec {
            return Err(PlanError::BrokenChain {
                at: self.steps.len(),
                got: rule.lhs().to_string(),
                want: self.spec.to_string(),
            });
        }
        self.spec = rule.rhs().clone();
        self.steps.push(rule);
        Ok(())
    }

    /// Applies `inner` to the blocks starting at `at`, identity elsewhere.
    fn apply_at(&mut self, at: usize, inner: &Rule) -> Result<(), PlanError> {
        let lifted = lift_rule(&self.spec, at, inner)?;
        self.push(lifted)
    }

    fn permute(&mut self, sigma: &[usize]) -> Result<(), PlanError> {
        if sigma.iter().enumerate().all(|(i, &s)| i == s) {
            return Ok(());
        }
        let rule = apply_permutation(&self.spec, sigma)?;
        self.push(rule)
    }

    fn eliminate_to(&mut self, keep: usize) -> Result<(), PlanError> {
        if keep == self.spec.len() {
            return Ok(());
        }
        let rule = elimination_rule(&self.spec, keep)?;
        self.push(rule)
    }

    fn strip_j1(&mut self) -> Result<(), PlanError> {
        if let Some(rule) = strip_j1_rule(&self.spec)? {
            self.push(rule)?;
        }
        Ok(())
    }

    /// Splices in a whole certificate whose source is the current spec.
    fn extend(&mut self, cert: Certificate) -> Result<(), PlanError> {
        if cert.source != self.spec {
            return Err(PlanError::BrokenChain {
                at: self.steps.len(),
                got: cert.source.to_string(),
                want: self.spec.to_string(),
            });
        }
        self.steps.extend(cert.steps);
        self.spec = cert.target;
        Ok(())
    }

    fn into_certificate(self) -> Certificate {
        Certificate { source: self.source, target: self.spec, steps: self.steps }
    }
}

// ---------------------------------------------------------------------------
// Verdicts.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Consistent,
    Inconsistent,
    Unknown,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::Consistent => "consistent",
            VerdictKind::Inconsistent => "inconsistent",
            VerdictKind::Unknown => "unknown",
        }
    }
}

/// Why the verdict holds; `label` cites the supporting result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    TrivialZeroRank,
    NecessityBound,
    FullReduction,
    Gamma2OnlyWithinBound,
    Gamma2OnlyBound,
    SymmetricSource,
    Gamma1EliminationPath,
    MixedGammaOpen,
}

impl Reason {
    pub fn label(&self) -> &'static str {
        match self {
            Reason::TrivialZeroRank => "m = 0: the empty witness always solves the equation",
            Reason::NecessityBound => "necessity bound (Theorem 4.2): m > floor(rho(A))",
            Reason::FullReduction => {
                "sufficiency without Gamma_1/Gamma_2 blocks (Theorem 8.2): m <= rho(A)"
            }
            Reason::Gamma2OnlyWithinBound => {
                "Gamma_2-only source (Sec. 7.1 theorem): m <= floor(k/2)"
            }
            Reason::Gamma2OnlyBound => {
                "Gamma_2-only bound (Sec. 7.1 theorem): m > floor(k/2) even though m <= rho(A)"
            }
            Reason::SymmetricSource => {
                "symmetric-source obstruction (Sec. 7.2): a Gamma_1-only part is symmetric, so X^T A X can never equal a nonzero skew-symmetric matrix"
            }
            Reason::Gamma1EliminationPath => {
                "Elimination path (Sec. 9 corollary): Gamma_1 summands dropped, remainder reduces"
            }
            Reason::MixedGammaOpen => {
                "Gamma_1/Gamma_2 mixed with other blocks (Sec. 7.2): open case, only the necessity bound rank(B) <= 2 rho(A) is known"
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub reason: Reason,
    pub certificate: Option<Certificate>,
    pub rho: RhoValue,
    pub m: usize,
}

impl Verdict {
    fn new(kind: VerdictKind, reason: Reason, cert: Option<Certificate>, rho: RhoValue, m: usize) -> Self {
        Verdict { kind, reason, certificate: cert, rho, m }
    }
}

// ---------------------------------------------------------------------------
// Reducers.

/// Reduces a direct sum of Type-0 blocks (J_1(0) allowed, stripped first) to
/// `H_2(-1)^{\oplus floor(rho)}` plus a `J_2(0)` leftover when rho is a
/// half-integer.
pub fn reduce_type0(spec: &CfcSpec) -> Result<Certificate, PlanError> {
    if let Some(b) = spec.blocks().iter().find(|b| b.kind() != BlockKind::Type0) {
        return Err(PlanError::WrongBlockKind(b.to_string()));
    }
    let mut chain = Chain::new(spec.clone());
    chain.strip_j1()?;

    while let Some(idx) =
        chain.spec.blocks().iter().position(|b| b.kind() == BlockKind::Type0 && b.size() >= 3)
    {
        let size = chain.spec.blocks()[idx].size();
        let rule = match size {
            s if s % 2 == 0 => type0_rule(&Type0Rule::Shrink { k: s / 2 })?,
            3 => type0_rule(&Type0Rule::J3ToH2)?,
            5 => type0_rule(&Type0Rule::J5Split)?,
            s => type0_rule(&Type0Rule::SplitJ3 { k: s - 4 })?,
        };
        chain.apply_at(idx, &rule)?;
    }

    sort_h_first(&mut chain)?;
    pair_adjacent_j2(&mut chain)?;
    finish_reducer(chain, spec)
}

/// Reduces a direct sum of Type-II blocks to `H_2(-1)^{\oplus floor(rho)}`,
/// plus one `H_2(mu)` leftover when rho is a half-integer.
pub fn reduce_type_ii(spec: &CfcSpec) -> Result<Certificate, PlanError> {
    if let Some(b) = spec.blocks().iter().find(|b| b.kind() != BlockKind::TypeII) {
        return Err(PlanError::WrongBlockKind(b.to_string()));
    }
    let mut chain = Chain::new(spec.clone());

    while let Some(idx) = chain.spec.blocks().iter().position(|b| b.size() >= 4) {
        let block = &chain.spec.blocks()[idx];
        let mu = block.mu().expect("Type-II block").clone();
        let rule = type_ii_rule(&TypeIIRule::Peel { k: (block.size() - 4) / 2, mu })?;
        chain.apply_at(idx, &rule)?;
    }

    sort_h_first(&mut chain)?;

    // Pair leftover H_2(mu) blocks adjacently, in spec order.
    loop {
        let leftovers: Vec<usize> = chain
            .spec
            .blocks()
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_h2_minus_one())
            .map(|(i, _)| i)
            .collect();
        if leftovers.len() < 2 {
            break;
        }
        let idx = leftovers[0];
        debug_assert_eq!(leftovers[1], idx + 1);
        let mu = chain.spec.blocks()[idx].mu().unwrap().clone();
        let nu = chain.spec.blocks()[idx + 1].mu().unwrap().clone();
        let rule = if mu == nu {
            type_ii_rule(&TypeIIRule::PairEqual { mu })?
        } else {
            type_ii_rule(&TypeIIRule::PairDistinct { mu, nu })?
        };
        chain.apply_at(idx, &rule)?;
    }
    finish_reducer(chain, spec)
}

/// Stop targets for the per-block Type-I reduction; chosen so every pairing
/// below stays rho-invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GammaStop {
    AtGamma4,
    AtGamma6,
    AtGamma2,
    KeepGamma3,
    AtGamma1,
}

/// Reduces a direct sum of Type-I blocks, every size >= 3, to
/// `H_2(-1)^{\oplus floor(rho)} \oplus C` with C one of nothing, `Gamma_1`,
/// `J_2(0)`, `Gamma_2` matching the fractional part of rho.
pub fn reduce_type_i(spec: &CfcSpec) -> Result<Certificate, PlanError> {
    for b in spec.blocks() {
        if b.kind() != BlockKind::TypeI || b.size() < 3 {
            return Err(PlanError::WrongBlockKind(b.to_string()));
        }
    }
    let mut chain = Chain::new(spec.clone());

    // Families: sizes 4k / 4k+1 reduce toward Gamma_4 (residue 1/4); sizes
    // 4k+2 / 4k+3 toward Gamma_2 (residue 3/4). Pairs inside each family
    // combine through the printed two-block relations.
    let fam_a: Vec<usize> = spec
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.size() % 4 <= 1)
        .map(|(i, _)| i)
        .collect();
    let fam_b: Vec<usize> =
        spec.blocks().iter().enumerate().filter(|(_, b)| b.size() % 4 >= 2).map(|(i, _)| i).collect();

    let mut stop = vec![GammaStop::AtGamma1; spec.len()];
    // (ordered pair positions, rule) per pair; positions refer to original blocks.
    let mut pairs: Vec<(usize, usize, GammaSmallRule)> = Vec::new();
    for two in fam_a.chunks(2) {
        if let [i, j] = *two {
            stop[i] = GammaStop::AtGamma4;
            stop[j] = GammaStop::AtGamma4;
            pairs.push((i, j, GammaSmallRule::Gamma4Pair));
        } else {
            stop[two[0]] = GammaStop::AtGamma1;
        }
    }
    for two in fam_b.chunks(2) {
        if let [i, j] = *two {
            let k_i = (spec.blocks()[i].size() - 2) / 4;
            let k_j = (spec.blocks()[j].size() - 2) / 4;
            if k_i >= 1 {
                stop[i] = GammaStop::AtGamma6;
                stop[j] = GammaStop::AtGamma2;
                pairs.push((i, j, GammaSmallRule::Gamma6Gamma2Split));
            } else if k_j >= 1 {
                stop[i] = GammaStop::AtGamma2;
                stop[j] = GammaStop::AtGamma6;
                pairs.push((j, i, GammaSmallRule::Gamma6Gamma2Split));
            } else {
                stop[i] = GammaStop::KeepGamma3;
                stop[j] = GammaStop::AtGamma2;
                pairs.push((i, j, GammaSmallRule::Gamma3Gamma2Split));
            }
        } else {
            stop[two[0]] = GammaStop::AtGamma2;
        }
    }

    // Phase A: per-block reduction, left to right. gamma_pos[b] records where
    // block b's stopped Gamma ended up in the running spec.
    let mut gamma_pos = vec![0usize; spec.len()];
    let mut cursor = 0usize;
    for b in 0..spec.len() {
        cursor = reduce_gamma_block_to(&mut chain, cursor, stop[b])?;
        gamma_pos[b] = cursor - 1;
    }

    // Phase B: gather H blocks in front, then pair operands in rule order,
    // then the odd leftovers (family-B Gamma_2 before family-A Gamma_1).
    let mut order: Vec<usize> = (0..chain.spec.len())
        .filter(|i| chain.spec.blocks()[*i].is_h2_minus_one())
        .collect();
    let n_h = order.len();
    for &(i, j, _) in &pairs {
        order.push(gamma_pos[i]);
        order.push(gamma_pos[j]);
    }
    if fam_b.len() % 2 == 1 {
        order.push(gamma_pos[*fam_b.last().unwrap()]);
    }
    if fam_a.len() % 2 == 1 {
        order.push(gamma_pos[*fam_a.last().unwrap()]);
    }
    chain.permute(&order)?;

    // Phase C: apply the pair rules left to right.
    let mut at = n_h;
    for &(_, _, rule_sel) in &pairs {
        let rule = gamma_small_rule(rule_sel)?;
        let produced = rule.rhs().len();
        chain.apply_at(at, &rule)?;
        at += produced;
    }

    sort_h_first(&mut chain)?;
    pair_adjacent_j2(&mut chain)?;
    combine_small_leftovers(&mut chain)?;
    finish_reducer(chain, spec)
}

/// Reduces the Gamma block at `cursor` to its stop form; returns the index
/// just past the stopped block.
fn reduce_gamma_block_to(chain: &mut Chain, cursor: usize, stop: GammaStop) -> Result<usize, PlanError> {
    let mut pos = cursor;
    let mut size = chain.spec.blocks()[pos].size();
    if stop == GammaStop::KeepGamma3 {
        debug_assert_eq!(size, 3);
        return Ok(pos + 1);
    }
    if size % 2 == 1 {
        let rule = type_i_rule(&TypeIRule::OddStep { k: (size - 1) / 2 })?;
        chain.apply_at(pos, &rule)?;
        size -= 1;
    }
    let stop_size = match stop {
        GammaStop::AtGamma4 | GammaStop::AtGamma1 => 4,
        GammaStop::AtGamma6 => 6,
        GammaStop::AtGamma2 => 2,
        GammaStop::KeepGamma3 => unreachable!(),
    };
    while size > stop_size {
        let rule = type_i_rule(&TypeIRule::Peel { k: (size - 4) / 2 })?;
        chain.apply_at(pos, &rule)?;
        pos += 1;
        size -= 4;
    }
    if stop == GammaStop::AtGamma1 {
        let rule = type_i_rule(&TypeIRule::Gamma4Split)?;
        chain.apply_at(pos, &rule)?;
        pos += 1;
    }
    Ok(pos + 1)
}

/// After pairing, at most one each of J_2(0), Gamma_2, Gamma_1 remains, in
/// that order behind the H prefix; combine them by the printed relations.
fn combine_small_leftovers(chain: &mut Chain) -> Result<(), PlanError> {
    let pos_of = |chain: &Chain, pred: fn(&Block) -> bool| {
        chain.spec.blocks().iter().position(pred)
    };
    let have_j2 = pos_of(chain, Block::is_j2).is_some();
    let have_g2 = pos_of(chain, Block::is_gamma2).is_some();
    let have_g1 = pos_of(chain, Block::is_gamma1).is_some();

    match (have_j2, have_g2, have_g1) {
        (true, true, true) => {
            // Gamma_2 + Gamma_1 pair off; the new H joins the prefix.
            let at = pos_of(chain, Block::is_gamma2).unwrap();
            chain.apply_at(at, &gamma_small_rule(GammaSmallRule::Gamma2Gamma1Pair)?)?;
            sort_h_first(chain)?;
        }
        (true, true, false) => {
            // Need the order Gamma_2, J_2 for the split rule.
            let j2 = pos_of(chain, Block::is_j2).unwrap();
            let g2 = pos_of(chain, Block::is_gamma2).unwrap();
            let mut order: Vec<usize> = (0..chain.spec.len()).collect();
            order.swap(j2, g2);
            chain.permute(&order)?;
            let at = pos_of(chain, Block::is_gamma2).unwrap();
            chain.apply_at(at, &gamma_small_rule(GammaSmallRule::Gamma2J2Split)?)?;
            sort_h_first(chain)?;
        }
        (true, false, true) => {
            let at = pos_of(chain, Block::is_j2).unwrap();
            chain.apply_at(at, &gamma_small_rule(GammaSmallRule::J2Gamma1ToGamma2)?)?;
        }
        (false, true, true) => {
            let at = pos_of(chain, Block::is_gamma2).unwrap();
            chain.apply_at(at, &gamma_small_rule(GammaSmallRule::Gamma2Gamma1Pair)?)?;
            sort_h_first(chain)?;
        }
        _ => {}
    }
    Ok(())
}

/// Stable permutation bringing every `H_2(-1)` block to the front.
fn sort_h_first(chain: &mut Chain) -> Result<(), PlanError> {
    let mut order: Vec<usize> =
        (0..chain.spec.len()).filter(|&i| chain.spec.blocks()[i].is_h2_minus_one()).collect();
    order.extend((0..chain.spec.len()).filter(|&i| !chain.spec.blocks()[i].is_h2_minus_one()));
    chain.permute(&order)
}

/// Pairs adjacent J_2(0) blocks into H_2(-1) while two or more remain.
fn pair_adjacent_j2(chain: &mut Chain) -> Result<(), PlanError> {
    loop {
        let j2s: Vec<usize> = (0..chain.spec.len())
            .filter(|&i| chain.spec.blocks()[i].is_j2())
            .collect();
        if j2s.len() < 2 {
            return Ok(());
        }
        debug_assert_eq!(j2s[1], j2s[0] + 1);
        chain.apply_at(j2s[0], &type0_rule(&Type0Rule::PairJ2)?)?;
    }
}

/// Common reducer epilogue: check the `H^a (+ leftover)` shape and that the
/// leftover carries exactly the fractional part of rho.
fn finish_reducer(chain: Chain, source: &CfcSpec) -> Result<Certificate, PlanError> {
    let cert = chain.into_certificate();
    let blocks = cert.target.blocks();
    let h_count = blocks.iter().take_while(|b| b.is_h2_minus_one()).count();
    let leftover = cert.target.slice(h_count..blocks.len());
    let expected_h = source.rho().floor();
    if h_count as u64 != expected_h
        || leftover.rho().quarters != source.rho().fractional_quarters()
    {
        return Err(PlanError::Internal(format!(
            "reducer left {} with rho {}",
            cert.target,
            source.rho()
        )));
    }
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Combining the per-type reductions (the leftover case table).

/// Concatenates the three per-type certificates and combines their leftovers
/// into `H_2(-1)^{\oplus floor(rho)}` of the concatenated source.
pub fn combine_leftovers(
    c0: &Certificate,
    c1: &Certificate,
    c2: &Certificate,
) -> Result<Certificate, PlanError> {
    let source = c0.source.concat(&c1.source).concat(&c2.source);
    let mut chain = Chain::new(source);

    let mut offset = 0;
    for cert in [c0, c1, c2] {
        for step in &cert.steps {
            chain.apply_at(offset, step)?;
        }
        offset += cert.target.len();
    }

    sort_h_first(&mut chain)?;

    // One extra H_2(-1) is owed exactly when the fractional parts of the
    // three group rhos sum to at least 1, i.e. when the H prefix is shorter
    // than floor(rho) of the whole.
    let floor = chain.spec.rho().floor();
    let h_count = chain.spec.blocks().iter().filter(|b| b.is_h2_minus_one()).count() as u64;
    if h_count < floor {
        let j2 = chain.spec.blocks().iter().position(Block::is_j2);
        let gamma = chain.spec.blocks().iter().position(|b| b.kind() == BlockKind::TypeI);
        let h_mu = chain
            .spec
            .blocks()
            .iter()
            .position(|b| b.kind() == BlockKind::TypeII && !b.is_h2_minus_one());
        match (j2, gamma, h_mu) {
            (Some(_), gamma_opt, Some(_)) => {
                // Drop any Type-I leftover first, then H_2(mu) absorbs J_2(0).
                if let Some(gpos) = gamma_opt {
                    let mut order: Vec<usize> =
                        (0..chain.spec.len()).filter(|&i| i != gpos).collect();
                    order.push(gpos);
                    chain.permute(&order)?;
                    chain.eliminate_to(chain.spec.len() - 1)?;
                }
                absorb_j2_with_h2mu(&mut chain)?;
            }
            (None, Some(gpos), Some(hpos)) => {
                // Only a Gamma_2 reaches a whole quarter-sum with H_2(mu).
                if !chain.spec.blocks()[gpos].is_gamma2() {
                    return Err(PlanError::Internal(format!(
                        "unexpected leftover combination in {}",
                        chain.spec
                    )));
                }
                // H_2(mu) + Gamma_2 ~> H_2(-1) + Gamma_1.
                let mu = chain.spec.blocks()[hpos].mu().unwrap().clone();
                let mut order: Vec<usize> =
                    (0..chain.spec.len()).filter(|&i| i != gpos && i != hpos).collect();
                let at = order.len();
                order.push(hpos);
                order.push(gpos);
                chain.permute(&order)?;
                chain.apply_at(at, &mixed_rule(&MixedRule::H2Gamma2Split { mu })?)?;
                sort_h_first(&mut chain)?;
            }
            (Some(j2pos), Some(gpos), None) if chain.spec.blocks()[gpos].is_gamma2() => {
                // Gamma_2 + J_2(0) ~> H_2(-1) + Gamma_1.
                let mut order: Vec<usize> =
                    (0..chain.spec.len()).filter(|&i| i != gpos && i != j2pos).collect();
                let at = order.len();
                order.push(gpos);
                order.push(j2pos);
                chain.permute(&order)?;
                chain.apply_at(at, &gamma_small_rule(GammaSmallRule::Gamma2J2Split)?)?;
                sort_h_first(&mut chain)?;
            }
            (Some(_), None, None) => {
                // Two J_2(0) leftovers, one from the Type-0 group and one
                // from the Type-I group.
                pair_adjacent_j2(&mut chain)?;
            }
            _ => {
                return Err(PlanError::Internal(format!(
                    "no combining rule for leftovers of {}",
                    chain.spec
                )));
            }
        }
    }

    // Stray half leftovers that did not participate stay for elimination.
    pair_adjacent_j2(&mut chain)?;
    sort_h_first(&mut chain)?;
    let floor = chain.spec.rho().floor() as usize;
    chain.eliminate_to(floor)?;
    let want = chain.source.rho().floor();
    if chain.spec.len() as u64 != want
        || !chain.spec.blocks().iter().all(Block::is_h2_minus_one)
    {
        return Err(PlanError::Internal(format!(
            "leftover combination ended at {} instead of H_2(-1)^{want}",
            chain.spec
        )));
    }
    Ok(chain.into_certificate())
}

/// Reorders so that the single H_2(mu) leftover directly precedes the single
/// J_2(0) leftover, then applies `H_2(mu) + J_2(0) ~> H_2(-1)`.
fn absorb_j2_with_h2mu(chain: &mut Chain) -> Result<(), PlanError> {
    let hpos = chain
        .spec
        .blocks()
        .iter()
        .position(|b| b.kind() == BlockKind::TypeII && !b.is_h2_minus_one())
        .ok_or_else(|| PlanError::Internal("missing H_2(mu) leftover".into()))?;
    let j2pos = chain
        .spec
        .blocks()
        .iter()
        .position(|b| b.is_j2())
        .ok_or_else(|| PlanError::Internal("missing J_2(0) leftover".into()))?;
    let mu = chain.spec.blocks()[hpos].mu().unwrap().clone();
    let mut order: Vec<usize> = (0..chain.spec.len()).filter(|&i| i != hpos && i != j2pos).collect();
    let at = order.len();
    order.push(hpos);
    order.push(j2pos);
    chain.permute(&order)?;
    chain.apply_at(at, &type_ii_rule(&TypeIIRule::AbsorbJ2 { mu })?)?;
    sort_h_first(chain)
}

// ---------------------------------------------------------------------------
// The decision procedure.

/// Decides whether `X^T A X = H_2(-1)^{\oplus m}` is consistent for the
/// matrix A described by `spec`, producing a certificate when it is.
pub fn decide(spec: &CfcSpec, m: usize) -> Verdict {
    match decide_inner(spec, m) {
        Ok(v) => v,
        // Construction errors mean an internal bug; surface them loudly
        // rather than mislabeling the query.
        Err(e) => panic!("planner failed on {spec} with m = {m}: {e}"),
    }
}

fn decide_inner(spec: &CfcSpec, m: usize) -> Result<Verdict, PlanError> {
    let rho = spec.rho();
    if m == 0 {
        let mut chain = Chain::new(spec.clone());
        chain.eliminate_to(0)?;
        return Ok(Verdict::new(
            VerdictKind::Consistent,
            Reason::TrivialZeroRank,
            Some(chain.into_certificate()),
            rho,
            m,
        ));
    }
    if m as u64 > rho.floor() {
        return Ok(Verdict::new(VerdictKind::Inconsistent, Reason::NecessityBound, None, rho, m));
    }
    let (core, _) = spec.strip_j1();
    let has_g1 = core.blocks().iter().any(Block::is_gamma1);
    let has_g2 = core.blocks().iter().any(Block::is_gamma2);

    if !has_g1 && !has_g2 {
        let cert = build_full_reduction(spec, m)?;
        return Ok(Verdict::new(VerdictKind::Consistent, Reason::FullReduction, Some(cert), rho, m));
    }
    if core.blocks().iter().all(Block::is_gamma2) {
        let k = core.len();
        if m <= k / 2 {
            let cert = build_gamma2_only(spec, m)?;
            return Ok(Verdict::new(
                VerdictKind::Consistent,
                Reason::Gamma2OnlyWithinBound,
                Some(cert),
                rho,
                m,
            ));
        }
        return Ok(Verdict::new(VerdictKind::Inconsistent, Reason::Gamma2OnlyBound, None, rho, m));
    }
    if core.blocks().iter().all(Block::is_gamma1) {
        return Ok(Verdict::new(VerdictKind::Inconsistent, Reason::SymmetricSource, None, rho, m));
    }
    if !has_g2 {
        // Gamma_1 blocks mixed with other kinds: drop them by Elimination
        // when the remainder already reaches m.
        let rest: Vec<Block> =
            core.blocks().iter().filter(|b| !b.is_gamma1()).cloned().collect();
        let rest = CfcSpec::new(rest);
        if m as u64 <= rest.rho().floor() {
            let cert = build_gamma1_elimination(spec, m)?;
            return Ok(Verdict::new(
                VerdictKind::Consistent,
                Reason::Gamma1EliminationPath,
                Some(cert),
                rho,
                m,
            ));
        }
    }
    Ok(Verdict::new(VerdictKind::Unknown, Reason::MixedGammaOpen, None, rho, m))
}

/// The main pipeline: strip J_1(0), group blocks by type, run the three
/// reducers, combine leftovers, and eliminate down to m summands.
fn build_full_reduction(spec: &CfcSpec, m: usize) -> Result<Certificate, PlanError> {
    let mut chain = Chain::new(spec.clone());
    chain.strip_j1()?;
    reduce_grouped_core(&mut chain)?;
    chain.eliminate_to(m)?;
    Ok(chain.into_certificate())
}

fn reduce_grouped_core(chain: &mut Chain) -> Result<(), PlanError> {
    let spec = chain.spec.clone();
    let mut order: Vec<usize> = Vec::with_capacity(spec.len());
    for kind in [BlockKind::Type0, BlockKind::TypeI, BlockKind::TypeII] {
        order.extend((0..spec.len()).filter(|&i| spec.blocks()[i].kind() == kind));
    }
    chain.permute(&order)?;

    let grouped = chain.spec.clone();
    let n0 = grouped.blocks().iter().filter(|b| b.kind() == BlockKind::Type0).count();
    let n1 = grouped.blocks().iter().filter(|b| b.kind() == BlockKind::TypeI).count();
    let c0 = reduce_type0(&grouped.slice(0..n0))?;
    let c1 = reduce_type_i(&grouped.slice(n0..n0 + n1))?;
    let c2 = reduce_type_ii(&grouped.slice(n0 + n1..grouped.len()))?;
    let combined = combine_leftovers(&c0, &c1, &c2)?;
    chain.extend(combined)
}

/// Gamma_2-only route: pair the first 2m Gamma_2 blocks, then eliminate.
fn build_gamma2_only(spec: &CfcSpec, m: usize) -> Result<Certificate, PlanError> {
    let mut chain = Chain::new(spec.clone());
    chain.strip_j1()?;
    let pair = gamma2_pair_rule()?;
    for t in 0..m {
        chain.apply_at(t, &pair)?;
    }
    chain.eliminate_to(m)?;
    Ok(chain.into_certificate())
}

/// Elimination route for Gamma_1 blocks mixed with other kinds: permute the
/// Gamma_1 summands to the back, drop them, reduce the remainder.
fn build_gamma1_elimination(spec: &CfcSpec, m: usize) -> Result<Certificate, PlanError> {
    let mut chain = Chain::new(spec.clone());
    chain.strip_j1()?;
    let mut order: Vec<usize> =
        (0..chain.spec.len()).filter(|&i| !chain.spec.blocks()[i].is_gamma1()).collect();
    let keep = order.len();
    order.extend((0..chain.spec.len()).filter(|&i| chain.spec.blocks()[i].is_gamma1()));
    chain.permute(&order)?;
    chain.eliminate_to(keep)?;
    reduce_grouped_core(&mut chain)?;
    chain.eliminate_to(m)?;
    Ok(chain.into_certificate())
}

// ---------------------------------------------------------------------------
// Solving.

/// Solution of `X^T A X = H_2(-1)^{\oplus m}`: the composed witness of the
/// certificate, with rows for stripped J_1(0) blocks zero at their original
/// positions.
pub fn solve(spec: &CfcSpec, m: usize) -> Result<(DenseMatrix, Certificate), PlanError> {
    let verdict = decide(spec, m);
    match verdict.kind {
        VerdictKind::Consistent => {
            let cert = verdict.certificate.expect("consistent verdicts carry certificates");
            let x = cert.composed_witness()?;
            debug_assert!(cert.verify().is_ok());
            debug_assert_eq!(
                spec.materialize().congruence_by(&x)?,
                CfcSpec::h2_power(m).materialize()
            );
            Ok((x, cert))
        }
        _ => Err(PlanError::NotConsistent(verdict.reason.label().to_string())),
    }
}

/// Solves `X^T A X = B` for an arbitrary exact skew-symmetric B, by
/// canonicalizing B and padding the canonical solution with zero columns.
pub fn solve_general(spec: &CfcSpec, b: &DenseMatrix) -> Result<DenseMatrix, PlanError> {
    if !skew_canon::is_skew(b)? {
        return Err(PlanError::Skew(SkewError::NotSkew));
    }
    let reduction = skew_canon::skew_canonicalize(b)?;
    let m = reduction.m;
    let (x1, _) = solve(spec, m)?;
    let padded = x1.pad_columns(b.rows() - 2 * m);
    let x = padded.mul(&reduction.q.inverse()?)?;
    debug_assert_eq!(spec.materialize().congruence_by(&x)?, *b);
    Ok(x)
}

/// The largest rank of a skew-symmetric `X^T A X`, when the theory pins it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxSkewRank {
    Known(u64),
    /// Open case; the necessity bound `2 * floor(rho)` still applies.
    Unknown { upper_bound: u64 },
}

pub fn max_skew_rank(spec: &CfcSpec) -> MaxSkewRank {
    let bound = 2 * spec.rho().floor();
    let (core, _) = spec.strip_j1();
    let has_g1 = core.blocks().iter().any(Block::is_gamma1);
    let has_g2 = core.blocks().iter().any(Block::is_gamma2);
    if !has_g1 && !has_g2 {
        return MaxSkewRank::Known(bound);
    }
    if core.blocks().iter().all(Block::is_gamma2) {
        return MaxSkewRank::Known(2 * (core.len() as u64 / 2));
    }
    if core.blocks().iter().all(Block::is_gamma1) {
        return MaxSkewRank::Known(0);
    }
    if !has_g2 {
        let rest: Vec<Block> = core.blocks().iter().filter(|b| !b.is_gamma1()).cloned().collect();
        if CfcSpec::new(rest).rho().floor() == spec.rho().floor() {
            return MaxSkewRank::Known(bound);
        }
    }
    MaxSkewRank::Unknown { upper_bound: bound }
}

/// Exact check of `transpose(x) * a * x == b`.
pub fn verify_matrices(a: &DenseMatrix, x: &DenseMatrix, b: &DenseMatrix) -> Result<bool, PlanError> {
    if !a.is_square() || a.rows() != x.rows() || b.rows() != x.cols() || !b.is_square() {
        return Err(PlanError::ShapeMismatch(format!(
            "A {}x{}, X {}x{}, B {}x{}",
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.congruence_by(x)? == *b)
}

pub fn verify_spec(spec: &CfcSpec, x: &DenseMatrix, b: &DenseMatrix) -> Result<bool, PlanError> {
    verify_matrices(&spec.materialize(), x, b)
}
