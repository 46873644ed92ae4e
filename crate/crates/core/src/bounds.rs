//! Deficiency arithmetic and replayable bound certificates.
//!
//! Every certificate carries the list of rule applications that produced
//! it. [`BoundCertificate::replay`] re-evaluates the rules from their
//! recorded inputs and compares the results exactly.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::chains::{abelian_stage, build_chain, Chain, ChainError, ChainStage};
use crate::coset::EnumerationLimits;
use crate::presentation::Presentation;
use crate::rational::{self, integer, Ratio};
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateKind {
    DefLower,
    Supermult,
    L23Drop,
    VdLower,
    B1PropCompletion,
    B12PropCompletion,
}

/// How much a reported value is worth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    /// Matches a known exact value.
    #[serde(rename = "EXACT")]
    Exact,
    /// A proven inequality about the group itself.
    #[serde(rename = "CERTIFIED-BOUND")]
    CertifiedBound,
    /// Evidence from finite data only.
    #[serde(rename = "HEURISTIC")]
    Heuristic,
    /// A statement about the pro-p completion, carried over from a bound on
    /// the group. The completion is never constructed.
    #[serde(rename = "PROPAGATED")]
    Propagated,
}

/// One rule application. `Maximum` and `Propagate` refer to earlier steps
/// of the same provenance list by position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// `generators - relators`.
    Presentation { generators: usize, relators: usize },
    /// `(parent - 1) index + 1`.
    Supermultiplicativity {
        #[serde(with = "rational")]
        parent: Ratio,
        index: usize,
    },
    /// `def - index / order`.
    QuotientDrop {
        #[serde(with = "rational")]
        def: Ratio,
        index: usize,
        order: usize,
    },
    /// `(generators - relators - 1) / index` for a normal subgroup of the
    /// given index, from its rewritten presentation.
    VirtualStage {
        stage: String,
        index: usize,
        generators: usize,
        relators: usize,
        raw_relators: usize,
    },
    Maximum { of: Vec<usize> },
    Propagate { from: usize },
}

impl Rule {
    fn evaluate(&self, earlier: &[Ratio]) -> Option<Ratio> {
        Some(match self {
            Rule::Presentation { generators, relators } => integer(*generators as i64 - *relators as i64),
            Rule::Supermultiplicativity { parent, index } => {
                (parent - integer(1)) * integer(*index as i64) + integer(1)
            }
            Rule::QuotientDrop { def, index, order } => {
                if *order == 0 {
                    return None;
                }
                def - rational::ratio(*index as i64, *order as i64)
            }
            Rule::VirtualStage { index, generators, relators, .. } => {
                rational::ratio(*generators as i64 - *relators as i64 - 1, *index as i64)
            }
            Rule::Maximum { of } => of.iter().map(|&i| earlier.get(i).cloned()).collect::<Option<Vec<_>>>()?.into_iter().max()?,
            Rule::Propagate { from } => earlier.get(*from)?.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProvenanceStep {
    #[serde(flatten)]
    pub rule: Rule,
    #[serde(with = "rational")]
    pub output: Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCertificate {
    pub kind: CertificateKind,
    pub statement: String,
    #[serde(with = "rational")]
    pub value: Ratio,
    pub status: Status,
    /// Set when the bound is at most zero and so says nothing.
    pub uninformative: bool,
    pub provenance: Vec<ProvenanceStep>,
}

impl BoundCertificate {
    fn from_rules(kind: CertificateKind, status: Status, statement: impl Into<String>, rules: Vec<Rule>) -> Self {
        let mut provenance: Vec<ProvenanceStep> = Vec::with_capacity(rules.len());
        for rule in rules {
            let earlier: Vec<Ratio> = provenance.iter().map(|s| s.output.clone()).collect();
            let output = rule.evaluate(&earlier).expect("rules are built with valid references");
            provenance.push(ProvenanceStep { rule, output });
        }
        let value = provenance.last().expect("at least one rule").output.clone();
        let uninformative = value <= Ratio::zero();
        let statement = statement.into().replace("{}", &value.to_string());
        BoundCertificate { kind, statement, value, status, uninformative, provenance }
    }

    /// Re-evaluates every rule and checks each recorded output, and the
    /// final value, exactly.
    pub fn replay(&self) -> bool {
        let mut outputs: Vec<Ratio> = Vec::with_capacity(self.provenance.len());
        for step in &self.provenance {
            match step.rule.evaluate(&outputs) {
                Some(v) if v == step.output => outputs.push(v),
                _ => return false,
            }
        }
        outputs.last() == Some(&self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("index {index} is smaller than the order {order}")]
    IndexBelowOrder { index: usize, order: usize },
    #[error("power p^n is too large for p = {p}, n = {n}")]
    ExponentTooLarge { p: u64, n: u32 },
    #[error("cannot take a power of the empty word")]
    EmptyWord,
}

/// `d - r`, a lower bound for the deficiency.
pub fn def_lower_bound(pres: &Presentation) -> i64 {
    pres.generator_count() as i64 - pres.relator_count() as i64
}

pub fn def_certificate(pres: &Presentation) -> BoundCertificate {
    BoundCertificate::from_rules(
        CertificateKind::DefLower,
        Status::CertifiedBound,
        "def(G) >= {}",
        vec![Rule::Presentation { generators: pres.generator_count(), relators: pres.relator_count() }],
    )
}

/// Deficiency bound for an index-`index` subgroup of a group with
/// presentation `pres`.
pub fn supermult_certificate(pres: &Presentation, index: usize) -> BoundCertificate {
    let base = integer(def_lower_bound(pres));
    BoundCertificate::from_rules(
        CertificateKind::Supermult,
        Status::CertifiedBound,
        format!("def(H) >= {{}} for every subgroup H of index {index}"),
        vec![
            Rule::Presentation { generators: pres.generator_count(), relators: pres.relator_count() },
            Rule::Supermultiplicativity { parent: base, index },
        ],
    )
}

/// Deficiency bound after killing `g^m`, where `m` is the order of `g` in
/// `G/N` and `N` has deficiency at least `def_n` and index `index`.
pub fn l23_drop(def_n: i64, index: usize, m: usize) -> Result<Ratio, BoundsError> {
    if m == 0 {
        return Err(BoundsError::ZeroOrder);
    }
    if index < m {
        return Err(BoundsError::IndexBelowOrder { index, order: m });
    }
    Ok(integer(def_n) - rational::ratio(index as i64, m as i64))
}

pub fn l23_certificate(def_n: i64, index: usize, m: usize) -> Result<BoundCertificate, BoundsError> {
    l23_drop(def_n, index, m)?;
    Ok(BoundCertificate::from_rules(
        CertificateKind::L23Drop,
        Status::CertifiedBound,
        "def(M) >= {}",
        vec![Rule::QuotientDrop { def: integer(def_n), index, order: m }],
    ))
}

fn stage_label(stage: &ChainStage) -> String {
    match stage.abelian_exponent {
        Some(e) => format!("abelian^{e}"),
        None => format!("derived^{}", stage.depth),
    }
}

/// `max (def(H) - 1) / [G:H]` over the given normal subgroups, where
/// `def(H)` counts relators distinct up to cyclic permutation and inversion.
pub fn vd_from_stages<'a, I: IntoIterator<Item = &'a ChainStage>>(p: u64, stages: I) -> BoundCertificate {
    let mut rules: Vec<Rule> = stages
        .into_iter()
        .map(|s| Rule::VirtualStage {
            stage: stage_label(s),
            index: s.index(),
            generators: s.subgroup.generator_count(),
            relators: s.subgroup.distinct_relator_count(),
            raw_relators: s.subgroup.relator_count(),
        })
        .collect();
    assert!(!rules.is_empty(), "need at least one stage");
    rules.push(Rule::Maximum { of: (0..rules.len()).collect() });
    BoundCertificate::from_rules(CertificateKind::VdLower, Status::CertifiedBound, format!("vd_{p}(G) >= {{}}"), rules)
}

/// A chain with its vd certificate.
#[derive(Clone, Debug)]
pub struct VdBound {
    pub chain: Chain,
    pub extra_stages: Vec<ChainStage>,
    pub certificate: BoundCertificate,
}

/// Lower bound for the p-virtual deficiency from the derived p-series to
/// `depth`.
pub fn vd_lower_bound(
    pres: &Presentation,
    p: u64,
    depth: usize,
    limits: EnumerationLimits,
) -> Result<VdBound, ChainError> {
    vd_lower_bound_with(pres, p, depth, &[], limits)
}

/// As [`vd_lower_bound`], also including the kernels of
/// `G -> H_1(G) (x) Z/p^e` for each `e` in `abelian_exponents` that fits
/// within the limits.
pub fn vd_lower_bound_with(
    pres: &Presentation,
    p: u64,
    depth: usize,
    abelian_exponents: &[u32],
    limits: EnumerationLimits,
) -> Result<VdBound, ChainError> {
    let chain = build_chain(pres, p, depth, limits)?;
    let extra_stages: Vec<ChainStage> =
        abelian_exponents.iter().filter_map(|&e| abelian_stage(pres, p, e, limits)).collect();
    let certificate = vd_from_stages(p, chain.stages.iter().chain(&extra_stages));
    Ok(VdBound { chain, extra_stages, certificate })
}

/// `pres` with the extra relator `g^(p^n)`.
pub fn quotient_by_power(pres: &Presentation, g: &Word, p: u64, n: u32) -> Result<Presentation, BoundsError> {
    if g.is_empty() {
        return Err(BoundsError::EmptyWord);
    }
    let q = p.checked_pow(n).filter(|&q| q <= i32::MAX as u64).ok_or(BoundsError::ExponentTooLarge { p, n })?;
    Ok(pres.with_relators([g.pow(q as i64)]))
}

/// Bounds for the pro-p completion carried over from a deficiency bound and
/// a vd bound for the group.
pub fn completion_certificates(def: &BoundCertificate, vd: &BoundCertificate, p: u64) -> (BoundCertificate, BoundCertificate) {
    let mut b1_rules: Vec<Rule> = def.provenance.iter().map(|s| s.rule.clone()).collect();
    b1_rules.push(Rule::Propagate { from: b1_rules.len() - 1 });
    let mut l2_rules: Vec<Rule> = vd.provenance.iter().map(|s| s.rule.clone()).collect();
    l2_rules.push(Rule::Propagate { from: l2_rules.len() - 1 });
    (
        BoundCertificate::from_rules(
            CertificateKind::B1PropCompletion,
            Status::Propagated,
            format!("b1(pro-{p} completion) >= {{}}"),
            b1_rules,
        ),
        BoundCertificate::from_rules(
            CertificateKind::B12PropCompletion,
            Status::Propagated,
            format!("b1^(2)(pro-{p} completion) >= {{}}"),
            l2_rules,
        ),
    )
}
