//! Nested chains of normal subgroups of p-power index.
//!
//! The chain is the derived p-series `P_0 = G`, `P_{i+1} = P_i^p [P_i, P_i]`.
//! Each stage is held as a set of words whose normal closure in `G` is the
//! stage subgroup, together with the regular representation of the quotient.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::coset::{is_normal, normal_closure_table, CosetTable, EnumerationError, EnumerationLimits};
use crate::homology::{abelian_invariants, b1_mod_p, is_prime};
use crate::presentation::Presentation;
use crate::rational::{self, Ratio};
use crate::schreier::{rewrite_subgroup, SubgroupPresentation};
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("{0} is not prime")]
    NotPrime(u64),
}

#[derive(Clone, Debug)]
pub struct ChainStage {
    pub depth: usize,
    /// `Some(e)` for the kernel of `G -> H_1(G) (x) Z/p^e`, which is not a
    /// derived-series stage.
    pub abelian_exponent: Option<u32>,
    pub closure_words: Vec<Word>,
    pub table: CosetTable,
    pub subgroup: SubgroupPresentation,
    pub b1: usize,
    pub b1_mod_p: usize,
}

impl ChainStage {
    fn build(
        pres: &Presentation,
        p: u64,
        depth: usize,
        abelian_exponent: Option<u32>,
        closure_words: Vec<Word>,
        limits: EnumerationLimits,
    ) -> Result<Self, EnumerationError> {
        let table = normal_closure_table(pres, &closure_words, limits)?;
        let subgroup = rewrite_subgroup(pres, &table);
        let simplified = subgroup.simplified();
        let b1 = abelian_invariants(&simplified).rank;
        let b1_mod_p = b1_mod_p(&simplified, p).expect("prime checked by caller");
        Ok(ChainStage { depth, abelian_exponent, closure_words, table, subgroup, b1, b1_mod_p })
    }

    pub fn index(&self) -> usize {
        self.table.index()
    }

    /// Number of Schreier generators of the stage subgroup.
    pub fn rank(&self) -> usize {
        self.subgroup.generator_count()
    }

    /// `b1(N) / [G:N]`.
    pub fn ratio(&self) -> Ratio {
        rational::ratio(self.b1 as i64, self.index() as i64)
    }

    pub fn summary(&self) -> StageSummary {
        StageSummary {
            depth: self.depth,
            abelian_exponent: self.abelian_exponent,
            index: self.index(),
            b1: self.b1,
            b1_mod_p: self.b1_mod_p,
            schreier_gen_count: self.rank(),
            relator_count: self.subgroup.relator_count(),
            def_bound: self.subgroup.deficiency_bound(),
            ratio: self.ratio(),
            ratio_decimal: rational::decimal(&self.ratio()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageSummary {
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abelian_exponent: Option<u32>,
    pub index: usize,
    pub b1: usize,
    pub b1_mod_p: usize,
    pub schreier_gen_count: usize,
    pub relator_count: usize,
    pub def_bound: i64,
    #[serde(serialize_with = "rational::serialize")]
    pub ratio: Ratio,
    pub ratio_decimal: f64,
}

/// Why a chain stopped before the requested depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Truncation {
    /// The index law predicted a stage larger than the coset limit.
    PredictedIndex {
        depth: usize,
        #[serde(serialize_with = "crate::homology::serialize_big")]
        predicted_index: BigUint,
        max_cosets: usize,
    },
    /// Enumeration of the stage failed.
    Enumeration { depth: usize, message: String },
}

impl Truncation {
    pub fn depth(&self) -> usize {
        match self {
            Truncation::PredictedIndex { depth, .. } | Truncation::Enumeration { depth, .. } => *depth,
        }
    }
}

/// A derived p-series, possibly cut short.
#[derive(Clone, Debug)]
pub struct Chain {
    pub presentation: Presentation,
    pub p: u64,
    pub requested_depth: usize,
    pub stages: Vec<ChainStage>,
    pub truncated: Option<Truncation>,
}

/// Results of the structural checks on a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainChecks {
    pub nesting: bool,
    pub normality: bool,
    pub index_law: bool,
    pub p_power_index: bool,
}

impl ChainChecks {
    pub fn all(&self) -> bool {
        self.nesting && self.normality && self.index_law && self.p_power_index
    }
}

pub const RESIDUAL_CAVEAT: &str = "the stages intersect trivially only if the group is residually p; this is not checked";

impl Chain {
    pub fn deepest(&self) -> &ChainStage {
        self.stages.last().expect("a chain has at least stage 0")
    }

    pub fn indices(&self) -> Vec<usize> {
        self.stages.iter().map(ChainStage::index).collect()
    }

    pub fn b1s(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.b1).collect()
    }

    pub fn ratios(&self) -> Vec<Ratio> {
        self.stages.iter().map(ChainStage::ratio).collect()
    }

    /// True once a stage has trivial mod-p homology, so all later stages
    /// coincide with it.
    pub fn stabilized(&self) -> bool {
        self.deepest().b1_mod_p == 0
    }

    pub fn check(&self) -> ChainChecks {
        let mut c = ChainChecks { nesting: true, normality: true, index_law: true, p_power_index: true };
        for (i, s) in self.stages.iter().enumerate() {
            c.normality &= is_normal(&self.presentation, &s.table, &s.subgroup.generator_words());
            c.p_power_index &= is_power_of(s.index() as u64, self.p);
            if i > 0 {
                let prev = &self.stages[i - 1];
                c.nesting &= s.closure_words.iter().all(|w| prev.table.trace(0, w) == 0);
                let predicted = predicted_index(prev, self.p);
                c.index_law &= predicted == BigUint::from(s.index());
            }
        }
        c
    }

    /// First stage whose table moves coset 0 under `w`, if any.
    pub fn separating_stage(&self, w: &Word) -> Option<usize> {
        self.stages.iter().position(|s| s.table.trace(0, w) != 0)
    }

    pub fn report(&self) -> ChainReport {
        ChainReport {
            presentation: self.presentation.to_string(),
            p: self.p,
            requested_depth: self.requested_depth,
            stages: self.stages.iter().map(ChainStage::summary).collect(),
            truncated: self.truncated.clone(),
            checks: self.check(),
            caveat: RESIDUAL_CAVEAT,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub presentation: String,
    pub p: u64,
    pub requested_depth: usize,
    pub stages: Vec<StageSummary>,
    pub truncated: Option<Truncation>,
    pub checks: ChainChecks,
    pub caveat: &'static str,
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}

/// `[G:P_i] * p^(dim H_1(P_i; F_p))`.
pub fn predicted_index(stage: &ChainStage, p: u64) -> BigUint {
    BigUint::from(stage.index()) * num_traits::pow(BigUint::from(p), stage.b1_mod_p)
}

/// Words whose normal closure in `G` is the next derived p-series stage:
/// `y^p` and `[y, z]` over the Schreier generators of `sub`, as parent words.
pub fn derived_p_step(parent: &Presentation, sub: &SubgroupPresentation, p: u64) -> Vec<Word> {
    assert_eq!(parent.generator_count(), sub.parent().generator_count());
    let ys = sub.generator_words();
    let mut out = Vec::with_capacity(ys.len() + ys.len() * ys.len().saturating_sub(1) / 2);
    for y in &ys {
        out.push(y.pow(p as i64));
    }
    for k in 0..ys.len() {
        for l in k + 1..ys.len() {
            out.push(Word::commutator(&ys[k], &ys[l]));
        }
    }
    out
}

/// Builds stages `0..=depth` of the derived p-series, stopping early with a
/// truncation marker when a stage would exceed `limits`.
pub fn build_chain(
    pres: &Presentation,
    p: u64,
    depth: usize,
    limits: EnumerationLimits,
) -> Result<Chain, ChainError> {
    if !is_prime(p) {
        return Err(ChainError::NotPrime(p));
    }
    let generators: Vec<Word> = (0..pres.generator_count()).map(Word::generator).collect();
    let stage0 = ChainStage::build(pres, p, 0, None, generators, limits).expect("index 1 always fits");
    let mut chain =
        Chain { presentation: pres.clone(), p, requested_depth: depth, stages: vec![stage0], truncated: None };
    for i in 1..=depth {
        let prev = chain.deepest();
        let predicted = predicted_index(prev, p);
        if predicted > BigUint::from(limits.max_cosets) {
            chain.truncated =
                Some(Truncation::PredictedIndex { depth: i, predicted_index: predicted, max_cosets: limits.max_cosets });
            break;
        }
        let closure = derived_p_step(pres, &prev.subgroup, p);
        match ChainStage::build(pres, p, i, None, closure, limits) {
            Ok(stage) => chain.stages.push(stage),
            Err(e) => {
                chain.truncated = Some(Truncation::Enumeration { depth: i, message: e.to_string() });
                break;
            }
        }
    }
    Ok(chain)
}

/// Index of the kernel of `G -> H_1(G) (x) Z/p^e`.
pub fn abelian_stage_index(pres: &Presentation, p: u64, e: u32) -> BigUint {
    abelian_invariants(pres).order_mod(p.pow(e))
}

/// The kernel of `G -> H_1(G) (x) Z/p^e`, or `None` when its index is over
/// the limit.
pub fn abelian_stage(pres: &Presentation, p: u64, e: u32, limits: EnumerationLimits) -> Option<ChainStage> {
    assert!(is_prime(p), "{p} is not prime");
    let predicted = abelian_stage_index(pres, p, e);
    if predicted.to_usize().map_or(true, |n| n > limits.max_cosets) {
        return None;
    }
    let q = p.pow(e) as i64;
    let d = pres.generator_count();
    let mut closure: Vec<Word> = (0..d).map(|g| Word::generator(g).pow(q)).collect();
    for a in 0..d {
        for b in a + 1..d {
            closure.push(Word::commutator(&Word::generator(a), &Word::generator(b)));
        }
    }
    let stage = ChainStage::build(pres, p, 1, Some(e), closure, limits).ok()?;
    debug_assert_eq!(BigUint::from(stage.index()), predicted);
    Some(stage)
}
