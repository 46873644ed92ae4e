//! A finite-depth run of the torsion-tower construction.
//!
//! Starting from a free group, elements `f_1, f_2, ...` are taken in
//! length-lex order. If `f_k` looks like it has finite order in the pro-p
//! completion of the current quotient, the quotient is left alone. If its
//! order keeps growing down the witness chain, the smallest exponent `n` is
//! chosen so that adding the relator `f_k^(p^n)` keeps the computed
//! p-virtual deficiency bound above `gen_count - 1 - epsilon`.
//!
//! The bound is computed over the derived p-series to `chain_depth` and the
//! kernels of `G -> H_1(G) (x) Z/p^e` for every exponent `e` chosen so far.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{l23_drop, quotient_by_power, vd_from_stages, BoundCertificate, Status};
use crate::chains::{abelian_stage, build_chain, Chain, ChainError, ChainStage};
use crate::coset::{normal_closure_table, EnumerationLimits};
use crate::homology::is_prime;
use crate::presentation::Presentation;
use crate::rational::{self, integer, Ratio};
use crate::schreier::rewrite_subgroup;
use crate::words::{cyclic_class_key, cyclic_reduce, enumerate_words, Word};

#[derive(Clone, Debug)]
pub struct TowerConfig {
    pub gen_count: usize,
    pub p: u64,
    pub epsilon: Ratio,
    pub steps: usize,
    pub probe_depth: usize,
    pub chain_depth: usize,
    pub n_cap: u32,
    pub word_check_cap: usize,
    pub limits: EnumerationLimits,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            gen_count: 2,
            p: 2,
            epsilon: rational::ratio(1, 2),
            steps: 3,
            probe_depth: 2,
            chain_depth: 2,
            n_cap: 8,
            word_check_cap: 3,
            limits: EnumerationLimits::default(),
        }
    }
}

impl TowerConfig {
    /// `gen_count - 1 - epsilon`.
    pub fn threshold(&self) -> Ratio {
        integer(self.gen_count as i64 - 1) - &self.epsilon
    }

    pub fn validate(&self) -> Result<(), TowerError> {
        if self.gen_count < 2 {
            return Err(TowerError::Precondition(format!("gen_count must be at least 2, got {}", self.gen_count)));
        }
        if !is_prime(self.p) {
            return Err(TowerError::Precondition(format!("{} is not prime", self.p)));
        }
        if self.epsilon <= Ratio::zero() || self.epsilon >= integer(self.gen_count as i64 - 1) {
            return Err(TowerError::Precondition(format!(
                "epsilon must lie strictly between 0 and {}, got {}",
                self.gen_count - 1,
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("{0}")]
    Precondition(String),
    #[error("step {k}: no exponent up to {n_cap} keeps the vd bound above {threshold}")]
    ThresholdUnreachable { k: usize, n_cap: u32, threshold: String },
    #[error("step {k}: {message}")]
    LimitExceeded { k: usize, message: String },
}

/// Order of an element as seen in the witness chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrderVerdict {
    /// `order` is the order in the deepest probed quotient. `certified` is
    /// set when finiteness in the pro-p completion is proven: either the
    /// chain has stabilized or a relator is a power of the element.
    FiniteOrder { order: u64, certified: bool },
    /// The order grew between the last two probed stages.
    UnresolvedAtDepth { depth: usize, order: u64 },
}

#[derive(Clone, Debug)]
pub struct TowerState {
    pub config: TowerConfig,
    pub k: usize,
    pub free: Presentation,
    pub presentation: Presentation,
    /// Exponents `n` used so far, in order of use.
    pub exponents: Vec<u32>,
    pub witness: Chain,
    pub extra_stages: Vec<ChainStage>,
    pub vd: BoundCertificate,
    pub ledger: Vec<StepRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub n: u32,
    #[serde(with = "rational")]
    pub vd_bound: Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientDropCheck {
    pub stage: String,
    pub index: usize,
    pub def_before: i64,
    pub order: usize,
    #[serde(with = "rational")]
    pub bound: Ratio,
    pub def_after: i64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordCheck {
    pub max_length: usize,
    pub words_checked: usize,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conditions {
    /// `f_k` has p-power order in the deepest witness quotient.
    pub a: bool,
    /// The vd bound, recomputed from scratch, is above the threshold.
    pub b: bool,
    /// No short nontrivial word lies in the witness subgroup `N_k`.
    pub c: WordCheck,
    /// The new relator lies in `N_{k-1}` and `N_k` lies in the image of
    /// `N_{k-1}`.
    pub d: bool,
    pub relators_monotone: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepCase {
    Finite,
    Quotient,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub k: usize,
    pub f: String,
    pub order: OrderVerdict,
    pub case: StepCase,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_start: Option<u32>,
    pub attempts: Vec<Attempt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relator: Option<String>,
    #[serde(with = "rational")]
    pub threshold: Ratio,
    #[serde(with = "rational")]
    pub vd_before: Ratio,
    #[serde(with = "rational")]
    pub vd_after: Ratio,
    pub vd_after_decimal: f64,
    pub witness_indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_drop: Option<QuotientDropCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Conditions>,
}

/// Final line of a tower ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerSummary {
    pub steps: usize,
    pub presentation: String,
    pub exponents: Vec<u32>,
    #[serde(with = "rational")]
    pub vd_bound: Ratio,
    pub vd_provenance_replays: bool,
    pub ledger_replays: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Family {
    chain: Chain,
    extra: Vec<ChainStage>,
    vd: BoundCertificate,
}

fn family(pres: &Presentation, config: &TowerConfig, exponents: &[u32]) -> Result<Family, ChainError> {
    let depth = config.chain_depth.max(config.probe_depth);
    let chain = build_chain(pres, config.p, depth, config.limits)?;
    let mut exps = exponents.to_vec();
    exps.sort_unstable();
    exps.dedup();
    let extra: Vec<ChainStage> = exps.iter().filter_map(|&e| abelian_stage(pres, config.p, e, config.limits)).collect();
    let vd = vd_from_stages(config.p, chain.stages.iter().take(config.chain_depth + 1).chain(&extra));
    Ok(Family { chain, extra, vd })
}

fn stage_name(s: &ChainStage) -> String {
    match s.abelian_exponent {
        Some(e) => format!("abelian^{e}"),
        None => format!("derived^{}", s.depth),
    }
}

impl TowerState {
    /// The free group on `config.gen_count` generators.
    pub fn new(config: TowerConfig) -> Result<Self, TowerError> {
        config.validate()?;
        let free = Presentation::free(config.gen_count);
        let fam = family(&free, &config, &[]).map_err(|e| TowerError::Precondition(e.to_string()))?;
        Ok(TowerState {
            config,
            k: 0,
            presentation: free.clone(),
            free,
            exponents: Vec::new(),
            witness: fam.chain,
            extra_stages: fam.extra,
            vd: fam.vd,
            ledger: Vec::new(),
        })
    }

    /// The stage playing the role of `N_k`: the deepest derived stage built.
    pub fn witness_stage(&self) -> &ChainStage {
        self.witness.deepest()
    }

    pub fn summary(&self, error: Option<&TowerError>) -> TowerSummary {
        TowerSummary {
            steps: self.k,
            presentation: self.presentation.to_string(),
            exponents: self.exponents.clone(),
            vd_bound: self.vd.value.clone(),
            vd_provenance_replays: self.vd.replay(),
            ledger_replays: replay_ledger(&self.free, &self.ledger) == self.presentation,
            error: error.map(ToString::to_string),
        }
    }
}

/// Order of `f` in the quotients of the witness chain, up to `probe_depth`.
pub fn order_in_tower(state: &TowerState, f: &Word, probe_depth: usize) -> OrderVerdict {
    order_in_chain(&state.presentation, &state.witness, f, probe_depth)
}

fn order_in_chain(pres: &Presentation, chain: &Chain, f: &Word, probe_depth: usize) -> OrderVerdict {
    if f.is_empty() {
        return OrderVerdict::FiniteOrder { order: 1, certified: true };
    }
    let depth = probe_depth.min(chain.stages.len() - 1);
    let orders: Vec<u64> = chain.stages[..=depth].iter().map(|s| s.table.cycle_length(0, f) as u64).collect();
    let order = orders[depth];
    let stabilized = chain.stages[depth].b1_mod_p == 0;
    if stabilized || is_power_relator(pres, f) {
        return OrderVerdict::FiniteOrder { order, certified: true };
    }
    if depth >= 1 && orders[depth] > orders[depth - 1] {
        return OrderVerdict::UnresolvedAtDepth { depth, order };
    }
    OrderVerdict::FiniteOrder { order, certified: false }
}

/// True when some relator is a cyclic conjugate of `u^k` or `u^-k`, with
/// `u` the cyclic reduction of `f`.
fn is_power_relator(pres: &Presentation, f: &Word) -> bool {
    let u = cyclic_reduce(f);
    if u.is_empty() {
        return false;
    }
    pres.relators().iter().any(|r| {
        if r.is_empty() || r.len() % u.len() != 0 {
            return false;
        }
        let k = (r.len() / u.len()) as i64;
        cyclic_class_key(r) == cyclic_class_key(&u.pow(k))
    })
}

fn log_p(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        n /= p;
        e += 1;
    }
    e
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}

fn word_check(stage: &ChainStage, gen_count: usize, k: usize, cap: usize) -> WordCheck {
    let bound = k.min(cap);
    let max_length = bound.saturating_sub(1);
    let words: Vec<Word> = enumerate_words(gen_count, max_length).into_iter().filter(|w| !w.is_empty()).collect();
    let passes = words.iter().all(|w| stage.table.trace(0, w) != 0);
    WordCheck { max_length, words_checked: words.len(), passes }
}

/// Processes `f` as step `k + 1`. On failure a record is still appended
/// and the state is otherwise unchanged.
pub fn tower_step(state: &mut TowerState, f: &Word, threshold: &Ratio) -> Result<(), TowerError> {
    let k = state.k + 1;
    let config = state.config.clone();
    let p = config.p;
    let order = order_in_tower(state, f, config.probe_depth);
    let f_text = state.free.display_word(f).to_string();
    let vd_before = state.vd.value.clone();
    let old_witness = state.witness_stage().clone();
    let before = state.presentation.clone();

    let mut record = StepRecord {
        k,
        f: f_text,
        order,
        case: StepCase::Finite,
        status: Status::Heuristic,
        exponent_start: None,
        attempts: Vec::new(),
        n: None,
        relator: None,
        threshold: threshold.clone(),
        vd_before: vd_before.clone(),
        vd_after: vd_before.clone(),
        vd_after_decimal: rational::decimal(&vd_before),
        witness_indices: state.witness.indices(),
        quotient_drop: None,
        conditions: None,
    };

    match order {
        OrderVerdict::FiniteOrder { certified, .. } => {
            record.status = if certified { Status::CertifiedBound } else { Status::Heuristic };
            let fam = family(&state.presentation, &config, &state.exponents)
                .map_err(|e| TowerError::Precondition(e.to_string()))?;
            state.witness = fam.chain;
            state.extra_stages = fam.extra;
            state.vd = fam.vd;
        }
        OrderVerdict::UnresolvedAtDepth { order: o, .. } => {
            record.case = StepCase::Quotient;
            let m = log_p(o, p);
            record.exponent_start = Some(m);
            let mut accepted = None;
            for n in m..=config.n_cap {
                let candidate = match quotient_by_power(&state.presentation, f, p, n) {
                    Ok(c) => c,
                    Err(_) => break,
                };
                let mut exps = state.exponents.clone();
                exps.push(n);
                let fam = family(&candidate, &config, &exps).map_err(|e| TowerError::Precondition(e.to_string()))?;
                record.attempts.push(Attempt { n, vd_bound: fam.vd.value.clone() });
                if fam.vd.value > *threshold {
                    accepted = Some((n, candidate, exps, fam));
                    break;
                }
            }
            let Some((n, candidate, exps, fam)) = accepted else {
                record.case = StepCase::Failed;
                let err = TowerError::ThresholdUnreachable { k, n_cap: config.n_cap, threshold: threshold.to_string() };
                state.ledger.push(record);
                return Err(err);
            };
            record.n = Some(n);
            let relator = candidate.relators().last().expect("relator just added").clone();
            record.relator = Some(candidate.display_word(&relator).to_string());
            record.quotient_drop = quotient_drop_check(&state.presentation, &fam, f, config.limits);
            state.presentation = candidate;
            state.exponents = exps;
            state.witness = fam.chain;
            state.extra_stages = fam.extra;
            state.vd = fam.vd;
        }
    }

    state.k = k;
    record.vd_after = state.vd.value.clone();
    record.vd_after_decimal = rational::decimal(&state.vd.value);
    record.witness_indices = state.witness.indices();
    record.conditions = Some(conditions(state, &before, &old_witness, f, threshold, k));
    state.ledger.push(record);
    Ok(())
}

/// Replays the quotient drop on the stage that achieved the new vd bound.
fn quotient_drop_check(
    before: &Presentation,
    fam: &Family,
    f: &Word,
    limits: EnumerationLimits,
) -> Option<QuotientDropCheck> {
    let value = |s: &ChainStage| rational::ratio(s.subgroup.deficiency_bound() - 1, s.index() as i64);
    let mut best: Option<&ChainStage> = None;
    for s in fam.chain.stages.iter().chain(&fam.extra).filter(|s| s.index() > 1) {
        if best.map_or(true, |b| value(s) > value(b)) {
            best = Some(s);
        }
    }
    let best = best?;
    let table = normal_closure_table(before, &best.closure_words, limits).ok()?;
    if table.index() != best.index() {
        return None;
    }
    let sub = rewrite_subgroup(before, &table);
    let def_before = sub.deficiency_bound();
    let order = table.cycle_length(0, f);
    let bound = l23_drop(def_before, best.index(), order).ok()?;
    let def_after = best.subgroup.deficiency_bound();
    Some(QuotientDropCheck {
        stage: stage_name(best),
        index: best.index(),
        def_before,
        order,
        holds: bound <= integer(def_after),
        bound,
        def_after,
    })
}

fn conditions(
    state: &TowerState,
    before: &Presentation,
    old_witness: &ChainStage,
    f: &Word,
    threshold: &Ratio,
    k: usize,
) -> Conditions {
    let config = &state.config;
    let witness = state.witness_stage();
    let a = is_power_of(witness.table.cycle_length(0, f) as u64, config.p);

    let echo = family(&state.presentation, config, &state.exponents).map(|fam| fam.vd.value);
    let b = matches!(echo, Ok(ref v) if v > threshold && *v == state.vd.value);

    let c = word_check(witness, config.gen_count, k, config.word_check_cap);

    let old = before.relators();
    let now = state.presentation.relators();
    let relators_monotone = now.len() >= old.len() && now[..old.len()] == *old;
    let d = now[old.len().min(now.len())..].iter().all(|r| old_witness.table.trace(0, r) == 0)
        && witness.closure_words.iter().all(|w| old_witness.table.trace(0, w) == 0);

    Conditions { a, b, c, d, relators_monotone }
}

/// Re-applies every accepted quotient in the ledger to `free`.
pub fn replay_ledger(free: &Presentation, ledger: &[StepRecord]) -> Presentation {
    ledger.iter().filter(|r| r.case == StepCase::Quotient).fold(free.clone(), |g, r| {
        let rel = free.parse_word(r.relator.as_deref().expect("quotient steps record a relator")).expect("ledger words parse");
        g.with_relators([rel])
    })
}

/// The first `count` nontrivial reduced words in length-lex order.
pub fn enumerate_elements(gen_count: usize, count: usize) -> Vec<Word> {
    let mut bound = 1;
    loop {
        let words: Vec<Word> = enumerate_words(gen_count, bound).into_iter().filter(|w| !w.is_empty()).collect();
        if words.len() >= count {
            return words.into_iter().take(count).collect();
        }
        bound += 1;
    }
}

#[derive(Clone, Debug)]
pub struct TowerRun {
    pub state: TowerState,
    pub error: Option<TowerError>,
}

impl TowerRun {
    pub fn summary(&self) -> TowerSummary {
        self.state.summary(self.error.as_ref())
    }

    /// One JSON object per step, then the summary.
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.state.ledger {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary()).expect("summary serializes"));
        out.push('\n');
        out
    }
}

/// Runs `config.steps` steps from the free group. Precondition failures
/// are returned as errors; failures during the run end it early and are
/// reported in the returned run.
pub fn run_tower(config: TowerConfig) -> Result<TowerRun, TowerError> {
    let threshold = config.threshold();
    let elements = enumerate_elements(config.gen_count, config.steps);
    let mut state = TowerState::new(config)?;
    for f in &elements {
        if let Err(e) = tower_step(&mut state, f, &threshold) {
            return Ok(TowerRun { state, error: Some(e) });
        }
    }
    Ok(TowerRun { state, error: None })
}
