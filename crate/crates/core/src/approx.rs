//! Ratios `b1(N_i) / [G:N_i]` along a chain and the lower-bound statement
//! they support for the first L2-betti number.

use serde::Serialize;

use crate::bounds::Status;
use crate::chains::{Chain, Truncation};
use crate::presentation::Presentation;
use crate::rational::{self, integer, Ratio};
use crate::words::{cyclic_class_key, Word};

pub const DEFAULT_TORSION_EPSILON: (i64, i64) = (1, 100);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRatio {
    pub depth: usize,
    pub index: usize,
    pub b1: usize,
    #[serde(with = "rational")]
    pub ratio: Ratio,
    pub ratio_decimal: f64,
}

impl StageRatio {
    pub fn new(depth: usize, index: usize, b1: usize) -> Self {
        let ratio = rational::ratio(b1 as i64, index as i64);
        StageRatio { depth, index, b1, ratio_decimal: rational::decimal(&ratio), ratio }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L2Certificate {
    pub statement: &'static str,
    /// The bound asserted for `b1^(2)(G)`.
    #[serde(with = "rational")]
    pub value: Ratio,
    pub status: Status,
    /// Least ratio over the tail of the chain.
    #[serde(with = "rational")]
    pub tail_min: Ratio,
    /// Known exact value, for free and surface groups.
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub reference: Option<Ratio>,
    /// `value` is at most every computed tail ratio.
    pub consistent: bool,
}

fn serialize_opt_ratio<S: serde::Serializer>(r: &Option<Ratio>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => rational::serialize(r, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxReport {
    pub stages: Vec<StageRatio>,
    /// Largest ratio over stages past the first; the finite stand-in for the
    /// limit superior.
    #[serde(with = "rational")]
    pub limsup_estimate: Ratio,
    pub certificate: L2Certificate,
    pub truncated: bool,
}

/// Exact L2-betti number for presentations recognised as a free group or
/// the standard surface group of genus `g`.
pub fn known_l2_betti(pres: &Presentation) -> Option<Ratio> {
    let d = pres.generator_count();
    if pres.relator_count() == 0 {
        return Some(integer(d as i64 - 1));
    }
    if pres.relator_count() == 1 && d >= 2 && d % 2 == 0 {
        let standard = (0..d / 2).fold(Word::identity(), |acc, i| {
            acc.mul(&Word::commutator(&Word::generator(2 * i), &Word::generator(2 * i + 1)))
        });
        if cyclic_class_key(&pres.relators()[0]) == cyclic_class_key(&standard) {
            return Some(integer(d as i64 - 2));
        }
    }
    None
}

/// Ratio report from `(depth, index, b1)` rows; the first row is `G`.
pub fn approx_from_rows(pres: &Presentation, rows: &[StageRatio], truncated: bool) -> ApproxReport {
    assert!(!rows.is_empty(), "a chain has at least stage 0");
    let tail: &[StageRatio] = if rows.len() > 1 { &rows[1..] } else { rows };
    let tail_min = tail.iter().map(|s| s.ratio.clone()).min().expect("nonempty");
    let limsup_estimate = tail.iter().map(|s| s.ratio.clone()).max().expect("nonempty");
    let reference = known_l2_betti(pres);
    let (value, status) = match &reference {
        Some(r) => (r.clone(), Status::Exact),
        None => (tail_min.clone(), Status::Heuristic),
    };
    let consistent = tail.iter().all(|s| value <= s.ratio);
    ApproxReport {
        stages: rows.to_vec(),
        limsup_estimate,
        certificate: L2Certificate {
            statement: "THEOREM1_LOWER_BOUND",
            value,
            status,
            tail_min,
            reference,
            consistent,
        },
        truncated,
    }
}

pub fn approx_sequence(chain: &Chain) -> ApproxReport {
    let rows: Vec<StageRatio> = chain.stages.iter().map(|s| StageRatio::new(s.depth, s.index(), s.b1)).collect();
    approx_from_rows(&chain.presentation, &rows, chain.truncated.is_some())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionObservation {
    pub flag: bool,
    #[serde(with = "rational")]
    pub epsilon: Ratio,
    pub note: &'static str,
}

pub const TORSION_NOTE: &str = "all tail ratios are at most epsilon; for a torsion group the limit is 0";

/// Flags chains whose tail ratios all fall at or below `epsilon`.
pub fn torsion_observation(chain: &Chain, epsilon: &Ratio) -> TorsionObservation {
    let ratios = chain.ratios();
    let tail = if ratios.len() > 1 { &ratios[1..] } else { &ratios[..] };
    let flag = tail.iter().all(|r| r <= epsilon);
    TorsionObservation { flag, epsilon: epsilon.clone(), note: if flag { TORSION_NOTE } else { "" } }
}

pub fn default_epsilon() -> Ratio {
    rational::ratio(DEFAULT_TORSION_EPSILON.0, DEFAULT_TORSION_EPSILON.1)
}

/// Marker text for truncated chains.
pub fn truncation_note(t: &Truncation) -> String {
    match t {
        Truncation::PredictedIndex { depth, predicted_index, max_cosets } => {
            format!("stage {depth} would have index {predicted_index}, over the limit of {max_cosets}")
        }
        Truncation::Enumeration { depth, message } => format!("stage {depth}: {message}"),
    }
}
