//! Decision procedure for infinite atomic Boolean algebras, their expansion
//! by a proper ideal, and set-theoretic mereology, plus the pipelines for
//! 2-stratified set and class sentences.

mod engine;
mod matrix;
mod profile;


use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Atom, Formula, FormulaError, Signature};
use crate::translate::{chi, pipeline_levels, relativize_to_ideal, tau, TranslateError};

pub use engine::{SearchStats, MAX_SCOPE};
pub use matrix::{eliminate_exists, eliminate_forall, normalize_matrix, NormalizedMatrix};
pub use profile::{all_profiles, split_realizable, split_realizable_at, CellProfile, CountClass, IdealFlag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theory {
    #[serde(rename = "MER")]
    Mer,
    #[serde(rename = "IABA")]
    Iaba,
    #[serde(rename = "IABA_IDEAL")]
    IabaIdeal,
}

impl Theory {
    pub fn name(self) -> &'static str {
        match self {
            Theory::Mer => "MER",
            Theory::Iaba => "IABA",
            Theory::IabaIdeal => "IABA_IDEAL",
        }
    }

    /// Signature of the sentences the theory decides.
    pub fn signature(self) -> Signature {
        match self {
            Theory::Mer | Theory::Iaba => Signature::Order,
            Theory::IabaIdeal => Signature::OrderIdeal,
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "mer" => Ok(Theory::Mer),
            "iaba" => Ok(Theory::Iaba),
            "iaba-ideal" => Ok(Theory::IabaIdeal),
            _ => Err(format!("unknown theory `{s}` (expected mer, iaba or iaba-ideal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    Invalid,
    NotTwoStratified,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Valid
        } else {
            Verdict::Invalid
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "Valid",
            Verdict::Invalid => "Invalid",
            Verdict::NotTwoStratified => "NotTwoStratified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("sentence has free variable `{0}`")]
    FreeVariable(String),
    #[error("symbol `{0}` is not allowed for this theory")]
    Signature(String),
    #[error("granularity {granularity} does not exceed counting constant {constant}")]
    Granularity { granularity: u32, constant: u32 },
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

impl From<FormulaError> for DecideError {
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::Signature { symbol, .. } => DecideError::Signature(symbol),
            other => DecideError::Internal(other.to_string()),
        }
    }
}

/// Elimination strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Miniscoped, memoized search over cell splits.
    #[default]
    Lazy,
    /// Prenex form, full case-split matrix, innermost-out elimination.
    Eager,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    /// Added to the base granularity `max C + 2`.
    pub granularity_offset: u32,
    /// Split assignments the lazy search may visit.
    pub visit_cap: u64,
    /// Disjuncts any eager matrix may hold.
    pub disjunct_cap: usize,
    pub strategy: Strategy,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            granularity_offset: 0,
            visit_cap: 50_000_000,
            disjunct_cap: 1_000_000,
            strategy: Strategy::Lazy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct DecideStats {
    /// Split assignments visited (lazy) or disjuncts produced (eager).
    pub disjuncts: u64,
    #[serde(rename = "maxGranularity")]
    pub max_granularity: u32,
    pub millis: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub stats: DecideStats,
}

fn mentions_ideal(f: &Formula) -> bool {
    let mut found = false;
    f.visit_atoms(&mut |a| found |= matches!(a, Atom::Ideal(_)));
    found
}

/// Decides a closed order sentence in the given theory.
pub fn decide(f: &Formula, th: Theory) -> Result<Verdict, DecideError> {
    Ok(decide_with(f, th, &DecideOptions::default())?.verdict)
}

/// [`decide`] with explicit options and statistics.
pub fn decide_with(f: &Formula, th: Theory, opts: &DecideOptions) -> Result<Decision, DecideError> {
    let start = Instant::now();
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(DecideError::FreeVariable(v));
    }
    f.check_signature(th.signature())?;
    let target = match th {
        Theory::Mer => relativize_to_ideal(f)?,
        Theory::Iaba | Theory::IabaIdeal => f.clone(),
    };
    let ideal = mentions_ideal(&target);
    let t0 = target.max_count_constant() + 2 + opts.granularity_offset;
    let (valid, disjuncts, max_granularity) = match opts.strategy {
        Strategy::Lazy => {
            let program = engine::compile(&target, ideal, t0)?;
            let (v, s) = engine::run(&program, opts.visit_cap)?;
            (v, s.visits, s.max_granularity)
        }
        Strategy::Eager => matrix::decide_eager(&target, ideal, t0, opts.disjunct_cap)?,
    };
    Ok(Decision {
        verdict: Verdict::from_bool(valid),
        stats: DecideStats {
            disjuncts,
            max_granularity,
            millis: start.elapsed().as_millis(),
        },
    })
}

/// Decides a closed SET sentence in BAS when it is 2-stratified.
pub fn decide_set_sentence(f: &Formula) -> Result<Verdict, DecideError> {
    Ok(decide_set_sentence_with(f, &DecideOptions::default())?.verdict)
}

pub fn decide_set_sentence_with(f: &Formula, opts: &DecideOptions) -> Result<Decision, DecideError> {
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(DecideError::FreeVariable(v));
    }
    f.check_signature(Signature::Set)?;
    match pipeline_levels(f)? {
        None => Ok(not_two_stratified()),
        Some(levels) => decide_with(&tau(f, &levels)?, Theory::Mer, opts),
    }
}

/// Decides a closed CLASS sentence in BAC+ when it is 2-stratified.
pub fn decide_class_sentence(f: &Formula) -> Result<Verdict, DecideError> {
    Ok(decide_class_sentence_with(f, &DecideOptions::default())?.verdict)
}

pub fn decide_class_sentence_with(f: &Formula, opts: &DecideOptions) -> Result<Decision, DecideError> {
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(DecideError::FreeVariable(v));
    }
    f.check_signature(Signature::Class)?;
    match pipeline_levels(f)? {
        None => Ok(not_two_stratified()),
        Some(levels) => decide_with(&chi(f, &levels)?, Theory::IabaIdeal, opts),
    }
}

fn not_two_stratified() -> Decision {
    Decision {
        verdict: Verdict::NotTwoStratified,
        stats: DecideStats::default(),
    }
}
