//! Sentence files: an `@sig NAME` header followed by one sentence per line.
//! `#` starts a comment; a trailing comment names the sentence.

use std::path::Path;

use thiserror::Error;

use crate::formula::{parse_formula, Formula, FormulaError, Signature};

/// Axiom of choice for families of pairwise disjoint nonempty sets.
pub const CHOICE_SENTENCE: &str = "forall X. ((forall x. (x in X -> exists w. w in x)) & (forall x. forall y. ((x in X & y in X) -> (!(x = y) -> !(exists w. (w in x & w in y))))) -> exists C. ((forall z. (z in C -> exists x. (x in X & z in x))) & (forall x. (x in X -> exists z. (z in C & z in x))) & (forall z. forall w. (z in C -> (w in C -> forall x. (x in X -> ((z in x & w in x) -> z = w)))))))";

/// Every class or its complement is a set; independent of the class axioms.
pub const INDEPENDENCE_SENTENCE: &str =
    "forall x. exists y. ((forall z. (z in y <-> !(z in x))) & (S(x) | S(y)))";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Formula {
        line: usize,
        #[source]
        source: FormulaError,
    },
    #[error("missing or invalid `@sig` header")]
    Header,
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub line: usize,
    pub text: String,
    pub formula: Formula,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub signature: Signature,
    pub entries: Vec<CorpusEntry>,
}

fn signature_named(name: &str) -> Option<Signature> {
    Signature::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
}

pub fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let mut signature = None;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(raw[p + 1..].trim())),
            None => (raw, None),
        };
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("@sig") {
            signature = Some(signature_named(rest.trim()).ok_or(CorpusError::Header)?);
            continue;
        }
        let sig = signature.ok_or(CorpusError::Header)?;
        let formula = parse_formula(body, sig).map_err(|source| CorpusError::Formula {
            line,
            source: relocate(source, line),
        })?;
        let name = comment
            .filter(|c| !c.is_empty())
            .map_or_else(|| format!("line {line}"), str::to_string);
        entries.push(CorpusEntry {
            name,
            line,
            text: body.to_string(),
            formula,
        });
    }
    Ok(Corpus {
        signature: signature.ok_or(CorpusError::Header)?,
        entries,
    })
}

fn relocate(e: FormulaError, line: usize) -> FormulaError {
    match e {
        FormulaError::Syntax { column, message, .. } => FormulaError::Syntax { line, column, message },
        other => other,
    }
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_corpus(&text)
}
