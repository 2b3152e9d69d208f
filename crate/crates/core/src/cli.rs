//! Batch command-line front end.
//!
//! Exit codes: 0 success or Valid, 1 Invalid or false, 2 not applicable
//! (unstratified or not 2-stratified), 3 error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::corpus::{load_corpus, parse_corpus, Corpus};
use crate::decide::{
    decide_class_sentence_with, decide_set_sentence_with, decide_with, DecideOptions, Decision, Theory,
    Verdict,
};
use crate::formula::{parse_formula, render, Formula, Signature};
use crate::models::{
    axiom_check_sample, bounded_eval_with, build_bac_plus_model, build_bas_model, parse_element, StructureKind,
};
use crate::stratification::infer_stratification;
use crate::translate::{chi, pipeline_levels, relativize_to_ideal, subset_expansion, tau};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

const BAS_AXIOMS: &str = include_str!("../../../axioms/bas.fml");
const BAC_PLUS_AXIOMS: &str = include_str!("../../../axioms/bac_plus.fml");

/// A parsed invocation.
#[derive(Debug, Clone, Parser)]
#[command(name = "mereo", version, about = "Decide stratified set and class sentences via their subset orders")]
pub struct RunConfig {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include wall-clock timings in reports.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Parse and pretty-print a sentence.
    Parse {
        /// Signature; inferred when omitted.
        #[arg(long, value_enum)]
        sig: Option<SigArg>,
        #[command(flatten)]
        input: Input,
    },
    /// Infer a stratification of a SET or CLASS formula.
    Stratify {
        #[command(flatten)]
        input: Input,
    },
    /// Translate between the membership and order languages.
    Translate {
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        input: Input,
    },
    /// Decide a sentence in MER, IABA or IABA_IDEAL, or run a SET/CLASS pipeline.
    Decide {
        /// mer, iaba or iaba-ideal.
        #[arg(long)]
        theory: Option<Theory>,
        #[arg(long, value_enum)]
        pipeline: Option<Pipeline>,
        #[command(flatten)]
        input: Input,
    },
    /// Evaluate an order sentence in a computable structure.
    Eval {
        #[arg(long, value_enum)]
        structure: StructureArg,
        #[arg(long, default_value_t = 3)]
        budget: u32,
        /// Binds a free variable: `--let x={1,2}`.
        #[arg(long = "let", value_name = "VAR=LITERAL")]
        bindings: Vec<String>,
        #[command(flatten)]
        input: Input,
    },
    /// Membership models built from the lattices.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Decide every sentence of a corpus file.
    CorpusRun {
        file: PathBuf,
        /// Theory for ORDER and ORDER_IDEAL corpora.
        #[arg(long)]
        theory: Option<Theory>,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum ModelCommand {
    /// Check axioms on seeded random instances.
    Check {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Corpus of axioms; defaults to the model's own axioms.
        #[arg(long)]
        axioms: Option<PathBuf>,
    },
}

/// A sentence given inline or read from a file.
#[derive(Debug, Clone, Args)]
pub struct Input {
    /// The sentence.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    pub sentence: Option<String>,
    /// Read the sentence from a file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl Input {
    fn text(&self) -> Result<String, Error> {
        match (&self.sentence, &self.file) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(p)) => std::fs::read_to_string(p)
                .map_err(|e| Error::Usage(format!("cannot read {}: {e}", p.display()))),
            (None, None) => Err(Error::Usage("no sentence given".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigArg {
    Set,
    Class,
    Order,
    OrderIdeal,
}

impl From<SigArg> for Signature {
    fn from(s: SigArg) -> Self {
        match s {
            SigArg::Set => Signature::Set,
            SigArg::Class => Signature::Class,
            SigArg::Order => Signature::Order,
            SigArg::OrderIdeal => Signature::OrderIdeal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// SET to ORDER.
    Tau,
    /// CLASS to ORDER_IDEAL.
    Chi,
    /// ORDER to SET.
    Expand,
    /// ORDER to ORDER_IDEAL.
    Relativize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    Set,
    Class,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    Finset,
    Fincofin,
    Evperiodic,
}

impl From<StructureArg> for StructureKind {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::Finset => StructureKind::FinSet,
            StructureArg::Fincofin => StructureKind::FinCofin,
            StructureArg::Evperiodic => StructureKind::EvPeriodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Bas,
    Bacplus,
}

/// Result of a run: exit code and standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub output: String,
}

/// Parses arguments (including the program name) and runs them. Returns
/// the exit code, standard output and standard error.
pub fn run_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => match run(&config) {
            Ok(r) => (r.code, r.output, String::new()),
            Err(e) => (EXIT_ERROR, String::new(), format!("error: {e}\n")),
        },
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                (EXIT_ERROR, String::new(), text)
            } else {
                (EXIT_OK, text, String::new())
            }
        }
    }
}

/// Runs one command.
pub fn run(config: &RunConfig) -> Result<Report, Error> {
    let out = Output {
        json: config.json,
        timing: config.timing,
    };
    match &config.command {
        Command::Parse { sig, input } => parse_cmd(&out, *sig, input),
        Command::Stratify { input } => stratify_cmd(&out, input),
        Command::Translate { mode, input } => translate_cmd(&out, *mode, input),
        Command::Decide {
            theory,
            pipeline,
            input,
        } => decide_cmd(&out, *theory, *pipeline, input),
        Command::Eval {
            structure,
            budget,
            bindings,
            input,
        } => eval_cmd(&out, (*structure).into(), *budget, bindings, input),
        Command::Model {
            command:
                ModelCommand::Check {
                    model,
                    samples,
                    seed,
                    axioms,
                },
        } => model_check_cmd(&out, *model, *samples, *seed, axioms.as_ref()),
        Command::CorpusRun { file, theory } => corpus_run_cmd(&out, file, *theory),
    }
}

struct Output {
    json: bool,
    timing: bool,
}

impl Output {
    fn emit(&self, code: i32, text: String, report: Value) -> Report {
        let output = if self.json {
            let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
            s.push('\n');
            s
        } else {
            text
        };
        Report { code, output }
    }

    fn decision(&self, d: &Decision) -> Value {
        let mut v = serde_json::to_value(d.stats).expect("stats serialize");
        if !self.timing {
            if let Value::Object(m) = &mut v {
                m.remove("millis");
            }
        }
        v
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Valid => EXIT_OK,
        Verdict::Invalid => EXIT_FALSE,
        Verdict::NotTwoStratified => EXIT_NOT_APPLICABLE,
    }
}

fn infer_signature(text: &str) -> Result<(Formula, Signature), Error> {
    match parse_formula(text, Signature::OrderIdeal) {
        Ok(f) => {
            let sig = if f.check_signature(Signature::Order).is_ok() {
                Signature::Order
            } else {
                Signature::OrderIdeal
            };
            Ok((f, sig))
        }
        Err(order_err) => match parse_formula(text, Signature::Class) {
            Ok(f) => {
                let sig = if f.check_signature(Signature::Set).is_ok() {
                    Signature::Set
                } else {
                    Signature::Class
                };
                Ok((f, sig))
            }
            Err(_) => Err(order_err.into()),
        },
    }
}

fn parse_cmd(out: &Output, sig: Option<SigArg>, input: &Input) -> Result<Report, Error> {
    let text = input.text()?;
    let (f, sig) = match sig {
        Some(s) => (parse_formula(&text, s.into())?, s.into()),
        None => infer_signature(&text)?,
    };
    let rendered = render(&f);
    let report = json!({
        "sentence": rendered,
        "signature": sig,
        "quantifierDepth": f.quantifier_depth(),
        "freeVariables": f.free_variables(),
    });
    Ok(out.emit(EXIT_OK, format!("{rendered}\n"), report))
}

fn stratify_cmd(out: &Output, input: &Input) -> Result<Report, Error> {
    let f = parse_formula(&input.text()?, Signature::Class)?;
    let report = infer_stratification(&f)?;
    let mut json = report.to_json();
    json["sentence"] = Value::String(render(&f));
    let (code, text) = match report.assignment() {
        Some(a) => {
            let levels: Vec<String> = a.levels.iter().map(|(v, l)| format!("{v}={l}")).collect();
            (
                EXIT_OK,
                format!(
                    "Stratified: min levels {}; {}\n",
                    report.min_levels().unwrap_or(0),
                    levels.join(", ")
                ),
            )
        }
        None => {
            let cycle: Vec<String> = json["witness"]
                .as_array()
                .map(|w| w.iter().filter_map(|c| c.as_str().map(str::to_string)).collect())
                .unwrap_or_default();
            (EXIT_NOT_APPLICABLE, format!("Unstratified: cycle {}\n", cycle.join(", ")))
        }
    };
    Ok(out.emit(code, text, json))
}

fn translate_cmd(out: &Output, mode: Mode, input: &Input) -> Result<Report, Error> {
    let text = input.text()?;
    let (name, source_sig) = match mode {
        Mode::Tau => ("tau", Signature::Set),
        Mode::Chi => ("chi", Signature::Class),
        Mode::Expand => ("expand", Signature::Order),
        Mode::Relativize => ("relativize", Signature::Order),
    };
    let f = parse_formula(&text, source_sig)?;
    let result = match mode {
        Mode::Tau | Mode::Chi => match pipeline_levels(&f)? {
            None => None,
            Some(levels) if mode == Mode::Tau => Some(tau(&f, &levels)?),
            Some(levels) => Some(chi(&f, &levels)?),
        },
        Mode::Expand => Some(subset_expansion(&f)?),
        Mode::Relativize => Some(relativize_to_ideal(&f)?),
    };
    let report = json!({
        "sentence": render(&f),
        "mode": name,
        "result": result.as_ref().map(render),
    });
    Ok(match result {
        Some(g) => out.emit(EXIT_OK, format!("{}\n", render(&g)), report),
        None => out.emit(EXIT_NOT_APPLICABLE, "NotTwoStratified\n".into(), report),
    })
}

fn decide_cmd(out: &Output, theory: Option<Theory>, pipeline: Option<Pipeline>, input: &Input) -> Result<Report, Error> {
    let text = input.text()?;
    let opts = DecideOptions::default();
    let (f, theory, d) = match (pipeline, theory) {
        (Some(Pipeline::Set), None | Some(Theory::Mer)) => {
            let f = parse_formula(&text, Signature::Set)?;
            let d = decide_set_sentence_with(&f, &opts)?;
            (f, Theory::Mer, d)
        }
        (Some(Pipeline::Class), None | Some(Theory::IabaIdeal)) => {
            let f = parse_formula(&text, Signature::Class)?;
            let d = decide_class_sentence_with(&f, &opts)?;
            (f, Theory::IabaIdeal, d)
        }
        (Some(p), Some(th)) => {
            return Err(Error::Usage(format!("pipeline {p:?} does not run in theory {th}")));
        }
        (None, Some(th)) => {
            let f = parse_formula(&text, th.signature())?;
            let d = decide_with(&f, th, &opts)?;
            (f, th, d)
        }
        (None, None) => return Err(Error::Usage("decide needs --theory or --pipeline".into())),
    };
    let report = json!({
        "sentence": render(&f),
        "theory": theory,
        "verdict": d.verdict,
        "stats": out.decision(&d),
    });
    let mut text = format!("{}\n", d.verdict);
    if out.timing {
        text = format!("{} ({} ms)\n", d.verdict, d.stats.millis);
    }
    Ok(out.emit(verdict_code(d.verdict), text, report))
}

fn eval_cmd(out: &Output, kind: StructureKind, budget: u32, bindings: &[String], input: &Input) -> Result<Report, Error> {
    let f = parse_formula(&input.text()?, Signature::OrderIdeal)?;
    let mut env = BTreeMap::new();
    for b in bindings {
        let (var, lit) = b
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("binding `{b}` is not of the form VAR=LITERAL")))?;
        env.insert(var.trim().to_string(), parse_element(lit.trim(), kind)?);
    }
    let s = crate::models::StructureHandle::new(kind);
    let value = bounded_eval_with(&s, &f, budget, &env)?;
    let report = json!({
        "sentence": render(&f),
        "structure": kind,
        "budget": budget,
        "bindings": env.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
        "value": value,
    });
    let code = if value { EXIT_OK } else { EXIT_FALSE };
    Ok(out.emit(code, format!("{value}\n"), report))
}

fn model_check_cmd(
    out: &Output,
    model: ModelArg,
    samples: usize,
    seed: u64,
    axioms: Option<&PathBuf>,
) -> Result<Report, Error> {
    let (m, name, builtin) = match model {
        ModelArg::Bas => (build_bas_model(), "bas", BAS_AXIOMS),
        ModelArg::Bacplus => (build_bac_plus_model(), "bacplus", BAC_PLUS_AXIOMS),
    };
    let corpus = match axioms {
        Some(p) => load_corpus(p)?,
        None => parse_corpus(builtin)?,
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut failed = false;
    for e in &corpus.entries {
        let r = axiom_check_sample(&m, &e.formula, samples, seed)?;
        failed |= r.failures > 0;
        text.push_str(&format!("{}: {} failures in {} samples\n", e.name, r.failures, r.samples));
        for c in &r.counterexamples {
            text.push_str(&format!("  counterexample: {c}\n"));
        }
        rows.push(json!({
            "name": e.name,
            "sentence": render(&e.formula),
            "report": r,
        }));
    }
    let report = json!({ "model": name, "samples": samples, "seed": seed, "axioms": rows });
    Ok(out.emit(if failed { EXIT_FALSE } else { EXIT_OK }, text, report))
}

fn decide_entry(f: &Formula, corpus: &Corpus, theory: Option<Theory>) -> Result<(Theory, Decision), Error> {
    let opts = DecideOptions::default();
    Ok(match corpus.signature {
        Signature::Set => (Theory::Mer, decide_set_sentence_with(f, &opts)?),
        Signature::Class => (Theory::IabaIdeal, decide_class_sentence_with(f, &opts)?),
        Signature::Order => {
            let th = theory.ok_or_else(|| Error::Usage("ORDER corpora need --theory".into()))?;
            (th, decide_with(f, th, &opts)?)
        }
        Signature::OrderIdeal => {
            let th = theory.unwrap_or(Theory::IabaIdeal);
            (th, decide_with(f, th, &opts)?)
        }
    })
}

fn corpus_run_cmd(out: &Output, file: &Path, theory: Option<Theory>) -> Result<Report, Error> {
    let corpus = load_corpus(file)?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut code = EXIT_OK;
    for e in &corpus.entries {
        let (row_code, verdict, row) = match decide_entry(&e.formula, &corpus, theory) {
            Ok((th, d)) => (
                verdict_code(d.verdict),
                d.verdict.to_string(),
                json!({
                    "name": e.name,
                    "line": e.line,
                    "sentence": render(&e.formula),
                    "theory": th,
                    "verdict": d.verdict,
                    "stats": out.decision(&d),
                }),
            ),
            Err(Error::Usage(msg)) => return Err(Error::Usage(msg)),
            Err(err) => (
                EXIT_ERROR,
                format!("error: {err}"),
                json!({
                    "name": e.name,
                    "line": e.line,
                    "sentence": render(&e.formula),
                    "error": err.to_string(),
                }),
            ),
        };
        code = code.max(row_code);
        text.push_str(&format!("{}: {verdict}\n", e.name));
        rows.push(row);
    }
    let report = json!({
        "file": file.display().to_string(),
        "signature": corpus.signature,
        "results": rows,
    });
    Ok(out.emit(code, text, report))
}
