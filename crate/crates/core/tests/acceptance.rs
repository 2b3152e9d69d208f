//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mereo::corpus::{load_corpus, Corpus, CHOICE_SENTENCE, INDEPENDENCE_SENTENCE};
use mereo::decide::{decide, decide_class_sentence, decide_set_sentence, Theory, Verdict};
use mereo::formula::{parse_formula, Formula, Signature};
use mereo::models::{
    axiom_check_sample, bounded_eval, build_bac_plus_model, build_bas_model, build_fincofin_completion,
    subset_agreement, StructureHandle, StructureKind,
};
use mereo::random::{random_corpus, SentenceConfig};
use mereo::stratification::infer_stratification;
use mereo::translate::{chi, pipeline_levels, relativize_to_ideal, subset_expansion};

const SEED: u64 = 42;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus(name: &str) -> Corpus {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../axioms").join(name);
    load_corpus(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn axiom_validity() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut slowest = Duration::ZERO;
    for (file, theory) in [
        ("mer.fml", Theory::Mer),
        ("iaba.fml", Theory::Iaba),
        ("iaba_ideal.fml", Theory::IabaIdeal),
    ] {
        for e in &corpus(file).entries {
            let (v, t) = timed(|| decide(&e.formula, theory));
            let v = v.map_err(|err| format!("{file} {}: {err}", e.name))?;
            ensure(v == Verdict::Valid, || format!("{file} {}: {v}", e.name))?;
            ensure(t < Duration::from_secs(5), || format!("{file} {}: {t:?}", e.name))?;
            slowest = slowest.max(t);
            count += 1;
        }
    }
    let total = start.elapsed();
    ensure(total < Duration::from_secs(120), || format!("suite took {total:?}"))?;
    Ok(format!("{count} axioms Valid, slowest {slowest:?}, total {total:?}"))
}

fn ideal_sentences() -> Vec<Formula> {
    random_corpus(SentenceConfig::order_ideal(), 100, SEED)
}

fn completeness() -> Outcome {
    let sentences = ideal_sentences();
    let mut valid = 0;
    for f in &sentences {
        ensure(
            f.quantifier_depth() <= 3 && f.quantifier_count() <= 3 && f.max_count_constant() <= 2,
            || format!("generator produced {f}"),
        )?;
        let pos = decide(f, Theory::IabaIdeal).map_err(|e| format!("{f}: {e}"))?;
        let neg = decide(&Formula::not(f.clone()), Theory::IabaIdeal).map_err(|e| format!("{f}: {e}"))?;
        ensure((pos == Verdict::Valid) != (neg == Verdict::Valid), || {
            format!("{f}: {pos} and negation {neg}")
        })?;
        valid += usize::from(pos == Verdict::Valid);
    }
    Ok(format!("{}/{} decided ({valid} Valid)", sentences.len(), sentences.len()))
}

fn oracle_agreement() -> Outcome {
    let s = StructureHandle::new(StructureKind::EvPeriodic);
    let sentences = ideal_sentences();
    for f in &sentences {
        let d = decide(f, Theory::IabaIdeal).map_err(|e| format!("{f}: {e}"))?;
        let o = bounded_eval(&s, f, 3).map_err(|e| format!("{f}: {e}"))?;
        ensure((d == Verdict::Valid) == o, || format!("{f}: decide {d}, evaluator {o}"))?;
    }
    Ok(format!("{0}/{0} agree", sentences.len()))
}

fn relativization() -> Outcome {
    let sentences = random_corpus(SentenceConfig::term_free_order(), 100, SEED);
    for f in &sentences {
        let mer = decide(f, Theory::Mer).map_err(|e| format!("{f}: {e}"))?;
        let rel = relativize_to_ideal(f).map_err(|e| format!("{f}: {e}"))?;
        let ideal = decide(&rel, Theory::IabaIdeal).map_err(|e| format!("{f}: {e}"))?;
        ensure(mer == ideal, || format!("{f}: MER {mer}, relativized {ideal}"))?;
    }
    Ok(format!("{0}/{0} agree", sentences.len()))
}

fn independence() -> Outcome {
    let (result, t) = timed(|| -> Outcome {
        let phi = parse_formula(INDEPENDENCE_SENTENCE, Signature::Class).map_err(|e| e.to_string())?;
        let levels = pipeline_levels(&phi)
            .map_err(|e| e.to_string())?
            .ok_or("not 2-stratified")?;
        let image = chi(&phi, &levels).map_err(|e| e.to_string())?;
        let fincofin = bounded_eval(&build_fincofin_completion(), &image, 3).map_err(|e| e.to_string())?;
        let evp = bounded_eval(&StructureHandle::new(StructureKind::EvPeriodic), &image, 3)
            .map_err(|e| e.to_string())?;
        ensure(fincofin && !evp, || format!("FINCOFIN {fincofin}, EVPERIODIC {evp}"))?;
        let pos = decide_class_sentence(&phi).map_err(|e| e.to_string())?;
        let neg = decide_class_sentence(&Formula::not(phi.clone())).map_err(|e| e.to_string())?;
        ensure(pos == Verdict::Invalid && neg == Verdict::Valid, || {
            format!("phi {pos}, not phi {neg}")
        })?;
        Ok("FINCOFIN true, EVPERIODIC false, phi Invalid, not phi Valid".into())
    });
    let msg = result?;
    ensure(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("{msg} in {t:?}"))
}

fn stratification() -> Outcome {
    let ac = parse_formula(CHOICE_SENTENCE, Signature::Set).map_err(|e| e.to_string())?;
    let ac_levels = infer_stratification(&ac).map_err(|e| e.to_string())?.min_levels();
    ensure(ac_levels == Some(3), || format!("choice sentence min-levels {ac_levels:?}"))?;
    let unbounded =
        parse_formula("forall x. exists y. (x sub y & !(x = y))", Signature::Order).map_err(|e| e.to_string())?;
    let expanded = subset_expansion(&unbounded).map_err(|e| e.to_string())?;
    let exp_levels = infer_stratification(&expanded).map_err(|e| e.to_string())?.min_levels();
    ensure(exp_levels == Some(2), || format!("subset expansion min-levels {exp_levels:?}"))?;
    let xx = parse_formula("x in x", Signature::Set).map_err(|e| e.to_string())?;
    let report = infer_stratification(&xx).map_err(|e| e.to_string())?;
    let witness = match &report {
        mereo::stratification::StratificationReport::Unstratified { witness } => witness.clone(),
        other => return Err(format!("`x in x` reported {other:?}")),
    };
    ensure(witness.len() == 1 && witness[0].render() == "x in x", || {
        format!("witness {witness:?}")
    })?;
    Ok("choice 3 levels, subset expansion 2 levels, `x in x` cycle [x in x]".into())
}

fn transfer() -> Outcome {
    let sentences = random_corpus(SentenceConfig::order_relations(), 50, SEED);
    for g in &sentences {
        let mer = decide(g, Theory::Mer).map_err(|e| format!("{g}: {e}"))?;
        let expanded = subset_expansion(g).map_err(|e| format!("{g}: {e}"))?;
        let set = decide_set_sentence(&expanded).map_err(|e| format!("{g}: {e}"))?;
        ensure(mer == set, || format!("{g}: MER {mer}, expansion {set}"))?;
    }
    Ok(format!("{0}/{0} agree", sentences.len()))
}

fn model_constructions() -> Outcome {
    let mut checked = 0;
    for (file, model) in [("bas.fml", build_bas_model()), ("bac_plus.fml", build_bac_plus_model())] {
        for e in &corpus(file).entries {
            let r = axiom_check_sample(&model, &e.formula, 1000, SEED).map_err(|err| format!("{file} {}: {err}", e.name))?;
            ensure(r.failures == 0, || {
                format!("{file} {}: {} failures, e.g. {:?}", e.name, r.failures, r.counterexamples)
            })?;
            checked += 1;
        }
    }
    for (name, model) in [("BAS", build_bas_model()), ("BAC+", build_bac_plus_model())] {
        let mismatches = subset_agreement(&model, 10_000, SEED).map_err(|e| e.to_string())?;
        ensure(mismatches == 0, || format!("{name}: {mismatches} subset mismatches"))?;
    }
    Ok(format!("{checked} axioms x 1000 samples clean, subset agreement on 10^4 pairs per model"))
}

fn known_verdicts() -> Outcome {
    let check = |text: &str, theory: Theory, expected: Verdict| -> Result<(), String> {
        let f = parse_formula(text, Signature::Order).map_err(|e| e.to_string())?;
        let (v, t) = timed(|| decide(&f, theory));
        let v = v.map_err(|e| e.to_string())?;
        ensure(v == expected, || format!("{theory} `{text}`: {v}"))?;
        ensure(t < Duration::from_secs(1), || format!("{theory} `{text}`: {t:?}"))
    };
    let top = "exists x. forall y. y sub x";
    check(top, Theory::Mer, Verdict::Invalid)?;
    check(top, Theory::Iaba, Verdict::Valid)?;
    for k in 1..=5 {
        let vars: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
        let mut parts: Vec<String> = vars.iter().map(|v| format!("Atm({v})")).collect();
        for i in 0..k {
            for j in i + 1..k {
                parts.push(format!("!({} = {})", vars[i], vars[j]));
            }
        }
        let prefix: String = vars.iter().map(|v| format!("exists {v}. ")).collect();
        check(&format!("{prefix}({})", parts.join(" & ")), Theory::Iaba, Verdict::Valid)?;
    }
    Ok("top Invalid in MER, Valid in IABA; at least k atoms Valid for k = 1..5".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("axiom validity", axiom_validity),
        ("completeness", completeness),
        ("oracle agreement", oracle_agreement),
        ("relativization", relativization),
        ("independence", independence),
        ("stratification", stratification),
        ("transfer", transfer),
        ("model constructions", model_constructions),
        ("known verdicts", known_verdicts),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (outcome, t) = timed(check);
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{t:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{t:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
