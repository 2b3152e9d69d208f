use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn mereo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mereo"))
        .args(args)
        .current_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decide_unbounded_axiom_in_mer() {
    let o = mereo(&["decide", "--theory", "mer", "forall x. exists y. (x sub y & !(x = y))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Valid\n");
}

#[test]
fn decide_json_report() {
    let o = mereo(&["--json", "decide", "--theory", "mer", "exists x. forall y. y sub x"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["theory"], "MER");
    assert_eq!(v["verdict"], "Invalid");
    assert_eq!(v["sentence"], "exists x. forall y. y sub x");
    assert!(v["stats"]["disjuncts"].is_u64());
    assert!(v["stats"]["maxGranularity"].is_u64());
}

#[test]
fn set_and_class_pipelines() {
    let o = mereo(&["decide", "--pipeline", "set", "forall x. exists y. !(y in x)"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "Valid\n"));
    let o = mereo(&["decide", "--pipeline", "class", mereo::corpus::INDEPENDENCE_SENTENCE]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "Invalid\n"));
    let o = mereo(&["decide", "--pipeline", "set", mereo::corpus::CHOICE_SENTENCE]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(2), "NotTwoStratified\n"));
}

#[test]
fn stratify_reports_cycle() {
    let o = mereo(&["--json", "stratify", "exists x. x in x"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "Unstratified");
    assert_eq!(v["witness"], serde_json::json!(["x in x"]));
    let o = mereo(&["stratify", "forall z. (z in x -> z in y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Stratified: min levels 2; x=1, y=1, z=0\n");
}

#[test]
fn translate_modes() {
    let o = mereo(&["translate", "--mode", "expand", "x sub y"]);
    assert_eq!(stdout(&o), "forall w0. (w0 in x -> w0 in y)\n");
    let o = mereo(&["translate", "--mode", "relativize", "forall x. exists y. x sub y"]);
    assert_eq!(stdout(&o), "forall x. (I(x) -> exists y. (I(y) & x sub y))\n");
    let o = mereo(&["translate", "--mode", "tau", "forall x. exists y. x in y"]);
    assert_eq!(o.status.code(), Some(0));
    let o = mereo(&["translate", "--mode", "tau", "exists x. x in x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_in_structures() {
    let main_axiom = "forall x. (!I(x) -> exists y. (y sub x & !I(y) & !I(x /\\ ~y)))";
    let o = mereo(&["eval", "--structure", "evperiodic", "--budget", "3", main_axiom]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "true\n"));
    let o = mereo(&["eval", "--structure", "fincofin", "--budget", "3", main_axiom]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "false\n"));
    let o = mereo(&["eval", "--structure", "evperiodic", "--let", "x=mod(4,0)+{7}-{0}", "--let", "y=mod(2,1)", "C[1](x /\\ y) & !C[2](x /\\ y)"]);
    assert_eq!(stdout(&o), "true\n");
    let o = mereo(&["eval", "--structure", "finset", "exists x. I(x)"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn corpus_run_iaba_ideal() {
    let o = mereo(&["corpus-run", "axioms/iaba_ideal.fml", "--theory", "iaba-ideal"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.ends_with(": Valid")), "{text}");
    assert!(text.contains("Main: Valid"));
}

#[test]
fn corpus_run_mixed_verdicts() {
    let o = mereo(&["--json", "corpus-run", "axioms/examples.fml"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["name"], "AC");
    assert_eq!(v["results"][0]["verdict"], "NotTwoStratified");
    assert_eq!(v["results"][1]["verdict"], "Invalid");
}

#[test]
fn model_check_small_run() {
    let o = mereo(&["--json", "model", "check", "--model", "bas", "--samples", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["axioms"].as_array().unwrap().len(), 7);
    assert!(v["axioms"].as_array().unwrap().iter().all(|a| a["report"]["failures"] == 0));
}

#[test]
fn json_output_is_byte_identical() {
    let args = ["--json", "corpus-run", "axioms/bas.fml"];
    assert_eq!(mereo(&args).stdout, mereo(&args).stdout);
}

#[test]
fn errors_go_to_stderr_with_exit_3() {
    let o = mereo(&["decide", "--theory", "mer", "forall x. (x sub"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
    let o = mereo(&["corpus-run", "axioms/missing.fml"]);
    assert_eq!(o.status.code(), Some(3));
    let o = mereo(&["eval", "--structure", "nowhere", "x = x"]);
    assert_eq!(o.status.code(), Some(3));
}
