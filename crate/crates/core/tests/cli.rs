use std::path::{Path, PathBuf};

use proofgram::cli::{render_language, run};
use proofgram::formula::{Formula, Sequent};
use proofgram::grammar::Language;
use proofgram::instance::Instance;
use proofgram::term::FoTerm;
use serde_json::Value;

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name).display().to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["proofgram"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn write(dir: &Path, name: &str, src: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p
}

fn records(out: &str) -> Vec<Value> {
    out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const AXIOM: &str = "(problem axiom (signature (fn c 0) (pred P 1)) (proof (ax (atom P c))))";
const BROKEN_EIGEN: &str = "(problem broken (signature (pred P 1))
  (proof (all-intro a (all x (atom P x)) (ax (atom P a)))))";
const SIGMA3_CUT: &str = "(problem sigma3 (signature (fn c 0) (pred Q 1) (pred S 3))
  (proof (cut (ex x (all y (ex z (atom S x y z))))
           (weak (ex x (all y (ex z (atom S x y z)))) (ax (atom Q c)))
           (weak (all x (ex y (all z (neg (atom S x y z))))) (ax (atom Q c))))))";

#[test]
fn check_accepts_e1() {
    let r = cli(&["check", &corpus("01_e1.proof")]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("e1: valid"));
}

#[test]
fn check_reports_an_eigenvariable_violation() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "broken.proof", BROKEN_EIGEN);
    let r = cli(&["check", f.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("eigenvariable"), "{}", r.out);
}

#[test]
fn missing_files_are_input_errors() {
    assert_eq!(cli(&["check", "/nonexistent/x.proof"]).code, 2);
    assert_eq!(cli(&["language", "/nonexistent/x.proof"]).code, 2);
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.proof", "(problem bad (signature");
    assert_eq!(cli(&["check", f.to_str().unwrap()]).code, 2);
}

#[test]
fn unknown_flags_are_input_errors() {
    assert_eq!(cli(&["check", "--mode", "sideways", &corpus("01_e1.proof")]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
}

#[test]
fn grammar_production_counts() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ax.proof", AXIOM);
    let r = cli(&["grammar", f.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out, "σ[0:0] x0 x1 -> x1\nσ[0:1] x0 x1 -> x0\n");
    assert_eq!(cli(&["grammar", &corpus("01_e1.proof")]).out.lines().count(), 4);
    let structured = cli(&["grammar", &corpus("01_e1.proof"), "--format", "structured"]);
    let recs = records(&structured.out);
    assert_eq!(recs.len(), 4);
    assert_eq!(recs[0]["nonterminal"], "σ[0:0]");
}

#[test]
fn grammar_rejects_a_sigma3_cut() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s3.proof", SIGMA3_CUT);
    let r = cli(&["grammar", f.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("error:"));
}

#[test]
fn language_of_e1_and_e2() {
    let r = cli(&["language", &corpus("01_e1.proof"), "--format", "structured"]);
    assert_eq!(r.code, 0);
    let recs = records(&r.out);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["index"], 0);
    assert_eq!(recs[0]["terms"], serde_json::json!(["c"]));
    let e2 = cli(&["language", &corpus("02_e2.proof")]);
    assert!(e2.out.contains("(0, ⟨c⟩)") && e2.out.contains("(0, ⟨f(c)⟩)"), "{}", e2.out);
}

#[test]
fn empty_language_indices_are_explicit() {
    let s = Sequent(vec![
        Formula::ex("x", Formula::atom("P", vec![FoTerm::bound("x")])),
        Formula::atom("P", vec![FoTerm::constant("c")]),
    ]);
    let lang: Language = [(1, vec![])].into_iter().collect();
    assert_eq!(render_language(&s, &lang, false), "0: ∃x P(x)\n  (empty)\n1: P(c)\n  (1, ⟨⟩)\n");
    let recs = records(&render_language(&s, &lang, true));
    assert_eq!(recs[0]["empty"], true);
    assert_eq!(recs[1]["terms"], serde_json::json!([]));
}

#[test]
fn eliminating_a_cut_free_proof_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.proof");
    let r = cli(&["eliminate", &corpus("02_e2.proof"), "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("after 0 step(s)"));
    let before = Instance::load(Path::new(&corpus("02_e2.proof"))).unwrap();
    let after = Instance::load(&out).unwrap();
    assert_eq!(after.proof.size(), before.proof.size());
    assert!(after.proof.conclusion.alpha_eq(&before.proof.conclusion));
}

#[test]
fn eliminated_e3_passes_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e3.proof");
    let r = cli(&["reduce", &corpus("03_e3.proof"), "--strategy", "weak-first", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    let recheck = cli(&["check", out.to_str().unwrap()]);
    assert_eq!(recheck.code, 0, "{}", recheck.out);
    assert!(recheck.out.contains("0 cut(s)"));
}

#[test]
fn restricted_strategy_notes_skipped_permutations() {
    let r =
        cli(&["eliminate", &corpus("10_pi2_permutation.proof"), "--strategy", "restricted", "--format", "structured"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let skipped: Vec<Value> = records(&r.out).into_iter().filter(|v| v.get("skipped").is_some()).collect();
    assert!(skipped
        .iter()
        .any(|v| v["skipped"]["redex"]["kind"] == "binary-perm"
            && v["skipped"]["redex"]["path"] == serde_json::json!([])));
    let unrestricted = cli(&["eliminate", &corpus("10_pi2_permutation.proof"), "--strategy", "unrestricted"]);
    assert!(!unrestricted.out.contains("skipped"));
}

#[test]
fn step_limit_exits_with_status_3() {
    let r = cli(&["eliminate", &corpus("03_e3.proof"), "--limit", "2"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.out.lines().count(), 2, "partial trace: {}", r.out);
    assert!(r.err.contains("step limit"));
}

#[test]
fn verify_corpus_is_consistent() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let r = cli(&["verify", dir.to_str().unwrap(), "--format", "structured"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    let recs = records(&r.out);
    let summary = &recs.last().unwrap()["summary"];
    assert_eq!(summary["proofs"], 13);
    assert_eq!(summary["violations"], 0);
    assert_eq!(summary["errors"], 0);
    let checks: Vec<&Value> = recs.iter().filter_map(|v| v.get("check")).collect();
    assert_eq!(summary["checks"], checks.len());
    for c in checks {
        for field in ["proof", "redex", "expected", "observed", "lost", "gained", "verdict"] {
            assert!(c.get(field).is_some(), "missing {field}");
        }
    }
}

#[test]
fn verify_flags_a_wrong_expectation() {
    let r = cli(&["verify", &corpus("10_pi2_permutation.proof"), "--expect", "equal"]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("VIOLATION"));
}

#[test]
fn verify_on_an_empty_directory_warns() {
    let dir = tempfile::tempdir().unwrap();
    let r = cli(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.err.contains("zero checks"));
}

#[test]
fn output_is_deterministic() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let a = cli(&["verify", dir.to_str().unwrap(), "--seed", "5"]);
    let b = cli(&["verify", dir.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(a.out, b.out);
    let e1 = cli(&["eliminate", &corpus("06_double_contraction.proof")]);
    let e2 = cli(&["eliminate", &corpus("06_double_contraction.proof")]);
    assert_eq!(e1.out, e2.out);
}
