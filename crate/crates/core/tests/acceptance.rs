//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use proofgram::analysis::{
    canonicity_checks, compare_languages, expansion, is_tautology, show_tuple, verify_all_redexes, LemmaCase, Relation,
    Verdict,
};
use proofgram::grammar::{
    check_acyclic, check_well_typed, extract_grammar, language_of, language_with, normal_forms_all_positions,
    Enumeration, Language, Mode,
};
use proofgram::instance::{corpus_files, Instance};
use proofgram::kernel::{check_proof, IdGen, Proof, Rule, ViolationKind};
use proofgram::reduce::{apply_reduction, eliminate_cuts, herbrand_set, Redex, RedexKind, Side, Strategy};
use proofgram::term::FoTerm;
use serde_json::Value;

/// Per-proof time bound for checking and for grammar validation.
const PER_PROOF: Duration = Duration::from_secs(1);
/// Rewrite steps allowed per start term.
const REWRITE_BUDGET: usize = 1_000_000;
/// Reduction steps allowed per elimination.
const STEP_LIMIT: usize = 100_000;
/// Random first arguments per proof.
const CANONICITY_SAMPLES: usize = 20;
/// The exhaustive all-positions closure of this instance exceeds memory;
/// its language is cross-checked by several enumeration orders instead.
const ALL_POSITIONS_INFEASIBLE: &str = "pi2-permutation";

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus() -> Vec<Instance> {
    corpus_files(&corpus_dir()).unwrap().iter().map(|f| Instance::load(f).unwrap()).collect()
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mutate_eigenvariables(p: &Proof, out: &mut Vec<(String, Proof)>) {
    for node in p.subproofs() {
        if let Rule::All(alpha) = &node.rule {
            // Duplicate the instance A(α) so α stays free in the conclusion.
            let prem = &node.premises[0];
            let mut ids = IdGen::after(p);
            let extra = prem.conclusion.0[0].clone();
            let weak = Proof::weak(&mut ids, extra, prem.clone()).unwrap();
            let all = Proof::all(&mut ids, alpha.clone(), Some(node.conclusion.0[0].clone()), Arc::new(weak)).unwrap();
            out.push((format!("eigenvariable {alpha} at node {}", node.id), all));
        }
    }
}

fn mutate_witnesses(p: &Proof, out: &mut Vec<(String, Proof)>) {
    for node in p.subproofs() {
        if let Rule::Ex(t) = &node.rule {
            let wrong = FoTerm::app("mutant", vec![t.clone()]);
            let mut m = node.clone();
            m.rule = Rule::Ex(wrong);
            out.push((format!("witness {t} at node {}", node.id), m));
        }
    }
}

const SURFACE_MUTANTS: [(&str, &str); 3] = [
    (
        "eigenvariable free in the context",
        "(problem m1 (signature (pred P 1))
           (proof (all-intro a (all x (atom P x)) (ax (atom P a)))))",
    ),
    (
        "witness at the wrong argument position",
        "(problem m2 (signature (fn c 0) (fn d 0) (pred R 2))
           (proof (ex-intro d (ex x (atom R x c)) (ax (atom R c d)))))",
    ),
    (
        "cut on a Sigma3 formula",
        "(problem m3 (signature (fn c 0) (pred Q 1) (pred S 3))
           (proof (cut (ex x (all y (ex z (atom S x y z))))
                    (weak (ex x (all y (ex z (atom S x y z)))) (ax (atom Q c)))
                    (weak (all x (ex y (all z (neg (atom S x y z))))) (ax (atom Q c))))))",
    ),
];

fn criterion_1(corpus: &[Instance]) -> Outcome {
    let mut slowest = Duration::ZERO;
    for inst in corpus {
        let t = Instant::now();
        let v = check_proof(&inst.proof, Some(&inst.signature));
        slowest = slowest.max(t.elapsed());
        ensure(v.is_empty(), || format!("{} rejected: {:?}", inst.name, v))?;
    }
    let mut rejected = 0;
    for inst in corpus {
        let mut eigen = Vec::new();
        mutate_eigenvariables(&inst.proof, &mut eigen);
        for (what, m) in &eigen {
            let t = Instant::now();
            let v = check_proof(m, None);
            slowest = slowest.max(t.elapsed());
            ensure(v.iter().any(|x| x.kind == ViolationKind::EigenvariableCondition), || {
                format!("{}: broken {what} accepted", inst.name)
            })?;
            rejected += 1;
        }
        let mut wit = Vec::new();
        mutate_witnesses(&inst.proof, &mut wit);
        for (what, m) in &wit {
            let v = check_proof(m, None);
            ensure(v.iter().any(|x| x.kind == ViolationKind::RuleMismatch), || {
                format!("{}: wrong {what} accepted", inst.name)
            })?;
            rejected += 1;
        }
    }
    for (what, src) in SURFACE_MUTANTS {
        let t = Instant::now();
        let verdict = Instance::parse(src).and_then(Instance::validated);
        slowest = slowest.max(t.elapsed());
        ensure(verdict.is_err(), || format!("mutant with {what} accepted"))?;
        rejected += 1;
    }
    ensure(slowest < PER_PROOF, || format!("slowest check took {slowest:?}"))?;
    Ok(format!("{} proofs valid, {rejected} mutants rejected, slowest {slowest:?}", corpus.len()))
}

fn criterion_2(corpus: &[Instance]) -> Outcome {
    let mut productions = 0;
    let mut slowest = Duration::ZERO;
    for inst in corpus {
        for mode in [Mode::ContextSensitive, Mode::ContextFree] {
            let t = Instant::now();
            let g = extract_grammar(&inst.proof, mode).map_err(|e| format!("{}: {e}", inst.name))?;
            let typing = check_well_typed(&g);
            ensure(typing.is_empty(), || format!("{} ({mode}): {typing:?}", inst.name))?;
            check_acyclic(&g).map_err(|e| format!("{} ({mode}): cycle {e:?}", inst.name))?;
            slowest = slowest.max(t.elapsed());
            productions += g.production_count();
        }
    }
    ensure(slowest < PER_PROOF, || format!("slowest grammar took {slowest:?}"))?;
    Ok(format!("{productions} productions well-typed and acyclic, slowest {slowest:?}"))
}

fn all_positions(p: &Proof, mode: Mode) -> Language {
    let g = extract_grammar(p, mode).unwrap();
    let mut out = Language::new();
    for i in 0..g.width {
        for nf in normal_forms_all_positions(&g.start(i), &g, REWRITE_BUDGET).unwrap() {
            out.insert((i, nf.evaluate_substitutions().unwrap()));
        }
    }
    out
}

fn criterion_3(corpus: &[Instance]) -> Outcome {
    let mut oracle = 0;
    for inst in corpus {
        for mode in [Mode::ContextSensitive, Mode::ContextFree] {
            let g = extract_grammar(&inst.proof, mode).unwrap();
            let serial =
                language_with(&g, Enumeration::Serial, REWRITE_BUDGET).map_err(|e| format!("{}: {e}", inst.name))?;
            let parallel = language_with(&g, Enumeration::Parallel, REWRITE_BUDGET).map_err(|e| e.to_string())?;
            ensure(serial == parallel, || format!("{} ({mode}): serial and parallel differ", inst.name))?;
            let shuffled = language_with(&g, Enumeration::Randomized(7), REWRITE_BUDGET).map_err(|e| e.to_string())?;
            ensure(serial == shuffled, || format!("{} ({mode}): randomized order differs", inst.name))?;
            if mode == Mode::ContextSensitive && inst.name != ALL_POSITIONS_INFEASIBLE {
                ensure(serial == all_positions(&inst.proof, mode), || {
                    format!("{}: all-positions closure differs", inst.name)
                })?;
                oracle += 1;
            }
        }
    }
    Ok(format!(
        "all languages finite within {REWRITE_BUDGET} steps, serial = parallel = randomized, {oracle} confirmed by all-positions rewriting"
    ))
}

fn criterion_4(corpus: &[Instance]) -> Outcome {
    let mut atoms = 0;
    for inst in corpus {
        let e = expansion(&inst.proof).map_err(|e| format!("{}: {e}", inst.name))?;
        let t = is_tautology(&e.disjuncts()).map_err(|e| e.to_string())?;
        ensure(t.valid, || format!("{}: countermodel {:?}", inst.name, t.countermodel))?;
        atoms = atoms.max(t.atoms);
    }
    Ok(format!("{} expansions valid, up to {atoms} atoms", corpus.len()))
}

fn criterion_5(corpus: &[Instance]) -> Outcome {
    let mut strict = 0;
    for inst in corpus {
        let lang = language_of(&inst.proof, Mode::ContextSensitive).unwrap();
        for s in [Strategy::WeakFirst, Strategy::Restricted] {
            let run =
                eliminate_cuts(&inst.proof, s, STEP_LIMIT).map_err(|i| format!("{} ({s}): {}", inst.name, i.error))?;
            ensure(run.proof.is_cut_free() && check_proof(&run.proof, None).is_empty(), || {
                format!("{} ({s}): result invalid", inst.name)
            })?;
            let h = herbrand_set(&run.proof).map_err(|e| e.to_string())?;
            let missing: Vec<_> = h.difference(&lang).collect();
            ensure(missing.is_empty(), || format!("{} ({s}): missing {missing:?}", inst.name))?;
            strict += usize::from(h.len() < lang.len());
        }
    }
    Ok(format!("Herbrand sets contained for weak-first and restricted, {strict} run(s) strictly"))
}

fn criterion_6(corpus: &[Instance]) -> Outcome {
    let mut total = 0;
    let mut cases = std::collections::BTreeMap::<String, usize>::new();
    for inst in corpus {
        let checks = verify_all_redexes(&inst.name, &inst.proof, Mode::ContextSensitive).map_err(|e| e.to_string())?;
        for c in checks {
            ensure(c.verdict == Verdict::Consistent, || format!("violation: {c}"))?;
            total += 1;
            *cases.entry(format!("{}/{}", c.case, c.expected)).or_default() += 1;
        }
    }
    for needed in [
        LemmaCase::CutPermutation,
        LemmaCase::Contraction,
        LemmaCase::Quantifier,
        LemmaCase::Weakening,
        LemmaCase::QuantifierPermutation,
    ] {
        ensure(cases.keys().any(|k| k.starts_with(&format!("{needed}/"))), || format!("no {needed} redex exercised"))?;
    }
    let summary: Vec<String> = cases.iter().map(|(k, n)| format!("{k}:{n}")).collect();
    Ok(format!("{total} redexes, 0 violations ({})", summary.join(", ")))
}

fn decode(v: &Value) -> Language {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let i = r["index"].as_u64().unwrap() as usize;
            let ts = r["terms"].as_array().unwrap().iter().map(|t| FoTerm::constant(t.as_str().unwrap())).collect();
            (i, ts)
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(corpus_dir().join("golden/pi2_permutation.json")).unwrap())
            .unwrap();
    let inst = Instance::load(&corpus_dir().join(golden["file"].as_str().unwrap())).unwrap();
    let redex: Redex = serde_json::from_value(golden["redex"].clone()).unwrap();
    ensure(redex == Redex { path: vec![], kind: RedexKind::BinaryPerm, side: Side::Left }, || {
        "unexpected golden redex".into()
    })?;
    let before = language_of(&inst.proof, Mode::ContextSensitive).unwrap();
    let after = language_of(&apply_reduction(&inst.proof, &redex).unwrap(), Mode::ContextSensitive).unwrap();
    ensure(before == decode(&golden["before"]), || "L(before) differs from the golden file".into())?;
    ensure(after == decode(&golden["after"]), || "L(after) differs from the golden file".into())?;
    let cmp = compare_languages(&before, &after);
    ensure(cmp.relation == Relation::Incomparable, || format!("relation is {}", cmp.relation))?;
    let only_before: Language = cmp.only_left.iter().cloned().collect();
    let only_after: Language = cmp.only_right.iter().cloned().collect();
    ensure(only_before == decode(&golden["only_before"]), || "witnesses in L(before) differ".into())?;
    ensure(only_after == decode(&golden["only_after"]), || "witnesses in L(after) differ".into())?;
    for w in &only_before {
        ensure(before.contains(w) && !after.contains(w), || "bad witness".into())?;
    }
    for w in &only_after {
        ensure(after.contains(w) && !before.contains(w), || "bad witness".into())?;
    }
    let show = |ws: &[(usize, Vec<FoTerm>)]| ws.iter().map(show_tuple).collect::<Vec<_>>().join(" ");
    Ok(format!("incomparable: {} only before, {} only after", show(&cmp.only_left), show(&cmp.only_right)))
}

fn criterion_8(corpus: &[Instance]) -> Outcome {
    let mut samples = 0;
    for (k, inst) in corpus.iter().enumerate() {
        let checks =
            canonicity_checks(&inst.name, &inst.proof, Mode::ContextSensitive, 1000 + k as u64, CANONICITY_SAMPLES)
                .map_err(|e| format!("{}: {e}", inst.name))?;
        ensure(checks.len() == CANONICITY_SAMPLES, || format!("{}: only {} samples", inst.name, checks.len()))?;
        for c in &checks {
            ensure(c.equal, || {
                format!("{}: σ[{}:{}] differs with first argument {}", inst.name, c.node, c.index, c.first)
            })?;
        }
        samples += checks.len();
    }
    Ok(format!("{samples} random first arguments, all languages equal"))
}

fn criterion_9(corpus: &[Instance]) -> Outcome {
    let mut grown = 0;
    for inst in corpus {
        let cs = language_of(&inst.proof, Mode::ContextSensitive).unwrap();
        let g = extract_grammar(&inst.proof, Mode::ContextFree).unwrap();
        let cf = language_with(&g, Enumeration::Serial, REWRITE_BUDGET).map_err(|e| format!("{}: {e}", inst.name))?;
        ensure(cs.is_subset(&cf), || format!("{}: context-sensitive not contained", inst.name))?;
        grown += usize::from(cs.len() < cf.len());
    }
    Ok(format!("CS ⊆ CF on all proofs, CF finite, strictly larger on {grown}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpus = corpus();
    assert!(corpus.len() >= 12, "corpus has only {} proofs", corpus.len());
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("kernel soundness", Box::new(|| criterion_1(&corpus))),
        ("grammar well-typed and acyclic", Box::new(|| criterion_2(&corpus))),
        ("finiteness", Box::new(|| criterion_3(&corpus))),
        ("expansion is a tautology", Box::new(|| criterion_4(&corpus))),
        ("Herbrand containment", Box::new(|| criterion_5(&corpus))),
        ("lemma consistency", Box::new(|| criterion_6(&corpus))),
        ("incomparability witness", Box::new(criterion_7)),
        ("starting-symbol canonicity", Box::new(|| criterion_8(&corpus))),
        ("context-free mode", Box::new(|| criterion_9(&corpus))),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result =
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        match result {
            Ok(detail) => println!("criterion {} ({title}): PASS [{:.2?}] {detail}", k + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({title}): FAIL [{:.2?}] {why}", k + 1, t.elapsed());
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
