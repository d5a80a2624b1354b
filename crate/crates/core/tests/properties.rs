use std::collections::BTreeSet;
use std::path::Path;

use proofgram::analysis::{compare_languages, is_tautology, Relation};
use proofgram::formula::{Formula, Quant};
use proofgram::grammar::{extract_grammar, language_with, Enumeration, Language, Mode, DEFAULT_BUDGET};
use proofgram::instance::{corpus_files, Instance};
use proofgram::kernel::{check_proof, Signature};
use proofgram::lambda::{type_of, STerm, TypeCtx};
use proofgram::reduce::{applicable_reductions, apply_reduction};
use proofgram::sexp::parse_one;
use proofgram::term::FoTerm;
use proofgram::types::SimpleType;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<Instance> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    corpus_files(&dir).unwrap().iter().map(|f| Instance::load(f).unwrap()).collect()
}

fn c() -> FoTerm {
    FoTerm::constant("c")
}

fn term(vars: usize) -> BoxedStrategy<FoTerm> {
    let ground = prop_oneof![Just(c()), Just(FoTerm::app("f", vec![c()]))];
    if vars == 0 {
        ground.boxed()
    } else {
        prop_oneof![ground, (0..vars).prop_map(|i| FoTerm::bound(&format!("v{i}")))].boxed()
    }
}

fn matrix(vars: usize) -> impl Strategy<Value = Formula> {
    let p = (any::<bool>(), term(vars)).prop_map(|(neg, t)| {
        if neg {
            Formula::neg_atom("P", vec![t])
        } else {
            Formula::atom("P", vec![t])
        }
    });
    let q = (term(vars), term(vars)).prop_map(|(a, b)| Formula::atom("Q", vec![a, b]));
    prop_oneof![p, q].prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::and(a, b)),
        ]
    })
}

/// A prenex formula whose bound variables are `v0 … v(n-1)`.
fn formula() -> impl Strategy<Value = Formula> {
    (0..=3usize).prop_flat_map(|n| (prop::collection::vec(any::<bool>(), n), matrix(n))).prop_map(|(quants, m)| {
        quants.iter().enumerate().rev().fold(m, |acc, (i, all)| {
            let v = format!("v{i}");
            if *all {
                Formula::all(&v, acc)
            } else {
                Formula::ex(&v, acc)
            }
        })
    })
}

fn signature() -> Signature {
    Signature::from_sexp(&parse_one("(signature (fn c 0) (fn f 1) (pred P 1) (pred Q 2))").unwrap()).unwrap()
}

/// Truth value of a quantifier-free formula, atoms looked up by printed form.
fn truth(f: &Formula, val: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Formula::Atom(..) => val(&f.to_string()),
        Formula::NegAtom(..) => !val(&f.dual().to_string()),
        Formula::Or(a, b) => truth(a, val) || truth(b, val),
        Formula::And(a, b) => truth(a, val) && truth(b, val),
        Formula::Quant(..) => unreachable!("quantifier-free input"),
    }
}

fn atoms(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom(..) => {
            out.insert(f.to_string());
        }
        Formula::NegAtom(..) => {
            out.insert(f.dual().to_string());
        }
        Formula::Or(a, b) | Formula::And(a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        Formula::Quant(..) => {}
    }
}

/// Closed, well-typed λ-terms of sequence type, built from a seed.
struct TermGen {
    rng: ChaCha8Rng,
    fresh: usize,
}

impl TermGen {
    fn o(&mut self, scope: &[String], depth: u32) -> STerm {
        let pick = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..6) };
        match pick {
            0 if !scope.is_empty() => STerm::var(&scope[self.rng.gen_range(0..scope.len())]),
            0 | 1 => {
                let leaf = [c(), FoTerm::free("al"), FoTerm::app("f", vec![FoTerm::free("al")])];
                STerm::fo(leaf[self.rng.gen_range(0..leaf.len())].clone())
            }
            2 => STerm::proj(0, STerm::pair(self.o(scope, depth - 1), self.seq(1, scope, depth - 1))),
            3 => {
                let (x, inner) = self.bind(scope);
                let body = self.o(&inner, depth - 1);
                STerm::app(STerm::lam(&x, SimpleType::O, body), self.o(scope, depth - 1))
            }
            _ => STerm::subst(self.o(scope, depth - 1), "al", self.o(scope, depth - 1)),
        }
    }

    fn seq(&mut self, k: usize, scope: &[String], depth: u32) -> STerm {
        let pick = if depth == 0 { 0 } else { self.rng.gen_range(0..4) };
        match pick {
            1 => {
                let (x, inner) = self.bind(scope);
                let body = self.seq(k, &inner, depth - 1);
                STerm::app(STerm::lam(&x, SimpleType::O, body), self.o(scope, depth - 1))
            }
            2 => STerm::subst(self.seq(k, scope, depth - 1), "al", self.o(scope, depth - 1)),
            3 if k > 0 => STerm::proj(1, STerm::pair(self.o(scope, depth - 1), self.seq(k, scope, depth - 1))),
            _ => STerm::tuple((0..k).map(|_| self.o(scope, depth.saturating_sub(1))).collect::<Vec<_>>()),
        }
    }

    fn bind(&mut self, scope: &[String]) -> (String, Vec<String>) {
        self.fresh += 1;
        let x = format!("x{}", self.fresh);
        let mut inner = scope.to_vec();
        inner.push(x.clone());
        (x, inner)
    }
}

/// Direct denotation of a closed term, independent of the rewriting code.
#[derive(Clone)]
enum Val {
    Fo(FoTerm),
    Unit,
    Pair(Box<Val>, Box<Val>),
    Fun(String, STerm, Vec<(String, Val)>),
}

fn subst_val(v: &Val, al: &str, by: &FoTerm) -> Val {
    match v {
        Val::Fo(t) => Val::Fo(t.subst_free(al, by)),
        Val::Unit => Val::Unit,
        Val::Pair(a, b) => Val::Pair(Box::new(subst_val(a, al, by)), Box::new(subst_val(b, al, by))),
        Val::Fun(..) => panic!("substitution into a function value"),
    }
}

fn denote(t: &STerm, env: &[(String, Val)]) -> Val {
    match t {
        STerm::Fo(x) => Val::Fo(x.clone()),
        STerm::Unit => Val::Unit,
        STerm::Var(x) => env.iter().rev().find(|(y, _)| **y == **x).expect("bound").1.clone(),
        STerm::Pair(a, b) => Val::Pair(Box::new(denote(a, env)), Box::new(denote(b, env))),
        STerm::Lam(x, _, b) => Val::Fun(x.to_string(), (**b).clone(), env.to_vec()),
        STerm::App(f, a) => match denote(f, env) {
            Val::Fun(x, body, mut closure) => {
                closure.push((x, denote(a, env)));
                denote(&body, &closure)
            }
            _ => panic!("application of a non-function"),
        },
        STerm::Proj(i, x) => match denote(x, env) {
            Val::Pair(a, b) => {
                if *i == 0 {
                    *a
                } else {
                    *b
                }
            }
            _ => panic!("projection of a non-pair"),
        },
        STerm::Subst(s, al, u) => match denote(u, env) {
            Val::Fo(by) => subst_val(&denote(s, env), al, &by),
            _ => panic!("substituting a non-term"),
        },
        STerm::Nt(_) => panic!("non-terminal in a closed test term"),
    }
}

fn flatten(v: &Val) -> Vec<FoTerm> {
    match v {
        Val::Unit => vec![],
        Val::Pair(a, b) => {
            let Val::Fo(t) = &**a else { panic!("sequence head is not a term") };
            let mut out = vec![t.clone()];
            out.extend(flatten(b));
            out
        }
        _ => panic!("not a sequence"),
    }
}

fn small_language() -> impl Strategy<Value = Language> {
    let tuple =
        (0..2usize, prop::sample::select(vec!["c", "d", "e"])).prop_map(|(i, t)| (i, vec![FoTerm::constant(t)]));
    prop::collection::btree_set(tuple, 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dual_is_an_involution(f in formula()) {
        prop_assert_eq!(f.dual().dual(), f);
    }

    #[test]
    fn dual_flips_every_quantifier(f in formula()) {
        let d = f.dual();
        let (fp, _) = f.prefix();
        let (dp, _) = d.prefix();
        prop_assert_eq!(fp.len(), dp.len());
        for ((q1, v1), (q2, v2)) in fp.iter().zip(&dp) {
            prop_assert_eq!(v1, v2);
            prop_assert_eq!(*q2, if *q1 == Quant::All { Quant::Ex } else { Quant::All });
        }
    }

    #[test]
    fn formulas_survive_printing_and_parsing(f in formula()) {
        let back = signature().formula(&f.to_sexp()).unwrap();
        prop_assert!(back.alpha_eq(&f), "{} became {}", f, back);
    }

    #[test]
    fn tautology_agrees_with_brute_force(fs in prop::collection::vec(matrix(0), 1..4)) {
        let mut names = BTreeSet::new();
        fs.iter().for_each(|f| atoms(f, &mut names));
        let names: Vec<String> = names.into_iter().collect();
        let valid = (0u32..1 << names.len()).all(|bits| {
            let val = |a: &str| bits >> names.iter().position(|n| n == a).unwrap() & 1 == 1;
            fs.iter().any(|f| truth(f, &val))
        });
        let r = is_tautology(&fs).unwrap();
        prop_assert_eq!(r.valid, valid);
        if let Some(m) = r.countermodel {
            let val = |a: &str| m[a];
            prop_assert!(fs.iter().all(|f| !truth(f, &val)));
        }
    }

    #[test]
    fn beta_normal_forms_do_not_depend_on_order(seed in any::<u64>(), k in 0..3usize) {
        let mut g = TermGen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0 };
        let t = g.seq(k, &[], 3);
        prop_assert_eq!(t.beta_reduce(), t.beta_reduce_innermost());
    }

    #[test]
    fn normalization_preserves_types_and_values(seed in any::<u64>(), k in 0..3usize) {
        let mut g = TermGen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0 };
        let t = g.seq(k, &[], 3);
        let ctx = TypeCtx::new();
        prop_assert_eq!(type_of(&t, &ctx).unwrap(), SimpleType::seq(k));
        let n = t.normalize();
        prop_assert_eq!(type_of(&n, &ctx).unwrap(), SimpleType::seq(k));
        prop_assert_eq!(n.evaluate_substitutions().unwrap(), flatten(&denote(&t, &[])));
    }

    #[test]
    fn comparison_is_consistent_with_set_inclusion(a in small_language(), b in small_language()) {
        let r = compare_languages(&a, &b);
        let expected = match (a.is_subset(&b), b.is_subset(&a)) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::ProperSubset,
            (false, true) => Relation::ProperSuperset,
            (false, false) => Relation::Incomparable,
        };
        prop_assert_eq!(r.relation, expected);
        for w in &r.only_left {
            prop_assert!(a.contains(w) && !b.contains(w));
        }
        for w in &r.only_right {
            prop_assert!(b.contains(w) && !a.contains(w));
        }
        let flipped = compare_languages(&b, &a).relation;
        let mirror = match expected {
            Relation::ProperSubset => Relation::ProperSuperset,
            Relation::ProperSuperset => Relation::ProperSubset,
            other => other,
        };
        prop_assert_eq!(flipped, mirror);
    }

    #[test]
    fn inclusion_is_a_partial_order(a in small_language(), b in small_language(), c in small_language()) {
        let below = |x: &Language, y: &Language| {
            matches!(compare_languages(x, y).relation, Relation::Equal | Relation::ProperSubset)
        };
        if below(&a, &b) && below(&b, &a) {
            prop_assert_eq!(compare_languages(&a, &b).relation, Relation::Equal);
        }
        if below(&a, &b) && below(&b, &c) {
            prop_assert!(below(&a, &c));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_reduction_sequences_stay_valid(which in 0..13usize, seed in any::<u64>()) {
        let corpus = corpus();
        let inst = &corpus[which % corpus.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = inst.proof.clone();
        for _ in 0..8 {
            let rs = applicable_reductions(&p);
            if rs.is_empty() {
                break;
            }
            let r = &rs[rng.gen_range(0..rs.len())];
            p = apply_reduction(&p, r).unwrap();
            let v = check_proof(&p, None);
            prop_assert!(v.is_empty(), "{} after {}: {:?}", inst.name, r, v);
            prop_assert!(p.conclusion.alpha_eq(&inst.proof.conclusion));
        }
    }

    #[test]
    fn enumeration_order_does_not_change_languages(which in 0..13usize, seed in any::<u64>(), cf in any::<bool>()) {
        let corpus = corpus();
        let inst = &corpus[which % corpus.len()];
        let mode = if cf { Mode::ContextFree } else { Mode::ContextSensitive };
        let g = extract_grammar(&inst.proof, mode).unwrap();
        let serial = language_with(&g, Enumeration::Serial, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(language_with(&g, Enumeration::Randomized(seed), DEFAULT_BUDGET).unwrap(), serial);
    }
}

/// Antisymmetry and transitivity on triples of corpus languages.
#[test]
fn corpus_languages_are_partially_ordered() {
    let mut langs: Vec<Language> = Vec::new();
    for inst in corpus() {
        let p = &inst.proof;
        langs.push(proofgram::grammar::language_of(p, Mode::ContextSensitive).unwrap());
        for r in applicable_reductions(p) {
            let q = apply_reduction(p, &r).unwrap();
            langs.push(proofgram::grammar::language_of(&q, Mode::ContextSensitive).unwrap());
        }
    }
    let below = |x: &Language, y: &Language| {
        matches!(compare_languages(x, y).relation, Relation::Equal | Relation::ProperSubset)
    };
    for a in &langs {
        for b in &langs {
            if below(a, b) && below(b, a) {
                assert_eq!(a, b);
            }
            for c in &langs {
                if below(a, b) && below(b, c) {
                    assert!(below(a, c));
                }
            }
        }
    }
}
