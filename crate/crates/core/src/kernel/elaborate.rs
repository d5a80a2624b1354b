//! Turning parsed proof terms into kernel proofs, and back.
//!
//! Principal formulas may be given explicitly (`(or-intro F π)`) or left
//! implicit, in which case they are read off position 0 of the premise.
//! Where an explicit formula sits elsewhere in the premise, permutation
//! inferences are inserted to bring it to the front.

use std::sync::Arc;

use super::proof::{IdGen, Proof, Rule};
use super::syntax::{sequent_to_sexp, Problem, Signature};
use crate::error::{Error, Result};
use crate::formula::{permutation_to, Formula, Quant, Sequent};
use crate::sexp::Sexp;
use crate::term::{sym, FoTerm};

fn elab_err(msg: impl Into<String>) -> Error {
    Error::Elaborate(msg.into())
}

/// Moves position `k` to the front with `perm k-1, ..., perm 0`.
pub fn bring_to_front(ids: &mut IdGen, p: Arc<Proof>, k: usize) -> Result<Arc<Proof>> {
    let mut cur = p;
    for j in (0..k).rev() {
        cur = Arc::new(Proof::perm(ids, j, cur)?);
    }
    Ok(cur)
}

/// Inserts permutations so that the conclusion becomes
/// `old[perm[0]], old[perm[1]], ...`.
pub fn permute(ids: &mut IdGen, p: Arc<Proof>, perm: &[usize]) -> Result<Arc<Proof>> {
    // `order[j]` is the original index now sitting at position j.
    let mut order: Vec<usize> = (0..perm.len()).collect();
    let mut cur = p;
    for (k, &want) in perm.iter().enumerate() {
        let j = order
            .iter()
            .position(|&x| x == want)
            .ok_or_else(|| elab_err(format!("position {want} is not part of the sequent")))?;
        for i in (k..j).rev() {
            cur = Arc::new(Proof::perm(ids, i, cur)?);
            order.swap(i, i + 1);
        }
    }
    Ok(cur)
}

/// Inserts permutations so that the conclusion reads `target`, which must be
/// a reordering of the current conclusion.
pub fn reorder(ids: &mut IdGen, p: Arc<Proof>, target: &[Formula]) -> Result<Arc<Proof>> {
    let perm = permutation_to(p.conclusion.formulas(), target)
        .ok_or_else(|| elab_err(format!("cannot reorder {} into {}", p.conclusion, Sequent(target.to_vec()))))?;
    permute(ids, p, &perm)
}

fn find(fs: &[Formula], f: &Formula, skip: Option<usize>) -> Option<usize> {
    (0..fs.len()).find(|&k| Some(k) != skip && fs[k].alpha_eq(f))
}

/// Brings occurrences of `a` and `b` to positions 0 and 1.
fn front_two(ids: &mut IdGen, p: Arc<Proof>, a: &Formula, b: &Formula, what: &str) -> Result<Arc<Proof>> {
    let fs = p.conclusion.formulas();
    if fs.len() >= 2 && fs[0].alpha_eq(a) && fs[1].alpha_eq(b) {
        return Ok(p);
    }
    let missing = || elab_err(format!("{what}: premise {} lacks {a} and {b}", p.conclusion));
    let kb = find(fs, b, None).ok_or_else(missing)?;
    let p = bring_to_front(ids, p.clone(), kb)?;
    let ka = find(p.conclusion.formulas(), a, Some(0)).ok_or_else(missing)?;
    bring_to_front(ids, p, ka)
}

fn front_one(ids: &mut IdGen, p: Arc<Proof>, a: &Formula, what: &str) -> Result<Arc<Proof>> {
    let k = find(p.conclusion.formulas(), a, None)
        .ok_or_else(|| elab_err(format!("{what}: premise {} does not contain {a}", p.conclusion)))?;
    bring_to_front(ids, p, k)
}

fn args(s: &Sexp, n: usize) -> Result<&[Sexp]> {
    let items = s.as_list().unwrap_or(&[]);
    if items.len() != n + 1 {
        return Err(elab_err(format!(
            "{} expects {n} arguments: {s}",
            items.first().map_or("?".into(), |h| h.to_string())
        )));
    }
    Ok(&items[1..])
}

struct Elaborator<'a> {
    sig: &'a Signature,
    ids: IdGen,
}

impl Elaborator<'_> {
    fn sub(&mut self, s: &Sexp) -> Result<Arc<Proof>> {
        Ok(Arc::new(self.proof(s)?))
    }

    fn proof(&mut self, s: &Sexp) -> Result<Proof> {
        let sig = self.sig;
        let head = s.head().ok_or_else(|| elab_err(format!("expected a proof, found {s}")))?;
        let n = s.as_list().unwrap().len() - 1;
        match (head, n) {
            ("ax", 1) => {
                let lit = sig.formula(&args(s, 1)?[0])?;
                Proof::axiom(&mut self.ids, lit).map_err(|e| elab_err(e.to_string()))
            }
            ("or-intro", 1) => {
                let p = self.sub(&args(s, 1)?[0])?;
                Proof::or(&mut self.ids, p).map_err(|e| elab_err(e.to_string()))
            }
            ("or-intro", 2) => {
                let a = args(s, 2)?;
                let f = sig.formula(&a[0])?;
                let Formula::Or(l, r) = &f else {
                    return Err(elab_err(format!("or-intro with non-disjunction {f}")));
                };
                let p = self.sub(&a[1])?;
                let p = front_two(&mut self.ids, p, l, r, "or-intro")?;
                Proof::or(&mut self.ids, p)
            }
            ("and-intro", 2) => {
                let a = args(s, 2)?;
                let (p0, p1) = (self.sub(&a[0])?, self.sub(&a[1])?);
                Proof::and(&mut self.ids, p0, p1).map_err(|e| elab_err(e.to_string()))
            }
            ("and-intro", 3) => {
                let a = args(s, 3)?;
                let f = sig.formula(&a[0])?;
                let Formula::And(l, r) = &f else {
                    return Err(elab_err(format!("and-intro with non-conjunction {f}")));
                };
                let (p0, p1) = (self.sub(&a[1])?, self.sub(&a[2])?);
                let p0 = front_one(&mut self.ids, p0, l, "and-intro")?;
                let p1 = front_one(&mut self.ids, p1, r, "and-intro")?;
                Proof::and(&mut self.ids, p0, p1)
            }
            ("all-intro", 2) => {
                let a = args(s, 2)?;
                let alpha = a[0].as_atom().ok_or_else(|| elab_err("all-intro needs an eigenvariable"))?;
                if sig.is_constant(alpha) || sig.functions.contains_key(alpha) {
                    return Err(elab_err(format!("eigenvariable {alpha} is a declared function symbol")));
                }
                let p = self.sub(&a[1])?;
                let holding: Vec<usize> =
                    (0..p.conclusion.len()).filter(|&k| p.conclusion.0[k].free_vars().contains(alpha)).collect();
                let k = match holding.as_slice() {
                    [] => 0,
                    [k] => *k,
                    _ => {
                        return Err(elab_err(format!(
                            "eigenvariable {alpha} occurs in several formulas of {}",
                            p.conclusion
                        )))
                    }
                };
                let p = bring_to_front(&mut self.ids, p, k)?;
                Proof::all(&mut self.ids, sym(alpha), None, p)
            }
            ("all-intro", 3) => {
                let a = args(s, 3)?;
                let alpha = a[0].as_atom().ok_or_else(|| elab_err("all-intro needs an eigenvariable"))?;
                let f = sig.formula(&a[1])?;
                if !matches!(f, Formula::Quant(Quant::All, ..)) {
                    return Err(elab_err(format!("all-intro with non-universal {f}")));
                }
                let inst = f.instantiate(&FoTerm::Free(sym(alpha))).unwrap();
                let p = self.sub(&a[2])?;
                let p = front_one(&mut self.ids, p, &inst, "all-intro")?;
                Proof::all(&mut self.ids, sym(alpha), Some(f), p)
            }
            ("ex-intro", 2) => {
                let a = args(s, 2)?;
                let t = sig.term(&a[0], &[])?;
                let p = self.sub(&a[1])?;
                Proof::ex(&mut self.ids, t, None, p).map_err(|e| elab_err(e.to_string()))
            }
            ("ex-intro", 3) => {
                let a = args(s, 3)?;
                let t = sig.term(&a[0], &[])?;
                let f = sig.formula(&a[1])?;
                if !matches!(f, Formula::Quant(Quant::Ex, ..)) {
                    return Err(elab_err(format!("ex-intro with non-existential {f}")));
                }
                let inst = f.instantiate(&t).unwrap();
                let p = self.sub(&a[2])?;
                let p = front_one(&mut self.ids, p, &inst, "ex-intro")?;
                Proof::ex(&mut self.ids, t, Some(f), p)
            }
            ("cut", 2) => {
                let a = args(s, 2)?;
                let (p0, p1) = (self.sub(&a[0])?, self.sub(&a[1])?);
                let f = p0.conclusion.0.first().cloned().ok_or_else(|| elab_err("cut premise with empty sequent"))?;
                let p1 = front_one(&mut self.ids, p1, &f.dual(), "cut")?;
                Proof::cut(&mut self.ids, p0, p1)
            }
            ("cut", 3) => {
                let a = args(s, 3)?;
                let f = sig.formula(&a[0])?;
                let (p0, p1) = (self.sub(&a[1])?, self.sub(&a[2])?);
                let p0 = front_one(&mut self.ids, p0, &f, "cut")?;
                let p1 = front_one(&mut self.ids, p1, &f.dual(), "cut")?;
                Proof::cut(&mut self.ids, p0, p1)
            }
            ("weak", 2) => {
                let a = args(s, 2)?;
                let f = sig.formula(&a[0])?;
                let p = self.sub(&a[1])?;
                Proof::weak(&mut self.ids, f, p)
            }
            ("contr", 1) => {
                let p = self.sub(&args(s, 1)?[0])?;
                let fs = p.conclusion.formulas();
                if fs.len() < 2 || !fs[0].alpha_eq(&fs[1]) {
                    return Err(elab_err(format!("contr: positions 0 and 1 of {} differ", p.conclusion)));
                }
                Proof::contr(&mut self.ids, p)
            }
            ("contr", 2) => {
                let a = args(s, 2)?;
                let f = sig.formula(&a[0])?;
                let p = self.sub(&a[1])?;
                let p = front_two(&mut self.ids, p, &f, &f, "contr")?;
                Proof::contr(&mut self.ids, p)
            }
            ("perm", 2) => {
                let a = args(s, 2)?;
                let i: usize = a[0]
                    .as_atom()
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| elab_err(format!("perm needs a position, found {}", a[0])))?;
                let p = self.sub(&a[1])?;
                Proof::perm(&mut self.ids, i, p).map_err(|e| elab_err(e.to_string()))
            }
            _ => Err(elab_err(format!("unknown proof constructor {head} with {n} arguments"))),
        }
    }
}

/// Elaborates a proof term against a signature. Node ids are assigned in
/// preorder from 0.
pub fn elaborate(sig: &Signature, s: &Sexp) -> Result<Proof> {
    let mut e = Elaborator { sig, ids: IdGen::new() };
    Ok(e.proof(s)?.renumbered())
}

/// Elaborates the proof of a problem and, when an end-sequent is given,
/// checks it as a multiset and reorders the proof to match.
pub fn elaborate_problem(problem: &Problem) -> Result<Proof> {
    let p = elaborate(&problem.signature, &problem.proof)?;
    match &problem.end_sequent {
        None => Ok(p),
        Some(want) => {
            if !p.conclusion.multiset_eq(want) {
                return Err(elab_err(format!("proof concludes {} but the problem expects {want}", p.conclusion)));
            }
            if p.conclusion.alpha_eq(want) {
                return Ok(p);
            }
            let mut ids = IdGen::after(&p);
            let q = reorder(&mut ids, Arc::new(p), &want.0)?;
            Ok(Arc::unwrap_or_clone(q).renumbered())
        }
    }
}

/// The canonical proof term: every principal formula explicit, so that
/// elaborating the output gives back the same proof.
pub fn proof_to_sexp(p: &Proof) -> Sexp {
    let a = Sexp::atom;
    let sub = |k: usize| proof_to_sexp(&p.premises[k]);
    let principal = || p.conclusion.0[0].to_sexp();
    match &p.rule {
        Rule::Axiom => Sexp::list([a("ax"), principal()]),
        Rule::Or => Sexp::list([a("or-intro"), principal(), sub(0)]),
        Rule::And => Sexp::list([a("and-intro"), principal(), sub(0), sub(1)]),
        Rule::All(alpha) => Sexp::list([a("all-intro"), a(alpha), principal(), sub(0)]),
        Rule::Ex(t) => Sexp::list([a("ex-intro"), t.to_sexp(), principal(), sub(0)]),
        Rule::Cut => Sexp::list([a("cut"), p.premises[0].conclusion.0[0].to_sexp(), sub(0), sub(1)]),
        Rule::Weak => Sexp::list([a("weak"), principal(), sub(0)]),
        Rule::Contr => Sexp::list([a("contr"), principal(), sub(0)]),
        Rule::Perm(i) => Sexp::list([a("perm"), Sexp::atom(i.to_string()), sub(0)]),
    }
}

/// Indented rendering of [`proof_to_sexp`], one inference per line.
pub fn print_proof(p: &Proof) -> String {
    fn go(s: &Sexp, depth: usize, out: &mut String) {
        let items = s.as_list().unwrap();
        let proof_children = match s.head() {
            Some("ax") => 0,
            Some("and-intro" | "cut") => 2,
            _ => 1,
        };
        let split = items.len() - proof_children;
        out.push_str(&" ".repeat(depth * 2));
        out.push('(');
        let head: Vec<String> = items[..split].iter().map(ToString::to_string).collect();
        out.push_str(&head.join(" "));
        for c in &items[split..] {
            out.push('\n');
            go(c, depth + 1, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    go(&proof_to_sexp(p), 0, &mut out);
    out
}

pub fn print_problem(name: &str, sig: &Signature, p: &Proof) -> String {
    let proof = print_proof(p).lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n");
    format!("(problem {name}\n  {}\n  (proof\n{proof})\n  {})\n", sig.to_sexp(), sequent_to_sexp(&p.conclusion))
}
