//! Validation of proofs against the one-sided calculus.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::proof::{NodeId, Proof, Rule};
use super::syntax::Signature;
use crate::formula::{Formula, Quant};
use crate::term::Sym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Arity,
    RuleMismatch,
    EigenvariableCondition,
    Regularity,
    CutNotPrenex,
    OpenWitness,
    DuplicateId,
    Signature,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub node: NodeId,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.node, self.message)
    }
}

/// Checks every node of `p`; an empty report means the proof is valid.
/// With a signature, symbols are additionally checked against it.
pub fn check_proof(p: &Proof, sig: Option<&Signature>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for node in p.subproofs() {
        if !seen_ids.insert(node.id) {
            out.push(Violation {
                node: node.id,
                kind: ViolationKind::DuplicateId,
                message: format!("node id {} used twice", node.id),
            });
        }
        check_node(node, &mut out);
    }
    check_regularity(p, &mut out);
    check_symbols(p, sig, &mut out);
    out
}

pub fn is_valid(p: &Proof) -> bool {
    check_proof(p, None).is_empty()
}

fn push(out: &mut Vec<Violation>, node: &Proof, kind: ViolationKind, message: impl Into<String>) {
    out.push(Violation { node: node.id, kind, message: message.into() });
}

fn seq_eq(a: &[Formula], b: &[Formula]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.alpha_eq(y))
}

fn check_node(node: &Proof, out: &mut Vec<Violation>) {
    let tag = node.rule.tag();
    if node.premises.len() != tag.arity() {
        push(
            out,
            node,
            ViolationKind::Arity,
            format!("{tag} expects {} premises, found {}", tag.arity(), node.premises.len()),
        );
        return;
    }
    let concl = node.conclusion.formulas();
    let prem = |k: usize| node.premises[k].conclusion.formulas();
    let bad =
        |out: &mut Vec<Violation>, what: &str| push(out, node, ViolationKind::RuleMismatch, format!("{tag}: {what}"));
    match &node.rule {
        Rule::Axiom => {
            let ok = concl.len() == 2 && concl[0].is_literal() && concl[1] == concl[0].dual();
            if !ok {
                bad(out, "conclusion is not A, ¬A for an atom A");
            }
        }
        Rule::Or => {
            let p = prem(0);
            let ok = p.len() >= 2
                && concl.len() + 1 == p.len()
                && matches!(&concl[0], Formula::Or(a, b) if a.alpha_eq(&p[0]) && b.alpha_eq(&p[1]))
                && seq_eq(&concl[1..], &p[2..]);
            if !ok {
                bad(out, "conclusion does not follow from premise");
            }
        }
        Rule::And => {
            let (p0, p1) = (prem(0), prem(1));
            let ok = !p0.is_empty()
                && !p1.is_empty()
                && concl.len() + 1 == p0.len() + p1.len()
                && matches!(&concl[0], Formula::And(a, b) if a.alpha_eq(&p0[0]) && b.alpha_eq(&p1[0]))
                && seq_eq(&concl[1..p0.len()], &p0[1..])
                && seq_eq(&concl[p0.len()..], &p1[1..]);
            if !ok {
                bad(out, "conclusion does not follow from premises");
            }
        }
        Rule::All(alpha) => {
            let p = prem(0);
            let inst = concl
                .first()
                .filter(|f| matches!(f, Formula::Quant(Quant::All, ..)))
                .and_then(|f| f.instantiate(&crate::term::FoTerm::Free(alpha.clone())));
            let ok = match inst {
                Some(a) => p.len() == concl.len() && a.alpha_eq(&p[0]) && seq_eq(&concl[1..], &p[1..]),
                None => false,
            };
            if !ok {
                bad(out, "conclusion does not follow from premise");
            }
            if node.conclusion.free_vars().contains(alpha) {
                push(
                    out,
                    node,
                    ViolationKind::EigenvariableCondition,
                    format!("eigenvariable condition violated: {alpha} occurs in the conclusion"),
                );
            }
        }
        Rule::Ex(t) => {
            if t.has_bound() {
                push(out, node, ViolationKind::OpenWitness, format!("witness {t} contains a bound variable"));
            }
            let p = prem(0);
            let inst =
                concl.first().filter(|f| matches!(f, Formula::Quant(Quant::Ex, ..))).and_then(|f| f.instantiate(t));
            let ok = match inst {
                Some(a) => p.len() == concl.len() && a.alpha_eq(&p[0]) && seq_eq(&concl[1..], &p[1..]),
                None => false,
            };
            if !ok {
                bad(out, "conclusion does not follow from premise");
            }
        }
        Rule::Cut => {
            let (p0, p1) = (prem(0), prem(1));
            let ok = !p0.is_empty()
                && !p1.is_empty()
                && p1[0].alpha_eq(&p0[0].dual())
                && concl.len() + 2 == p0.len() + p1.len()
                && seq_eq(&concl[..p0.len() - 1], &p0[1..])
                && seq_eq(&concl[p0.len() - 1..], &p1[1..]);
            if !ok {
                bad(out, "premises are not A, Γ and ¬A, Δ with conclusion Γ, Δ");
            } else if !p0[0].classify().is_cut_admissible() {
                push(out, node, ViolationKind::CutNotPrenex, format!("cut formula not prenex Pi2/Sigma2: {}", p0[0]));
            }
        }
        Rule::Weak => {
            let p = prem(0);
            if concl.len() != p.len() + 1 || !seq_eq(&concl[1..], p) {
                bad(out, "conclusion is not A, Γ over premise Γ");
            }
        }
        Rule::Contr => {
            let p = prem(0);
            let ok = p.len() >= 2 && p[0].alpha_eq(&p[1]) && concl.len() + 1 == p.len() && seq_eq(concl, &p[1..]);
            if !ok {
                bad(out, "premise is not A, A, Γ with conclusion A, Γ");
            }
        }
        Rule::Perm(i) => {
            let p = prem(0);
            let ok = i + 1 < p.len() && concl.len() == p.len() && {
                let mut q = p.to_vec();
                q.swap(*i, i + 1);
                seq_eq(concl, &q)
            };
            if !ok {
                bad(out, "conclusion is not the premise with positions i, i+1 swapped");
            }
        }
    }
}

/// Each eigenvariable is introduced once and occurs only strictly above its
/// universal inference.
fn check_regularity(p: &Proof, out: &mut Vec<Violation>) {
    let mut intro: HashMap<Sym, Vec<NodeId>> = HashMap::new();
    for node in p.subproofs() {
        if let Rule::All(a) = &node.rule {
            intro.entry(a.clone()).or_default().push(node.id);
        }
    }
    let mut dups: Vec<_> = intro.iter().filter(|(_, v)| v.len() > 1).collect();
    dups.sort();
    for (a, nodes) in dups {
        for &n in &nodes[1..] {
            out.push(Violation {
                node: n,
                kind: ViolationKind::Regularity,
                message: format!("eigenvariable {a} introduced by more than one inference"),
            });
        }
    }
    let eigen: BTreeSet<Sym> = intro.keys().cloned().collect();
    let mut reported = BTreeSet::new();
    fn walk(
        node: &Proof,
        scope: &mut Vec<Sym>,
        eigen: &BTreeSet<Sym>,
        reported: &mut BTreeSet<(NodeId, Sym)>,
        out: &mut Vec<Violation>,
    ) {
        let mut fv = node.conclusion.free_vars();
        if let Rule::Ex(t) = &node.rule {
            t.free_vars_into(&mut fv);
        }
        for a in fv.intersection(eigen) {
            let at_own_intro = matches!(&node.rule, Rule::All(b) if b == a);
            if !scope.contains(a) && !at_own_intro && reported.insert((node.id, a.clone())) {
                out.push(Violation {
                    node: node.id,
                    kind: ViolationKind::Regularity,
                    message: format!("eigenvariable {a} occurs outside the subproof of its inference"),
                });
            }
        }
        let pushed = match &node.rule {
            Rule::All(a) => {
                scope.push(a.clone());
                true
            }
            _ => false,
        };
        for q in &node.premises {
            walk(q, scope, eigen, reported, out);
        }
        if pushed {
            scope.pop();
        }
    }
    walk(p, &mut Vec::new(), &eigen, &mut reported, out);
}

fn check_symbols(p: &Proof, sig: Option<&Signature>, out: &mut Vec<Violation>) {
    let mut arities: BTreeMap<Sym, (usize, NodeId)> = BTreeMap::new();
    for node in p.subproofs() {
        let mut syms = Vec::new();
        node.conclusion.0.iter().for_each(|f| f.symbols_into(&mut syms));
        if let Rule::Ex(t) = &node.rule {
            t.symbols_into(&mut syms);
        }
        for (s, n) in syms {
            if let Some(sig) = sig {
                if let Some(err) = sig.check_function(&s, n) {
                    push(out, node, ViolationKind::Signature, err);
                    continue;
                }
            }
            match arities.get(&s) {
                Some(&(m, _)) if m != n => {
                    push(
                        out,
                        node,
                        ViolationKind::Signature,
                        format!("function symbol {s} used with arities {m} and {n}"),
                    );
                }
                Some(_) => {}
                None => {
                    arities.insert(s, (n, node.id));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kernel::proof::IdGen;
    use crate::term::{sym, FoTerm};

    fn pc() -> Formula {
        Formula::atom("P", vec![FoTerm::constant("c")])
    }

    #[test]
    fn e1_is_valid() {
        let mut ids = IdGen::new();
        let ax = Arc::new(Proof::axiom(&mut ids, pc()).unwrap());
        let p = Proof::ex(&mut ids, FoTerm::constant("c"), None, ax).unwrap();
        assert!(check_proof(&p, None).is_empty());
    }

    #[test]
    fn eigenvariable_in_conclusion_is_reported() {
        let mut ids = IdGen::new();
        let pa = Formula::atom("P", vec![FoTerm::free("a")]);
        let ax = Arc::new(Proof::axiom(&mut ids, pa).unwrap());
        let p = Proof::all(&mut ids, sym("a"), None, ax).unwrap();
        let report = check_proof(&p, None);
        assert!(report.iter().any(|v| v.kind == ViolationKind::EigenvariableCondition));
        assert!(report.iter().any(|v| v.message.contains("eigenvariable condition violated")));
    }

    #[test]
    fn non_prenex_cut_is_reported() {
        let mut ids = IdGen::new();
        let v = FoTerm::bound;
        let body = Formula::atom("P", vec![v("v"), v("w"), v("u")]);
        let bad = Formula::ex("v", Formula::all("w", Formula::ex("u", body)));
        let ax0 = Arc::new(Proof::axiom(&mut ids, pc()).unwrap());
        let l = Arc::new(Proof::weak(&mut ids, bad.clone(), ax0).unwrap());
        let ax1 = Arc::new(Proof::axiom(&mut ids, pc()).unwrap());
        let r = Arc::new(Proof::weak(&mut ids, bad.dual(), ax1).unwrap());
        let cut = Proof::cut(&mut ids, l, r).unwrap();
        let report = check_proof(&cut, None);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].kind, ViolationKind::CutNotPrenex);
        assert!(report[0].message.contains("cut formula not prenex Pi2/Sigma2"));
    }

    #[test]
    fn tampered_conclusion_is_reported() {
        let mut ids = IdGen::new();
        let ax = Arc::new(Proof::axiom(&mut ids, pc()).unwrap());
        let mut p = Proof::ex(&mut ids, FoTerm::constant("c"), None, ax).unwrap();
        p.rule = Rule::Ex(FoTerm::constant("d"));
        let report = check_proof(&p, None);
        assert_eq!(report[0].kind, ViolationKind::RuleMismatch);
    }
}
