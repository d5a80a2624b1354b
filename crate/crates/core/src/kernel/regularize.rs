use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::proof::{Proof, Rule};
use crate::term::{sym, Sym};

/// Renames eigenvariables so that each is introduced once and occurs only
/// above its universal inference. Offending names `a` become `a_1`, `a_2`, ...
/// in preorder; regular proofs are returned unchanged.
pub fn regularize(p: &Proof) -> Proof {
    let nodes = p.subproofs();
    let mut count: BTreeMap<Sym, usize> = BTreeMap::new();
    let mut taken: BTreeSet<Sym> = BTreeSet::new();
    for n in &nodes {
        if let Rule::All(a) = &n.rule {
            *count.entry(a.clone()).or_default() += 1;
        }
        taken.extend(n.conclusion.free_vars());
        let mut syms = Vec::new();
        n.conclusion.0.iter().for_each(|f| f.symbols_into(&mut syms));
        if let Rule::Ex(t) = &n.rule {
            t.free_vars_into(&mut taken);
            t.symbols_into(&mut syms);
        }
        taken.extend(syms.into_iter().map(|(s, _)| s));
    }
    taken.extend(count.keys().cloned());

    let mut bad: BTreeSet<Sym> = count.iter().filter(|(_, &c)| c > 1).map(|(a, _)| a.clone()).collect();
    escaping_into(p, &mut Vec::new(), &count, &mut bad);
    if bad.is_empty() {
        return p.clone();
    }
    let mut next: BTreeMap<Sym, usize> = BTreeMap::new();
    rename(p, &bad, &mut next, &mut taken)
}

/// Eigenvariables that occur somewhere outside the subproof of an inference
/// introducing them.
fn escaping_into(p: &Proof, scope: &mut Vec<Sym>, eigen: &BTreeMap<Sym, usize>, out: &mut BTreeSet<Sym>) {
    let mut fv = p.conclusion.free_vars();
    if let Rule::Ex(t) = &p.rule {
        t.free_vars_into(&mut fv);
    }
    for a in fv {
        let own = matches!(&p.rule, Rule::All(b) if *b == a);
        if eigen.contains_key(&a) && !own && !scope.contains(&a) {
            out.insert(a);
        }
    }
    let pushed = if let Rule::All(a) = &p.rule {
        scope.push(a.clone());
        true
    } else {
        false
    };
    for q in &p.premises {
        escaping_into(q, scope, eigen, out);
    }
    if pushed {
        scope.pop();
    }
}

fn rename(p: &Proof, bad: &BTreeSet<Sym>, next: &mut BTreeMap<Sym, usize>, taken: &mut BTreeSet<Sym>) -> Proof {
    match &p.rule {
        Rule::All(a) if bad.contains(a) => {
            let k = next.entry(a.clone()).or_insert(0);
            let fresh = loop {
                *k += 1;
                let cand = sym(&format!("{a}_{k}"));
                if !taken.contains(&cand) {
                    break cand;
                }
            };
            taken.insert(fresh.clone());
            let premise = p.premises[0].rename_free(a, &fresh);
            Proof {
                id: p.id,
                rule: Rule::All(fresh),
                premises: vec![Arc::new(rename(&premise, bad, next, taken))],
                conclusion: p.conclusion.clone(),
            }
        }
        _ => Proof {
            id: p.id,
            rule: p.rule.clone(),
            premises: p.premises.iter().map(|q| Arc::new(rename(q, bad, next, taken))).collect(),
            conclusion: p.conclusion.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check::{check_proof, ViolationKind};
    use crate::kernel::elaborate::elaborate;
    use crate::kernel::syntax::Signature;
    use crate::sexp::parse_one;

    fn sig() -> Signature {
        Signature::from_sexp(&parse_one("(signature (fn c 0) (pred P 1))").unwrap()).unwrap()
    }

    fn universal(alpha: &str) -> String {
        format!(
            "(all-intro {alpha} (all v (neg (atom P v))) (ex-intro {alpha} (ex v (atom P v)) (ax (atom P {alpha}))))"
        )
    }

    #[test]
    fn parallel_duplicates_get_numbered() {
        let src = format!("(and-intro {} {})", universal("a"), universal("a"));
        let p = elaborate(&sig(), &parse_one(&src).unwrap()).unwrap();
        assert!(check_proof(&p, None).iter().any(|v| v.kind == ViolationKind::Regularity));
        let r = regularize(&p);
        assert!(check_proof(&r, None).is_empty());
        let names: Vec<String> = r
            .subproofs()
            .iter()
            .filter_map(|n| match &n.rule {
                Rule::All(a) => Some(a.to_string()),
                _ => None,
            })
            .collect();
        assert_eq!(names, vec!["a_1", "a_2"]);
        assert_eq!(r.conclusion, p.conclusion);
    }

    #[test]
    fn regular_proofs_are_fixed_points() {
        let src = format!("(and-intro {} {})", universal("a"), universal("b"));
        let p = elaborate(&sig(), &parse_one(&src).unwrap()).unwrap();
        assert_eq!(regularize(&p), p);
    }
}
