use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{Grammar, Param};
use crate::lambda::{type_of, NtId, TypeCtx};
use crate::types::SimpleType;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrammarViolation {
    pub nonterminal: String,
    pub message: String,
}

impl fmt::Display for GrammarViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.nonterminal, self.message)
    }
}

fn violation(nt: NtId, message: String) -> GrammarViolation {
    GrammarViolation { nonterminal: nt.to_string(), message }
}

/// Every production has matching ground types on both sides, and every
/// non-terminal has order at most 2.
pub fn check_well_typed(g: &Grammar) -> Vec<GrammarViolation> {
    let mut out = Vec::new();
    for (id, nt) in &g.nonterminals {
        let order = nt.ty().order();
        if order > 2 {
            out.push(violation(*id, format!("type {} has order {order}", nt.ty())));
        }
        if !nt.ret.is_ground_like() {
            out.push(violation(*id, format!("result type {} is not ground", nt.ret)));
        }
    }
    for (id, prods) in &g.productions {
        let nt = &g.nonterminals[id];
        for p in prods {
            if p.params.len() != nt.arg_types.len() {
                out.push(violation(*id, format!("{} parameters for arity {}", p.params.len(), nt.arg_types.len())));
                continue;
            }
            let mut ctx = TypeCtx::with_nts(&g.types);
            let mut bad = false;
            for (param, ty) in p.params.iter().zip(&nt.arg_types) {
                match param {
                    Param::Var(x) => ctx = ctx.bind(x, ty.clone()),
                    Param::Pair(a, b) => match ty {
                        SimpleType::Pair(l, r) => ctx = ctx.bind(a, (**l).clone()).bind(b, (**r).clone()),
                        _ => {
                            out.push(violation(*id, format!("pair pattern against argument type {ty}")));
                            bad = true;
                        }
                    },
                }
            }
            if bad {
                continue;
            }
            match type_of(&p.rhs, &ctx) {
                Ok(t) if t == nt.ret => {}
                Ok(t) => {
                    out.push(violation(*id, format!("right-hand side {} has type {t}, expected {}", p.rhs, nt.ret)))
                }
                Err(e) => out.push(violation(*id, format!("right-hand side {} is ill-typed: {e}", p.rhs))),
            }
        }
    }
    out
}

/// Every right-hand side mentions only non-terminals of strict sub-proofs,
/// and the dependency relation admits a topological order.
pub fn check_acyclic(g: &Grammar) -> Result<Vec<NtId>, Vec<GrammarViolation>> {
    let mut out = Vec::new();
    let mut deps: BTreeMap<NtId, BTreeSet<NtId>> = BTreeMap::new();
    for (id, prods) in &g.productions {
        let entry = deps.entry(*id).or_default();
        for p in prods {
            let mut used = BTreeSet::new();
            p.rhs.nts_into(&mut used);
            for u in used {
                if !g.is_strictly_below(u.node, id.node) {
                    out.push(violation(*id, format!("depends on {u}, which is not below it")));
                }
                entry.insert(u);
            }
        }
    }
    // Kahn's algorithm on the reversed edges: emit dependencies first.
    let mut remaining: BTreeMap<NtId, usize> = deps.iter().map(|(k, v)| (*k, v.len())).collect();
    let mut users: BTreeMap<NtId, Vec<NtId>> = BTreeMap::new();
    for (k, vs) in &deps {
        for v in vs {
            users.entry(*v).or_default().push(*k);
        }
    }
    let mut ready: Vec<NtId> = remaining.iter().filter(|(_, &n)| n == 0).map(|(k, _)| *k).collect();
    let mut order = Vec::new();
    while let Some(n) = ready.pop() {
        order.push(n);
        for u in users.get(&n).into_iter().flatten() {
            let c = remaining.get_mut(u).unwrap();
            *c -= 1;
            if *c == 0 {
                ready.push(*u);
            }
        }
    }
    if order.len() != deps.len() {
        out.push(GrammarViolation {
            nonterminal: "grammar".into(),
            message: format!("dependency cycle among {} non-terminals", deps.len() - order.len()),
        });
    }
    if out.is_empty() {
        Ok(order)
    } else {
        Err(out)
    }
}
