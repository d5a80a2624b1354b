//! Randomized check that the first argument of a start symbol does not
//! matter when the principal formula is Σ₁.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::grammar::{derivable, extract_grammar, Enumeration, Grammar, Mode, DEFAULT_BUDGET};
use crate::kernel::Proof;
use crate::lambda::{NtId, STerm};
use crate::term::{sym, FoTerm, Sym};
use crate::types::SimpleType;

const CONSTANTS: [&str; 5] = ["k0", "k1", "k2", "k3", "k4"];

#[derive(Clone, Debug, Serialize)]
pub struct CanonicityCheck {
    pub proof: String,
    pub node: u32,
    pub index: usize,
    pub first: String,
    pub rest: Vec<String>,
    pub with_first: usize,
    pub with_unit: usize,
    pub equal: bool,
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    grammar: &'a Grammar,
    /// Non-terminals returning `ε`, usable as non-trivial first arguments.
    unit_nts: Vec<NtId>,
    fresh: usize,
}

impl Gen<'_> {
    fn fo(&mut self, scope: &[Sym], depth: u32) -> STerm {
        if !scope.is_empty() && self.rng.gen_bool(0.4) {
            return STerm::Var(scope[self.rng.gen_range(0..scope.len())].clone());
        }
        if depth > 0 && self.rng.gen_bool(0.4) {
            return match self.fo(scope, depth - 1) {
                STerm::Fo(t) => STerm::Fo(FoTerm::app("g", vec![t])),
                // λ-bound variables cannot sit inside a first-order term.
                other => other,
            };
        }
        STerm::Fo(FoTerm::constant(CONSTANTS[self.rng.gen_range(0..CONSTANTS.len())]))
    }

    /// A closed term of type `ty` when `scope` is empty.
    fn term(&mut self, ty: &SimpleType, scope: &[Sym]) -> STerm {
        match ty {
            SimpleType::O => self.fo(scope, 2),
            SimpleType::Unit => STerm::Unit,
            SimpleType::Pair(a, b) => STerm::pair(self.term(a, scope), self.term(b, scope)),
            SimpleType::Arrow(a, b) => {
                self.fresh += 1;
                let x = sym(&format!("v{}", self.fresh));
                let mut inner = scope.to_vec();
                if **a == SimpleType::O {
                    inner.push(x.clone());
                }
                STerm::Lam(x, (**a).clone(), Box::new(self.term(b, &inner)))
            }
        }
    }

    /// A closed term of type `ε`: the unit, a β-redex, or a non-terminal call.
    fn unit_like(&mut self) -> STerm {
        match self.rng.gen_range(0..3) {
            0 => STerm::Unit,
            1 => {
                let arg = self.fo(&[], 2);
                STerm::app(STerm::lam("v0", SimpleType::O, STerm::Unit), arg)
            }
            _ if !self.unit_nts.is_empty() => {
                let nt = self.unit_nts[self.rng.gen_range(0..self.unit_nts.len())];
                let tys = self.grammar.nonterminals[&nt].arg_types.clone();
                let args: Vec<STerm> = tys.iter().map(|t| self.term(t, &[])).collect();
                STerm::apply(STerm::Nt(nt), args)
            }
            _ => STerm::Unit,
        }
    }
}

/// `samples` random comparisons of `σ[node:i] u0 u1 …` with `σ[node:i] ⟨⟩ u1 …`
/// at nodes whose first formula is Σ₁.
pub fn canonicity_checks(name: &str, p: &Proof, mode: Mode, seed: u64, samples: usize) -> Result<Vec<CanonicityCheck>> {
    let grammar = extract_grammar(p, mode)?;
    let candidates: Vec<&Proof> = p
        .subproofs()
        .into_iter()
        .filter(|n| n.conclusion.0.first().is_some_and(|a| a.classify().within_sigma1()))
        .collect();
    let unit_nts = grammar.nonterminals.values().filter(|n| n.ret == SimpleType::Unit).map(|n| n.id).collect();
    let mut gen = Gen { rng: ChaCha8Rng::seed_from_u64(seed), grammar: &grammar, unit_nts, fresh: 0 };
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let node = candidates[gen.rng.gen_range(0..candidates.len())];
        let index = gen.rng.gen_range(0..node.conclusion.len());
        let nt = grammar.nonterminals[&NtId { node: node.id, index }].clone();
        let first = gen.unit_like();
        let rest: Vec<STerm> = nt.arg_types[1..].iter().map(|t| gen.term(t, &[])).collect();
        let call = |u0: STerm| STerm::apply(STerm::Nt(nt.id), std::iter::once(u0).chain(rest.iter().cloned()));
        let with_first = derivable(&call(first.clone()), &grammar, Enumeration::Serial, DEFAULT_BUDGET)?;
        let with_unit = derivable(&call(STerm::Unit), &grammar, Enumeration::Serial, DEFAULT_BUDGET)?;
        out.push(CanonicityCheck {
            proof: name.to_string(),
            node: node.id,
            index,
            first: first.to_string(),
            rest: rest.iter().map(ToString::to_string).collect(),
            with_first: with_first.len(),
            with_unit: with_unit.len(),
            equal: with_first == with_unit,
        });
    }
    Ok(out)
}
