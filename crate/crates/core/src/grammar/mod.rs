//! Tree grammars extracted from proofs.
//!
//! Every sub-proof `π ⊢ A0, …, An` contributes non-terminals `σ[π:i]` of type
//! `τ*(A0) → … → τ*(An) → τ(Ai)`. The productions of `σ[π:i]` are read off
//! the last inference of `π`; only contraction offers a choice.

mod enumerate;
mod wellformed;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, PrenexShape};
use crate::kernel::{NodeId, Proof, Rule};
use crate::lambda::{NtId, STerm};
use crate::term::{sym, FoTerm, Sym};
use crate::types::SimpleType;

pub use enumerate::{
    derivable, language, language_with, normal_forms, normal_forms_all_positions, rewrite_step, Enumeration, Language,
    DEFAULT_BUDGET,
};
pub use wellformed::{check_acyclic, check_well_typed, GrammarViolation};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Universal rows destructure their first argument by pattern matching.
    #[default]
    ContextSensitive,
    /// Universal rows use projections instead, so every row fires
    /// unconditionally. The language may grow.
    ContextFree,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::ContextSensitive => "context-sensitive",
            Mode::ContextFree => "context-free",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonTerminal {
    pub id: NtId,
    pub arg_types: Vec<SimpleType>,
    pub ret: SimpleType,
}

impl NonTerminal {
    pub fn ty(&self) -> SimpleType {
        SimpleType::function(&self.arg_types, self.ret.clone())
    }
}

/// A formal parameter on the left of a production.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Var(Sym),
    /// `z0 ⋆ z1`, matching only arguments that are literally pairs.
    Pair(Sym, Sym),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Var(x) => f.write_str(x),
            Param::Pair(a, b) => write!(f, "({a} ⋆ {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: NtId,
    pub params: Vec<Param>,
    pub rhs: STerm,
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lhs)?;
        for p in &self.params {
            write!(f, " {p}")?;
        }
        write!(f, " -> {}", self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct Grammar {
    pub mode: Mode,
    pub root: NodeId,
    /// Length of the root's end-sequent.
    pub width: usize,
    pub nonterminals: BTreeMap<NtId, NonTerminal>,
    /// Alternatives per non-terminal, in table order.
    pub productions: BTreeMap<NtId, Vec<Production>>,
    pub(crate) types: HashMap<NtId, SimpleType>,
    /// Preorder position and subtree size of each node.
    pub(crate) span: HashMap<NodeId, (usize, usize)>,
}

pub enum Firing {
    /// The universal row cannot match yet; its first argument must be
    /// rewritten further.
    Blocked,
    Alternatives(Vec<STerm>),
}

impl Grammar {
    pub fn arity(&self, nt: NtId) -> Option<usize> {
        self.nonterminals.get(&nt).map(|n| n.arg_types.len())
    }

    pub fn type_of_nt(&self, nt: NtId) -> Option<&SimpleType> {
        self.types.get(&nt)
    }

    pub fn nt_types(&self) -> &HashMap<NtId, SimpleType> {
        &self.types
    }

    pub fn production_count(&self) -> usize {
        self.productions.values().map(Vec::len).sum()
    }

    /// `true` when `inner` is a strict sub-proof of `outer`.
    pub fn is_strictly_below(&self, inner: NodeId, outer: NodeId) -> bool {
        match (self.span.get(&inner), self.span.get(&outer)) {
            (Some(&(i, _)), Some(&(o, size))) => o < i && i < o + size,
            _ => false,
        }
    }

    /// The start term `σ[root:i] ⟨⟩ … ⟨⟩`.
    pub fn start(&self, i: usize) -> STerm {
        let nt = NtId { node: self.root, index: i };
        STerm::apply(STerm::Nt(nt), (0..self.width).map(|_| STerm::Unit))
    }

    /// Applies the productions of `nt` to exactly `arity` arguments.
    pub fn fire(&self, nt: NtId, args: &[&STerm]) -> Firing {
        let Some(prods) = self.productions.get(&nt) else {
            return Firing::Alternatives(Vec::new());
        };
        let mut out = Vec::with_capacity(prods.len());
        for p in prods {
            let mut binds: Vec<(&Sym, &STerm)> = Vec::with_capacity(args.len() + 1);
            for (param, arg) in p.params.iter().zip(args) {
                match param {
                    Param::Var(x) => binds.push((x, arg)),
                    Param::Pair(a, b) => match arg {
                        STerm::Pair(h, t) => {
                            binds.push((a, h));
                            binds.push((b, t));
                        }
                        _ => return Firing::Blocked,
                    },
                }
            }
            let mut rhs = p.rhs.clone();
            for (x, arg) in binds {
                rhs = rhs.subst_var(x, arg);
            }
            out.push(rhs);
        }
        Firing::Alternatives(out)
    }

    /// One production per line, `σ[node:i] params -> rhs`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for prods in self.productions.values() {
            for p in prods {
                out.push_str(&p.to_string());
                out.push('\n');
            }
        }
        out
    }
}

/// `⟨wc, …, wc⟩ : o^k` where `k` is the number of existential quantifiers of `a`.
pub fn weakening_constant(a: &Formula) -> STerm {
    STerm::tuple((0..a.existential_count()).map(|_| STerm::Fo(FoTerm::weakening_constant())))
}

/// `z · r`: `z` itself when `z : ε`, the application `z r` otherwise.
pub fn dot_apply(z: STerm, z_type: &SimpleType, r: &FoTerm) -> Result<STerm> {
    match z_type {
        SimpleType::Unit => Ok(z),
        SimpleType::Arrow(dom, _) if **dom == SimpleType::O => Ok(STerm::app(z, STerm::Fo(r.clone()))),
        t => Err(Error::IllTyped(format!("cannot apply {z} of type {t} to a first-order term"))),
    }
}

/// `(P ∘_F Q) xs ys` where `F` stands at position 0 of the premise owning
/// `P`. The result has type `τ*(F̄)`, the first argument type of the other
/// premise, which also settles the degenerate quantifier-free and Σ₁/Π₁
/// cases.
pub fn compose_circ(f: &Formula, p: NtId, q: NtId, xs: &[STerm], ys: &[STerm]) -> Result<STerm> {
    let lambda_vars = |k: usize| -> Vec<String> { (0..k).map(|j| format!("u{j}")).collect() };
    let applied = |nt: NtId, first: STerm, rest: &[STerm]| {
        STerm::apply(STerm::Nt(nt), std::iter::once(first).chain(rest.iter().cloned()))
    };
    if f.dual().tau_star()? == SimpleType::Unit {
        return Ok(STerm::Unit);
    }
    match f.shape()? {
        PrenexShape::AllEx { alls, exs } if exs > 0 => {
            let vs = lambda_vars(alls);
            let body = applied(p, STerm::tuple(vs.iter().map(|v| STerm::var(v))), xs);
            Ok(vs.iter().rev().fold(body, |acc, v| STerm::lam(v, SimpleType::O, acc)))
        }
        PrenexShape::ExAll { exs, alls } if alls > 0 => {
            let vs = lambda_vars(exs);
            let inner = applied(q, STerm::tuple(vs.iter().map(|v| STerm::var(v))), ys);
            let fun = vs.iter().rev().fold(inner, |acc, v| STerm::lam(v, SimpleType::O, acc));
            Ok(applied(p, fun, xs))
        }
        _ => Ok(applied(p, STerm::Unit, xs)),
    }
}

/// Extracts the grammar of `p` and enumerates its language. The end-sequent
/// must be prenex Σ₁.
pub fn language_of(p: &Proof, mode: Mode) -> Result<Language> {
    require_sigma1(p)?;
    language(&extract_grammar(p, mode)?)
}

pub fn require_sigma1(p: &Proof) -> Result<()> {
    match p.conclusion.0.iter().find(|f| !f.classify().within_sigma1()) {
        Some(f) => Err(Error::NotSigma1(f.to_string())),
        None => Ok(()),
    }
}

fn names(prefix: &str, n: usize) -> Vec<Sym> {
    (0..n).map(|k| sym(&format!("{prefix}{k}"))).collect()
}

fn vars(xs: &[Sym]) -> Vec<STerm> {
    xs.iter().map(|x| STerm::Var(x.clone())).collect()
}

fn app(nt: NtId, args: Vec<STerm>) -> STerm {
    STerm::apply(STerm::Nt(nt), args)
}

fn plain(xs: &[Sym]) -> Vec<Param> {
    xs.iter().cloned().map(Param::Var).collect()
}

/// Extracts the grammar of a proof. Every formula of every sequent must be
/// prenex Π₂ or Σ₂.
pub fn extract_grammar(p: &Proof, mode: Mode) -> Result<Grammar> {
    let mut g = Grammar {
        mode,
        root: p.id,
        width: p.conclusion.len(),
        nonterminals: BTreeMap::new(),
        productions: BTreeMap::new(),
        types: HashMap::new(),
        span: HashMap::new(),
    };
    for (pre, node) in p.subproofs().into_iter().enumerate() {
        g.span.insert(node.id, (pre, node.size()));
        let arg_types = node.conclusion.0.iter().map(|f| f.tau_star()).collect::<Result<Vec<_>>>()?;
        for (i, a) in node.conclusion.0.iter().enumerate() {
            let id = NtId { node: node.id, index: i };
            let nt = NonTerminal { id, arg_types: arg_types.clone(), ret: a.tau()? };
            g.types.insert(id, nt.ty());
            g.nonterminals.insert(id, nt);
        }
        for i in 0..node.conclusion.len() {
            let id = NtId { node: node.id, index: i };
            let prods = productions_for(node, i, &arg_types, mode)?;
            g.productions
                .insert(id, prods.into_iter().map(|(params, rhs)| Production { lhs: id, params, rhs }).collect());
        }
    }
    Ok(g)
}

fn productions_for(node: &Proof, i: usize, arg_types: &[SimpleType], mode: Mode) -> Result<Vec<(Vec<Param>, STerm)>> {
    let n = node.conclusion.len();
    let nt = |k: usize, index: usize| NtId { node: node.premises[k].id, index };
    let xs = names("x", n);
    let one = |rhs: STerm| Ok(vec![(plain(&xs), rhs)]);
    match &node.rule {
        Rule::Axiom => one(STerm::Var(xs[1 - i].clone())),
        Rule::All(alpha) => match mode {
            Mode::ContextSensitive => {
                let (z0, z1) = (sym("z0"), sym("z1"));
                let mut params = vec![Param::Pair(z0.clone(), z1.clone())];
                params.extend(plain(&xs[1..]));
                let mut args = vec![STerm::Var(z1)];
                args.extend(vars(&xs[1..]));
                Ok(vec![(params, STerm::Subst(Box::new(app(nt(0, i), args)), alpha.clone(), Box::new(STerm::Var(z0))))])
            }
            Mode::ContextFree => {
                let z = STerm::Var(xs[0].clone());
                let mut args = vec![STerm::proj(1, z.clone())];
                args.extend(vars(&xs[1..]));
                one(STerm::Subst(Box::new(app(nt(0, i), args)), alpha.clone(), Box::new(STerm::proj(0, z))))
            }
        },
        Rule::Ex(r) => {
            let mut args = vec![dot_apply(STerm::Var(xs[0].clone()), &arg_types[0], r)?];
            args.extend(vars(&xs[1..]));
            if i == 0 {
                one(STerm::pair(STerm::Fo(r.clone()), app(nt(0, 0), args)))
            } else {
                one(app(nt(0, i), args))
            }
        }
        Rule::Cut => {
            let left = &node.premises[0].conclusion;
            let right = &node.premises[1].conclusion;
            let (g, d) = (left.len() - 1, right.len() - 1);
            let (xs, ys) = (names("x", g), names("y", d));
            let mut params = plain(&xs);
            params.extend(plain(&ys));
            let (xv, yv) = (vars(&xs), vars(&ys));
            let rhs = if i < g {
                let arg = compose_circ(&right.0[0], nt(1, 0), nt(0, 0), &yv, &xv)?;
                app(nt(0, i + 1), std::iter::once(arg).chain(xv).collect())
            } else {
                let arg = compose_circ(&left.0[0], nt(0, 0), nt(1, 0), &xv, &yv)?;
                app(nt(1, i - g + 1), std::iter::once(arg).chain(yv).collect())
            };
            Ok(vec![(params, rhs)])
        }
        Rule::Contr => {
            let mut args = vec![STerm::Var(xs[0].clone())];
            args.extend(vars(&xs));
            if i == 0 {
                Ok(vec![(plain(&xs), app(nt(0, 0), args.clone())), (plain(&xs), app(nt(0, 1), args))])
            } else {
                one(app(nt(0, i + 1), args))
            }
        }
        Rule::Weak => {
            if i == 0 {
                one(weakening_constant(&node.conclusion.0[0]))
            } else {
                one(app(nt(0, i - 1), vars(&xs[1..])))
            }
        }
        Rule::Perm(k) => {
            let k = *k;
            let mut args = vars(&xs);
            args.swap(k, k + 1);
            let target = if i == k {
                k + 1
            } else if i == k + 1 {
                k
            } else {
                i
            };
            one(app(nt(0, target), args))
        }
        Rule::Or => {
            let mut args = vec![STerm::Var(xs[0].clone())];
            args.extend(vars(&xs));
            one(app(nt(0, if i == 0 { 0 } else { i + 1 }), args))
        }
        Rule::And => {
            let g = node.premises[0].conclusion.len() - 1;
            let z = STerm::Var(xs[0].clone());
            let left: Vec<STerm> = std::iter::once(z.clone()).chain(vars(&xs[1..=g])).collect();
            let right: Vec<STerm> = std::iter::once(z).chain(vars(&xs[g + 1..])).collect();
            if i <= g {
                one(app(nt(0, i), left))
            } else {
                one(app(nt(1, i - g), right))
            }
        }
    }
}
