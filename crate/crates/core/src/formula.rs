//! Negation-normal-form formulas, sequents and the prenex classification
//! that drives every type in the grammar.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::sexp::Sexp;
use crate::term::{sym, FoTerm, Sym};
use crate::types::SimpleType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quant {
    All,
    Ex,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::All => Quant::Ex,
            Quant::Ex => Quant::All,
        }
    }
}

/// A formula in negation normal form. Negation only ever sits on atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Sym, Vec<FoTerm>),
    NegAtom(Sym, Vec<FoTerm>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Quant(Quant, Sym, Box<Formula>),
}

/// The prenex class of a formula, reporting the least class it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrenexClass {
    QuantifierFree,
    Sigma1,
    Pi1,
    Sigma2,
    Pi2,
    Other,
}

impl PrenexClass {
    /// Membership in prenex Sigma2, which contains the degenerate classes.
    pub fn within_sigma2(self) -> bool {
        matches!(self, PrenexClass::QuantifierFree | PrenexClass::Sigma1 | PrenexClass::Pi1 | PrenexClass::Sigma2)
    }

    pub fn within_pi2(self) -> bool {
        matches!(self, PrenexClass::QuantifierFree | PrenexClass::Sigma1 | PrenexClass::Pi1 | PrenexClass::Pi2)
    }

    pub fn within_sigma1(self) -> bool {
        matches!(self, PrenexClass::QuantifierFree | PrenexClass::Sigma1)
    }

    pub fn is_cut_admissible(self) -> bool {
        self != PrenexClass::Other
    }
}

impl fmt::Display for PrenexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrenexClass::QuantifierFree => "quantifier-free",
            PrenexClass::Sigma1 => "Sigma1",
            PrenexClass::Pi1 => "Pi1",
            PrenexClass::Sigma2 => "Sigma2",
            PrenexClass::Pi2 => "Pi2",
            PrenexClass::Other => "other",
        })
    }
}

/// Shape of a prenex Pi2/Sigma2 formula in terms of its quantifier blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrenexShape {
    /// `∀^alls ∃^exs G`; covers quantifier-free, Sigma1, Pi1 and Pi2.
    AllEx { alls: usize, exs: usize },
    /// `∃^exs ∀^alls G` with both blocks non-empty.
    ExAll { exs: usize, alls: usize },
}

impl Formula {
    pub fn atom(p: &str, args: Vec<FoTerm>) -> Formula {
        Formula::Atom(sym(p), args)
    }

    pub fn neg_atom(p: &str, args: Vec<FoTerm>) -> Formula {
        Formula::NegAtom(sym(p), args)
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn all(v: &str, body: Formula) -> Formula {
        Formula::Quant(Quant::All, sym(v), Box::new(body))
    }

    pub fn ex(v: &str, body: Formula) -> Formula {
        Formula::Quant(Quant::Ex, sym(v), Box::new(body))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::NegAtom(..))
    }

    /// The de Morgan dual.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Atom(p, a) => Formula::NegAtom(p.clone(), a.clone()),
            Formula::NegAtom(p, a) => Formula::Atom(p.clone(), a.clone()),
            Formula::Or(a, b) => Formula::And(Box::new(a.dual()), Box::new(b.dual())),
            Formula::And(a, b) => Formula::Or(Box::new(a.dual()), Box::new(b.dual())),
            Formula::Quant(q, v, body) => Formula::Quant(q.dual(), v.clone(), Box::new(body.dual())),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::NegAtom(..) => true,
            Formula::Or(a, b) | Formula::And(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Quant(..) => false,
        }
    }

    /// Splits off the leading quantifier prefix.
    pub fn prefix(&self) -> (Vec<(Quant, Sym)>, &Formula) {
        let mut out = Vec::new();
        let mut cur = self;
        while let Formula::Quant(q, v, body) = cur {
            out.push((*q, v.clone()));
            cur = body;
        }
        (out, cur)
    }

    pub fn classify(&self) -> PrenexClass {
        let (prefix, matrix) = self.prefix();
        if !matrix.is_quantifier_free() {
            return PrenexClass::Other;
        }
        let mut blocks: Vec<Quant> = Vec::new();
        for (q, _) in prefix {
            if blocks.last() != Some(&q) {
                blocks.push(q);
            }
        }
        match blocks.as_slice() {
            [] => PrenexClass::QuantifierFree,
            [Quant::Ex] => PrenexClass::Sigma1,
            [Quant::All] => PrenexClass::Pi1,
            [Quant::Ex, Quant::All] => PrenexClass::Sigma2,
            [Quant::All, Quant::Ex] => PrenexClass::Pi2,
            _ => PrenexClass::Other,
        }
    }

    pub fn shape(&self) -> Result<PrenexShape> {
        let (prefix, _) = self.prefix();
        let count = |q| prefix.iter().filter(|(p, _)| *p == q).count();
        match self.classify() {
            PrenexClass::Other => Err(Error::NotPrenex(self.to_string())),
            PrenexClass::Sigma2 => Ok(PrenexShape::ExAll { exs: count(Quant::Ex), alls: count(Quant::All) }),
            _ => Ok(PrenexShape::AllEx { alls: count(Quant::All), exs: count(Quant::Ex) }),
        }
    }

    /// `∀…∀∃…∃G` with both blocks non-empty.
    pub fn is_genuine_pi2(&self) -> bool {
        self.classify() == PrenexClass::Pi2
    }

    pub fn is_genuine_sigma2(&self) -> bool {
        self.classify() == PrenexClass::Sigma2
    }

    /// Number of existential quantifiers in the prefix.
    pub fn existential_count(&self) -> usize {
        self.prefix().0.iter().filter(|(q, _)| *q == Quant::Ex).count()
    }

    /// The witness type: `o^n` for `∀^m∃^n G`, `o^m` for `∃^m∀^n G`.
    pub fn tau(&self) -> Result<SimpleType> {
        Ok(match self.shape()? {
            PrenexShape::AllEx { exs, .. } => SimpleType::seq(exs),
            PrenexShape::ExAll { exs, .. } => SimpleType::seq(exs),
        })
    }

    /// The input type: `o^m` for `∀^m∃^n G`, `o → … → o → o^n` (m arrows)
    /// for `∃^m∀^n G`.
    pub fn tau_star(&self) -> Result<SimpleType> {
        Ok(match self.shape()? {
            PrenexShape::AllEx { alls, .. } => SimpleType::seq(alls),
            PrenexShape::ExAll { exs, alls } => SimpleType::curried(exs, SimpleType::seq(alls)),
        })
    }

    /// `A(v/t)` for `self = Qv A`. Returns `None` when `self` is not quantified.
    pub fn instantiate(&self, t: &FoTerm) -> Option<Formula> {
        match self {
            Formula::Quant(_, v, body) => Some(body.subst_bound(v, t)),
            _ => None,
        }
    }

    fn subst_bound(&self, var: &str, t: &FoTerm) -> Formula {
        match self {
            Formula::Atom(p, a) => Formula::Atom(p.clone(), a.iter().map(|x| x.subst_bound(var, t)).collect()),
            Formula::NegAtom(p, a) => Formula::NegAtom(p.clone(), a.iter().map(|x| x.subst_bound(var, t)).collect()),
            Formula::Or(a, b) => Formula::or(a.subst_bound(var, t), b.subst_bound(var, t)),
            Formula::And(a, b) => Formula::and(a.subst_bound(var, t), b.subst_bound(var, t)),
            Formula::Quant(q, v, body) if &**v == var => Formula::Quant(*q, v.clone(), body.clone()),
            Formula::Quant(q, v, body) => Formula::Quant(*q, v.clone(), Box::new(body.subst_bound(var, t))),
        }
    }

    /// Replaces the free variable `var` by `t`.
    pub fn subst_free(&self, var: &str, t: &FoTerm) -> Formula {
        self.map_terms(&|x| x.subst_free(var, t))
    }

    fn map_terms(&self, f: &dyn Fn(&FoTerm) -> FoTerm) -> Formula {
        match self {
            Formula::Atom(p, a) => Formula::Atom(p.clone(), a.iter().map(f).collect()),
            Formula::NegAtom(p, a) => Formula::NegAtom(p.clone(), a.iter().map(f).collect()),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Quant(q, v, body) => Formula::Quant(*q, v.clone(), Box::new(body.map_terms(f))),
        }
    }

    fn binders_into(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Formula::Or(a, b) | Formula::And(a, b) => {
                a.binders_into(out);
                b.binders_into(out);
            }
            Formula::Quant(_, v, body) => {
                out.insert(v.clone());
                body.binders_into(out);
            }
            _ => {}
        }
    }

    /// Builds `Q v. self[t := v]` abstracting every occurrence of `t`, with a
    /// bound-variable name that no binder inside `self` uses.
    pub fn abstract_over(&self, q: Quant, t: &FoTerm) -> Formula {
        let mut used = BTreeSet::new();
        self.binders_into(&mut used);
        self.free_vars_into(&mut used);
        let mut syms = Vec::new();
        self.symbols_into(&mut syms);
        t.symbols_into(&mut syms);
        used.extend(syms.into_iter().map(|(s, _)| s));
        let name = ["v", "w", "u", "x", "y", "z"]
            .iter()
            .map(|s| s.to_string())
            .chain((1..).map(|k| format!("v{k}")))
            .find(|n| !used.contains(n.as_str()))
            .unwrap();
        let body = self.map_terms(&|x| x.abstract_term(t, &name));
        Formula::Quant(q, sym(&name), Box::new(body))
    }

    /// Function and constant symbols with arities.
    pub fn symbols_into(&self, out: &mut Vec<(Sym, usize)>) {
        match self {
            Formula::Atom(_, a) | Formula::NegAtom(_, a) => a.iter().for_each(|x| x.symbols_into(out)),
            Formula::Or(a, b) | Formula::And(a, b) => {
                a.symbols_into(out);
                b.symbols_into(out);
            }
            Formula::Quant(_, _, body) => body.symbols_into(out),
        }
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Formula::Atom(_, a) | Formula::NegAtom(_, a) => a.iter().for_each(|x| x.free_vars_into(out)),
            Formula::Or(a, b) | Formula::And(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
            Formula::Quant(_, _, body) => body.free_vars_into(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    /// Atoms of a quantifier-free formula, with their polarity.
    pub fn literals_into<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::Atom(..) | Formula::NegAtom(..) => out.push(self),
            Formula::Or(a, b) | Formula::And(a, b) => {
                a.literals_into(out);
                b.literals_into(out);
            }
            Formula::Quant(_, _, body) => body.literals_into(out),
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq_in(self, other, &mut Vec::new())
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_, a) | Formula::NegAtom(_, a) => 1 + a.iter().map(FoTerm::size).sum::<usize>(),
            Formula::Or(a, b) | Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Quant(_, _, body) => 1 + body.size(),
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        let atom = |head: &str, p: &Sym, a: &[FoTerm]| {
            let mut items = vec![Sexp::atom(head), Sexp::atom(&**p)];
            items.extend(a.iter().map(FoTerm::to_sexp));
            Sexp::List(items)
        };
        match self {
            Formula::Atom(p, a) => atom("atom", p, a),
            Formula::NegAtom(p, a) => Sexp::list([Sexp::atom("neg"), atom("atom", p, a)]),
            Formula::Or(a, b) => Sexp::list([Sexp::atom("or"), a.to_sexp(), b.to_sexp()]),
            Formula::And(a, b) => Sexp::list([Sexp::atom("and"), a.to_sexp(), b.to_sexp()]),
            Formula::Quant(q, v, body) => {
                Sexp::list([Sexp::atom(if *q == Quant::All { "all" } else { "ex" }), Sexp::atom(&**v), body.to_sexp()])
            }
        }
    }
}

fn term_alpha_eq(a: &FoTerm, b: &FoTerm, env: &[(Sym, Sym)]) -> bool {
    match (a, b) {
        (FoTerm::Bound(x), FoTerm::Bound(y)) => {
            let lx = env.iter().rposition(|(l, _)| l == x);
            let ly = env.iter().rposition(|(_, r)| r == y);
            match (lx, ly) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (FoTerm::App(f, xs), FoTerm::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_alpha_eq(x, y, env))
        }
        _ => a == b,
    }
}

fn alpha_eq_in(a: &Formula, b: &Formula, env: &mut Vec<(Sym, Sym)>) -> bool {
    match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) | (Formula::NegAtom(p, xs), Formula::NegAtom(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_alpha_eq(x, y, env))
        }
        (Formula::Or(a1, a2), Formula::Or(b1, b2)) | (Formula::And(a1, a2), Formula::And(b1, b2)) => {
            alpha_eq_in(a1, b1, env) && alpha_eq_in(a2, b2, env)
        }
        (Formula::Quant(q1, v1, a1), Formula::Quant(q2, v2, b1)) if q1 == q2 => {
            env.push((v1.clone(), v2.clone()));
            let r = alpha_eq_in(a1, b1, env);
            env.pop();
            r
        }
        _ => false,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = |f: &mut fmt::Formatter<'_>, a: &[FoTerm]| -> fmt::Result {
            if a.is_empty() {
                return Ok(());
            }
            f.write_str("(")?;
            for (k, x) in a.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::Atom(p, a) => {
                write!(f, "{p}")?;
                args(f, a)
            }
            Formula::NegAtom(p, a) => {
                write!(f, "¬{p}")?;
                args(f, a)
            }
            Formula::Or(a, b) => write!(f, "({a} ∨ {b})"),
            Formula::And(a, b) => write!(f, "({a} ∧ {b})"),
            Formula::Quant(Quant::All, v, body) => write!(f, "∀{v} {body}"),
            Formula::Quant(Quant::Ex, v, body) => write!(f, "∃{v} {body}"),
        }
    }
}

/// An ordered sequence of formulas, read disjunctively.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sequent(pub Vec<Formula>);

impl Sequent {
    pub fn new(formulas: Vec<Formula>) -> Self {
        Sequent(formulas)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.0
    }

    pub fn alpha_eq(&self, other: &Sequent) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.alpha_eq(b))
    }

    /// Equality as multisets of formulas up to bound-variable renaming.
    pub fn multiset_eq(&self, other: &Sequent) -> bool {
        permutation_to(&self.0, &other.0).is_some()
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.0.iter().for_each(|f| f.free_vars_into(&mut out));
        out
    }
}

/// For multiset-equal sequences, a map `target[k] = source[perm[k]]`.
pub fn permutation_to(source: &[Formula], target: &[Formula]) -> Option<Vec<usize>> {
    if source.len() != target.len() {
        return None;
    }
    let mut used = vec![false; source.len()];
    let mut perm = Vec::with_capacity(target.len());
    for t in target {
        let k = (0..source.len()).find(|&k| !used[k] && source[k].alpha_eq(t))?;
        used[k] = true;
        perm.push(k);
    }
    Some(perm)
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::SimpleType as T;

    fn p(args: Vec<FoTerm>) -> Formula {
        Formula::atom("P", args)
    }

    fn bv(v: &str) -> FoTerm {
        FoTerm::bound(v)
    }

    #[test]
    fn dual_of_universal_disjunction() {
        let f = Formula::all("v", Formula::or(p(vec![bv("v")]), Formula::atom("Q", vec![bv("v")])));
        let expected = Formula::ex(
            "v",
            Formula::and(Formula::neg_atom("P", vec![bv("v")]), Formula::neg_atom("Q", vec![bv("v")])),
        );
        assert_eq!(f.dual(), expected);
        let c = FoTerm::constant("c");
        assert_eq!(p(vec![c.clone()]).dual(), Formula::neg_atom("P", vec![c]));
    }

    #[test]
    fn classification_examples() {
        let c = FoTerm::constant("c");
        assert_eq!(p(vec![c]).classify(), PrenexClass::QuantifierFree);
        let pi2 = Formula::all("v1", Formula::all("v2", Formula::ex("w", p(vec![bv("v1"), bv("v2"), bv("w")]))));
        assert_eq!(pi2.classify(), PrenexClass::Pi2);
        let other = Formula::ex("v", Formula::all("w", Formula::ex("u", p(vec![bv("v"), bv("w"), bv("u")]))));
        assert_eq!(other.classify(), PrenexClass::Other);
        assert!(other.tau().is_err());
    }

    #[test]
    fn tau_examples() {
        let b = p(vec![bv("v"), bv("w0"), bv("w1")]);
        let f = Formula::all("v", Formula::ex("w0", Formula::ex("w1", b)));
        assert_eq!(f.tau().unwrap(), T::seq(2));
        assert_eq!(f.tau_star().unwrap(), T::seq(1));
        let g = Formula::ex("v", Formula::all("w", p(vec![bv("v"), bv("w")])));
        assert_eq!(g.tau().unwrap(), T::seq(1));
        assert_eq!(g.tau_star().unwrap(), T::arrow(T::O, T::seq(1)));
        let q = p(vec![FoTerm::constant("c")]);
        assert_eq!(q.tau().unwrap(), T::Unit);
        assert_eq!(q.tau_star().unwrap(), T::Unit);
    }

    #[test]
    fn substitution_leaves_binders_alone() {
        let f = Formula::ex("w", p(vec![FoTerm::free("a"), bv("w")]));
        let g = f.subst_free("a", &FoTerm::constant("c"));
        assert_eq!(g, Formula::ex("w", p(vec![FoTerm::constant("c"), bv("w")])));
    }

    #[test]
    fn alpha_equivalence() {
        let f = Formula::all("v", Formula::ex("w", p(vec![bv("v"), bv("w")])));
        let g = Formula::all("x", Formula::ex("y", p(vec![bv("x"), bv("y")])));
        let h = Formula::all("x", Formula::ex("y", p(vec![bv("y"), bv("x")])));
        assert!(f.alpha_eq(&g));
        assert!(!f.alpha_eq(&h));
    }

    #[test]
    fn abstraction_then_instantiation_round_trips() {
        let c = FoTerm::constant("c");
        let body = Formula::or(
            Formula::neg_atom("P", vec![c.clone()]),
            Formula::atom("P", vec![FoTerm::app("f", vec![c.clone()])]),
        );
        let q = body.abstract_over(Quant::Ex, &c);
        assert_eq!(q.instantiate(&c).unwrap(), body);
        assert_eq!(q.existential_count(), 1);
    }
}
