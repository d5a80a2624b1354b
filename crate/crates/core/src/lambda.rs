//! Structured λ-terms: first-order leaves with explicit substitution, closed
//! under pairing, abstraction and application, plus non-terminal symbols.
//!
//! Binary operators associate to the right: `a ⋆ b ⋆ c` is `a ⋆ (b ⋆ c)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{sym, FoTerm, Sym};
use crate::types::SimpleType;

/// A non-terminal `σ[node:index]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NtId {
    pub node: u32,
    pub index: usize,
}

impl fmt::Display for NtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ[{}:{}]", self.node, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum STerm {
    /// A first-order leaf of type `o`; the weakening constant is `Fo(wc)`.
    Fo(FoTerm),
    Unit,
    /// `s[α ↦ t]`.
    Subst(Box<STerm>, Sym, Box<STerm>),
    Pair(Box<STerm>, Box<STerm>),
    Lam(Sym, SimpleType, Box<STerm>),
    App(Box<STerm>, Box<STerm>),
    Var(Sym),
    Nt(NtId),
    Proj(u8, Box<STerm>),
}

impl STerm {
    pub fn fo(t: FoTerm) -> STerm {
        STerm::Fo(t)
    }

    pub fn var(name: &str) -> STerm {
        STerm::Var(sym(name))
    }

    pub fn pair(a: STerm, b: STerm) -> STerm {
        STerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn subst(s: STerm, var: &str, t: STerm) -> STerm {
        STerm::Subst(Box::new(s), sym(var), Box::new(t))
    }

    pub fn lam(x: &str, ty: SimpleType, body: STerm) -> STerm {
        STerm::Lam(sym(x), ty, Box::new(body))
    }

    pub fn app(f: STerm, a: STerm) -> STerm {
        STerm::App(Box::new(f), Box::new(a))
    }

    /// `f a0 a1 … an`.
    pub fn apply(f: STerm, args: impl IntoIterator<Item = STerm>) -> STerm {
        args.into_iter().fold(f, STerm::app)
    }

    pub fn proj(i: u8, t: STerm) -> STerm {
        STerm::Proj(i, Box::new(t))
    }

    /// `⟨t0, …, tk-1⟩ = t0 ⋆ … ⋆ tk-1 ⋆ ⟨⟩`.
    pub fn tuple(items: impl IntoIterator<Item = STerm>) -> STerm {
        let items: Vec<_> = items.into_iter().collect();
        items.into_iter().rev().fold(STerm::Unit, |acc, x| STerm::pair(x, acc))
    }

    /// Splits an application spine into head and arguments.
    pub fn spine(&self) -> (&STerm, Vec<&STerm>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let STerm::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn contains_nt(&self) -> bool {
        match self {
            STerm::Nt(_) => true,
            STerm::Fo(_) | STerm::Unit | STerm::Var(_) => false,
            STerm::Subst(a, _, b) | STerm::Pair(a, b) | STerm::App(a, b) => a.contains_nt() || b.contains_nt(),
            STerm::Lam(_, _, b) | STerm::Proj(_, b) => b.contains_nt(),
        }
    }

    pub fn nts_into(&self, out: &mut BTreeSet<NtId>) {
        match self {
            STerm::Nt(n) => {
                out.insert(*n);
            }
            STerm::Fo(_) | STerm::Unit | STerm::Var(_) => {}
            STerm::Subst(a, _, b) | STerm::Pair(a, b) | STerm::App(a, b) => {
                a.nts_into(out);
                b.nts_into(out);
            }
            STerm::Lam(_, _, b) | STerm::Proj(_, b) => b.nts_into(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            STerm::Fo(t) => t.size(),
            STerm::Unit | STerm::Var(_) | STerm::Nt(_) => 1,
            STerm::Subst(a, _, b) | STerm::Pair(a, b) | STerm::App(a, b) => 1 + a.size() + b.size(),
            STerm::Lam(_, _, b) | STerm::Proj(_, b) => 1 + b.size(),
        }
    }

    /// Free typed (λ-)variables.
    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out, &mut Vec::new());
        out
    }

    fn free_vars_into(&self, out: &mut BTreeSet<Sym>, bound: &mut Vec<Sym>) {
        match self {
            STerm::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            STerm::Fo(_) | STerm::Unit | STerm::Nt(_) => {}
            STerm::Subst(a, _, b) | STerm::Pair(a, b) | STerm::App(a, b) => {
                a.free_vars_into(out, bound);
                b.free_vars_into(out, bound);
            }
            STerm::Proj(_, b) => b.free_vars_into(out, bound),
            STerm::Lam(x, _, b) => {
                bound.push(x.clone());
                b.free_vars_into(out, bound);
                bound.pop();
            }
        }
    }

    fn all_var_names(&self, out: &mut BTreeSet<Sym>) {
        match self {
            STerm::Var(x) => {
                out.insert(x.clone());
            }
            STerm::Fo(_) | STerm::Unit | STerm::Nt(_) => {}
            STerm::Subst(a, _, b) | STerm::Pair(a, b) | STerm::App(a, b) => {
                a.all_var_names(out);
                b.all_var_names(out);
            }
            STerm::Proj(_, b) => b.all_var_names(out),
            STerm::Lam(x, _, b) => {
                out.insert(x.clone());
                b.all_var_names(out);
            }
        }
    }

    /// Capture-avoiding substitution of the typed variable `x` by `s`.
    pub fn subst_var(&self, x: &str, s: &STerm) -> STerm {
        let fv = s.free_vars();
        self.subst_var_in(x, s, &fv)
    }

    fn subst_var_in(&self, x: &str, s: &STerm, fv: &BTreeSet<Sym>) -> STerm {
        match self {
            STerm::Var(y) if &**y == x => s.clone(),
            STerm::Fo(_) | STerm::Unit | STerm::Nt(_) | STerm::Var(_) => self.clone(),
            STerm::Subst(a, al, b) => {
                STerm::Subst(Box::new(a.subst_var_in(x, s, fv)), al.clone(), Box::new(b.subst_var_in(x, s, fv)))
            }
            STerm::Pair(a, b) => STerm::pair(a.subst_var_in(x, s, fv), b.subst_var_in(x, s, fv)),
            STerm::App(a, b) => STerm::app(a.subst_var_in(x, s, fv), b.subst_var_in(x, s, fv)),
            STerm::Proj(i, b) => STerm::proj(*i, b.subst_var_in(x, s, fv)),
            STerm::Lam(y, ty, body) => {
                if &**y == x {
                    return self.clone();
                }
                if fv.contains(y) {
                    let mut avoid = fv.clone();
                    body.all_var_names(&mut avoid);
                    avoid.insert(sym(x));
                    let fresh = fresh_name(y, &avoid);
                    let renamed = body.subst_var_in(y, &STerm::Var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                    STerm::Lam(fresh, ty.clone(), Box::new(renamed.subst_var_in(x, s, fv)))
                } else {
                    STerm::Lam(y.clone(), ty.clone(), Box::new(body.subst_var_in(x, s, fv)))
                }
            }
        }
    }

    /// β-normal form, also reducing projections of pairs. Normal order.
    pub fn beta_reduce(&self) -> STerm {
        normalize(self, false)
    }

    /// β-normal form with explicit substitutions additionally distributed
    /// over pairs and discarded on `⟨⟩`. This is the normal form used
    /// between grammar rewrites.
    pub fn normalize(&self) -> STerm {
        normalize(self, true)
    }

    /// β-normal form computed innermost-first (arguments before redexes).
    pub fn beta_reduce_innermost(&self) -> STerm {
        match self {
            STerm::App(f, a) => {
                let f = f.beta_reduce_innermost();
                let a = a.beta_reduce_innermost();
                match f {
                    STerm::Lam(x, _, body) => body.subst_var(&x, &a).beta_reduce_innermost(),
                    f => STerm::app(f, a),
                }
            }
            STerm::Proj(i, x) => match x.beta_reduce_innermost() {
                STerm::Pair(a, b) => {
                    if *i == 0 {
                        *a
                    } else {
                        *b
                    }
                }
                x => STerm::proj(*i, x),
            },
            STerm::Subst(a, al, b) => {
                STerm::Subst(Box::new(a.beta_reduce_innermost()), al.clone(), Box::new(b.beta_reduce_innermost()))
            }
            STerm::Pair(a, b) => STerm::pair(a.beta_reduce_innermost(), b.beta_reduce_innermost()),
            STerm::Lam(x, ty, b) => STerm::Lam(x.clone(), ty.clone(), Box::new(b.beta_reduce_innermost())),
            _ => self.clone(),
        }
    }

    /// Evaluates all explicit substitutions of a closed, non-terminal-free
    /// sequence-term, yielding its first-order components (the `T*` map).
    pub fn evaluate_substitutions(&self) -> Result<Vec<FoTerm>> {
        match self {
            STerm::Unit => Ok(Vec::new()),
            STerm::Pair(a, b) => {
                let mut out = vec![a.evaluate_o()?];
                out.extend(b.evaluate_substitutions()?);
                Ok(out)
            }
            STerm::Subst(s, alpha, u) => {
                let inner = s.evaluate_substitutions()?;
                let u = u.evaluate_o()?;
                Ok(inner.into_iter().map(|t| t.subst_free(alpha, &u)).collect())
            }
            _ => Err(Error::NonGround(format!("not a sequence-term: {self}"))),
        }
    }

    /// Evaluates a closed, non-terminal-free term of type `o`.
    pub fn evaluate_o(&self) -> Result<FoTerm> {
        match self {
            STerm::Fo(t) => Ok(t.clone()),
            STerm::Subst(s, alpha, u) => {
                let s = s.evaluate_o()?;
                let u = u.evaluate_o()?;
                Ok(s.subst_free(alpha, &u))
            }
            _ => Err(Error::NonGround(format!("cannot evaluate {self} to a first-order term"))),
        }
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<Sym>) -> Sym {
    (1..).map(|k| sym(&format!("{base}'{k}"))).find(|n| !avoid.contains(n)).unwrap()
}

fn push_subst(s: STerm, alpha: &Sym, t: &STerm) -> STerm {
    match s {
        STerm::Unit => STerm::Unit,
        STerm::Pair(a, b) => STerm::pair(push_subst(*a, alpha, t), push_subst(*b, alpha, t)),
        s => STerm::Subst(Box::new(s), alpha.clone(), Box::new(t.clone())),
    }
}

fn normalize(t: &STerm, distribute: bool) -> STerm {
    match t {
        STerm::App(f, a) => match normalize(f, distribute) {
            STerm::Lam(x, _, body) => normalize(&body.subst_var(&x, a), distribute),
            f => STerm::app(f, normalize(a, distribute)),
        },
        STerm::Proj(i, x) => match normalize(x, distribute) {
            STerm::Pair(a, b) => {
                if *i == 0 {
                    *a
                } else {
                    *b
                }
            }
            x => STerm::proj(*i, x),
        },
        STerm::Subst(s, alpha, u) => {
            let s = normalize(s, distribute);
            let u = normalize(u, distribute);
            if distribute {
                push_subst(s, alpha, &u)
            } else {
                STerm::Subst(Box::new(s), alpha.clone(), Box::new(u))
            }
        }
        STerm::Pair(a, b) => STerm::pair(normalize(a, distribute), normalize(b, distribute)),
        STerm::Lam(x, ty, b) => STerm::Lam(x.clone(), ty.clone(), Box::new(normalize(b, distribute))),
        _ => t.clone(),
    }
}

/// Typing context: typed variables plus the types of non-terminals.
#[derive(Clone, Default)]
pub struct TypeCtx<'a> {
    vars: Vec<(Sym, SimpleType)>,
    nts: Option<&'a HashMap<NtId, SimpleType>>,
}

impl<'a> TypeCtx<'a> {
    pub fn new() -> Self {
        TypeCtx::default()
    }

    pub fn with_nts(nts: &'a HashMap<NtId, SimpleType>) -> Self {
        TypeCtx { vars: Vec::new(), nts: Some(nts) }
    }

    pub fn bind(mut self, x: &str, ty: SimpleType) -> Self {
        self.vars.push((sym(x), ty));
        self
    }

    fn lookup(&self, x: &str) -> Option<&SimpleType> {
        self.vars.iter().rev().find(|(y, _)| &**y == x).map(|(_, t)| t)
    }
}

/// The unique simple type of `t` in `ctx`.
pub fn type_of(t: &STerm, ctx: &TypeCtx<'_>) -> Result<SimpleType> {
    match t {
        STerm::Fo(x) => {
            if x.has_bound() {
                Err(Error::IllTyped(format!("first-order leaf {x} contains a bound variable")))
            } else {
                Ok(SimpleType::O)
            }
        }
        STerm::Unit => Ok(SimpleType::Unit),
        STerm::Subst(s, alpha, u) => {
            let st = type_of(s, ctx)?;
            if !st.is_ground_like() {
                return Err(Error::IllTyped(format!("substitution [{alpha} ↦ …] applied at type {st}")));
            }
            match type_of(u, ctx)? {
                SimpleType::O => Ok(st),
                ut => Err(Error::IllTyped(format!("substituted term has type {ut}, expected o"))),
            }
        }
        STerm::Pair(a, b) => Ok(SimpleType::pair(type_of(a, ctx)?, type_of(b, ctx)?)),
        STerm::Lam(x, ty, body) => {
            let inner = ctx.clone().bind(x, ty.clone());
            Ok(SimpleType::arrow(ty.clone(), type_of(body, &inner)?))
        }
        STerm::App(f, a) => match type_of(f, ctx)? {
            SimpleType::Arrow(dom, cod) => {
                let at = type_of(a, ctx)?;
                if at == *dom {
                    Ok(*cod)
                } else {
                    Err(Error::IllTyped(format!("argument {a} has type {at}, expected {dom}")))
                }
            }
            ft => Err(Error::IllTyped(format!("cannot apply {f} of type {ft}"))),
        },
        STerm::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| Error::IllTyped(format!("unbound variable {x}"))),
        STerm::Nt(n) => {
            ctx.nts.and_then(|m| m.get(n)).cloned().ok_or_else(|| Error::IllTyped(format!("unknown non-terminal {n}")))
        }
        STerm::Proj(i, x) => match type_of(x, ctx)? {
            SimpleType::Pair(a, b) => Ok(if *i == 0 { *a } else { *b }),
            xt => Err(Error::IllTyped(format!("projection from {xt}"))),
        },
    }
}

impl fmt::Display for STerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Sequence-terms print as ⟨a, b, …⟩.
        let mut items = Vec::new();
        let mut cur = self;
        while let STerm::Pair(a, b) = cur {
            items.push(&**a);
            cur = b;
        }
        if !items.is_empty() || matches!(self, STerm::Unit) {
            if matches!(cur, STerm::Unit) {
                f.write_str("⟨")?;
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                return f.write_str("⟩");
            }
            f.write_str("(")?;
            for x in items {
                write!(f, "{x} ⋆ ")?;
            }
            return write!(f, "{cur})");
        }
        match self {
            STerm::Fo(t) => write!(f, "{t}"),
            STerm::Subst(s, alpha, u) => write!(f, "{s}[{alpha}↦{u}]"),
            STerm::Lam(x, _, b) => write!(f, "(λ{x}. {b})"),
            STerm::App(..) => {
                let (head, args) = self.spine();
                write!(f, "({head}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            STerm::Var(x) => f.write_str(x),
            STerm::Nt(n) => write!(f, "{n}"),
            STerm::Proj(i, x) => write!(f, "p{i}({x})"),
            STerm::Pair(..) | STerm::Unit => unreachable!(),
        }
    }
}
