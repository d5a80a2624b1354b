//! First-order terms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::sexp::Sexp;

/// Interned-ish symbol. Cheap to clone and safe to share across threads.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// The reserved nullary symbol used by the weakening production.
pub const WEAKENING_CONSTANT: &str = "wc";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoTerm {
    /// Free variable (eigenvariable or parameter), written α, β.
    Free(Sym),
    /// Variable bound by an enclosing quantifier, written v, w.
    Bound(Sym),
    Const(Sym),
    App(Sym, Vec<FoTerm>),
}

impl FoTerm {
    pub fn free(name: &str) -> FoTerm {
        FoTerm::Free(sym(name))
    }

    pub fn bound(name: &str) -> FoTerm {
        FoTerm::Bound(sym(name))
    }

    pub fn constant(name: &str) -> FoTerm {
        FoTerm::Const(sym(name))
    }

    pub fn app(f: &str, args: Vec<FoTerm>) -> FoTerm {
        FoTerm::App(sym(f), args)
    }

    pub fn weakening_constant() -> FoTerm {
        FoTerm::constant(WEAKENING_CONSTANT)
    }

    /// Replaces the free variable `var` by `by` everywhere.
    pub fn subst_free(&self, var: &str, by: &FoTerm) -> FoTerm {
        match self {
            FoTerm::Free(x) if &**x == var => by.clone(),
            FoTerm::App(f, args) => FoTerm::App(f.clone(), args.iter().map(|a| a.subst_free(var, by)).collect()),
            _ => self.clone(),
        }
    }

    /// Replaces the bound variable `var` by `by` everywhere.
    pub fn subst_bound(&self, var: &str, by: &FoTerm) -> FoTerm {
        match self {
            FoTerm::Bound(x) if &**x == var => by.clone(),
            FoTerm::App(f, args) => FoTerm::App(f.clone(), args.iter().map(|a| a.subst_bound(var, by)).collect()),
            _ => self.clone(),
        }
    }

    /// Replaces every occurrence of the subterm `pat` by the bound variable `var`.
    pub fn abstract_term(&self, pat: &FoTerm, var: &str) -> FoTerm {
        if self == pat {
            return FoTerm::Bound(sym(var));
        }
        match self {
            FoTerm::App(f, args) => FoTerm::App(f.clone(), args.iter().map(|a| a.abstract_term(pat, var)).collect()),
            _ => self.clone(),
        }
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Sym>) {
        match self {
            FoTerm::Free(x) => {
                out.insert(x.clone());
            }
            FoTerm::App(_, args) => args.iter().for_each(|a| a.free_vars_into(out)),
            _ => {}
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn has_bound(&self) -> bool {
        match self {
            FoTerm::Bound(_) => true,
            FoTerm::App(_, args) => args.iter().any(FoTerm::has_bound),
            _ => false,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            FoTerm::Free(_) | FoTerm::Bound(_) => false,
            FoTerm::Const(_) => true,
            FoTerm::App(_, args) => args.iter().all(FoTerm::is_ground),
        }
    }

    pub fn contains(&self, sub: &FoTerm) -> bool {
        self == sub
            || match self {
                FoTerm::App(_, args) => args.iter().any(|a| a.contains(sub)),
                _ => false,
            }
    }

    pub fn size(&self) -> usize {
        match self {
            FoTerm::App(_, args) => 1 + args.iter().map(FoTerm::size).sum::<usize>(),
            _ => 1,
        }
    }

    /// Function symbols with their arities, constants counted with arity 0.
    pub fn symbols_into(&self, out: &mut Vec<(Sym, usize)>) {
        match self {
            FoTerm::Const(c) => out.push((c.clone(), 0)),
            FoTerm::App(f, args) => {
                out.push((f.clone(), args.len()));
                args.iter().for_each(|a| a.symbols_into(out));
            }
            _ => {}
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        match self {
            FoTerm::Free(x) | FoTerm::Bound(x) | FoTerm::Const(x) => Sexp::atom(&**x),
            FoTerm::App(f, args) => {
                let mut items = vec![Sexp::atom("fn"), Sexp::atom(&**f)];
                items.extend(args.iter().map(FoTerm::to_sexp));
                Sexp::List(items)
            }
        }
    }
}

impl fmt::Display for FoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoTerm::Free(x) | FoTerm::Bound(x) | FoTerm::Const(x) => f.write_str(x),
            FoTerm::App(g, args) => {
                write!(f, "{g}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl serde::Serialize for FoTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
