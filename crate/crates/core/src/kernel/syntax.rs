//! Surface syntax: signatures, terms, formulas and problem files.
//!
//! A problem file looks like
//!
//! ```text
//! (problem e1
//!   (signature (fn c 0) (pred P 1))
//!   (proof (ex-intro c (ax (atom P c))))
//!   (end-sequent (ex v (atom P v)) (neg (atom P c))))
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, ParseError, Result};
use crate::formula::{Formula, Sequent};
use crate::sexp::{self, Sexp};
use crate::term::{sym, FoTerm, Sym, WEAKENING_CONSTANT};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub functions: BTreeMap<Sym, usize>,
    pub predicates: BTreeMap<Sym, usize>,
}

fn sig_err(msg: impl Into<String>) -> Error {
    Error::Signature(msg.into())
}

fn syntax(msg: impl Into<String>) -> Error {
    Error::Parse(ParseError::new(msg))
}

fn atom_of<'a>(s: &'a Sexp, what: &str) -> Result<&'a str> {
    s.as_atom().ok_or_else(|| syntax(format!("expected {what}, found {s}")))
}

fn nat_of(s: &Sexp, what: &str) -> Result<usize> {
    atom_of(s, what)?.parse().map_err(|_| syntax(format!("expected {what} (a natural number), found {s}")))
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_function(mut self, f: &str, arity: usize) -> Result<Self> {
        self.declare(f, arity, true)?;
        Ok(self)
    }

    pub fn with_predicate(mut self, p: &str, arity: usize) -> Result<Self> {
        self.declare(p, arity, false)?;
        Ok(self)
    }

    fn declare(&mut self, name: &str, arity: usize, function: bool) -> Result<()> {
        if name == WEAKENING_CONSTANT {
            return Err(sig_err(format!("symbol {WEAKENING_CONSTANT} is reserved")));
        }
        let (table, kind) =
            if function { (&mut self.functions, "function") } else { (&mut self.predicates, "predicate") };
        if let Some(&old) = table.get(name) {
            if old != arity {
                return Err(sig_err(format!("{kind} {name} declared with arities {old} and {arity}")));
            }
        }
        table.insert(sym(name), arity);
        Ok(())
    }

    /// Parses `(signature (fn f n) (pred P n) ...)`.
    pub fn from_sexp(s: &Sexp) -> Result<Signature> {
        let items = s
            .as_list()
            .filter(|_| s.head() == Some("signature"))
            .ok_or_else(|| syntax(format!("expected (signature ...), found {s}")))?;
        let mut sig = Signature::new();
        for d in &items[1..] {
            let parts = d.as_list().ok_or_else(|| syntax(format!("bad declaration {d}")))?;
            match (d.head(), parts.len()) {
                (Some("fn"), 3) => sig.declare(atom_of(&parts[1], "symbol")?, nat_of(&parts[2], "arity")?, true)?,
                (Some("pred"), 3) => sig.declare(atom_of(&parts[1], "symbol")?, nat_of(&parts[2], "arity")?, false)?,
                _ => return Err(syntax(format!("bad declaration {d}"))),
            }
        }
        Ok(sig)
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![Sexp::atom("signature")];
        for (f, n) in &self.functions {
            items.push(Sexp::list([Sexp::atom("fn"), Sexp::atom(&**f), Sexp::atom(n.to_string())]));
        }
        for (p, n) in &self.predicates {
            items.push(Sexp::list([Sexp::atom("pred"), Sexp::atom(&**p), Sexp::atom(n.to_string())]));
        }
        Sexp::List(items)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        name == WEAKENING_CONSTANT || self.functions.get(name) == Some(&0)
    }

    /// `None` if `f` applied to `arity` arguments is allowed.
    pub fn check_function(&self, f: &str, arity: usize) -> Option<String> {
        if f == WEAKENING_CONSTANT {
            return (arity != 0).then(|| format!("{WEAKENING_CONSTANT} is a constant"));
        }
        match self.functions.get(f) {
            None => Some(format!("undeclared function symbol {f}")),
            Some(&n) if n != arity => Some(format!("function {f} has arity {n}, used with {arity}")),
            _ => None,
        }
    }

    pub fn check_predicate(&self, p: &str, arity: usize) -> Option<String> {
        match self.predicates.get(p) {
            None => Some(format!("undeclared predicate symbol {p}")),
            Some(&n) if n != arity => Some(format!("predicate {p} has arity {n}, used with {arity}")),
            _ => None,
        }
    }

    /// Parses a term. Symbols bound in `scope` become bound variables,
    /// declared constants become constants, anything else is free.
    pub fn term(&self, s: &Sexp, scope: &[Sym]) -> Result<FoTerm> {
        match s {
            Sexp::Atom(a) => {
                if scope.iter().any(|v| &**v == a) {
                    Ok(FoTerm::Bound(sym(a)))
                } else if self.is_constant(a) {
                    Ok(FoTerm::Const(sym(a)))
                } else if self.functions.contains_key(a.as_str()) {
                    Err(sig_err(format!("function {a} used as a constant")))
                } else if a.parse::<i64>().is_ok() {
                    Err(syntax(format!("numeral {a} is not a term")))
                } else {
                    Ok(FoTerm::Free(sym(a)))
                }
            }
            Sexp::List(items) if s.head() == Some("fn") && items.len() >= 2 => {
                let f = atom_of(&items[1], "function symbol")?;
                let args = items[2..].iter().map(|a| self.term(a, scope)).collect::<Result<Vec<_>>>()?;
                if args.is_empty() {
                    return if self.is_constant(f) {
                        Ok(FoTerm::Const(sym(f)))
                    } else {
                        Err(sig_err(format!("undeclared constant {f}")))
                    };
                }
                if let Some(e) = self.check_function(f, args.len()) {
                    return Err(sig_err(e));
                }
                Ok(FoTerm::App(sym(f), args))
            }
            _ => Err(syntax(format!("expected a term, found {s}"))),
        }
    }

    pub fn formula(&self, s: &Sexp) -> Result<Formula> {
        self.formula_in(s, &mut Vec::new())
    }

    fn formula_in(&self, s: &Sexp, scope: &mut Vec<Sym>) -> Result<Formula> {
        let items = s.as_list().ok_or_else(|| syntax(format!("expected a formula, found {s}")))?;
        match (s.head(), items.len()) {
            (Some("atom"), n) if n >= 2 => {
                let p = atom_of(&items[1], "predicate symbol")?;
                let args = items[2..].iter().map(|a| self.term(a, scope)).collect::<Result<Vec<_>>>()?;
                if let Some(e) = self.check_predicate(p, args.len()) {
                    return Err(sig_err(e));
                }
                Ok(Formula::Atom(sym(p), args))
            }
            (Some("neg"), 2) => match self.formula_in(&items[1], scope)? {
                Formula::Atom(p, a) => Ok(Formula::NegAtom(p, a)),
                _ => Err(syntax(format!("negation applies to atoms only: {s}"))),
            },
            (Some("or"), 3) => Ok(Formula::or(self.formula_in(&items[1], scope)?, self.formula_in(&items[2], scope)?)),
            (Some("and"), 3) => {
                Ok(Formula::and(self.formula_in(&items[1], scope)?, self.formula_in(&items[2], scope)?))
            }
            (Some(q @ ("all" | "ex")), 3) => {
                let v = atom_of(&items[1], "variable")?;
                if self.functions.contains_key(v) || v == WEAKENING_CONSTANT {
                    return Err(sig_err(format!("cannot bind function symbol {v}")));
                }
                scope.push(sym(v));
                let body = self.formula_in(&items[2], scope);
                scope.pop();
                Ok(if q == "all" { Formula::all(v, body?) } else { Formula::ex(v, body?) })
            }
            _ => Err(syntax(format!("malformed formula {s}"))),
        }
    }

    pub fn parse_formula(&self, src: &str) -> Result<Formula> {
        self.formula(&sexp::parse_one(src)?)
    }

    pub fn parse_term(&self, src: &str) -> Result<FoTerm> {
        self.term(&sexp::parse_one(src)?, &[])
    }
}

/// A parsed but not yet elaborated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub signature: Signature,
    pub proof: Sexp,
    pub end_sequent: Option<Sequent>,
}

impl Problem {
    pub fn parse(src: &str) -> Result<Problem> {
        Problem::from_sexp(&sexp::parse_one(src)?)
    }

    pub fn from_sexp(s: &Sexp) -> Result<Problem> {
        let items =
            s.as_list().filter(|_| s.head() == Some("problem")).ok_or_else(|| syntax("expected (problem NAME ...)"))?;
        let name = items.get(1).ok_or_else(|| syntax("problem without a name"))?;
        let name = atom_of(name, "problem name")?.to_string();
        let mut signature = None;
        let mut proof = None;
        let mut end = None;
        for part in &items[2..] {
            match part.head() {
                Some("signature") if signature.is_none() => signature = Some(Signature::from_sexp(part)?),
                Some("proof") if proof.is_none() => {
                    let p = part.as_list().unwrap();
                    if p.len() != 2 {
                        return Err(syntax("(proof ...) takes exactly one proof"));
                    }
                    proof = Some(p[1].clone());
                }
                Some("end-sequent") if end.is_none() => end = Some(part.clone()),
                _ => return Err(syntax(format!("unexpected or repeated section {part}"))),
            }
        }
        let signature = signature.ok_or_else(|| syntax("problem without a signature"))?;
        let proof = proof.ok_or_else(|| syntax("problem without a proof"))?;
        let end_sequent = match end {
            Some(e) => {
                let fs = e.as_list().unwrap()[1..].iter().map(|f| signature.formula(f)).collect::<Result<Vec<_>>>()?;
                Some(Sequent(fs))
            }
            None => None,
        };
        Ok(Problem { name, signature, proof, end_sequent })
    }
}

pub fn sequent_to_sexp(s: &Sequent) -> Sexp {
    let mut items = vec![Sexp::atom("end-sequent")];
    items.extend(s.0.iter().map(Formula::to_sexp));
    Sexp::List(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with_function("c", 0)
            .and_then(|s| s.with_function("f", 1))
            .and_then(|s| s.with_predicate("P", 1))
            .unwrap()
    }

    #[test]
    fn symbols_resolve_by_scope_and_declaration() {
        let s = sig();
        let f = s.parse_formula("(all v (atom P (fn f v)))").unwrap();
        assert_eq!(f, Formula::all("v", Formula::atom("P", vec![FoTerm::app("f", vec![FoTerm::bound("v")])])));
        assert_eq!(s.parse_term("c").unwrap(), FoTerm::constant("c"));
        assert_eq!(s.parse_term("alpha").unwrap(), FoTerm::free("alpha"));
        assert_eq!(s.parse_term("wc").unwrap(), FoTerm::weakening_constant());
    }

    #[test]
    fn signature_errors() {
        let s = sig();
        assert!(matches!(s.parse_term("(fn g c)"), Err(Error::Signature(_))));
        assert!(matches!(s.parse_term("(fn f c c)"), Err(Error::Signature(_))));
        assert!(matches!(s.parse_formula("(atom Q c)"), Err(Error::Signature(_))));
        assert!(matches!(Signature::new().with_function("wc", 0), Err(Error::Signature(_))));
    }

    #[test]
    fn negation_only_on_atoms() {
        assert!(sig().parse_formula("(neg (or (atom P c) (atom P c)))").is_err());
    }

    #[test]
    fn problem_sections() {
        let p = Problem::parse(
            "(problem e1 (signature (fn c 0) (pred P 1)) (proof (ex-intro c (ax (atom P c))))
               (end-sequent (ex v (atom P v)) (neg (atom P c))))",
        )
        .unwrap();
        assert_eq!(p.name, "e1");
        assert_eq!(p.end_sequent.unwrap().len(), 2);
        assert_eq!(Signature::from_sexp(&p.signature.to_sexp()).unwrap(), p.signature);
    }
}
