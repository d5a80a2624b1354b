use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Formula, Quant};
use crate::grammar::Language;
use crate::kernel::Proof;
use crate::term::FoTerm;

/// Truth tables are used up to this many distinct atoms; larger inputs go
/// through case splitting with early cut-off.
pub const TRUTH_TABLE_LIMIT: usize = 20;

/// A quantifier-free expansion: for each end formula, the instances that
/// replace it. An empty list stands for falsum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expansion(pub Vec<Vec<Formula>>);

impl Expansion {
    /// All instances, read as one disjunction.
    pub fn disjuncts(&self) -> Vec<Formula> {
        self.0.iter().flatten().cloned().collect()
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|d| match d.as_slice() {
                [] => "⊥".to_string(),
                many => many.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ∨ "),
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Instantiates the leading existential block of `f` with `terms`.
pub fn instantiate_block(f: &Formula, terms: &[FoTerm]) -> Result<Formula> {
    let mut cur = f.clone();
    for t in terms {
        match &cur {
            Formula::Quant(Quant::Ex, ..) => cur = cur.instantiate(t).expect("quantified"),
            _ => return Err(Error::NotSigma1(format!("{f} has fewer than {} existential quantifiers", terms.len()))),
        }
    }
    if !cur.is_quantifier_free() {
        return Err(Error::NotSigma1(format!("{f} instantiated with {} terms is still quantified", terms.len())));
    }
    Ok(cur)
}

/// The expansion of the end-sequent of `p` induced by `language`.
pub fn expansion_from(p: &Proof, language: &Language) -> Result<Expansion> {
    let mut out = vec![Vec::new(); p.conclusion.len()];
    for (i, terms) in language {
        let f = p
            .conclusion
            .0
            .get(*i)
            .ok_or_else(|| Error::InvalidProof(format!("language index {i} outside the end-sequent")))?;
        out[*i].push(instantiate_block(f, terms)?);
    }
    Ok(Expansion(out))
}

/// The expansion induced by the context-sensitive language of `p`.
pub fn expansion(p: &Proof) -> Result<Expansion> {
    let l = crate::grammar::language_of(p, crate::grammar::Mode::ContextSensitive)?;
    expansion_from(p, &l)
}

/// Ground atoms, identified by their printed form.
type Atom = (bool, String);

fn atom_key(f: &Formula) -> Option<Result<String>> {
    let (p, args) = match f {
        Formula::Atom(p, a) | Formula::NegAtom(p, a) => (p, a),
        _ => return None,
    };
    if let Some(t) = args.iter().find(|t| !t.is_ground()) {
        return Some(Err(Error::NonGround(format!("atom {p} has non-ground argument {t}"))));
    }
    Some(Ok(Formula::Atom(p.clone(), args.clone()).to_string()))
}

fn atoms_into(f: &Formula, out: &mut BTreeSet<String>) -> Result<()> {
    match f {
        Formula::Or(a, b) | Formula::And(a, b) => {
            atoms_into(a, out)?;
            atoms_into(b, out)
        }
        Formula::Quant(..) => Err(Error::NotSigma1(format!("quantified formula {f} in a tautology check"))),
        _ => {
            out.insert(atom_key(f).expect("literal")?);
            Ok(())
        }
    }
}

/// Three-valued evaluation under a partial assignment.
fn eval(f: &Formula, v: &BTreeMap<String, bool>) -> Option<bool> {
    match f {
        Formula::Atom(..) | Formula::NegAtom(..) => {
            let key = atom_key(f).expect("literal").expect("checked ground");
            let neg: Atom = (matches!(f, Formula::NegAtom(..)), key);
            v.get(&neg.1).map(|&b| b != neg.0)
        }
        Formula::Or(a, b) => match (eval(a, v), eval(b, v)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        Formula::And(a, b) => match (eval(a, v), eval(b, v)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Formula::Quant(..) => None,
    }
}

fn eval_all(fs: &[Formula], v: &BTreeMap<String, bool>) -> Option<bool> {
    let mut unknown = false;
    for f in fs {
        match eval(f, v) {
            Some(true) => return Some(true),
            None => unknown = true,
            Some(false) => {}
        }
    }
    (!unknown).then_some(false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tautology {
    pub valid: bool,
    /// An assignment falsifying every formula, when there is one.
    pub countermodel: Option<BTreeMap<String, bool>>,
    pub atoms: usize,
}

/// Decides whether the disjunction of `formulas` is propositionally valid.
pub fn is_tautology(formulas: &[Formula]) -> Result<Tautology> {
    let mut atoms = BTreeSet::new();
    for f in formulas {
        atoms_into(f, &mut atoms)?;
    }
    let atoms: Vec<String> = atoms.into_iter().collect();
    let countermodel = if atoms.len() <= TRUTH_TABLE_LIMIT {
        truth_table(formulas, &atoms)
    } else {
        split(formulas, &atoms, &mut BTreeMap::new())
    };
    Ok(Tautology { valid: countermodel.is_none(), countermodel, atoms: atoms.len() })
}

fn truth_table(fs: &[Formula], atoms: &[String]) -> Option<BTreeMap<String, bool>> {
    (0u64..1 << atoms.len()).find_map(|bits| {
        let v: BTreeMap<String, bool> =
            atoms.iter().enumerate().map(|(k, a)| (a.clone(), bits >> k & 1 == 1)).collect();
        (eval_all(fs, &v) == Some(false)).then_some(v)
    })
}

fn split(fs: &[Formula], atoms: &[String], v: &mut BTreeMap<String, bool>) -> Option<BTreeMap<String, bool>> {
    match eval_all(fs, v) {
        Some(true) => return None,
        Some(false) => return Some(v.clone()),
        None => {}
    }
    let a = atoms.iter().find(|a| !v.contains_key(*a))?.clone();
    for b in [false, true] {
        v.insert(a.clone(), b);
        if let Some(m) = split(fs, atoms, v) {
            v.remove(&a);
            return Some(m);
        }
    }
    v.remove(&a);
    None
}
