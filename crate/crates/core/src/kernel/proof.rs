use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Quant, Sequent};
use crate::term::{FoTerm, Sym};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleTag {
    Axiom,
    Or,
    And,
    All,
    Ex,
    Cut,
    Weak,
    Contr,
    Perm,
}

impl RuleTag {
    pub fn arity(self) -> usize {
        match self {
            RuleTag::Axiom => 0,
            RuleTag::And | RuleTag::Cut => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleTag::Axiom => "axiom",
            RuleTag::Or => "or",
            RuleTag::And => "and",
            RuleTag::All => "all",
            RuleTag::Ex => "ex",
            RuleTag::Cut => "cut",
            RuleTag::Weak => "weak",
            RuleTag::Contr => "contr",
            RuleTag::Perm => "perm",
        })
    }
}

/// An inference together with its payload. The principal formula of every
/// logical and structural rule sits at position 0 of the conclusion;
/// permutation is the only rule that moves formulas around.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom,
    Or,
    And,
    /// Universal introduction with its eigenvariable.
    All(Sym),
    /// Existential introduction with its witness.
    Ex(FoTerm),
    Cut,
    /// Weakening; the introduced formula is `conclusion[0]`.
    Weak,
    Contr,
    /// Swaps positions `i` and `i + 1`.
    Perm(usize),
}

impl Rule {
    pub fn tag(&self) -> RuleTag {
        match self {
            Rule::Axiom => RuleTag::Axiom,
            Rule::Or => RuleTag::Or,
            Rule::And => RuleTag::And,
            Rule::All(_) => RuleTag::All,
            Rule::Ex(_) => RuleTag::Ex,
            Rule::Cut => RuleTag::Cut,
            Rule::Weak => RuleTag::Weak,
            Rule::Contr => RuleTag::Contr,
            Rule::Perm(_) => RuleTag::Perm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Proof {
    pub id: NodeId,
    pub rule: Rule,
    pub premises: Vec<Arc<Proof>>,
    pub conclusion: Sequent,
}

/// Hands out node ids that are fresh for a given proof.
#[derive(Clone, Debug)]
pub struct IdGen {
    next: NodeId,
}

impl IdGen {
    pub fn new() -> Self {
        IdGen { next: 0 }
    }

    pub fn after(p: &Proof) -> Self {
        IdGen { next: p.max_id() + 1 }
    }

    pub fn fresh(&mut self) -> NodeId {
        let id = self.next;
        self.next += 1;
        id
    }
}

impl Default for IdGen {
    fn default() -> Self {
        IdGen::new()
    }
}

fn mismatch(msg: impl Into<String>) -> Error {
    Error::InvalidProof(msg.into())
}

impl Proof {
    pub fn axiom(ids: &mut IdGen, literal: Formula) -> Result<Proof> {
        if !literal.is_literal() {
            return Err(mismatch(format!("axiom on non-atomic formula {literal}")));
        }
        let dual = literal.dual();
        Ok(Proof::node(ids, Rule::Axiom, vec![], vec![literal, dual]))
    }

    pub fn or(ids: &mut IdGen, p: Arc<Proof>) -> Result<Proof> {
        let fs = p.conclusion.formulas();
        if fs.len() < 2 {
            return Err(mismatch("or-intro needs two formulas in its premise"));
        }
        let mut out = vec![Formula::or(fs[0].clone(), fs[1].clone())];
        out.extend_from_slice(&fs[2..]);
        Ok(Proof::node(ids, Rule::Or, vec![p], out))
    }

    pub fn and(ids: &mut IdGen, p0: Arc<Proof>, p1: Arc<Proof>) -> Result<Proof> {
        let (a, b) = (p0.conclusion.formulas(), p1.conclusion.formulas());
        if a.is_empty() || b.is_empty() {
            return Err(mismatch("and-intro premise with empty sequent"));
        }
        let mut out = vec![Formula::and(a[0].clone(), b[0].clone())];
        out.extend_from_slice(&a[1..]);
        out.extend_from_slice(&b[1..]);
        Ok(Proof::node(ids, Rule::And, vec![p0, p1], out))
    }

    /// Universal introduction on position 0, abstracting the eigenvariable.
    pub fn all(ids: &mut IdGen, eigen: Sym, principal: Option<Formula>, p: Arc<Proof>) -> Result<Proof> {
        let fs = p.conclusion.formulas();
        let first = fs.first().ok_or_else(|| mismatch("all-intro premise with empty sequent"))?;
        let principal = match principal {
            Some(f) => f,
            None => first.abstract_over(Quant::All, &FoTerm::Free(eigen.clone())),
        };
        let mut out = vec![principal];
        out.extend_from_slice(&fs[1..]);
        Ok(Proof::node(ids, Rule::All(eigen), vec![p], out))
    }

    /// Existential introduction on position 0. Without an explicit principal
    /// formula every occurrence of the witness is abstracted.
    pub fn ex(ids: &mut IdGen, witness: FoTerm, principal: Option<Formula>, p: Arc<Proof>) -> Result<Proof> {
        let fs = p.conclusion.formulas();
        let first = fs.first().ok_or_else(|| mismatch("ex-intro premise with empty sequent"))?;
        let principal = match principal {
            Some(f) => f,
            None => first.abstract_over(Quant::Ex, &witness),
        };
        let mut out = vec![principal];
        out.extend_from_slice(&fs[1..]);
        Ok(Proof::node(ids, Rule::Ex(witness), vec![p], out))
    }

    pub fn cut(ids: &mut IdGen, p0: Arc<Proof>, p1: Arc<Proof>) -> Result<Proof> {
        let (a, b) = (p0.conclusion.formulas(), p1.conclusion.formulas());
        if a.is_empty() || b.is_empty() {
            return Err(mismatch("cut premise with empty sequent"));
        }
        let mut out = a[1..].to_vec();
        out.extend_from_slice(&b[1..]);
        Ok(Proof::node(ids, Rule::Cut, vec![p0, p1], out))
    }

    pub fn weak(ids: &mut IdGen, formula: Formula, p: Arc<Proof>) -> Result<Proof> {
        let mut out = vec![formula];
        out.extend_from_slice(p.conclusion.formulas());
        Ok(Proof::node(ids, Rule::Weak, vec![p], out))
    }

    pub fn contr(ids: &mut IdGen, p: Arc<Proof>) -> Result<Proof> {
        let fs = p.conclusion.formulas();
        if fs.len() < 2 {
            return Err(mismatch("contraction needs two formulas in its premise"));
        }
        let out = fs[1..].to_vec();
        Ok(Proof::node(ids, Rule::Contr, vec![p], out))
    }

    pub fn perm(ids: &mut IdGen, i: usize, p: Arc<Proof>) -> Result<Proof> {
        let mut out = p.conclusion.formulas().to_vec();
        if i + 1 >= out.len() {
            return Err(mismatch(format!("permutation at {i} in a sequent of length {}", out.len())));
        }
        out.swap(i, i + 1);
        Ok(Proof::node(ids, Rule::Perm(i), vec![p], out))
    }

    fn node(ids: &mut IdGen, rule: Rule, premises: Vec<Arc<Proof>>, conclusion: Vec<Formula>) -> Proof {
        Proof { id: ids.fresh(), rule, premises, conclusion: Sequent(conclusion) }
    }

    pub fn premise(&self, k: usize) -> &Proof {
        &self.premises[k]
    }

    /// Immediate ancestors of conclusion position `j`, as
    /// `(premise, position)` pairs.
    pub fn ancestors(&self, j: usize) -> Vec<(usize, usize)> {
        let split = |k: usize| self.premises[k].conclusion.len() - 1;
        match &self.rule {
            Rule::Axiom => vec![],
            Rule::Or | Rule::Contr if j == 0 => vec![(0, 0), (0, 1)],
            Rule::Or | Rule::Contr => vec![(0, j + 1)],
            Rule::And if j == 0 => vec![(0, 0), (1, 0)],
            Rule::And if j <= split(0) => vec![(0, j)],
            Rule::And => vec![(1, j - split(0))],
            Rule::All(_) | Rule::Ex(_) => vec![(0, j)],
            Rule::Cut if j < split(0) => vec![(0, j + 1)],
            Rule::Cut => vec![(1, j - split(0) + 1)],
            Rule::Weak if j == 0 => vec![],
            Rule::Weak => vec![(0, j - 1)],
            Rule::Perm(i) if j == *i => vec![(0, i + 1)],
            Rule::Perm(i) if j == i + 1 => vec![(0, *i)],
            Rule::Perm(_) => vec![(0, j)],
        }
    }

    /// Preorder enumeration: node, then left subtree, then right subtree.
    pub fn subproofs(&self) -> Vec<&Proof> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            out.push(p);
            for q in p.premises.iter().rev() {
                stack.push(q);
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn max_id(&self) -> NodeId {
        self.subproofs().iter().map(|p| p.id).max().unwrap_or(0)
    }

    pub fn cut_count(&self) -> usize {
        self.subproofs().iter().filter(|p| p.rule == Rule::Cut).count()
    }

    pub fn is_cut_free(&self) -> bool {
        self.cut_count() == 0
    }

    /// The node reached by following child indices from the root.
    pub fn at_path(&self, path: &[usize]) -> Option<&Proof> {
        let mut cur = self;
        for &k in path {
            cur = cur.premises.get(k)?;
        }
        Some(cur)
    }

    /// Rebuilds the spine above `path` with `new` in place of the addressed node.
    pub fn replace_at(&self, path: &[usize], new: Proof) -> Proof {
        match path.split_first() {
            None => new,
            Some((&k, rest)) => {
                let mut out = self.clone();
                out.premises[k] = Arc::new(self.premises[k].replace_at(rest, new));
                out
            }
        }
    }

    /// Copy with ids reassigned in preorder starting from 0.
    pub fn renumbered(&self) -> Proof {
        fn go(p: &Proof, next: &mut NodeId) -> Proof {
            let id = *next;
            *next += 1;
            let premises = p.premises.iter().map(|q| Arc::new(go(q, next))).collect();
            Proof { id, rule: p.rule.clone(), premises, conclusion: p.conclusion.clone() }
        }
        go(self, &mut 0)
    }

    /// Copy with ids reassigned from `ids`, in preorder.
    pub fn with_fresh_ids(&self, ids: &mut IdGen) -> Proof {
        let id = ids.fresh();
        let premises = self.premises.iter().map(|q| Arc::new(q.with_fresh_ids(ids))).collect();
        Proof { id, rule: self.rule.clone(), premises, conclusion: self.conclusion.clone() }
    }

    /// Structural equality ignoring node ids.
    pub fn same_shape(&self, other: &Proof) -> bool {
        self.rule == other.rule
            && self.conclusion == other.conclusion
            && self.premises.len() == other.premises.len()
            && self.premises.iter().zip(&other.premises).all(|(a, b)| a.same_shape(b))
    }

    /// Substitutes the free variable `var` by `t` throughout the proof,
    /// assigning fresh ids to every rebuilt node.
    pub fn subst_free(&self, var: &str, t: &FoTerm, ids: &mut IdGen) -> Proof {
        let rule = match &self.rule {
            Rule::Ex(w) => Rule::Ex(w.subst_free(var, t)),
            r => r.clone(),
        };
        let premises = self.premises.iter().map(|q| Arc::new(q.subst_free(var, t, ids))).collect();
        let conclusion = Sequent(self.conclusion.0.iter().map(|f| f.subst_free(var, t)).collect());
        Proof { id: ids.fresh(), rule, premises, conclusion }
    }

    /// Renames an eigenvariable below and including this node, stopping at
    /// universal inferences that re-introduce the same name.
    pub(crate) fn rename_free(&self, var: &str, to: &Sym) -> Proof {
        let t = FoTerm::Free(to.clone());
        let rule = match &self.rule {
            Rule::Ex(w) => Rule::Ex(w.subst_free(var, &t)),
            r => r.clone(),
        };
        let premises = match &self.rule {
            Rule::All(a) if &**a == var => self.premises.clone(),
            _ => self.premises.iter().map(|q| Arc::new(q.rename_free(var, to))).collect(),
        };
        let conclusion = Sequent(self.conclusion.0.iter().map(|f| f.subst_free(var, &t)).collect());
        Proof { id: self.id, rule, premises, conclusion }
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(p: &Proof, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let payload = match &p.rule {
                Rule::All(a) => format!(" {a}"),
                Rule::Ex(t) => format!(" {t}"),
                Rule::Perm(i) => format!(" {i}"),
                _ => String::new(),
            };
            writeln!(f, "{:indent$}[{}] {}{} ⊢ {}", "", p.id, p.rule.tag(), payload, p.conclusion, indent = depth * 2)?;
            for q in &p.premises {
                go(q, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}
