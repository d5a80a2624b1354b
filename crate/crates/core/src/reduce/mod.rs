//! One-step cut reductions on prenex Π₂/Σ₂ cuts.
//!
//! A redex is addressed by the path of its cut node, a kind, and the premise
//! side it was found on. Premises are read through blocks of permutation
//! inferences, so a cut whose premise ends in `perm(perm(∃ …))` still offers
//! a quantifier redex. Every reduction rebuilds the affected region and then
//! permutes the result back into the original conclusion order, tracking
//! formula occurrences rather than formulas, so equal formulas never trade
//! places.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{bring_to_front, permute, regularize, IdGen, Proof, Rule};

mod herbrand;
mod strategy;

pub use herbrand::herbrand_set;
pub use strategy::{eliminate_cuts, select_redex, Elimination, Interrupted, Skipped, Strategy, TraceStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedexKind {
    Axiom,
    Boolean,
    Quantifier,
    Weakening,
    Contraction,
    UnaryPerm,
    BinaryPerm,
}

impl RedexKind {
    /// Tie-break rank; smaller is preferred.
    pub fn priority(self) -> u8 {
        match self {
            RedexKind::Axiom => 0,
            RedexKind::Weakening => 1,
            RedexKind::Quantifier => 2,
            RedexKind::Boolean => 3,
            RedexKind::UnaryPerm => 4,
            RedexKind::BinaryPerm => 5,
            RedexKind::Contraction => 6,
        }
    }
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexKind::Axiom => "axiom",
            RedexKind::Boolean => "boolean",
            RedexKind::Quantifier => "quantifier",
            RedexKind::Weakening => "weakening",
            RedexKind::Contraction => "contraction",
            RedexKind::UnaryPerm => "unary-perm",
            RedexKind::BinaryPerm => "binary-perm",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Redex {
    /// Premise indices from the root to the cut node.
    pub path: Vec<usize>,
    pub kind: RedexKind,
    /// The premise whose last inference is reduced. Quantifier and boolean
    /// redexes name the universal and conjunctive side respectively.
    pub side: Side,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|k| k.to_string()).collect();
        write!(f, "{} {} at [{}]", self.kind, self.side, path.join("."))
    }
}

/// Follows permutations upward from `p`, tracking position `k`. Returns the
/// first non-permutation inference and the position of the tracked formula
/// in its conclusion.
pub fn look_through(p: &Proof, k: usize) -> (&Proof, usize) {
    let (mut cur, mut k) = (p, k);
    while let Rule::Perm(_) = cur.rule {
        k = cur.ancestors(k)[0].1;
        cur = &cur.premises[0];
    }
    (cur, k)
}

/// The redexes a single cut node offers, left side first.
pub fn cut_redexes(cut: &Proof, path: &[usize]) -> Vec<Redex> {
    debug_assert_eq!(cut.rule, Rule::Cut);
    let eff = [look_through(&cut.premises[0], 0), look_through(&cut.premises[1], 0)];
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let (n, k) = eff[side.index()];
        let (o, ko) = eff[side.other().index()];
        let kind = match (&n.rule, k) {
            (Rule::Axiom, _) => Some(RedexKind::Axiom),
            (Rule::Weak, 0) => Some(RedexKind::Weakening),
            (Rule::Contr, 0) => Some(RedexKind::Contraction),
            (Rule::All(_), 0) => matches!((&o.rule, ko), (Rule::Ex(_), 0)).then_some(RedexKind::Quantifier),
            (Rule::And, 0) => matches!((&o.rule, ko), (Rule::Or, 0)).then_some(RedexKind::Boolean),
            (Rule::Ex(_) | Rule::Or, 0) => None,
            (Rule::And | Rule::Cut, _) => Some(RedexKind::BinaryPerm),
            _ => Some(RedexKind::UnaryPerm),
        };
        if let Some(kind) = kind {
            out.push(Redex { path: path.to_vec(), kind, side });
        }
    }
    out
}

/// Paths of all cut nodes in preorder.
pub fn cut_paths(p: &Proof) -> Vec<Vec<usize>> {
    fn go(p: &Proof, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.rule == Rule::Cut {
            out.push(path.clone());
        }
        for (k, q) in p.premises.iter().enumerate() {
            path.push(k);
            go(q, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut out);
    out
}

/// Every applicable reduction, in preorder of cut nodes, left side first.
pub fn applicable_reductions(p: &Proof) -> Vec<Redex> {
    cut_paths(p).into_iter().flat_map(|path| cut_redexes(p.at_path(&path).expect("cut path"), &path)).collect()
}

/// Applies one reduction and regularizes the result. A descriptor that does
/// not denote a current redex of `p` is rejected.
pub fn apply_reduction(p: &Proof, redex: &Redex) -> Result<Proof> {
    let cut = p
        .at_path(&redex.path)
        .filter(|c| c.rule == Rule::Cut)
        .ok_or_else(|| Error::StaleRedex(format!("{redex}: no cut at this path")))?;
    if !cut_redexes(cut, &redex.path).contains(redex) {
        return Err(Error::StaleRedex(format!("{redex}: not offered by this cut")));
    }
    let mut ids = IdGen::after(p);
    let reduced = reduce_cut(cut, redex.kind, redex.side, &mut ids)?;
    debug_assert!(reduced.conclusion == cut.conclusion);
    Ok(regularize(&p.replace_at(&redex.path, reduced)))
}

// Occurrence tags: positions in the reduced cut's conclusion, or one of two
// markers for formulas that are cut away.
const CUT: usize = usize::MAX;
const INNER: usize = usize::MAX - 1;

#[derive(Clone)]
struct Tagged {
    p: Arc<Proof>,
    tags: Vec<usize>,
}

impl Tagged {
    fn pos(&self, tag: usize) -> usize {
        self.tags.iter().position(|&t| t == tag).expect("tag present")
    }

    fn front(self, ids: &mut IdGen, k: usize) -> Result<Tagged> {
        let mut tags = self.tags;
        let t = tags.remove(k);
        tags.insert(0, t);
        Ok(Tagged { p: bring_to_front(ids, self.p, k)?, tags })
    }

    /// Brings positions `a` and `b` to the front, in that order.
    fn front_pair(self, ids: &mut IdGen, a: usize, b: usize) -> Result<Tagged> {
        let t = self.front(ids, b)?;
        t.front(ids, if a < b { a + 1 } else { a })
    }

    /// Follows the permutation block on top of this premise.
    fn through(&self) -> (Arc<Proof>, Vec<usize>) {
        let (mut cur, mut tags) = (self.p.clone(), self.tags.clone());
        while let Rule::Perm(i) = cur.rule {
            tags.swap(i, i + 1);
            cur = cur.premises[0].clone();
        }
        (cur, tags)
    }
}

fn premise_tags(n: &Proof, tags: &[usize], k: usize) -> Tagged {
    let mut out = vec![INNER; n.premises[k].conclusion.len()];
    for (j, &tag) in tags.iter().enumerate() {
        for (pk, q) in n.ancestors(j) {
            if pk == k {
                out[q] = tag;
            }
        }
    }
    Tagged { p: n.premises[k].clone(), tags: out }
}

fn wrap(node: Proof, premises: &[&Tagged], principal: usize) -> Tagged {
    let tags = (0..node.conclusion.len())
        .map(|j| node.ancestors(j).first().map_or(principal, |&(k, q)| premises[k].tags[q]))
        .collect();
    Tagged { p: Arc::new(node), tags }
}

fn cut_at(ids: &mut IdGen, l: Tagged, kl: usize, r: Tagged, kr: usize) -> Result<Tagged> {
    let l = l.front(ids, kl)?;
    let r = r.front(ids, kr)?;
    let tags = l.tags[1..].iter().chain(&r.tags[1..]).copied().collect();
    Ok(Tagged { p: Arc::new(Proof::cut(ids, l.p, r.p)?), tags })
}

/// Cuts `own` at position `k` against the other premise at position 0,
/// keeping the original orientation.
fn cut_oriented(ids: &mut IdGen, side: Side, own: Tagged, k: usize, other: Tagged) -> Result<Tagged> {
    match side {
        Side::Left => cut_at(ids, own, k, other, 0),
        Side::Right => cut_at(ids, other, 0, own, k),
    }
}

fn finish(ids: &mut IdGen, t: Tagged, len: usize) -> Result<Proof> {
    let perm: Vec<usize> = (0..len).map(|k| t.pos(k)).collect();
    debug_assert_eq!(t.tags.len(), len);
    let p = permute(ids, t.p, &perm)?;
    Ok(Arc::try_unwrap(p).unwrap_or_else(|a| (*a).clone()))
}

fn reduce_cut(cut: &Proof, kind: RedexKind, side: Side, ids: &mut IdGen) -> Result<Proof> {
    let left_len = cut.premises[0].conclusion.len() - 1;
    let total = cut.conclusion.len();
    let tagged = |k: usize, range: std::ops::Range<usize>| Tagged {
        p: cut.premises[k].clone(),
        tags: std::iter::once(CUT).chain(range).collect(),
    };
    let prem = [tagged(0, 0..left_len), tagged(1, left_len..total)];
    let own = prem[side.index()].clone();
    let other = prem[side.other().index()].clone();
    let (n, ntags) = own.through();
    let k = ntags.iter().position(|&t| t == CUT).expect("cut formula");
    let rest = |t: &Tagged| t.tags[1..].to_vec();

    let result = match kind {
        RedexKind::Axiom => {
            let mut tags = vec![ntags[1 - k]];
            tags.extend(rest(&other));
            Tagged { p: other.p.clone(), tags }
        }
        RedexKind::Weakening => {
            let mut cur = premise_tags(&n, &ntags, 0);
            let formulas = other.p.conclusion.formulas();
            for j in (1..formulas.len()).rev() {
                let w = Proof::weak(ids, formulas[j].clone(), cur.p.clone())?;
                cur = wrap(w, &[&cur], other.tags[j]);
            }
            cur
        }
        RedexKind::Contraction => {
            let n0 = premise_tags(&n, &ntags, 0);
            let copy = Tagged { p: Arc::new(other.p.with_fresh_ids(ids)), tags: other.tags.clone() };
            let mut cur = match side {
                Side::Left => {
                    let inner = cut_at(ids, n0, 0, other.clone(), 0)?;
                    cut_at(ids, inner, 0, copy, 0)?
                }
                Side::Right => {
                    let inner = cut_at(ids, other.clone(), 0, n0, 0)?;
                    let k = inner.pos(CUT);
                    cut_at(ids, copy, 0, inner, k)?
                }
            };
            for &t in &other.tags[1..] {
                let pos: Vec<usize> = (0..cur.tags.len()).filter(|&j| cur.tags[j] == t).collect();
                cur = cur.front_pair(ids, pos[0], pos[1])?;
                let c = Proof::contr(ids, cur.p.clone())?;
                cur = wrap(c, &[&cur], t);
            }
            cur
        }
        RedexKind::Quantifier => {
            let Rule::All(alpha) = &n.rule else {
                return Err(Error::StaleRedex("quantifier redex without a universal side".into()));
            };
            let (o, otags) = other.through();
            let Rule::Ex(t) = &o.rule else {
                return Err(Error::StaleRedex("quantifier redex without an existential side".into()));
            };
            let n0 = premise_tags(&n, &ntags, 0);
            let n0 = Tagged { p: Arc::new(n0.p.subst_free(alpha, t, ids)), tags: n0.tags };
            let o0 = premise_tags(&o, &otags, 0);
            cut_oriented(ids, side, n0, 0, o0)?
        }
        RedexKind::Boolean => {
            let (o, otags) = other.through();
            let n0 = premise_tags(&n, &ntags, 0);
            let n1 = premise_tags(&n, &ntags, 1);
            let mut o0 = premise_tags(&o, &otags, 0);
            // Tell the two disjuncts apart: the right one is cut first.
            o0.tags[1] = INNER;
            match side {
                Side::Left => {
                    let inner = cut_at(ids, n1, 0, o0, 1)?;
                    let k = inner.pos(CUT);
                    cut_at(ids, n0, 0, inner, k)?
                }
                Side::Right => {
                    let inner = cut_at(ids, o0, 1, n1, 0)?;
                    let k = inner.pos(CUT);
                    cut_at(ids, inner, k, n0, 0)?
                }
            }
        }
        RedexKind::UnaryPerm => {
            let n0 = premise_tags(&n, &ntags, 0);
            let q = n0.pos(CUT);
            let principal = ntags[0];
            let mut cur = cut_oriented(ids, side, n0, q, other)?;
            let pos: Vec<usize> = (0..cur.tags.len()).filter(|&j| cur.tags[j] == principal).collect();
            cur = match pos.as_slice() {
                [] => cur,
                [a] => cur.front(ids, *a)?,
                [a, b] => cur.front_pair(ids, *a, *b)?,
                _ => unreachable!("at most two principal ancestors"),
            };
            let f0 = n.conclusion.formulas()[0].clone();
            let node = match &n.rule {
                Rule::Or => Proof::or(ids, cur.p.clone())?,
                Rule::All(a) => Proof::all(ids, a.clone(), Some(f0), cur.p.clone())?,
                Rule::Ex(t) => Proof::ex(ids, t.clone(), Some(f0), cur.p.clone())?,
                Rule::Weak => Proof::weak(ids, f0, cur.p.clone())?,
                Rule::Contr => Proof::contr(ids, cur.p.clone())?,
                r => return Err(Error::StaleRedex(format!("no unary permutation over {}", r.tag()))),
            };
            wrap(node, &[&cur], principal)
        }
        RedexKind::BinaryPerm => {
            let (pk, _) = n.ancestors(k)[0];
            let owner = premise_tags(&n, &ntags, pk);
            let q = owner.pos(CUT);
            let head = owner.tags[0];
            let mut cur = cut_oriented(ids, side, owner, q, other)?;
            cur = cur.clone().front(ids, cur.pos(head))?;
            let sibling = premise_tags(&n, &ntags, 1 - pk);
            let (a, b) = if pk == 0 { (&cur, &sibling) } else { (&sibling, &cur) };
            let node = match n.rule {
                Rule::And => Proof::and(ids, a.p.clone(), b.p.clone())?,
                Rule::Cut => Proof::cut(ids, a.p.clone(), b.p.clone())?,
                ref r => return Err(Error::StaleRedex(format!("no binary permutation over {}", r.tag()))),
            };
            wrap(node, &[a, b], ntags[0])
        }
    };
    finish(ids, result, total)
}
