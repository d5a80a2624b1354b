//! Rewriting with grammar productions and enumeration of normal forms.
//!
//! The enumerator fires the leftmost-outermost redex that is actually
//! needed: it never rewrites under a λ, and it descends into the first
//! argument of a universal row only while that row is blocked. The term
//! substituted by an explicit substitution is rewritten only after the body,
//! because a body that becomes a pair copies it. Since every
//! normal form of an acyclic grammar is reachable this way, the result
//! agrees with exhaustive rewriting at all positions, which is kept around
//! as a test oracle ([`normal_forms_all_positions`]).

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Firing, Grammar, Param};
use crate::error::{Error, Result};
use crate::lambda::STerm;
use crate::term::FoTerm;

/// Rewrite steps allowed per start term unless stated otherwise.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Pairs `(formula index, witness tuple)`, ordered.
pub type Language = BTreeSet<(usize, Vec<FoTerm>)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// Depth-first, always firing the leftmost needed redex.
    Serial,
    /// Depth-first, firing a needed redex chosen by a seeded generator.
    Randomized(u64),
    /// Breadth-first with each frontier expanded on the rayon pool.
    Parallel,
}

type Path = Vec<u8>;

fn child(t: &STerm, k: u8) -> Option<&STerm> {
    match (t, k) {
        (STerm::App(f, _), 0) | (STerm::Pair(f, _), 0) | (STerm::Subst(f, _, _), 0) => Some(f),
        (STerm::App(_, a), 1) | (STerm::Pair(_, a), 1) | (STerm::Subst(_, _, a), 1) => Some(a),
        (STerm::Proj(_, x), 0) | (STerm::Lam(_, _, x), 0) => Some(x),
        _ => None,
    }
}

fn get_at<'a>(t: &'a STerm, path: &[u8]) -> &'a STerm {
    path.iter().fold(t, |cur, &k| child(cur, k).expect("valid path"))
}

fn with_at(t: &STerm, path: &[u8], new: STerm) -> STerm {
    let Some((&k, rest)) = path.split_first() else {
        return new;
    };
    let sub = |x: &STerm| Box::new(with_at(x, rest, new));
    match (t, k) {
        (STerm::App(f, a), 0) => STerm::App(sub(f), a.clone()),
        (STerm::App(f, a), _) => STerm::App(f.clone(), sub(a)),
        (STerm::Pair(a, b), 0) => STerm::Pair(sub(a), b.clone()),
        (STerm::Pair(a, b), _) => STerm::Pair(a.clone(), sub(b)),
        (STerm::Subst(s, al, u), 0) => STerm::Subst(sub(s), al.clone(), u.clone()),
        (STerm::Subst(s, al, u), _) => STerm::Subst(s.clone(), al.clone(), sub(u)),
        (STerm::Proj(i, x), _) => STerm::Proj(*i, sub(x)),
        (STerm::Lam(x, ty, b), _) => STerm::Lam(x.clone(), ty.clone(), sub(b)),
        _ => unreachable!("path through a leaf"),
    }
}

enum Redex {
    No,
    Ready,
    /// Blocked universal row; the path leads to its first argument.
    Blocked(Path),
}

fn classify(t: &STerm, g: &Grammar) -> Redex {
    if !matches!(t, STerm::App(..) | STerm::Nt(_)) {
        return Redex::No;
    }
    let (head, args) = t.spine();
    let STerm::Nt(id) = head else {
        return Redex::No;
    };
    if g.arity(*id) != Some(args.len()) || args.is_empty() {
        return Redex::No;
    }
    let pattern = g.productions.get(id).and_then(|ps| ps.first()).map(|p| &p.params[0]);
    match (pattern, args[0]) {
        (Some(Param::Pair(..)), STerm::Pair(..)) | (Some(Param::Var(_)), _) | (None, _) => Redex::Ready,
        (Some(Param::Pair(..)), _) => {
            let mut path = vec![0u8; args.len() - 1];
            path.push(1);
            Redex::Blocked(path)
        }
    }
}

fn needed(t: &STerm, g: &Grammar, path: &mut Path, out: &mut Vec<Path>) {
    match classify(t, g) {
        Redex::Ready => out.push(path.clone()),
        Redex::Blocked(rel) => {
            let n = path.len();
            path.extend(&rel);
            needed(get_at(t, &rel), g, path, out);
            path.truncate(n);
        }
        Redex::No => match t {
            STerm::Pair(a, b) => {
                path.push(0);
                needed(a, g, path, out);
                path.pop();
                path.push(1);
                needed(b, g, path, out);
                path.pop();
            }
            STerm::Subst(a, _, b) => {
                // Once `a` turns into a pair, `b` is copied into each
                // component. Rewriting `b` earlier would tie the copies
                // together and lose normal forms, so it waits for `a`.
                let before = out.len();
                path.push(0);
                needed(a, g, path, out);
                path.pop();
                if out.len() == before {
                    path.push(1);
                    needed(b, g, path, out);
                    path.pop();
                }
            }
            STerm::Proj(_, x) => {
                path.push(0);
                needed(x, g, path, out);
                path.pop();
            }
            _ => {}
        },
    }
}

fn first_needed(t: &STerm, g: &Grammar) -> Option<Path> {
    match classify(t, g) {
        Redex::Ready => Some(Vec::new()),
        Redex::Blocked(rel) => first_needed(get_at(t, &rel), g).map(|p| [rel, p].concat()),
        Redex::No => match t {
            STerm::Pair(a, b) | STerm::Subst(a, _, b) => first_needed(a, g)
                .map(|p| [vec![0], p].concat())
                .or_else(|| first_needed(b, g).map(|p| [vec![1], p].concat())),
            STerm::Proj(_, x) => first_needed(x, g).map(|p| [vec![0], p].concat()),
            _ => None,
        },
    }
}

fn all_positions(t: &STerm, g: &Grammar, path: &mut Path, out: &mut Vec<Path>) {
    if let Redex::Ready = classify(t, g) {
        out.push(path.clone());
    }
    for k in 0..2u8 {
        if let Some(c) = child(t, k) {
            path.push(k);
            all_positions(c, g, path, out);
            path.pop();
        }
    }
}

fn fire_at(t: &STerm, path: &[u8], g: &Grammar) -> Vec<STerm> {
    let (head, args) = get_at(t, path).spine();
    let STerm::Nt(id) = head else {
        return Vec::new();
    };
    match g.fire(*id, &args) {
        Firing::Blocked => Vec::new(),
        Firing::Alternatives(alts) => alts.into_iter().map(|r| with_at(t, path, r).normalize()).collect(),
    }
}

/// All one-step successors: every production at every redex position,
/// including under λ, each followed by normalization.
pub fn rewrite_step(t: &STerm, g: &Grammar) -> Vec<STerm> {
    let t = t.normalize();
    let mut paths = Vec::new();
    all_positions(&t, g, &mut Vec::new(), &mut paths);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for p in paths {
        for s in fire_at(&t, &p, g) {
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    out
}

fn sorted(set: HashSet<STerm>) -> Vec<STerm> {
    let mut v: Vec<(String, STerm)> = set.into_iter().map(|t| (t.to_string(), t)).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v.into_iter().map(|(_, t)| t).collect()
}

fn charge(steps: &mut usize, n: usize, budget: usize) -> Result<()> {
    *steps += n;
    if *steps > budget {
        Err(Error::RewriteBudget(budget))
    } else {
        Ok(())
    }
}

/// The normal forms derivable from `t`, sorted by their printed form.
pub fn normal_forms(t: &STerm, g: &Grammar, how: Enumeration, budget: usize) -> Result<Vec<STerm>> {
    let start = t.normalize();
    let mut steps = 0usize;
    let mut seen: HashSet<STerm> = HashSet::from([start.clone()]);
    let mut nfs = HashSet::new();
    match how {
        Enumeration::Serial | Enumeration::Randomized(_) => {
            let mut rng = match how {
                Enumeration::Randomized(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
                _ => None,
            };
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                let path = match rng.as_mut() {
                    None => first_needed(&u, g),
                    Some(rng) => {
                        let mut all = Vec::new();
                        needed(&u, g, &mut Vec::new(), &mut all);
                        (!all.is_empty()).then(|| all.swap_remove(rng.gen_range(0..all.len())))
                    }
                };
                let Some(path) = path else {
                    nfs.insert(u);
                    continue;
                };
                let mut succ = fire_at(&u, &path, g);
                charge(&mut steps, succ.len(), budget)?;
                if let Some(rng) = rng.as_mut() {
                    succ.shuffle(rng);
                }
                stack.extend(succ.into_iter().filter(|s| seen.insert(s.clone())));
            }
        }
        Enumeration::Parallel => {
            let mut frontier = vec![start];
            while !frontier.is_empty() {
                let expanded: Vec<Option<Vec<STerm>>> =
                    frontier.par_iter().map(|u| first_needed(u, g).map(|p| fire_at(u, &p, g))).collect();
                let mut next = Vec::new();
                for (u, e) in frontier.into_iter().zip(expanded) {
                    match e {
                        None => {
                            nfs.insert(u);
                        }
                        Some(succ) => {
                            charge(&mut steps, succ.len(), budget)?;
                            next.extend(succ.into_iter().filter(|s| seen.insert(s.clone())));
                        }
                    }
                }
                frontier = next;
            }
        }
    }
    Ok(sorted(nfs))
}

/// Closure of [`rewrite_step`]; exponential, meant for small inputs.
pub fn normal_forms_all_positions(t: &STerm, g: &Grammar, budget: usize) -> Result<Vec<STerm>> {
    let start = t.normalize();
    let mut steps = 0usize;
    let mut seen: HashSet<STerm> = HashSet::from([start.clone()]);
    let mut nfs = HashSet::new();
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        let succ = rewrite_step(&u, g);
        if succ.is_empty() {
            nfs.insert(u);
            continue;
        }
        charge(&mut steps, succ.len(), budget)?;
        stack.extend(succ.into_iter().filter(|s| seen.insert(s.clone())));
    }
    Ok(sorted(nfs))
}

/// `L(π)` via serial enumeration with the default budget.
pub fn language(g: &Grammar) -> Result<Language> {
    language_with(g, Enumeration::Serial, DEFAULT_BUDGET)
}

/// `L(π)`: the evaluated normal forms of each start term `σ[root:i] ⟨⟩ … ⟨⟩`.
/// The budget applies to each start term separately.
pub fn language_with(g: &Grammar, how: Enumeration, budget: usize) -> Result<Language> {
    let mut out = Language::new();
    for i in 0..g.width {
        for nf in normal_forms(&g.start(i), g, how, budget)? {
            out.insert((i, nf.evaluate_substitutions()?));
        }
    }
    Ok(out)
}

/// `L(t)` for a start term of sequence type, with every normal form
/// evaluated to its first-order components.
pub fn derivable(t: &STerm, g: &Grammar, how: Enumeration, budget: usize) -> Result<BTreeSet<Vec<FoTerm>>> {
    normal_forms(t, g, how, budget)?.iter().map(STerm::evaluate_substitutions).collect()
}
