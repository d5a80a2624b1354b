use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{apply_reduction, cut_redexes, look_through, Redex, RedexKind, Side};
use crate::error::{Error, Result};
use crate::formula::{Formula, Quant};
use crate::kernel::{Proof, Rule};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Reduce on the existential premise of a cut before the universal one.
    #[default]
    WeakFirst,
    /// Weak-first, additionally delaying contractions on genuine Π₂ cut
    /// formulas and never permuting two cuts on genuine Π₂ formulas.
    Restricted,
    /// Any redex, by kind priority only.
    Unrestricted,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::WeakFirst => "weak-first",
            Strategy::Restricted => "restricted",
            Strategy::Unrestricted => "unrestricted",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "weak-first" => Ok(Strategy::WeakFirst),
            "restricted" => Ok(Strategy::Restricted),
            "unrestricted" => Ok(Strategy::Unrestricted),
            _ => Err(Error::Io(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub redex: Redex,
    /// Size of the proof after the step.
    pub size: usize,
    pub cuts: usize,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.redex.path.iter().map(|k| k.to_string()).collect();
        write!(
            f,
            "{:>4}  [{}]  {} ({})  size {}",
            self.step,
            path.join("."),
            self.redex.kind,
            self.redex.side,
            self.size
        )
    }
}

/// A redex the strategy declined, with the step at which it was seen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub step: usize,
    pub redex: Redex,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Elimination {
    #[serde(skip)]
    pub proof: Proof,
    pub strategy: Strategy,
    pub trace: Vec<TraceStep>,
    pub skipped: Vec<Skipped>,
}

/// Elimination stopped early; `partial` holds the proof reached so far.
#[derive(Debug)]
pub struct Interrupted {
    pub error: Error,
    pub partial: Elimination,
}

fn is_existential(f: &Formula) -> bool {
    matches!(f.prefix().0.first(), Some((Quant::Ex, _)))
}

/// The premise whose cut formula is existential; the left one when neither is.
pub fn weak_side(cut: &Proof) -> Side {
    if !is_existential(&cut.premises[0].conclusion.0[0]) && is_existential(&cut.premises[1].conclusion.0[0]) {
        Side::Right
    } else {
        Side::Left
    }
}

/// Why `strategy` refuses `redex` on `cut`, if it does.
pub fn refusal(strategy: Strategy, cut: &Proof, redex: &Redex) -> Option<String> {
    if strategy != Strategy::Restricted {
        return None;
    }
    let own = &cut.premises[redex.side.index()];
    let formula = &own.conclusion.0[0];
    match redex.kind {
        RedexKind::Contraction if formula.is_genuine_pi2() => {
            let others = cut_redexes(cut, &redex.path).len() - 1;
            (others > 0)
                .then(|| format!("contraction on genuine Pi2 formula {formula} while {others} other redex(es) remain"))
        }
        RedexKind::BinaryPerm => {
            let (n, k) = look_through(own, 0);
            if n.rule != Rule::Cut {
                return None;
            }
            let (pk, _) = n.ancestors(k)[0];
            let inner = &n.premises[pk].conclusion.0[0];
            (formula.is_genuine_pi2() && inner.is_genuine_pi2())
                .then(|| format!("permutation of cuts on genuine Pi2 formulas {formula} and {inner}"))
        }
        _ => None,
    }
}

fn cut_paths_postorder(p: &Proof) -> Vec<Vec<usize>> {
    fn go(p: &Proof, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for (k, q) in p.premises.iter().enumerate() {
            path.push(k);
            go(q, path, out);
            path.pop();
        }
        if p.rule == Rule::Cut {
            out.push(path.clone());
        }
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut out);
    out
}

/// The redex `strategy` reduces next, together with every redex it refuses
/// anywhere in `p`. Cuts are visited innermost first, then left to right.
pub fn select_redex(p: &Proof, strategy: Strategy) -> (Option<Redex>, Vec<(Redex, String)>) {
    let mut refused = Vec::new();
    let mut chosen = None;
    for path in cut_paths_postorder(p) {
        let cut = p.at_path(&path).expect("cut path");
        let weak = weak_side(cut);
        let mut admissible = Vec::new();
        for r in cut_redexes(cut, &path) {
            match refusal(strategy, cut, &r) {
                Some(why) => refused.push((r, why)),
                None => admissible.push(r),
            }
        }
        if chosen.is_none() {
            chosen = admissible.into_iter().min_by_key(|r| {
                let off_weak = strategy != Strategy::Unrestricted && r.side != weak;
                (off_weak, r.kind.priority(), r.side)
            });
        }
    }
    (chosen, refused)
}

/// Reduces until no cut remains, at most `limit` steps.
pub fn eliminate_cuts(p: &Proof, strategy: Strategy, limit: usize) -> Result<Elimination, Box<Interrupted>> {
    let mut state = Elimination { proof: p.clone(), strategy, trace: Vec::new(), skipped: Vec::new() };
    // A refusal is reported once, not at every step it persists.
    let mut noted = HashSet::new();
    let stop = |error: Error, partial: Elimination| Err(Box::new(Interrupted { error, partial }));
    while !state.proof.is_cut_free() {
        let step = state.trace.len() + 1;
        if step > limit {
            return stop(Error::StepLimit(limit), state);
        }
        let (choice, refused) = select_redex(&state.proof, strategy);
        for (redex, reason) in refused {
            if noted.insert((redex.clone(), reason.clone())) {
                state.skipped.push(Skipped { step, redex, reason });
            }
        }
        let Some(redex) = choice else {
            let n = state.proof.cut_count();
            return stop(Error::NoAdmissibleRedex(format!("{n} cut(s) left under {strategy}")), state);
        };
        match apply_reduction(&state.proof, &redex) {
            Ok(next) => state.proof = next,
            Err(e) => return stop(e, state),
        }
        state.trace.push(TraceStep { step, redex, size: state.proof.size(), cuts: state.proof.cut_count() });
    }
    Ok(state)
}
