use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::compare::{compare_languages, show_tuple, Comparison, Relation};
use super::expansion::{expansion, is_tautology};
use crate::error::{Error, Result};
use crate::grammar::{language_of, Language, Mode};
use crate::kernel::{Proof, Rule};
use crate::reduce::{
    applicable_reductions, apply_reduction, eliminate_cuts, herbrand_set, look_through, Redex, RedexKind, Strategy,
};

/// What a reduction is expected to do to the language, read as
/// `L(after)` against `L(before)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Equal,
    SubsetOrEqual,
    NoGuarantee,
}

impl Expected {
    pub fn admits(self, observed: Relation) -> bool {
        match self {
            Expected::Equal => observed == Relation::Equal,
            Expected::SubsetOrEqual => matches!(observed, Relation::Equal | Relation::ProperSubset),
            Expected::NoGuarantee => true,
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::Equal => "equal",
            Expected::SubsetOrEqual => "subset-or-equal",
            Expected::NoGuarantee => "no-guarantee",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaCase {
    /// Permuting a cut over another cut.
    CutPermutation,
    Contraction,
    Quantifier,
    /// Permuting a cut over a ∀ inference.
    QuantifierPermutation,
    Weakening,
    /// Axiom, boolean and the remaining permutations.
    Other,
}

impl fmt::Display for LemmaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaCase::CutPermutation => "cut-permutation",
            LemmaCase::Contraction => "contraction",
            LemmaCase::Quantifier => "quantifier",
            LemmaCase::QuantifierPermutation => "quantifier-permutation",
            LemmaCase::Weakening => "weakening",
            LemmaCase::Other => "other",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaExpectation {
    pub case: LemmaCase,
    /// The cut formula in the premise the redex lives in.
    pub cut_formula: String,
    pub genuine_pi2: bool,
    /// For cut permutations: whether the inner cut formula is genuine Π₂.
    pub inner_genuine_pi2: Option<bool>,
    /// For contractions: whether the other premise contracts the dual.
    pub dual_contracted: Option<bool>,
    pub expected: Expected,
}

/// `true` when some contraction in `p` has an ancestor of position `k` as
/// its principal formula.
fn contracts_ancestor(p: &Proof, k: usize) -> bool {
    let mut stack = vec![(p, k)];
    while let Some((node, j)) = stack.pop() {
        if node.rule == Rule::Contr && j == 0 {
            return true;
        }
        stack.extend(node.ancestors(j).into_iter().map(|(q, i)| (&*node.premises[q], i)));
    }
    false
}

/// The lemma governing `r`, with its side conditions.
pub fn classify_redex(p: &Proof, r: &Redex) -> Result<LemmaExpectation> {
    let cut = p
        .at_path(&r.path)
        .filter(|c| c.rule == Rule::Cut)
        .ok_or_else(|| Error::StaleRedex(format!("no cut at {r}")))?;
    let own = &cut.premises[r.side.index()];
    let formula = &own.conclusion.0[0];
    let genuine_pi2 = formula.is_genuine_pi2();
    let mut out = LemmaExpectation {
        case: LemmaCase::Other,
        cut_formula: formula.to_string(),
        genuine_pi2,
        inner_genuine_pi2: None,
        dual_contracted: None,
        expected: Expected::Equal,
    };
    let (node, _) = look_through(own, 0);
    match r.kind {
        RedexKind::Quantifier => out.case = LemmaCase::Quantifier,
        RedexKind::Weakening => {
            out.case = LemmaCase::Weakening;
            out.expected = Expected::SubsetOrEqual;
        }
        RedexKind::Contraction => {
            out.case = LemmaCase::Contraction;
            if genuine_pi2 {
                let dual = contracts_ancestor(&cut.premises[r.side.other().index()], 0);
                out.dual_contracted = Some(dual);
                out.expected = if dual { Expected::NoGuarantee } else { Expected::SubsetOrEqual };
            }
        }
        RedexKind::BinaryPerm if node.rule == Rule::Cut => {
            out.case = LemmaCase::CutPermutation;
            let (_, k) = look_through(own, 0);
            let (pk, _) = node.ancestors(k)[0];
            let inner = node.premises[pk].conclusion.0[0].is_genuine_pi2();
            out.inner_genuine_pi2 = Some(inner);
            if genuine_pi2 && inner {
                out.expected = Expected::NoGuarantee;
            }
        }
        RedexKind::UnaryPerm if matches!(node.rule, Rule::All(_)) => {
            out.case = LemmaCase::QuantifierPermutation;
            out.expected = Expected::SubsetOrEqual;
        }
        _ => {}
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Violation,
}

/// One redex checked against its lemma.
#[derive(Clone, Debug, Serialize)]
pub struct PreservationCheck {
    pub proof: String,
    pub redex: Redex,
    pub case: LemmaCase,
    pub expected: Expected,
    /// `L(after)` compared with `L(before)`.
    pub observed: Relation,
    /// In `L(before)` only.
    pub lost: Vec<String>,
    /// In `L(after)` only.
    pub gained: Vec<String>,
    pub verdict: Verdict,
}

impl fmt::Display for PreservationCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Consistent => "ok",
            Verdict::Violation => "VIOLATION",
        };
        write!(
            f,
            "{}  {}  {}: expected {}, observed {}  {}",
            self.proof, self.redex, self.case, self.expected, self.observed, verdict
        )?;
        if !self.lost.is_empty() {
            write!(f, "  lost {}", self.lost.join(" "))?;
        }
        if !self.gained.is_empty() {
            write!(f, "  gained {}", self.gained.join(" "))?;
        }
        Ok(())
    }
}

fn check_record(name: &str, r: &Redex, case: LemmaCase, expected: Expected, cmp: Comparison) -> PreservationCheck {
    PreservationCheck {
        proof: name.to_string(),
        redex: r.clone(),
        case,
        expected,
        observed: cmp.relation,
        lost: cmp.only_right.iter().map(show_tuple).collect(),
        gained: cmp.only_left.iter().map(show_tuple).collect(),
        verdict: if expected.admits(cmp.relation) { Verdict::Consistent } else { Verdict::Violation },
    }
}

/// Reduces `r` and checks the language change against `expected`, or
/// against [`classify_redex`] when none is given.
pub fn check_redex(
    name: &str,
    p: &Proof,
    before: &Language,
    r: &Redex,
    mode: Mode,
    expected: Option<Expected>,
) -> Result<PreservationCheck> {
    let class = classify_redex(p, r)?;
    let after = language_of(&apply_reduction(p, r)?, mode)?;
    let expected = expected.unwrap_or(class.expected);
    Ok(check_record(name, r, class.case, expected, compare_languages(&after, before)))
}

pub fn verify_preservation(name: &str, p: &Proof, r: &Redex, mode: Mode) -> Result<PreservationCheck> {
    check_redex(name, p, &language_of(p, mode)?, r, mode, None)
}

/// [`verify_preservation`] for every applicable redex of `p`.
pub fn verify_all_redexes(name: &str, p: &Proof, mode: Mode) -> Result<Vec<PreservationCheck>> {
    let before = language_of(p, mode)?;
    applicable_reductions(p).iter().map(|r| check_redex(name, p, &before, r, mode, None)).collect()
}

/// Cut elimination followed by the containment and tautology checks.
#[derive(Clone, Debug, Serialize)]
pub struct EndToEnd {
    pub proof: String,
    pub strategy: Strategy,
    pub steps: usize,
    pub skipped: usize,
    pub herbrand_size: usize,
    pub language_size: usize,
    /// Herbrand tuples missing from the language; containment holds iff empty.
    pub missing: Vec<String>,
    pub relation: Relation,
    pub tautology: bool,
    pub countermodel: Option<BTreeMap<String, bool>>,
}

impl EndToEnd {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.tautology
    }
}

impl fmt::Display for EndToEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}  {}: {} step(s), herbrand {} of language {} ({}), expansion {}",
            self.proof,
            self.strategy,
            self.steps,
            self.herbrand_size,
            self.language_size,
            self.relation,
            if self.tautology { "tautological" } else { "NOT tautological" }
        )?;
        if !self.missing.is_empty() {
            write!(f, "  missing {}", self.missing.join(" "))?;
        }
        Ok(())
    }
}

pub fn end_to_end_check(name: &str, p: &Proof, strategy: Strategy, limit: usize, mode: Mode) -> Result<EndToEnd> {
    let language = language_of(p, mode)?;
    let run = eliminate_cuts(p, strategy, limit).map_err(|i| i.error)?;
    let herbrand = herbrand_set(&run.proof)?;
    let cmp = compare_languages(&herbrand, &language);
    let taut = is_tautology(&expansion(p)?.disjuncts())?;
    Ok(EndToEnd {
        proof: name.to_string(),
        strategy,
        steps: run.trace.len(),
        skipped: run.skipped.len(),
        herbrand_size: herbrand.len(),
        language_size: language.len(),
        missing: cmp.only_left.iter().map(show_tuple).collect(),
        relation: cmp.relation,
        tautology: taut.valid,
        countermodel: taut.countermodel,
    })
}

/// A reduction step whose languages are incomparable, found by walking.
#[derive(Clone, Debug)]
pub struct IncomparableStep {
    /// Reductions leading from the input to `before`.
    pub prefix: Vec<Redex>,
    pub before: Proof,
    pub redex: Redex,
    pub comparison: Comparison,
}

/// Best-effort search for an incomparable reduction step: `walks` seeded
/// random reduction sequences of at most `depth` steps each.
pub fn search_incomparable(
    p: &Proof,
    mode: Mode,
    seed: u64,
    walks: usize,
    depth: usize,
) -> Result<Option<IncomparableStep>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..walks {
        let mut cur = p.clone();
        let mut lang = language_of(&cur, mode)?;
        let mut prefix = Vec::new();
        for _ in 0..depth {
            let Some(r) = applicable_reductions(&cur).choose(&mut rng).cloned() else { break };
            let next = apply_reduction(&cur, &r)?;
            let next_lang = language_of(&next, mode)?;
            let comparison = compare_languages(&next_lang, &lang);
            if comparison.relation == Relation::Incomparable {
                return Ok(Some(IncomparableStep { prefix, before: cur, redex: r, comparison }));
            }
            prefix.push(r);
            cur = next;
            lang = next_lang;
        }
    }
    Ok(None)
}
