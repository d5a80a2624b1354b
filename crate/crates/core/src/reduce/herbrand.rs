use crate::error::{Error, Result};
use crate::grammar::{require_sigma1, Language};
use crate::kernel::{Proof, Rule};
use crate::term::FoTerm;

type Track = Option<(usize, Vec<FoTerm>)>;

/// Witness tuples of a cut-free proof of a Σ₁ sequent.
///
/// Each end formula is followed upward through its ancestors. An occurrence
/// that becomes quantifier-free contributes `(i, witnesses)`; occurrences
/// introduced by weakening while still quantified contribute nothing.
pub fn herbrand_set(p: &Proof) -> Result<Language> {
    if !p.is_cut_free() {
        return Err(Error::InvalidProof(format!("Herbrand set of a proof with {} cut(s)", p.cut_count())));
    }
    require_sigma1(p)?;
    let mut out = Language::new();
    let root: Vec<Track> = p
        .conclusion
        .0
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if f.is_quantifier_free() {
                out.insert((i, Vec::new()));
                None
            } else {
                Some((i, Vec::new()))
            }
        })
        .collect();
    let mut stack = vec![(p, root)];
    while let Some((node, tracks)) = stack.pop() {
        let mut above: Vec<Vec<Track>> = node.premises.iter().map(|q| vec![None; q.conclusion.len()]).collect();
        for (j, track) in tracks.into_iter().enumerate() {
            let Some((i, mut prefix)) = track else { continue };
            if let (Rule::Ex(t), 0) = (&node.rule, j) {
                prefix.push(t.clone());
                if node.premises[0].conclusion.0[0].is_quantifier_free() {
                    out.insert((i, prefix));
                    continue;
                }
            }
            for (k, q) in node.ancestors(j) {
                above[k][q] = Some((i, prefix.clone()));
            }
        }
        stack.extend(node.premises.iter().map(|q| &**q).zip(above));
    }
    Ok(out)
}
