use std::fmt;

use serde::Serialize;

use crate::grammar::Language;
use crate::term::FoTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    ProperSubset,
    ProperSuperset,
    Incomparable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "equal",
            Relation::ProperSubset => "proper-subset",
            Relation::ProperSuperset => "proper-superset",
            Relation::Incomparable => "incomparable",
        })
    }
}

/// How a left language relates to a right one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub relation: Relation,
    /// Tuples of the left language missing from the right one.
    pub only_left: Vec<(usize, Vec<FoTerm>)>,
    pub only_right: Vec<(usize, Vec<FoTerm>)>,
}

pub fn compare_languages(left: &Language, right: &Language) -> Comparison {
    let only_left: Vec<_> = left.difference(right).cloned().collect();
    let only_right: Vec<_> = right.difference(left).cloned().collect();
    let relation = match (only_left.is_empty(), only_right.is_empty()) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::ProperSubset,
        (false, true) => Relation::ProperSuperset,
        (false, false) => Relation::Incomparable,
    };
    Comparison { relation, only_left, only_right }
}

/// Renders `(i, ⟨t1, …⟩)`.
pub fn show_tuple((i, ts): &(usize, Vec<FoTerm>)) -> String {
    let ts: Vec<String> = ts.iter().map(ToString::to_string).collect();
    format!("({i}, ⟨{}⟩)", ts.join(", "))
}
