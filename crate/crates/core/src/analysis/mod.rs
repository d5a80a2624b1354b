//! Expansions, tautology checking, language comparison and the harness
//! that checks each reduction against the language relation it should
//! preserve.

mod canonical;
mod compare;
mod expansion;
mod lemma;

pub use canonical::{canonicity_checks, CanonicityCheck};
pub use compare::{compare_languages, show_tuple, Comparison, Relation};
pub use expansion::{
    expansion, expansion_from, instantiate_block, is_tautology, Expansion, Tautology, TRUTH_TABLE_LIMIT,
};
pub use lemma::{
    check_redex, classify_redex, end_to_end_check, search_incomparable, verify_all_redexes, verify_preservation,
    EndToEnd, Expected, IncomparableStep, LemmaCase, LemmaExpectation, PreservationCheck, Verdict,
};
