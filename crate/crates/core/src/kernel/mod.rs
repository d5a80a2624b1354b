//! Proofs in a one-sided sequent calculus and everything needed to read,
//! validate and print them.

pub mod check;
pub mod elaborate;
pub mod proof;
pub mod regularize;
pub mod syntax;

pub use check::{check_proof, is_valid, Violation, ViolationKind};
pub use elaborate::{
    bring_to_front, elaborate, elaborate_problem, permute, print_problem, print_proof, proof_to_sexp, reorder,
};
pub use proof::{IdGen, NodeId, Proof, Rule, RuleTag};
pub use regularize::regularize;
pub use syntax::{Problem, Signature};
