//! Herbrand grammars of proofs with Π₂ cuts, and how cut reduction changes them.
//!
//! Start with [`instance::Instance`] to load a problem file, then
//! [`grammar::language_of`], [`reduce::eliminate_cuts`] and the checks in
//! [`analysis`].

pub mod analysis;
pub mod cli;
pub mod error;
pub mod formula;
pub mod grammar;
pub mod instance;
pub mod kernel;
pub mod lambda;
pub mod reduce;
pub mod sexp;
pub mod term;
pub mod types;

#[doc = include_str!("../../../book/src/introduction.md")]
mod chapter0 {}
#[doc = include_str!("../../../book/src/proofs.md")]
mod chapter1 {}
#[doc = include_str!("../../../book/src/grammars.md")]
mod chapter2 {}
#[doc = include_str!("../../../book/src/reduction.md")]
mod chapter3 {}
#[doc = include_str!("../../../book/src/analysis.md")]
mod chapter4 {}
#[doc = include_str!("../../../book/src/cli.md")]
mod chapter5 {}
