//! A small kernel for the internal language of weak infinity-groupoids.
//!
//! The language has one base type `*`, iterated hom types `u = v`, variables,
//! and coherence operations `coh_{D.T}(d)` over contractible contexts. This
//! crate provides the abstract syntax and its structural operations
//! ([`syntax`]), a concrete surface syntax for `.coh` files ([`parse`]), the
//! typing judgments ([`check`]), an elaboration into an identity-type fragment
//! of Martin-Lof type theory with a normalizer ([`mltt`]), and finite strict
//! globular models used as brute-force semantic oracles ([`glob`]).

pub mod check;
pub mod corpus;
pub mod glob;
pub mod mltt;
pub mod parse;
pub mod syntax;
