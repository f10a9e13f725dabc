//! Finite complete rewriting systems for finite semigroups.
//!
//! The crate builds presentations by finite complete string rewriting systems
//! for semigroups obtained by adjoining a zero, by ideal extension, and as
//! (0-)Rees matrix semigroups, and chains these into a pipeline producing such
//! a system for any finite regular semigroup given by its Cayley table.
//! Every output can be checked: critical pairs for local confluence, a
//! well-founded order verified on a ball of words for termination, and
//! witness multiplication against the Cayley table.

pub mod confluence;
pub mod constructions;
pub mod order;
pub mod rewrite;
pub mod semigroup;
pub mod word;

pub use rewrite::{ReductionTrace, RewriteError, RewritingSystem, Rule, StretchCache};
pub use word::{Alphabet, Letter, LetterSet, Word, WordError};
