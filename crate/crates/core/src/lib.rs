//! Formal-logic workbench for the surprise examination paradox.
//!
//! The crate mechanizes the classical analyses of the paradox end to end:
//!
//! * [`formula`] — the shared object language (terms, formulas, proof
//!   transcripts) with a parser and canonical printer;
//! * [`godel`] — Gödel numbering of formulas and proofs, code-level
//!   connectives, diagonalization, and the decidable proof relation;
//! * [`selfref`] — Fitch's self-referential announcement, its machine-checked
//!   refutation, and the Kaplan–Montague Knower paradox, together with the
//!   code-predicate proof kernel;
//! * [`epistemic`] — the knowledge-rule (KD/KI/KE) formalization: the
//!   announcement, the last-day elimination lemma, and the contradiction from
//!   the knowledge tower;
//! * [`games`] — backward induction and pure Nash enumeration for the finite
//!   iterated prisoner's dilemma;
//! * [`surprise`] — Narveson's maximum-expected-surprise exam schedule with an
//!   independent grid-search oracle.

pub mod epistemic;
pub mod formula;
pub mod games;
pub mod godel;
pub mod selfref;
pub mod surprise;
pub mod testkit;

mod truth;

pub use formula::{Formula, ParseError, Proof, RuleLabel, Step, SymbolEnv, Term};
pub use godel::Code;
