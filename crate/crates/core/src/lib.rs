//! A workbench for BCCSP with parallel composition.
//!
//! Terms are parsed with [`syntax::parse`], given an operational semantics by
//! [`semantics`], compared under every relation of the linear time to
//! branching time spectrum by [`equivalences`], and reasoned about
//! equationally through [`axioms`], [`eliminate`] and [`models`]. The
//! [`witness`] module checks the families of equations used to show that
//! possible futures and the nested semantics have no finite basis.

pub mod alphabet;
pub mod axioms;
pub mod eliminate;
pub mod models;
pub mod equivalences;
pub mod error;
pub mod observations;
pub mod semantics;
pub mod space;
pub mod syntax;
pub mod term;
pub mod witness;

pub use alphabet::{Action, Alphabet, Lang, Mode};
pub use equivalences::{Checker, Relation, SimFlavor};
pub use error::{Error, Result};
pub use term::{Substitution, Term};
