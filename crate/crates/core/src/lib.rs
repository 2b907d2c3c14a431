//! An executable toolkit for realizability over the SK combinatory algebra.
//!
//! * [`term`], [`reduce`], [`combinators`]: terms, weak reduction, bracket
//!   abstraction and the derived combinators.
//! * [`asm`]: assemblies, modest sets and tracked morphisms.
//! * [`per`]: partial equivalence relations and their category.
//! * [`subquot`]: the subquotient functor and its full faithfulness.
//! * [`equiv`]: every modest set is isomorphic to a subquotient.
//! * [`cli`]: the workspace language and command runner.

pub mod asm;
pub mod cli;
pub mod combinators;
pub mod equiv;
pub mod error;
pub mod laws;
pub mod per;
pub mod reduce;
pub mod subquot;
pub mod term;
pub mod tristate;

pub use error::{Error, Result};
pub use reduce::Fuel;
pub use term::Term;
pub use tristate::TriState;
