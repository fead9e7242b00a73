//! Propositional formulas under the stable model semantics, BC+ action
//! descriptions, their translation into propositional theories, and the
//! transition systems and queries built on top of them.

pub mod action;
pub mod error;
pub mod formula;
pub mod frontends;
pub mod query;
pub mod signature;
pub mod stable;
#[cfg(feature = "suite")]
pub mod suite;
pub mod symbol;
pub mod transition;
pub mod translate;

pub use action::{classify, validate_law, Abbreviation, ActionDescription, CausalLaw, LawForm};
pub use error::{Error, Result};
pub use formula::{Formula, Interpretation};
pub use signature::{Atom, ConstantDecl, ConstantKind, Signature};
pub use stable::{is_stable_model, stable_models, EngineConfig, StableEngine, StableQuery};
pub use symbol::Symbol;
pub use translate::{timestamp, translate, TimedAtom, TimedTheory, Translation};
pub use transition::{Path, State, Transition, TransitionSystem, Valuation};
pub use query::{solve, Maxstep, QueryOutcome, QuerySpec, Solution, SolveOptions, StepRef};
