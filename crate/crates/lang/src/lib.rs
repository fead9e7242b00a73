//! Parsing and grounding of action description files.
//!
//! A file declares sorts, objects, constants and variables, states causal
//! laws as schemas over the variables, and defines labeled queries:
//!
//! ```text
//! :- sorts switch; status.
//! :- objects s1, s2 :: switch; on, off :: status.
//! :- constants sw_status(switch) :: inertialFluent(status);
//!              flip(switch) :: exogenousAction.
//! :- variables S :: switch; X, Y :: status.
//! flip(S) causes sw_status(S)=X if sw_status(S)=Y & X\=Y.
//! ```

pub mod ast;
pub mod diagnostic;
pub mod ground;
pub mod lexer;
pub mod parser;

pub use diagnostic::{Diagnostic, Span};
pub use ground::{ground, Description, GroundOptions, Grounded, Mode};
pub use parser::{parse, parse_formula};

/// Parses and grounds `src`.
pub fn load(src: &str, mode: Mode, opts: &GroundOptions) -> Result<Grounded, Diagnostic> {
    ground(&parse(src)?, mode, opts)
}
