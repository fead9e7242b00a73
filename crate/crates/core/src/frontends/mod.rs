//! Embeddings of other formalisms into BC+, and the reference translations
//! of BC and C+ that the embeddings are checked against.

pub mod bc;
pub mod cplus;
pub mod pf;

pub use bc::{bc2bcp, BcDescription, BcLaw, BcLawForm};
pub use cplus::{cp2bcp, CplusDescription};
pub use pf::{interpretation_to_state, pf2bcp, state_to_interpretation};
