use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclarationError {
    #[error("constant {constant} has a domain of size {size}; at least 2 values are required")]
    DomainTooSmall { constant: Symbol, size: usize },
    #[error("constant {0} is declared twice")]
    DuplicateConstant(Symbol),
    #[error("value {value} is listed twice in the domain of {constant}")]
    DuplicateValue { constant: Symbol, value: Symbol },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("ill-formed formula: atom {0} is not in the signature")]
    AtomOutsideSignature(String),
    #[error("cardinality expansion needs {needed} subsets, over the limit of {limit}")]
    ExpansionTooLarge { needed: u128, limit: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("stable model search exceeded the candidate budget of {limit} interpretations")]
    BudgetExceeded { limit: u64 },
}

/// A violated well-formedness condition on a causal law.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct LawDiagnostic {
    pub message: String,
    pub constant: Option<Symbol>,
}

impl LawDiagnostic {
    pub fn new(message: impl Into<String>, constant: Option<Symbol>) -> Self {
        LawDiagnostic {
            message: message.into(),
            constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Declaration(#[from] DeclarationError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("law {index}: {diagnostic}")]
    Law {
        index: usize,
        diagnostic: LawDiagnostic,
    },
    #[error("{0}")]
    Diagnostic(#[from] LawDiagnostic),
    #[error("C+ description is not definite: law {index} has head {head}")]
    NonDefinite { index: usize, head: String },
    #[error("query step {step} is outside horizon {horizon}")]
    StepOutOfHorizon { step: usize, horizon: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
