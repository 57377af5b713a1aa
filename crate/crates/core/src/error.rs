use thiserror::Error;

use crate::symbols::{SymbolId, SymbolType};

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("symbol {0} appears more than once")]
    DuplicateSymbol(SymbolId),

    #[error("no value supplied for symbol {0}")]
    MissingSymbol(SymbolId),

    #[error("value {value} is outside the domain of symbol {id} ({ty:?})")]
    OutOfDomain {
        id: SymbolId,
        ty: SymbolType,
        value: f64,
    },

    #[error("operand symbol {id} has type {found:?}, expected {expected:?}")]
    FlavorMismatch {
        id: SymbolId,
        expected: SymbolType,
        found: SymbolType,
    },

    #[error("constant operand {0} is not a value of the logic domain")]
    NotALogicValue(f64),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("function domain violated: {0}")]
    FunctionDomain(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid weighting matrix: {0}")]
    InvalidWeighting(String),

    #[error("numeric blow-up at step {step}")]
    NumericAbort { step: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
